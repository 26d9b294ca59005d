#!/usr/bin/env python3
"""Sweep obstacle density and report which planner wins how often.

For each density an ensemble of seeded maps is generated and both planners
are simulated with identical parameters. Prints a win-rate table and writes
the per-density stats as CSV.

Usage: python scripts/density_sweep.py [OUTDIR] [--n MAPS] [--seed SEED]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from refmodel.evaluator import ensemble  # noqa: E402
from refmodel.simulation import SimParams  # noqa: E402
from refmodel.terrain import GenParams  # noqa: E402

DENSITIES = (0.0, 0.1, 0.2, 0.3)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", nargs="?", default="out/density_sweep")
    parser.add_argument("--n", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--width", type=int, default=14)
    parser.add_argument("--height", type=int, default=12)
    parser.add_argument("--capacity", type=float, default=400.0)
    args = parser.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["density,planner,mean_total,min_total,max_total,wins,n_maps"]
    header = f"{'density':>8} {'planner':<16} {'mean':>12} {'wins':>6}"
    print(header)
    print("-" * len(header))
    for density in DENSITIES:
        gen = GenParams(width=args.width, height=args.height, obstacle_density=density)
        params = SimParams(capacity=args.capacity)
        stats = ensemble(gen, args.n, params=params, seed0=args.seed)
        for entry in stats.per_planner:
            rows.append(
                f"{density},{entry.planner},{entry.mean_total:.6f},"
                f"{entry.min_total:.6f},{entry.max_total:.6f},{entry.wins},{args.n}"
            )
            print(f"{density:>8.2f} {entry.planner:<16} {entry.mean_total:>12.3f} {entry.wins:>6}")
    (out / "density_sweep.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"\nwrote {out / 'density_sweep.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
