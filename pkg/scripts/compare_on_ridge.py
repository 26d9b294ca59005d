#!/usr/bin/env python3
"""Reproduce the ridge-map planner comparison and write all report artifacts.

Usage: python scripts/compare_on_ridge.py [OUTDIR]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from refmodel import evaluator  # noqa: E402
from refmodel.demo import REFERENCE_MAP_TEXT, reference_map  # noqa: E402


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/ridge")
    out.mkdir(parents=True, exist_ok=True)
    tmap = reference_map()
    report = evaluator.compare(tmap, map_label="reference.terrain.txt")
    (out / "reference.terrain.txt").write_text(REFERENCE_MAP_TEXT, encoding="utf-8")
    (out / "compare.csv").write_text(evaluator.comparison_to_csv(report), encoding="utf-8")
    (out / "compare.txt").write_text(evaluator.comparison_to_table(report), encoding="utf-8")
    (out / "remaining.svg").write_text(evaluator.remaining_chart_svg(report), encoding="utf-8")
    (out / "paths.svg").write_text(evaluator.paths_svg(tmap, report), encoding="utf-8")
    print(evaluator.comparison_to_table(report), end="")
    print(f"artifacts in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
