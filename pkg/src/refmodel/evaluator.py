"""Side-by-side planner evaluation and configuration ranking.

Compares planners on one map, aggregates over seeded map ensembles, and ranks
the plug-compatible alternatives of an algorithm-block slot by simulated
energy. Runs that deplete the battery before finishing coverage never win
against complete runs; among complete runs the lowest total energy wins and
ties fall to the first planner in enumeration order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .composition import enumerate_alternatives_with_slots
from .core import BlockKind, Model
from .errors import NoAlternatives
from .planners import PlannerId, PlannerRef, resolve_planner
from .repository import ReferenceRepository
from .simulation import SimParams, SimResult, Termination, run
from .terrain import GenParams, Position, TerrainMap, generate

DEFAULT_PLANNERS: tuple[PlannerId, ...] = (PlannerId.EDGE_FOLLOW, PlannerId.TERRAIN_AWARE)


@dataclass(frozen=True)
class ComparisonReport:
    """One simulation per planner on a shared map, plus the winner."""

    map_label: str
    start: Position
    params: SimParams
    runs: tuple[tuple[str, SimResult], ...]
    winner: str


def compare(
    tmap: TerrainMap,
    planners: Sequence[PlannerRef] = DEFAULT_PLANNERS,
    start: Position | None = None,
    params: SimParams | None = None,
    map_label: str = "",
) -> ComparisonReport:
    """Run every planner with identical inputs and pick the winner."""
    if not planners:
        raise ValueError("compare needs at least one planner")
    params = params or SimParams()
    if start is None:
        start = tmap.first_free()
    runs: list[tuple[str, SimResult]] = []
    for planner in planners:
        name, _ = resolve_planner(planner)
        runs.append((name, run(tmap, planner, start=start, params=params)))
    winner = min(
        range(len(runs)),
        key=lambda i: (
            runs[i][1].terminated is not Termination.PATH_COMPLETE,
            runs[i][1].total_consumed,
            i,
        ),
    )
    return ComparisonReport(
        map_label=map_label,
        start=start,
        params=params,
        runs=tuple(runs),
        winner=runs[winner][0],
    )


@dataclass(frozen=True)
class PlannerStats:
    planner: str
    mean_total: float
    min_total: float
    max_total: float
    wins: int


@dataclass(frozen=True)
class EnsembleStats:
    """Per-planner aggregates over a seeded family of generated maps."""

    n_maps: int
    seed_start: int
    seed_end: int
    per_planner: tuple[PlannerStats, ...]

    def stats_for(self, planner: str) -> PlannerStats:
        for stats in self.per_planner:
            if stats.planner == planner:
                return stats
        raise KeyError(planner)


def ensemble(
    gen: GenParams,
    n_maps: int,
    planners: Sequence[PlannerRef] = DEFAULT_PLANNERS,
    params: SimParams | None = None,
    seed0: int = 0,
    start: Position | None = None,
) -> EnsembleStats:
    """Compare planners on maps generated with seeds seed0 .. seed0+n_maps-1."""
    if n_maps < 1:
        raise ValueError("ensemble needs at least one map")
    params = params or SimParams()
    names = [resolve_planner(p)[0] for p in planners]
    totals: dict[str, list[float]] = {name: [] for name in names}
    wins: dict[str, int] = {name: 0 for name in names}
    for offset in range(n_maps):
        seed = seed0 + offset
        tmap = generate(gen, seed)
        report = compare(tmap, planners, start=start, params=params, map_label=f"seed={seed}")
        wins[report.winner] += 1
        for name, result in report.runs:
            totals[name].append(result.total_consumed)
    per_planner = tuple(
        PlannerStats(
            planner=name,
            mean_total=sum(totals[name]) / n_maps,
            min_total=min(totals[name]),
            max_total=max(totals[name]),
            wins=wins[name],
        )
        for name in names
    )
    return EnsembleStats(
        n_maps=n_maps, seed_start=seed0, seed_end=seed0 + n_maps - 1, per_planner=per_planner
    )


@dataclass(frozen=True)
class EnsembleSpec:
    """Arena description for ranking over generated maps instead of one map."""

    gen: GenParams
    n_maps: int
    seed0: int = 0


Arena = Union[TerrainMap, EnsembleSpec]


@dataclass(frozen=True)
class RankedConfiguration:
    """One alternative configuration with its simulated energy score."""

    block_id: str
    planner: str
    score: float
    completed: bool
    model: Model


def rank_configurations(
    model: Model,
    repo: ReferenceRepository,
    slot: str,
    arena: Arena,
    params: SimParams | None = None,
    start: Position | None = None,
) -> list[RankedConfiguration]:
    """Simulate every plug-compatible alternative of the slot and sort by energy.

    Configurations that fail to finish coverage before battery depletion are
    flagged and ranked after all complete ones; ties break by block id.
    """
    slot_block = model.block(slot)
    if slot_block.kind is not BlockKind.ALGORITHM_BLOCK:
        raise NoAlternatives(f"slot '{slot}' is not an algorithm block")
    params = params or SimParams()
    ranked = []
    for block_id, alternative in enumerate_alternatives_with_slots(model, repo, slot):
        planner_name, _ = resolve_planner(alternative.blocks[block_id])
        score, completed = _score(planner_name, arena, params, start)
        ranked.append(
            RankedConfiguration(
                block_id=block_id,
                planner=planner_name,
                score=score,
                completed=completed,
                model=alternative,
            )
        )
    ranked.sort(key=lambda r: (not r.completed, r.score, r.block_id))
    return ranked


def _score(planner: str, arena: Arena, params: SimParams, start: Position | None) -> tuple[float, bool]:
    if isinstance(arena, TerrainMap):
        result = run(arena, planner, start=start, params=params)
        return result.total_consumed, result.terminated is Termination.PATH_COMPLETE
    totals = []
    completed = True
    for offset in range(arena.n_maps):
        tmap = generate(arena.gen, arena.seed0 + offset)
        result = run(tmap, planner, start=start, params=params)
        totals.append(result.total_consumed)
        completed = completed and result.terminated is Termination.PATH_COMPLETE
    return sum(totals) / len(totals), completed


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def comparison_to_csv(report: ComparisonReport) -> str:
    lines = ["planner,steps_completed,total_consumed,terminated,winner"]
    for name, result in report.runs:
        lines.append(
            f"{name},{result.steps_completed},{result.total_consumed:.6f},"
            f"{result.terminated.value},{1 if name == report.winner else 0}"
        )
    return "\n".join(lines) + "\n"


def comparison_to_table(report: ComparisonReport) -> str:
    lines = []
    label = f" on {report.map_label}" if report.map_label else ""
    lines.append(f"comparison{label} (start {report.start.row},{report.start.col})")
    header = f"{'planner':<16} {'steps':>6} {'total':>12} {'terminated':<18} winner"
    lines.append(header)
    lines.append("-" * len(header))
    for name, result in report.runs:
        marker = "*" if name == report.winner else ""
        lines.append(
            f"{name:<16} {result.steps_completed:>6} {result.total_consumed:>12.6f} "
            f"{result.terminated.value:<18} {marker}"
        )
    return "\n".join(lines) + "\n"


def ensemble_to_csv(stats: EnsembleStats) -> str:
    lines = ["planner,mean_total,min_total,max_total,wins,n_maps"]
    for entry in stats.per_planner:
        lines.append(
            f"{entry.planner},{entry.mean_total:.6f},{entry.min_total:.6f},"
            f"{entry.max_total:.6f},{entry.wins},{stats.n_maps}"
        )
    return "\n".join(lines) + "\n"


def ensemble_to_table(stats: EnsembleStats) -> str:
    lines = [
        f"ensemble over {stats.n_maps} maps (seeds {stats.seed_start}..{stats.seed_end})"
    ]
    header = f"{'planner':<16} {'mean':>12} {'min':>12} {'max':>12} {'wins':>6}"
    lines.append(header)
    lines.append("-" * len(header))
    for entry in stats.per_planner:
        lines.append(
            f"{entry.planner:<16} {entry.mean_total:>12.6f} {entry.min_total:>12.6f} "
            f"{entry.max_total:>12.6f} {entry.wins:>6}"
        )
    return "\n".join(lines) + "\n"


def ranking_to_csv(ranked: Sequence[RankedConfiguration]) -> str:
    lines = ["rank,block_id,planner,score,completed"]
    for position, entry in enumerate(ranked, start=1):
        lines.append(
            f"{position},{entry.block_id},{entry.planner},{entry.score:.6f},"
            f"{1 if entry.completed else 0}"
        )
    return "\n".join(lines) + "\n"


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
_LEVEL_FILLS = ("#edf3e6", "#cfe0b8", "#a7c286", "#7c9e58")
_OBSTACLE_FILL = "#2b2b2b"


def remaining_chart_svg(report: ComparisonReport, width: int = 480, height: int = 280) -> str:
    """Line chart of remaining charge against the step counter, one line per planner."""
    margin = 40.0
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    max_t = max((result.steps_completed for _, result in report.runs), default=1) or 1
    top = max(
        [report.params.capacity]
        + [max(result.remaining, default=0.0) for _, result in report.runs]
    )
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle" font-size="12">step</text>',
        f'<text x="12" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {height / 2:.1f})">remaining charge</text>',
    ]
    for index, (name, result) in enumerate(report.runs):
        color = _PALETTE[index % len(_PALETTE)]
        series = (report.params.capacity,) + result.remaining
        points = []
        for t, value in enumerate(series):
            x = margin + plot_w * t / max_t
            y = height - margin - plot_h * value / top
            points.append(f"{x:.2f},{y:.2f}")
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{" ".join(points)}"/>'
        )
        lines.append(
            f'<text x="{width - margin - 4}" y="{margin + 14 * index + 10}" text-anchor="end" '
            f'font-size="11" fill="{color}">{name}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def paths_svg(tmap: TerrainMap, report: ComparisonReport, cell: int = 24) -> str:
    """Grid rendering of the map with each planner's executed path overlaid."""
    width = tmap.width * cell
    height = tmap.height * cell
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    for r in range(tmap.height):
        for c in range(tmap.width):
            value = tmap.cells[r][c]
            fill = _OBSTACLE_FILL if value < 0 else _LEVEL_FILLS[value]
            lines.append(
                f'<rect x="{c * cell}" y="{r * cell}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1"/>'
            )
    n_runs = len(report.runs)
    for index, (name, result) in enumerate(report.runs):
        color = _PALETTE[index % len(_PALETTE)]
        offset = (index - (n_runs - 1) / 2) * max(2.0, cell / 8)
        points = []
        for pos in result.path.positions:
            x = pos.col * cell + cell / 2 + offset
            y = pos.row * cell + cell / 2 + offset
            points.append(f"{x:.2f},{y:.2f}")
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" opacity="0.8" '
            f'points="{" ".join(points)}"><title>{name}</title></polyline>'
        )
    start = report.start
    lines.append(
        f'<circle cx="{start.col * cell + cell / 2:.2f}" cy="{start.row * cell + cell / 2:.2f}" '
        f'r="{cell / 6:.2f}" fill="#111111"/>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
