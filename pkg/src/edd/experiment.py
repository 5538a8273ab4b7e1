"""Headless experiment runs over the archive engine.

A run steps the engine for a fixed number of generations under a fixed
seed. At every broadcast it exports the elite grid as one room file per
non-empty cell (``gen<G>_cell<i>_<j>.room``), appends per-cell fitness
rows to ``fitness.csv``, and records a summary row (mean and max elite
fitness, empty-cell count) in ``summary.csv``. ``render_figures`` draws
the final grid as a heatmap and the summary trajectory as a convergence
plot next to the delimited output. ``sweep_all_pairs`` repeats the run
for every unordered pair of the five dimensions and writes a comparison
table with one row per pair per broadcast.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .engine import ElitesBroadcast, Engine, EngineConfig
from .errors import ValidationError
from .metrics import DimensionDescriptor, DimensionKind
from .room import Room, TileKind, create_room, serialize_room

FITNESS_CSV = "fitness.csv"
SUMMARY_CSV = "summary.csv"
COMPARISON_CSV = "comparison.csv"
HEATMAP_PNG = "fitness_heatmap.png"
CONVERGENCE_PNG = "convergence.png"


def default_target(width: int, height: int, id: str = "target") -> Room:
    """Feasible starter canvas: two side doors, one enemy, one treasure."""
    room = create_room(width, height)
    mid = height // 2
    tiles = bytearray(room.tiles)
    tiles[mid * width] = TileKind.DOOR
    tiles[mid * width + width - 1] = TileKind.DOOR
    tiles[mid * width + max(1, width // 3)] = TileKind.ENEMY
    tiles[(mid - 1) * width + min(width - 2, max(1, 2 * width // 3))] = TileKind.TREASURE
    return Room(width, height, bytes(tiles), room.locks, id=id)


@dataclass(frozen=True)
class ExperimentSpec:
    out_dir: Path
    width: int = 13
    height: int = 7
    dims: tuple[DimensionDescriptor, DimensionDescriptor] = (
        DimensionDescriptor(DimensionKind.SPATIAL_PATTERNS),
        DimensionDescriptor(DimensionKind.SYMMETRY),
    )
    generations: int = 2000
    engine: EngineConfig = field(default_factory=EngineConfig)
    target: Optional[Room] = None

    def __post_init__(self) -> None:
        if len(self.dims) != 2:
            raise ValidationError("experiments take exactly two dimension descriptors")
        if self.generations < self.engine.publish_gen:
            raise ValidationError(
                f"{self.generations} generations never reach the first broadcast "
                f"(publish every {self.engine.publish_gen})"
            )
        if self.target is not None and (self.target.width, self.target.height) != (self.width, self.height):
            raise ValidationError("target room size must match the spec size")


@dataclass(frozen=True)
class SummaryRow:
    generation: int
    mean_fitness: float
    max_fitness: float
    empty_cells: int


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    target: Room
    broadcasts: tuple[ElitesBroadcast, ...]
    summary: tuple[SummaryRow, ...]


def _summarize(event: ElitesBroadcast) -> SummaryRow:
    elites = [ind for ind in event.elites.values() if ind is not None]
    fitness = [ind.fitness for ind in elites]
    return SummaryRow(
        generation=event.generation,
        mean_fitness=sum(fitness) / len(fitness) if fitness else 0.0,
        max_fitness=max(fitness, default=0.0),
        empty_cells=sum(1 for ind in event.elites.values() if ind is None),
    )


def _export_grid(event: ElitesBroadcast, out_dir: Path) -> None:
    for index, ind in sorted(event.elites.items()):
        if ind is None:
            continue
        cell = "_".join(str(i) for i in index)
        path = out_dir / f"gen{event.generation}_cell{cell}.room"
        path.write_text(serialize_room(ind.genotype))


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = spec.target if spec.target is not None else default_target(spec.width, spec.height)
    cfg = replace(spec.engine, dims=tuple(spec.dims))
    engine = Engine(target, cfg)

    dim_names = [d.kind.value for d in spec.dims]
    broadcasts: list[ElitesBroadcast] = []
    summary: list[SummaryRow] = []
    # open up front so an unwritable directory fails before evolution starts
    with open(out_dir / FITNESS_CSV, "w", newline="") as fitness_file, \
            open(out_dir / SUMMARY_CSV, "w", newline="") as summary_file:
        fitness_csv = csv.writer(fitness_file)
        fitness_csv.writerow(["generation", "cell", "room", "fitness", "feasible", *dim_names])
        summary_csv = csv.writer(summary_file)
        summary_csv.writerow(["generation", "mean_fitness", "max_fitness", "empty_cells"])

        for generation in range(1, spec.generations + 1):
            engine.step_generation()
            if generation % cfg.publish_gen != 0:
                continue
            event = engine.broadcast_and_reseed()
            broadcasts.append(event)
            _export_grid(event, out_dir)
            for index, ind in sorted(event.elites.items()):
                if ind is None:
                    continue
                fitness_csv.writerow([
                    event.generation,
                    "_".join(str(i) for i in index),
                    ind.genotype.id,
                    repr(ind.fitness),
                    int(ind.feasible),
                    *(repr(v) for v in ind.dims),
                ])
            row = _summarize(event)
            summary.append(row)
            summary_csv.writerow([
                row.generation, repr(row.mean_fitness), repr(row.max_fitness), row.empty_cells,
            ])

    return ExperimentResult(spec, target, tuple(broadcasts), tuple(summary))


def render_figures(result: ExperimentResult, out_dir: Optional[Path] = None) -> tuple[Path, Path]:
    """Final-grid heatmap and summary trajectories as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    out = Path(out_dir if out_dir is not None else result.spec.out_dir)
    d0, d1 = result.spec.dims
    last = result.broadcasts[-1]

    grid = np.full((d0.granularity, d1.granularity), np.nan)
    for (i, j), ind in last.elites.items():
        if ind is not None:
            grid[i, j] = ind.fitness
    fig, ax = plt.subplots(figsize=(6, 5))
    shown = ax.imshow(grid.T, origin="lower", cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xlabel(f"{d0.kind.value} bin")
    ax.set_ylabel(f"{d1.kind.value} bin")
    ax.set_xticks(range(d0.granularity))
    ax.set_yticks(range(d1.granularity))
    ax.set_title(f"elite fitness, generation {last.generation}")
    fig.colorbar(shown, ax=ax, label="fitness")
    heatmap_path = out / HEATMAP_PNG
    fig.savefig(heatmap_path, dpi=120, bbox_inches="tight")
    plt.close(fig)

    generations = [row.generation for row in result.summary]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(generations, [row.mean_fitness for row in result.summary],
            marker="o", label="mean elite fitness")
    ax.plot(generations, [row.max_fitness for row in result.summary],
            marker="s", label="max elite fitness")
    ax.set_xlabel("generation")
    ax.set_ylabel("fitness")
    ax.set_ylim(0.0, 1.0)
    twin = ax.twinx()
    twin.plot(generations, [row.empty_cells for row in result.summary],
              color="tab:red", linestyle="--", marker="x", label="empty cells")
    twin.set_ylabel("empty cells")
    lines, labels = ax.get_legend_handles_labels()
    more_lines, more_labels = twin.get_legend_handles_labels()
    ax.legend(lines + more_lines, labels + more_labels, loc="center right")
    ax.set_title("convergence")
    convergence_path = out / CONVERGENCE_PNG
    fig.savefig(convergence_path, dpi=120, bbox_inches="tight")
    plt.close(fig)

    return heatmap_path, convergence_path


def sweep_all_pairs(base: ExperimentSpec) -> dict[tuple[DimensionKind, DimensionKind], ExperimentResult]:
    """One run per unordered dimension pair, plus a cross-pair comparison table.

    Similarity measures distance to the designer's room, so sweeps that
    include it need an explicit target; the granularity of the base spec's
    first descriptor applies to every axis.
    """
    if base.target is None:
        raise ValidationError("sweeping includes similarity pairs; supply a target room")
    granularity = base.dims[0].granularity
    out_dir = Path(base.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    results: dict[tuple[DimensionKind, DimensionKind], ExperimentResult] = {}
    with open(out_dir / COMPARISON_CSV, "w", newline="") as comparison_file:
        comparison_csv = csv.writer(comparison_file)
        comparison_csv.writerow(
            ["pair", "generation", "mean_fitness", "max_fitness", "empty_cells"])
        for kind_a, kind_b in itertools.combinations(DimensionKind, 2):
            pair_name = f"{kind_a.value}_x_{kind_b.value}"
            spec = replace(
                base,
                out_dir=out_dir / pair_name,
                dims=(DimensionDescriptor(kind_a, granularity),
                      DimensionDescriptor(kind_b, granularity)),
            )
            result = run_experiment(spec)
            results[(kind_a, kind_b)] = result
            for row in result.summary:
                comparison_csv.writerow([
                    pair_name, row.generation,
                    repr(row.mean_fitness), repr(row.max_fitness), row.empty_cells,
                ])
    return results
