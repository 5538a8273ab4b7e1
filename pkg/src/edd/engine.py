"""Continuously evolving archive of room designs.

The archive discretizes the chosen behavioral dimensions into a grid of
cells. Each cell keeps two populations sorted by fitness, one feasible and
one infeasible, and the two never interbreed; infeasible offspring that
become feasible simply migrate. Evolution runs in generations: tournament
parents are drawn from random non-empty cells, bred by two-point crossover
with a mutation chance, evaluated, and binned by their dimension values.
Every ``publish_gen`` generations the per-cell elites are broadcast, then
the whole archive is reseeded: every retained individual contributes a
mutated copy and the designer's target room is injected unchanged.

The engine owns its archive and a seeded rng; identical seeds and command
sequences replay identical event streams. Designer interaction arrives as
commands between generations: target edits conform every stored genotype
to the new target's doors and locked tiles, dimension changes re-bin the
whole population into a fresh cell grid.
"""
from __future__ import annotations

import itertools
import queue
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .errors import ContractError, EddError, PreconditionError, ValidationError
from .metrics import (
    DEFAULT_FITNESS,
    DimensionDescriptor,
    DimensionKind,
    FitnessConfig,
    dimension_values,
    fitness_feasible,
    fitness_infeasible,
    room_feasible,
    similarity,
)
from .patterns import analyze_room
from .room import Room, TileKind

TOURNAMENT_SIZE = (2, 5)  # competitors drawn uniformly from this range
_MUTATION_KINDS = (TileKind.FLOOR, TileKind.WALL, TileKind.ENEMY, TileKind.TREASURE)
_CACHE_LIMIT = 200_000  # evaluations kept before the memo table is dropped


@dataclass(frozen=True)
class Individual:
    """One evaluated genotype; immutable so events can share it safely."""

    genotype: Room
    fitness: float
    feasible: bool
    dims: tuple[float, ...]


@dataclass
class Cell:
    index: tuple[int, ...]
    feasible_pop: list[Individual] = field(default_factory=list)
    infeasible_pop: list[Individual] = field(default_factory=list)

    def population(self, feasible: bool) -> list[Individual]:
        return self.feasible_pop if feasible else self.infeasible_pop

    def best_feasible(self) -> Optional[Individual]:
        return self.feasible_pop[0] if self.feasible_pop else None


@dataclass
class Archive:
    descriptors: tuple[DimensionDescriptor, ...]
    cells: dict[tuple[int, ...], Cell]

    def individuals(self) -> Iterator[Individual]:
        for cell in self.cells.values():
            yield from cell.feasible_pop
            yield from cell.infeasible_pop


@dataclass(frozen=True)
class EngineConfig:
    pop_size: int = 1000
    cell_capacity: int = 25
    publish_gen: int = 100
    parents_per_pop: int = 5
    mutation_chance: float = 0.30
    tile_mutation_rate: float = 0.05
    dims: tuple[DimensionDescriptor, ...] = (
        DimensionDescriptor(DimensionKind.SPATIAL_PATTERNS),
        DimensionDescriptor(DimensionKind.SYMMETRY),
    )
    fitness: FitnessConfig = DEFAULT_FITNESS
    rng_seed: int = 0

    def __post_init__(self) -> None:
        for name in ("pop_size", "cell_capacity", "publish_gen", "parents_per_pop"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be at least 1")
        for name in ("mutation_chance", "tile_mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValidationError(f"{name} must be a probability")
        if not 1 <= len(self.dims) <= 4:
            raise ValidationError("between 1 and 4 dimension descriptors required")


# -- commands and events -----------------------------------------------------


@dataclass(frozen=True)
class UpdateTarget:
    room: Room


@dataclass(frozen=True)
class SetDimensions:
    descriptors: tuple[DimensionDescriptor, ...]


@dataclass(frozen=True)
class Start:
    pass


@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class RequestSnapshot:
    pass


EngineCommand = Union[UpdateTarget, SetDimensions, Start, Stop, RequestSnapshot]


@dataclass(frozen=True)
class ElitesBroadcast:
    """Best feasible individual per cell; None marks a cell with no elite."""

    generation: int
    descriptors: tuple[DimensionDescriptor, ...]
    elites: dict[tuple[int, ...], Optional[Individual]]


@dataclass(frozen=True)
class CellUpdates:
    """Cells whose best feasible fitness improved this generation."""

    generation: int
    descriptors: tuple[DimensionDescriptor, ...]
    entries: dict[tuple[int, ...], Individual]


@dataclass(frozen=True)
class Snapshot:
    generation: int
    target: Room
    descriptors: tuple[DimensionDescriptor, ...]
    cells: dict[tuple[int, ...], tuple[tuple[Individual, ...], tuple[Individual, ...]]]


@dataclass(frozen=True)
class CommandRejected:
    generation: int
    reason: str


EngineEvent = Union[ElitesBroadcast, CellUpdates, Snapshot, CommandRejected]


# -- archive plumbing --------------------------------------------------------


def bin_index(dims: Sequence[float], descriptors: Sequence[DimensionDescriptor]) -> tuple[int, ...]:
    """Cell index of a dimension vector; the 1.0 boundary folds into the top bin."""
    return tuple(min(int(v * d.granularity), d.granularity - 1)
                 for v, d in zip(dims, descriptors))


def create_cells(descriptors: Sequence[DimensionDescriptor]) -> Archive:
    """Empty archive over the product of the descriptors' granularities."""
    if not descriptors:
        raise PreconditionError("at least one dimension descriptor required")
    if len(descriptors) > 4:
        raise PreconditionError("at most 4 simultaneous dimensions supported")
    indices = itertools.product(*(range(d.granularity) for d in descriptors))
    return Archive(tuple(descriptors), {ix: Cell(ix) for ix in indices})


def tournament_select(archive: Archive, feasible: bool, rng: random.Random) -> Optional[Individual]:
    """One parent: a random non-empty cell, then a fitness tournament there.

    Tournament size is drawn uniformly from ``TOURNAMENT_SIZE``; competitors
    are drawn with replacement, so a lone member always wins. Returns None
    when no cell holds a population of the requested kind.
    """
    cells = [cell for cell in archive.cells.values() if cell.population(feasible)]
    if not cells:
        return None
    pop = rng.choice(cells).population(feasible)
    size = rng.randint(*TOURNAMENT_SIZE)
    return max(rng.choices(pop, k=size), key=lambda ind: ind.fitness)


def two_point_crossover(a: bytes, b: bytes, rng: random.Random) -> tuple[bytes, bytes]:
    """Swap the tile segment [x, y) between two equal-length genotypes."""
    x, y = sorted(rng.sample(range(len(a) + 1), 2))
    return a[:x] + b[x:y] + a[y:], b[:x] + a[x:y] + b[y:]


def mutate_tiles(tiles: bytes, immune: bytes, rate: float, rng: random.Random) -> bytes:
    """Re-roll each non-immune tile with probability ``rate``."""
    out = bytearray(tiles)
    for i in range(len(out)):
        if not immune[i] and rng.random() < rate:
            out[i] = rng.choice(_MUTATION_KINDS)
    return bytes(out)


def conform_to_target(tiles: bytes, target: Room) -> bytes:
    """Force the target's door layout and locked tile content onto a genotype."""
    out = bytearray(tiles)
    door = TileKind.DOOR
    for i, kind in enumerate(target.tiles):
        if kind == door:
            out[i] = door
        elif out[i] == door:
            out[i] = TileKind.FLOOR
        if target.locks[i]:
            out[i] = kind
    return bytes(out)


def _immunity_mask(target: Room) -> bytes:
    return bytes(1 if (t == TileKind.DOOR or lock) else 0
                 for t, lock in zip(target.tiles, target.locks))


# -- the engine --------------------------------------------------------------


class Engine:
    """Owns one archive, one target room, and one seeded rng."""

    def __init__(self, target: Room, cfg: EngineConfig = EngineConfig()):
        self.cfg = cfg
        self.target = target
        self.rng = random.Random(cfg.rng_seed)
        self.generation = 0
        self.archive = create_cells(cfg.dims)
        self._immune = _immunity_mask(target)
        self._cache: dict[bytes, tuple[float, bool, tuple[float, ...]]] = {}
        self._ids = itertools.count(1)
        self._init_population()

    # -- evaluation ----------------------------------------------------------

    def _next_id(self) -> str:
        return f"i{next(self._ids)}"

    def _evaluate(self, room: Room) -> Individual:
        hit = self._cache.get(room.tiles)
        if hit is None:
            graph = analyze_room(room)
            ok, _ = room_feasible(room, self.cfg.fitness)
            fitness = (fitness_feasible(room, self.cfg.fitness, graph) if ok
                       else fitness_infeasible(room))
            dims = dimension_values(room, self.archive.descriptors,
                                    target=self.target, graph=graph)
            hit = (fitness, ok, dims)
            if len(self._cache) >= _CACHE_LIMIT:
                self._cache.clear()
            self._cache[room.tiles] = hit
        return Individual(room, hit[0], hit[1], hit[2])

    def _assign(self, ind: Individual) -> Cell:
        """Bin by dimension values; duplicate genotypes per population collapse."""
        cell = self.archive.cells[bin_index(ind.dims, self.archive.descriptors)]
        pop = cell.population(ind.feasible)
        tiles = ind.genotype.tiles
        if not any(member.genotype.tiles == tiles for member in pop):
            pop.append(ind)
        return cell

    def _sort_and_trim(self, cells: Iterable[Cell]) -> None:
        cap = self.cfg.cell_capacity
        for cell in cells:
            for pop in (cell.feasible_pop, cell.infeasible_pop):
                pop.sort(key=lambda ind: -ind.fitness)
                del pop[cap:]

    def _init_population(self) -> None:
        for _ in range(self.cfg.pop_size):
            tiles = mutate_tiles(self.target.tiles, self._immune,
                                 self.cfg.tile_mutation_rate, self.rng)
            room = Room(self.target.width, self.target.height, tiles,
                        self.target.locks, id=self._next_id())
            self._assign(self._evaluate(room))
        self._sort_and_trim(self.archive.cells.values())

    # -- evolution -----------------------------------------------------------

    def breed(self, parents: Sequence[Individual]) -> list[Room]:
        """Two offspring per parent pair; an odd last parent pairs with the first.

        Both parents must come from the same population kind. Crossover runs
        over the row-major tile sequence; each offspring then mutates with
        probability ``mutation_chance``. Door and locked tiles are immune, so
        offspring of conforming parents conform to the target by construction.
        """
        if len({p.feasible for p in parents}) > 1:
            raise ContractError("feasible and infeasible parents must not interbreed")
        pairs = [(parents[i], parents[i + 1]) for i in range(0, len(parents) - 1, 2)]
        if len(parents) % 2 and len(parents) > 1:
            pairs.append((parents[-1], parents[0]))
        rooms = []
        for pa, pb in pairs:
            for tiles in two_point_crossover(pa.genotype.tiles, pb.genotype.tiles, self.rng):
                if self.rng.random() < self.cfg.mutation_chance:
                    tiles = mutate_tiles(tiles, self._immune,
                                         self.cfg.tile_mutation_rate, self.rng)
                rooms.append(Room(self.target.width, self.target.height, tiles,
                                  self.target.locks, id=self._next_id()))
        return rooms

    def step_generation(self) -> dict[tuple[int, ...], Individual]:
        """Run one generation; returns the cells whose elite improved."""
        self.generation += 1
        before = {ix: cell.feasible_pop[0].fitness if cell.feasible_pop else None
                  for ix, cell in self.archive.cells.items()}
        touched = []
        for feasible in (True, False):
            parents = []
            for _ in range(self.cfg.parents_per_pop):
                parent = tournament_select(self.archive, feasible, self.rng)
                if parent is None:
                    break
                parents.append(parent)
            if len(parents) < 2:
                continue
            for room in self.breed(parents):
                touched.append(self._assign(self._evaluate(room)))
        self._sort_and_trim(touched)
        improved = {}
        for cell in touched:
            best = cell.best_feasible()
            if best is not None:
                prior = before[cell.index]
                if prior is None or best.fitness > prior:
                    improved[cell.index] = best
        return improved

    def broadcast_and_reseed(self) -> ElitesBroadcast:
        """Emit the elite grid, then remix the archive around the target.

        Every retained individual contributes a mutated copy alongside
        itself, and the current target room joins unchanged; the trim that
        follows lets both displace weaker members, but never the target
        itself, which stays in the archive until the next reseed.
        """
        event = ElitesBroadcast(
            generation=self.generation,
            descriptors=self.archive.descriptors,
            elites={ix: cell.best_feasible() for ix, cell in self.archive.cells.items()},
        )
        retained = list(self.archive.individuals())
        for ind in retained:
            tiles = mutate_tiles(ind.genotype.tiles, self._immune,
                                 self.cfg.tile_mutation_rate, self.rng)
            room = Room(self.target.width, self.target.height, tiles,
                        self.target.locks, id=self._next_id())
            self._assign(self._evaluate(room))
        target_ind = self._evaluate(self.target)
        self._assign(target_ind)
        self._sort_and_trim(self.archive.cells.values())
        pop = self.archive.cells[bin_index(target_ind.dims, self.archive.descriptors)] \
            .population(target_ind.feasible)
        if not any(m.genotype.tiles == self.target.tiles for m in pop):
            pop[-1] = target_ind  # weakest member cedes its slot; order stays sorted
        return event

    # -- designer interaction ------------------------------------------------

    def apply_dimension_change(self, descriptors: Sequence[DimensionDescriptor]) -> None:
        """Re-bin every individual into a fresh cell grid over new dimensions."""
        members = list(self.archive.individuals())
        self.archive = create_cells(descriptors)
        self._cache.clear()
        for ind in members:
            dims = dimension_values(ind.genotype, self.archive.descriptors, target=self.target)
            self._assign(Individual(ind.genotype, ind.fitness, ind.feasible, dims))
        self._sort_and_trim(self.archive.cells.values())

    def update_target(self, room: Room) -> None:
        """Adopt an edited target; stored genotypes conform to its doors and locks.

        Genotypes the conformance pass leaves untouched keep their evaluation
        (similarity is refreshed when it is a live dimension); changed ones
        are re-evaluated from scratch. The archive is then re-binned.
        """
        if (room.width, room.height) != (self.target.width, self.target.height):
            raise PreconditionError(
                f"target resize {self.target.width}x{self.target.height} -> "
                f"{room.width}x{room.height} requires a new archive")
        self.target = room
        self._immune = _immunity_mask(room)
        self._cache.clear()
        descriptors = self.archive.descriptors
        sim_live = any(d.kind is DimensionKind.SIMILARITY for d in descriptors)
        members = list(self.archive.individuals())
        self.archive = create_cells(descriptors)
        for ind in members:
            tiles = conform_to_target(ind.genotype.tiles, room)
            if tiles != ind.genotype.tiles or ind.genotype.locks != room.locks:
                conformed = Room(room.width, room.height, tiles, room.locks,
                                 id=ind.genotype.id)
                self._assign(self._evaluate(conformed))
            elif sim_live:
                dims = tuple(similarity(ind.genotype, room) if d.kind is DimensionKind.SIMILARITY
                             else v for d, v in zip(descriptors, ind.dims))
                self._assign(Individual(ind.genotype, ind.fitness, ind.feasible, dims))
            else:
                self._assign(ind)
        self._sort_and_trim(self.archive.cells.values())

    def snapshot(self) -> Snapshot:
        return Snapshot(
            generation=self.generation,
            target=self.target,
            descriptors=self.archive.descriptors,
            cells={ix: (tuple(cell.feasible_pop), tuple(cell.infeasible_pop))
                   for ix, cell in self.archive.cells.items()},
        )

    # -- command loop --------------------------------------------------------

    def run(self, commands: "queue.Queue[Optional[EngineCommand]]",
            emit: Callable[[EngineEvent], None]) -> None:
        """Serve commands and evolve until a None command shuts the loop down.

        Commands are drained at generation boundaries only, in arrival
        order, so replays are deterministic. Evolution is off until the
        first Start and pauses on Stop; a paused engine still answers
        snapshots. Broadcasts fire every ``publish_gen`` generations and
        supersede that generation's incremental cell updates.
        """
        running = False
        while True:
            batch = self._drain(commands, block=not running)
            shutdown = False
            for command in batch:
                if command is None:
                    shutdown = True
                    break
                running = self._dispatch(command, running, emit)
            if shutdown:
                return
            if not running:
                continue
            improved = self.step_generation()
            if self.generation % self.cfg.publish_gen == 0:
                emit(self.broadcast_and_reseed())
            elif improved:
                emit(CellUpdates(self.generation, self.archive.descriptors, improved))

    @staticmethod
    def _drain(commands: "queue.Queue[Optional[EngineCommand]]",
               block: bool) -> list[Optional[EngineCommand]]:
        batch: list[Optional[EngineCommand]] = []
        if block:
            batch.append(commands.get())
        while True:
            try:
                batch.append(commands.get_nowait())
            except queue.Empty:
                return batch

    def _dispatch(self, command: EngineCommand, running: bool,
                  emit: Callable[[EngineEvent], None]) -> bool:
        try:
            if isinstance(command, Start):
                return True
            if isinstance(command, Stop):
                return False
            if isinstance(command, UpdateTarget):
                self.update_target(command.room)
            elif isinstance(command, SetDimensions):
                self.apply_dimension_change(command.descriptors)
            elif isinstance(command, RequestSnapshot):
                emit(self.snapshot())
            else:
                raise PreconditionError(f"unknown command {type(command).__name__}")
        except EddError as err:
            emit(CommandRejected(self.generation, str(err)))
        return running
