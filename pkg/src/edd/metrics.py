"""Behavioral dimensions, room feasibility, and fitness.

Five dimensions place a room in behavior space, each in [0,1]:
symmetry, similarity to a target room, meso pattern density, spatial
pattern density, and linearity of the routes between doors. Feasibility
requires mutually reachable doors, reachable enemies and treasures, and
(by default) a non-empty inventory. Feasible rooms are scored on how
close enemy, treasure, and corridor fractions sit to target fractions
plus meso coverage; infeasible rooms are scored on distance to
feasibility, so repair pressure points the right way.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

from .errors import BoundsError, ContractError, PreconditionError
from .patterns import PatternGraph, PatternKind, analyze_room, count_door_paths
from .room import Room, TileKind

K = 4.0  # spatial pattern normalizer, per largest room side


class DimensionKind(Enum):
    SYMMETRY = "symmetry"
    SIMILARITY = "similarity"
    MESO_PATTERNS = "meso-patterns"
    SPATIAL_PATTERNS = "spatial-patterns"
    LINEARITY = "linearity"


@dataclass(frozen=True)
class DimensionDescriptor:
    kind: DimensionKind
    granularity: int = 5

    def __post_init__(self) -> None:
        if not 2 <= self.granularity <= 20:
            raise BoundsError(f"granularity {self.granularity} outside [2, 20]")


@dataclass(frozen=True)
class RoomMetrics:
    meso_count: int
    spatial_count: int
    door_path_count: int
    door_neighbor_count: int
    max_chambers: int
    k: float = K


@dataclass(frozen=True)
class FitnessConfig:
    target_enemy_frac: float = 0.10
    target_treasure_frac: float = 0.08
    target_corridor_frac: float = 0.40
    require_inventory: bool = True

    def __post_init__(self) -> None:
        for name in ("target_enemy_frac", "target_treasure_frac", "target_corridor_frac"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise BoundsError(f"{name} {value} outside (0, 1)")


DEFAULT_FITNESS = FitnessConfig()


def _equal_tiles(a: bytes, b: bytes) -> int:
    """Positions where both byte strings hold the same value."""
    n = len(a)
    diff = int.from_bytes(a, "big") ^ int.from_bytes(b, "big")
    return diff.to_bytes(n, "big").count(0)


def _matching_non_floor(a: bytes, b: bytes) -> int:
    """Positions that are equal and not floor on both sides."""
    n = len(a)
    ia = int.from_bytes(a, "big")
    ib = int.from_bytes(b, "big")
    equal = (ia ^ ib).to_bytes(n, "big").count(0)
    both_floor = (ia | ib).to_bytes(n, "big").count(0)
    return equal - both_floor


@lru_cache(maxsize=64)
def _diagonal_tables(side: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    main = tuple(c * side + r for r in range(side) for c in range(side))
    anti = tuple(
        (side - 1 - c) * side + (side - 1 - r)
        for r in range(side)
        for c in range(side)
    )
    return main, anti


def symmetry(room: Room) -> float:
    """Best reflective match of non-floor tiles, over the X and Y axes
    plus both diagonals when the room is square. 1.0 when nothing to mirror.
    """
    tiles = room.tiles
    non_floor = len(tiles) - tiles.count(TileKind.FLOOR)
    if non_floor == 0:
        return 1.0
    w, h = room.width, room.height
    rows = [tiles[r * w:(r + 1) * w] for r in range(h)]
    mirrors = [
        b"".join(row[::-1] for row in rows),
        b"".join(reversed(rows)),
    ]
    if w == h:
        main, anti = _diagonal_tables(w)
        mirrors.append(bytes(map(tiles.__getitem__, main)))
        mirrors.append(bytes(map(tiles.__getitem__, anti)))
    best = max(_matching_non_floor(tiles, m) for m in mirrors)
    return best / non_floor


def similarity(room: Room, target: Room) -> float:
    """Fraction of positions holding the same tile kind."""
    if (room.width, room.height) != (target.width, target.height):
        raise PreconditionError(
            f"cannot compare {room.width}x{room.height} room "
            f"with {target.width}x{target.height} target"
        )
    return _equal_tiles(room.tiles, target.tiles) / len(room.tiles)


def max_chambers(room: Room) -> int:
    return (room.width // 3) * (room.height // 3)


def door_neighbor_count(room: Room) -> int:
    total = 0
    for pos in room.doors:
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            r, c = pos.row + dr, pos.col + dc
            if 0 <= r < room.height and 0 <= c < room.width and room.tile(r, c).passable:
                total += 1
    return total


def compute_room_metrics(room: Room, graph: Optional[PatternGraph] = None) -> RoomMetrics:
    if graph is None:
        graph = analyze_room(room)
    return RoomMetrics(
        meso_count=len(graph.meso_patterns),
        spatial_count=len(graph.nodes),
        door_path_count=count_door_paths(graph),
        door_neighbor_count=door_neighbor_count(room),
        max_chambers=max_chambers(room),
    )


def meso_pattern_dimension(room: Room, graph: Optional[PatternGraph] = None) -> float:
    if graph is None:
        graph = analyze_room(room)
    return min(len(graph.meso_patterns) / max_chambers(room), 1.0)


def spatial_pattern_dimension(room: Room, graph: Optional[PatternGraph] = None) -> float:
    if graph is None:
        graph = analyze_room(room)
    return min(len(graph.nodes) / (max(room.width, room.height) * K), 1.0)


def linearity_dimension(room: Room, graph: Optional[PatternGraph] = None) -> float:
    """1 minus door routes over structural size; fewer routes read as linear."""
    if len(room.doors) < 2:
        return 1.0
    if graph is None:
        graph = analyze_room(room)
    paths = count_door_paths(graph)
    value = 1.0 - paths / (len(graph.nodes) + door_neighbor_count(room))
    return min(max(value, 0.0), 1.0)


# reachability runs on byte-granular bitboards: one byte per tile, moves
# are 8-bit shifts, so a whole BFS round is a handful of big-int operations
@lru_cache(maxsize=64)
def _board_masks(width: int, height: int) -> tuple[int, int, int, int]:
    n = width * height
    full = int.from_bytes(b"\x01" * n, "big")
    col0 = int.from_bytes(bytes(1 if i % width == 0 else 0 for i in range(n)), "big")
    last = int.from_bytes(bytes(1 if i % width == width - 1 else 0 for i in range(n)), "big")
    return full, full & ~col0, full & ~last


def _tile_bit(room: Room, index: int) -> int:
    return 1 << (8 * (len(room.tiles) - 1 - index))


_KIND_TABLES = {
    kind: bytes(1 if v == kind else 0 for v in range(256))
    for kind in (TileKind.ENEMY, TileKind.TREASURE)
}


def _kind_bits(room: Room, kind: TileKind) -> int:
    return int.from_bytes(room.tiles.translate(_KIND_TABLES[kind]), "big")


def _flood_bits(room: Room, seeds: int) -> int:
    """Fixpoint of 4-neighbor growth from the seeds over passable tiles."""
    passable = int.from_bytes(room.passable_mask(), "big")
    full, not_col0, not_last = _board_masks(room.width, room.height)
    row = 8 * room.width
    seen = seeds & passable
    while True:
        grown = (
            seen
            | ((seen & not_last) >> 8)
            | ((seen & not_col0) << 8)
            | (seen >> row)
            | ((seen << row) & full)
        ) & passable
        if grown == seen:
            return seen
        seen = grown


def room_feasible(room: Room, cfg: FitnessConfig = DEFAULT_FITNESS) -> tuple[bool, tuple[str, ...]]:
    """Doors mutually reachable, enemies and treasures reachable from a door,
    and at least one of each when the config demands an inventory.
    """
    violations: list[str] = []
    doors = room.doors
    w = room.width
    if not doors:
        violations.append("no-doors")
    else:
        door_bits = 0
        for p in doors:
            door_bits |= _tile_bit(room, p.row * w + p.col)
        seen = _flood_bits(room, _tile_bit(room, doors[0].row * w + doors[0].col))
        if door_bits & ~seen:
            violations.append("doors-disconnected")
            seen = _flood_bits(room, door_bits)
        if _kind_bits(room, TileKind.ENEMY) & ~seen:
            violations.append("unreachable-enemies")
        if _kind_bits(room, TileKind.TREASURE) & ~seen:
            violations.append("unreachable-treasures")
    if cfg.require_inventory:
        if room.count(TileKind.ENEMY) == 0:
            violations.append("no-enemies")
        if room.count(TileKind.TREASURE) == 0:
            violations.append("no-treasures")
    return not violations, tuple(violations)


def fitness_feasible(room: Room, cfg: FitnessConfig = DEFAULT_FITNESS,
                     graph: Optional[PatternGraph] = None) -> float:
    ok, violations = room_feasible(room, cfg)
    if not ok:
        raise ContractError(f"fitness requested for infeasible room: {', '.join(violations)}")
    return _fitness_feasible_unchecked(room, cfg, graph)


def _fitness_feasible_unchecked(room: Room, cfg: FitnessConfig,
                                graph: Optional[PatternGraph] = None) -> float:
    if graph is None:
        graph = analyze_room(room)
    passable = sum(room.passable_mask())
    enemy_frac = room.count(TileKind.ENEMY) / passable
    treasure_frac = room.count(TileKind.TREASURE) / passable
    te, tt, tc = cfg.target_enemy_frac, cfg.target_treasure_frac, cfg.target_corridor_frac
    f_inv = 1.0 - (
        abs(enemy_frac - te) / max(te, 1.0 - te)
        + abs(treasure_frac - tt) / max(tt, 1.0 - tt)
    ) / 2.0
    corridor_tiles = graph.tile_count(PatternKind.CORRIDOR) + graph.tile_count(PatternKind.CONNECTOR)
    corridor_frac = corridor_tiles / passable
    chamber_tiles = graph.tile_count(PatternKind.CHAMBER)
    if chamber_tiles:
        meso_tiles = sum(len(graph.nodes[m.node].tiles) for m in graph.meso_patterns)
        meso_coverage = meso_tiles / chamber_tiles
    else:
        meso_coverage = 1.0
    f_spatial = 0.5 * (1.0 - abs(corridor_frac - tc) / max(tc, 1.0 - tc)) + 0.5 * meso_coverage
    return 0.5 * f_inv + 0.5 * f_spatial


def fitness_infeasible(room: Room) -> float:
    """Distance to feasibility: reachable door pairs plus reachable inventory."""
    w = room.width
    doors = room.doors
    comps: list[int] = []
    comp_of: list[int] = []
    for p in doors:
        bit = _tile_bit(room, p.row * w + p.col)
        for k, comp in enumerate(comps):
            if bit & comp:
                comp_of.append(k)
                break
        else:
            comps.append(_flood_bits(room, bit))
            comp_of.append(len(comps) - 1)
    pairs = len(doors) * (len(doors) - 1) // 2
    if pairs:
        connected = sum(
            1
            for i in range(len(doors))
            for j in range(i + 1, len(doors))
            if comp_of[i] == comp_of[j]
        )
        door_term = connected / pairs
    else:
        door_term = 0.0
    items = room.count(TileKind.ENEMY) + room.count(TileKind.TREASURE)
    if items:
        reach = 0
        for comp in comps:
            reach |= comp
        item_bits = _kind_bits(room, TileKind.ENEMY) | _kind_bits(room, TileKind.TREASURE)
        reachable = (item_bits & reach).to_bytes(len(room.tiles), "big").count(1)
        item_term = reachable / items
    else:
        item_term = 0.0
    return 0.5 * door_term + 0.5 * item_term


@dataclass(frozen=True)
class RoomEvaluation:
    """Everything the archive needs about one room, minus target similarity."""

    feasible: bool
    violations: tuple[str, ...]
    fitness: float
    symmetry: float
    meso_patterns: float
    spatial_patterns: float
    linearity: float


def evaluate_room(room: Room, cfg: FitnessConfig = DEFAULT_FITNESS,
                  graph: Optional[PatternGraph] = None) -> RoomEvaluation:
    """One-pass evaluation sharing a single pattern analysis."""
    if graph is None:
        graph = analyze_room(room)
    ok, violations = room_feasible(room, cfg)
    fitness = _fitness_feasible_unchecked(room, cfg, graph) if ok else fitness_infeasible(room)
    return RoomEvaluation(
        feasible=ok,
        violations=violations,
        fitness=fitness,
        symmetry=symmetry(room),
        meso_patterns=meso_pattern_dimension(room, graph),
        spatial_patterns=spatial_pattern_dimension(room, graph),
        linearity=linearity_dimension(room, graph),
    )


def dimension_values(room: Room, dims: list[DimensionDescriptor],
                     target: Optional[Room] = None,
                     graph: Optional[PatternGraph] = None) -> tuple[float, ...]:
    """Selected dimensions only; linearity's path counting runs only if asked."""
    if not dims:
        raise PreconditionError("at least one dimension descriptor required")
    if graph is None:
        graph = analyze_room(room)
    values = []
    for dim in dims:
        if dim.kind is DimensionKind.SIMILARITY:
            if target is None:
                raise PreconditionError("similarity dimension requires a target room")
            values.append(similarity(room, target))
        elif dim.kind is DimensionKind.SYMMETRY:
            values.append(symmetry(room))
        elif dim.kind is DimensionKind.MESO_PATTERNS:
            values.append(meso_pattern_dimension(room, graph))
        elif dim.kind is DimensionKind.SPATIAL_PATTERNS:
            values.append(spatial_pattern_dimension(room, graph))
        else:
            values.append(linearity_dimension(room, graph))
    return tuple(values)
