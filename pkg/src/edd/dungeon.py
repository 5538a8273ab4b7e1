"""Dungeon graph: rooms joined by door-to-door connections.

A dungeon is an immutable value holding rooms by id, a list of bidirectional
connections, and an optional initial room that anchors reachability. Each
connection pairs one passable border tile per room; making the connection
turns both tiles into doors, removing it reverts them to floor. Rooms enter
the dungeon without doors, so every door tile always belongs to exactly one
connection. Mutating operations return new dungeons.

Manifest format (one declaration per line, '#' starts a comment):

    room <id> <file>                            room text file, relative path
    connect <idA> <rowA> <colA> <idB> <rowB> <colB>
    initial <id>

Rooms must be declared before connections that use them. Room files store
the rooms in their connected state, so their door tiles must line up with
the connect declarations.
"""
from __future__ import annotations

import heapq
import re
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Union

from .errors import (
    BoundsError,
    InvalidEndpointError,
    NoPathError,
    NotFoundError,
    OccupiedEndpointError,
    ParseError,
    PreconditionError,
    SelfLoopError,
    ValidationError,
)
from .room import Position, Room, TileKind, parse_room, serialize_room, with_door, without_door

# Cost of stepping onto an enemy tile under LessDanger. One enemy outweighs
# any same-dungeon detour: the largest room has 400 tiles, so a pathological
# detour never costs more than one avoided enemy at 10x that scale.
ENEMY_PENALTY = 10

_SAFE_ID = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*")


class PathHeuristic(Enum):
    FASTEST = "fastest"
    REWARDING = "rewarding"
    LESS_DANGER = "less-danger"
    MORE_DANGER = "more-danger"


@dataclass(frozen=True)
class Connection:
    """One bidirectional link between border tiles of two distinct rooms."""

    room_a: str
    tile_a: Position
    room_b: str
    tile_b: Position

    def touches(self, room_id: str) -> bool:
        return room_id == self.room_a or room_id == self.room_b

    def holds(self, room_id: str, tile: Position) -> bool:
        return (room_id, tile) in ((self.room_a, self.tile_a), (self.room_b, self.tile_b))

    def other_end(self, room_id: str, tile: Position) -> tuple[str, Position]:
        if (room_id, tile) == (self.room_a, self.tile_a):
            return (self.room_b, self.tile_b)
        return (self.room_a, self.tile_a)


@dataclass(frozen=True)
class Dungeon:
    """Immutable room graph. The default value is the empty dungeon."""

    rooms: dict[str, Room] = field(default_factory=dict)
    connections: tuple[Connection, ...] = ()
    initial_room: Optional[str] = None

    def room(self, room_id: str) -> Room:
        try:
            return self.rooms[room_id]
        except KeyError:
            raise NotFoundError(f"no room {room_id!r} in the dungeon") from None

    def connection_at(self, room_id: str, tile: Position) -> Optional[Connection]:
        for conn in self.connections:
            if conn.holds(room_id, tile):
                return conn
        return None


@dataclass(frozen=True)
class FeasibilityReport:
    """Reachability audit anchored at the initial room.

    A room id appears in ``unreachable_rooms`` when it has passable tiles
    and none of them can be reached; rooms that are all walls are vacuously
    fine. ``unreachable_tiles`` lists every unreachable passable tile, keyed
    by room id, in row-major order.
    """

    feasible: bool
    unreachable_rooms: tuple[str, ...]
    unreachable_tiles: dict[str, tuple[Position, ...]]


# -- structural edits --------------------------------------------------------


def add_room(dungeon: Dungeon, room: Room) -> Dungeon:
    """Add a disconnected room. Door tiles only ever come from connections."""
    if room.id in dungeon.rooms:
        raise PreconditionError(f"room id {room.id!r} already present")
    if room.doors:
        raise PreconditionError(f"room {room.id!r} has door tiles; connect rooms instead")
    rooms = dict(dungeon.rooms)
    rooms[room.id] = room
    return replace(dungeon, rooms=rooms)


def remove_room(dungeon: Dungeon, room_id: str) -> Dungeon:
    """Drop a room, its connections, and the doors those connections made."""
    if room_id not in dungeon.rooms:
        raise NotFoundError(f"no room {room_id!r} in the dungeon")
    rooms = dict(dungeon.rooms)
    del rooms[room_id]
    kept = []
    for conn in dungeon.connections:
        if not conn.touches(room_id):
            kept.append(conn)
            continue
        peer_id, peer_tile = conn.other_end(room_id, conn.tile_a if conn.room_a == room_id else conn.tile_b)
        rooms[peer_id] = without_door(rooms[peer_id], peer_tile)
    initial = None if dungeon.initial_room == room_id else dungeon.initial_room
    return Dungeon(rooms=rooms, connections=tuple(kept), initial_room=initial)


def update_room(dungeon: Dungeon, room: Room) -> Dungeon:
    """Swap in an edited copy of an existing room.

    The edit must keep every door where it is: doors belong to connections,
    which this operation does not touch.
    """
    current = dungeon.room(room.id)
    if current.doors != room.doors or (room.width, room.height) != (current.width, current.height):
        raise PreconditionError(f"edit to room {room.id!r} would move its doors")
    rooms = dict(dungeon.rooms)
    rooms[room.id] = room
    return replace(dungeon, rooms=rooms)


def _check_endpoint(room: Room, tile: Position) -> None:
    if not room.in_bounds(tile) or not room.is_border(tile):
        raise InvalidEndpointError(f"({tile[0]}, {tile[1]}) is not a border tile of room {room.id!r}")
    kind = room.tile(tile[0], tile[1])
    if kind == TileKind.DOOR:
        raise OccupiedEndpointError(f"({tile[0]}, {tile[1]}) in room {room.id!r} already holds a connection")
    if not kind.passable:
        raise InvalidEndpointError(f"({tile[0]}, {tile[1]}) in room {room.id!r} is not passable")


def connect_rooms(dungeon: Dungeon, room_a: str, tile_a: Position, room_b: str, tile_b: Position) -> Dungeon:
    """Join two rooms at free passable border tiles; both tiles become doors."""
    if room_a == room_b:
        raise SelfLoopError(f"cannot connect room {room_a!r} to itself")
    a, b = dungeon.room(room_a), dungeon.room(room_b)
    _check_endpoint(a, tile_a)
    _check_endpoint(b, tile_b)
    rooms = dict(dungeon.rooms)
    rooms[room_a] = with_door(a, tile_a)
    rooms[room_b] = with_door(b, tile_b)
    conn = Connection(room_a, Position(*tile_a), room_b, Position(*tile_b))
    return replace(dungeon, rooms=rooms, connections=dungeon.connections + (conn,))


def remove_connection(dungeon: Dungeon, room_id: str, tile: Position) -> Dungeon:
    """Remove the connection holding this endpoint; both doors revert to floor."""
    conn = dungeon.connection_at(room_id, Position(*tile))
    if conn is None:
        raise NotFoundError(f"no connection at ({tile[0]}, {tile[1]}) in room {room_id!r}")
    rooms = dict(dungeon.rooms)
    rooms[conn.room_a] = without_door(rooms[conn.room_a], conn.tile_a)
    rooms[conn.room_b] = without_door(rooms[conn.room_b], conn.tile_b)
    kept = tuple(c for c in dungeon.connections if c is not conn)
    return replace(dungeon, rooms=rooms, connections=kept)


def set_initial_room(dungeon: Dungeon, room_id: str) -> Dungeon:
    """Designate the dungeon entry; may be changed any number of times."""
    if room_id not in dungeon.rooms:
        raise NotFoundError(f"no room {room_id!r} in the dungeon")
    return replace(dungeon, initial_room=room_id)


# -- reachability ------------------------------------------------------------


def _door_links(dungeon: Dungeon) -> dict[tuple[str, int], tuple[str, int]]:
    """Map each door (room id, tile index) to the paired door it opens onto."""
    links: dict[tuple[str, int], tuple[str, int]] = {}
    for conn in dungeon.connections:
        a = (conn.room_a, dungeon.rooms[conn.room_a].index(conn.tile_a))
        b = (conn.room_b, dungeon.rooms[conn.room_b].index(conn.tile_b))
        links[a] = b
        links[b] = a
    return links


def check_dungeon_feasibility(dungeon: Dungeon) -> FeasibilityReport:
    """Breadth-first reachability from the initial room over passable tiles.

    The search starts on every passable tile of the initial room and crosses
    connections between paired door tiles. Every passable tile it cannot
    reach is reported.
    """
    if dungeon.initial_room is None:
        raise PreconditionError("cannot check feasibility without an initial room")
    links = _door_links(dungeon)
    passable = {rid: room.passable_mask() for rid, room in dungeon.rooms.items()}
    seen = {rid: bytearray(len(room.tiles)) for rid, room in dungeon.rooms.items()}
    queue: deque[tuple[str, int]] = deque()
    for i, ok in enumerate(passable[dungeon.initial_room]):
        if ok:
            seen[dungeon.initial_room][i] = 1
            queue.append((dungeon.initial_room, i))
    while queue:
        rid, i = queue.popleft()
        room = dungeon.rooms[rid]
        w = room.width
        r, c = divmod(i, w)
        for j in (i - w if r > 0 else -1,
                  i + w if r < room.height - 1 else -1,
                  i - 1 if c > 0 else -1,
                  i + 1 if c < w - 1 else -1):
            if j >= 0 and passable[rid][j] and not seen[rid][j]:
                seen[rid][j] = 1
                queue.append((rid, j))
        peer = links.get((rid, i))
        if peer is not None and not seen[peer[0]][peer[1]]:
            seen[peer[0]][peer[1]] = 1
            queue.append(peer)
    unreachable_rooms = []
    unreachable_tiles: dict[str, tuple[Position, ...]] = {}
    for rid, room in dungeon.rooms.items():
        mask = passable[rid]
        missed = [Position(*divmod(i, room.width))
                  for i in range(len(mask)) if mask[i] and not seen[rid][i]]
        if missed:
            unreachable_tiles[rid] = tuple(missed)
            if not any(seen[rid]):
                unreachable_rooms.append(rid)
    return FeasibilityReport(
        feasible=not unreachable_tiles,
        unreachable_rooms=tuple(unreachable_rooms),
        unreachable_tiles=unreachable_tiles,
    )


# -- pathfinding -------------------------------------------------------------

Waypoint = tuple[str, Position]


def _step_cost(heuristic: PathHeuristic, kind: int) -> tuple[int, int]:
    # lexicographic (primary, secondary) cost of entering a tile
    if heuristic is PathHeuristic.LESS_DANGER:
        return (1 + ENEMY_PENALTY * (kind == TileKind.ENEMY), 0)
    if heuristic is PathHeuristic.REWARDING:
        return (1, -(kind == TileKind.TREASURE))
    if heuristic is PathHeuristic.MORE_DANGER:
        return (1, -(kind == TileKind.ENEMY))
    return (1, 0)


def _check_waypoint(dungeon: Dungeon, point: Waypoint, label: str) -> tuple[str, int]:
    rid, pos = point
    room = dungeon.room(rid)
    if not room.in_bounds(pos):
        raise BoundsError(f"{label} ({pos[0]}, {pos[1]}) outside {room.width}x{room.height} room {rid!r}")
    i = room.index(pos)
    if room.tiles[i] == TileKind.WALL:
        raise PreconditionError(f"{label} ({pos[0]}, {pos[1]}) in room {rid!r} is not passable")
    return rid, i


def find_path(dungeon: Dungeon, start: Waypoint, goal: Waypoint,
              heuristic: PathHeuristic = PathHeuristic.FASTEST) -> list[Waypoint]:
    """Cheapest orthogonal-step route between two passable tiles.

    Step cost is 1; crossing a connection (door tile to paired door tile)
    is also one step. Fastest minimizes steps. Rewarding and MoreDanger
    first minimize steps, then maximize treasure or enemy tiles entered.
    LessDanger adds ``ENEMY_PENALTY`` per enemy tile entered, so a detour
    always beats a fight. Equal-cost frontier ties settle in lowest
    (row, col, room id) order, which pins down one reproducible path.
    """
    start_key = _check_waypoint(dungeon, start, "start")
    goal_key = _check_waypoint(dungeon, goal, "goal")
    if start_key == goal_key:
        return [(start_key[0], Position(*start[1]))]
    links = _door_links(dungeon)
    dist: dict[tuple[str, int], tuple[int, int]] = {start_key: (0, 0)}
    prev: dict[tuple[str, int], tuple[str, int]] = {}
    srow, scol = divmod(start_key[1], dungeon.rooms[start_key[0]].width)
    heap = [(0, 0, srow, scol, start_key[0], start_key[1])]
    while heap:
        c0, c1, r, c, rid, i = heapq.heappop(heap)
        key = (rid, i)
        if dist.get(key) != (c0, c1):
            continue
        if key == goal_key:
            break
        room = dungeon.rooms[rid]
        w = room.width
        steps: list[tuple[str, int]] = []
        if r > 0:
            steps.append((rid, i - w))
        if r < room.height - 1:
            steps.append((rid, i + w))
        if c > 0:
            steps.append((rid, i - 1))
        if c < w - 1:
            steps.append((rid, i + 1))
        if room.tiles[i] == TileKind.DOOR and key in links:
            steps.append(links[key])
        for nkey in steps:
            nrid, nj = nkey
            kind = dungeon.rooms[nrid].tiles[nj]
            if kind == TileKind.WALL:
                continue
            d0, d1 = _step_cost(heuristic, kind)
            cost = (c0 + d0, c1 + d1)
            if nkey not in dist or cost < dist[nkey]:
                dist[nkey] = cost
                prev[nkey] = key
                nr, nc = divmod(nj, dungeon.rooms[nrid].width)
                heapq.heappush(heap, (cost[0], cost[1], nr, nc, nrid, nj))
    if goal_key not in dist:
        raise NoPathError(f"no route from {start[0]!r} ({start[1][0]}, {start[1][1]}) "
                          f"to {goal[0]!r} ({goal[1][0]}, {goal[1][1]})")
    path = []
    key: Optional[tuple[str, int]] = goal_key
    while key is not None:
        rid, i = key
        path.append((rid, Position(*divmod(i, dungeon.rooms[rid].width))))
        key = prev.get(key)
    path.reverse()
    return path


# -- manifest I/O ------------------------------------------------------------


def _render_manifest(dungeon: Dungeon, room_files: Mapping[str, str]) -> str:
    lines = ["# dungeon manifest"]
    for rid in dungeon.rooms:
        lines.append(f"room {rid} {room_files[rid]}")
    for conn in dungeon.connections:
        lines.append(f"connect {conn.room_a} {conn.tile_a.row} {conn.tile_a.col} "
                     f"{conn.room_b} {conn.tile_b.row} {conn.tile_b.col}")
    if dungeon.initial_room is not None:
        lines.append(f"initial {dungeon.initial_room}")
    return "\n".join(lines) + "\n"


def save_dungeon(dungeon: Dungeon, manifest_path: Union[str, Path]) -> None:
    """Write the manifest plus one ``<id>.room`` file per room beside it."""
    path = Path(manifest_path)
    room_files = {}
    for rid, room in dungeon.rooms.items():
        if not _SAFE_ID.fullmatch(rid):
            raise ValidationError(f"room id {rid!r} is not filename-safe")
        room_files[rid] = f"{rid}.room"
        (path.parent / room_files[rid]).write_text(serialize_room(room))
    path.write_text(_render_manifest(dungeon, room_files))


def _manifest_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"non-numeric {what} {token!r}", lineno) from None


def load_dungeon(manifest_path: Union[str, Path]) -> Dungeon:
    """Read a manifest and its room files back into a dungeon."""
    path = Path(manifest_path)
    rooms: dict[str, Room] = {}
    room_line: dict[str, int] = {}
    connections: list[Connection] = []
    claimed: set[tuple[str, Position]] = set()
    initial: Optional[str] = None
    for lineno, raw in enumerate(path.read_text().split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "room":
            if len(parts) != 3:
                raise ParseError("expected 'room <id> <file>'", lineno)
            rid = parts[1]
            if rid in rooms:
                raise ParseError(f"duplicate room id {rid!r}", lineno)
            rooms[rid] = parse_room((path.parent / parts[2]).read_text(), id=rid)
            room_line[rid] = lineno
        elif parts[0] == "connect":
            if len(parts) != 7:
                raise ParseError("expected 'connect <idA> <rowA> <colA> <idB> <rowB> <colB>'", lineno)
            rid_a, rid_b = parts[1], parts[4]
            tile_a = Position(_manifest_int(parts[2], "row", lineno), _manifest_int(parts[3], "column", lineno))
            tile_b = Position(_manifest_int(parts[5], "row", lineno), _manifest_int(parts[6], "column", lineno))
            if rid_a == rid_b:
                raise ParseError(f"connection joins room {rid_a!r} to itself", lineno)
            for rid, tile in ((rid_a, tile_a), (rid_b, tile_b)):
                if rid not in rooms:
                    raise ParseError(f"room {rid!r} not declared before use", lineno)
                room = rooms[rid]
                if not room.in_bounds(tile) or room.tile(tile.row, tile.col) != TileKind.DOOR:
                    raise ParseError(f"no door at ({tile.row}, {tile.col}) in room {rid!r}", lineno)
                if (rid, tile) in claimed:
                    raise ParseError(f"door at ({tile.row}, {tile.col}) in room {rid!r} "
                                     "already holds a connection", lineno)
                claimed.add((rid, tile))
            connections.append(Connection(rid_a, tile_a, rid_b, tile_b))
        elif parts[0] == "initial":
            if len(parts) != 2:
                raise ParseError("expected 'initial <id>'", lineno)
            if parts[1] not in rooms:
                raise ParseError(f"room {parts[1]!r} not declared before use", lineno)
            initial = parts[1]
        else:
            raise ParseError(f"unknown declaration {parts[0]!r}", lineno)
    for rid, room in rooms.items():
        for pos in room.doors:
            if (rid, pos) not in claimed:
                raise ParseError(f"door at ({pos.row}, {pos.col}) in room {rid!r} has no connection",
                                 room_line[rid])
    return Dungeon(rooms=rooms, connections=tuple(connections), initial_room=initial)
