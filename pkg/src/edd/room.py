"""Tile-grid room model: the design canvas and the evolution genotype.

A room is an immutable rectangular grid of tiles plus a lock mask the
designer uses to pin tiles, and door tiles along its border. Every editing
operation returns a new room; rooms are safe to share across threads.

Text format (one room per file): first line ``"<width> <height>"``, then
``height`` lines of ``width`` characters. Alphabet: f=floor, w=wall,
e=enemy, t=treasure, d=door; an uppercase letter is the same tile, locked
(doors are never locked, but 'D' is accepted on input and read as a plain
door). Serialized text is newline-terminated and 7-bit safe.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import BoundsError, InvalidBrushError, ParseError

MIN_SIDE = 3
MAX_SIDE = 20


class TileKind(IntEnum):
    FLOOR = 0
    WALL = 1
    ENEMY = 2
    TREASURE = 3
    DOOR = 4

    @property
    def passable(self) -> bool:
        return self is not TileKind.WALL


class Position(NamedTuple):
    row: int
    col: int


_TILE_CHARS = "fwetd"
_CHAR_TO_TILE = {c: TileKind(i) for i, c in enumerate(_TILE_CHARS)}

# translate() table mapping tile codes to \x00/\x01 passability flags
_PASSABLE_TABLE = bytes(
    0 if code == TileKind.WALL else 1 if code < len(_TILE_CHARS) else 0
    for code in range(256)
)

_room_counter = itertools.count(1)


def _fresh_id() -> str:
    return f"room-{next(_room_counter)}"


@dataclass(frozen=True)
class Room:
    """Immutable room. Equality ignores the id (it compares the design)."""

    width: int
    height: int
    tiles: bytes  # row-major TileKind codes, length width*height
    locks: bytes  # row-major 0/1 mask, same length
    id: str = field(default_factory=_fresh_id, compare=False)

    def __post_init__(self):
        if not MIN_SIDE <= self.width <= MAX_SIDE:
            raise BoundsError(f"width {self.width} outside [{MIN_SIDE}, {MAX_SIDE}]")
        if not MIN_SIDE <= self.height <= MAX_SIDE:
            raise BoundsError(f"height {self.height} outside [{MIN_SIDE}, {MAX_SIDE}]")
        n = self.width * self.height
        if len(self.tiles) != n:
            raise BoundsError(f"grid has {len(self.tiles)} tiles, expected {n}")
        if len(self.locks) != n:
            raise BoundsError(f"lock mask has {len(self.locks)} entries, expected {n}")
        i = self.tiles.find(TileKind.DOOR)
        while i >= 0:
            r, c = divmod(i, self.width)
            if not (r == 0 or c == 0 or r == self.height - 1 or c == self.width - 1):
                raise BoundsError(f"door at ({r}, {c}) is not on the border")
            if self.locks[i]:
                raise BoundsError(f"door at ({r}, {c}) must not be locked")
            i = self.tiles.find(TileKind.DOOR, i + 1)

    # -- accessors ---------------------------------------------------------

    def index(self, pos: Position) -> int:
        return pos[0] * self.width + pos[1]

    def in_bounds(self, pos: Position) -> bool:
        return 0 <= pos[0] < self.height and 0 <= pos[1] < self.width

    def tile(self, row: int, col: int) -> TileKind:
        return TileKind(self.tiles[row * self.width + col])

    def locked(self, row: int, col: int) -> bool:
        return bool(self.locks[row * self.width + col])

    def is_border(self, pos: Position) -> bool:
        r, c = pos
        return r == 0 or c == 0 or r == self.height - 1 or c == self.width - 1

    @property
    def doors(self) -> tuple[Position, ...]:
        out = []
        i = self.tiles.find(TileKind.DOOR)
        while i >= 0:
            out.append(Position(*divmod(i, self.width)))
            i = self.tiles.find(TileKind.DOOR, i + 1)
        return tuple(out)

    def passable_mask(self) -> bytes:
        """Per-tile 0/1 passability flags (walls are the only blockers)."""
        return self.tiles.translate(_PASSABLE_TABLE)

    def count(self, kind: TileKind) -> int:
        return self.tiles.count(kind)

    def genotype_key(self) -> tuple[int, int, bytes]:
        """Identity used for duplicate collapse; locks are designer state."""
        return (self.width, self.height, self.tiles)

    def positions(self) -> Iterable[Position]:
        for r in range(self.height):
            for c in range(self.width):
                yield Position(r, c)


def create_room(width: int, height: int, id: Optional[str] = None) -> Room:
    """A new all-floor room with no doors and no locks."""
    if not MIN_SIDE <= width <= MAX_SIDE:
        raise BoundsError(f"width {width} outside [{MIN_SIDE}, {MAX_SIDE}]")
    if not MIN_SIDE <= height <= MAX_SIDE:
        raise BoundsError(f"height {height} outside [{MIN_SIDE}, {MAX_SIDE}]")
    n = width * height
    return Room(width, height, bytes(n), bytes(n), id=id or _fresh_id())


def _check_cells(room: Room, cells: Iterable[Position]) -> list[Position]:
    checked = []
    for pos in cells:
        if not room.in_bounds(pos):
            raise BoundsError(f"position ({pos[0]}, {pos[1]}) outside {room.width}x{room.height} room")
        checked.append(pos)
    return checked


def paint_tiles(room: Room, cells: Sequence[Position], kind: TileKind, lock: bool = False) -> Room:
    """Brush-paint ``cells`` to ``kind``, optionally locking them.

    Door tiles and already-locked tiles are left untouched. Doors cannot be
    painted; they only ever come from dungeon connections.
    """
    if kind == TileKind.DOOR:
        raise InvalidBrushError("doors cannot be painted with a brush")
    cells = _check_cells(room, cells)
    tiles = bytearray(room.tiles)
    locks = bytearray(room.locks)
    for pos in cells:
        i = room.index(pos)
        if tiles[i] == TileKind.DOOR or locks[i]:
            continue
        tiles[i] = kind
        if lock:
            locks[i] = 1
    return replace(room, tiles=bytes(tiles), locks=bytes(locks))


def cross_positions(room: Room, center: Position) -> list[Position]:
    """The five-tile cross brush around ``center``, clipped to the room.

    Cells falling outside the grid are silently dropped, so painting at a
    corner simply paints fewer tiles.
    """
    if not room.in_bounds(center):
        raise BoundsError(f"position ({center[0]}, {center[1]}) outside {room.width}x{room.height} room")
    r, c = center
    cand = [Position(r, c), Position(r - 1, c), Position(r + 1, c), Position(r, c - 1), Position(r, c + 1)]
    return [p for p in cand if room.in_bounds(p)]


def bucket_paint(room: Room, seed: Position, kind: TileKind) -> Room:
    """Repaint the orthogonally-connected region sharing the seed's kind.

    The region is delimited by tile kind only; locked tiles inside it still
    conduct the fill but keep their own kind, as do door tiles.
    """
    if kind == TileKind.DOOR:
        raise InvalidBrushError("doors cannot be painted with a brush")
    if not room.in_bounds(seed):
        raise BoundsError(f"position ({seed[0]}, {seed[1]}) outside {room.width}x{room.height} room")
    w, h = room.width, room.height
    original = room.tiles[room.index(seed)]
    tiles = bytearray(room.tiles)
    seen = bytearray(len(tiles))
    queue = deque([room.index(seed)])
    seen[queue[0]] = 1
    door = TileKind.DOOR
    while queue:
        i = queue.popleft()
        if tiles[i] != door and not room.locks[i]:
            tiles[i] = kind
        r, c = divmod(i, w)
        for j in (i - w if r > 0 else -1,
                  i + w if r < h - 1 else -1,
                  i - 1 if c > 0 else -1,
                  i + 1 if c < w - 1 else -1):
            if j >= 0 and not seen[j] and room.tiles[j] == original:
                seen[j] = 1
                queue.append(j)
    return replace(room, tiles=bytes(tiles))


def with_door(room: Room, pos: Position) -> Room:
    """Mark a border tile as a door (connection plumbing, not a brush).

    Any lock on the tile is cleared; doors are structurally fixed and never
    user-locked.
    """
    if not room.in_bounds(pos):
        raise BoundsError(f"position ({pos[0]}, {pos[1]}) outside {room.width}x{room.height} room")
    if not room.is_border(pos):
        raise BoundsError(f"door at ({pos[0]}, {pos[1]}) would not be on the border")
    i = room.index(pos)
    tiles = bytearray(room.tiles)
    locks = bytearray(room.locks)
    tiles[i] = TileKind.DOOR
    locks[i] = 0
    return replace(room, tiles=bytes(tiles), locks=bytes(locks))


def without_door(room: Room, pos: Position) -> Room:
    """Revert a door tile to floor (used when a connection is removed)."""
    i = room.index(pos)
    if room.tiles[i] != TileKind.DOOR:
        raise BoundsError(f"no door at ({pos[0]}, {pos[1]})")
    tiles = bytearray(room.tiles)
    tiles[i] = TileKind.FLOOR
    return replace(room, tiles=bytes(tiles))


def with_locks(room: Room, locked: Iterable[Position]) -> Room:
    """Replace the lock mask. Door positions are ignored (never lockable)."""
    mask = bytearray(len(room.tiles))
    for pos in _check_cells(room, locked):
        i = room.index(pos)
        if room.tiles[i] != TileKind.DOOR:
            mask[i] = 1
    return replace(room, locks=bytes(mask))


def serialize_room(room: Room) -> str:
    """Room text; uppercase letters mark locked tiles."""
    out = [f"{room.width} {room.height}"]
    for r in range(room.height):
        row = []
        for c in range(r * room.width, (r + 1) * room.width):
            ch = _TILE_CHARS[room.tiles[c]]
            row.append(ch.upper() if room.locks[c] else ch)
        out.append("".join(row))
    return "\n".join(out) + "\n"


def parse_room(text: str, id: Optional[str] = None) -> Room:
    """Parse room text. Errors carry the offending 1-based line and column."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input", 1)
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"expected '<width> <height>', got {lines[0]!r}", 1)
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"non-numeric size in {lines[0]!r}", 1) from None
    if not MIN_SIDE <= width <= MAX_SIDE:
        raise ParseError(f"width {width} outside [{MIN_SIDE}, {MAX_SIDE}]", 1)
    if not MIN_SIDE <= height <= MAX_SIDE:
        raise ParseError(f"height {height} outside [{MIN_SIDE}, {MAX_SIDE}]", 1)
    body = lines[1:]
    if len(body) != height:
        raise ParseError(f"expected {height} rows, got {len(body)}", len(lines) + 1)
    tiles = bytearray(width * height)
    locks = bytearray(width * height)
    for r, line in enumerate(body):
        lineno = r + 2
        if len(line) != width:
            raise ParseError(f"expected {width} tiles, got {len(line)}", lineno, len(line) + 1)
        for c, ch in enumerate(line):
            kind = _CHAR_TO_TILE.get(ch.lower())
            if kind is None:
                raise ParseError(f"unknown tile {ch!r}", lineno, c + 1)
            i = r * width + c
            tiles[i] = kind
            if kind == TileKind.DOOR:
                if not (r == 0 or c == 0 or r == height - 1 or c == width - 1):
                    raise ParseError("door away from the border", lineno, c + 1)
            elif ch.isupper():
                locks[i] = 1
    return Room(width, height, bytes(tiles), bytes(locks), id=id or _fresh_id())
