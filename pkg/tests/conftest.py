import random
import sys

import hypothesis.strategies as st
import pytest

from edd.room import MAX_SIDE, MIN_SIDE, Position, Room, TileKind

TILE_BY_CHAR = {"f": TileKind.FLOOR, "w": TileKind.WALL, "e": TileKind.ENEMY,
                "t": TileKind.TREASURE, "d": TileKind.DOOR}


def room_from_rows(rows, locks=(), id=None):
    """Build a room from ascii art rows (alphabet f/w/e/t/d, uppercase=locked)."""
    height = len(rows)
    width = len(rows[0])
    tiles = bytearray(width * height)
    lock = bytearray(width * height)
    for r, row in enumerate(rows):
        assert len(row) == width, "ragged fixture"
        for c, ch in enumerate(row):
            tiles[r * width + c] = TILE_BY_CHAR[ch.lower()]
            if ch.isupper() and ch != "D":
                lock[r * width + c] = 1
    for pos in locks:
        lock[pos[0] * width + pos[1]] = 1
    return Room(width, height, bytes(tiles), bytes(lock), id=id or "fixture")


def border_positions(width, height):
    out = []
    for c in range(width):
        out.append(Position(0, c))
        out.append(Position(height - 1, c))
    for r in range(1, height - 1):
        out.append(Position(r, 0))
        out.append(Position(r, width - 1))
    return out


def random_room(rng: random.Random, min_side=MIN_SIDE, max_side=MAX_SIDE,
                max_doors=4, wall_weight=3, lock_chance=0.0) -> Room:
    """Seeded random room: weighted tile mix, doors on the border only."""
    w = rng.randint(min_side, max_side)
    h = rng.randint(min_side, max_side)
    weights = [6, wall_weight, 1, 1]  # floor, wall, enemy, treasure
    kinds = rng.choices([0, 1, 2, 3], weights=weights, k=w * h)
    tiles = bytearray(kinds)
    for pos in rng.sample(border_positions(w, h), rng.randint(0, max_doors)):
        tiles[pos.row * w + pos.col] = TileKind.DOOR
    locks = bytearray(w * h)
    if lock_chance:
        for i in range(w * h):
            if tiles[i] != TileKind.DOOR and rng.random() < lock_chance:
                locks[i] = 1
    return Room(w, h, bytes(tiles), bytes(locks))


@st.composite
def room_strategy(draw, min_side=MIN_SIDE, max_side=8, lockable=True):
    w = draw(st.integers(min_side, max_side))
    h = draw(st.integers(min_side, max_side))
    n = w * h
    raw = draw(st.binary(min_size=n, max_size=n))
    tiles = bytearray(b % 8 for b in raw)  # 0-4 floor-biased
    for i in range(n):
        if tiles[i] > 3:
            tiles[i] = 0
    border = border_positions(w, h)
    doors = draw(st.lists(st.sampled_from(border), unique=True, max_size=4))
    for pos in doors:
        tiles[pos.row * w + pos.col] = TileKind.DOOR
    locks = bytearray(n)
    if lockable:
        lock_raw = draw(st.binary(min_size=n, max_size=n))
        for i in range(n):
            if lock_raw[i] < 32 and tiles[i] != TileKind.DOOR:
                locks[i] = 1
    return Room(w, h, bytes(tiles), bytes(locks))


@pytest.fixture
def rng():
    return random.Random(0xED0)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, when that suite ran."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in results.items():
        terminalreporter.write_line(f"{name}: {'PASS' if passed else 'FAIL'}")
