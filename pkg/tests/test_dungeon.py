"""Dungeon graph tests.

Reachability is checked against an independent flood fill over the
flattened (room, row, col) tile graph. Path heuristics are checked against
exhaustive simple-path enumeration on dungeons small enough to enumerate.
"""
import random
from dataclasses import replace

import pytest

from edd.dungeon import (
    Connection,
    Dungeon,
    ENEMY_PENALTY,
    PathHeuristic,
    add_room,
    check_dungeon_feasibility,
    connect_rooms,
    find_path,
    load_dungeon,
    remove_connection,
    remove_room,
    save_dungeon,
    set_initial_room,
    update_room,
)
from edd.errors import (
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
from edd.room import Position, TileKind, create_room, paint_tiles, with_door

from conftest import random_room, room_from_rows


def build_dungeon(*rooms, connections=(), initial=None):
    d = Dungeon()
    for room in rooms:
        d = add_room(d, room)
    for a, ta, b, tb in connections:
        d = connect_rooms(d, a, Position(*ta), b, Position(*tb))
    if initial is not None:
        d = set_initial_room(d, initial)
    return d


def open_pair():
    """Two all-floor 3x3 rooms joined left-to-right, entry at r1."""
    return build_dungeon(
        create_room(3, 3, id="r1"),
        create_room(3, 3, id="r2"),
        connections=[("r1", (1, 2), "r2", (1, 0))],
        initial="r1",
    )


# -- oracles -----------------------------------------------------------------


def flood_reachable(dungeon):
    """Flood fill over explicit (room, row, col) nodes; returns (all, seen)."""
    nodes = set()
    for rid, room in dungeon.rooms.items():
        for r in range(room.height):
            for c in range(room.width):
                if room.tile(r, c) != TileKind.WALL:
                    nodes.add((rid, r, c))
    doors = {}
    for conn in dungeon.connections:
        a = (conn.room_a, conn.tile_a.row, conn.tile_a.col)
        b = (conn.room_b, conn.tile_b.row, conn.tile_b.col)
        doors[a] = b
        doors[b] = a
    frontier = [n for n in nodes if n[0] == dungeon.initial_room]
    seen = set(frontier)
    while frontier:
        rid, r, c = frontier.pop()
        for nb in ((rid, r - 1, c), (rid, r + 1, c), (rid, r, c - 1), (rid, r, c + 1)):
            if nb in nodes and nb not in seen:
                seen.add(nb)
                frontier.append(nb)
        link = doors.get((rid, r, c))
        if link is not None and link not in seen:
            seen.add(link)
            frontier.append(link)
    return nodes, seen


def step_neighbors(dungeon, node):
    rid, pos = node
    room = dungeon.rooms[rid]
    r, c = pos
    out = []
    for nb in (Position(r - 1, c), Position(r + 1, c), Position(r, c - 1), Position(r, c + 1)):
        if room.in_bounds(nb) and room.tile(*nb) != TileKind.WALL:
            out.append((rid, nb))
    conn = dungeon.connection_at(rid, pos)
    if conn is not None and room.tile(r, c) == TileKind.DOOR:
        peer_id, peer_tile = conn.other_end(rid, pos)
        out.append((peer_id, peer_tile))
    return out


def all_simple_paths(dungeon, start, goal, cap=300_000):
    """Every simple path between two waypoints, by recursive enumeration."""
    paths = []
    trail = [start]
    on_path = {start}

    def walk(node):
        if node == goal:
            paths.append(list(trail))
            return
        assert len(paths) < cap, "enumeration blew the cap; shrink the fixture"
        for nb in step_neighbors(dungeon, node):
            if nb not in on_path:
                on_path.add(nb)
                trail.append(nb)
                walk(nb)
                trail.pop()
                on_path.remove(nb)

    walk(start)
    return paths


def path_cost(dungeon, path, heuristic):
    """Lexicographic cost of a path: tiles entered, start tile free."""
    steps = len(path) - 1
    kinds = [dungeon.rooms[rid].tile(*pos) for rid, pos in path[1:]]
    enemies = sum(k == TileKind.ENEMY for k in kinds)
    treasures = sum(k == TileKind.TREASURE for k in kinds)
    if heuristic is PathHeuristic.REWARDING:
        return (steps, -treasures)
    if heuristic is PathHeuristic.LESS_DANGER:
        return (steps + ENEMY_PENALTY * enemies, 0)
    if heuristic is PathHeuristic.MORE_DANGER:
        return (steps, -enemies)
    return (steps, 0)


def assert_valid_path(dungeon, path, start, goal):
    assert path[0] == start and path[-1] == goal
    assert len(set(path)) == len(path), "path revisits a tile"
    for (rid1, p1), (rid2, p2) in zip(path, path[1:]):
        room = dungeon.rooms[rid2]
        assert room.tile(*p2) != TileKind.WALL
        if rid1 == rid2:
            assert abs(p1.row - p2.row) + abs(p1.col - p2.col) == 1
        else:
            conn = dungeon.connection_at(rid1, p1)
            assert conn is not None and conn.other_end(rid1, p1) == (rid2, p2)


# -- structural edits --------------------------------------------------------


class TestRoomManagement:
    def test_add_two_rooms(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(4, 4, id="r2"))
        assert set(d.rooms) == {"r1", "r2"}
        assert d.connections == ()
        assert d.initial_room is None

    def test_add_leaves_original_untouched(self):
        d = Dungeon()
        add_room(d, create_room(3, 3, id="r1"))
        assert d.rooms == {}

    def test_add_duplicate_id(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        with pytest.raises(PreconditionError):
            add_room(d, create_room(4, 4, id="r1"))

    def test_add_room_with_doors(self):
        room = with_door(create_room(3, 3, id="r1"), Position(0, 1))
        with pytest.raises(PreconditionError):
            add_room(Dungeon(), room)

    def test_remove_unknown(self):
        with pytest.raises(NotFoundError):
            remove_room(Dungeon(), "nope")

    def test_remove_reverts_peer_doors(self):
        d = build_dungeon(
            create_room(3, 3, id="hub"),
            create_room(3, 3, id="r2"),
            create_room(3, 3, id="r3"),
            connections=[("hub", (0, 1), "r2", (2, 1)), ("hub", (2, 1), "r3", (0, 1))],
        )
        d = remove_room(d, "hub")
        assert set(d.rooms) == {"r2", "r3"}
        assert d.connections == ()
        assert d.rooms["r2"].doors == ()
        assert d.rooms["r3"].doors == ()

    def test_remove_keeps_unrelated_connections(self):
        d = build_dungeon(
            create_room(3, 3, id="r1"),
            create_room(3, 3, id="r2"),
            create_room(3, 3, id="r3"),
            connections=[("r1", (1, 2), "r2", (1, 0)), ("r2", (1, 2), "r3", (1, 0))],
        )
        d = remove_room(d, "r3")
        assert len(d.connections) == 1
        assert d.rooms["r1"].doors == (Position(1, 2),)
        assert d.rooms["r2"].doors == (Position(1, 0),)

    def test_remove_clears_initial(self):
        d = build_dungeon(create_room(3, 3, id="r1"), initial="r1")
        assert remove_room(d, "r1").initial_room is None

    def test_update_room_swaps_design(self):
        d = open_pair()
        edited = paint_tiles(d.rooms["r1"], [Position(1, 1)], TileKind.TREASURE)
        d2 = update_room(d, edited)
        assert d2.rooms["r1"].tile(1, 1) == TileKind.TREASURE
        assert d.rooms["r1"].tile(1, 1) == TileKind.FLOOR

    def test_update_room_must_keep_doors(self):
        d = open_pair()
        moved = with_door(create_room(3, 3, id="r1"), Position(0, 1))
        with pytest.raises(PreconditionError):
            update_room(d, moved)

    def test_update_unknown_room(self):
        with pytest.raises(NotFoundError):
            update_room(Dungeon(), create_room(3, 3, id="ghost"))


class TestConnections:
    def test_connect_marks_both_doors(self):
        d = open_pair()
        assert d.rooms["r1"].tile(1, 2) == TileKind.DOOR
        assert d.rooms["r2"].tile(1, 0) == TileKind.DOOR
        assert d.connections == (Connection("r1", Position(1, 2), "r2", Position(1, 0)),)

    def test_self_loop(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        with pytest.raises(SelfLoopError):
            connect_rooms(d, "r1", Position(0, 1), "r1", Position(2, 1))

    def test_occupied_endpoint(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"),
                          create_room(3, 3, id="r3"))
        d = connect_rooms(d, "r1", Position(1, 2), "r2", Position(1, 0))
        with pytest.raises(OccupiedEndpointError):
            connect_rooms(d, "r1", Position(1, 2), "r3", Position(1, 0))

    def test_interior_endpoint(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"))
        with pytest.raises(InvalidEndpointError):
            connect_rooms(d, "r1", Position(1, 1), "r2", Position(1, 0))

    def test_wall_endpoint(self):
        walled = paint_tiles(create_room(3, 3, id="r1"), [Position(0, 1)], TileKind.WALL)
        d = build_dungeon(walled, create_room(3, 3, id="r2"))
        with pytest.raises(InvalidEndpointError):
            connect_rooms(d, "r1", Position(0, 1), "r2", Position(1, 0))

    def test_out_of_bounds_endpoint(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"))
        with pytest.raises(InvalidEndpointError):
            connect_rooms(d, "r1", Position(5, 5), "r2", Position(1, 0))

    def test_unknown_room(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        with pytest.raises(NotFoundError):
            connect_rooms(d, "r1", Position(0, 1), "ghost", Position(1, 0))

    def test_corner_endpoints_allowed(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"),
                          connections=[("r1", (0, 0), "r2", (2, 2))])
        assert d.rooms["r1"].tile(0, 0) == TileKind.DOOR

    def test_parallel_connections_between_same_rooms(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"),
                          connections=[("r1", (1, 2), "r2", (1, 0)), ("r1", (0, 2), "r2", (0, 0))])
        assert len(d.connections) == 2

    def test_connect_then_remove_restores_original(self):
        base = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"), initial="r1")
        connected = connect_rooms(base, "r1", Position(1, 2), "r2", Position(1, 0))
        restored = remove_connection(connected, "r2", Position(1, 0))
        assert restored == base

    def test_remove_connection_unknown_endpoint(self):
        d = open_pair()
        with pytest.raises(NotFoundError):
            remove_connection(d, "r1", Position(0, 0))


class TestInitialRoom:
    def test_last_designation_wins(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"))
        d = set_initial_room(set_initial_room(d, "r1"), "r2")
        assert d.initial_room == "r2"

    def test_set_on_empty_dungeon(self):
        with pytest.raises(NotFoundError):
            set_initial_room(Dungeon(), "r1")


# -- feasibility -------------------------------------------------------------


class TestFeasibility:
    def test_requires_initial_room(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        with pytest.raises(PreconditionError):
            check_dungeon_feasibility(d)

    def test_open_pair_feasible(self):
        report = check_dungeon_feasibility(open_pair())
        assert report.feasible
        assert report.unreachable_rooms == ()
        assert report.unreachable_tiles == {}

    def test_walled_pocket_listed(self):
        pocket = room_from_rows(["fffff",
                                 "fwwwf",
                                 "fwfwf",
                                 "fwwwf",
                                 "fffff"], id="r2")
        d = build_dungeon(create_room(3, 3, id="r1"), pocket,
                          connections=[("r1", (1, 2), "r2", (2, 0))], initial="r1")
        report = check_dungeon_feasibility(d)
        assert not report.feasible
        assert report.unreachable_tiles == {"r2": (Position(2, 2),)}
        assert report.unreachable_rooms == ()

    def test_disconnected_room_flagged(self):
        d = add_room(open_pair(), create_room(3, 3, id="island"))
        report = check_dungeon_feasibility(d)
        assert not report.feasible
        assert report.unreachable_rooms == ("island",)
        assert set(report.unreachable_tiles) == {"island"}
        assert len(report.unreachable_tiles["island"]) == 9

    def test_all_wall_room_is_vacuously_fine(self):
        solid = room_from_rows(["www", "www", "www"], id="solid")
        report = check_dungeon_feasibility(add_room(open_pair(), solid))
        assert report.feasible

    def test_pocket_inside_initial_room_counts_as_reachable(self):
        # the search seeds every passable tile of the entry room
        pocket = room_from_rows(["fffff",
                                 "fwwwf",
                                 "fwfwf",
                                 "fwwwf",
                                 "fffff"], id="r1")
        report = check_dungeon_feasibility(build_dungeon(pocket, initial="r1"))
        assert report.feasible

    def test_matches_flood_fill_oracle(self, rng):
        checked = 0
        for _ in range(120):
            d = random_dungeon(rng)
            report = check_dungeon_feasibility(d)
            nodes, seen = flood_reachable(d)
            missed = nodes - seen
            assert report.feasible == (not missed)
            got = {(rid, pos.row, pos.col)
                   for rid, tiles in report.unreachable_tiles.items() for pos in tiles}
            assert got == missed
            expect_rooms = {rid for rid, room in d.rooms.items()
                            if any(n[0] == rid for n in nodes)
                            and not any(n[0] == rid for n in seen)}
            assert set(report.unreachable_rooms) == expect_rooms
            checked += 1
        assert checked >= 100


def free_border_tiles(room):
    seen = set()
    out = []
    for pos in room.doors:
        seen.add(pos)
    for r in range(room.height):
        for c in range(room.width):
            pos = Position(r, c)
            if room.is_border(pos) and pos not in seen and room.tile(r, c).passable:
                out.append(pos)
    return out


def random_dungeon(rng, max_rooms=6):
    d = Dungeon()
    ids = []
    for k in range(rng.randint(1, max_rooms)):
        room = random_room(rng, min_side=3, max_side=7, max_doors=0, wall_weight=2)
        d = add_room(d, replace(room, id=f"d{k}"))
        ids.append(f"d{k}")
    if len(ids) >= 2:
        for _ in range(rng.randint(0, 2 * len(ids))):
            a, b = rng.sample(ids, 2)
            free_a = free_border_tiles(d.rooms[a])
            free_b = free_border_tiles(d.rooms[b])
            if free_a and free_b:
                d = connect_rooms(d, a, rng.choice(free_a), b, rng.choice(free_b))
    return set_initial_room(d, rng.choice(ids))


# -- pathfinding -------------------------------------------------------------

DETOUR = [
    "wwwww",
    "fffff",
    "ffeff",
    "fffff",
    "wwwww",
]


class TestFindPath:
    def test_fastest_across_open_room(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        path = find_path(d, ("r1", Position(0, 0)), ("r1", Position(2, 2)))
        assert len(path) == 5
        assert_valid_path(d, path, ("r1", Position(0, 0)), ("r1", Position(2, 2)))

    def test_same_tile(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        assert find_path(d, ("r1", Position(1, 1)), ("r1", Position(1, 1))) == [("r1", Position(1, 1))]

    def test_less_danger_takes_the_detour(self):
        d = build_dungeon(room_from_rows(DETOUR, id="r1"))
        start, goal = ("r1", Position(2, 0)), ("r1", Position(2, 4))
        path = find_path(d, start, goal, PathHeuristic.LESS_DANGER)
        assert ("r1", Position(2, 2)) not in path
        assert len(path) == 7
        best = min(path_cost(d, p, PathHeuristic.LESS_DANGER)
                   for p in all_simple_paths(d, start, goal))
        assert path_cost(d, path, PathHeuristic.LESS_DANGER) == best

    def test_more_danger_walks_into_the_fight(self):
        d = build_dungeon(room_from_rows(DETOUR, id="r1"))
        start, goal = ("r1", Position(2, 0)), ("r1", Position(2, 4))
        path = find_path(d, start, goal, PathHeuristic.MORE_DANGER)
        assert ("r1", Position(2, 2)) in path
        assert len(path) == 5

    def test_fastest_ignores_the_enemy(self):
        d = build_dungeon(room_from_rows(DETOUR, id="r1"))
        path = find_path(d, ("r1", Position(2, 0)), ("r1", Position(2, 4)))
        assert len(path) == 5

    def test_rewarding_picks_the_treasure_route(self):
        # several equally short routes; only one passes the treasure
        room = room_from_rows(["ffftf",
                               "fwwwf",
                               "fwwwf",
                               "fwwwf",
                               "fffff"], id="r1")
        d = build_dungeon(room)
        start, goal = ("r1", Position(0, 0)), ("r1", Position(4, 4))
        path = find_path(d, start, goal, PathHeuristic.REWARDING)
        assert ("r1", Position(0, 3)) in path
        assert len(path) == 9
        best = min(path_cost(d, p, PathHeuristic.REWARDING)
                   for p in all_simple_paths(d, start, goal))
        assert path_cost(d, path, PathHeuristic.REWARDING) == best

    def test_rewarding_does_not_pay_extra_steps(self):
        # the treasure sits on a strictly longer branch, so it is skipped
        room = room_from_rows(["fffff",
                               "wwfww",
                               "wwtww"], id="r1")
        d = build_dungeon(room)
        path = find_path(d, ("r1", Position(0, 0)), ("r1", Position(0, 4)), PathHeuristic.REWARDING)
        assert ("r1", Position(2, 2)) not in path
        assert len(path) == 5

    def test_crosses_connections(self):
        d = open_pair()
        start, goal = ("r1", Position(1, 0)), ("r2", Position(1, 2))
        path = find_path(d, start, goal)
        assert_valid_path(d, path, start, goal)
        assert path[2:4] == [("r1", Position(1, 2)), ("r2", Position(1, 0))]
        assert len(path) == 6

    def test_no_path_between_disconnected_rooms(self):
        d = build_dungeon(create_room(3, 3, id="r1"), create_room(3, 3, id="r2"))
        with pytest.raises(NoPathError):
            find_path(d, ("r1", Position(0, 0)), ("r2", Position(0, 0)))

    def test_walled_off_goal(self):
        pocket = room_from_rows(["fffff",
                                 "fwwwf",
                                 "fwfwf",
                                 "fwwwf",
                                 "fffff"], id="r1")
        with pytest.raises(NoPathError):
            find_path(build_dungeon(pocket), ("r1", Position(0, 0)), ("r1", Position(2, 2)))

    def test_wall_endpoint_rejected(self):
        room = paint_tiles(create_room(3, 3, id="r1"), [Position(1, 1)], TileKind.WALL)
        d = build_dungeon(room)
        with pytest.raises(PreconditionError):
            find_path(d, ("r1", Position(0, 0)), ("r1", Position(1, 1)))

    def test_unknown_room_rejected(self):
        with pytest.raises(NotFoundError):
            find_path(Dungeon(), ("r1", Position(0, 0)), ("r1", Position(1, 1)))

    def test_out_of_bounds_endpoint_rejected(self):
        d = build_dungeon(create_room(3, 3, id="r1"))
        with pytest.raises(BoundsError):
            find_path(d, ("r1", Position(9, 9)), ("r1", Position(1, 1)))

    def test_deterministic(self):
        d = open_pair()
        runs = [find_path(d, ("r1", Position(0, 0)), ("r2", Position(2, 2)), h)
                for h in list(PathHeuristic) * 2]
        assert runs[:4] == runs[4:]

    def test_matches_exhaustive_enumeration(self, rng):
        """Each heuristic reaches the optimum over every simple path."""
        checked = attempts = 0
        while checked < 60:
            attempts += 1
            assert attempts < 2000, "generator keeps producing oversized dungeons"
            d = random_path_dungeon(rng)
            if passable_tiles(d) > 26:  # keeps enumeration tractable
                continue
            start, goal = pick_endpoints(d, rng)
            if start is None:
                continue
            paths = all_simple_paths(d, start, goal)
            for heuristic in PathHeuristic:
                if not paths:
                    with pytest.raises(NoPathError):
                        find_path(d, start, goal, heuristic)
                    continue
                found = find_path(d, start, goal, heuristic)
                assert_valid_path(d, found, start, goal)
                best = min(path_cost(d, p, heuristic) for p in paths)
                assert path_cost(d, found, heuristic) == best
            checked += 1

    def test_fastest_is_never_beaten(self, rng):
        """Fastest length <= every enumerated path length."""
        checked = attempts = 0
        while checked < 40:
            attempts += 1
            assert attempts < 2000, "generator keeps producing oversized dungeons"
            d = random_path_dungeon(rng, two_rooms=False)
            if passable_tiles(d) > 26:
                continue
            start, goal = pick_endpoints(d, rng)
            if start is None:
                continue
            paths = all_simple_paths(d, start, goal)
            if not paths:
                continue
            found = find_path(d, start, goal)
            assert all(len(found) <= len(p) for p in paths)
            checked += 1


def passable_tiles(dungeon):
    return sum(room.passable_mask().count(1) for room in dungeon.rooms.values())


def random_path_dungeon(rng, two_rooms=True):
    """One 5x5 room or two small connected rooms, with walls to thin it out."""
    def small_room(rid):
        room = random_room(rng, min_side=3, max_side=4 if two_rooms else 5,
                           max_doors=0, wall_weight=4)
        return replace(room, id=rid)

    d = add_room(Dungeon(), small_room("p0"))
    if two_rooms and rng.random() < 0.5:
        d = add_room(d, small_room("p1"))
        free_a = free_border_tiles(d.rooms["p0"])
        free_b = free_border_tiles(d.rooms["p1"])
        if free_a and free_b:
            d = connect_rooms(d, "p0", rng.choice(free_a), "p1", rng.choice(free_b))
    return d


def pick_endpoints(dungeon, rng):
    tiles = [(rid, Position(r, c))
             for rid, room in dungeon.rooms.items()
             for r in range(room.height) for c in range(room.width)
             if room.tile(r, c) != TileKind.WALL]
    if len(tiles) < 2:
        return None, None
    return tuple(rng.sample(tiles, 2))


# -- manifest I/O ------------------------------------------------------------


class TestManifest:
    def test_round_trip(self, tmp_path):
        treasure = paint_tiles(create_room(4, 3, id="vault"), [Position(1, 1)],
                               TileKind.TREASURE, lock=True)
        d = build_dungeon(
            create_room(3, 3, id="entry"),
            treasure,
            create_room(3, 4, id="island"),
            connections=[("entry", (1, 2), "vault", (1, 0))],
            initial="entry",
        )
        save_dungeon(d, tmp_path / "dungeon.txt")
        loaded = load_dungeon(tmp_path / "dungeon.txt")
        assert set(loaded.rooms) == set(d.rooms)
        for rid in d.rooms:
            assert loaded.rooms[rid].tiles == d.rooms[rid].tiles
            assert loaded.rooms[rid].locks == d.rooms[rid].locks
        assert loaded.connections == d.connections
        assert loaded.initial_room == "entry"

    def test_comments_and_blank_lines(self, tmp_path):
        (tmp_path / "a.room").write_text("3 3\nfff\nfff\nfff\n")
        (tmp_path / "m.txt").write_text(
            "# a tiny dungeon\n\nroom a a.room   # the only room\n\ninitial a\n")
        d = load_dungeon(tmp_path / "m.txt")
        assert set(d.rooms) == {"a"} and d.initial_room == "a"

    def test_unsafe_room_id(self, tmp_path):
        d = add_room(Dungeon(), create_room(3, 3, id="../escape"))
        with pytest.raises(ValidationError):
            save_dungeon(d, tmp_path / "m.txt")

    @pytest.mark.parametrize("manifest, message", [
        ("room a a.room extra arg\n", "expected 'room"),
        ("room a a.room\nroom a a.room\n", "duplicate room id"),
        ("gadget a\n", "unknown declaration"),
        ("initial ghost\n", "not declared"),
        ("room a a.room\nconnect ghost 1 2 a 1 0\n", "not declared"),
        ("room a a.room\ninitial\n", "expected 'initial"),
        ("room a a.room\nconnect a 1 x a 1 0\n", "non-numeric"),
    ])
    def test_malformed_manifests(self, tmp_path, manifest, message):
        (tmp_path / "a.room").write_text("3 3\nfff\nfff\nfff\n")
        (tmp_path / "m.txt").write_text(manifest)
        with pytest.raises(ParseError, match=message):
            load_dungeon(tmp_path / "m.txt")

    def test_connect_line_needs_matching_doors(self, tmp_path):
        (tmp_path / "a.room").write_text("3 3\nfff\nfff\nfff\n")
        (tmp_path / "b.room").write_text("3 3\nfff\nfff\nfff\n")
        (tmp_path / "m.txt").write_text("room a a.room\nroom b b.room\nconnect a 1 2 b 1 0\n")
        with pytest.raises(ParseError, match="no door"):
            load_dungeon(tmp_path / "m.txt")

    def test_door_without_connection(self, tmp_path):
        (tmp_path / "a.room").write_text("3 3\nffd\nfff\nfff\n")
        (tmp_path / "m.txt").write_text("room a a.room\n")
        with pytest.raises(ParseError, match="has no connection"):
            load_dungeon(tmp_path / "m.txt")

    def test_door_claimed_twice(self, tmp_path):
        (tmp_path / "a.room").write_text("3 3\nffd\nfff\nfff\n")
        (tmp_path / "b.room").write_text("3 3\nfff\ndff\ndff\n")
        (tmp_path / "m.txt").write_text(
            "room a a.room\nroom b b.room\nconnect a 0 2 b 1 0\nconnect a 0 2 b 2 0\n")
        with pytest.raises(ParseError, match="already holds"):
            load_dungeon(tmp_path / "m.txt")
