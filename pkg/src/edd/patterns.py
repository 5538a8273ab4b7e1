"""Spatial structure analysis of rooms.

Passable tiles are partitioned into spatial patterns: chambers (open
rectangles with both sides >= 3), corridors (straight runs), connectors
(junction tiles), and nothing (isolated leftovers). Chambers are then
classified into gameplay meso patterns: treasure room, guard room, ambush.
The resulting pattern graph (nodes + orthogonal adjacency) feeds the
behavioral dimensions; in particular the route structure between doors.

The partition is deterministic: chambers are claimed greedily by
(area, topmost, leftmost, widest), remaining tiles are classified by the
straight runs through them, and nodes are materialized in row-major order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Optional

from .room import Position, Room, TileKind


class PatternKind(Enum):
    CHAMBER = "chamber"
    CORRIDOR = "corridor"
    CONNECTOR = "connector"
    NOTHING = "nothing"


class MesoKind(Enum):
    TREASURE_ROOM = "treasure-room"
    GUARD_ROOM = "guard-room"
    AMBUSH = "ambush"


@dataclass(frozen=True)
class SpatialPattern:
    kind: PatternKind
    tiles: frozenset[Position]
    contains_doors: tuple[Position, ...] = ()


@dataclass(frozen=True)
class MesoPattern:
    kind: MesoKind
    node: int  # index of the chamber in PatternGraph.nodes

    def chamber(self, graph: "PatternGraph") -> SpatialPattern:
        return graph.nodes[self.node]


@dataclass(frozen=True)
class MesoConfig:
    """Chamber classification thresholds (first matching rule wins)."""

    treasure_room_treasures: int = 2
    guard_room_treasures: int = 1
    guard_room_enemies: int = 1
    ambush_door_distance: int = 2


DEFAULT_MESO = MesoConfig()


@dataclass(frozen=True)
class PatternGraph:
    nodes: tuple[SpatialPattern, ...]
    edges: frozenset[tuple[int, int]]
    meso_patterns: tuple[MesoPattern, ...] = ()

    def door_nodes(self) -> tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.nodes) if n.contains_doors)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.nodes]
        for a, b in sorted(self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def tile_count(self, kind: PatternKind) -> int:
        return sum(len(n.tiles) for n in self.nodes if n.kind is kind)


def _chamber_candidates(avail: bytearray, width: int, height: int):
    """Containment-maximal all-available rectangles with both sides >= 3,
    sorted best-first by (area, topmost, leftmost, widest).

    Any valid rectangle is contained in one of these, so greedy extraction
    can claim from this list until a candidate overlaps an earlier claim;
    only then does the remaining area need a fresh scan.
    """
    found: list[tuple[tuple[int, int, int, int], int, int, int, int]] = []
    hist = [0] * width
    for r in range(height):
        base = r * width
        for c in range(width):
            hist[c] = hist[c] + 1 if avail[base + c] else 0
        stack: list[tuple[int, int]] = []  # (start_col, run_height)
        for c in range(width + 1):
            cur = hist[c] if c < width else 0
            start = c
            while stack and stack[-1][1] >= cur:
                sc, sh = stack.pop()
                rw = c - sc
                if sh >= 3 and rw >= 3:
                    top = r - sh + 1
                    found.append(((-sh * rw, top, sc, -rw), top, sc, sh, rw))
                start = sc
            if cur and (not stack or stack[-1][1] < cur):
                stack.append((start, cur))
    found.sort()
    return found


def _extract_chambers(avail: bytearray, width: int, height: int):
    """Greedily claim best-first non-overlapping chamber rectangles."""
    chambers: list[tuple[int, int, int, int]] = []
    while True:
        candidates = _chamber_candidates(avail, width, height)
        if not candidates:
            return chambers
        rescan = False
        for _, top, left, rh, rw in candidates:
            overlap = any(
                top < t + h and t < top + rh and left < l + w and l < left + rw
                for t, l, h, w in chambers
            )
            if overlap:
                rescan = True
                break
            chambers.append((top, left, rh, rw))
            blank = b"\x00" * rw
            for r in range(top, top + rh):
                base = r * width + left
                avail[base:base + rw] = blank
        if not rescan:
            return chambers


_RUN = re.compile(rb"\x01+")
_TILE = re.compile(rb"\x01")


@lru_cache(maxsize=128)
def _position_table(width: int, height: int) -> tuple[Position, ...]:
    return tuple(Position(r, c) for r in range(height) for c in range(width))


def detect_spatial_patterns(room: Room) -> PatternGraph:
    """Partition passable tiles into pattern nodes plus adjacency edges."""
    w, h = room.width, room.height
    n = w * h
    avail = bytearray(room.passable_mask())
    chambers = _extract_chambers(avail, w, h)

    # mark tiles lying in straight runs of >=2 unclaimed tiles per direction
    h2 = bytearray(n)
    v2 = bytearray(n)
    for r in range(h):
        base = r * w
        for m in _RUN.finditer(avail, base, base + w):
            s, e = m.span()
            if e - s >= 2:
                h2[s:e] = b"\x01" * (e - s)
    for c in range(w):
        for m in _RUN.finditer(bytes(avail[c::w])):
            s, e = m.span()
            if e - s >= 2:
                v2[c + s * w:c + e * w:w] = b"\x01" * (e - s)

    ih = int.from_bytes(h2, "big")
    iv = int.from_bytes(v2, "big")
    ia = int.from_bytes(avail, "big")
    junctions = (ih & iv).to_bytes(n, "big")
    h_corr = (ih & ~iv).to_bytes(n, "big")
    v_corr = (iv & ~ih).to_bytes(n, "big")
    isolated = (ia & ~ih & ~iv).to_bytes(n, "big")

    node_of = [-1] * n
    node_tiles: list[list[int]] = []
    node_kinds: list[PatternKind] = []

    def new_node(kind: PatternKind, tiles: list[int]) -> int:
        idx = len(node_tiles)
        node_tiles.append(tiles)
        node_kinds.append(kind)
        for i in tiles:
            node_of[i] = idx
        return idx

    for top, left, rh, rw in chambers:
        tiles = [r * w + c for r in range(top, top + rh) for c in range(left, left + rw)]
        new_node(PatternKind.CHAMBER, tiles)

    # corridor segments split where junctions interrupt the run
    for r in range(h):
        base = r * w
        for m in _RUN.finditer(h_corr, base, base + w):
            s, e = m.span()
            new_node(PatternKind.CORRIDOR, list(range(s, e)))
    for c in range(w):
        for m in _RUN.finditer(bytes(v_corr[c::w])):
            s, e = m.span()
            new_node(PatternKind.CORRIDOR, list(range(c + s * w, c + e * w, w)))
    for m in _TILE.finditer(junctions):
        new_node(PatternKind.CONNECTOR, [m.start()])

    # isolated tiles have no passable unclaimed neighbors; they bridge the
    # nodes around them when they touch at least two
    for m in _TILE.finditer(isolated):
        i = m.start()
        r, c = divmod(i, w)
        around = set()
        for j in (i - w if r > 0 else -1, i + w if r < h - 1 else -1,
                  i - 1 if c > 0 else -1, i + 1 if c < w - 1 else -1):
            if j >= 0 and node_of[j] >= 0:
                around.add(node_of[j])
        kind = PatternKind.CONNECTOR if len(around) >= 2 else PatternKind.NOTHING
        new_node(kind, [i])

    edges = set()
    for i in range(n):
        a = node_of[i]
        if a < 0:
            continue
        if (i + 1) % w != 0:
            b = node_of[i + 1]
            if b >= 0 and b != a:
                edges.add((a, b) if a < b else (b, a))
        if i + w < n:
            b = node_of[i + w]
            if b >= 0 and b != a:
                edges.add((a, b) if a < b else (b, a))

    door_lists: list[list[Position]] = [[] for _ in node_tiles]
    for pos in room.doors:
        door_lists[node_of[pos.row * w + pos.col]].append(pos)

    table = _position_table(w, h)
    nodes = tuple(
        SpatialPattern(
            kind=node_kinds[k],
            tiles=frozenset(map(table.__getitem__, node_tiles[k])),
            contains_doors=tuple(door_lists[k]),
        )
        for k in range(len(node_tiles))
    )
    return PatternGraph(nodes=nodes, edges=frozenset(edges))


def detect_meso_patterns(room: Room, graph: PatternGraph,
                         cfg: MesoConfig = DEFAULT_MESO) -> PatternGraph:
    """Classify chambers into meso patterns; at most one per chamber."""
    found = []
    for idx, node in enumerate(graph.nodes):
        if node.kind is not PatternKind.CHAMBER:
            continue
        treasures = []
        enemies = []
        for pos in node.tiles:
            kind = room.tiles[pos.row * room.width + pos.col]
            if kind == TileKind.TREASURE:
                treasures.append(pos)
            elif kind == TileKind.ENEMY:
                enemies.append(pos)
        if len(treasures) >= cfg.treasure_room_treasures and not enemies:
            found.append(MesoPattern(MesoKind.TREASURE_ROOM, idx))
        elif len(treasures) >= cfg.guard_room_treasures and len(enemies) >= cfg.guard_room_enemies:
            found.append(MesoPattern(MesoKind.GUARD_ROOM, idx))
        elif node.contains_doors and not treasures:
            near = any(
                abs(e.row - d.row) + abs(e.col - d.col) <= cfg.ambush_door_distance
                for d in node.contains_doors
                for e in enemies
            )
            if near:
                found.append(MesoPattern(MesoKind.AMBUSH, idx))
    return replace(graph, meso_patterns=tuple(found))


def analyze_room(room: Room, cfg: MesoConfig = DEFAULT_MESO) -> PatternGraph:
    """Spatial partition plus meso classification in one call."""
    return detect_meso_patterns(room, detect_spatial_patterns(room), cfg)


def count_door_paths(graph: PatternGraph, cap: int = 1000) -> int:
    """Total simple paths between every unordered pair of door-bearing nodes.

    Two doors inside the same node contribute nothing. Counting saturates at
    ``cap`` per pair; room-sized graphs stay far below it.
    """
    door_nodes = graph.door_nodes()
    if len(door_nodes) < 2:
        return 0
    adj = graph.adjacency()
    total = 0
    for ai in range(len(door_nodes)):
        for bi in range(ai + 1, len(door_nodes)):
            total += _simple_paths(adj, door_nodes[ai], door_nodes[bi], cap)
    return total


def _simple_paths(adj: list[list[int]], src: int, dst: int, cap: int) -> int:
    """DFS with reachability pruning: a branch is entered only when dst is
    still reachable around the path so far, so dead-end subtrees cost nothing
    and total work stays proportional to the paths found.
    """
    count = 0
    on_path = bytearray(len(adj))
    on_path[src] = 1
    stack = [(src, iter(adj[src]))]
    while stack:
        node, it = stack[-1]
        advanced = False
        for nxt in it:
            if nxt == dst:
                count += 1
                if count >= cap:
                    return cap
                continue
            if not on_path[nxt] and _can_reach(adj, nxt, dst, on_path):
                on_path[nxt] = 1
                stack.append((nxt, iter(adj[nxt])))
                advanced = True
                break
        if not advanced:
            on_path[node] = 0
            stack.pop()
    return count


def _can_reach(adj: list[list[int]], start: int, dst: int, blocked: bytearray) -> bool:
    if start == dst:
        return True
    seen = bytearray(blocked)
    seen[start] = 1
    frontier = [start]
    while frontier:
        nxt_frontier = []
        for node in frontier:
            for nb in adj[node]:
                if nb == dst:
                    return True
                if not seen[nb]:
                    seen[nb] = 1
                    nxt_frontier.append(nb)
        frontier = nxt_frontier
    return False


_OVERLAY = {PatternKind.CHAMBER: "C", PatternKind.CONNECTOR: "+", PatternKind.NOTHING: "."}


def pattern_overlay(room: Room, graph: PatternGraph) -> str:
    """Character map of the partition for golden-file debugging.

    C=chamber, -=horizontal corridor, |=vertical corridor, +=connector,
    .=nothing, #=wall. Single-tile corridor stubs render as '-'.
    """
    out = [["#"] * room.width for _ in range(room.height)]
    for node in graph.nodes:
        if node.kind is PatternKind.CORRIDOR:
            rows = {p.row for p in node.tiles}
            ch = "-" if len(rows) == 1 else "|"
        else:
            ch = _OVERLAY[node.kind]
        for p in node.tiles:
            out[p.row][p.col] = ch
    return "\n".join("".join(row) for row in out) + "\n"
