"""Designer session service: one engine worker per connected editor.

Messages are JSON objects ``{kind, op, seq, payload}``. Requests come from
the editor and each receives exactly one response with the same seq;
events flow the other way and carry the engine generation. Over plain TCP
messages are newline-delimited; a client may instead open the same port
with an HTTP WebSocket upgrade and exchange one message per text frame.
The client speaks first, opening with a ``hello`` request that states its
schema version; the server echoes the version it serves.

One designer holds a session at a time, a second concurrent client is
refused with "session-busy". Alongside the engine the session keeps the
state the engine does not own: the dungeon being assembled, the current
target room, and the latest elite grid, which answers suggestion queries
without a round trip into the evolution loop. Elite broadcasts are sent
as diffs against what the client already saw; ``resync`` returns the full
grid. Retargeting to a different room size swaps in a fresh engine worker
behind the same session, with event generations kept monotone.
"""
from __future__ import annotations

import base64
import hashlib
import itertools
import json
import queue
import socket
import struct
import threading
import time
from collections import deque
from dataclasses import replace
from typing import Any, Callable, Optional

from .dungeon import (
    Dungeon,
    PathHeuristic,
    add_room,
    check_dungeon_feasibility,
    connect_rooms,
    find_path,
    remove_connection,
    remove_room,
    set_initial_room,
    update_room,
)
from .engine import (
    CellUpdates,
    CommandRejected,
    ElitesBroadcast,
    Engine,
    EngineConfig,
    Individual,
    RequestSnapshot,
    SetDimensions,
    Snapshot,
    Start,
    Stop,
    UpdateTarget,
)
from .errors import EddError, ValidationError
from .metrics import DimensionDescriptor, DimensionKind
from .room import Position, Room, create_room, parse_room, serialize_room

SCHEMA_VERSION = "1"
SUGGESTION_COUNT = 6

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class ProtocolError(EddError):
    """Session-level failure carrying a wire error code."""

    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code


# -- JSON codecs ---------------------------------------------------------


def room_to_json(room: Room) -> dict:
    rows = serialize_room(room).splitlines()[1:]
    return {"id": room.id, "width": room.width, "height": room.height, "rows": rows}


def room_from_json(data: Any) -> Room:
    if not isinstance(data, dict):
        raise ValidationError("room payload must be an object")
    try:
        header = f"{int(data['width'])} {int(data['height'])}"
        rows = list(data["rows"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("room payload needs width, height and rows") from None
    id = data.get("id")
    text = "\n".join([header, *map(str, rows)]) + "\n"
    return parse_room(text, id=None if id is None else str(id))


def position_from_json(data: Any) -> Position:
    try:
        row, col = data
        return Position(int(row), int(col))
    except (TypeError, ValueError):
        raise ValidationError(f"expected a [row, col] pair, got {data!r}") from None


def descriptor_to_json(descriptor: DimensionDescriptor) -> dict:
    return {"kind": descriptor.kind.value, "granularity": descriptor.granularity}


def descriptor_from_json(data: Any) -> DimensionDescriptor:
    if not isinstance(data, dict):
        raise ValidationError("descriptor payload must be an object")
    try:
        kind = DimensionKind(data["kind"])
    except (KeyError, ValueError):
        raise ValidationError(f"unknown dimension in {data!r}") from None
    return DimensionDescriptor(kind, int(data.get("granularity", 5)))


def individual_to_json(ind: Individual) -> dict:
    return {
        "room": room_to_json(ind.genotype),
        "fitness": ind.fitness,
        "feasible": ind.feasible,
        "dims": list(ind.dims),
    }


def dungeon_to_json(dungeon: Dungeon) -> dict:
    return {
        "rooms": [room_to_json(room) for room in dungeon.rooms.values()],
        "connections": [
            {
                "roomA": link.room_a, "tileA": list(link.tile_a),
                "roomB": link.room_b, "tileB": list(link.tile_b),
            }
            for link in dungeon.connections
        ],
        "initialRoom": dungeon.initial_room,
    }


# -- transports ----------------------------------------------------------


class LineStream:
    """Newline-delimited JSON over a plain stream socket."""

    def __init__(self, sock: socket.socket):
        self._sock = sock
        self._reader = sock.makefile("rb")
        self._write_lock = threading.Lock()

    def send(self, text: str) -> None:
        with self._write_lock:
            self._sock.sendall(text.encode() + b"\n")

    def recv(self) -> Optional[str]:
        line = self._reader.readline()
        return line.decode() if line else None

    def close(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


class WebSocketStream:
    """One JSON message per text frame after an HTTP upgrade."""

    def __init__(self, sock: socket.socket, leftover: bytes = b""):
        self._sock = sock
        self._buffer = bytearray(leftover)
        self._write_lock = threading.Lock()

    def _read_exact(self, n: int) -> bytes:
        while len(self._buffer) < n:
            chunk = self._sock.recv(65536)
            if not chunk:
                raise ConnectionError("peer closed mid-frame")
            self._buffer.extend(chunk)
        out = bytes(self._buffer[:n])
        del self._buffer[:n]
        return out

    def _read_frame(self) -> tuple[int, bytes]:
        head = self._read_exact(2)
        fin, opcode = head[0] & 0x80, head[0] & 0x0F
        masked, length = head[1] & 0x80, head[1] & 0x7F
        if length == 126:
            (length,) = struct.unpack(">H", self._read_exact(2))
        elif length == 127:
            (length,) = struct.unpack(">Q", self._read_exact(8))
        key = self._read_exact(4) if masked else b""
        payload = self._read_exact(length)
        if masked:
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        if not fin:  # gather continuation frames into one message
            more_op, more = self._read_frame()
            if more_op != 0:
                raise ConnectionError("interleaved fragmented frames")
            payload += more
        return opcode, payload

    def _send_frame(self, opcode: int, payload: bytes) -> None:
        head = bytearray([0x80 | opcode])
        if len(payload) < 126:
            head.append(len(payload))
        elif len(payload) < 1 << 16:
            head.append(126)
            head += struct.pack(">H", len(payload))
        else:
            head.append(127)
            head += struct.pack(">Q", len(payload))
        with self._write_lock:
            self._sock.sendall(bytes(head) + payload)

    def send(self, text: str) -> None:
        self._send_frame(0x1, text.encode())

    def recv(self) -> Optional[str]:
        try:
            while True:
                opcode, payload = self._read_frame()
                if opcode == 0x8:
                    self._send_frame(0x8, payload[:2])
                    return None
                if opcode == 0x9:
                    self._send_frame(0xA, payload)
                    continue
                if opcode in (0x1, 0x2):
                    return payload.decode()
        except (ConnectionError, OSError):
            return None

    def close(self) -> None:
        try:
            self._send_frame(0x8, b"")
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


def _upgrade_websocket(sock: socket.socket) -> WebSocketStream:
    data = b""
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(65536)
        if not chunk:
            raise ConnectionError("client closed during upgrade")
        data += chunk
    head, leftover = data.split(b"\r\n\r\n", 1)
    headers = {}
    for line in head.decode("latin-1").split("\r\n")[1:]:
        name, _, value = line.partition(":")
        headers[name.strip().lower()] = value.strip()
    key = headers.get("sec-websocket-key")
    if key is None:
        sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        raise ConnectionError("upgrade request without a websocket key")
    accept = base64.b64encode(hashlib.sha1((key + _WS_GUID).encode()).digest())
    sock.sendall(
        b"HTTP/1.1 101 Switching Protocols\r\n"
        b"Upgrade: websocket\r\n"
        b"Connection: Upgrade\r\n"
        b"Sec-WebSocket-Accept: " + accept + b"\r\n\r\n"
    )
    return WebSocketStream(sock, leftover)


def negotiate_transport(sock: socket.socket):
    """Plain sockets carry JSON lines; an HTTP GET selects WebSocket."""
    head = b""
    while len(head) < 4:
        head = sock.recv(4, socket.MSG_PEEK)
        if not head:
            raise ConnectionError("client closed before speaking")
        if head != b"GET "[: len(head)]:
            return LineStream(sock)
        if len(head) < 4:
            time.sleep(0.005)
    return _upgrade_websocket(sock)


# -- engine worker -------------------------------------------------------


class EngineWorker:
    """Runs one engine on its own thread, fed through a command queue."""

    def __init__(self, target: Room, cfg: EngineConfig, emit: Callable[[Any], None]):
        self.engine = Engine(target, cfg)
        self._commands: "queue.Queue[Any]" = queue.Queue()
        self._thread = threading.Thread(
            target=self.engine.run, args=(self._commands, emit), daemon=True
        )
        self._thread.start()

    def send(self, command: Any) -> None:
        self._commands.put(command)

    def shutdown(self) -> None:
        self._commands.put(None)
        self._thread.join(timeout=30)


# -- session -------------------------------------------------------------


def _empty_grid(descriptors) -> dict[tuple[int, ...], Optional[Individual]]:
    axes = [range(d.granularity) for d in descriptors]
    return {index: None for index in itertools.product(*axes)}


class Session:
    """One connected designer: request dispatch plus engine event relay."""

    def __init__(self, stream, width: int, height: int, cfg: EngineConfig):
        self.stream = stream
        self.cfg = cfg
        self.lock = threading.Lock()
        self.outbound: "queue.Queue[Optional[dict]]" = queue.Queue()
        self.dungeon = Dungeon()
        # stable id: fresh sessions must serialize identically
        self.target = create_room(width, height, id="target")
        self.descriptors = cfg.dims
        self.running = False
        self.generation_offset = 0
        self.last_generation = 0
        self.elites = _empty_grid(cfg.dims)
        self.cache_descriptors = cfg.dims  # space self.elites is keyed by
        self.sent_grid: Optional[dict] = None
        self.sent_descriptors: Optional[tuple] = None
        self.pending_snapshots: deque[int] = deque()
        self._handshaken = False
        self.worker = EngineWorker(self.target, cfg, self._engine_event)
        self._writer = threading.Thread(target=self._write_loop, daemon=True)
        self._writer.start()

    # -- plumbing ----------------------------------------------------------

    def _write_loop(self) -> None:
        while True:
            message = self.outbound.get()
            if message is None:
                return
            try:
                self.stream.send(json.dumps(message, separators=(",", ":")))
            except OSError:
                return

    def _post(self, message: dict) -> None:
        self.outbound.put(message)

    def _respond(self, op: str, seq: int, payload: dict) -> None:
        self._post({"kind": "response", "op": op, "seq": seq, "payload": payload})

    def _respond_error(self, op: str, seq: int, code: str, message: str) -> None:
        self._respond(op, seq, {"error": {"code": code, "message": message}})

    def _emit(self, op: str, payload: dict) -> None:
        self._post({"kind": "event", "op": op, "seq": 0, "payload": payload})

    def close(self) -> None:
        self.worker.shutdown()
        self.outbound.put(None)
        self.stream.close()

    # -- engine events -----------------------------------------------------

    def _engine_event(self, event: Any) -> None:
        if isinstance(event, ElitesBroadcast):
            self._relay_broadcast(event)
        elif isinstance(event, CellUpdates):
            self._relay_updates(event)
        elif isinstance(event, Snapshot):
            self._relay_snapshot(event)
        elif isinstance(event, CommandRejected):
            with self.lock:
                generation = self._track_generation(event.generation)
            self._emit("rejected", {"generation": generation, "reason": event.reason})

    def _track_generation(self, engine_generation: int) -> int:
        generation = self.generation_offset + engine_generation
        self.last_generation = max(self.last_generation, generation)
        return generation

    @staticmethod
    def _grid_cells(elites: dict) -> list[dict]:
        return [
            {"cell": list(index), "elite": None if ind is None else individual_to_json(ind)}
            for index, ind in sorted(elites.items())
        ]

    def _relay_broadcast(self, event: ElitesBroadcast) -> None:
        with self.lock:
            generation = self._track_generation(event.generation)
            full = self.sent_grid is None or self.sent_descriptors != event.descriptors
            if full:
                shown = dict(event.elites)
            else:
                shown = {
                    index: ind
                    for index, ind in event.elites.items()
                    if self.sent_grid.get(index) != ind
                }
            self.elites = dict(event.elites)
            self.cache_descriptors = event.descriptors
            self.sent_grid = dict(event.elites)
            self.sent_descriptors = event.descriptors
            descriptors = [descriptor_to_json(d) for d in event.descriptors]
        self._emit("elites", {
            "generation": generation,
            "descriptors": descriptors,
            "full": full,
            "cells": self._grid_cells(shown),
        })

    def _relay_updates(self, event: CellUpdates) -> None:
        # updates for a space the cache no longer tracks are forwarded only
        with self.lock:
            generation = self._track_generation(event.generation)
            if event.descriptors == self.cache_descriptors:
                self.elites.update(event.entries)
            if self.sent_grid is not None and event.descriptors == self.sent_descriptors:
                self.sent_grid.update(event.entries)
            descriptors = [descriptor_to_json(d) for d in event.descriptors]
        self._emit("cellUpdates", {
            "generation": generation,
            "descriptors": descriptors,
            "entries": self._grid_cells(event.entries),
        })

    def _relay_snapshot(self, event: Snapshot) -> None:
        with self.lock:
            generation = self._track_generation(event.generation)
            seq = self.pending_snapshots.popleft() if self.pending_snapshots else None
        if seq is None:
            return
        cells = [
            {
                "cell": list(index),
                "feasible": [individual_to_json(i) for i in feasible],
                "infeasible": [individual_to_json(i) for i in infeasible],
            }
            for index, (feasible, infeasible) in sorted(event.cells.items())
        ]
        self._respond("requestSnapshot", seq, {
            "generation": generation,
            "target": room_to_json(event.target),
            "descriptors": [descriptor_to_json(d) for d in event.descriptors],
            "cells": cells,
        })

    # -- request dispatch ----------------------------------------------------

    def serve(self, first_text: str) -> None:
        self._handle(first_text)
        while True:
            text = self.stream.recv()
            if text is None:
                return
            self._handle(text)

    def _handle(self, text: str) -> None:
        op, seq, payload = _parse_request(text)
        if op is None:
            self._respond_error("invalid", seq, "bad-message", "unparseable request")
            return
        if not self._handshaken and op != "hello":
            self._respond_error(op, seq, "handshake-required", "open with a hello request")
            return
        handler = self._OPS.get(op)
        if handler is None:
            self._respond_error(op, seq, "unknown-op", f"no such operation {op!r}")
            return
        try:
            result = handler(self, payload, seq)
        except EddError as err:
            self._respond_error(op, seq, err.code, str(err))
            return
        if result is not None:
            self._respond(op, seq, result)

    # -- operations ----------------------------------------------------------

    def _bootstrap(self) -> dict:
        with self.lock:
            return {
                "schema": SCHEMA_VERSION,
                "generation": self.last_generation,
                "running": self.running,
                "target": room_to_json(self.target),
                "descriptors": [descriptor_to_json(d) for d in self.descriptors],
                "dungeon": dungeon_to_json(self.dungeon),
            }

    def _op_hello(self, payload: dict, seq: int) -> dict:
        schema = str(payload.get("schema", SCHEMA_VERSION))
        if schema != SCHEMA_VERSION:
            raise ProtocolError(
                f"client speaks schema {schema}, server speaks {SCHEMA_VERSION}",
                "schema-mismatch",
            )
        self._handshaken = True
        return self._bootstrap()

    # dungeon assembly proxies; each answers with the updated dungeon

    def _op_add_room(self, payload: dict, seq: int) -> dict:
        room = room_from_json(payload.get("room"))
        self.dungeon = add_room(self.dungeon, room)
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_remove_room(self, payload: dict, seq: int) -> dict:
        self.dungeon = remove_room(self.dungeon, str(payload.get("roomId")))
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_update_room(self, payload: dict, seq: int) -> dict:
        room = room_from_json(payload.get("room"))
        self.dungeon = update_room(self.dungeon, room)
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_connect_rooms(self, payload: dict, seq: int) -> dict:
        self.dungeon = connect_rooms(
            self.dungeon,
            str(payload.get("roomA")), position_from_json(payload.get("tileA")),
            str(payload.get("roomB")), position_from_json(payload.get("tileB")),
        )
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_remove_connection(self, payload: dict, seq: int) -> dict:
        self.dungeon = remove_connection(
            self.dungeon, str(payload.get("roomId")), position_from_json(payload.get("tile"))
        )
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_set_initial_room(self, payload: dict, seq: int) -> dict:
        self.dungeon = set_initial_room(self.dungeon, str(payload.get("roomId")))
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_get_dungeon(self, payload: dict, seq: int) -> dict:
        return {"dungeon": dungeon_to_json(self.dungeon)}

    def _op_check_feasibility(self, payload: dict, seq: int) -> dict:
        report = check_dungeon_feasibility(self.dungeon)
        return {
            "feasible": report.feasible,
            "unreachableRooms": list(report.unreachable_rooms),
            "unreachableTiles": {
                room_id: [list(tile) for tile in tiles]
                for room_id, tiles in report.unreachable_tiles.items()
            },
        }

    def _op_find_path(self, payload: dict, seq: int) -> dict:
        def waypoint(data: Any) -> tuple[str, Position]:
            if not isinstance(data, dict):
                raise ValidationError("waypoint must be {roomId, tile}")
            return str(data.get("roomId")), position_from_json(data.get("tile"))

        try:
            heuristic = PathHeuristic(payload.get("heuristic", "fastest"))
        except ValueError:
            raise ValidationError(f"unknown heuristic {payload.get('heuristic')!r}") from None
        path = find_path(
            self.dungeon, waypoint(payload.get("start")), waypoint(payload.get("goal")), heuristic
        )
        return {"path": [{"roomId": room_id, "tile": list(tile)} for room_id, tile in path]}

    # engine control

    def _op_update_target(self, payload: dict, seq: int) -> dict:
        room = room_from_json(payload.get("room"))
        if (room.width, room.height) == (self.target.width, self.target.height):
            self.worker.send(UpdateTarget(room))
        else:
            self._rebuild_worker(room)
        with self.lock:
            self.target = room
        return {"target": room_to_json(room)}

    def _rebuild_worker(self, target: Room) -> None:
        """A new canvas size needs a fresh archive; generations stay monotone."""
        self.worker.shutdown()
        with self.lock:
            self.generation_offset = self.last_generation
            self.elites = _empty_grid(self.descriptors)
            self.cache_descriptors = self.descriptors
            self.sent_grid = None
            self.sent_descriptors = None
            stale = list(self.pending_snapshots)
            self.pending_snapshots.clear()
            cfg = replace(self.cfg, dims=self.descriptors)
        for seq in stale:
            self._respond_error("requestSnapshot", seq, "stale", "engine was retargeted")
        self.worker = EngineWorker(target, cfg, self._engine_event)
        if self.running:
            self.worker.send(Start())

    def _op_set_dimensions(self, payload: dict, seq: int) -> dict:
        data = payload.get("descriptors")
        if not isinstance(data, list) or not data:
            raise ValidationError("descriptors must be a non-empty list")
        descriptors = tuple(descriptor_from_json(entry) for entry in data)
        if not 1 <= len(descriptors) <= 4:
            raise ValidationError("between 1 and 4 dimension descriptors required")
        self.worker.send(SetDimensions(descriptors))
        with self.lock:
            self.descriptors = descriptors
            self.elites = _empty_grid(descriptors)
            self.cache_descriptors = descriptors
            self.sent_grid = None
            self.sent_descriptors = None
        return {"descriptors": [descriptor_to_json(d) for d in descriptors]}

    def _op_start(self, payload: dict, seq: int) -> dict:
        self.worker.send(Start())
        with self.lock:
            self.running = True
        return {"running": True}

    def _op_stop(self, payload: dict, seq: int) -> dict:
        self.worker.send(Stop())
        with self.lock:
            self.running = False
        return {"running": False}

    def _op_request_snapshot(self, payload: dict, seq: int) -> None:
        with self.lock:
            self.pending_snapshots.append(seq)
        self.worker.send(RequestSnapshot())
        return None  # answered when the engine reaches the next boundary

    def _op_resync(self, payload: dict, seq: int) -> dict:
        with self.lock:
            return {
                "generation": self.last_generation,
                "descriptors": [descriptor_to_json(d) for d in self.cache_descriptors],
                "full": True,
                "cells": self._grid_cells(self.elites),
            }

    def _op_apply_suggestion(self, payload: dict, seq: int) -> dict:
        index = tuple(int(v) for v in payload.get("cell", ()))
        with self.lock:
            elite = self.elites.get(index)
            locks = self.target.locks
        if elite is None:
            raise ProtocolError(f"no suggestion at cell {list(index)}", "empty-cell")
        # keep the designer's lock mask; the genotype already honors it
        room = Room(
            elite.genotype.width, elite.genotype.height,
            elite.genotype.tiles, locks, id=elite.genotype.id,
        )
        self.worker.send(UpdateTarget(room))
        with self.lock:
            self.target = room
        return {"target": room_to_json(room)}

    def _op_request_suggestions(self, payload: dict, seq: int) -> dict:
        count = int(payload.get("count", SUGGESTION_COUNT))
        with self.lock:
            pool = [(index, ind) for index, ind in self.elites.items() if ind is not None]
        pool.sort(key=lambda entry: (-entry[1].fitness, entry[0]))
        return {
            "suggestions": [
                {"cell": list(index), "elite": individual_to_json(ind)}
                for index, ind in pool[:count]
            ]
        }

    _OPS: dict[str, Callable[["Session", dict, int], Optional[dict]]] = {
        "hello": _op_hello,
        "addRoom": _op_add_room,
        "removeRoom": _op_remove_room,
        "updateRoom": _op_update_room,
        "connectRooms": _op_connect_rooms,
        "removeConnection": _op_remove_connection,
        "setInitialRoom": _op_set_initial_room,
        "getDungeon": _op_get_dungeon,
        "checkFeasibility": _op_check_feasibility,
        "findPath": _op_find_path,
        "updateTarget": _op_update_target,
        "setDimensions": _op_set_dimensions,
        "start": _op_start,
        "stop": _op_stop,
        "requestSnapshot": _op_request_snapshot,
        "resync": _op_resync,
        "applySuggestion": _op_apply_suggestion,
        "requestSuggestions": _op_request_suggestions,
    }


def _parse_request(text: str) -> tuple[Optional[str], int, dict]:
    try:
        message = json.loads(text)
    except json.JSONDecodeError:
        return None, 0, {}
    if not isinstance(message, dict) or message.get("kind") != "request":
        return None, 0, {}
    op = message.get("op")
    seq = message.get("seq")
    payload = message.get("payload")
    if not isinstance(op, str) or not isinstance(seq, int) or isinstance(seq, bool):
        return None, 0, {}
    return op, seq, payload if isinstance(payload, dict) else {}


# -- service -------------------------------------------------------------


class SessionService:
    """Listens for editors and runs at most one designer session at a time."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        width: int = 13,
        height: int = 7,
        engine_cfg: Optional[EngineConfig] = None,
    ):
        self.host = host
        self.port = port
        self.width = width
        self.height = height
        self.engine_cfg = engine_cfg if engine_cfg is not None else EngineConfig()
        self._lock = threading.Lock()
        self._active: Optional[Session] = None
        self._listener: Optional[socket.socket] = None
        self._closed = False

    def start(self) -> "SessionService":
        self._listener = socket.create_server((self.host, self.port))
        self.port = self._listener.getsockname()[1]
        threading.Thread(target=self._accept_loop, daemon=True).start()
        return self

    def _accept_loop(self) -> None:
        while True:
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            threading.Thread(target=self._serve_client, args=(conn,), daemon=True).start()

    def _serve_client(self, conn: socket.socket) -> None:
        stream = None
        session = None
        try:
            stream = negotiate_transport(conn)
            first = stream.recv()
            if first is None:
                return
            with self._lock:
                busy = self._active is not None
                if not busy:
                    session = Session(stream, self.width, self.height, self.engine_cfg)
                    self._active = session
            if busy:
                op, seq, _ = _parse_request(first)
                stream.send(json.dumps({
                    "kind": "response", "op": op or "hello", "seq": seq, "payload": {
                        "error": {"code": "session-busy",
                                  "message": "another designer holds this session"},
                    },
                }, separators=(",", ":")))
                return
            session.serve(first)
        except (ConnectionError, OSError):
            pass
        finally:
            if session is not None:
                with self._lock:
                    self._active = None
                session.close()
            elif stream is not None:
                stream.close()
            else:
                conn.close()

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
            session = self._active
            self._active = None
        if session is not None:
            session.close()
        if self._listener is not None:
            self._listener.close()
