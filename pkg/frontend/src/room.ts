// Client-side mirror of the room wire format: a width x height tile grid
// plus a lock mask, encoded as glyph rows (f/w/e/t/d, uppercase = locked).

export type TileKind = 'floor' | 'wall' | 'enemy' | 'treasure' | 'door';

// door placement belongs to dungeon connections, so the brush can't paint it
export type PaintKind = Exclude<TileKind, 'door'>;

export interface RoomJson {
  id: string;
  width: number;
  height: number;
  rows: string[];
}

export interface RoomData {
  id: string;
  width: number;
  height: number;
  tiles: TileKind[];
  locks: boolean[];
}

const KIND_BY_GLYPH: Record<string, TileKind> = {
  f: 'floor', w: 'wall', e: 'enemy', t: 'treasure', d: 'door',
};
const GLYPH_BY_KIND: Record<TileKind, string> = {
  floor: 'f', wall: 'w', enemy: 'e', treasure: 't', door: 'd',
};

export function roomFromJson(json: RoomJson): RoomData {
  const { id, width, height, rows } = json;
  if (rows.length !== height) {
    throw new Error(`room ${id}: ${rows.length} rows for height ${height}`);
  }
  const tiles: TileKind[] = [];
  const locks: boolean[] = [];
  rows.forEach((row, r) => {
    if (row.length !== width) {
      throw new Error(`room ${id}: row ${r} has ${row.length} glyphs for width ${width}`);
    }
    for (const glyph of row) {
      const kind = KIND_BY_GLYPH[glyph.toLowerCase()];
      if (!kind) throw new Error(`room ${id}: unknown glyph '${glyph}'`);
      tiles.push(kind);
      // doors are never locked; an uppercase D still reads as a plain door
      locks.push(glyph !== glyph.toLowerCase() && kind !== 'door');
    }
  });
  return { id, width, height, tiles, locks };
}

export function roomToJson(room: RoomData): RoomJson {
  const rows: string[] = [];
  for (let r = 0; r < room.height; r++) {
    let row = '';
    for (let c = 0; c < room.width; c++) {
      const i = r * room.width + c;
      const glyph = GLYPH_BY_KIND[room.tiles[i]];
      row += room.locks[i] ? glyph.toUpperCase() : glyph;
    }
    rows.push(row);
  }
  return { id: room.id, width: room.width, height: room.height, rows };
}

export function blankRoom(width: number, height: number, id = 'canvas'): RoomData {
  return {
    id, width, height,
    tiles: new Array<TileKind>(width * height).fill('floor'),
    locks: new Array<boolean>(width * height).fill(false),
  };
}

export function cloneRoom(room: RoomData): RoomData {
  return { ...room, tiles: [...room.tiles], locks: [...room.locks] };
}

export function tileAt(room: RoomData, row: number, col: number): TileKind {
  return room.tiles[row * room.width + col];
}

export function lockedAt(room: RoomData, row: number, col: number): boolean {
  return room.locks[row * room.width + col];
}

// Paints every in-bounds cell, skipping doors; lock=true also pins the tile.
export function paint(room: RoomData, cells: Array<[number, number]>,
                      kind: PaintKind, lock = false): RoomData {
  const next = cloneRoom(room);
  for (const [row, col] of cells) {
    if (row < 0 || row >= room.height || col < 0 || col >= room.width) continue;
    const i = row * room.width + col;
    if (next.tiles[i] === 'door') continue;
    next.tiles[i] = kind;
    if (lock) next.locks[i] = true;
  }
  return next;
}

export function unlock(room: RoomData, cells: Array<[number, number]>): RoomData {
  const next = cloneRoom(room);
  for (const [row, col] of cells) {
    if (row < 0 || row >= room.height || col < 0 || col >= room.width) continue;
    next.locks[row * room.width + col] = false;
  }
  return next;
}

// Square stamp around the stroke center, clipped to the room by paint().
export function brushCells(row: number, col: number, size: number): Array<[number, number]> {
  const reach = Math.max(0, size - 1);
  const cells: Array<[number, number]> = [];
  for (let dr = -reach; dr <= reach; dr++) {
    for (let dc = -reach; dc <= reach; dc++) {
      cells.push([row + dr, col + dc]);
    }
  }
  return cells;
}

export function sameRoom(a: RoomData, b: RoomData): boolean {
  return a.width === b.width && a.height === b.height
    && a.tiles.every((t, i) => t === b.tiles[i])
    && a.locks.every((l, i) => l === b.locks[i]);
}
