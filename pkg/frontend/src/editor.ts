// Mixed-initiative editor state: an editable target canvas streaming
// debounced updateTarget commands, a live elite suggestion grid keyed by
// the selected dimension pair, and dungeon assembly around it. All engine
// interaction goes through protocol commands; nothing here touches the
// archive directly.

import {
  Bootstrap, CellEntry, CellUpdatesEvent, Descriptor, DungeonJson, ElitesEvent,
  ProtocolClient, SnapshotResponse, Waypoint, sameDescriptors,
} from './protocol.js';
import { PaintKind, RoomData, brushCells, paint, roomFromJson, roomToJson, unlock } from './room.js';

export const DEBOUNCE_MS = 150;

export interface Brush {
  kind: PaintKind;
  size: number;
  lock: boolean;
}

export interface Thumbnail {
  rows: string[];
  fitness: number;
  roomId: string;
}

export type SuggestionGrid = Map<string, Thumbnail | null>;

export function cellKey(cell: number[]): string {
  return cell.join('_');
}

function thumbnail(entry: CellEntry): Thumbnail | null {
  if (!entry.elite) return null;
  return {
    rows: entry.elite.room.rows,
    fitness: entry.elite.fitness,
    roomId: entry.elite.room.id,
  };
}

function emptyGrid(descriptors: Descriptor[]): SuggestionGrid {
  const grid: SuggestionGrid = new Map();
  const fill = (prefix: number[], axis: number) => {
    if (axis === descriptors.length) {
      grid.set(cellKey(prefix), null);
      return;
    }
    for (let i = 0; i < descriptors[axis].granularity; i++) {
      fill([...prefix, i], axis + 1);
    }
  };
  fill([], 0);
  return grid;
}

export class Editor {
  canvas: RoomData;
  brush: Brush = { kind: 'wall', size: 1, lock: false };
  dimensions: Descriptor[] = [];
  grid: SuggestionGrid = new Map();
  dungeon: DungeonJson = { rooms: [], connections: [], initialRoom: null };
  engineRunning = false;
  lastGeneration = 0;
  pathOverlay: Waypoint[] = [];
  onGridChange: (() => void) | null = null;
  onCanvasChange: (() => void) | null = null;

  private dirty = false;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(private client: ProtocolClient) {
    this.canvas = { id: 'canvas', width: 0, height: 0, tiles: [], locks: [] };
    client.onEvent((op, payload) => this.handleEvent(op, payload));
  }

  async connect(): Promise<Bootstrap> {
    const boot: Bootstrap = await this.client.hello();
    this.canvas = roomFromJson(boot.target);
    this.dimensions = boot.descriptors;
    this.dungeon = boot.dungeon;
    this.engineRunning = boot.running;
    this.lastGeneration = boot.generation;
    this.grid = emptyGrid(this.dimensions);
    return boot;
  }

  // -- room selection ----------------------------------------------------

  // The selected dungeon room (doors included) becomes the edit canvas and,
  // once synced, the evolution target.
  selectRoom(roomId: string): RoomData {
    const match = this.dungeon.rooms.find((room) => room.id === roomId);
    if (!match) throw new Error(`no room '${roomId}' in dungeon`);
    this.canvas = roomFromJson(match);
    this.afterEdit();
    return this.canvas;
  }

  // -- painting ---------------------------------------------------------

  paintStroke(row: number, col: number): void {
    const cells = brushCells(row, col, this.brush.size);
    this.canvas = paint(this.canvas, cells, this.brush.kind, this.brush.lock);
    this.afterEdit();
  }

  unlockStroke(row: number, col: number): void {
    this.canvas = unlock(this.canvas, brushCells(row, col, this.brush.size));
    this.afterEdit();
  }

  private afterEdit(): void {
    this.dirty = true;
    this.onCanvasChange?.();
    // edits stay local while the engine is stopped; start() flushes them
    if (this.engineRunning) this.scheduleSync();
  }

  private scheduleSync(): void {
    if (this.debounceTimer !== null) return;
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.flushTarget();
    }, DEBOUNCE_MS);
  }

  async flushTarget(): Promise<void> {
    if (!this.dirty) return;
    this.dirty = false;
    await this.client.request('updateTarget', { room: roomToJson(this.canvas) });
  }

  // -- engine control ----------------------------------------------------

  async start(): Promise<void> {
    await this.flushTarget();
    await this.client.request('start');
    this.engineRunning = true;
  }

  async stop(): Promise<void> {
    await this.client.request('stop');
    this.engineRunning = false;
  }

  async snapshot(): Promise<SnapshotResponse> {
    return await this.client.request('requestSnapshot');
  }

  // -- suggestion grid ----------------------------------------------------

  handleEvent(op: string, payload: any): void {
    if (op === 'elites') this.renderBroadcast(payload as ElitesEvent);
    else if (op === 'cellUpdates') this.renderUpdates(payload as CellUpdatesEvent);
  }

  renderBroadcast(event: ElitesEvent): void {
    if (event.generation <= this.lastGeneration) return;
    if (!sameDescriptors(event.descriptors, this.dimensions)) return;
    this.lastGeneration = event.generation;
    if (event.full) this.grid = emptyGrid(this.dimensions);
    for (const entry of event.cells) {
      this.grid.set(cellKey(entry.cell), thumbnail(entry));
    }
    this.onGridChange?.();
  }

  renderUpdates(event: CellUpdatesEvent): void {
    if (event.generation <= this.lastGeneration) return;
    if (!sameDescriptors(event.descriptors, this.dimensions)) return;
    this.lastGeneration = event.generation;
    for (const entry of event.entries) {
      this.grid.set(cellKey(entry.cell), thumbnail(entry));
    }
    this.onGridChange?.();
  }

  async resync(): Promise<void> {
    const payload: ElitesEvent = await this.client.request('resync');
    this.lastGeneration = Math.min(this.lastGeneration, payload.generation - 1);
    this.renderBroadcast(payload);
  }

  async applySuggestion(cell: number[]): Promise<RoomData> {
    const current = this.grid.get(cellKey(cell));
    if (!current) throw new Error(`cell ${cellKey(cell)} holds no suggestion`);
    const response = await this.client.request('applySuggestion', { cell });
    // full replacement; the service kept the designer's lock mask
    this.canvas = roomFromJson(response.target);
    this.dirty = false;
    this.onCanvasChange?.();
    return this.canvas;
  }

  canApply(cell: number[]): boolean {
    return Boolean(this.grid.get(cellKey(cell)));
  }

  async retargetDimensions(descriptors: Descriptor[]): Promise<void> {
    if (sameDescriptors(descriptors, this.dimensions)) return;
    await this.client.request('setDimensions', { descriptors });
    this.dimensions = descriptors;
    this.grid = emptyGrid(descriptors);
    this.onGridChange?.();
  }

  axisLabel(descriptor: Descriptor): string {
    if (descriptor.kind === 'similarity') {
      return `similarity (vs target '${this.canvas.id}')`;
    }
    return descriptor.kind;
  }

  // -- dungeon assembly ----------------------------------------------------

  async addRoom(room: RoomData): Promise<void> {
    const response = await this.client.request('addRoom', { room: roomToJson(room) });
    this.dungeon = response.dungeon;
  }

  async connectRooms(roomA: string, tileA: [number, number],
                     roomB: string, tileB: [number, number]): Promise<void> {
    const response = await this.client.request('connectRooms', { roomA, tileA, roomB, tileB });
    this.dungeon = response.dungeon;
  }

  async setInitialRoom(roomId: string): Promise<void> {
    const response = await this.client.request('setInitialRoom', { roomId });
    this.dungeon = response.dungeon;
  }

  async checkFeasibility(): Promise<{ feasible: boolean; unreachableRooms: string[] }> {
    return await this.client.request('checkFeasibility');
  }

  async queryPath(start: Waypoint, goal: Waypoint, heuristic: string): Promise<Waypoint[]> {
    const response = await this.client.request('findPath', { start, goal, heuristic });
    this.pathOverlay = response.path;
    return this.pathOverlay;
  }

  clearPathOverlay(): void {
    this.pathOverlay = [];
  }
}
