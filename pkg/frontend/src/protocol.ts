// Session protocol: newline-delimited JSON messages, one per line/frame.
// Requests carry a client seq echoed by the response; events arrive on
// their own. The client speaks first with a hello carrying its schema.

import type { RoomJson } from './room.js';

export const SCHEMA_VERSION = '1';

export type DimensionName =
  'symmetry' | 'similarity' | 'meso-patterns' | 'spatial-patterns' | 'linearity';

export interface Descriptor {
  kind: DimensionName;
  granularity: number;
}

export interface EliteJson {
  room: RoomJson;
  fitness: number;
  feasible: boolean;
  dims: number[];
}

export interface CellEntry {
  cell: number[];
  elite: EliteJson | null;
}

export interface ElitesEvent {
  generation: number;
  descriptors: Descriptor[];
  full: boolean;
  cells: CellEntry[];
}

export interface CellUpdatesEvent {
  generation: number;
  descriptors: Descriptor[];
  entries: CellEntry[];
}

export interface ConnectionJson {
  roomA: string;
  tileA: [number, number];
  roomB: string;
  tileB: [number, number];
}

export interface DungeonJson {
  rooms: RoomJson[];
  connections: ConnectionJson[];
  initialRoom: string | null;
}

export interface Waypoint {
  roomId: string;
  tile: [number, number];
}

export interface Bootstrap {
  schema: string;
  generation: number;
  running: boolean;
  target: RoomJson;
  descriptors: Descriptor[];
  dungeon: DungeonJson;
}

export interface SnapshotResponse {
  generation: number;
  target: RoomJson;
  descriptors: Descriptor[];
  cells: Array<{ cell: number[]; feasible: EliteJson[]; infeasible: EliteJson[] }>;
}

export interface Transport {
  send(line: string): void;
  onMessage(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export class ProtocolError extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
    this.name = 'ProtocolError';
  }
}

interface Pending {
  op: string;
  resolve: (payload: any) => void;
  reject: (err: Error) => void;
}

export type EventHandler = (op: string, payload: any) => void;

export class ProtocolClient {
  private seq = 0;
  private pending = new Map<number, Pending>();
  private eventHandlers: EventHandler[] = [];
  private closed = false;

  constructor(private transport: Transport) {
    transport.onMessage((line) => this.dispatch(line));
    transport.onClose(() => this.failAll(new ProtocolError('closed', 'connection closed')));
  }

  hello(): Promise<Bootstrap> {
    return this.request('hello', { schema: SCHEMA_VERSION });
  }

  request(op: string, payload: object = {}): Promise<any> {
    if (this.closed) return Promise.reject(new ProtocolError('closed', 'connection closed'));
    const seq = ++this.seq;
    const line = JSON.stringify({ kind: 'request', op, seq, payload });
    return new Promise((resolve, reject) => {
      this.pending.set(seq, { op, resolve, reject });
      this.transport.send(line);
    });
  }

  onEvent(handler: EventHandler): void {
    this.eventHandlers.push(handler);
  }

  close(): void {
    this.closed = true;
    this.transport.close();
  }

  private dispatch(line: string): void {
    let message: any;
    try {
      message = JSON.parse(line);
    } catch {
      return;
    }
    if (!message || typeof message !== 'object') return;
    if (message.kind === 'event') {
      for (const handler of this.eventHandlers) handler(message.op, message.payload);
      return;
    }
    if (message.kind !== 'response') return;
    const waiting = this.pending.get(message.seq);
    if (!waiting || waiting.op !== message.op) return;
    this.pending.delete(message.seq);
    const payload = message.payload ?? {};
    if (payload.error) {
      waiting.reject(new ProtocolError(payload.error.code, payload.error.message));
    } else {
      waiting.resolve(payload);
    }
  }

  private failAll(err: Error): void {
    this.closed = true;
    const waiting = [...this.pending.values()];
    this.pending.clear();
    for (const entry of waiting) entry.reject(err);
  }
}

export function sameDescriptors(a: Descriptor[], b: Descriptor[]): boolean {
  return a.length === b.length
    && a.every((d, i) => d.kind === b[i].kind && d.granularity === b[i].granularity);
}
