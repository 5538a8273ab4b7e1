// Canvas rendering and DOM wiring. All state lives in Editor; this layer
// only draws it and translates pointer/form input into Editor calls.

import { Editor, Thumbnail, cellKey } from './editor.js';
import type { Descriptor, DimensionName } from './protocol.js';
import { RoomData, lockedAt, tileAt } from './room.js';

const TILE_COLORS: Record<string, string> = {
  floor: '#e8e0cf',
  wall: '#4a4a55',
  enemy: '#c0392b',
  treasure: '#e1b644',
  door: '#8a5a2b',
};

const DIMENSION_NAMES: DimensionName[] = [
  'symmetry', 'similarity', 'meso-patterns', 'spatial-patterns', 'linearity',
];

export function drawRoom(ctx: CanvasRenderingContext2D, room: RoomData,
                         tileSize: number): void {
  for (let r = 0; r < room.height; r++) {
    for (let c = 0; c < room.width; c++) {
      ctx.fillStyle = TILE_COLORS[tileAt(room, r, c)];
      ctx.fillRect(c * tileSize, r * tileSize, tileSize, tileSize);
      if (lockedAt(room, r, c)) {
        ctx.strokeStyle = '#1b6ca8';
        ctx.lineWidth = 2;
        ctx.strokeRect(c * tileSize + 1, r * tileSize + 1, tileSize - 2, tileSize - 2);
      }
    }
  }
  ctx.strokeStyle = '#00000022';
  ctx.lineWidth = 1;
  for (let r = 0; r <= room.height; r++) {
    ctx.beginPath();
    ctx.moveTo(0, r * tileSize);
    ctx.lineTo(room.width * tileSize, r * tileSize);
    ctx.stroke();
  }
  for (let c = 0; c <= room.width; c++) {
    ctx.beginPath();
    ctx.moveTo(c * tileSize, 0);
    ctx.lineTo(c * tileSize, room.height * tileSize);
    ctx.stroke();
  }
}

function drawThumbnailRows(ctx: CanvasRenderingContext2D, rows: string[],
                           tileSize: number): void {
  rows.forEach((row, r) => {
    [...row].forEach((glyph, c) => {
      const kind = { f: 'floor', w: 'wall', e: 'enemy', t: 'treasure', d: 'door' }[
        glyph.toLowerCase() as 'f' | 'w' | 'e' | 't' | 'd'];
      ctx.fillStyle = TILE_COLORS[kind ?? 'floor'];
      ctx.fillRect(c * tileSize, r * tileSize, tileSize, tileSize);
      if (glyph !== glyph.toLowerCase() && glyph !== 'D') {
        ctx.strokeStyle = '#1b6ca8';
        ctx.strokeRect(c * tileSize, r * tileSize, tileSize, tileSize);
      }
    });
  });
}

export class EditorApp {
  private canvasEl: HTMLCanvasElement;
  private gridEl: HTMLElement;
  private statusEl: HTMLElement;
  private painting = false;
  private tileSize = 32;

  constructor(private editor: Editor, root: HTMLElement) {
    this.canvasEl = root.querySelector('#room-canvas') as HTMLCanvasElement;
    this.gridEl = root.querySelector('#suggestion-grid') as HTMLElement;
    this.statusEl = root.querySelector('#status') as HTMLElement;
    editor.onCanvasChange = () => this.renderCanvas();
    editor.onGridChange = () => this.renderGrid();
    this.wireCanvas();
    this.wireControls(root);
  }

  renderAll(): void {
    this.renderCanvas();
    this.renderGrid();
  }

  private wireCanvas(): void {
    const strokeAt = (event: MouseEvent) => {
      const bounds = this.canvasEl.getBoundingClientRect();
      const col = Math.floor((event.clientX - bounds.left) / this.tileSize);
      const row = Math.floor((event.clientY - bounds.top) / this.tileSize);
      this.editor.paintStroke(row, col);
    };
    this.canvasEl.addEventListener('mousedown', (event) => {
      this.painting = true;
      strokeAt(event);
    });
    this.canvasEl.addEventListener('mousemove', (event) => {
      if (this.painting) strokeAt(event);
    });
    window.addEventListener('mouseup', () => {
      this.painting = false;
    });
  }

  private wireControls(root: HTMLElement): void {
    root.querySelector('#btn-start')?.addEventListener('click', () => {
      void this.editor.start().then(() => this.setStatus('running'));
    });
    root.querySelector('#btn-stop')?.addEventListener('click', () => {
      void this.editor.stop().then(() => this.setStatus('stopped'));
    });
    for (const kind of ['floor', 'wall', 'enemy', 'treasure'] as const) {
      root.querySelector(`#brush-${kind}`)?.addEventListener('click', () => {
        this.editor.brush.kind = kind;
      });
    }
    (root.querySelector('#brush-lock') as HTMLInputElement | null)
      ?.addEventListener('change', (event) => {
        this.editor.brush.lock = (event.target as HTMLInputElement).checked;
      });
    root.querySelector('#btn-retarget')?.addEventListener('click', () => {
      const pick = (id: string): Descriptor => {
        const kindEl = root.querySelector(`#${id}-kind`) as HTMLSelectElement;
        const grainEl = root.querySelector(`#${id}-grain`) as HTMLInputElement;
        return {
          kind: DIMENSION_NAMES[kindEl.selectedIndex],
          granularity: Number(grainEl.value) || 5,
        };
      };
      void this.editor.retargetDimensions([pick('dim-x'), pick('dim-y')])
        .then(() => this.renderGrid());
    });
  }

  private renderCanvas(): void {
    const room = this.editor.canvas;
    this.canvasEl.width = room.width * this.tileSize;
    this.canvasEl.height = room.height * this.tileSize;
    const ctx = this.canvasEl.getContext('2d');
    if (ctx) drawRoom(ctx, room, this.tileSize);
  }

  private renderGrid(): void {
    this.gridEl.innerHTML = '';
    const [x, y] = this.editor.dimensions;
    if (!x || !y) return;
    this.gridEl.style.gridTemplateColumns = `repeat(${x.granularity}, auto)`;
    // row-major over the pair; hole cells render as empty slots
    for (let j = y.granularity - 1; j >= 0; j--) {
      for (let i = 0; i < x.granularity; i++) {
        this.gridEl.appendChild(this.thumbnailCell([i, j]));
      }
    }
  }

  private thumbnailCell(cell: number[]): HTMLElement {
    const slot = document.createElement('div');
    slot.className = 'cell';
    const thumb = this.editor.grid.get(cellKey(cell));
    if (!thumb) {
      slot.classList.add('empty');
      return slot;
    }
    slot.appendChild(this.thumbnailCanvas(thumb));
    const badge = document.createElement('span');
    badge.className = 'fitness';
    badge.textContent = thumb.fitness.toFixed(3);
    slot.appendChild(badge);
    slot.addEventListener('click', () => {
      void this.editor.applySuggestion(cell).then(() => {
        this.setStatus(`applied ${thumb.roomId} from cell ${cellKey(cell)}`);
      });
    });
    return slot;
  }

  private thumbnailCanvas(thumb: Thumbnail): HTMLCanvasElement {
    const size = 6;
    const canvas = document.createElement('canvas');
    canvas.width = thumb.rows[0].length * size;
    canvas.height = thumb.rows.length * size;
    const ctx = canvas.getContext('2d');
    if (ctx) drawThumbnailRows(ctx, thumb.rows, size);
    return canvas;
  }

  private setStatus(text: string): void {
    this.statusEl.textContent = text;
  }
}
