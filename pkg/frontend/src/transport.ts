// Browser transport: the service speaks the same line protocol over a
// WebSocket upgrade on its TCP port, one JSON message per text frame.

import type { Transport } from './protocol.js';

export class WebSocketTransport implements Transport {
  private messageHandlers: Array<(line: string) => void> = [];
  private closeHandlers: Array<() => void> = [];

  private constructor(private socket: WebSocket) {
    socket.onmessage = (event) => {
      if (typeof event.data !== 'string') return;
      for (const handler of this.messageHandlers) handler(event.data);
    };
    socket.onclose = () => {
      for (const handler of this.closeHandlers) handler();
    };
  }

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const socket = new WebSocket(url);
      socket.onopen = () => resolve(new WebSocketTransport(socket));
      socket.onerror = () => reject(new Error(`connect failed: ${url}`));
    });
  }

  send(line: string): void {
    this.socket.send(line);
  }

  onMessage(handler: (line: string) => void): void {
    this.messageHandlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    this.socket.close();
  }
}
