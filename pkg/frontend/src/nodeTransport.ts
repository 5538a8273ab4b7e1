// Node transport for scripted clients and tests: newline-delimited JSON
// over a plain TCP socket.

import * as net from 'node:net';
import type { Transport } from './protocol.js';

export class TcpTransport implements Transport {
  private messageHandlers: Array<(line: string) => void> = [];
  private closeHandlers: Array<() => void> = [];
  private buffer = '';

  private constructor(private socket: net.Socket) {
    socket.setEncoding('utf-8');
    socket.on('data', (chunk: string) => {
      this.buffer += chunk;
      let cut;
      while ((cut = this.buffer.indexOf('\n')) >= 0) {
        const line = this.buffer.slice(0, cut);
        this.buffer = this.buffer.slice(cut + 1);
        if (!line.trim()) continue;
        for (const handler of this.messageHandlers) handler(line);
      }
    });
    socket.on('close', () => {
      for (const handler of this.closeHandlers) handler();
    });
    socket.on('error', () => socket.destroy());
  }

  static connect(host: string, port: number): Promise<TcpTransport> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port });
      socket.once('connect', () => resolve(new TcpTransport(socket)));
      socket.once('error', reject);
    });
  }

  send(line: string): void {
    this.socket.write(line + '\n');
  }

  onMessage(handler: (line: string) => void): void {
    this.messageHandlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    this.socket.end();
    this.socket.destroy();
  }
}
