import { ChildProcess, spawn } from 'node:child_process';
import type { Transport } from '../src/protocol.js';

// Transport double: captures outgoing lines and answers them from a table,
// so editor logic runs without a socket.
export class FakeTransport implements Transport {
  sent: string[] = [];
  replies: Record<string, (payload: any) => object> = {};
  private messageHandlers: Array<(line: string) => void> = [];
  private closeHandlers: Array<() => void> = [];

  send(line: string): void {
    this.sent.push(line);
    const request = JSON.parse(line);
    const reply = this.replies[request.op];
    if (reply) {
      this.inject({
        kind: 'response', op: request.op, seq: request.seq,
        payload: reply(request.payload),
      });
    }
  }

  onMessage(handler: (line: string) => void): void {
    this.messageHandlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    for (const handler of this.closeHandlers) handler();
  }

  inject(message: object): void {
    const line = JSON.stringify(message);
    for (const handler of this.messageHandlers) handler(line);
  }

  sentOps(): string[] {
    return this.sent.map((line) => JSON.parse(line).op);
  }

  sentPayloads(op: string): any[] {
    return this.sent.map((line) => JSON.parse(line))
      .filter((message) => message.op === op)
      .map((message) => message.payload);
  }
}

export interface Service {
  port: number;
  proc: ChildProcess;
}

// Spawns the real session service and resolves once it prints its port.
export function startService(args: string[] = []): Promise<Service> {
  return new Promise((resolve, reject) => {
    const proc = spawn('python3', ['-m', 'edd.cli', 'serve', '--port', '0', ...args]);
    let out = '';
    let err = '';
    proc.stdout!.on('data', (chunk: Buffer) => {
      out += chunk.toString();
      const match = out.match(/listening [\d.]+:(\d+)/);
      if (match) resolve({ port: Number(match[1]), proc });
    });
    proc.stderr!.on('data', (chunk: Buffer) => {
      err += chunk.toString();
    });
    proc.on('exit', (code) => reject(new Error(`service exited ${code}: ${err || out}`)));
    proc.on('error', reject);
  });
}

export function stopService(service: Service): void {
  service.proc.kill('SIGTERM');
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
