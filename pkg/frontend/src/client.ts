import type { Response } from "./protocol.js";

/** A bidirectional line-oriented channel to the server.  Implementations
 * exist for TCP sockets (node) and WebSockets (browser, via a bridge). */
export interface Transport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class RpcError extends Error {}

/** Request/response correlation over a Transport: assigns ids, resolves the
 * matching promise when the response line arrives. */
export class RpcClient {
  private nextId = 1;
  private pending = new Map<
    number,
    { resolve: (r: Record<string, unknown>) => void;
      reject: (e: Error) => void }
  >();

  constructor(private transport: Transport) {
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => this.handleClose());
  }

  request<T>(method: string, params: Record<string, unknown> = {}):
      Promise<T> {
    const id = this.nextId++;
    const line = JSON.stringify({ id, method, params });
    return new Promise<T>((resolve, reject) => {
      this.pending.set(id, {
        resolve: resolve as (r: Record<string, unknown>) => void,
        reject,
      });
      this.transport.send(line + "\n");
    });
  }

  async shutdown(): Promise<void> {
    await this.request("shutdown");
    this.transport.close();
  }

  private handleLine(line: string): void {
    if (!line.trim()) return;
    let response: Response;
    try {
      response = JSON.parse(line) as Response;
    } catch {
      return; // not a protocol line; ignore
    }
    if (response.id === null || response.id === undefined) return;
    const waiter = this.pending.get(response.id);
    if (!waiter) return;
    this.pending.delete(response.id);
    if (response.error) {
      waiter.reject(new RpcError(response.error.message));
    } else {
      waiter.resolve(response.result ?? {});
    }
  }

  private handleClose(): void {
    for (const [, waiter] of this.pending) {
      waiter.reject(new RpcError("connection closed"));
    }
    this.pending.clear();
  }
}

/** Splits a byte/char stream into newline-terminated frames. */
export class LineBuffer {
  private buffer = "";

  constructor(private emit: (line: string) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) break;
      const line = this.buffer.slice(0, nl);
      this.buffer = this.buffer.slice(nl + 1);
      this.emit(line);
    }
  }
}
