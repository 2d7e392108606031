import * as net from "node:net";

import { LineBuffer, type Transport } from "./client.js";

/** Transport over a TCP socket (`microproof serve --port N`). */
export class TcpTransport implements Transport {
  private lineCb: (line: string) => void = () => {};
  private closeCb: () => void = () => {};

  private constructor(private socket: net.Socket) {
    const lines = new LineBuffer((line) => this.lineCb(line));
    socket.setEncoding("utf-8");
    socket.on("data", (chunk: string) => lines.push(chunk));
    socket.on("close", () => this.closeCb());
  }

  static connect(host: string, port: number): Promise<TcpTransport> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () =>
        resolve(new TcpTransport(socket)),
      );
      socket.on("error", reject);
    });
  }

  send(line: string): void {
    this.socket.write(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.socket.end();
  }
}
