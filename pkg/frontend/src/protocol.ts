/** NDJSON protocol client over a local TCP socket.
 *
 * The service processes requests strictly in order and answers each with
 * exactly one line, so the client keeps at most one request in flight and
 * queues the rest.
 */

import * as net from "node:net";
import type { Request, Response } from "./types.js";

interface Pending {
  resolve: (r: Response) => void;
  reject: (e: Error) => void;
}

export class ProtocolClient {
  private buffer = "";
  private pending: Pending[] = [];
  private closed = false;

  private constructor(private socket: net.Socket) {
    socket.on("data", (chunk) => this.onData(chunk));
    socket.on("error", (err) => this.failAll(err));
    socket.on("close", () => this.failAll(new Error("connection closed")));
  }

  static connect(port: number, host = "127.0.0.1"): Promise<ProtocolClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ port, host }, () => {
        socket.off("error", reject);
        resolve(new ProtocolClient(socket));
      });
      socket.once("error", reject);
    });
  }

  private onData(chunk: Buffer) {
    this.buffer += chunk.toString("utf-8");
    let nl;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl);
      this.buffer = this.buffer.slice(nl + 1);
      const waiter = this.pending.shift();
      if (!waiter) continue; // unsolicited line; protocol violation, drop
      try {
        waiter.resolve(JSON.parse(line) as Response);
      } catch (e) {
        waiter.reject(e as Error);
      }
    }
  }

  private failAll(err: Error) {
    if (this.closed) return;
    this.closed = true;
    for (const waiter of this.pending.splice(0)) waiter.reject(err);
  }

  request(msg: Request): Promise<Response> {
    if (this.closed) return Promise.reject(new Error("client closed"));
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.socket.write(JSON.stringify(msg) + "\n");
    });
  }

  close() {
    this.closed = true;
    this.socket.end();
    this.socket.destroy();
  }
}
