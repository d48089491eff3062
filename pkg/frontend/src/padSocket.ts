// WebSocket client for the recognition service.
//
// Frames sent while the connection is down wait in a small buffer and are
// flushed on reconnect; a buffered frame older than one second is dropped.
// The socket object is injected so tests (and the node e2e harness) can
// supply their own implementation.

import {
  ClientFrame,
  PredictionMessage,
  parseServerMessage,
} from "./protocol";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type ConnectionState = "connecting" | "open" | "reconnecting" | "closed";

export interface PadSocketOptions {
  url: string;
  makeSocket?: (url: string) => SocketLike;
  now?: () => number;
  setTimeout?: (fn: () => void, ms: number) => unknown;
  clearTimeout?: (handle: unknown) => void;
  reconnectDelayMs?: number;
  bufferWindowMs?: number;
  bufferCapacity?: number;
}

const defaultMakeSocket = (url: string): SocketLike =>
  new WebSocket(url) as unknown as SocketLike;

interface BufferedFrame {
  wall: number;
  frame: ClientFrame;
}

export class PadSocket {
  onPrediction: ((msg: PredictionMessage) => void) | null = null;
  onActive: ((active: boolean) => void) | null = null;
  onConnection: ((state: ConnectionState) => void) | null = null;

  private readonly url: string;
  private readonly makeSocket: (url: string) => SocketLike;
  private readonly now: () => number;
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
  private readonly clearTimeoutFn: (handle: unknown) => void;
  private readonly reconnectDelayMs: number;
  private readonly bufferWindowMs: number;
  private readonly bufferCapacity: number;

  private socket: SocketLike | null = null;
  private buffer: BufferedFrame[] = [];
  private reconnectHandle: unknown = null;
  private closed = false;
  state: ConnectionState = "closed";

  constructor(options: PadSocketOptions) {
    this.url = options.url;
    this.makeSocket = options.makeSocket ?? defaultMakeSocket;
    this.now = options.now ?? (() => Date.now());
    this.setTimeoutFn = options.setTimeout ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimeoutFn =
      options.clearTimeout ??
      ((handle) => clearTimeout(handle as ReturnType<typeof setTimeout>));
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
    this.bufferWindowMs = options.bufferWindowMs ?? 1000;
    this.bufferCapacity = options.bufferCapacity ?? 15;
  }

  connect(): void {
    this.closed = false;
    this.openSocket("connecting");
  }

  close(): void {
    this.closed = true;
    if (this.reconnectHandle !== null) {
      this.clearTimeoutFn(this.reconnectHandle);
      this.reconnectHandle = null;
    }
    const socket = this.socket;
    this.socket = null;
    if (socket) {
      socket.onclose = null;
      socket.onerror = null;
      socket.close();
    }
    this.setState("closed");
  }

  sendFrame(frame: ClientFrame): void {
    if (this.state === "open" && this.socket) {
      try {
        this.socket.send(JSON.stringify(frame));
        return;
      } catch {
        // fall through to buffering; the close handler drives reconnect
      }
    }
    this.buffer.push({ wall: this.now(), frame });
    this.pruneBuffer();
  }

  get bufferedFrames(): number {
    return this.buffer.length;
  }

  private openSocket(entryState: ConnectionState): void {
    this.setState(entryState);
    let socket: SocketLike;
    try {
      socket = this.makeSocket(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.setState("open");
      this.flushBuffer();
    };
    socket.onmessage = (event) => {
      if (typeof event.data !== "string") return;
      const msg = parseServerMessage(event.data);
      if (!msg) return;
      if (msg.type === "prediction") this.onPrediction?.(msg);
      else this.onActive?.(msg.active);
    };
    socket.onclose = () => this.handleDrop();
    socket.onerror = () => this.handleDrop();
  }

  private handleDrop(): void {
    if (this.socket) {
      this.socket.onopen = null;
      this.socket.onmessage = null;
      this.socket.onclose = null;
      this.socket.onerror = null;
      this.socket = null;
    }
    if (!this.closed) this.scheduleReconnect();
  }

  private scheduleReconnect(): void {
    if (this.closed || this.reconnectHandle !== null) return;
    this.setState("reconnecting");
    this.reconnectHandle = this.setTimeoutFn(() => {
      this.reconnectHandle = null;
      if (!this.closed) this.openSocket("reconnecting");
    }, this.reconnectDelayMs);
  }

  private pruneBuffer(): void {
    const cutoff = this.now() - this.bufferWindowMs;
    while (
      this.buffer.length > 0 &&
      (this.buffer.length > this.bufferCapacity || this.buffer[0]!.wall < cutoff)
    ) {
      this.buffer.shift();
    }
  }

  private flushBuffer(): void {
    this.pruneBuffer();
    const pending = this.buffer;
    this.buffer = [];
    for (let i = 0; i < pending.length; i++) {
      if (this.state !== "open" || !this.socket) {
        this.buffer.push(...pending.slice(i));
        break;
      }
      try {
        this.socket.send(JSON.stringify(pending[i]!.frame));
      } catch {
        this.buffer.push(pending[i]!);
      }
    }
  }

  private setState(state: ConnectionState): void {
    if (state === this.state) return;
    this.state = state;
    this.onConnection?.(state);
  }
}
