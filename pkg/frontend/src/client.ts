/** WebSocket session: handshake, reconnect with backoff, command heartbeat.
 *
 * The socket factory is injectable so tests can run against a fake. All
 * outbound messages are validated against the command schema before they
 * are sent; commands are suppressed while disconnected.
 */

import {
  Command,
  commandSchema,
  Hello,
  parseServerMessage,
  StateFrame,
} from "./protocol.js";
import { FrameSlot, ViewState } from "./state.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
}

export class TeleopClient {
  view = new ViewState();
  frames = new FrameSlot();
  onHello: ((hello: Hello) => void) | null = null;
  onFrame: ((frame: StateFrame) => void) | null = null;
  private socket: SocketLike | null = null;
  private backoffMs: number;
  private readonly baseMs: number;
  private readonly maxMs: number;
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
  private closed = false;

  constructor(
    private url: string,
    private factory: SocketFactory,
    opts: ClientOptions = {}
  ) {
    this.baseMs = opts.reconnectBaseMs ?? 500;
    this.maxMs = opts.reconnectMaxMs ?? 8000;
    this.backoffMs = this.baseMs;
    this.setTimeoutFn = opts.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
  }

  connect(): void {
    this.view.status = "connecting";
    const ws = this.factory(this.url);
    this.socket = ws;
    ws.onopen = () => {
      this.view.status = "connected";
      this.backoffMs = this.baseMs;
    };
    ws.onmessage = (ev) => this.handleMessage(ev.data);
    ws.onerror = () => {
      // the close handler owns reconnection
    };
    ws.onclose = () => {
      this.view.status = "disconnected";
      this.socket = null;
      if (!this.closed) {
        this.setTimeoutFn(() => this.connect(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, this.maxMs);
      }
    };
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }

  handleMessage(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.view.errorCount += 1;
      return;
    }
    if (msg.type === "hello") {
      this.view.hello = msg;
      this.onHello?.(msg);
    } else if (msg.type === "state") {
      this.frames.push(msg);
      this.onFrame?.(msg);
    } else {
      this.view.errorCount += 1;
    }
  }

  /** Validate and send; returns false when suppressed or invalid. */
  sendCommand(cmd: Command): boolean {
    if (!this.view.commandsEnabled || this.socket === null) {
      return false;
    }
    const checked = commandSchema.safeParse(cmd);
    if (!checked.success) {
      return false;
    }
    this.socket.send(JSON.stringify(checked.data));
    return true;
  }
}
