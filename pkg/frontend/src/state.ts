/** View-side state: connection status, latest frame, command state.
 *
 * The UI only ever renders the newest frame; anything older is discarded
 * and counted, never queued.
 */

import type { Hello, StateFrame } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export class FrameSlot {
  private frame: StateFrame | null = null;
  dropped = 0;
  received = 0;

  push(frame: StateFrame): void {
    if (this.frame !== null) {
      this.dropped += 1;
    }
    // stale frames (out-of-order ticks) are discarded outright
    if (this.frame !== null && frame.tick <= this.frame.tick) {
      return;
    }
    this.frame = frame;
    this.received += 1;
  }

  /** Take the newest frame, leaving the slot empty. */
  take(): StateFrame | null {
    const f = this.frame;
    this.frame = null;
    return f;
  }

  peek(): StateFrame | null {
    return this.frame;
  }

  get backlog(): number {
    return this.frame === null ? 0 : 1;
  }
}

export class ViewState {
  status: ConnectionStatus = "connecting";
  hello: Hello | null = null;
  latest: StateFrame | null = null;
  selectedPreset = "";
  errorCount = 0;
  topDown = true;

  get commandsEnabled(): boolean {
    return this.status === "connected";
  }

  applyFrame(frame: StateFrame): void {
    this.latest = frame;
  }
}
