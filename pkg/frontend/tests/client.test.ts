import { describe, expect, it } from "vitest";

import { TeleopClient } from "../src/client.js";
import { CommandInput } from "../src/input.js";
import { makePresetCommand, makeVelocityCommand } from "../src/protocol.js";
import { FakeSocket, makeFrame, makeHello } from "./helpers.js";

function connectedClient() {
  const sockets: FakeSocket[] = [];
  const pending: Array<() => void> = [];
  const client = new TeleopClient(
    "ws://test",
    () => {
      const s = new FakeSocket();
      sockets.push(s);
      return s;
    },
    { setTimeoutFn: (fn) => pending.push(fn) }
  );
  client.connect();
  sockets[0].serverOpen();
  return { client, sockets, pending };
}

describe("teleop client", () => {
  it("handshake populates presets", () => {
    const { client, sockets } = connectedClient();
    sockets[0].serverSend(makeHello());
    expect(client.view.hello?.presets).toEqual(["line", "triangle"]);
    expect(client.view.commandsEnabled).toBe(true);
  });

  it("malformed frames are dropped and counted; good frames flow", () => {
    const { client, sockets } = connectedClient();
    sockets[0].serverSend("garbage");
    sockets[0].serverSend({ type: "state" });
    expect(client.view.errorCount).toBe(2);
    sockets[0].serverSend(makeFrame({ tick: 5 }));
    expect(client.frames.peek()?.tick).toBe(5);
  });

  it("commands suppressed while disconnected; reconnect with backoff", () => {
    const { client, sockets, pending } = connectedClient();
    expect(client.sendCommand(makeVelocityCommand([0.1, 0, 0]))).toBe(true);
    sockets[0].serverDrop();
    expect(client.view.status).toBe("disconnected");
    expect(client.sendCommand(makeVelocityCommand([0.1, 0, 0]))).toBe(false);
    expect(pending).toHaveLength(1);
    pending[0]();  // scheduled reconnect
    expect(sockets).toHaveLength(2);
    sockets[1].serverOpen();
    expect(client.view.status).toBe("connected");
    expect(client.sendCommand(makePresetCommand("line"))).toBe(true);
    const sent = JSON.parse(sockets[1].sent.at(-1)!);
    expect(sent).toEqual({ v: 1, type: "cmd", kind: "preset", value: "line" });
  });

  it("rejects schema-invalid outbound commands", () => {
    const { client } = connectedClient();
    const bad = { v: 1, type: "cmd", kind: "velocity", value: [1, 2] };
    expect(client.sendCommand(bad as never)).toBe(false);
  });
});

describe("command input", () => {
  it("maps held keys to clamped velocity", () => {
    const input = new CommandInput(0.5);
    expect(input.vector()).toEqual([0, 0, 0]);
    input.keyDown("w");
    expect(input.vector()[0]).toBeCloseTo(0.5);
    input.keyDown("a");
    const v = input.vector();
    expect(Math.hypot(v[0], v[1], v[2])).toBeCloseTo(0.5); // clamped
    input.keyUp("w");
    input.keyUp("a");
    input.keyDown("f");
    expect(input.vector()[2]).toBeCloseTo(-0.5);
  });

  it("idle input produces a zero-velocity heartbeat payload", () => {
    const input = new CommandInput(0.5);
    expect(input.idle).toBe(true);
    expect(makeVelocityCommand(input.vector()).value).toEqual([0, 0, 0]);
  });
});
