import { describe, expect, it } from "vitest";

import {
  commandSchema,
  makePresetCommand,
  makeVelocityCommand,
  parseServerMessage,
} from "../src/protocol.js";
import { makeFrame, makeHello } from "./helpers.js";

describe("protocol", () => {
  it("accepts well-formed server messages", () => {
    expect(parseServerMessage(JSON.stringify(makeHello()))?.type).toBe("hello");
    expect(parseServerMessage(JSON.stringify(makeFrame()))?.type).toBe("state");
    expect(
      parseServerMessage(JSON.stringify({ v: 1, type: "error", message: "x" }))?.type
    ).toBe("error");
  });

  it("rejects malformed frames", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "state" }))).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ ...makeFrame(), v: 2 }))
    ).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ ...makeFrame(), p0: [0, 0] }))
    ).toBeNull();
  });

  it("every outbound command validates against the schema", () => {
    const commands = [
      makeVelocityCommand([0.1, 0, 0]),
      makePresetCommand("line"),
      makePresetCommand(""),
      { v: 1, type: "cmd", kind: "pause" },
      { v: 1, type: "cmd", kind: "resume" },
      { v: 1, type: "cmd", kind: "reset" },
      { v: 1, type: "cmd", kind: "nudge", value: [0, 0.01, 0] },
    ];
    for (const cmd of commands) {
      expect(commandSchema.safeParse(cmd).success).toBe(true);
    }
    expect(
      commandSchema.safeParse({ v: 1, type: "cmd", kind: "velocity", value: [1, 2] })
        .success
    ).toBe(false);
    expect(
      commandSchema.safeParse({ v: 1, type: "cmd", kind: "warp" }).success
    ).toBe(false);
  });
});
