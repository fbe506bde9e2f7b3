/** Wire protocol shared with the teleop service (JSON text frames, v = 1). */

import { z } from "zod";

export const PROTOCOL_VERSION = 1;

const vec3 = z.tuple([z.number(), z.number(), z.number()]);

export const helloSchema = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("hello"),
  presets: z.array(z.string()),
  n_robots: z.number().int().positive(),
  safety_radius: z.array(z.number().positive()),
  cable_length: z.array(z.number().positive()),
  vel_max: z.number().positive(),
  obstacles: z.array(z.record(z.unknown())),
});

export const stateSchema = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("state"),
  tick: z.number().int().nonnegative(),
  t: z.number(),
  p0: z.array(z.number()).length(3),
  v0: z.array(z.number()).length(3),
  R0: z.array(z.number()).length(9),
  robots: z.array(z.array(z.number()).length(3)),
  q: z.array(z.array(z.number()).length(3)),
  mu: z.array(z.array(z.number()).length(3)),
  halfspaces: z.array(
    z.object({ robot: z.number().int(), n: z.array(z.number()).length(3), a: z.number() })
  ),
  min_dist: z.number(),
  ref: z.array(z.number()).length(3),
  preset: z.string(),
  paused: z.boolean(),
  obstacles: z.array(z.record(z.unknown())),
});

export const errorSchema = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("error"),
  message: z.string(),
});

export const serverMessage = z.discriminatedUnion("type", [
  helloSchema,
  stateSchema,
  errorSchema,
]);

const velocityCmd = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("cmd"),
  kind: z.literal("velocity"),
  value: vec3,
});
const nudgeCmd = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("cmd"),
  kind: z.literal("nudge"),
  value: vec3,
});
const presetCmd = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("cmd"),
  kind: z.literal("preset"),
  value: z.string(),
});
const bareCmd = z.object({
  v: z.literal(PROTOCOL_VERSION),
  type: z.literal("cmd"),
  kind: z.enum(["pause", "resume", "reset"]),
});

export const commandSchema = z.union([velocityCmd, nudgeCmd, presetCmd, bareCmd]);

export type Hello = z.infer<typeof helloSchema>;
export type StateFrame = z.infer<typeof stateSchema>;
export type ErrorFrame = z.infer<typeof errorSchema>;
export type ServerMessage = z.infer<typeof serverMessage>;
export type Command = z.infer<typeof commandSchema>;

export function makeVelocityCommand(v: [number, number, number]): Command {
  return { v: PROTOCOL_VERSION, type: "cmd", kind: "velocity", value: v };
}

export function makePresetCommand(name: string): Command {
  return { v: PROTOCOL_VERSION, type: "cmd", kind: "preset", value: name };
}

/** Parse an inbound message; returns null when malformed (caller counts it). */
export function parseServerMessage(raw: string): ServerMessage | null {
  try {
    const data = JSON.parse(raw);
    const result = serverMessage.safeParse(data);
    return result.success ? result.data : null;
  } catch {
    return null;
  }
}
