"""Teleoperation service: streams simulation state over a WebSocket and
accepts payload velocity/position commands and formation-preset switches.

One session owner advances the simulation paced to the wall clock; each
client gets a latest-frame sender (frames are dropped, never queued) and a
reader that applies the newest command at the next control tick. Message
schema (JSON text frames, schema field "v" = 1):

  server -> client:
    {"v":1,"type":"hello","presets":[...],"n_robots":n,"rate_hz":r, ...}
    {"v":1,"type":"state","tick":..,"t":..,"p0":[..],"robots":[[..]..], ...}
    {"v":1,"type":"error","message":".."}
  client -> server:
    {"v":1,"type":"cmd","kind":"velocity","value":[vx,vy,vz]}
    {"v":1,"type":"cmd","kind":"nudge","value":[dx,dy,dz]}
    {"v":1,"type":"cmd","kind":"preset","value":"line"}   ("" reverts)
    {"v":1,"type":"cmd","kind":"pause"} / {"kind":"resume"} / {"kind":"reset"}

Loss of the command stream (disconnect) reverts to a zero-velocity hold.
"""

import asyncio
import json

import numpy as np

from .errors import PayliftError
from .harness import ClosedLoop
from .presets import preset_names
from .trajectory import CommandSmoother

PROTOCOL_VERSION = 1


def _vec(value, size=3):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"expected finite vector of length {size}")
    return arr


class TeleopSession:
    """Simulation + smoother + command handling, transport-agnostic."""

    def __init__(self, scenario):
        if scenario.trajectory.kind != "teleop":
            raise PayliftError("teleop service needs a teleop scenario")
        self.scenario = scenario
        self.vel_max = scenario.trajectory.vel_max
        self.accel_max = scenario.trajectory.accel_max
        self.presets = preset_names(len(scenario.quads))
        self.paused = False
        self._build()

    def _build(self):
        self.loop = ClosedLoop(self.scenario)
        self.control_dt = self.scenario.sim.dt * self.scenario.sim.control_divisor
        self.smoother = CommandSmoother(
            np.asarray(self.scenario.trajectory.center, dtype=float),
            self.control_dt, vel_max=self.vel_max, accel_max=self.accel_max,
        )

    def apply_command(self, kind, value=None):
        """Apply one command; takes effect at the next control tick."""
        if kind == "velocity":
            self.smoother.set_velocity(_vec(value))
        elif kind == "nudge":
            self.smoother.nudge(_vec(value))
        elif kind == "preset":
            name = str(value or "")
            if name and name not in self.presets:
                raise ValueError(f"unknown preset {name!r}")
            self.loop.set_preset(name)
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        elif kind == "reset":
            self._build()
            self.paused = False
        else:
            raise ValueError(f"unknown command kind {kind!r}")

    def hold(self):
        self.smoother.hold()

    def tick(self):
        """Advance one control period (no-op while paused)."""
        if self.paused:
            return
        ref = self.smoother.step()
        self.loop.control_tick(ref)
        self.loop.sim_steps()

    def state_frame(self):
        loop = self.loop
        state = loop.state
        from .state import all_quad_positions

        positions = all_quad_positions(state, loop.quads)
        halfspaces = [
            {"robot": int(r), "n": h.n.tolist(), "a": float(h.a)}
            for r, h in getattr(loop.allocator, "last_halfspaces", [])
        ]
        return {
            "v": PROTOCOL_VERSION,
            "type": "state",
            "tick": loop.tick,
            "t": loop.t,
            "p0": state.p0.tolist(),
            "v0": state.v0.tolist(),
            "R0": state.R0.reshape(-1).tolist(),
            "robots": positions.tolist(),
            "q": state.q.tolist(),
            "mu": loop.forces.mu.tolist(),
            "halfspaces": halfspaces,
            "min_dist": loop.min_distance(),
            "ref": self.smoother.p.tolist(),
            "preset": loop.active_preset,
            "paused": self.paused,
            "obstacles": self.scenario.obstacles,
        }

    def hello_frame(self):
        return {
            "v": PROTOCOL_VERSION,
            "type": "hello",
            "presets": self.presets,
            "n_robots": len(self.scenario.quads),
            "safety_radius": [q.safety_radius for q in self.scenario.quads],
            "cable_length": [q.cable_length for q in self.scenario.quads],
            "vel_max": self.vel_max,
            "obstacles": self.scenario.obstacles,
        }


class TeleopServer:
    def __init__(self, scenario, port=8765, rate_hz=30.0, speed=1.0):
        self.session = TeleopSession(scenario)
        self.port = port
        self.rate_hz = rate_hz
        self.speed = speed
        self._clients = set()
        self._frame_event = asyncio.Event()
        self._latest_frame = None
        self._stop = asyncio.Event()

    async def _sim_task(self):
        session = self.session
        control_dt = session.control_dt
        frame_every = max(1, round(1.0 / (self.rate_hz * control_dt)))
        loop = asyncio.get_running_loop()
        next_time = loop.time()
        k = 0
        while not self._stop.is_set():
            session.tick()
            k += 1
            if k % frame_every == 0:
                self._latest_frame = json.dumps(session.state_frame())
                self._frame_event.set()
            next_time += control_dt / self.speed
            delay = next_time - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_time = loop.time()  # fell behind; never queue catch-up
                await asyncio.sleep(0)  # still yield to the network tasks

    async def _sender(self, ws):
        while True:
            await self._frame_event.wait()
            self._frame_event.clear()
            frame = self._latest_frame
            if frame is not None:
                await ws.send(frame)

    async def _handler(self, ws):
        self._clients.add(ws)
        try:
            await ws.send(json.dumps(self.session.hello_frame()))
            sender = asyncio.create_task(self._sender(ws))
            try:
                async for raw in ws:
                    try:
                        msg = json.loads(raw)
                        if msg.get("type") != "cmd":
                            raise ValueError("expected a cmd message")
                        self.session.apply_command(msg.get("kind"), msg.get("value"))
                    except (ValueError, TypeError, KeyError) as exc:
                        await ws.send(json.dumps({
                            "v": PROTOCOL_VERSION, "type": "error",
                            "message": str(exc),
                        }))
            finally:
                sender.cancel()
        finally:
            self._clients.discard(ws)
            if not self._clients:
                self.session.hold()  # zero-velocity safety default

    async def serve_forever(self):
        import websockets

        async with websockets.serve(self._handler, "0.0.0.0", self.port):
            sim = asyncio.create_task(self._sim_task())
            try:
                await self._stop.wait()
            finally:
                sim.cancel()

    def stop(self):
        self._stop.set()


def serve(scenario, port=8765, rate_hz=30.0, speed=1.0):
    """Run a teleop session until interrupted."""
    server = TeleopServer(scenario, port=port, rate_hz=rate_hz, speed=speed)
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        pass
