"""Scenario files: versioned TOML describing rig, gains, allocation settings,
trajectory, and run options."""

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .control import ControllerGains
from .params import PayloadKind, PayloadParams, QuadrotorParams, SimConfig
from .trajectory import Figure8, Hover, TeleopScript

SCHEMA_VERSION = 1


@dataclass
class AllocationSettings:
    lambda_s: float = 100.0
    lam_continuity: float = 1e-2
    lam_preset: float = 10.0
    cadence_hz: float = 0.0  # 0 = every control tick
    continuity: bool = True


@dataclass
class TrajectorySettings:
    kind: str = "hover"  # hover | figure8 | teleop
    period: float = 13.0
    peak_speed: float = 0.5
    center: tuple = (0.0, 0.0, 1.0)
    ramp: float = 3.0
    yaw_rate: float = 0.0
    events: list = field(default_factory=list)  # teleop script
    vel_max: float = 0.5
    accel_max: float = 1.5


@dataclass
class Scenario:
    name: str = "scenario"
    payload: PayloadParams = field(default_factory=PayloadParams)
    quads: list = field(default_factory=lambda: [QuadrotorParams()])
    gains: ControllerGains = field(default_factory=ControllerGains)
    allocation: AllocationSettings = field(default_factory=AllocationSettings)
    trajectory: TrajectorySettings = field(default_factory=TrajectorySettings)
    sim: SimConfig = field(default_factory=SimConfig)
    duration: float = 10.0
    seed: int = 0
    mode: str = "qp"  # qp | baseline
    obstacles: list = field(default_factory=list)  # dicts, display only

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.mode not in ("qp", "baseline"):
            raise ValueError("mode must be 'qp' or 'baseline'")

    @property
    def n_robots(self):
        return len(self.quads)

    def make_trajectory(self):
        t = self.trajectory
        if t.kind == "hover":
            return Hover(np.asarray(t.center))
        if t.kind == "figure8":
            return Figure8(
                period=t.period, peak_speed=t.peak_speed,
                center=np.asarray(t.center), ramp=t.ramp, yaw_rate=t.yaw_rate,
            )
        if t.kind == "teleop":
            events = [(float(e[0]), str(e[1]), _event_value(e)) for e in t.events]
            return TeleopScript(
                start=np.asarray(t.center, dtype=float),
                dt=self.sim.dt * self.sim.control_divisor,
                events=events, vel_max=t.vel_max, accel_max=t.accel_max,
            )
        raise ValueError(f"unknown trajectory kind {t.kind!r}")


def _event_value(e):
    kind = e[1]
    if kind == "preset":
        return str(e[2])
    return tuple(float(v) for v in e[2])


def load_scenario(path):
    """Parse a scenario TOML file."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return scenario_from_dict(doc, name=Path(path).stem)


def scenario_from_dict(doc, name="scenario"):
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported scenario schema version {version}")

    rig = doc.get("rig", {})
    pl = rig.get("payload", {})
    kind = PayloadKind(pl.get("kind", "point_mass"))
    payload = PayloadParams(
        kind=kind,
        mass=float(pl.get("mass", 0.01)),
        inertia=np.asarray(pl.get("inertia", (1e-6 * np.eye(3)).tolist())),
    )
    quads = []
    for qd in rig.get("quadrotors", [{}]):
        kwargs = {}
        for key in ("mass", "safety_radius", "cable_length"):
            if key in qd:
                kwargs[key] = float(qd[key])
        if "attachment" in qd:
            kwargs["attachment"] = np.asarray(qd["attachment"], dtype=float)
        if "inertia_diag" in qd:
            kwargs["inertia_diag"] = np.asarray(qd["inertia_diag"], dtype=float)
        if "motor_rate_max" in qd:
            kwargs["motor_rate_max"] = float(qd["motor_rate_max"])
        quads.append(QuadrotorParams(**kwargs))

    gains = ControllerGains(**{k: float(v) for k, v in doc.get("gains", {}).items()})
    alloc = AllocationSettings(
        lambda_s=float(doc.get("allocation", {}).get("lambda_s", 100.0)),
        lam_continuity=float(doc.get("allocation", {}).get("lam_continuity", 1e-2)),
        lam_preset=float(doc.get("allocation", {}).get("lam_preset", 10.0)),
        cadence_hz=float(doc.get("allocation", {}).get("cadence_hz", 0.0)),
        continuity=bool(doc.get("allocation", {}).get("continuity", True)),
    )
    tr = doc.get("trajectory", {})
    traj = TrajectorySettings(
        kind=tr.get("kind", "hover"),
        period=float(tr.get("period", 13.0)),
        peak_speed=float(tr.get("peak_speed", 0.5)),
        center=tuple(tr.get("center", (0.0, 0.0, 1.0))),
        ramp=float(tr.get("ramp", 3.0)),
        yaw_rate=float(tr.get("yaw_rate", 0.0)),
        events=[tuple(e) for e in tr.get("events", [])],
        vel_max=float(tr.get("vel_max", 0.5)),
        accel_max=float(tr.get("accel_max", 1.5)),
    )
    sim = doc.get("sim", {})
    config = SimConfig(
        dt=float(sim.get("dt", 1e-3)),
        gravity=float(sim.get("gravity", 9.81)),
        control_divisor=int(sim.get("control_divisor", 4)),
        seed=int(doc.get("seed", 0)),
    )
    return Scenario(
        name=doc.get("name", name),
        payload=payload,
        quads=quads,
        gains=gains,
        allocation=alloc,
        trajectory=traj,
        sim=config,
        duration=float(doc.get("duration", 10.0)),
        seed=int(doc.get("seed", 0)),
        mode=doc.get("mode", "qp"),
        obstacles=[dict(o) for o in doc.get("obstacles", [])],
    )
