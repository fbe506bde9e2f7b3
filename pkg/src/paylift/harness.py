"""Scenario runner: closed-loop simulation, metrics, logs, plots."""

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .allocation import (
    Allocator,
    CableForceSet,
    DesiredWrench,
    FormationPreference,
    PreferenceSource,
    allocate_baseline,
    rescale_preset,
)
from .control import control_step, payload_wrench
from .errors import AbortedRun, Infeasible, InfeasiblePair, NonFiniteState, PayliftError
from .simcore import Simulator
from .geometry import E3, normalize, yaw_alignment_rotation
from .params import PayloadKind
from .presets import preset_table
from .state import (
    all_quad_positions,
    hover_state,
    min_pairwise_distance,
    quad_position,
)


@dataclass
class RunMetrics:
    pos_err_mean_cm: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    pos_err_std_cm: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    rot_err_mean_deg: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    rot_err_std_deg: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    min_pairwise_distance_m: float = float("inf")
    qp_runtime_mean_ms: dict = field(default_factory=dict)
    qp_runtime_std_ms: dict = field(default_factory=dict)
    saturation_count: int = 0
    infeasibility_count: int = 0
    ticks: int = 0

    def to_dict(self):
        return {
            "pos_err_mean_cm": self.pos_err_mean_cm,
            "pos_err_std_cm": self.pos_err_std_cm,
            "rot_err_mean_deg": self.rot_err_mean_deg,
            "rot_err_std_deg": self.rot_err_std_deg,
            "min_pairwise_distance_m": self.min_pairwise_distance_m,
            "qp_runtime_mean_ms": self.qp_runtime_mean_ms,
            "qp_runtime_std_ms": self.qp_runtime_std_ms,
            "saturation_count": self.saturation_count,
            "infeasibility_count": self.infeasibility_count,
            "ticks": self.ticks,
        }


@dataclass
class RunResult:
    metrics: RunMetrics
    rows: list
    aborted: bool = False
    abort_reason: str = ""
    summary: dict = field(default_factory=dict)


def _euler_zyx(R):
    """Yaw-pitch-roll of a rotation matrix (aerospace ZYX)."""
    pitch = -math.asin(min(max(R[2, 0], -1.0), 1.0))
    roll = math.atan2(R[2, 1], R[2, 2])
    yaw = math.atan2(R[1, 0], R[0, 0])
    return roll, pitch, yaw


def hover_wrench(payload, point, gravity=9.81):
    return DesiredWrench(np.array([0.0, 0.0, payload.mass * gravity]), np.zeros(3))


def settle_hover(scenario, mode=None, max_iter=80, splay_deg=8.0):
    """Pre-settled equilibrium state at the trajectory start.

    Fixed-point iteration between cable directions and the allocation for
    the active mode; robots start above the payload with attitudes aligned
    to their equilibrium force.
    """
    mode = mode or scenario.mode
    payload = scenario.payload
    quads = scenario.quads
    n = len(quads)
    start = scenario.make_trajectory()(0.0).p0r
    state = hover_state(payload, quads, p0=start)
    wrench = hover_wrench(payload, start, scenario.sim.gravity)
    allocator = Allocator(
        payload, quads, lambda_s=scenario.allocation.lambda_s,
        lam_continuity=scenario.allocation.lam_continuity,
    )
    forces = allocate_baseline(wrench, state.R0, allocator.amap)

    if mode == "qp":
        # split stacked directions so the pair SVMs start feasible
        theta = math.radians(splay_deg)
        mu = forces.mu.copy()
        for i in range(n):
            phi = 2.0 * math.pi * i / max(n, 1)
            norm = np.linalg.norm(mu[i])
            mu[i] = norm * np.array(
                [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                 math.cos(theta)]
            )
        forces = CableForceSet(mu)
        for _ in range(max_iter):
            state.q = -(forces.mu / np.linalg.norm(forces.mu, axis=1)[:, None])
            new_forces, _ = allocator.allocate(state, wrench)
            delta = float(np.max(np.abs(new_forces.mu - forces.mu)))
            forces = new_forces
            if delta < 1e-11:
                break

    state.q = -(forces.mu / np.linalg.norm(forces.mu, axis=1)[:, None])
    for i, quad in enumerate(quads):
        u_eq = forces.mu[i] + quad.mass * scenario.sim.gravity * E3
        state.R[i] = yaw_alignment_rotation(normalize(u_eq), 0.0)
    return state, forces, allocator


class ClosedLoop:
    """Owns the simulation state and the per-tick control/allocation flow."""

    def __init__(self, scenario, mode=None, allocator=None, state=None):
        self.scenario = scenario
        self.mode = mode or scenario.mode
        self.payload = scenario.payload
        self.quads = scenario.quads
        self.config = scenario.sim
        self.gains = scenario.gains
        settled_state, settled_forces, settled_alloc = settle_hover(scenario, self.mode)
        self.sim = Simulator(self.payload, self.quads, self.config,
                             state if state is not None else settled_state)
        self.forces = settled_forces
        self.allocator = allocator if allocator is not None else settled_alloc
        self.tick = 0
        self.step_count = 0
        self.t = 0.0
        self.infeasibility_count = 0
        self.active_preset = ""
        cadence = scenario.allocation.cadence_hz
        control_hz = 1.0 / (self.config.dt * self.config.control_divisor)
        self.control_hz = control_hz
        self.alloc_every = 1 if cadence <= 0 else max(1, round(control_hz / cadence))
        self.last_diag = None
        self._outputs = None
        # preset activation is blended in from the running solution so the
        # commanded cable directions never step discontinuously
        self.preset_ramp_s = 1.0
        self.preset_off_ramp_s = 2.0
        self._blend_from = None
        self._blend_ticks = 0
        self._off_ramp = False

    @property
    def state(self):
        return self.sim.state

    @property
    def saturation_count(self):
        return self.sim.saturation_count

    def set_preset(self, name):
        """Activate a named formation preset ('' or None reverts).

        Transitions are blended from the running solution. Deactivation gets
        a short assisted relax toward the rig's natural splay: the noiseless
        deterministic simulation otherwise parks in the departed formation
        (a fixed point the physical system leaves through disturbances).
        """
        name = name or ""
        if name != self.active_preset:
            self._blend_from = self.forces.mu.copy()
            self._blend_ticks = 0
            self._off_ramp = not name and bool(self.active_preset)
        self.active_preset = name

    def _natural_splay(self, wrench):
        """Symmetric splayed force set (the relaxed n=3 triangle)."""
        n = len(self.quads)
        table = preset_table(n)
        name = "triangle" if "triangle" in table else next(iter(table))
        return rescale_preset(table[name], wrench.force)

    def _preference(self, wrench):
        if self.mode != "qp":
            return None
        alloc_cfg = self.scenario.allocation
        ramp_ticks = self.preset_ramp_s * self.control_hz / self.alloc_every
        if self.active_preset:
            table = preset_table(len(self.quads))
            if self.active_preset not in table:
                raise PayliftError(f"unknown preset {self.active_preset!r}")
            mu0 = rescale_preset(table[self.active_preset], wrench.force)
            lam = alloc_cfg.lam_preset
            if self._blend_from is not None and self._blend_ticks < ramp_ticks:
                s = self._blend_ticks / ramp_ticks
                mu0 = (1.0 - s) * self._blend_from + s * mu0
                lam = (1.0 - s) * alloc_cfg.lam_continuity + s * lam
                self._blend_ticks += 1
            return FormationPreference(
                mu0, lam, PreferenceSource.USER_PRESET, self.active_preset,
            )
        off_ticks = self.preset_off_ramp_s * self.control_hz / self.alloc_every
        if self._off_ramp and self._blend_ticks < off_ticks:
            s = self._blend_ticks / off_ticks
            self._blend_ticks += 1
            mu0 = (1.0 - s) * self._blend_from + s * self._natural_splay(wrench)
            lam = (1.0 - s) * alloc_cfg.lam_preset + s * alloc_cfg.lam_continuity
            return FormationPreference(
                mu0, lam, PreferenceSource.USER_PRESET, "",
            )
        if alloc_cfg.continuity and self.forces is not None:
            return FormationPreference(
                self.forces.mu.copy(),
                alloc_cfg.lam_continuity,
                PreferenceSource.PREVIOUS_SOLUTION,
            )
        return None

    def control_tick(self, ref):
        wrench = payload_wrench(self.state, ref, self.payload, self.gains,
                                self.config.gravity)
        diag = None
        if self.tick % self.alloc_every == 0:
            if self.mode == "baseline":
                self.forces = allocate_baseline(wrench, self.state.R0, self.allocator.amap)
            else:
                try:
                    self.forces, diag = self.allocator.allocate(
                        self.state, wrench, self._preference(wrench)
                    )
                    if diag.infeasible_held:
                        self.infeasibility_count += 1
                except (Infeasible, InfeasiblePair) as exc:
                    raise AbortedRun(f"allocation infeasible: {exc}") from exc
        outputs = control_step(self.state, ref, self.payload, self.quads,
                               self.gains, self.forces, self.config.gravity)
        self.last_diag = diag
        self._outputs = outputs
        self.tick += 1
        return wrench, outputs, diag

    def sim_steps(self):
        """Advance control_divisor simulation steps with the held outputs."""
        thrusts = np.array([o.thrust for o in self._outputs])
        torques = np.array([o.torque for o in self._outputs])
        self.sim.advance(thrusts, torques, self.config.control_divisor)
        self.step_count += self.config.control_divisor
        self.t = self.step_count * self.config.dt

    def min_distance(self):
        return min_pairwise_distance(self.state, self.quads)


def run(scenario, mode=None, out_dir=None, seed=None, on_tick=None):
    """Run a scenario to completion (or abort) and compute metrics.

    on_tick, if given, is called after every control tick with
    (loop, ref, wrench, forces, outputs, diag).
    """
    mode = mode or scenario.mode
    loop = ClosedLoop(scenario, mode=mode)
    provider = scenario.make_trajectory()
    n_ticks = int(round(scenario.duration / (scenario.sim.dt * scenario.sim.control_divisor)))
    hard_floor_pairs = [
        0.5 * (scenario.quads[i].safety_radius + scenario.quads[j].safety_radius)
        for i in range(loop.state.n_robots)
        for j in range(i + 1, loop.state.n_robots)
    ]
    hard_floor = max(hard_floor_pairs) if hard_floor_pairs else 0.0

    rows = []
    stage_times = {}
    aborted = False
    reason = ""
    t_wall = time.perf_counter()
    try:
        for k in range(n_ticks):
            t = loop.t
            if hasattr(provider, "active_preset"):
                ref = provider(t)
                loop.set_preset(provider.active_preset)
            else:
                ref = provider(t)
            wrench, outputs, diag = loop.control_tick(ref)
            loop.sim_steps()
            mind = loop.min_distance()
            rows.append(_log_row(loop, t, ref, wrench, mind))
            if diag is not None:
                for s in diag.stages:
                    stage_times.setdefault(s.stage, []).append(s.runtime_ms)
                stage_times.setdefault("total", []).append(diag.runtime_ms)
            if on_tick is not None:
                on_tick(loop, ref, wrench, loop.forces, outputs, diag)
            if mind < hard_floor:
                raise AbortedRun(
                    f"pairwise distance {mind:.3f} m below hard floor {hard_floor:.3f} m"
                )
    except AbortedRun as exc:
        aborted = True
        reason = str(exc)
    except NonFiniteState as exc:
        aborted = True
        reason = f"non-finite state: {exc}"
    wall_s = time.perf_counter() - t_wall

    metrics = compute_metrics(scenario, rows, stage_times, loop)
    summary = {
        "scenario": scenario.name,
        "mode": mode,
        "schema_version": 1,
        "aborted": aborted,
        "abort_reason": reason,
        "duration_s": scenario.duration,
        "metrics": metrics.to_dict(),
        "wall_time_s": wall_s,  # non-deterministic
    }
    result = RunResult(metrics, rows, aborted, reason, summary)
    if out_dir is not None:
        write_outputs(result, scenario, Path(out_dir))
    return result


def _log_row(loop, t, ref, wrench, mind):
    state = loop.state
    positions = all_quad_positions(state, loop.quads)
    diag = loop.last_diag
    return {
        "tick": loop.tick,
        "t": round(t, 9),
        "p0": state.p0.tolist(),
        "v0": state.v0.tolist(),
        "p0r": ref.p0r.tolist(),
        "R0": state.R0.reshape(-1).tolist(),
        "wrench_f": wrench.force.tolist(),
        "wrench_m": wrench.moment.tolist(),
        "robots": positions.tolist(),
        "mu": loop.forces.mu.tolist(),
        "min_dist": mind,
        "qp_iterations": (
            {s.stage + str(s.pair): s.iterations for s in diag.stages} if diag else {}
        ),
        "qp_objectives": (
            {s.stage + str(s.pair): s.objective for s in diag.stages} if diag else {}
        ),
        "qp_active_constraints": (
            {s.stage + str(s.pair): s.active_constraints for s in diag.stages}
            if diag else {}
        ),
        "infeasible_held": bool(diag.infeasible_held) if diag else False,
    }


def compute_metrics(scenario, rows, stage_times, loop):
    metrics = RunMetrics()
    metrics.saturation_count = loop.saturation_count
    metrics.infeasibility_count = loop.infeasibility_count
    metrics.ticks = len(rows)
    if not rows:
        return metrics
    window_start = getattr(scenario.trajectory, "ramp", 0.0) + 1.0
    sel = [r for r in rows if r["t"] >= window_start] or rows
    err = np.array([np.asarray(r["p0"]) - np.asarray(r["p0r"]) for r in sel])
    metrics.pos_err_mean_cm = list(np.mean(np.abs(err), axis=0) * 100.0)
    metrics.pos_err_std_cm = list(np.std(np.abs(err), axis=0) * 100.0)
    metrics.min_pairwise_distance_m = float(min(r["min_dist"] for r in rows))
    if scenario.payload.kind is PayloadKind.RIGID_BODY:
        angles = []
        provider = scenario.make_trajectory()
        for r in sel:
            R0 = np.asarray(r["R0"]).reshape(3, 3)
            R0r = provider(r["t"]).R0r
            angles.append(_euler_zyx(R0r.T @ R0))
        angles = np.degrees(np.abs(np.array(angles)))
        metrics.rot_err_mean_deg = list(np.mean(angles, axis=0))
        metrics.rot_err_std_deg = list(np.std(angles, axis=0))
    for stage, ts in stage_times.items():
        metrics.qp_runtime_mean_ms[stage] = float(np.mean(ts))
        metrics.qp_runtime_std_ms[stage] = float(np.std(ts))
    return metrics


def write_outputs(result, scenario, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "log.jsonl", "w") as fh:
        for row in result.rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(result.summary, fh, indent=2, sort_keys=True)
    with open(out_dir / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        flat = result.metrics.to_dict()
        writer.writerow(sorted(flat))
        writer.writerow([json.dumps(flat[k]) if isinstance(flat[k], (list, dict)) else flat[k]
                         for k in sorted(flat)])
    plot_run(result, scenario, out_dir / "run.png")


def plot_run(result, scenario, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = result.rows
    if not rows:
        return
    t = [r["t"] for r in rows]
    p0 = np.array([r["p0"] for r in rows])
    p0r = np.array([r["p0r"] for r in rows])
    mind = [r["min_dist"] for r in rows]
    fig, axes = plt.subplots(1, 3, figsize=(14, 4))
    axes[0].plot(p0r[:, 0], p0r[:, 1], "k--", label="reference")
    axes[0].plot(p0[:, 0], p0[:, 1], label="payload")
    axes[0].set_xlabel("x [m]"); axes[0].set_ylabel("y [m]"); axes[0].legend()
    axes[0].set_title(f"{scenario.name} ({result.summary.get('mode', '')})")
    axes[1].plot(t, (p0 - p0r) * 100.0)
    axes[1].set_xlabel("t [s]"); axes[1].set_ylabel("error [cm]")
    axes[1].legend(["x", "y", "z"])
    axes[2].plot(t, mind)
    if scenario.quads:
        rr = scenario.quads[0].safety_radius + scenario.quads[-1].safety_radius
        axes[2].axhline(rr, color="r", linestyle="--", label="r_i + r_j")
    axes[2].set_xlabel("t [s]"); axes[2].set_ylabel("min distance [m]"); axes[2].legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def compare(scenario, out_dir=None):
    """Run baseline and QP-cascade modes on identical scenarios."""
    results = {}
    for mode in ("baseline", "qp"):
        results[mode] = run(scenario, mode=mode,
                            out_dir=None if out_dir is None else Path(out_dir) / mode)
    rr_min = min(
        scenario.quads[i].safety_radius + scenario.quads[j].safety_radius
        for i in range(len(scenario.quads))
        for j in range(i + 1, len(scenario.quads))
    )
    report = {
        "schema_version": 1,
        "scenario": scenario.name,
        "safety_distance_m": rr_min,
        "baseline": {
            "metrics": results["baseline"].metrics.to_dict(),
            "aborted": results["baseline"].aborted,
            "violates_safety": results["baseline"].metrics.min_pairwise_distance_m < rr_min,
        },
        "qp": {
            "metrics": results["qp"].metrics.to_dict(),
            "aborted": results["qp"].aborted,
            "violates_safety": results["qp"].metrics.min_pairwise_distance_m < rr_min,
        },
    }
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        with open(Path(out_dir) / "compare.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return report, results


def bench_qp(scenario, repeat=500):
    """Benchmark the full allocation cascade under operating conditions.

    Timing: per-tick allocate() wall time along a closed-loop run (warm
    starts evolve as they do in flight), median over `repeat` ticks.
    Warm-start benefit: iterations of a repeated identical solve versus a
    cold allocator on the same fixture.
    """
    import gc

    loop = ClosedLoop(scenario, mode="qp")
    provider = scenario.make_trajectory()
    gc.collect()
    times = []
    for _ in range(repeat):
        ref = provider(loop.t)
        _, _, diag = loop.control_tick(ref)
        loop.sim_steps()
        if diag is not None:
            times.append(diag.runtime_ms)

    # same-fixture warm vs cold iteration counts
    state, forces, allocator = settle_hover(scenario, "qp")
    wrench = hover_wrench(scenario.payload, state.p0, scenario.sim.gravity)
    cold = Allocator(scenario.payload, scenario.quads,
                     lambda_s=scenario.allocation.lambda_s)
    _, diag_cold = cold.allocate(state, wrench)
    _, diag_warm = cold.allocate(state, wrench)
    return {
        "median_ms": float(np.median(times)),
        "p90_ms": float(np.percentile(times, 90)),
        "mean_ms": float(np.mean(times)),
        "warm_iterations_median": float(np.median([s.iterations for s in diag_warm.stages])),
        "cold_iterations_median": float(np.median([s.iterations for s in diag_cold.stages])),
        "ticks": len(times),
    }
