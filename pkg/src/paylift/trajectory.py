"""Reference trajectory generators.

Figure-8 references are 1:2 Lissajous curves with a quintic time warp so
runs start from rest with continuous acceleration. Teleoperation references
integrate velocity commands through a jerk-limited smoother so the
controller always sees a C2 reference.
"""

from dataclasses import dataclass, field

import numpy as np

from .control import ReferenceSetpoint
from .geometry import rot_z


def _smoothstep5(x):
    """Quintic smoothstep: s(0)=0, s(1)=1, s'=s''=0 at both ends."""
    x = min(max(x, 0.0), 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


def _smoothstep5_int(x):
    """Integral of _smoothstep5 from 0 to x (x clamped to [0, 1])."""
    x = min(max(x, 0.0), 1.0)
    return x ** 4 * (2.5 - 3.0 * x + x * x)


def _smoothstep5_d(x):
    if not 0.0 < x < 1.0:
        return 0.0
    return 30.0 * x * x * (1.0 - x) * (1.0 - x)


@dataclass
class TimeWarp:
    """Maps run time to trajectory time with a smooth start from rest."""

    ramp: float = 3.0

    def __call__(self, t):
        if t <= 0.0:
            return 0.0, 0.0, 0.0
        if self.ramp <= 0.0 or t >= self.ramp:
            offset = 0.5 * self.ramp  # integral deficit of the ramp
            return t - offset, 1.0, 0.0
        x = t / self.ramp
        tau = self.ramp * _smoothstep5_int(x)
        return tau, _smoothstep5(x), _smoothstep5_d(x) / self.ramp


@dataclass
class Figure8:
    """Planar 1:2 Lissajous figure-8 at constant altitude.

    amplitude is set from peak_speed: max ||dp|| = sqrt(2) * A * omega.
    yaw_rate, if nonzero, spins the (rigid) payload reference about z while
    flying the eight.
    """

    period: float = 13.0
    peak_speed: float = 0.5
    center: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    ramp: float = 3.0
    yaw_rate: float = 0.0

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        self.center = np.asarray(self.center, dtype=float)
        self.omega = 2.0 * np.pi / self.period
        self.amplitude = self.peak_speed / (np.sqrt(2.0) * self.omega)
        self._warp = TimeWarp(self.ramp)

    def __call__(self, t):
        tau, s, sd = self._warp(t)
        w = self.omega
        A = self.amplitude
        B = 0.5 * A
        p = self.center + np.array([A * np.sin(w * tau), B * np.sin(2 * w * tau), 0.0])
        dp_dtau = np.array([A * w * np.cos(w * tau), 2 * B * w * np.cos(2 * w * tau), 0.0])
        ddp_dtau = np.array(
            [-A * w * w * np.sin(w * tau), -4 * B * w * w * np.sin(2 * w * tau), 0.0]
        )
        v = dp_dtau * s
        a = ddp_dtau * s * s + dp_dtau * sd
        psi = self.yaw_rate * tau
        return ReferenceSetpoint(
            p0r=p, dp0r=v, ddp0r=a,
            R0r=rot_z(psi),
            w0r=np.array([0.0, 0.0, self.yaw_rate * s]),
            dw0r=np.array([0.0, 0.0, self.yaw_rate * sd]),
        )


@dataclass
class Hover:
    point: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float)

    def __call__(self, t):
        return ReferenceSetpoint(p0r=self.point.copy())


class CommandSmoother:
    """Jerk-limited tracker turning velocity setpoints into a C2 reference.

    Advanced at a fixed control period; the commanded velocity may jump but
    the produced acceleration is rate limited (bounded jerk) and clamped to
    accel_max, so ddp0r stays within the configured bound.
    """

    def __init__(self, start, dt, vel_max=0.5, accel_max=1.5, jerk_max=20.0,
                 gain_v=6.0, gain_a=20.0):
        self.p = np.asarray(start, dtype=float).copy()
        self.v = np.zeros(3)
        self.a = np.zeros(3)
        self.dt = dt
        self.vel_max = vel_max
        self.accel_max = accel_max
        self.jerk_max = jerk_max
        self.gain_v = gain_v
        self.gain_a = gain_a
        self.v_cmd = np.zeros(3)

    def set_velocity(self, v):
        v = np.asarray(v, dtype=float)
        speed = np.linalg.norm(v)
        if speed > self.vel_max:
            v = v * (self.vel_max / speed)
        self.v_cmd = v

    def nudge(self, dp):
        self.p = self.p + np.asarray(dp, dtype=float)

    def hold(self):
        self.v_cmd = np.zeros(3)

    def step(self):
        a_des = self.gain_v * (self.v_cmd - self.v)
        mag = np.linalg.norm(a_des)
        if mag > self.accel_max:
            a_des = a_des * (self.accel_max / mag)
        da = self.gain_a * (a_des - self.a)
        dmag = np.linalg.norm(da)
        if dmag > self.jerk_max:
            da = da * (self.jerk_max / dmag)
        self.a = self.a + self.dt * da
        amag = np.linalg.norm(self.a)
        if amag > self.accel_max:
            self.a = self.a * (self.accel_max / amag)
        self.v = self.v + self.dt * self.a
        self.p = self.p + self.dt * self.v
        return self.reference()

    def reference(self):
        return ReferenceSetpoint(
            p0r=self.p.copy(), dp0r=self.v.copy(), ddp0r=self.a.copy()
        )


@dataclass
class TeleopScript:
    """Recorded command timeline for replaying teleop runs offline.

    events: list of (time s, kind, payload) with kind in
    {"vel": (vx,vy,vz), "preset": name or "", "nudge": (dx,dy,dz)}.
    """

    start: np.ndarray
    dt: float
    events: list = field(default_factory=list)
    vel_max: float = 0.5
    accel_max: float = 1.5

    def __post_init__(self):
        self.smoother = CommandSmoother(
            self.start, self.dt, vel_max=self.vel_max, accel_max=self.accel_max
        )
        self._events = sorted(self.events, key=lambda e: e[0])
        self._idx = 0
        self._t = 0.0
        self.active_preset = ""

    def __call__(self, t):
        # consume events due by t, then advance the smoother to t
        while self._idx < len(self._events) and self._events[self._idx][0] <= t:
            _, kind, value = self._events[self._idx]
            if kind == "vel":
                self.smoother.set_velocity(value)
            elif kind == "preset":
                self.active_preset = value
            elif kind == "nudge":
                self.smoother.nudge(value)
            self._idx += 1
        while self._t < t - 0.5 * self.dt:
            self.smoother.step()
            self._t += self.dt
        return self.smoother.reference()
