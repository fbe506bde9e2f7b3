"""Rig parameter types: quadrotors, payload, integration settings."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

GRAVITY = 9.81


class PayloadKind(Enum):
    POINT_MASS = "point_mass"
    RIGID_BODY = "rigid_body"


def crazyflie_actuation_matrix(kf=1.9e-8, arm=0.046, km_over_kf=0.0059):
    """Actuation matrix B0 mapping squared motor rates to (f, tau) for an
    X-configuration quadrotor. kf in N/(rad/s)^2, arm in m."""
    d = arm / np.sqrt(2.0)
    km = km_over_kf * kf
    return np.array(
        [
            [kf, kf, kf, kf],
            [-d * kf, -d * kf, d * kf, d * kf],
            [-d * kf, d * kf, d * kf, -d * kf],
            [-km, km, -km, km],
        ]
    )


@dataclass
class QuadrotorParams:
    """Per-robot physical parameters.

    mass in kg, inertia_diag in kg m^2 (body frame), B0 maps squared motor
    rates to the wrench (f, tau_x, tau_y, tau_z), cable_length and
    safety_radius in m, attachment in the payload body frame.
    """

    mass: float = 0.034
    inertia_diag: np.ndarray = field(
        default_factory=lambda: np.array([16.6e-6, 16.6e-6, 29.3e-6])
    )
    B0: np.ndarray = field(default_factory=crazyflie_actuation_matrix)
    motor_rate_min: float = 0.0
    motor_rate_max: float = 6.4e6  # squared rad/s
    safety_radius: float = 0.1
    cable_length: float = 0.5
    attachment: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.inertia_diag = np.asarray(self.inertia_diag, dtype=float)
        self.B0 = np.asarray(self.B0, dtype=float)
        self.attachment = np.asarray(self.attachment, dtype=float)
        if self.mass <= 0:
            raise ValueError("quadrotor mass must be positive")
        if np.any(self.inertia_diag <= 0):
            raise ValueError("inertia entries must be positive")
        if self.cable_length <= 0:
            raise ValueError("cable length must be positive")
        if self.safety_radius <= 0:
            raise ValueError("safety radius must be positive")
        if self.safety_radius >= 2.0 * self.cable_length:
            raise ValueError("safety radius must be < 2 * cable length")
        if np.linalg.matrix_rank(self.B0) < self.B0.shape[0]:
            raise ValueError("B0 must have full row rank")
        if self.motor_rate_min >= self.motor_rate_max:
            raise ValueError("motor rate limits inverted")


@dataclass
class PayloadParams:
    """Payload mass properties. inertia is ignored for point masses."""

    kind: PayloadKind = PayloadKind.POINT_MASS
    mass: float = 0.01
    inertia: np.ndarray = field(default_factory=lambda: 1e-6 * np.eye(3))

    def __post_init__(self):
        self.inertia = np.asarray(self.inertia, dtype=float)
        if self.mass <= 0:
            raise ValueError("payload mass must be positive")
        if self.kind is PayloadKind.RIGID_BODY:
            if not np.allclose(self.inertia, self.inertia.T, atol=1e-12):
                raise ValueError("payload inertia must be symmetric")
            if np.any(np.linalg.eigvalsh(self.inertia) <= 0):
                raise ValueError("payload inertia must be positive definite")

    @property
    def is_rigid(self):
        return self.kind is PayloadKind.RIGID_BODY


@dataclass
class SimConfig:
    """Fixed-step integration settings."""

    dt: float = 1e-3
    gravity: float = GRAVITY
    integrator: str = "explicit_euler"
    control_divisor: int = 4  # control runs every control_divisor-th step (250 Hz)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.dt <= 2e-3:
            raise ValueError("dt must be in (0, 2 ms]")
        if self.integrator != "explicit_euler":
            raise ValueError("only the explicit Euler integrator is implemented")
        if self.control_divisor < 1:
            raise ValueError("control divisor must be >= 1")

    @property
    def gravity_vec(self):
        return np.array([0.0, 0.0, -self.gravity])
