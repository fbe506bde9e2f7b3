"""Three-loop geometric controller.

Loop 1 turns payload tracking errors into a desired wrench (F_d, M_d).
Loop 2 turns each desired cable force into the force the quadrotor must
apply: a component along the cable (load share plus centripetal and
attachment-acceleration compensation) and a component across it (PD on the
cable direction). Loop 3 is the standard SO(3) quadrotor attitude loop with
thrust projection and motor mixing.

Per the flight-tested fixes, loop 2 uses the reference payload acceleration
(never the measured one) and treats the desired cable direction as static
between allocation updates.
"""

from dataclasses import dataclass, field

import numpy as np

from .allocation import DesiredWrench
from .dynamics import clamp_motors
from .errors import DegenerateForce
from .geometry import E3, cross3, hat, rotation_error, yaw_alignment_rotation
from .params import GRAVITY, PayloadKind

EPS_FORCE = 1e-6  # N; below this a cable force has no usable direction


@dataclass
class ReferenceSetpoint:
    p0r: np.ndarray
    dp0r: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ddp0r: np.ndarray = field(default_factory=lambda: np.zeros(3))
    R0r: np.ndarray = field(default_factory=lambda: np.eye(3))
    w0r: np.ndarray = field(default_factory=lambda: np.zeros(3))
    dw0r: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw_r: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        for name in ("p0r", "dp0r", "ddp0r", "w0r", "dw0r", "yaw_r"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        self.R0r = np.asarray(self.R0r, dtype=float)

    def yaw_for(self, i):
        if self.yaw_r.ndim == 0:
            return float(self.yaw_r)
        return float(self.yaw_r[min(i, len(self.yaw_r) - 1)])


@dataclass
class ControllerGains:
    # payload attitude must stay well below the cable-loop bandwidth or the
    # formation yaw spirals up through the cascade
    kp_pos: float = 6.25
    kd_pos: float = 5.0
    kp_rot: float = 4.0
    kd_rot: float = 3.0
    kq: float = 64.0
    kw: float = 16.0
    kR: float = 0.012
    kOmega: float = 0.0008

    def __post_init__(self):
        for name in ("kp_pos", "kd_pos", "kp_rot", "kd_rot", "kq", "kw", "kR", "kOmega"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass
class ControlOutput:
    thrust: float  # N, post-clamp
    torque: np.ndarray  # N m, post-clamp (3,)
    motor_rates: np.ndarray  # squared rates, clamped
    saturated: bool = False


def payload_wrench(state, ref, payload, gains, gravity=GRAVITY):
    """Desired payload wrench: PD + feedforward on translation; SO(3) PD
    scaled by the payload inertia on rotation (rigid bodies only)."""
    m0 = payload.mass
    e_p = state.p0 - ref.p0r
    e_v = state.v0 - ref.dp0r
    force = m0 * (ref.ddp0r + gravity * E3) - m0 * gains.kp_pos * e_p - m0 * gains.kd_pos * e_v
    moment = np.zeros(3)
    if payload.kind is PayloadKind.RIGID_BODY:
        J0 = payload.inertia
        e_R = rotation_error(state.R0, ref.R0r)
        w_ref = state.R0.T @ (ref.R0r @ ref.w0r)
        e_w = state.w0 - w_ref
        moment = (
            J0 @ (-gains.kp_rot * e_R - gains.kd_rot * e_w + state.R0.T @ (ref.R0r @ ref.dw0r))
            + np.cross(state.w0, J0 @ state.w0)
        )
    return DesiredWrench(force, moment)


def desired_directions(forces, eps=EPS_FORCE):
    """Unit directions of the desired cable forces, mu_id / ||mu_id||.

    This is the direction in which each cable pulls the payload, i.e. from
    the attachment toward the robot; the state's cable vector q_i converges
    to its negative. Raises DegenerateForce if any force is below eps so the
    caller can hold the previous direction.
    """
    mu = forces.mu
    norms = np.linalg.norm(mu, axis=1)
    if np.any(norms <= eps):
        raise DegenerateForce("cable force too small for a direction")
    return mu / norms[:, None]


def attachment_ref_accel(state, ref, quad, gravity=GRAVITY):
    """Reference acceleration of a cable attachment point including gravity
    compensation; uses the reference payload acceleration, not a measured
    one, plus the centripetal term from the current payload spin."""
    a = ref.ddp0r + gravity * E3
    w0 = state.w0
    if np.any(w0):
        a = a + state.R0 @ (hat(w0) @ (hat(w0) @ quad.attachment))
    return a


def cable_control(state, i, mu_id, ref, gains, payload, quad, gravity=GRAVITY):
    """Force u_i the quadrotor must apply: u_parallel + u_perpendicular."""
    q = state.q[i]
    w = state.w[i]
    m = quad.mass
    length = quad.cable_length
    norm = np.linalg.norm(mu_id)
    if norm <= EPS_FORCE:
        raise DegenerateForce("cable force too small for a direction")
    a_att = attachment_ref_accel(state, ref, quad, gravity)

    qqT = np.outer(q, q)
    u_par = qqT @ mu_id + m * length * float(w @ w) * q + m * (qqT @ a_att)

    target = -mu_id / norm  # state convention: q points robot -> payload
    e_q = cross3(target, q)
    e_w = w  # desired cable rate held at zero between allocation updates
    u_perp = -m * length * cross3(q, gains.kq * e_q + gains.kw * e_w)
    u_perp = u_perp - m * cross3(q, cross3(q, a_att))
    return u_par + u_perp


def attitude_loop(u_i, R_i, omega_i, yaw_r, quad, gains):
    """Thrust projection, flat desired attitude, SO(3) PD, motor mixing."""
    norm = np.linalg.norm(u_i)
    if norm <= EPS_FORCE:
        raise DegenerateForce("control force too small for an attitude")
    f = float(u_i @ (R_i @ E3))
    R_des = yaw_alignment_rotation(u_i / norm, yaw_r)
    e_R = rotation_error(R_i, R_des)
    e_w = omega_i  # desired body rate held at zero
    J = quad.inertia_diag
    tau = -gains.kR * e_R - gains.kOmega * e_w + cross3(omega_i, J * omega_i)
    f_act, tau_act, saturated, rates = clamp_motors(max(f, 0.0), tau, quad)
    return ControlOutput(f_act, tau_act, rates, saturated)


def control_step(state, ref, payload, quads, gains, forces, gravity=GRAVITY):
    """Compose loops 2 and 3 for every robot given allocated cable forces."""
    outputs = []
    for i, quad in enumerate(quads):
        u_i = cable_control(state, i, forces.mu[i], ref, gains, payload, quad, gravity)
        outputs.append(
            attitude_loop(u_i, state.R[i], state.omega[i], ref.yaw_for(i), quad, gains)
        )
    return outputs
