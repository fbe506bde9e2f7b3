"""Coupled payload/cable/quadrotor dynamics and the fixed-step integrator.

Model: taut massless cables as rigid links, point-force coupling. Tensions
are eliminated analytically, leaving a 3x3 (point mass) or 6x6 (rigid body)
linear solve for the payload acceleration per step. Quadrotor attitude is an
independent rigid body driven by its torque input; its translation is slaved
to the payload pose and cable direction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState
from .geometry import hat
from .params import PayloadKind


@dataclass
class StepInfo:
    saturated: np.ndarray  # per-robot bool: any motor clamped this step
    tensions: np.ndarray  # per-robot cable tension (N), >0 pulls robot toward payload


def clamp_motors(f, tau, quad):
    """Map wrench to squared motor rates, clamp to limits, map back.

    Returns (f, tau, saturated). B0 is square for 4-rotor rigs; the
    pseudo-inverse covers other rotor counts.
    """
    eta = np.concatenate(([f], tau))
    if quad.B0.shape[0] == quad.B0.shape[1]:
        wm = np.linalg.solve(quad.B0, eta)
    else:
        wm = np.linalg.lstsq(quad.B0, eta, rcond=None)[0]
    clamped = np.clip(wm, quad.motor_rate_min, quad.motor_rate_max)
    saturated = bool(np.any(clamped != wm))
    if saturated:
        eta = quad.B0 @ clamped
    return eta[0], eta[1:], saturated, clamped


def _accelerations(state, u, payload, quads, g_vec):
    """Solve for payload acceleration, payload angular acceleration, cable
    angular accelerations, and cable tensions given world thrust forces u."""
    n = state.n_robots
    q = state.q
    w = state.w
    m0 = payload.mass
    masses = np.array([quad.mass for quad in quads])
    lengths = np.array([quad.cable_length for quad in quads])

    qqT = np.einsum("ni,nj->nij", q, q)
    w_sq = np.sum(w * w, axis=1)

    if payload.kind is PayloadKind.POINT_MASS:
        M = m0 * np.eye(3) + np.einsum("n,nij->ij", masses, qqT)
        coeff = (
            q @ g_vec * masses
            + np.einsum("ni,ni->n", q, u)
            - masses * lengths * w_sq
        )
        b = m0 * g_vec + coeff @ q
        a0 = np.linalg.solve(M, b)
        dw0 = np.zeros(3)
        a_att = np.tile(a0, (n, 1))
    else:
        R0 = state.R0
        w0 = state.w0
        J0 = payload.inertia
        rho_hat = np.array([hat(quad.attachment) for quad in quads])
        w0_hat_sq = hat(w0) @ hat(w0)
        # centripetal acceleration of each attachment point, world frame
        cent = np.array([R0 @ (w0_hat_sq @ quad.attachment) for quad in quads])

        A11 = m0 * np.eye(3) + np.einsum("n,nij->ij", masses, qqT)
        A12 = -np.einsum("n,nij,jk,nkl->il", masses, qqT, R0, rho_hat)
        A22 = J0 - np.einsum(
            "n,nij,jk,nkl->il",
            masses,
            np.einsum("nij,jk,nkl->nil", rho_hat, R0.T, qqT),
            R0,
            rho_hat,
        )
        gu = masses[:, None] * g_vec[None, :] + u
        tension_known = (
            masses * np.einsum("ni,ni->n", q, cent)
            + masses * lengths * w_sq
            - np.einsum("ni,ni->n", q, gu)
        )
        b1 = (
            m0 * g_vec
            + np.einsum("nij,nj->i", qqT, gu)
            - (masses * lengths * w_sq) @ q
            - np.einsum("n,nij,nj->i", masses, qqT, cent)
        )
        b2 = -np.cross(w0, J0 @ w0) - np.einsum(
            "nij,jk,nk,n->i", rho_hat, R0.T, q, tension_known
        )
        A = np.block([[A11, A12], [A12.T, A22]])
        sol = np.linalg.solve(A, np.concatenate((b1, b2)))
        a0, dw0 = sol[:3], sol[3:]
        a_att = a0[None, :] + cent - np.einsum("ij,njk,k->ni", R0, rho_hat, dw0)

    inv_m = 1.0 / masses
    dw = np.cross(q, a_att - g_vec[None, :] - u * inv_m[:, None]) / lengths[:, None]
    tensions = (
        masses * (np.einsum("ni,ni->n", q, a_att) + lengths * w_sq)
        - np.einsum("ni,ni->n", q, masses[:, None] * g_vec[None, :] + u)
    )
    return a0, dw0, dw, tensions


def step(state, thrusts, torques, payload, quads, config):
    """Advance one explicit-Euler step of length config.dt.

    thrusts: (n,) scalar collective thrusts; torques: (n,3) body torques.
    Motor limits are enforced here (idempotent if the caller already mixed
    and clamped). Raises NonFiniteState if the state leaves the finite range.
    """
    n = state.n_robots
    thrusts = np.asarray(thrusts, dtype=float)
    torques = np.asarray(torques, dtype=float).reshape(n, 3)
    dt = config.dt
    g_vec = config.gravity_vec

    f_act = np.empty(n)
    tau_act = np.empty((n, 3))
    saturated = np.zeros(n, dtype=bool)
    for i, quad in enumerate(quads):
        f_act[i], tau_act[i], saturated[i], _ = clamp_motors(
            thrusts[i], torques[i], quad
        )

    # world thrust force of each quadrotor: f * (R e3)
    u = f_act[:, None] * state.R[:, :, 2]
    a0, dw0, dw, tensions = _accelerations(state, u, payload, quads, g_vec)

    new = state.copy()
    new.p0 = state.p0 + dt * state.v0
    new.v0 = state.v0 + dt * a0
    qdot = np.cross(state.w, state.q)
    new.q = state.q + dt * qdot
    new.w = state.w + dt * dw
    if payload.kind is PayloadKind.RIGID_BODY:
        new.R0 = state.R0 + dt * (state.R0 @ hat(state.w0))
        new.w0 = state.w0 + dt * dw0
    for i, quad in enumerate(quads):
        J = quad.inertia_diag
        om = state.omega[i]
        dom = (np.cross(J * om, om) + tau_act[i]) / J
        new.R[i] = state.R[i] + dt * (state.R[i] @ hat(om))
        new.omega[i] = om + dt * dom

    new.renormalize()
    if not new.is_finite():
        raise NonFiniteState("state diverged")
    return new, StepInfo(saturated=saturated, tensions=tensions)
