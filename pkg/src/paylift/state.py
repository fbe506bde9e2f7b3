"""Full coupled system state and its kinematic maps.

The state holds the payload pose/twist plus, per robot, the cable unit
direction q_i (pointing from quadrotor i toward its payload attachment),
the cable angular velocity w_i (world frame, orthogonal to q_i), and the
quadrotor attitude/body rates. Dimension 13 + 6n plus the quadrotor
rotational states.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import orthonormalize
from .params import PayloadKind


@dataclass
class FullSystemState:
    p0: np.ndarray  # payload position, world (3,)
    v0: np.ndarray  # payload velocity, world (3,)
    R0: np.ndarray  # payload attitude, body->world (3,3); identity for point mass
    w0: np.ndarray  # payload body angular velocity (3,)
    q: np.ndarray  # cable directions, world (n,3); quadrotor -> attachment
    w: np.ndarray  # cable angular velocities, world (n,3)
    R: np.ndarray  # quadrotor attitudes (n,3,3)
    omega: np.ndarray  # quadrotor body rates (n,3)

    def __post_init__(self):
        self.p0 = np.asarray(self.p0, dtype=float)
        self.v0 = np.asarray(self.v0, dtype=float)
        self.R0 = np.asarray(self.R0, dtype=float)
        self.w0 = np.asarray(self.w0, dtype=float)
        self.q = np.atleast_2d(np.asarray(self.q, dtype=float))
        self.w = np.atleast_2d(np.asarray(self.w, dtype=float))
        self.R = np.asarray(self.R, dtype=float)
        self.omega = np.atleast_2d(np.asarray(self.omega, dtype=float))

    @property
    def n_robots(self):
        return self.q.shape[0]

    def copy(self):
        return FullSystemState(
            self.p0.copy(), self.v0.copy(), self.R0.copy(), self.w0.copy(),
            self.q.copy(), self.w.copy(), self.R.copy(), self.omega.copy(),
        )

    def renormalize(self):
        """Project drifted quantities back onto their manifolds in place."""
        norms = np.linalg.norm(self.q, axis=1, keepdims=True)
        self.q /= norms
        # keep cable angular velocity orthogonal to the cable
        self.w -= (np.sum(self.w * self.q, axis=1, keepdims=True)) * self.q
        self.R0 = orthonormalize(self.R0)
        for i in range(self.n_robots):
            self.R[i] = orthonormalize(self.R[i])

    def is_finite(self):
        return all(
            np.all(np.isfinite(a))
            for a in (self.p0, self.v0, self.R0, self.w0, self.q, self.w, self.R, self.omega)
        )


def hover_state(payload, quads, p0=(0.0, 0.0, 1.0), splay=None):
    """Equilibrium-ish initial state: payload at rest, robots above their
    attachments. splay optionally maps robot index -> unit cable direction;
    default hangs every cable vertical (q_i = -e3)."""
    n = len(quads)
    q = np.tile(np.array([0.0, 0.0, -1.0]), (n, 1))
    if splay is not None:
        for i in range(n):
            d = np.asarray(splay(i), dtype=float)
            q[i] = d / np.linalg.norm(d)
    return FullSystemState(
        p0=np.asarray(p0, dtype=float),
        v0=np.zeros(3),
        R0=np.eye(3),
        w0=np.zeros(3),
        q=q,
        w=np.zeros((n, 3)),
        R=np.tile(np.eye(3), (n, 1, 1)),
        omega=np.zeros((n, 3)),
    )


def attachment_position(state, quad):
    """World position of the cable attachment point for one robot."""
    return state.p0 + state.R0 @ quad.attachment


def quad_position(state, quad, i):
    """World position of quadrotor i: p0 + R0 p_ai - l_i q_i."""
    return state.p0 + state.R0 @ quad.attachment - quad.cable_length * state.q[i]


def quad_velocity(state, quad, i):
    """World velocity of quadrotor i: v0 + R0 (w0 x p_ai) - l_i (w_i x q_i)."""
    qdot = np.cross(state.w[i], state.q[i])
    return (
        state.v0
        + state.R0 @ np.cross(state.w0, quad.attachment)
        - quad.cable_length * qdot
    )


def all_quad_positions(state, quads):
    return np.array([quad_position(state, quads[i], i) for i in range(len(quads))])


def min_pairwise_distance(state, quads):
    """Smallest distance between any two quadrotors; inf for n < 2."""
    pos = all_quad_positions(state, quads)
    n = len(quads)
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            best = min(best, float(np.linalg.norm(pos[i] - pos[j])))
    return best


def mechanical_energy(state, payload, quads, gravity=9.81):
    """Kinetic + potential energy of payload and quadrotors (datum z = 0)."""
    e = 0.5 * payload.mass * float(state.v0 @ state.v0)
    e += payload.mass * gravity * state.p0[2]
    if payload.kind is PayloadKind.RIGID_BODY:
        e += 0.5 * float(state.w0 @ (payload.inertia @ state.w0))
    for i, quad in enumerate(quads):
        v = quad_velocity(state, quad, i)
        p = quad_position(state, quad, i)
        e += 0.5 * quad.mass * float(v @ v)
        e += quad.mass * gravity * p[2]
        e += 0.5 * float(state.omega[i] @ (quad.inertia_diag * state.omega[i]))
    return e
