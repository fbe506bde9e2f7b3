"""Cable force allocation.

Baseline: minimum-norm distribution through the Moore-Penrose inverse of the
allocation map. Collision-aware mode: for every robot pair, a force-split QP
(rigid body only) and a separating-hyperplane SVM QP followed by geometric
tilting produce one half-space per robot; a final QP distributes the desired
wrench into cable forces inside the resulting polyhedron, optionally pulled
toward preferred forces (formation presets or the previous solution).

All pair geometry lives in the payload frame. Half-spaces handed to the
final QP constrain payload-frame cable forces and have zero offset (their
position-space planes pass through the cable pivots, which makes the force
constraint scale-free).
"""

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import qp, tiltcore
from .errors import (
    BadGeometry,
    DegenerateAxis,
    Infeasible,
    InfeasiblePair,
    NoIntersection,
    SingularMap,
    SolverFailure,
)
from .geometry import E3, cross3, hat, norm3, rotate_about_axis
from .params import PayloadKind


@dataclass
class DesiredWrench:
    force: np.ndarray  # F_d, world frame (3,)
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))  # M_d, payload frame

    def __post_init__(self):
        self.force = np.asarray(self.force, dtype=float)
        self.moment = np.asarray(self.moment, dtype=float)
        if not (np.all(np.isfinite(self.force)) and np.all(np.isfinite(self.moment))):
            raise ValueError("wrench must be finite")


@dataclass
class Halfspace:
    """Membership test: n @ x - a <= 0."""

    n: np.ndarray
    a: float = 0.0

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=float)
        if norm3(self.n) <= 0.0:
            raise ValueError("half-space normal must be nonzero")

    def contains(self, x, slack=0.0):
        return float(self.n @ x) - self.a <= slack


@dataclass
class CableForceSet:
    mu: np.ndarray  # (n, 3) world-frame desired cable forces

    def __post_init__(self):
        self.mu = np.atleast_2d(np.asarray(self.mu, dtype=float))

    @property
    def n_robots(self):
        return self.mu.shape[0]

    def stacked(self):
        return self.mu.reshape(-1)


class PreferenceSource(Enum):
    PREVIOUS_SOLUTION = "previous"
    USER_PRESET = "preset"


@dataclass
class FormationPreference:
    mu0: np.ndarray  # (n, 3) preferred cable forces, world frame
    lam: float = 0.0
    source: PreferenceSource = PreferenceSource.PREVIOUS_SOLUTION
    name: str = ""

    def __post_init__(self):
        self.mu0 = np.atleast_2d(np.asarray(self.mu0, dtype=float))
        if self.lam < 0:
            raise ValueError("preference weight must be >= 0")


def rescale_preset(mu0, force):
    """Rescale preset forces so they sum exactly to the desired force.

    Presets ship with unit total (sum = e3); the vertical share is scaled by
    F_d.e3 and the horizontal residual is spread evenly.
    """
    mu0 = np.atleast_2d(np.asarray(mu0, dtype=float))
    n = mu0.shape[0]
    total = mu0.sum(axis=0)
    fz = float(force @ E3)
    scaled = mu0 * (fz / float(total @ E3))
    residual = force - scaled.sum(axis=0)
    return scaled + residual / n


@dataclass
class AllocationMap:
    P: np.ndarray  # 3 x 3n (point mass) or 6 x 3n (rigid body)
    kind: PayloadKind
    attachments: np.ndarray  # (n, 3) payload frame
    rank_deficient: bool = False

    @property
    def n_robots(self):
        return self.P.shape[1] // 3


def build_allocation_map(attachments, kind):
    """Constant map P with P @ stack(R0^T mu_i) = (R0^T F_d; M_d) (rigid)
    or P @ stack(mu_i) = F_d (point mass)."""
    attachments = np.atleast_2d(np.asarray(attachments, dtype=float))
    n = attachments.shape[0]
    eyes = np.hstack([np.eye(3)] * n)
    if kind is PayloadKind.POINT_MASS:
        return AllocationMap(eyes, kind, attachments)
    moment_rows = np.hstack([hat(attachments[i]) for i in range(n)])
    P = np.vstack((eyes, moment_rows))
    deficient = np.linalg.matrix_rank(P, tol=1e-9) < 6
    return AllocationMap(P, kind, attachments, rank_deficient=deficient)


def _rhs(wrench, R0, amap):
    if amap.kind is PayloadKind.POINT_MASS:
        return wrench.force.copy()
    return np.concatenate((R0.T @ wrench.force, wrench.moment))


def allocate_baseline(wrench, R0, amap):
    """Minimum-norm cable forces through the Moore-Penrose inverse of P.

    Rank-deficient maps (e.g. the two-robot rod, which cannot produce a
    moment about its own axis) fall back to the least-squares solution over
    the achievable wrench subspace. SingularMap flags maps whose nonzero
    spectrum is numerically unusable.
    """
    s = np.linalg.svd(amap.P, compute_uv=False)
    nonzero = s[s > s[0] * 1e-13] if s.size else s
    if nonzero.size == 0 or nonzero[0] / nonzero[-1] > 1e6:  # cond(PP^T) 1e12
        raise SingularMap("allocation map ill-conditioned")
    y = np.linalg.pinv(amap.P, rcond=1e-10) @ _rhs(wrench, R0, amap)
    mu = (R0 @ y.reshape(-1, 3).T).T
    return CableForceSet(mu)


def allocation_residual(forces, wrench, R0, amap):
    """|| P stack(R0^T mu) - rhs ||."""
    y = (R0.T @ forces.mu.T).T.reshape(-1)
    return float(np.linalg.norm(amap.P @ y - _rhs(wrench, R0, amap)))


# ---------------------------------------------------------------------------
# per-pair QPs


def qp_fd_problem(p_ai, p_aj, wrench_force_pf, moment_pf):
    """Data for the pair force-split QP in the payload frame.

    Variables x = (G_i, G_j) with G = R0^T F_d*; objective
    ||G_i||^2 + ||G_j||^2 + ||M_d - (rho_ai x G_i + rho_aj x G_j)||^2,
    hard constraint G_i + G_j = R0^T F_d.
    """
    B = np.hstack((hat(p_ai), hat(p_aj)))  # moment of the split forces
    P = 2.0 * (np.eye(6) + B.T @ B)
    q = -2.0 * B.T @ moment_pf
    A = np.hstack((np.eye(3), np.eye(3)))
    return P, q, A, wrench_force_pf, wrench_force_pf


def qp_fd(p_ai, p_aj, R0, wrench, family=None, **solve_opts):
    """Split the desired wrench into two attachment forces (world frame)."""
    f_pf = R0.T @ wrench.force
    P, q, A, l, u = qp_fd_problem(np.asarray(p_ai, float), np.asarray(p_aj, float),
                                  f_pf, wrench.moment)
    sol = _family_solve(family, P, q, A, l, u, **solve_opts)
    if not sol.solved:
        raise SolverFailure(f"qp_fd: {sol.status.name}")
    return R0 @ sol.x[:3], R0 @ sol.x[3:], sol


def qp_svm_pointmass_problem(p_i, p_j, force, lambda_s):
    P = 2.0 * (np.eye(3) + lambda_s * np.outer(force, force))
    q = np.zeros(3)
    A = np.vstack((p_i, p_j))
    l = np.array([-np.inf, 1.0])
    u = np.array([-1.0, np.inf])
    return P, q, A, l, u


def qp_svm_pointmass(p_i, p_j, force, lambda_s, family=None, **solve_opts):
    """Max-margin plane through the payload separating the two robots,
    regularized to be parallel to the desired force. Returns the normal."""
    p_i = np.asarray(p_i, float)
    p_j = np.asarray(p_j, float)
    P, q, A, l, u = qp_svm_pointmass_problem(p_i, p_j, np.asarray(force, float), lambda_s)
    sol = _family_solve(family, P, q, A, l, u, **solve_opts)
    if sol.status is qp.QpStatus.PRIMAL_INFEASIBLE:
        raise InfeasiblePair("separating plane infeasible for pair")
    if not sol.solved:
        raise SolverFailure(f"qp_svm_pointmass: {sol.status.name}")
    return sol.x.copy(), sol


def qp_svm_rigid_problem(p_i, p_j, p_ai, p_aj, f_i, f_j, lambda_s):
    """Hybrid soft/hard margin SVM. Variables (n, a, s1, s2)."""
    P = np.zeros((6, 6))
    P[:3, :3] = 2.0 * np.eye(3)
    q = np.array([0.0, 0.0, 0.0, 0.0, lambda_s, lambda_s])
    inf = np.inf
    A = np.zeros((8, 6))
    l = np.empty(8)
    u = np.empty(8)
    rows = (
        (p_i, -1.0, 0.0, (-inf, -1.0)),
        (p_j, -1.0, 0.0, (1.0, inf)),
        (p_ai, -1.0, 0.0, (-inf, -1.0)),
        (p_aj, -1.0, 0.0, (1.0, inf)),
        (p_ai + f_i, -1.0, -1.0, (-inf, -1.0)),  # s1 slack
        (p_aj + f_j, -1.0, 1.0, (1.0, inf)),  # s2 slack
    )
    for r, (vec, acoef, scoef, (lo, hi)) in enumerate(rows):
        A[r, :3] = vec
        A[r, 3] = acoef
        if r == 4:
            A[r, 4] = scoef
        if r == 5:
            A[r, 5] = scoef
        l[r], u[r] = lo, hi
    A[6, 4] = 1.0
    l[6], u[6] = 0.0, inf
    A[7, 5] = 1.0
    l[7], u[7] = 0.0, inf
    return P, q, A, l, u


def qp_svm_rigid(p_i, p_j, p_ai, p_aj, f_i, f_j, lambda_s, family=None, **solve_opts):
    """Separating plane (normal, offset) for a rigid-payload pair."""
    args = [np.asarray(v, float) for v in (p_i, p_j, p_ai, p_aj, f_i, f_j)]
    P, q, A, l, u = qp_svm_rigid_problem(*args, lambda_s)
    sol = _family_solve(family, P, q, A, l, u, **solve_opts)
    if sol.status is qp.QpStatus.PRIMAL_INFEASIBLE:
        raise InfeasiblePair("cables/attachments not separable")
    if not sol.solved:
        raise SolverFailure(f"qp_svm_rigid: {sol.status.name}")
    return sol.x[:3].copy(), float(sol.x[3]), sol


def _family_solve(family, P, q, A, l, u, **solve_opts):
    if family is None:
        return qp.solve(qp.QpProblem(P, q, A, l, u), **solve_opts)
    family.update(P=P, q=q, A=A, l=l, u=u)
    return family.solve(**solve_opts)


# ---------------------------------------------------------------------------
# hyperplane tilting


def tilt_angles(radius, length):
    """Chordal tilt angle alpha = 2 asin(r / 2l); requires 0 < r < 2l."""
    if not 0.0 < radius < 2.0 * length:
        raise BadGeometry("safety radius must satisfy 0 < r < 2l")
    return 2.0 * np.arcsin(radius / (2.0 * length))


def _tilt_axis(n_ij):
    v = cross3(n_ij, E3)
    nv = norm3(v)
    if nv >= 1e-9:
        return v / nv
    # normal parallel to e3: any orthogonal axis works; pick deterministically
    for basis in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])):
        v = cross3(n_ij, basis)
        nv = norm3(v)
        if nv >= 1e-9:
            return v / nv
    raise DegenerateAxis("cannot construct tilt axis")


def tilt_hyperplanes_pointmass(n_ij, r_i, r_j, l_i, l_j):
    """Tilt the separating normal into one half-space per robot (through
    the payload). Robot i keeps the n^T x <= 0 side; both returned normals
    point into the gap between the robots.
    """
    n_ij = np.asarray(n_ij, dtype=float)
    alpha_i = tilt_angles(r_i, l_i)
    alpha_j = tilt_angles(r_j, l_j)
    v = _tilt_axis(n_ij)
    n_i = rotate_about_axis(n_ij, v, +alpha_i)
    n_j = -rotate_about_axis(n_ij, v, -alpha_j)
    return Halfspace(n_i, 0.0), Halfspace(n_j, 0.0)


def _circle_top(p_a, length, n_hat, a_hat):
    """Highest-z point of the circle cut by plane (n_hat, a_hat) on the
    cable sphere around attachment p_a. None if the sphere misses the plane."""
    d = float(n_hat @ p_a) - a_hat
    if abs(d) > length:
        return None
    center = p_a - d * n_hat
    radius = np.sqrt(max(length * length - d * d, 0.0))
    up = E3 - float(n_hat @ E3) * n_hat
    nu = norm3(up)
    if nu < 1e-12:
        # horizontal plane: every circle point shares one z; pick along e1
        up = np.array([1.0, 0.0, 0.0]) - float(n_hat @ np.array([1.0, 0.0, 0.0])) * n_hat
        nu = norm3(up)
        if nu < 1e-12:
            return center
    return center + radius * up / nu


def tilt_hyperplanes_rigid(n_ij, a, p_ai, p_aj, r_i, r_j, l_i, l_j):
    """Rigid-body tilt: intermediate planes through each attachment and the
    top of its sphere/plane intersection circle, then the point-mass tilt
    anchored at the attachment. Returns position-space half-spaces whose
    planes pass through their attachment points.

    Raises NoIntersection if a cable sphere does not reach the separating
    plane; callers may fall back to the untilted plane through the
    attachment.
    """
    n_ij = np.asarray(n_ij, dtype=float)
    p_ai = np.asarray(p_ai, dtype=float)
    p_aj = np.asarray(p_aj, dtype=float)
    norm = norm3(n_ij)
    n_hat = n_ij / norm
    a_hat = a / norm
    v = _tilt_axis(n_ij)

    tops = []
    for p_a, length in ((p_ai, l_i), (p_aj, l_j)):
        top = _circle_top(p_a, length, n_hat, a_hat)
        if top is None:
            raise NoIntersection("cable sphere does not reach separating plane")
        tops.append(top)

    alphas = (tilt_angles(r_i, l_i), tilt_angles(r_j, l_j))
    out = []
    for k, (p_a, top, alpha, sign) in enumerate(
        ((p_ai, tops[0], alphas[0], +1.0), (p_aj, tops[1], alphas[1], -1.0))
    ):
        chord = top - p_a
        m = cross3(v, chord)
        nm = norm3(m)
        if nm < 1e-12:
            m = n_hat.copy()
        else:
            m = m / nm
            if float(m @ n_hat) < 0.0:
                m = -m
        n_t = rotate_about_axis(m, v, sign * alpha)
        if sign < 0:
            n_t = -n_t
        out.append(Halfspace(n_t, float(n_t @ p_a)))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# final distribution QP


def allocate_qp(wrench, R0, amap, halfspaces, preference=None, family=None,
                **solve_opts):
    """Distribute the wrench into cable forces inside the half-space
    polyhedron. halfspaces: iterable of (robot index, Halfspace) acting on
    payload-frame forces. Returns a world-frame CableForceSet."""
    n = amap.n_robots
    nv = 3 * n
    eq = amap.P
    ne = eq.shape[0]
    hs = list(halfspaces)
    A = np.zeros((ne + len(hs), nv))
    l = np.empty(ne + len(hs))
    u = np.empty(ne + len(hs))
    rhs = _rhs(wrench, R0, amap)
    A[:ne] = eq
    l[:ne] = rhs
    u[:ne] = rhs
    for r, (robot, h) in enumerate(hs):
        A[ne + r, 3 * robot : 3 * robot + 3] = h.n
        l[ne + r] = -np.inf
        u[ne + r] = h.a

    lam = 0.0 if preference is None else preference.lam
    Pmat = (1.0 + 2.0 * lam) * np.eye(nv)
    q = np.zeros(nv)
    if preference is not None and lam > 0.0:
        y0 = (R0.T @ preference.mu0.T).T.reshape(-1)
        q = -2.0 * lam * y0

    sol = _family_solve(family, Pmat, q, A, l, u, **solve_opts)
    if sol.status is qp.QpStatus.PRIMAL_INFEASIBLE:
        raise Infeasible("half-spaces exclude all equality-feasible forces")
    if not sol.solved:
        raise SolverFailure(f"allocate_qp: {sol.status.name}")
    mu = (R0 @ sol.x.reshape(n, 3).T).T
    return CableForceSet(mu), sol


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class QpStageDiag:
    stage: str
    pair: tuple
    status: str
    iterations: int
    runtime_ms: float
    objective: float
    active_constraints: int = 0


@dataclass
class AllocationDiagnostics:
    stages: list = field(default_factory=list)
    fallback_pairs: list = field(default_factory=list)
    infeasible_held: bool = False
    runtime_ms: float = 0.0

    def runtime_by_stage(self):
        out = {}
        for s in self.stages:
            out.setdefault(s.stage, 0.0)
            out[s.stage] += s.runtime_ms
        return out


class Allocator:
    """Owns the QP families (warm starts) and the infeasibility-hold policy.

    One allocator per control replica; identical inputs produce identical
    outputs regardless of instance (warm starts evolve deterministically).
    """

    MAX_HOLD = 5

    def __init__(self, payload, quads, lambda_s=100.0, lam_continuity=1e-2,
                 tol=1e-6, max_iter=4000, polish=False):
        self.payload = payload
        self.quads = quads
        self.lambda_s = lambda_s
        self.lam_continuity = lam_continuity
        self.solve_opts = dict(tol_abs=tol, tol_rel=tol, max_iter=max_iter,
                               polish=polish)
        n = len(quads)
        self.amap = build_allocation_map(
            np.array([quad.attachment for quad in quads]), payload.kind
        )
        self.pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        k = max(len(self.pairs), 1)
        self._ne = 3 if payload.kind is PayloadKind.POINT_MASS else 6
        if payload.kind is PayloadKind.RIGID_BODY:
            self._fd_batch = qp.BatchFamily(k, 6, 3)
            self._fd_moment_maps = np.zeros((k, 6, 3))
            self._svm_batch = qp.BatchFamily(k, 6, 8)
            for b, (i, j) in enumerate(self.pairs):
                P, q, A, l, u = qp_fd_problem(
                    quads[i].attachment, quads[j].attachment,
                    np.zeros(3), np.zeros(3),
                )
                self._fd_batch.P[b] = P
                self._fd_batch.A[b] = A
                Bm = np.hstack((hat(quads[i].attachment), hat(quads[j].attachment)))
                self._fd_moment_maps[b] = -2.0 * Bm.T
                P, q, A, l, u = qp_svm_rigid_problem(
                    np.zeros(3), np.zeros(3), np.zeros(3), np.zeros(3),
                    np.zeros(3), np.zeros(3), self.lambda_s,
                )
                self._svm_batch.P[b] = P
                self._svm_batch.q[b] = q
                self._svm_batch.A[b] = A
                self._svm_batch.l[b] = l
                self._svm_batch.u[b] = u
        else:
            self._fd_batch = None
            self._svm_batch = qp.BatchFamily(k, 3, 2)
            for b in range(k):
                self._svm_batch.l[b] = (-np.inf, 1.0)
                self._svm_batch.u[b] = (-1.0, np.inf)
        self._mu_family = qp.ProblemFamily(3 * n, self._ne + n * (n - 1))
        self._mu_family.A[: self._ne] = self.amap.P
        self._mu_family.l[self._ne:] = -np.inf
        np.fill_diagonal(self._mu_family.P, 1.0)
        self._mu_lam = 0.0
        self._last_good = None
        self._hold_count = 0

    def pair_halfspaces(self, state, wrench, diag=None):
        """Run QP_Fd + QP_svm + tilt for every pair; returns force-space
        half-spaces [(robot, Halfspace)] in the payload frame.

        Pair problems are identically shaped and solved as one batch per
        stage; reported per-pair runtimes are the batch average.
        """
        R0 = state.R0
        rigid = self.payload.kind is PayloadKind.RIGID_BODY
        # payload-frame robot positions, all robots at once
        att = self.amap.attachments
        lengths = np.array([quad.cable_length for quad in self.quads])
        pos_pf = att - (lengths[:, None] * state.q) @ R0
        if not self.pairs:
            return []
        f_pf = R0.T @ wrench.force
        tol = self.solve_opts["tol_abs"]
        max_iter = self.solve_opts["max_iter"]

        if rigid:
            fd = self._fd_batch
            for b in range(len(self.pairs)):
                fd.q[b] = self._fd_moment_maps[b] @ wrench.moment
                fd.l[b] = f_pf
                fd.u[b] = f_pf
            t0 = time.perf_counter()
            statuses, iters, rps, rds = fd.solve(tol_abs=tol, tol_rel=tol,
                                                 max_iter=max_iter)
            self._record_batch(diag, "qp_fd", statuses, iters, t0,
                               "force split infeasible")
            svm = self._svm_batch
            for b, (i, j) in enumerate(self.pairs):
                svm.A[b, 0, :3] = pos_pf[i]
                svm.A[b, 1, :3] = pos_pf[j]
                svm.A[b, 2, :3] = self.quads[i].attachment
                svm.A[b, 3, :3] = self.quads[j].attachment
                svm.A[b, 4, :3] = self.quads[i].attachment + fd.x[b, :3]
                svm.A[b, 5, :3] = self.quads[j].attachment + fd.x[b, 3:]
            t0 = time.perf_counter()
            statuses, iters, rps, rds = svm.solve(tol_abs=tol, tol_rel=tol,
                                                  max_iter=max_iter)
            self._record_batch(diag, "qp_svm", statuses, iters, t0,
                               "cables/attachments not separable")
        else:
            svm = self._svm_batch
            Pcost = 2.0 * (np.eye(3) + self.lambda_s * np.outer(wrench.force,
                                                                wrench.force))
            for b, (i, j) in enumerate(self.pairs):
                svm.P[b] = Pcost
                svm.A[b, 0] = pos_pf[i]
                svm.A[b, 1] = pos_pf[j]
            t0 = time.perf_counter()
            statuses, iters, rps, rds = svm.solve(tol_abs=tol, tol_rel=tol,
                                                  max_iter=max_iter)
            self._record_batch(diag, "qp_svm", statuses, iters, t0,
                               "separating plane infeasible for pair")

        # compiled tilt kernels; membership is scale-free, so the normals
        # are unit-scaled here to condition the final QP
        halfspaces = []
        for b, (i, j) in enumerate(self.pairs):
            quad_i, quad_j = self.quads[i], self.quads[j]
            if rigid:
                n_ij = self._svm_batch.x[b, :3]
                a = float(self._svm_batch.x[b, 3])
                status, n_i, a_i, n_j, a_j = tiltcore.tilt_rigid_core(
                    n_ij, a, quad_i.attachment, quad_j.attachment,
                    quad_i.safety_radius, quad_j.safety_radius,
                    quad_i.cable_length, quad_j.cable_length,
                )
                if status == tiltcore.NO_INTERSECTION:
                    # unconstraining geometry: keep the untilted plane
                    # through each attachment, flagged for diagnostics
                    if diag is not None:
                        diag.fallback_pairs.append((i, j))
                    n_i, n_j = n_ij.copy(), -n_ij
                # position-space planes pass through the attachments, so the
                # force-space constraint is homogeneous
                halfspaces.append((i, Halfspace(n_i / norm3(n_i), 0.0)))
                halfspaces.append((j, Halfspace(n_j / norm3(n_j), 0.0)))
            else:
                alpha_i = tilt_angles(quad_i.safety_radius, quad_i.cable_length)
                alpha_j = tilt_angles(quad_j.safety_radius, quad_j.cable_length)
                n_i, n_j = tiltcore.tilt_pointmass_core(
                    np.ascontiguousarray(self._svm_batch.x[b]), alpha_i, alpha_j
                )
                halfspaces.append((i, Halfspace(n_i / norm3(n_i), 0.0)))
                halfspaces.append((j, Halfspace(n_j / norm3(n_j), 0.0)))
        return halfspaces

    def _record_batch(self, diag, stage, statuses, iters, t0, infeasible_msg):
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        k = len(self.pairs)
        if diag is not None:
            fam = self._fd_batch if stage == "qp_fd" else self._svm_batch
            for b, pair in enumerate(self.pairs):
                x = fam.x[b]
                obj = 0.5 * float(x @ fam.P[b] @ x) + float(fam.q[b] @ x)
                ax = fam.A[b] @ x
                active = int(np.sum((np.abs(ax - fam.l[b]) < 1e-7)
                                    | (np.abs(ax - fam.u[b]) < 1e-7)))
                diag.stages.append(
                    QpStageDiag(
                        stage=stage, pair=pair,
                        status=qp.QpStatus(int(statuses[b])).name,
                        iterations=int(iters[b]),
                        runtime_ms=elapsed_ms / k,
                        objective=obj,
                        active_constraints=active,
                    )
                )
        for b, pair in enumerate(self.pairs):
            st = qp.QpStatus(int(statuses[b]))
            if st is qp.QpStatus.PRIMAL_INFEASIBLE:
                raise InfeasiblePair(f"{infeasible_msg}: pair {pair}")
            if st is not qp.QpStatus.SOLVED:
                raise SolverFailure(f"{stage}{pair}: {st.name}")

    def _solve_mu(self, wrench, R0, halfspaces, preference):
        """QP_mu through the persistent family (in-place data update)."""
        fam = self._mu_family
        n = self.amap.n_robots
        ne = self._ne
        rhs = _rhs(wrench, R0, self.amap)
        fam.l[:ne] = rhs
        fam.u[:ne] = rhs
        fam.A[ne:] = 0.0
        for r, (robot, h) in enumerate(halfspaces):
            fam.A[ne + r, 3 * robot : 3 * robot + 3] = h.n
            fam.u[ne + r] = h.a
        lam = 0.0 if preference is None else preference.lam
        if lam != self._mu_lam:
            np.fill_diagonal(fam.P, 1.0 + 2.0 * lam)
            self._mu_lam = lam
        if preference is not None and lam > 0.0:
            fam.q[:] = -2.0 * lam * (R0.T @ preference.mu0.T).T.reshape(-1)
        else:
            fam.q[:] = 0.0
        sol = fam.solve(**self.solve_opts)
        if sol.status is qp.QpStatus.PRIMAL_INFEASIBLE:
            raise Infeasible("half-spaces exclude all equality-feasible forces")
        if not sol.solved:
            raise SolverFailure(f"allocate_qp: {sol.status.name}")
        mu = (R0 @ sol.x.reshape(n, 3).T).T
        return CableForceSet(mu), sol

    def _record(self, diag, stage, pair, sol, t0):
        if diag is None:
            return
        fam = self._mu_family
        obj = 0.5 * float(sol.x @ fam.P @ sol.x) + float(fam.q @ sol.x)
        ax = fam.A @ sol.x
        active = int(np.sum((np.abs(ax - fam.l) < 1e-7)
                            | (np.abs(ax - fam.u) < 1e-7)))
        diag.stages.append(
            QpStageDiag(
                stage=stage, pair=pair, status=sol.status.name,
                iterations=sol.iterations,
                runtime_ms=(time.perf_counter() - t0) * 1e3,
                objective=obj,
                active_constraints=active,
            )
        )

    def allocate(self, state, wrench, preference=None):
        """Full cascade. Returns (CableForceSet, AllocationDiagnostics)."""
        diag = AllocationDiagnostics()
        t_start = time.perf_counter()
        if preference is not None and preference.source is PreferenceSource.USER_PRESET:
            preference = FormationPreference(
                rescale_preset(preference.mu0, wrench.force),
                preference.lam, preference.source, preference.name,
            )
        halfspaces = self.pair_halfspaces(state, wrench, diag)
        self.last_halfspaces = halfspaces
        t0 = time.perf_counter()
        try:
            forces, sol = self._solve_mu(wrench, state.R0, halfspaces, preference)
        except Infeasible:
            if self._last_good is not None and self._hold_count < self.MAX_HOLD:
                self._hold_count += 1
                diag.infeasible_held = True
                diag.runtime_ms = (time.perf_counter() - t_start) * 1e3
                return CableForceSet(self._last_good.mu.copy()), diag
            raise
        self._record(diag, "qp_mu", (), sol, t0)
        self._hold_count = 0
        self._last_good = CableForceSet(forces.mu.copy())
        diag.runtime_ms = (time.perf_counter() - t_start) * 1e3
        return forces, diag

    def allocate_baseline(self, state, wrench):
        return allocate_baseline(wrench, state.R0, self.amap)
