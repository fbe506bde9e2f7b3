"""Dense convex QP solver for small fixed-shape problem families.

    minimize   1/2 x^T P x + q^T x
    subject to l <= A x <= u

Operator-splitting (ADMM) iteration in the OSQP style: equality rows get a
stiffer penalty, the penalty is rebalanced periodically from the residual
ratio, and a terminal polish solves the active-set KKT system. The hot loop
is numba-compiled; problem shapes are fixed per family so repeated solves
reuse buffers and warm starts.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import ShapeMismatch

INF = 1e30  # treated as infinity inside the solver

_SOLVED = 1
_MAX_ITER = -2
_PRIMAL_INFEASIBLE = -3
_DUAL_INFEASIBLE = -4


class QpStatus(Enum):
    SOLVED = _SOLVED
    MAX_ITER = _MAX_ITER
    PRIMAL_INFEASIBLE = _PRIMAL_INFEASIBLE
    DUAL_INFEASIBLE = _DUAL_INFEASIBLE


class BadData(ValueError):
    """Non-finite or inconsistent problem data."""


@dataclass
class QpProblem:
    P: np.ndarray
    q: np.ndarray
    A: np.ndarray
    l: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.A = np.asarray(self.A, dtype=float).reshape(-1, self.P.shape[0])
        self.l = np.asarray(self.l, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        n = self.P.shape[0]
        m = self.A.shape[0]
        if self.P.shape != (n, n) or self.q.shape != (n,):
            raise BadData("cost shapes inconsistent")
        if self.l.shape != (m,) or self.u.shape != (m,):
            raise BadData("constraint shapes inconsistent")
        if not (np.all(np.isfinite(self.P)) and np.all(np.isfinite(self.q))):
            raise BadData("non-finite cost data")
        if not np.all(np.isfinite(self.A)):
            raise BadData("non-finite constraint matrix")
        if np.any(np.isnan(self.l)) or np.any(np.isnan(self.u)):
            raise BadData("NaN bounds")
        if np.any(self.l > self.u):
            raise BadData("lower bound exceeds upper bound")
        self.P = 0.5 * (self.P + self.P.T)
        if self.P.size and np.linalg.eigvalsh(self.P).min() < -1e-9:
            raise BadData("cost matrix not positive semi-definite")

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def m(self):
        return self.A.shape[0]

    def objective(self, x):
        return 0.5 * float(x @ self.P @ x) + float(self.q @ x)


@dataclass
class QpSolution:
    x: np.ndarray
    y: np.ndarray
    status: QpStatus
    iterations: int
    primal_residual: float
    dual_residual: float
    rho_scale: float = 1.0

    @property
    def solved(self):
        return self.status is QpStatus.SOLVED


@njit(cache=True)
def _admm_core(P, q, A, l, u, x, y, sigma, alpha, rho0, rho_scale0, eps_abs,
               eps_rel, max_iter, check_every):
    n = P.shape[0]
    m = A.shape[0]

    # Ruiz equilibration; termination below is on unscaled residuals
    dt_ = P.dtype
    d = np.ones(n, dtype=dt_)
    e = np.ones(m, dtype=dt_)
    Ps = P.copy()
    qs = q.copy()
    As = A.copy()
    ls = l.copy()
    us = u.copy()
    for _ in range(3):
        for j in range(n):
            colmax = 0.0
            for r in range(n):
                if abs(Ps[r, j]) > colmax:
                    colmax = abs(Ps[r, j])
            for r in range(m):
                if abs(As[r, j]) > colmax:
                    colmax = abs(As[r, j])
            dj = 1.0 if colmax <= 1e-12 else 1.0 / np.sqrt(colmax)
            if dj > 1e4:
                dj = 1e4
            d[j] *= dj
            for r in range(n):
                Ps[r, j] *= dj
                Ps[j, r] *= dj
            for r in range(m):
                As[r, j] *= dj
            qs[j] *= dj
        for i in range(m):
            rowmax = 0.0
            for j in range(n):
                if abs(As[i, j]) > rowmax:
                    rowmax = abs(As[i, j])
            ei = 1.0 if rowmax <= 1e-12 else 1.0 / np.sqrt(rowmax)
            if ei > 1e4:
                ei = 1e4
            e[i] *= ei
            for j in range(n):
                As[i, j] *= ei
            if ls[i] > -INF:
                ls[i] *= ei
            if us[i] < INF:
                us[i] *= ei
    # cost normalization
    cmean = 0.0
    for j in range(n):
        colmax = 0.0
        for r in range(n):
            if abs(Ps[r, j]) > colmax:
                colmax = abs(Ps[r, j])
        cmean += colmax
    cmean = cmean / n if n > 0 else 1.0
    qmax = 0.0
    for j in range(n):
        if abs(qs[j]) > qmax:
            qmax = abs(qs[j])
    cnorm = max(cmean, qmax)
    c = 1.0 if cnorm <= 1e-12 else 1.0 / cnorm
    for r in range(n):
        qs[r] *= c
        for j in range(n):
            Ps[r, j] *= c

    # scaled iterates
    xs = np.empty(n, dtype=dt_)
    for j in range(n):
        xs[j] = x[j] / d[j]
    ys = np.empty(m, dtype=dt_)
    for i in range(m):
        ys[i] = c * y[i] / e[i]

    scale = rho_scale0
    rho = np.empty(m, dtype=dt_)
    for i in range(m):
        if u[i] - l[i] < 1e-12:
            rho[i] = rho0 * 1e3 * scale
        else:
            rho[i] = rho0 * scale

    K = Ps.copy()
    for r in range(n):
        K[r, r] += sigma
    for i in range(m):
        for r in range(n):
            for cc in range(n):
                K[r, cc] += rho[i] * As[i, r] * As[i, cc]
    Kinv = np.linalg.inv(K)

    z = np.empty(m, dtype=dt_)
    ax = As @ xs
    for i in range(m):
        z[i] = min(max(ax[i], ls[i]), us[i])

    status = _MAX_ITER
    r_prim = np.inf
    r_dual = np.inf
    it = 0
    y_prev = ys.copy()
    x_prev = xs.copy()

    while it < max_iter:
        it += 1
        rhs = sigma * xs - qs + As.T @ (rho * z - ys)
        xt = Kinv @ rhs
        zt = As @ xt
        for j in range(n):
            xs[j] = alpha * xt[j] + (1.0 - alpha) * xs[j]
        for i in range(m):
            zh = alpha * zt[i] + (1.0 - alpha) * z[i]
            v = zh + ys[i] / rho[i]
            znew = min(max(v, ls[i]), us[i])
            ys[i] = ys[i] + rho[i] * (zh - znew)
            z[i] = znew

        if it % check_every == 0 or it == max_iter:
            # unscaled residuals
            ax = As @ xs
            r_prim = 0.0
            s_ax = 0.0
            s_z = 0.0
            for i in range(m):
                r = abs(ax[i] - z[i]) / e[i]
                if r > r_prim:
                    r_prim = r
                if abs(ax[i]) / e[i] > s_ax:
                    s_ax = abs(ax[i]) / e[i]
                if abs(z[i]) / e[i] > s_z:
                    s_z = abs(z[i]) / e[i]
            px = Ps @ xs
            aty = As.T @ ys
            r_dual = 0.0
            s_px = 0.0
            s_aty = 0.0
            s_q = 0.0
            for j in range(n):
                r = abs(px[j] + qs[j] + aty[j]) / (c * d[j])
                if r > r_dual:
                    r_dual = r
                if abs(px[j]) / (c * d[j]) > s_px:
                    s_px = abs(px[j]) / (c * d[j])
                if abs(aty[j]) / (c * d[j]) > s_aty:
                    s_aty = abs(aty[j]) / (c * d[j])
                if abs(qs[j]) / (c * d[j]) > s_q:
                    s_q = abs(qs[j]) / (c * d[j])
            eps_p = eps_abs + eps_rel * max(s_ax, s_z)
            eps_d = eps_abs + eps_rel * max(s_px, max(s_aty, s_q))
            if r_prim <= eps_p and r_dual <= eps_d:
                status = _SOLVED
                break

            # primal infeasibility certificate (scaled quantities; the cone
            # tests are invariant under positive diagonal scaling)
            ndy = 0.0
            for i in range(m):
                dy = (ys[i] - y_prev[i]) * e[i] / c
                if abs(dy) > ndy:
                    ndy = abs(dy)
            if ndy > 1e-12:
                natdy = 0.0
                for j in range(n):
                    acc = 0.0
                    for i in range(m):
                        acc += As[i, j] * (ys[i] - y_prev[i])
                    acc = abs(acc) / (c * d[j])
                    if acc > natdy:
                        natdy = acc
                support = 0.0
                bounded = True
                for i in range(m):
                    dy = (ys[i] - y_prev[i]) * e[i] / c
                    if dy > 0.0:
                        if u[i] >= INF:
                            if dy > 1e-6 * ndy:
                                bounded = False
                        else:
                            support += u[i] * dy
                    elif dy < 0.0:
                        if l[i] <= -INF:
                            if -dy > 1e-6 * ndy:
                                bounded = False
                        else:
                            support += l[i] * dy
                if bounded and natdy <= 1e-6 * ndy and support <= -1e-6 * ndy:
                    status = _PRIMAL_INFEASIBLE
                    break

            # dual infeasibility certificate
            ndx = 0.0
            for j in range(n):
                dx = (xs[j] - x_prev[j]) * d[j]
                if abs(dx) > ndx:
                    ndx = abs(dx)
            if ndx > 1e-12:
                npdx = 0.0
                qdx = 0.0
                for j in range(n):
                    acc = 0.0
                    for k in range(n):
                        acc += Ps[j, k] * (xs[k] - x_prev[k])
                    acc = abs(acc) / (c * d[j])
                    if acc > npdx:
                        npdx = acc
                    qdx += qs[j] * (xs[j] - x_prev[j]) / c
                directions_ok = True
                for i in range(m):
                    adx = 0.0
                    for j in range(n):
                        adx += As[i, j] * (xs[j] - x_prev[j])
                    adx /= e[i]
                    if u[i] >= INF and l[i] <= -INF:
                        continue
                    if u[i] >= INF:
                        if adx < -1e-6 * ndx:
                            directions_ok = False
                    elif l[i] <= -INF:
                        if adx > 1e-6 * ndx:
                            directions_ok = False
                    else:
                        if abs(adx) > 1e-6 * ndx:
                            directions_ok = False
                if directions_ok and npdx <= 1e-6 * ndx and qdx <= -1e-6 * ndx:
                    status = _DUAL_INFEASIBLE
                    break

            for i in range(m):
                y_prev[i] = ys[i]
            for j in range(n):
                x_prev[j] = xs[j]

            # periodic penalty rebalancing from the scaled residual ratio
            if it % (check_every * 2) == 0:
                rp_s = 0.0
                for i in range(m):
                    r = abs(ax[i] - z[i])
                    if r > rp_s:
                        rp_s = r
                rd_s = 0.0
                for j in range(n):
                    r = abs(px[j] + qs[j] + aty[j])
                    if r > rd_s:
                        rd_s = r
                if rd_s > 1e-18 and rp_s > 1e-18:
                    ratio = np.sqrt(rp_s / rd_s)
                    ratio = min(max(ratio, 0.2), 5.0)
                    if ratio < 0.9 or ratio > 1.1:
                        scale *= ratio
                        scale = min(max(scale, 1e-4), 1e4)
                        for i in range(m):
                            if u[i] - l[i] < 1e-12:
                                rho[i] = rho0 * 1e3 * scale
                            else:
                                rho[i] = rho0 * scale
                        K = Ps.copy()
                        for r in range(n):
                            K[r, r] += sigma
                        for i in range(m):
                            for r in range(n):
                                for cc in range(n):
                                    K[r, cc] += rho[i] * As[i, r] * As[i, cc]
                        Kinv = np.linalg.inv(K)

    # unscale
    xout = np.empty(n)
    for j in range(n):
        xout[j] = xs[j] * d[j]
    yout = np.empty(m)
    for i in range(m):
        yout[i] = ys[i] * e[i] / c
    return xout, yout, status, it, r_prim, r_dual, scale


@njit(cache=True)
def _admm_batch(Ps, qs, As, ls, us, xs, ys, rho_scales, sigma, alpha, rho0,
                eps_abs, eps_rel, max_iter, check_every):
    """Solve a stack of identically shaped problems in one compiled call."""
    k = Ps.shape[0]
    statuses = np.empty(k, dtype=np.int64)
    iters = np.empty(k, dtype=np.int64)
    rps = np.empty(k)
    rds = np.empty(k)
    for b in range(k):
        x, y, st, it, rp, rd, sc = _admm_core(
            Ps[b], qs[b], As[b], ls[b], us[b], xs[b].copy(), ys[b].copy(),
            sigma, alpha, rho0, rho_scales[b], eps_abs, eps_rel,
            max_iter, check_every,
        )
        xs[b] = x
        ys[b] = y
        rho_scales[b] = sc
        statuses[b] = st
        iters[b] = it
        rps[b] = rp
        rds[b] = rd
    return statuses, iters, rps, rds


class BatchFamily:
    """Stack of fixed-shape problems solved in one compiled call.

    Buffers are owned and updated in place; warm starts and penalty scales
    persist per slot. Core-reported residuals are trusted (the core
    terminates on unscaled criteria at half the requested tolerance).
    """

    def __init__(self, count, n, m):
        self.count = count
        self.P = np.zeros((count, n, n))
        self.q = np.zeros((count, n))
        self.A = np.zeros((count, m, n))
        self.l = np.full((count, m), -INF)
        self.u = np.full((count, m), INF)
        self.x = np.zeros((count, n))
        self.y = np.zeros((count, m))
        self.rho_scales = np.ones(count)
        self.has_warm = False

    def reset_warm(self):
        self.x[...] = 0.0
        self.y[...] = 0.0
        self.rho_scales[...] = 1.0
        self.has_warm = False

    def solve(self, tol_abs=1e-6, tol_rel=1e-6, max_iter=4000):
        if not self.has_warm:
            self.x[...] = 0.0
            self.y[...] = 0.0
        eps = max(tol_abs, 1e-9)
        l = np.clip(self.l, -INF, INF)
        u = np.clip(self.u, -INF, INF)
        statuses, iters, rps, rds = _admm_batch(
            self.P, self.q, self.A, l, u, self.x, self.y, self.rho_scales,
            1e-6, 1.6, 0.1, eps * 0.5, tol_rel * 0.5, max_iter, 10,
        )
        # a stale warm start can stall ADMM; retry those slots cold
        stalled = statuses == _MAX_ITER
        if self.has_warm and np.any(stalled):
            idx = np.flatnonzero(stalled)
            xs = np.zeros((len(idx),) + self.x.shape[1:])
            ys = np.zeros((len(idx),) + self.y.shape[1:])
            rs = np.ones(len(idx))
            st2, it2, rp2, rd2 = _admm_batch(
                np.ascontiguousarray(self.P[stalled]),
                np.ascontiguousarray(self.q[stalled]),
                np.ascontiguousarray(self.A[stalled]),
                np.ascontiguousarray(l[stalled]),
                np.ascontiguousarray(u[stalled]),
                xs, ys, rs,
                1e-6, 1.6, 0.1, eps * 0.5, tol_rel * 0.5, max_iter, 10,
            )
            for kk, b in enumerate(idx):
                self.x[b] = xs[kk]
                self.y[b] = ys[kk]
                self.rho_scales[b] = rs[kk]
                statuses[b] = st2[kk]
                iters[b] += it2[kk]
                rps[b] = rp2[kk]
                rds[b] = rd2[kk]
        # accept plateaued iterates that meet the tolerance (the core's
        # reported residuals upper-bound the KKT residuals), then polish
        # any remaining stragglers through the direct KKT solve
        for b in range(self.count):
            if statuses[b] != _MAX_ITER:
                continue
            if rps[b] <= tol_abs and rds[b] <= tol_abs:
                statuses[b] = _SOLVED
                continue
            try:
                xp, yp = _polish(
                    np.ascontiguousarray(self.P[b]),
                    np.ascontiguousarray(self.q[b]),
                    np.ascontiguousarray(self.A[b]), l[b], u[b],
                    self.x[b].copy(), self.y[b].copy(),
                )
            except np.linalg.LinAlgError:
                continue
            if not (np.all(np.isfinite(xp)) and np.all(np.isfinite(yp))):
                continue
            rp, rd = _residuals(self.P[b], self.q[b], self.A[b], l[b], u[b], xp, yp)
            eps_p, eps_d = _tolerances(self.P[b], self.q[b], self.A[b],
                                       l[b], u[b], xp, yp, tol_abs, tol_rel)
            if rp <= eps_p and rd <= eps_d:
                self.x[b] = xp
                self.y[b] = yp
                statuses[b] = _SOLVED
                rps[b] = rp
                rds[b] = rd
        self.has_warm = bool(np.all(statuses == _SOLVED))
        return statuses, iters, rps, rds


@njit(cache=True)
def _polish(P, q, A, l, u, x, y):
    """Equality-KKT solve on the detected active set; returns refined (x, y)."""
    n = P.shape[0]
    m = A.shape[0]
    tol = 1e-7
    idx = np.empty(m, dtype=np.int64)
    b = np.empty(m)
    k = 0
    for i in range(m):
        lower = abs((A[i] @ x) - l[i]) < max(1e-5, tol) or y[i] < -tol
        upper = abs((A[i] @ x) - u[i]) < max(1e-5, tol) or y[i] > tol
        if u[i] - l[i] < 1e-12:
            idx[k] = i
            b[k] = l[i]
            k += 1
        elif lower and not upper:
            idx[k] = i
            b[k] = l[i]
            k += 1
        elif upper and not lower:
            idx[k] = i
            b[k] = u[i]
            k += 1
    G = np.empty((k, n))
    for r in range(k):
        G[r] = A[idx[r]]
    KKT = np.zeros((n + k, n + k))
    KKT[:n, :n] = P + 1e-9 * np.eye(n)
    for r in range(k):
        KKT[:n, n + r] = G[r]
        KKT[n + r, :n] = G[r]
        KKT[n + r, n + r] = -1e-9
    rhs = np.empty(n + k)
    rhs[:n] = -q
    rhs[n:] = b[:k]
    # least squares: redundant active constraints (e.g. antiparallel pairs)
    # make the KKT matrix singular but the system stays consistent
    sol = np.linalg.lstsq(KKT, rhs)[0]
    x_new = sol[:n]
    y_new = np.zeros(m)
    for r in range(k):
        y_new[idx[r]] = sol[n + r]
    return x_new, y_new


def _residuals(P, q, A, l, u, x, y):
    ax = A @ x
    r_prim = float(np.max(np.abs(ax - np.clip(ax, l, u)))) if len(ax) else 0.0
    r_dual = float(np.max(np.abs(P @ x + q + A.T @ y)))
    return r_prim, r_dual


def _tolerances(P, q, A, l, u, x, y, tol_abs, tol_rel):
    """Termination thresholds in the OSQP style (absolute + relative)."""
    if len(l):
        ax = A @ x
        eps_p = tol_abs + tol_rel * max(
            float(np.max(np.abs(ax))), float(np.max(np.abs(np.clip(ax, l, u))))
        )
        aty = float(np.max(np.abs(A.T @ y)))
    else:
        eps_p = tol_abs
        aty = 0.0
    eps_d = tol_abs + tol_rel * max(
        float(np.max(np.abs(P @ x))) if len(x) else 0.0,
        aty,
        float(np.max(np.abs(q))) if len(q) else 0.0,
    )
    return eps_p, eps_d


def _solve_arrays(P, q, A, l, u, warm, tol_abs, tol_rel, max_iter, polish, dtype,
                  rho_scale=1.0):
    n = P.shape[0]
    m = A.shape[0]
    x0 = np.zeros(n) if warm is None else np.asarray(warm[0], dtype=float)
    y0 = np.zeros(m) if warm is None else np.asarray(warm[1], dtype=float)
    if x0.shape != (n,) or y0.shape != (m,):
        raise ShapeMismatch("warm start shapes do not match problem")

    l = np.clip(l, -INF, INF)
    u = np.clip(u, -INF, INF)
    dt = np.dtype(dtype)
    args = (
        np.ascontiguousarray(P, dtype=dt), np.ascontiguousarray(q, dtype=dt),
        np.ascontiguousarray(A, dtype=dt), np.ascontiguousarray(l, dtype=dt),
        np.ascontiguousarray(u, dtype=dt), np.ascontiguousarray(x0, dtype=dt),
        np.ascontiguousarray(y0, dtype=dt),
    )
    eps = max(tol_abs, 1e-9) if dt == np.float64 else max(tol_abs, 1e-5)
    x, y, status, iters, r_prim, r_dual, rho_scale_out = _admm_core(
        *args, dt.type(1e-6), dt.type(1.6), dt.type(0.1), dt.type(rho_scale),
        dt.type(eps * 0.5), dt.type(tol_rel * 0.5), max_iter, 25,
    )
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    # polish when asked for, and always as a rescue when the splitting
    # plateaued on a degenerate face just above tolerance
    if m and ((status == _SOLVED and polish) or status == _MAX_ITER):
        try:
            xp, yp = _polish(
                np.ascontiguousarray(P, dtype=float), np.asarray(q, dtype=float),
                np.ascontiguousarray(A, dtype=float), l, u, x, y,
            )
            if np.all(np.isfinite(xp)) and np.all(np.isfinite(yp)):
                rp_new, rd_new = _residuals(P, q, A, l, u, xp, yp)
                rp_old, rd_old = _residuals(P, q, A, l, u, x, y)
                if max(rp_new, rd_new) <= max(rp_old, rd_old):
                    x, y = xp, yp
        except np.linalg.LinAlgError:
            pass

    if status == _SOLVED and not polish:
        # the core already terminated on unscaled residuals at half the
        # requested tolerance; its reported values bound the true ones
        sol = QpSolution(x, y, QpStatus(_SOLVED), iters, float(r_prim),
                         float(r_dual))
        sol.rho_scale = float(rho_scale_out)
        return sol
    r_prim, r_dual = _residuals(P, q, A, l, u, x, y)
    if status in (_SOLVED, _MAX_ITER):
        # accept plateaued iterates that still meet the requested tolerance
        eps_p, eps_d = _tolerances(P, q, A, l, u, x, y, tol_abs, tol_rel)
        status = _SOLVED if (r_prim <= eps_p and r_dual <= eps_d) else _MAX_ITER
    sol = QpSolution(x, y, QpStatus(status), iters, r_prim, r_dual)
    sol.rho_scale = float(rho_scale_out)
    return sol


def solve(problem, warm=None, tol_abs=1e-6, tol_rel=1e-6, max_iter=4000,
          polish=True, dtype=np.float64):
    """Solve a QpProblem. warm, if given, is an (x, y) pair.

    Solved solutions satisfy the KKT residual bounds
    ||Ax - clamp(Ax, l, u)||_inf <= tol and ||Px + q + A^T y||_inf <= tol.
    Infeasibility is reported through the status, never raised.
    """
    return _solve_arrays(problem.P, problem.q, problem.A, problem.l, problem.u,
                         warm, tol_abs, tol_rel, max_iter, polish, dtype)


class ProblemFamily:
    """Fixed-shape QP whose data (not dimensions) changes between solves.

    Buffers are allocated once; update() copies new data in place and
    rejects any shape change. Warm-start slots hold the last successful
    primal/dual pair.
    """

    def __init__(self, n, m):
        self.n = n
        self.m = m
        self.P = np.zeros((n, n))
        self.q = np.zeros(n)
        self.A = np.zeros((m, n))
        self.l = np.full(m, -np.inf)
        self.u = np.full(m, np.inf)
        self.warm_x = np.zeros(n)
        self.warm_y = np.zeros(m)
        self.warm_rho_scale = 1.0
        self.has_warm = False

    def update(self, P=None, q=None, A=None, l=None, u=None):
        for name, buf, new in (
            ("P", self.P, P), ("q", self.q, q), ("A", self.A, A),
            ("l", self.l, l), ("u", self.u, u),
        ):
            if new is None:
                continue
            new = np.asarray(new, dtype=float)
            if new.shape != buf.shape:
                raise ShapeMismatch(
                    f"{name}: expected {buf.shape}, got {new.shape}"
                )
            buf[...] = new

    def solve(self, tol_abs=1e-6, tol_rel=1e-6, max_iter=4000, polish=True,
              dtype=np.float64):
        # data-only updates cannot change shapes, so the full QpProblem
        # validation (eigendecomposition) is skipped on this hot path
        warm = (self.warm_x, self.warm_y) if self.has_warm else None
        sol = _solve_arrays(self.P, self.q, self.A, self.l, self.u, warm,
                            tol_abs, tol_rel, max_iter, polish, dtype,
                            rho_scale=self.warm_rho_scale)
        if warm is not None and sol.status is QpStatus.MAX_ITER:
            # stale warm start stalled the splitting; retry cold
            sol = _solve_arrays(self.P, self.q, self.A, self.l, self.u, None,
                                tol_abs, tol_rel, max_iter, polish, dtype)
        if sol.solved:
            self.warm_x[...] = sol.x
            self.warm_y[...] = sol.y
            self.warm_rho_scale = sol.rho_scale
            self.has_warm = True
        return sol

    def reset_warm(self):
        self.warm_x[...] = 0.0
        self.warm_y[...] = 0.0
        self.warm_rho_scale = 1.0
        self.has_warm = False
