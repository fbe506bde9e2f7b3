"""Numba-compiled fixed-step integrator core.

Same model as dynamics.step (which stays as the plain-numpy reference);
this path packs the rig once and advances whole control periods without
re-entering Python. dynamics tests assert the two paths agree.
"""

import numpy as np
from numba import njit

from .errors import NonFiniteState
from .params import PayloadKind


@njit(cache=True, fastmath=False)
def _gram_schmidt(R):
    c0 = R[:, 0] / np.sqrt(R[0, 0] ** 2 + R[1, 0] ** 2 + R[2, 0] ** 2)
    d = c0[0] * R[0, 1] + c0[1] * R[1, 1] + c0[2] * R[2, 1]
    c1 = np.empty(3)
    for k in range(3):
        c1[k] = R[k, 1] - d * c0[k]
    n1 = np.sqrt(c1[0] ** 2 + c1[1] ** 2 + c1[2] ** 2)
    for k in range(3):
        c1[k] /= n1
    out = np.empty((3, 3))
    out[:, 0] = c0
    out[:, 1] = c1
    out[0, 2] = c0[1] * c1[2] - c0[2] * c1[1]
    out[1, 2] = c0[2] * c1[0] - c0[0] * c1[2]
    out[2, 2] = c0[0] * c1[1] - c0[1] * c1[0]
    return out


@njit(cache=True, fastmath=False)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True, fastmath=False)
def _step_core(n_steps, dt, g_vec, rigid, m0, J0, masses, lengths, attach,
               B0, B0inv, rate_min, rate_max, J_quad,
               p0, v0, R0, w0, q, w, R, omega, thrusts, torques):
    n = q.shape[0]
    sat_count = 0
    tensions = np.zeros(n)

    # motor clamp once per control period (inputs held constant)
    f_act = np.empty(n)
    tau_act = np.empty((n, 3))
    k_motors = B0.shape[2]
    eta = np.empty(4)
    for i in range(n):
        eta[0] = thrusts[i]
        eta[1] = torques[i, 0]
        eta[2] = torques[i, 1]
        eta[3] = torques[i, 2]
        wm = B0inv[i] @ eta
        clamped = False
        for j in range(k_motors):
            if wm[j] < rate_min[i]:
                wm[j] = rate_min[i]
                clamped = True
            elif wm[j] > rate_max[i]:
                wm[j] = rate_max[i]
                clamped = True
        if clamped:
            eta = B0[i] @ wm
            sat_count += 1
        f_act[i] = eta[0]
        tau_act[i, 0] = eta[1]
        tau_act[i, 1] = eta[2]
        tau_act[i, 2] = eta[3]

    u = np.empty((n, 3))
    a_att = np.empty((n, 3))

    for _ in range(n_steps):
        for i in range(n):
            for k in range(3):
                u[i, k] = f_act[i] * R[i, k, 2]

        if rigid == 0:
            M = np.zeros((3, 3))
            b = np.empty(3)
            for k in range(3):
                M[k, k] = m0
                b[k] = m0 * g_vec[k]
            for i in range(n):
                wsq = w[i, 0] ** 2 + w[i, 1] ** 2 + w[i, 2] ** 2
                qg = 0.0
                qu = 0.0
                for k in range(3):
                    qg += q[i, k] * g_vec[k]
                    qu += q[i, k] * u[i, k]
                coef = masses[i] * qg + qu - masses[i] * lengths[i] * wsq
                for r in range(3):
                    b[r] += coef * q[i, r]
                    for c in range(3):
                        M[r, c] += masses[i] * q[i, r] * q[i, c]
            a0 = np.linalg.solve(M, b)
            dw0 = np.zeros(3)
            for i in range(n):
                for k in range(3):
                    a_att[i, k] = a0[k]
        else:
            A = np.zeros((6, 6))
            bvec = np.zeros(6)
            for r in range(3):
                A[r, r] = m0
                bvec[r] = m0 * g_vec[r]
                for c in range(3):
                    A[3 + r, 3 + c] = J0[r, c]
            J0w0 = J0 @ w0
            tmp = _cross(w0, J0w0)
            for r in range(3):
                bvec[3 + r] -= tmp[r]
            cent = np.empty((n, 3))
            for i in range(n):
                rho = attach[i]
                wxr = _cross(w0, rho)
                wwr = _cross(w0, wxr)
                for k in range(3):
                    cent[i, k] = R0[k, 0] * wwr[0] + R0[k, 1] * wwr[1] + R0[k, 2] * wwr[2]
            for i in range(n):
                wsq = w[i, 0] ** 2 + w[i, 1] ** 2 + w[i, 2] ** 2
                # payload-frame direction of this cable
                qp = np.empty(3)
                for r in range(3):
                    qp[r] = R0[0, r] * q[i, 0] + R0[1, r] * q[i, 1] + R0[2, r] * q[i, 2]
                rho = attach[i]
                rxq = _cross(rho, qp)  # rho_hat @ (R0^T q)
                qg = 0.0
                qu = 0.0
                qcent = 0.0
                for k in range(3):
                    qg += q[i, k] * g_vec[k]
                    qu += q[i, k] * u[i, k]
                    qcent += q[i, k] * cent[i, k]
                mgu_coef = masses[i] * qg + qu
                # translational block
                for r in range(3):
                    for c in range(3):
                        A[r, c] += masses[i] * q[i, r] * q[i, c]
                # coupling: -m q q^T R0 rho_hat == +m q rxq^T with rxq = rho x (R0^T q)
                for r in range(3):
                    for c in range(3):
                        A[r, 3 + c] += masses[i] * q[i, r] * rxq[c]
                        A[3 + c, r] += masses[i] * q[i, r] * rxq[c]
                # -m rho_hat R0^T q q^T R0 rho_hat == +m rxq rxq^T
                for r in range(3):
                    for c in range(3):
                        A[3 + r, 3 + c] += masses[i] * rxq[r] * rxq[c]
                tension_known = masses[i] * qcent + masses[i] * lengths[i] * wsq - mgu_coef
                coef = mgu_coef - masses[i] * lengths[i] * wsq - masses[i] * qcent
                for r in range(3):
                    bvec[r] += coef * q[i, r]
                    bvec[3 + r] -= rxq[r] * tension_known
            sol = np.linalg.solve(A, bvec)
            a0 = sol[:3]
            dw0 = sol[3:]
            for i in range(n):
                rho = attach[i]
                dwxr = _cross(dw0, rho)
                for k in range(3):
                    a_att[i, k] = a0[k] + cent[i, k] + (
                        R0[k, 0] * dwxr[0] + R0[k, 1] * dwxr[1] + R0[k, 2] * dwxr[2]
                    )

        # cable angular accelerations and tensions
        for i in range(n):
            rel = np.empty(3)
            for k in range(3):
                rel[k] = a_att[i, k] - g_vec[k] - u[i, k] / masses[i]
            dwc = _cross(q[i], rel)
            wsq = w[i, 0] ** 2 + w[i, 1] ** 2 + w[i, 2] ** 2
            qa = 0.0
            qgu = 0.0
            for k in range(3):
                qa += q[i, k] * a_att[i, k]
                qgu += q[i, k] * (masses[i] * g_vec[k] + u[i, k])
            tensions[i] = masses[i] * (qa + lengths[i] * wsq) - qgu

            qdot =_cross(w[i], q[i])
            for k in range(3):
                q[i, k] += dt * qdot[k]
                w[i, k] += dt * dwc[k] / lengths[i]
            qn = np.sqrt(q[i, 0] ** 2 + q[i, 1] ** 2 + q[i, 2] ** 2)
            dotwq = 0.0
            for k in range(3):
                q[i, k] /= qn
            for k in range(3):
                dotwq += w[i, k] * q[i, k]
            for k in range(3):
                w[i, k] -= dotwq * q[i, k]

        for k in range(3):
            p0[k] += dt * v0[k]
            v0[k] += dt * a0[k]
        if rigid == 1:
            Rdot = np.empty((3, 3))
            for r in range(3):
                Rdot[r, 0] = R0[r, 1] * w0[2] - R0[r, 2] * w0[1]
                Rdot[r, 1] = R0[r, 2] * w0[0] - R0[r, 0] * w0[2]
                Rdot[r, 2] = R0[r, 0] * w0[1] - R0[r, 1] * w0[0]
            for r in range(3):
                for c in range(3):
                    R0[r, c] += dt * Rdot[r, c]
            R0[:, :] = _gram_schmidt(R0)
            for r in range(3):
                w0[r] += dt * dw0[r]

        for i in range(n):
            om = omega[i]
            Rdot = np.empty((3, 3))
            for r in range(3):
                Rdot[r, 0] = R[i, r, 1] * om[2] - R[i, r, 2] * om[1]
                Rdot[r, 1] = R[i, r, 2] * om[0] - R[i, r, 0] * om[2]
                Rdot[r, 2] = R[i, r, 0] * om[1] - R[i, r, 1] * om[0]
            for r in range(3):
                for c in range(3):
                    R[i, r, c] += dt * Rdot[r, c]
            R[i, :, :] = _gram_schmidt(R[i])
            Jom = np.empty(3)
            for k in range(3):
                Jom[k] = J_quad[i, k] * om[k]
            gyro = _cross(Jom, om)
            for k in range(3):
                omega[i, k] = om[k] + dt * (gyro[k] + tau_act[i, k]) / J_quad[i, k]

    finite = True
    total = 0.0
    for k in range(3):
        total += p0[k] + v0[k] + w0[k]
    for i in range(n):
        for k in range(3):
            total += q[i, k] + w[i, k] + omega[i, k]
        for r in range(3):
            for c in range(3):
                total += R[i, r, c]
    for r in range(3):
        for c in range(3):
            total += R0[r, c]
    if not np.isfinite(total):
        finite = False
    return sat_count, tensions, finite


class Simulator:
    """Packed-rig fast integrator. Owns its state arrays exclusively."""

    def __init__(self, payload, quads, config, state):
        self.payload = payload
        self.quads = quads
        self.config = config
        n = len(quads)
        ks = {quad.B0.shape[1] for quad in quads}
        if len(ks) != 1:
            raise ValueError("all quadrotors must share a motor count")
        k = ks.pop()
        self._masses = np.array([quad.mass for quad in quads])
        self._lengths = np.array([quad.cable_length for quad in quads])
        self._attach = np.array([quad.attachment for quad in quads])
        self._B0 = np.array([quad.B0 for quad in quads])
        self._B0inv = np.array([
            np.linalg.inv(quad.B0) if quad.B0.shape[0] == quad.B0.shape[1]
            else np.linalg.pinv(quad.B0)
            for quad in quads
        ])
        self._rate_min = np.array([quad.motor_rate_min for quad in quads])
        self._rate_max = np.array([quad.motor_rate_max for quad in quads])
        self._J_quad = np.array([quad.inertia_diag for quad in quads])
        self._rigid = 1 if payload.kind is PayloadKind.RIGID_BODY else 0
        self._J0 = np.ascontiguousarray(payload.inertia, dtype=float)
        self.state = state.copy()
        self.saturation_count = 0
        self.last_tensions = np.zeros(n)

    def advance(self, thrusts, torques, n_steps):
        """Run n_steps Euler steps holding the given inputs."""
        s = self.state
        sat, tensions, finite = _step_core(
            n_steps, self.config.dt, self.config.gravity_vec, self._rigid,
            self.payload.mass, self._J0, self._masses, self._lengths,
            self._attach, self._B0, self._B0inv, self._rate_min,
            self._rate_max, self._J_quad,
            s.p0, s.v0, s.R0, s.w0, s.q, s.w, s.R, s.omega,
            np.asarray(thrusts, dtype=float),
            np.asarray(torques, dtype=float).reshape(len(self.quads), 3),
        )
        self.saturation_count += int(sat)
        self.last_tensions = tensions
        if not finite:
            raise NonFiniteState("state diverged")
        return self.state
