"""Compiled replicas of the hyperplane-tilt geometry.

allocation.tilt_hyperplanes_* stay the reference implementations (and the
tested op surface); the allocator's per-tick path uses these kernels.
test_allocation asserts the two paths agree.
"""

import numpy as np
from numba import njit

OK = 0
NO_INTERSECTION = 1


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True)
def _norm(a):
    return np.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


@njit(cache=True)
def _rodrigues(v, axis, ang):
    c = np.cos(ang)
    s = np.sin(ang)
    av = _cross(axis, v)
    d = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2]
    out = np.empty(3)
    for k in range(3):
        out[k] = v[k] * c + av[k] * s + axis[k] * d * (1.0 - c)
    return out


@njit(cache=True)
def _tilt_axis(n_ij):
    e3 = np.array([0.0, 0.0, 1.0])
    v = _cross(n_ij, e3)
    nv = _norm(v)
    if nv >= 1e-9:
        return v / nv
    e1 = np.array([1.0, 0.0, 0.0])
    v = _cross(n_ij, e1)
    nv = _norm(v)
    if nv >= 1e-9:
        return v / nv
    e2 = np.array([0.0, 1.0, 0.0])
    v = _cross(n_ij, e2)
    return v / _norm(v)


@njit(cache=True)
def tilt_pointmass_core(n_ij, alpha_i, alpha_j):
    v = _tilt_axis(n_ij)
    n_i = _rodrigues(n_ij, v, alpha_i)
    n_j = -_rodrigues(n_ij, v, -alpha_j)
    return n_i, n_j


@njit(cache=True)
def _circle_top(p_a, length, n_hat, a_hat):
    d = n_hat[0] * p_a[0] + n_hat[1] * p_a[1] + n_hat[2] * p_a[2] - a_hat
    if abs(d) > length:
        return False, np.zeros(3)
    center = np.empty(3)
    for k in range(3):
        center[k] = p_a[k] - d * n_hat[k]
    radius = np.sqrt(max(length * length - d * d, 0.0))
    up = np.empty(3)
    nz = n_hat[2]
    for k in range(3):
        up[k] = -nz * n_hat[k]
    up[2] += 1.0
    nu = _norm(up)
    if nu < 1e-12:
        nx = n_hat[0]
        for k in range(3):
            up[k] = -nx * n_hat[k]
        up[0] += 1.0
        nu = _norm(up)
        if nu < 1e-12:
            return True, center
    out = np.empty(3)
    for k in range(3):
        out[k] = center[k] + radius * up[k] / nu
    return True, out


@njit(cache=True)
def tilt_rigid_core(n_ij, a, p_ai, p_aj, r_i, r_j, l_i, l_j):
    norm = _norm(n_ij)
    n_hat = n_ij / norm
    a_hat = a / norm
    v = _tilt_axis(n_ij)

    ok_i, top_i = _circle_top(p_ai, l_i, n_hat, a_hat)
    ok_j, top_j = _circle_top(p_aj, l_j, n_hat, a_hat)
    if not (ok_i and ok_j):
        return NO_INTERSECTION, np.zeros(3), 0.0, np.zeros(3), 0.0

    alpha_i = 2.0 * np.arcsin(r_i / (2.0 * l_i))
    alpha_j = 2.0 * np.arcsin(r_j / (2.0 * l_j))

    chord = top_i - p_ai
    m = _cross(v, chord)
    nm = _norm(m)
    if nm < 1e-12:
        m = n_hat.copy()
    else:
        m = m / nm
        if m[0] * n_hat[0] + m[1] * n_hat[1] + m[2] * n_hat[2] < 0.0:
            m = -m
    n_i = _rodrigues(m, v, alpha_i)
    a_i = n_i[0] * p_ai[0] + n_i[1] * p_ai[1] + n_i[2] * p_ai[2]

    chord = top_j - p_aj
    m = _cross(v, chord)
    nm = _norm(m)
    if nm < 1e-12:
        m = n_hat.copy()
    else:
        m = m / nm
        if m[0] * n_hat[0] + m[1] * n_hat[1] + m[2] * n_hat[2] < 0.0:
            m = -m
    n_j = -_rodrigues(m, v, -alpha_j)
    a_j = n_j[0] * p_aj[0] + n_j[1] * p_aj[1] + n_j[2] * p_aj[2]
    return OK, n_i, a_i, n_j, a_j
