"""Small 3-D geometry kit: skew maps, rotations, quaternions, re-orthonormalization.

All rotation matrices map body coordinates to world coordinates. Quaternions
are scalar-first (w, x, y, z).
"""

import numpy as np

E3 = np.array([0.0, 0.0, 1.0])


def hat(v):
    """Skew-symmetric matrix such that hat(v) @ w == cross(v, w)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def cross3(a, b):
    """Cross product of two 3-vectors (much cheaper than np.cross)."""
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def norm3(a):
    return float(np.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]))


def vee(m):
    """Inverse of hat for a skew-symmetric matrix."""
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def normalize(v, eps=0.0):
    n = np.linalg.norm(v)
    if n <= eps:
        raise ValueError("cannot normalize near-zero vector")
    return v / n


def quat_from_axis_angle(axis, angle):
    axis = normalize(np.asarray(axis, dtype=float))
    half = 0.5 * angle
    q = np.empty(4)
    q[0] = np.cos(half)
    q[1:] = np.sin(half) * axis
    return q


def quat_rotate(q, v):
    """Rotate vector v by unit quaternion q."""
    w = q[0]
    u = q[1:]
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def rotate_about_axis(v, axis, angle):
    """Rodrigues rotation of v about a (not necessarily unit) axis."""
    a = np.asarray(axis, dtype=float)
    n = norm3(a)
    if n <= 0.0:
        raise ValueError("cannot normalize near-zero vector")
    a = a / n
    c, s = np.cos(angle), np.sin(angle)
    return v * c + cross3(a, v) * s + a * (float(a @ v)) * (1.0 - c)


def rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def orthonormalize(R):
    """Re-orthonormalize a near-rotation matrix by Gram-Schmidt on columns."""
    c0 = normalize(R[:, 0])
    c1 = R[:, 1] - (c0 @ R[:, 1]) * c0
    c1 = normalize(c1)
    c2 = np.cross(c0, c1)
    return np.column_stack((c0, c1, c2))


def rotation_error(R, R_des):
    """SO(3) attitude error e_R = 1/2 vee(R_des^T R - R^T R_des)."""
    return 0.5 * vee(R_des.T @ R - R.T @ R_des)


def yaw_alignment_rotation(z_body, yaw):
    """Rotation whose third column is z_body and whose heading matches yaw.

    Standard differential-flatness construction: x_c = (cos yaw, sin yaw, 0),
    y = z x x_c, x = y x z. Requires z_body not parallel to x_c.
    """
    z = normalize(np.asarray(z_body, dtype=float))
    x_c = np.array([np.cos(yaw), np.sin(yaw), 0.0])
    y = cross3(z, x_c)
    ny = norm3(y)
    if ny < 1e-9:
        # thrust pointing along the heading axis; fall back to world y
        y = cross3(z, np.array([0.0, 1.0, 0.0]))
        ny = norm3(y)
    y = y / ny
    x = cross3(y, z)
    return np.column_stack((x, y, z))
