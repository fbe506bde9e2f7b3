import numpy as np

from paylift.geometry import rot_z
from paylift.params import PayloadKind, PayloadParams, QuadrotorParams
from paylift.state import (
    FullSystemState,
    hover_state,
    mechanical_energy,
    min_pairwise_distance,
    quad_position,
    quad_velocity,
)


def _single_state(p0=(0, 0, 1.0), R0=None, q=(0, 0, 1.0), w=(0, 0, 0.0),
                  v0=(0, 0, 0.0), w0=(0, 0, 0.0)):
    return FullSystemState(
        p0=np.asarray(p0, float), v0=np.asarray(v0, float),
        R0=np.eye(3) if R0 is None else R0, w0=np.asarray(w0, float),
        q=[q], w=[w], R=np.eye(3)[None], omega=np.zeros((1, 3)),
    )


def test_quad_position_straight_down():
    quad = QuadrotorParams(cable_length=0.5)
    state = _single_state()
    assert np.allclose(quad_position(state, quad, 0), [0.0, 0.0, 0.5])


def test_quad_position_attachment_offset():
    quad = QuadrotorParams(cable_length=0.5, attachment=[0.1, 0.0, 0.0])
    state = _single_state()
    assert np.allclose(quad_position(state, quad, 0), [0.1, 0.0, 0.5])


def test_quad_position_rotated_payload():
    quad = QuadrotorParams(cable_length=0.5, attachment=[0.1, 0.0, 0.0])
    state = _single_state(R0=rot_z(np.pi / 2))
    assert np.allclose(quad_position(state, quad, 0), [0.0, 0.1, 0.5], atol=1e-12)


def test_quad_velocity_at_rest():
    quad = QuadrotorParams(cable_length=0.5)
    state = _single_state()
    assert np.allclose(quad_velocity(state, quad, 0), np.zeros(3))


def test_quad_velocity_pure_translation():
    quad = QuadrotorParams(cable_length=0.5)
    state = _single_state(v0=(1, 0, 0))
    assert np.allclose(quad_velocity(state, quad, 0), [1.0, 0.0, 0.0])


def test_quad_velocity_cable_rate():
    quad = QuadrotorParams(cable_length=0.5)
    state = _single_state(w=(0, 1, 0))
    # -l (w x q) = -0.5 * (0,1,0)x(0,0,1) = (-0.5, 0, 0)
    assert np.allclose(quad_velocity(state, quad, 0), [-0.5, 0.0, 0.0])


def test_energy_at_rest_is_potential_only():
    payload = PayloadParams(mass=0.01)
    quads = [QuadrotorParams(cable_length=0.5)]
    state = hover_state(payload, quads, p0=(0, 0, 1.0))
    e = mechanical_energy(state, payload, quads)
    expected = 0.01 * 9.81 * 1.0 + 0.034 * 9.81 * 1.5
    assert np.isclose(e, expected, rtol=1e-12)


def test_energy_kinetic_quadratic():
    payload = PayloadParams(mass=0.01)
    quads = [QuadrotorParams(cable_length=0.5)]
    state = hover_state(payload, quads, p0=(0, 0, 1.0))
    rng = np.random.default_rng(0)
    state.v0 = rng.normal(size=3)
    state.w[0] = np.cross(state.q[0], rng.normal(size=3))  # keep w orth. to q
    state.omega[0] = rng.normal(size=3)
    e0 = mechanical_energy(state, payload, quads)
    pe = mechanical_energy(
        hover_state(payload, quads, p0=(0, 0, 1.0)), payload, quads
    )
    doubled = state.copy()
    doubled.v0 *= 2.0
    doubled.w *= 2.0
    doubled.omega *= 2.0
    e1 = mechanical_energy(doubled, payload, quads)
    assert np.isclose(e1 - pe, 4.0 * (e0 - pe), rtol=1e-10)


def test_renormalize_restores_invariants():
    payload = PayloadParams(kind=PayloadKind.RIGID_BODY, mass=0.01,
                            inertia=np.diag([1e-5, 1e-5, 2e-5]))
    quads = [QuadrotorParams(cable_length=0.5, attachment=[0.05, 0, 0]),
             QuadrotorParams(cable_length=0.5, attachment=[-0.05, 0, 0])]
    state = hover_state(payload, quads)
    rng = np.random.default_rng(1)
    state.q += 1e-3 * rng.normal(size=state.q.shape)
    state.w += rng.normal(size=state.w.shape)
    state.R0 += 1e-3 * rng.normal(size=(3, 3))
    state.renormalize()
    assert np.allclose(np.linalg.norm(state.q, axis=1), 1.0, atol=1e-12)
    assert np.allclose(np.sum(state.q * state.w, axis=1), 0.0, atol=1e-12)
    assert np.allclose(state.R0.T @ state.R0, np.eye(3), atol=1e-12)


def test_min_pairwise_distance():
    payload = PayloadParams(mass=0.01)
    quads = [QuadrotorParams(cable_length=l, safety_radius=0.1)
             for l in (0.25, 0.5, 0.75)]
    state = hover_state(payload, quads)
    # all cables vertical: distances are the cable-length gaps
    assert np.isclose(min_pairwise_distance(state, quads), 0.25)
