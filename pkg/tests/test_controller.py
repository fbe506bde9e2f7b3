import numpy as np
import pytest

from paylift.allocation import CableForceSet
from paylift.control import (
    ControllerGains,
    ReferenceSetpoint,
    attitude_loop,
    cable_control,
    control_step,
    desired_directions,
    payload_wrench,
)
from paylift.errors import DegenerateForce
from paylift.geometry import rot_x
from paylift.params import PayloadKind, PayloadParams, QuadrotorParams
from paylift.state import hover_state

rng = np.random.default_rng(23)


def test_payload_wrench_gravity_compensation():
    payload = PayloadParams(mass=0.01)
    state = hover_state(payload, [QuadrotorParams()], p0=(0, 0, 1.0))
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    w = payload_wrench(state, ref, payload, ControllerGains())
    assert np.allclose(w.force, [0, 0, 0.0981], atol=1e-12)
    assert np.allclose(w.moment, 0.0)


def test_payload_wrench_pd_law():
    payload = PayloadParams(mass=0.01)
    state = hover_state(payload, [QuadrotorParams()], p0=(0, 0, 0.9))
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    gains = ControllerGains(kp_pos=6.25, kd_pos=5.0)
    w = payload_wrench(state, ref, payload, gains)
    assert np.allclose(w.force, [0, 0, 0.01 * (9.81 + 0.625)], atol=1e-12)


def test_payload_wrench_feedforward():
    payload = PayloadParams(mass=0.01)
    state = hover_state(payload, [QuadrotorParams()], p0=(0, 0, 1.0))
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0], ddp0r=[1.0, 0, 0])
    w = payload_wrench(state, ref, payload, ControllerGains())
    assert np.allclose(w.force, [0.01, 0, 0.0981], atol=1e-12)


def test_payload_wrench_gain_zero_is_pure_feedforward():
    payload = PayloadParams(mass=0.01)
    state = hover_state(payload, [QuadrotorParams()], p0=(0.3, -0.2, 0.7))
    state.v0 = np.array([0.5, 0.1, -0.2])
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    gains = ControllerGains(kp_pos=0.0, kd_pos=0.0)
    w = payload_wrench(state, ref, payload, gains)
    assert np.allclose(w.force, [0, 0, 0.0981], atol=1e-15)


def test_desired_directions_examples():
    d = desired_directions(CableForceSet([[0.0, 0.0, 2.0]]))
    assert np.allclose(d, [[0, 0, 1.0]])
    d = desired_directions(CableForceSet([[1.0, 1.0, 0.0]]))
    assert np.allclose(d, [[np.sqrt(2) / 2, np.sqrt(2) / 2, 0.0]])
    with pytest.raises(DegenerateForce):
        desired_directions(CableForceSet([[0.0, 0.0, 1e-9]]))


def test_cable_control_decomposition_identities():
    payload = PayloadParams(mass=0.01)
    quad = QuadrotorParams(cable_length=0.5)
    gains = ControllerGains()
    for _ in range(50):
        state = hover_state(payload, [quad])
        q = rng.normal(size=3)
        q /= np.linalg.norm(q)
        w = np.cross(q, rng.normal(size=3))
        state.q[0] = q
        state.w[0] = w
        mu = rng.normal(size=3) * 0.05
        ref = ReferenceSetpoint(p0r=[0, 0, 1.0], ddp0r=rng.normal(size=3))
        u = cable_control(state, 0, mu, ref, gains, payload, quad)
        qqT = np.outer(q, q)
        u_par = qqT @ u
        u_perp = u - u_par
        assert np.linalg.norm(np.cross(u_par, q)) <= 1e-12
        assert abs(u_perp @ q) <= 1e-12


def test_cable_control_zero_direction_error_vertical():
    # aligned static vertical case: no perpendicular correction needed
    payload = PayloadParams(mass=0.01)
    quad = QuadrotorParams(cable_length=0.5)
    state = hover_state(payload, [quad])  # q = -e3
    mu = np.array([0.0, 0.0, 0.0981])  # desired force straight up: target -e3
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    u = cable_control(state, 0, mu, ref, ControllerGains(), payload, quad)
    u_perp = u - np.outer(state.q[0], state.q[0]) @ u
    assert np.linalg.norm(u_perp) <= 1e-12


def test_cable_control_hover_equilibrium_force():
    # at the tracked equilibrium the commanded force is mu + m g e3
    payload = PayloadParams(mass=0.01)
    quad = QuadrotorParams(cable_length=0.5)
    state = hover_state(payload, [quad])
    mu = np.array([0.015, -0.01, 0.0981])
    state.q[0] = -mu / np.linalg.norm(mu)
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    u = cable_control(state, 0, mu, ref, ControllerGains(), payload, quad)
    assert np.allclose(u, mu + quad.mass * 9.81 * np.array([0, 0, 1.0]), atol=1e-12)


def test_attitude_loop_aligned_hover():
    quad = QuadrotorParams()
    mg = quad.mass * 9.81
    out = attitude_loop(np.array([0, 0, mg]), np.eye(3), np.zeros(3), 0.0,
                        quad, ControllerGains())
    assert np.isclose(out.thrust, mg, atol=1e-12)
    assert np.allclose(out.torque, 0.0, atol=1e-12)


def test_attitude_loop_tilted():
    quad = QuadrotorParams()
    mg = quad.mass * 9.81
    R = rot_x(np.radians(10.0))
    out = attitude_loop(np.array([0, 0, mg]), R, np.zeros(3), 0.0, quad,
                        ControllerGains())
    assert np.isclose(out.thrust, mg * np.cos(np.radians(10.0)), atol=1e-12)
    # torque must drive the attitude back toward level: negative roll torque
    assert out.torque[0] < 0
    assert abs(out.torque[1]) < 1e-9
    assert abs(out.torque[2]) < 1e-9


def test_motor_mixing_roundtrip():
    quad = QuadrotorParams()
    for _ in range(20):
        f = rng.uniform(0.05, 0.4)
        tau = rng.normal(size=3) * 1e-4
        eta = np.concatenate(([f], tau))
        wm = np.linalg.solve(quad.B0, eta)
        if np.any(wm < quad.motor_rate_min) or np.any(wm > quad.motor_rate_max):
            continue
        out = attitude_loop(np.array([0, 0, 1.0]) * f, np.eye(3), np.zeros(3),
                            0.0, quad, ControllerGains(kR=0.0, kOmega=0.0))
        # torque zero at level attitude with zero gains; roundtrip on thrust
        assert np.allclose(quad.B0 @ out.motor_rates,
                           np.concatenate(([out.thrust], out.torque)), atol=1e-9)


def test_motor_clamp_and_saturation_flag():
    quad = QuadrotorParams()
    out = attitude_loop(np.array([0, 0, 100.0]), np.eye(3), np.zeros(3), 0.0,
                        quad, ControllerGains())
    assert out.saturated
    assert np.all(out.motor_rates <= quad.motor_rate_max + 1e-9)


def test_hover_consistency_three_robots(pm_payload, pm_quads):
    # perfectly settled symmetric rig: torques zero, lift equals total weight
    from paylift.harness import settle_hover
    from paylift.scenario import Scenario, TrajectorySettings

    sc = Scenario(payload=pm_payload, quads=pm_quads,
                  trajectory=TrajectorySettings(kind="hover", center=(0, 0, 1.0)),
                  duration=1.0, mode="qp")
    state, forces, alloc = settle_hover(sc, "qp")
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    outputs = control_step(state, ref, pm_payload, pm_quads, sc.gains, forces)
    lift = sum(o.thrust * state.R[i][2, 2] for i, o in enumerate(outputs))
    total_weight = (pm_payload.mass + sum(q.mass for q in pm_quads)) * 9.81
    assert abs(lift - total_weight) <= 1e-6
    for o in outputs:
        assert np.linalg.norm(o.torque) <= 1e-8


def test_control_step_deterministic():
    payload = PayloadParams(mass=0.01)
    quads = [QuadrotorParams(cable_length=0.5)]
    state = hover_state(payload, quads)
    forces = CableForceSet([[0.002, 0.001, 0.0981]])
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    a = control_step(state, ref, payload, quads, ControllerGains(), forces)
    b = control_step(state, ref, payload, quads, ControllerGains(), forces)
    assert a[0].thrust == b[0].thrust
    assert a[0].torque.tobytes() == b[0].torque.tobytes()
    assert a[0].motor_rates.tobytes() == b[0].motor_rates.tobytes()


def test_payload_wrench_rigid_moment_zero_at_zero_error():
    payload = PayloadParams(kind=PayloadKind.RIGID_BODY, mass=0.01,
                            inertia=np.diag([1e-5, 1e-5, 2e-5]))
    quads = [QuadrotorParams(cable_length=0.5, attachment=[0.05, 0, 0]),
             QuadrotorParams(cable_length=0.5, attachment=[-0.05, 0, 0])]
    state = hover_state(payload, quads)
    ref = ReferenceSetpoint(p0r=[0, 0, 1.0])
    w = payload_wrench(state, ref, payload, ControllerGains())
    assert np.allclose(w.moment, 0.0, atol=1e-15)
    # rotated payload produces a restoring moment
    from paylift.geometry import rot_z

    state.R0 = rot_z(0.2)
    w = payload_wrench(state, ref, payload, ControllerGains())
    assert w.moment[2] < 0
