import numpy as np
import pytest

from oracles import cvxopt_qp
from paylift.errors import ShapeMismatch
from paylift.qp import (
    BadData,
    BatchFamily,
    ProblemFamily,
    QpProblem,
    QpStatus,
    solve,
)

rng = np.random.default_rng(11)


def random_instance(n, m, seed):
    r = np.random.default_rng(seed)
    M = r.normal(size=(n, n))
    P = M @ M.T + 0.05 * np.eye(n)
    q = r.normal(size=n)
    A = r.normal(size=(m, n))
    x_feas = r.normal(size=n)
    slack = r.uniform(0.05, 1.0, size=m)
    l = A @ x_feas - slack
    u = A @ x_feas + slack * r.uniform(0.0, 2.0, size=m)
    # a few equality rows, kept consistent with the feasible point
    for i in range(m // 5):
        l[i] = u[i] = A[i] @ x_feas
    return QpProblem(P, q, A, l, u)


def test_box_projection():
    p = QpProblem(np.eye(2), np.zeros(2), np.eye(2), [1.0, 1.0],
                  [np.inf, np.inf])
    s = solve(p)
    assert s.solved
    assert np.allclose(s.x, [1.0, 1.0], atol=1e-6)


def test_unconstrained():
    p = QpProblem(np.diag([2.0, 2.0]), [-2.0, -4.0], np.zeros((0, 2)),
                  np.zeros(0), np.zeros(0))
    s = solve(p)
    assert s.solved
    assert np.allclose(s.x, [1.0, 2.0], atol=1e-8)


def test_contradictory_equalities_infeasible():
    p = QpProblem(np.eye(1), np.zeros(1), np.array([[1.0], [1.0]]),
                  [1.0, 2.0], [1.0, 2.0])
    s = solve(p)
    assert s.status is QpStatus.PRIMAL_INFEASIBLE


def test_dual_infeasible_unbounded():
    # min x subject to x <= 0: unbounded below
    p = QpProblem(np.zeros((1, 1)), [1.0], np.array([[1.0]]), [-np.inf], [0.0])
    s = solve(p)
    assert s.status is QpStatus.DUAL_INFEASIBLE


def test_bad_data_rejected():
    with pytest.raises(BadData):
        QpProblem(np.array([[-1.0]]), [0.0], np.zeros((0, 1)), [], [])
    with pytest.raises(BadData):
        QpProblem(np.eye(1), [np.nan], np.zeros((0, 1)), [], [])
    with pytest.raises(BadData):
        QpProblem(np.eye(1), [0.0], np.array([[1.0]]), [2.0], [1.0])


def test_random_instances_match_interior_point_oracle():
    for k in range(20):
        prob = random_instance(10, 15, seed=100 + k)
        s = solve(prob, tol_abs=1e-8, tol_rel=0.0, polish=True)
        assert s.solved, (k, s.status)
        x_ref = cvxopt_qp(prob.P, prob.q, prob.A, prob.l, prob.u)
        assert x_ref is not None
        assert prob.objective(s.x) <= prob.objective(x_ref) + 1e-5
        assert abs(prob.objective(s.x) - prob.objective(x_ref)) <= 1e-5
        assert s.primal_residual <= 1e-6
        assert s.dual_residual <= 1e-6


def test_equality_rows_satisfied():
    prob = random_instance(8, 10, seed=7)
    s = solve(prob, polish=True)
    eq = np.abs(prob.u - prob.l) < 1e-12
    if np.any(eq):
        assert np.max(np.abs((prob.A @ s.x - prob.l)[eq])) <= 1e-6


def test_warm_start_fixed_point_and_fewer_iterations():
    fam = ProblemFamily(9, 12)
    prob = random_instance(9, 12, seed=21)
    fam.update(P=prob.P, q=prob.q, A=prob.A, l=prob.l, u=prob.u)
    cold = fam.solve()
    warm = fam.solve()  # identical data, warm started
    assert warm.iterations <= cold.iterations

    # perturbing q slightly: median warm iterations below cold-start median
    r = np.random.default_rng(2)
    warm_iters, cold_iters = [], []
    for _ in range(100):
        dq = 1e-3 * r.normal(size=9)
        fam.update(q=prob.q + dq)
        warm_iters.append(fam.solve().iterations)
        fresh = ProblemFamily(9, 12)
        fresh.update(P=prob.P, q=prob.q + dq, A=prob.A, l=prob.l, u=prob.u)
        cold_iters.append(fresh.solve().iterations)
    assert np.median(warm_iters) < np.median(cold_iters)


def test_family_shape_mismatch():
    fam = ProblemFamily(3, 2)
    with pytest.raises(ShapeMismatch):
        fam.update(q=np.zeros(4))
    with pytest.raises(ShapeMismatch):
        fam.update(A=np.zeros((3, 3)))


def test_deterministic_bitwise():
    prob = random_instance(6, 9, seed=33)
    s1 = solve(prob)
    s2 = solve(prob)
    assert s1.x.tobytes() == s2.x.tobytes()
    assert s1.y.tobytes() == s2.y.tobytes()
    assert s1.iterations == s2.iterations


def test_single_precision_on_paper_families(pm_quads, rigid_quads,
                                            rigid_payload):
    from paylift.allocation import (
        qp_fd_problem,
        qp_svm_pointmass_problem,
        qp_svm_rigid_problem,
    )

    F = np.array([0.0, 0.0, 0.0981])
    problems = []
    # pair SVM, point mass
    problems.append(qp_svm_pointmass_problem(
        np.array([-0.2, 0.0, 0.45]), np.array([0.2, 0.0, 0.45]), F, 100.0))
    # pair force split + pair SVM, rigid body
    problems.append(qp_fd_problem(
        rigid_quads[0].attachment, rigid_quads[1].attachment, F, np.zeros(3)))
    problems.append(qp_svm_rigid_problem(
        np.array([-0.2, 0.0, 0.45]), np.array([0.2, 0.0, 0.45]),
        rigid_quads[0].attachment, rigid_quads[1].attachment,
        F / 2, F / 2, 100.0))
    for P, q, A, l, u in problems:
        s = solve(QpProblem(P, q, A, l, u), tol_abs=1e-4, tol_rel=1e-4,
                  dtype=np.float32)
        assert s.solved, s.status


def test_batch_family_matches_standalone():
    probs = [random_instance(5, 7, seed=50 + k) for k in range(4)]
    batch = BatchFamily(4, 5, 7)
    for b, p in enumerate(probs):
        batch.P[b] = p.P
        batch.q[b] = p.q
        batch.A[b] = p.A
        batch.l[b] = p.l
        batch.u[b] = p.u
    statuses, iters, rps, rds = batch.solve()
    assert np.all(statuses == QpStatus.SOLVED.value)
    for b, p in enumerate(probs):
        single = solve(p, polish=False)
        assert np.allclose(batch.x[b], single.x, atol=1e-5)


def test_zero_inequalities():
    p = QpProblem(np.eye(3), np.array([1.0, -2.0, 0.5]), np.zeros((0, 3)),
                  np.zeros(0), np.zeros(0))
    s = solve(p)
    assert s.solved
    assert np.allclose(s.x, [-1.0, 2.0, -0.5], atol=1e-8)
