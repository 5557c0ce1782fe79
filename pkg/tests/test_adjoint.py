import math

import numpy as np
import pytest

from ckpsched.adjoint import (
    EULER_SA2,
    MIDPOINT,
    RK4,
    ButcherTableau,
    OdeProblem,
    erk_adjoint_step,
    erk_step,
    finite_difference_gradient,
    forward_solution,
    gradient_via_policy,
    linear_scalar_problem,
    reaction_1d_problem,
)
from ckpsched.consultant import Policy
from ckpsched.core import DomainError


def stability_poly(tableau, z):
    """R(z) for an explicit scheme via one linear step u' = u."""
    p = linear_scalar_problem(a=1.0, steps=1, h=z)
    u1, _ = erk_step(p, tableau, np.array([1.0]), 0.0)
    return u1[0]


def test_tableau_validation():
    with pytest.raises(DomainError):
        ButcherTableau("bad", a=((0.0, 1.0), (0.5, 0.0)), b=(0.5, 0.5))
    with pytest.raises(DomainError):
        ButcherTableau("bad", a=((0.0,),), b=(0.5, 0.5))


def test_tableau_properties():
    assert RK4.stages == 4 and not RK4.stiffly_accurate
    assert MIDPOINT.stages == 2 and not MIDPOINT.stiffly_accurate
    assert EULER_SA2.stages == 2 and EULER_SA2.stiffly_accurate
    assert RK4.c == (0.0, 0.5, 0.5, 1.0)


def test_rk4_one_step_taylor():
    # linear problem: RK4's one step is the degree-4 Taylor sum of e^h
    u1 = stability_poly(RK4, 0.1)
    want = sum(0.1**k / math.factorial(k) for k in range(5))
    assert u1 == pytest.approx(want, abs=1e-15)


def test_zero_rhs_keeps_state():
    prob = OdeProblem(
        dimension=2,
        rhs=lambda t, u: np.zeros_like(u),
        rhs_jacobian_transpose_apply=lambda t, u, v: np.zeros_like(v),
        initial_state=np.array([1.0, -2.0]),
        step_size=0.3,
        steps=1,
        objective=lambda u: float(u.sum()),
        objective_gradient=lambda u: np.ones_like(u),
    )
    u1, stages = erk_step(prob, RK4, prob.initial_state, 0.0)
    assert np.array_equal(u1, prob.initial_state)
    assert all(np.array_equal(s, prob.initial_state) for s in stages)
    lam = erk_adjoint_step(prob, RK4, type("S", (), {"step_index": 1, "stages": tuple(stages)}), 0.0, np.array([1.0, 1.0]))
    assert np.array_equal(lam, np.array([1.0, 1.0]))


def test_two_dim_linear_matches_matrix_polynomial():
    A = np.array([[0.0, 1.0], [-2.0, -0.3]])
    h = 0.1
    prob = OdeProblem(
        dimension=2,
        rhs=lambda t, u: A @ u,
        rhs_jacobian_transpose_apply=lambda t, u, v: A.T @ v,
        initial_state=np.array([1.0, 0.5]),
        step_size=h,
        steps=1,
        objective=lambda u: float(u[0]),
        objective_gradient=lambda u: np.array([1.0, 0.0]),
    )
    u1, _ = erk_step(prob, RK4, prob.initial_state, 0.0)
    R = np.eye(2)
    term = np.eye(2)
    for k in range(1, 5):
        term = term @ (h * A) / k
        R = R + term
    assert np.allclose(u1, R @ prob.initial_state, atol=1e-14)


def test_adjoint_is_transpose_of_linearization():
    # random quadratic rhs in 3 dimensions: <lam, J v> == <J^T lam, v>
    rng = np.random.default_rng(42)
    Q = rng.normal(size=(3, 3, 3)) * 0.3
    B = rng.normal(size=(3, 3)) * 0.5

    def rhs(t, u):
        return np.einsum("ijk,j,k->i", Q, u, u) + B @ u

    def jac_t(t, u, v):
        J = np.einsum("ijk,k->ij", Q, u) + np.einsum("ijk,j->ik", Q, u) + B
        return J.T @ v

    prob = OdeProblem(
        dimension=3,
        rhs=rhs,
        rhs_jacobian_transpose_apply=jac_t,
        initial_state=rng.normal(size=3),
        step_size=0.05,
        steps=1,
        objective=lambda u: float(u.sum()),
        objective_gradient=lambda u: np.ones_like(u),
    )
    u0 = prob.initial_state
    _, stages = erk_step(prob, RK4, u0, 0.0)
    stage_set = type("S", (), {"step_index": 1, "stages": tuple(stages)})
    lam = rng.normal(size=3)
    v = rng.normal(size=3)
    lhs = erk_adjoint_step(prob, RK4, stage_set, 0.0, lam) @ v
    eps = 1e-6
    up, _ = erk_step(prob, RK4, u0 + eps * v, 0.0)
    down, _ = erk_step(prob, RK4, u0 - eps * v, 0.0)
    rhs_val = lam @ ((up - down) / (2 * eps))
    assert lhs == pytest.approx(rhs_val, rel=1e-6)


def test_jacobian_consistency_probe():
    prob = reaction_1d_problem(cells=8, steps=5)
    rng = np.random.default_rng(0)
    u = prob.initial_state + 0.05 * rng.normal(size=prob.dimension)
    v = rng.normal(size=prob.dimension)
    w = rng.normal(size=prob.dimension)
    eps = 1e-6
    jv = (prob.rhs(0.0, u + eps * v) - prob.rhs(0.0, u - eps * v)) / (2 * eps)
    lhs = w @ jv
    rhs = prob.rhs_jacobian_transpose_apply(0.0, u, w) @ v
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_linear_closed_form_gradient():
    a, h, N = -0.7, 0.05, 30
    prob = linear_scalar_problem(a=a, steps=N, h=h)
    R = stability_poly(RK4, h * a)
    grad, met = gradient_via_policy(prob, RK4, Policy.FULL_STORAGE)
    assert grad[0] == pytest.approx(R**N, rel=1e-12)
    assert met.recomputations == 0


def test_policy_invariance_bitwise():
    prob = reaction_1d_problem(cells=16, steps=30)
    base, _ = gradient_via_policy(prob, RK4, Policy.FULL_STORAGE)
    for policy, s in (
        (Policy.REVOLVE, 4),
        (Policy.MODIFIED_REVOLVE, 2),
        (Policy.CAMS_GEN, 9),
    ):
        grad, met = gradient_via_policy(prob, RK4, policy, s)
        assert np.array_equal(grad, base), policy
        assert met.recomputations > 0  # actually exercised recomputation


def test_sa_policy_on_stiffly_accurate_tableau():
    prob = reaction_1d_problem(cells=8, steps=20)
    base, _ = gradient_via_policy(prob, EULER_SA2, Policy.FULL_STORAGE)
    grad, met = gradient_via_policy(prob, EULER_SA2, Policy.CAMS_SA, 6)
    assert np.array_equal(grad, base)
    fd = finite_difference_gradient(prob, EULER_SA2)
    rel = np.max(np.abs(grad - fd)) / np.max(np.abs(fd))
    assert rel < 1e-5


def test_gradient_matches_finite_differences():
    prob = reaction_1d_problem(cells=16, steps=30)
    fd = finite_difference_gradient(prob, RK4)
    grad, _ = gradient_via_policy(prob, RK4, Policy.CAMS_GEN, 10)
    rel = np.max(np.abs(grad - fd)) / np.max(np.abs(fd))
    assert rel < 1e-5


def test_recomputation_counts_match_predictions():
    from ckpsched.consultant import predicted_cost

    prob = reaction_1d_problem(cells=8, steps=25)
    scheme = RK4.scheme_info()
    for policy, s in ((Policy.REVOLVE, 3), (Policy.CAMS_GEN, 12)):
        _, met = gradient_via_policy(prob, RK4, policy, s)
        assert met.recomputations == predicted_cost(25, s, scheme, policy)


def test_forward_solution_finite():
    prob = reaction_1d_problem(cells=16, steps=30)
    u = forward_solution(prob, MIDPOINT)
    assert np.all(np.isfinite(u))
