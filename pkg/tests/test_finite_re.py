"""Matrix pencil det(L - lam M): adjugate identities, derivative factorization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evanskit.errors import (
    BadParameter,
    Inconsistent,
    KernelDim,
    NonSkew,
    NonSymmetric,
)
from evanskit.finite_re import (
    REProblem,
    adjugate,
    char_fn,
    cor23_root,
    mu_product,
    synth_re,
    theorem22_check,
)

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _canonical():
    return REProblem(L=np.diag([0.0, 3.0]), M=J2,
                     zeta1=[1.0, 0.0], zeta2=[0.0, 1.0 / 3.0])


def test_char_fn_is_lambda_squared_on_canonical():
    L = np.diag([0.0, 3.0])
    for lam in (0.0, 1.0, 2.0, -1.5, 0.3):
        assert abs(char_fn(L, J2, lam) - lam ** 2) <= 1e-14 * max(1.0, lam ** 2)


def test_adjugate_anchors():
    got = adjugate(np.diag([0, 2, 3, 5]))
    assert np.allclose(got, np.diag([30.0, 0.0, 0.0, 0.0]), atol=1e-12)
    assert adjugate(np.array([[5.0]])) == np.array([[1.0]])
    with pytest.raises(BadParameter):
        adjugate(np.ones((2, 3)))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_adjugate_identity(seed):
    A = np.random.default_rng(seed).standard_normal((4, 4))
    res = A @ adjugate(A) - np.linalg.det(A) * np.eye(4)
    assert np.max(np.abs(res)) <= 1e-8 * (np.linalg.norm(A) ** 4 + 1.0)


def test_adjugate_is_rank_one_on_kernel():
    prob = synth_re(2, 3)
    want = mu_product(prob.L) * np.outer(prob.zeta1, prob.zeta1)
    got = adjugate(prob.L)
    assert np.max(np.abs(got - want)) <= 1e-8 * np.max(np.abs(want))


def test_mu_product_values():
    assert abs(mu_product(np.diag([0.0, 2.0, 3.0, 5.0])) - 30.0) <= 1e-12
    assert abs(mu_product(np.diag([0.0, -1.0, 2.0, 3.0])) - (-6.0)) <= 1e-12
    with pytest.raises(KernelDim):
        mu_product(np.diag([0.0, 0.0, 1.0, 1.0]))
    with pytest.raises(NonSymmetric):
        mu_product(J2)


def test_problem_validation():
    _canonical()  # passes
    with pytest.raises(NonSkew):
        REProblem(L=np.diag([0.0, 3.0]), M=np.eye(2), zeta1=[1, 0], zeta2=[0, 1])
    with pytest.raises(NonSymmetric):
        REProblem(L=np.array([[0.0, 1.0], [0.0, 3.0]]), M=J2,
                  zeta1=[1, 0], zeta2=[0, 1])
    with pytest.raises(KernelDim):
        REProblem(L=np.zeros((2, 2)), M=J2, zeta1=[1, 0], zeta2=[0, 1])
    with pytest.raises(BadParameter):
        REProblem(L=np.diag([0.0, 3.0]), M=J2, zeta1=[0.0, 1.0], zeta2=[0, 1.0 / 3])
    with pytest.raises(BadParameter):
        REProblem(L=np.diag([0.0, 3.0]), M=J2, zeta1=[1, 0], zeta2=[0.0, 1.0])
    with pytest.raises(BadParameter):
        REProblem(L=np.diag([0.0, 3.0, 4.0]), M=np.zeros((3, 3)),
                  zeta1=[1, 0, 0], zeta2=[0, 1, 0])
    with pytest.raises(BadParameter):
        synth_re(7, 0)
    with pytest.raises(BadParameter):
        synth_re(0, 0)


def test_theorem22_canonical():
    rep = theorem22_check(_canonical())
    assert rep.d0 == 0.0
    assert abs(rep.d1_trace) <= 1e-12
    assert abs(rep.d1_stencil) <= 1e-12
    assert abs(rep.d2_predicted - 2.0) <= 1e-14
    assert abs(rep.d2_stencil - 2.0) <= 1e-12


def test_theorem22_on_seeded_instances():
    for seed in range(20):
        for n in (1, 2, 3):
            prob = synth_re(n, seed)
            rep = theorem22_check(prob)
            assert rep.rel_err <= 1e-8
            assert abs(rep.d1_trace) <= 1e-8 * abs(rep.d2_predicted)


def test_theorem22_detects_tampered_chain():
    prob = synth_re(2, 11)
    prob.zeta2 = 1.5 * prob.zeta2  # bypasses construction-time validation
    with pytest.raises(Inconsistent):
        theorem22_check(prob)


def test_synth_re_deterministic_and_structured():
    a = synth_re(3, 42)
    b = synth_re(3, 42)
    assert np.array_equal(a.L, b.L)
    assert np.array_equal(a.M, b.M)
    assert np.array_equal(a.zeta1, b.zeta1)
    assert np.array_equal(a.generator, b.generator)
    S, M = a.generator, a.M
    assert np.linalg.norm(S + S.T) <= 1e-12
    assert np.linalg.norm(M @ S - S @ M) <= 1e-12
    assert np.linalg.norm(M @ S - (M @ S).T) <= 1e-12
    pairing = abs(a.zeta1 @ (M @ a.zeta2))
    assert 0.1 <= pairing <= 10.0
    assert abs(np.linalg.norm(a.zeta1) - 1.0) <= 1e-12


def test_char_fn_matches_companion_oracle():
    # det(L - lam M) = det(M) * charpoly(M^{-1} L)(lam)
    for seed in range(20):
        for n in (1, 2, 3):
            prob = synth_re(n, seed)
            co = np.poly(np.linalg.solve(prob.M, prob.L))
            dm = np.linalg.det(prob.M)
            for lam in (0.3, 1.7, -0.9):
                want = dm * np.polyval(co, lam)
                got = prob.d(lam)
                assert abs(got - want) <= 1e-8 * max(abs(want), 1.0)


def test_cor23_roots_match_pencil_eigenvalues():
    assert cor23_root(_canonical()) is None  # D = lam^2 has positive curvature
    found = 0
    for seed in range(20):
        for n in (1, 2, 3):
            prob = synth_re(n, seed)
            root = cor23_root(prob)
            if root is None:
                continue
            found += 1
            assert root > 0.0
            bound = 10.0 * np.linalg.norm(np.linalg.solve(prob.M, prob.L), 2)
            assert root <= bound
            evs = np.linalg.eigvals(np.linalg.solve(prob.M, prob.L))
            assert min(abs(evs - root)) <= 1e-8 * max(1.0, root)
    assert found >= 10
