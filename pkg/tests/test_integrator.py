"""Mode integration: seeding layout, rescaled dynamics, dense output, failure paths."""

import numpy as np
import pytest

from evanskit.asymptotics import spectrum
from evanskit.errors import Overflow, StepFail
from evanskit.integrator import _dopri5, amatrix, integrate_mode, tangent_a
from evanskit.linalg import symplectic_form
from evanskit.model import (
    CANONICAL_K,
    CANONICAL_M,
    MultisymplecticModel,
    WaveFamily,
    build_coupled_wave,
    jc,
    oracle_coupled_wave,
)


def _coupled(p=1.0):
    return build_coupled_wave(p)


def test_seed_matches_boundary_value():
    model, wave = _coupled()
    c = 0.0
    L = wave.default_L(c)
    s = spectrum(model, c, 0.0)
    # u-runs with j in {3,4} start at -L from zeta_j; w-runs with j in {3,4}
    # start at +L from eta_j.  The rescaled value at the seed point is the seed.
    u3 = integrate_mode(model, wave, c, 0.0, 3, "u", spec=s,
                        out_grid=np.linspace(-L, 0.0, 5))
    assert np.max(np.abs(u3.values[0] - s.zeta[2])) <= 1e-12
    assert u3.xi_seed == -L
    w4 = integrate_mode(model, wave, c, 0.0, 4, "w", spec=s,
                        out_grid=np.linspace(L, 0.0, 5))
    assert np.max(np.abs(w4.values[0] - s.eta[3])) <= 1e-12
    assert w4.xi_seed == L
    # j in {1,2} seed on the opposite side
    u1 = integrate_mode(model, wave, c, 0.0, 1, "u", spec=s)
    assert u1.xi_seed == L
    w2 = integrate_mode(model, wave, c, 0.0, 2, "w", spec=s)
    assert w2.xi_seed == -L


def test_frozen_coefficients_leave_seed_invariant():
    # with the hessian frozen at its rest value the rescaled mode equation is
    # v' = (A_inf - mu_j) v and the eigenvector seed is a fixed point
    model, _ = _coupled()
    binf = model.binf()
    frozen = MultisymplecticModel("frozen", CANONICAL_M, CANONICAL_K,
                                  lambda z: binf @ z, lambda z: binf)
    fwave = WaveFamily(zhat=lambda xi, c: np.zeros(4),
                       zhat_xi=lambda xi, c: np.zeros(4),
                       c_window=(-0.9, 0.9), decay_rate=lambda c: 2.0)
    s = spectrum(frozen, 0.0, 0.7)
    for j, kind in ((1, "u"), (2, "u"), (3, "u"), (4, "w")):
        r = integrate_mode(frozen, fwave, 0.0, 0.7, j, kind, spec=s)
        seed = s.zeta[j - 1] if kind == "u" else s.eta[j - 1]
        assert np.max(np.abs(r.value_at_zero - seed)) <= 1e-8


def test_unstable_direction_is_wave_tangent():
    # the j=3 mode continued from -infinity at lambda=0 lies along Zhat_xi
    for c in (0.0, 0.3, -0.3):
        model, wave = _coupled()
        u3 = integrate_mode(model, wave, c, 0.0, 3, "u")
        v = u3.value_at_zero
        t = wave.zhat_xi(0.0, c)
        cos = abs(np.vdot(v, t)) / (np.linalg.norm(v) * np.linalg.norm(t))
        assert 1.0 - cos <= 1e-8
        assert np.max(np.abs(v.imag)) <= 1e-12 * np.max(np.abs(v.real))


def test_fast_modes_match_scattering_solutions():
    for p, c in ((1.0, 0.0), (1.5, 0.3)):
        model, wave = _coupled(p)
        o = oracle_coupled_wave(p, c)
        s = spectrum(model, c, 0.0)
        u4 = integrate_mode(model, wave, c, 0.0, 4, "u", spec=s)
        v = u4.value_at_zero.real
        a = o.a_minus(0.0)
        assert 1.0 - abs(np.dot(v, a)) / (np.linalg.norm(v) * np.linalg.norm(a)) <= 1e-8
        w4 = integrate_mode(model, wave, c, 0.0, 4, "w", spec=s)
        v = w4.value_at_zero.real
        a = o.a_plus(0.0)
        assert 1.0 - abs(np.dot(v, a)) / (np.linalg.norm(v) * np.linalg.norm(a)) <= 1e-8


def test_same_index_pairing_constant_along_xi():
    # Omega(w_j(xi), u_j(xi)) inherits xi-independence from the adjoint pairing;
    # the rescaling exponentials cancel exactly for matching indices
    model, wave = _coupled()
    c, lam = 0.3, 0.9
    s = spectrum(model, c, lam)
    L = wave.default_L(c)
    pts = np.linspace(-4.0, 4.0, 9)
    gm = np.unique(np.concatenate([np.linspace(-L, -4.0, 31), pts]))
    gp = np.unique(np.concatenate([pts, np.linspace(4.0, L, 31)]))[::-1]
    J = jc(model, c)
    for j in (3, 4):
        u = integrate_mode(model, wave, c, lam, j, "u", spec=s, out_grid=gm, until=4.0)
        w = integrate_mode(model, wave, c, lam, j, "w", spec=s, out_grid=gp, until=-4.0)
        vals = []
        for xi in pts:
            iu = int(np.argmin(np.abs(u.grid - xi)))
            iw = int(np.argmin(np.abs(w.grid - xi)))
            assert abs(u.grid[iu] - xi) <= 1e-12 and abs(w.grid[iw] - xi) <= 1e-12
            vals.append(symplectic_form(J, w.values[iw], u.values[iu]))
        vals = np.asarray(vals)
        assert np.std(vals) / abs(np.mean(vals)) <= 1e-6


def test_tangent_pair_crossing_is_grid_independent():
    # Omega(a_minus, a_plus) evaluated from the two j=4 continuations must not
    # depend on the matching point
    for p, sign in ((1.0, 1.0), (2.0, -1.0)):
        model, wave = _coupled(p)
        c = 0.0
        s = spectrum(model, c, 0.0)
        L = wave.default_L(c)
        pts = np.linspace(-2.0, 2.0, 9)
        gm = np.unique(np.concatenate([np.linspace(-L, -2.0, 21), pts]))
        gp = np.unique(np.concatenate([pts, np.linspace(2.0, L, 21)]))[::-1]
        mi = integrate_mode(model, wave, c, 0.0, 4, "u", spec=s, out_grid=gm, until=2.0)
        pl = integrate_mode(model, wave, c, 0.0, 4, "w", spec=s, out_grid=gp, until=-2.0)
        J = jc(model, c)
        vals = []
        for xi in pts:
            im = int(np.argmin(np.abs(mi.grid - xi)))
            ip = int(np.argmin(np.abs(pl.grid - xi)))
            vals.append(complex(symplectic_form(J, mi.values[im], pl.values[ip])).real)
        vals = np.asarray(vals)
        m = float(np.mean(vals))
        assert np.std(vals) / abs(m) <= 1e-6
        assert np.sign(m) == sign


def test_domain_truncation_converged():
    model, wave = _coupled()
    s = spectrum(model, 0.0, 0.0)
    a = integrate_mode(model, wave, 0.0, 0.0, 4, "u", spec=s).value_at_zero
    b = integrate_mode(model, wave, 0.0, 0.0, 4, "u", spec=s, L=40.0).value_at_zero
    assert np.max(np.abs(a - b)) <= 1e-8


def test_tolerance_consistency():
    model, wave = _coupled()
    s = spectrum(model, 0.0, 0.9)
    a = integrate_mode(model, wave, 0.0, 0.9, 3, "u", spec=s, tol=1e-8).value_at_zero
    b = integrate_mode(model, wave, 0.0, 0.9, 3, "u", spec=s, tol=1e-11).value_at_zero
    assert np.max(np.abs(a - b)) <= 1e-8


def test_coefficient_matrix_identities():
    model, wave = _coupled()
    c = 0.3
    tau = 4.0 * c / (1.0 - c * c)
    for lam in (0.0, 0.7, 1.3 + 0.4j):
        for xi in (-1.7, 0.0, 2.2):
            A = amatrix(model, wave, c, lam, xi)
            assert abs(np.trace(A) - lam * tau) <= 1e-12 * max(1.0, abs(lam))
    # at lambda=0 the wave tangent solves the variational equation
    d = 1e-5
    for xi in (-1.2, 0.4, 1.9):
        A = amatrix(model, wave, c, 0.0, xi)
        zxx = (wave.zhat_xi(xi + d, c) - wave.zhat_xi(xi - d, c)) / (2 * d)
        r = A @ wave.zhat_xi(xi, c) - zxx
        assert np.max(np.abs(r)) <= 1e-8


def test_dense_output_consistent_at_zero():
    model, wave = _coupled()
    L = wave.default_L(0.0)
    g = np.linspace(-L, 0.0, 7)
    r = integrate_mode(model, wave, 0.0, 0.0, 3, "u", out_grid=g)
    assert np.max(np.abs(r.values[-1] - r.value_at_zero)) <= 1e-14


def test_overflow_guard():
    with pytest.raises(Overflow):
        _dopri5(lambda x, y: y, 0.0, 40.0, np.array([1.0 + 0j]), 1e-8, None)


def test_step_collapse_on_discontinuity():
    with pytest.raises(StepFail):
        _dopri5(lambda x, y: np.array([np.sign(0.5 - x) + 0j]),
                0.0, 1.0, np.array([0.0 + 0j]), 1e-10, None)


def test_tangent_a_pairs_cover_overlap():
    model, wave = _coupled()
    mi, pl = tangent_a(model, wave, 0.0, n_out=801)
    assert mi.grid[0] < -15 and mi.grid[-1] >= 2.0
    assert pl.grid[0] > 15 and pl.grid[-1] <= -2.0
    # both continuations stay real at lambda=0
    assert np.max(np.abs(mi.values.imag)) <= 1e-10 * np.max(np.abs(mi.values.real))
