"""Spectrum of the linearization at spatial infinity.

The constant-coefficient system behind the mode equations is
J(c) v' = (B_inf - lambda M) v with B_inf the Hessian of S at the origin.
Its exponents mu solve the quartic Delta(mu, lambda) = det(B_inf -
lambda M - mu J(c)) = 0 and are required to split two-two about the
imaginary axis.  Eigenvectors zeta_j and dual eigenvectors eta_j are
normalized against the symplectic pairing, Omega(eta_i, zeta_j) =
delta_ij, which pins every later Evans-function value to a single
convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import (Degenerate, DegenerateMu, NormalizationFail,
                     SplittingViolated)
from .linalg import Poly4, det4, nullvector, quartic_roots, symplectic_form, wedge4
from .model import MultisymplecticModel, jc

_NODES = np.array([0.0, 1.0, -1.0, 2.0, -2.0])


def delta(model: MultisymplecticModel, c: float, lam: complex, mu: complex) -> complex:
    """Characteristic function det(B_inf - lambda M - mu J(c))."""
    return det4(model.binf() - lam * model.M - mu * jc(model, c))


@dataclass
class InfinitySpectrum:
    """Exponents and normalized frames of the system at infinity."""

    c: float
    lam: complex
    mu: np.ndarray        # 4 exponents, ascending real part
    zeta: np.ndarray      # zeta[j] unit norm, largest component real positive
    eta: np.ndarray       # eta[j] scaled so Omega(eta_j, zeta_j) = 1
    Kconst: complex       # zeta_1^zeta_2^zeta_3^zeta_4 against vol
    tau: float            # -trace(J(c)^-1 M)

    def flipped(self, j: int) -> "InfinitySpectrum":
        """Copy with zeta_j and eta_j both negated (duality preserved)."""
        z, e = self.zeta.copy(), self.eta.copy()
        z[j] = -z[j]
        e[j] = -e[j]
        return InfinitySpectrum(self.c, self.lam, self.mu.copy(), z, e,
                                -self.Kconst, self.tau)


def _mu_roots(model, c, lam):
    vals = np.array([delta(model, c, lam, m) for m in _NODES])
    vand = np.vander(_NODES, 5, increasing=True)
    coeffs = np.linalg.solve(vand, vals)
    return quartic_roots(Poly4(coeffs))


def spectrum(model: MultisymplecticModel, c: float, lam: complex,
             tol: float = 1e-8, match_to=None) -> InfinitySpectrum:
    """Solve the system at infinity and build the dual frames.

    mu ordering is ascending real part (imaginary part breaks ties);
    passing match_to (a previous mu vector) reorders by nearest neighbour
    instead, for branch continuity along parameter paths.
    """
    lam = complex(lam)
    j = jc(model, c)
    binf = model.binf()
    mu = _mu_roots(model, c, lam)

    if abs(lam.imag) < 1e-14:
        # real axis: exponents come in conjugate or real constellations;
        # strip solver roundoff so downstream frames stay real
        snap = np.abs(mu.imag) < 1e-9 * (1.0 + np.abs(mu))
        mu = np.where(snap, mu.real + 0j, mu)

    if match_to is not None:
        prev = np.asarray(match_to, dtype=complex)
        best = min(permutations(range(4)),
                   key=lambda pm: float(np.sum(np.abs(mu[list(pm)] - prev))))
        mu = mu[list(best)]
    else:
        mu = mu[np.lexsort((mu.imag, mu.real))]

    gaps = [abs(mu[a] - mu[b]) for a in range(4) for b in range(a + 1, 4)]
    if min(gaps) < 1e-6:
        raise DegenerateMu(f"exponent gap {min(gaps):.2e} below 1e-6 at lambda={lam}")
    if not (mu[0].real <= mu[1].real < 0.0 < mu[2].real <= mu[3].real):
        raise SplittingViolated(f"no two-two splitting at lambda={lam}: mu={mu}")

    zeta = np.empty((4, 4), dtype=complex)
    eta = np.empty((4, 4), dtype=complex)
    for k in range(4):
        zeta[k] = nullvector(binf - lam * model.M - mu[k] * j, tol)
        raw = nullvector(binf + lam * model.M + mu[k] * j, tol)
        pairing = symplectic_form(j, raw, zeta[k])
        if abs(pairing) < 1e-10:
            raise NormalizationFail(
                f"dual pairing {abs(pairing):.2e} too small for mode {k + 1}")
        eta[k] = raw / pairing

    for i in range(4):
        for k in range(4):
            want = 1.0 if i == k else 0.0
            got = symplectic_form(j, eta[i], zeta[k])
            if abs(got - want) > 1e-9:
                raise NormalizationFail(
                    f"Omega(eta_{i + 1}, zeta_{k + 1}) = {got:.2e}, expected {want}")

    kconst = wedge4(*zeta)
    if abs(kconst) < 1e-12:
        raise Degenerate("zeta frame wedges to zero; frame degenerate")
    tau = -float(np.real(np.trace(np.linalg.solve(j, model.M))))

    return InfinitySpectrum(c=c, lam=lam, mu=mu, zeta=zeta, eta=eta,
                            Kconst=kconst, tau=tau)


def continuous_spectrum_distance(model: MultisymplecticModel, c: float,
                                 lam: complex, kappa_max: float = None,
                                 n: int = 4001) -> float:
    """min over real kappa of |det(B_inf - lambda M - i kappa J(c))|.

    Zero exactly when lambda sits on the continuous spectrum.  Grid scan
    followed by parabolic refinement of the squared modulus.
    """
    if kappa_max is None:
        kappa_max = 10.0 * (1.0 + abs(lam))
    kappas = np.linspace(-kappa_max, kappa_max, n)

    # Delta is a quartic in mu: five determinant evaluations pin its
    # coefficients, then the grid scan is a vectorized polyval
    node_vals = np.array([delta(model, c, lam, m) for m in _NODES])
    coeffs = np.linalg.solve(np.vander(_NODES, 5, increasing=True), node_vals)

    def f(kap):
        mu = 1j * kap
        return abs(coeffs[0] + mu * (coeffs[1] + mu * (coeffs[2] + mu * (coeffs[3] + mu * coeffs[4]))))

    vals = np.abs(np.polyval(coeffs[::-1], 1j * kappas))
    i = int(np.argmin(vals))
    lo = max(0, i - 1)
    hi = min(n - 1, i + 1)
    a, b = kappas[lo], kappas[hi]
    # golden-section polish on the bracket
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - gr * (b - a)
    x2 = a + gr * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(60):
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - gr * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + gr * (b - a)
            f2 = f(x2)
    return float(min(f1, f2, vals[i]))


@dataclass
class HypothesesReport:
    """Margins of the standing assumptions at one (c, lambda=0) slice."""

    c: float
    jc_det: float            # |det J(c)|, nonzero required
    mu_at_zero: np.ndarray
    min_mu_gap: float
    splitting_ok: bool
    real_at_zero: bool       # all exponents real at lambda = 0
    kconst_abs: float
    tau: float
    ok: bool


def check_hypotheses(model: MultisymplecticModel, c: float) -> HypothesesReport:
    jdet = abs(det4(model.K + c * model.M))
    if jdet < 1e-10:
        return HypothesesReport(c, jdet, np.array([]), 0.0, False, False,
                                0.0, 0.0, False)
    try:
        spec = spectrum(model, c, 0.0)
    except (SplittingViolated, DegenerateMu, NormalizationFail, Degenerate):
        mu = _mu_roots(model, c, 0.0)
        gaps = [abs(mu[a] - mu[b]) for a in range(4) for b in range(a + 1, 4)]
        return HypothesesReport(c, jdet, mu, float(min(gaps)), False, False,
                                0.0, 0.0, False)
    gaps = [abs(spec.mu[a] - spec.mu[b]) for a in range(4) for b in range(a + 1, 4)]
    real0 = bool(np.max(np.abs(spec.mu.imag)) < 1e-9)
    report = HypothesesReport(
        c=c, jc_det=jdet, mu_at_zero=spec.mu, min_mu_gap=float(min(gaps)),
        splitting_ok=True, real_at_zero=real0,
        kconst_abs=abs(spec.Kconst), tau=float(np.real(spec.tau)),
        ok=real0 and abs(spec.Kconst) > 1e-12)
    return report
