"""Geometric factors of the second-derivative formula and the stability verdict.

chi measures how the wave tangent attaches to the boundary frames, Pi is the
transversality pairing of the two manifold tangents, and dI/dc is the momentum
derivative.  Their product against the finite-difference second derivative of
the Evans function is the central identity; the verdict combines its sign with
the sign of D at large real lambda.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from .asymptotics import InfinitySpectrum, spectrum
from .errors import (Degenerate, Inconsistent, NonTransverse, NoPlateau,
                     OrientationFail)
from .evans import Numerics, derivatives_at_zero, evans_det
from .integrator import integrate_mode
from .linalg import symplectic_form, wedge4
from .model import MultisymplecticModel, WaveFamily, jc

__all__ = [
    "momentum",
    "dIdc",
    "chi_factors",
    "PiData",
    "pi_profile",
    "lazutkin_pi",
    "StructureReport",
    "structural_checks",
    "StabilityReport",
    "stability_report",
]

_QUAD_OPTS = dict(epsabs=1e-10, epsrel=1e-10, limit=200)


def momentum(model: MultisymplecticModel, wave: WaveFamily, c: float) -> float:
    """I(c) = integral of (1/2) <M Zhat_xi, Zhat> over the wave."""
    L = wave.default_L(c)

    def integrand(xi):
        return 0.5 * float(model.M @ wave.zhat_xi(xi, c) @ wave.zhat(xi, c))

    val, _ = quad(integrand, -L, L, points=[0.0], **_QUAD_OPTS)
    return val


def dIdc(model: MultisymplecticModel, wave: WaveFamily, c: float) -> float:
    """Momentum derivative via the chain-rule integrand, cross-checked in c.

    Primary value: integral of <M Zhat_xi, Zhat_c>.  A central difference of
    momentum() with step 1e-4 must agree to 1e-4 relative, otherwise the wave
    family's Zhat_c is inconsistent with its c-dependence.
    """
    L = wave.default_L(c)

    def integrand(xi):
        return float(model.M @ wave.zhat_xi(xi, c) @ wave.zc(xi, c))

    val, _ = quad(integrand, -L, L, points=[0.0], **_QUAD_OPTS)
    if abs(val) < 1e-10:
        raise Degenerate("momentum derivative vanishes (chain length exceeds two)")
    dc = 1e-4
    fd = (momentum(model, wave, c + dc) - momentum(model, wave, c - dc)) / (2 * dc)
    if abs(fd - val) > 1e-4 * abs(val):
        raise Inconsistent(f"quadrature {val:.8e} vs finite difference {fd:.8e}")
    return val


def _attachment_index(wave, c, spec: InfinitySpectrum, L: float) -> int:
    # least-squares slope of log ||Zhat_xi|| on the -infinity tail picks out
    # which unstable exponent the wave tangent rides
    xs = np.linspace(-L, -L + 5.0, 21)
    ys = np.log([np.linalg.norm(wave.zhat_xi(x, c)) for x in xs])
    slope = np.polyfit(xs, ys, 1)[0]
    cands = [2, 3]
    return min(cands, key=lambda k: abs(spec.mu[k].real - slope))


def _plateau(vals: np.ndarray, what: str) -> float:
    m = np.mean(vals)
    drift = (np.max(vals) - np.min(vals)) / abs(m)
    if drift > 1e-6:
        raise NoPlateau(f"{what} tail fit drifts by {drift:.2e} relative")
    return float(m)


def chi_factors(model: MultisymplecticModel, wave: WaveFamily, c: float,
                spec: InfinitySpectrum | None = None):
    """(chi_minus, chi_plus, chi): attachment coefficients of the wave tangent.

    chi_minus is the plateau of exp(-mu_k xi) Omega(eta_k, Zhat_xi) on the left
    tail, chi_plus the plateau of exp(+mu_k xi) Omega(Zhat_xi, zeta_k) on the
    right tail; chi = 1/(chi_plus * chi_minus).
    """
    if spec is None:
        spec = spectrum(model, c, 0.0)
    L = wave.default_L(c)
    J = jc(model, c)
    k = _attachment_index(wave, c, spec, L)
    mu = spec.mu[k].real
    xs = np.linspace(-L, -L + 5.0, 21)
    vm = np.array([np.exp(-mu * x)
                   * float(symplectic_form(J, spec.eta[k].real, wave.zhat_xi(x, c)).real)
                   for x in xs])
    chi_minus = _plateau(vm, "chi_minus")
    xs = np.linspace(L - 5.0, L, 21)
    vp = np.array([np.exp(mu * x)
                   * float(symplectic_form(J, wave.zhat_xi(x, c), spec.zeta[k].real).real)
                   for x in xs])
    chi_plus = _plateau(vp, "chi_plus")
    return chi_minus, chi_plus, 1.0 / (chi_plus * chi_minus)


@dataclass
class PiData:
    """Transversality pairing with its xi-profile and orientation bookkeeping."""

    pi: float
    grid: np.ndarray
    samples: np.ndarray
    orientation_ratio: float
    flipped: bool
    spec: InfinitySpectrum


def pi_profile(model: MultisymplecticModel, wave: WaveFamily, c: float,
               tol: float = 1e-10, spec: InfinitySpectrum | None = None) -> PiData:
    """Omega(a_minus, a_plus) on a 9-point grid plus the orientation step.

    The manifold tangents are the zeta_4- and eta_4-seeded continuations at
    lambda = 0.  If the 4-fold boundary wedge has negative sign against the
    orientation constant, the (zeta_4, eta_4) pair is flipped and everything
    recomputed; by linearity the flip negates both trajectories exactly, so
    the pairing itself is flip-invariant while the orientation constant is not.
    """
    sp = spec if spec is not None else spectrum(model, c, 0.0)
    L = wave.default_L(c)
    J = jc(model, c)
    pts = np.linspace(-2.0, 2.0, 9)
    gm = np.unique(np.concatenate([np.linspace(-L, -2.0, 21), pts]))
    gp = np.unique(np.concatenate([pts, np.linspace(2.0, L, 21)]))[::-1]
    minus = integrate_mode(model, wave, c, 0.0, 4, "u", tol=tol, spec=sp,
                           out_grid=gm, until=2.0)
    plus = integrate_mode(model, wave, c, 0.0, 4, "w", tol=tol, spec=sp,
                          out_grid=gp, until=-2.0)
    mvals = {float(x): v for x, v in zip(minus.grid, minus.values)}
    pvals = {float(x): v for x, v in zip(plus.grid, plus.values)}

    def assemble(sgn):
        out = []
        for x in pts:
            out.append(float(symplectic_form(J, sgn * mvals[float(x)],
                                             sgn * pvals[float(x)]).real))
        return np.array(out)

    def orientation(sp_, sgn):
        mu3 = sp_.mu[2].real
        amp = np.exp(mu3 * L)
        num = wedge4(amp * wave.zhat_xi(L, c), sgn * sp_.eta[3],
                     amp * wave.zhat_xi(-L, c), sgn * sp_.zeta[3])
        scale = np.linalg.norm(sp_.eta[3]) * np.linalg.norm(sp_.zeta[3])
        if abs(num) < 1e-12 * max(scale, 1.0):
            raise OrientationFail("boundary wedge vanishes")
        return float(num.real / sp_.Kconst.real)

    samples = assemble(1.0)
    ratio = orientation(sp, 1.0)
    flipped = False
    if ratio < 0:
        sp = sp.flipped(3)
        samples = assemble(-1.0)
        ratio = orientation(sp, 1.0)
        flipped = True
    m = float(np.mean(samples))
    if abs(np.std(samples)) > 1e-6 * abs(m):
        raise Inconsistent(f"pairing drifts along xi: rel std "
                           f"{np.std(samples)/abs(m):.2e}")
    pi = float(samples[np.argmin(np.abs(pts))])
    i0 = int(np.argmin(np.abs(minus.grid)))
    j0 = int(np.argmin(np.abs(plus.grid)))
    if abs(pi) < 1e-10 * np.linalg.norm(minus.values[i0]) * np.linalg.norm(plus.values[j0]):
        raise NonTransverse("manifold tangents fail to cross transversely")
    return PiData(pi=pi, grid=pts, samples=samples, orientation_ratio=ratio,
                  flipped=flipped, spec=sp)


def lazutkin_pi(model: MultisymplecticModel, wave: WaveFamily, c: float) -> float:
    """Sign-fixed transversality invariant Pi = Omega(a_minus, a_plus) at xi=0."""
    return pi_profile(model, wave, c).pi


@dataclass
class StructureReport:
    """Lagrangian pairing maxima and the Jordan-chain obstruction value."""

    max_tangent_plus: float    # max |Omega(Zhat_xi, a_plus)| / scale
    max_tangent_minus: float   # max |Omega(Zhat_xi, a_minus)| / scale
    max_tangent_zc: float      # max |Omega(Zhat_xi, Zhat_c)| / scale
    chain_obstruction: float   # integral <Zhat_xi, M Zhat_c>
    dIdc: float
    chain_residual: float      # |chain + dIdc| / |dIdc|


def structural_checks(model: MultisymplecticModel, wave: WaveFamily, c: float,
                      pair=None, tol: float = 1e-10) -> StructureReport:
    """Lagrangian-subspace pairings on a 9-point grid plus the chain identity.

    pair overrides the two manifold-tangent continuations (minus, plus); each
    must carry values on a grid containing linspace(-2, 2, 9).
    """
    sp = spectrum(model, c, 0.0)
    L = wave.default_L(c)
    J = jc(model, c)
    pts = np.linspace(-2.0, 2.0, 9)
    if pair is None:
        gm = np.unique(np.concatenate([np.linspace(-L, -2.0, 21), pts]))
        gp = np.unique(np.concatenate([pts, np.linspace(2.0, L, 21)]))[::-1]
        minus = integrate_mode(model, wave, c, 0.0, 4, "u", tol=tol, spec=sp,
                               out_grid=gm, until=2.0)
        plus = integrate_mode(model, wave, c, 0.0, 4, "w", tol=tol, spec=sp,
                              out_grid=gp, until=-2.0)
    else:
        minus, plus = pair
    rel_p = rel_m = rel_z = 0.0
    for x in pts:
        zx = wave.zhat_xi(x, c)
        zc = wave.zc(x, c)
        vm = minus.values[int(np.argmin(np.abs(minus.grid - x)))]
        vp = plus.values[int(np.argmin(np.abs(plus.grid - x)))]
        nz = np.linalg.norm(zx)
        rel_p = max(rel_p, abs(symplectic_form(J, zx, vp)) / (nz * np.linalg.norm(vp)))
        rel_m = max(rel_m, abs(symplectic_form(J, zx, vm)) / (nz * np.linalg.norm(vm)))
        rel_z = max(rel_z, abs(symplectic_form(J, zx, zc)) / (nz * max(np.linalg.norm(zc), 1e-300)))

    def integrand(xi):
        return float(wave.zhat_xi(xi, c) @ (model.M @ wave.zc(xi, c)))

    chain, _ = quad(integrand, -L, L, points=[0.0], **_QUAD_OPTS)
    didc = dIdc(model, wave, c)
    return StructureReport(
        max_tangent_plus=float(rel_p), max_tangent_minus=float(rel_m),
        max_tangent_zc=float(rel_z), chain_obstruction=float(chain),
        dIdc=didc, chain_residual=abs(chain + didc) / abs(didc))


@dataclass
class StabilityReport:
    """Everything Theorem-level: the factors, the derivative, and the verdict."""

    c: float
    params: dict = field(default_factory=dict)
    chi_minus: float = 0.0
    chi_plus: float = 0.0
    chi: float = 0.0
    Pi: float = 0.0
    I: float = 0.0
    dIdc: float = 0.0
    D2_raw: float = 0.0
    D2_scaled: float = 0.0
    ratio_check: float = 0.0
    d_inf: int = 0
    pi_sign: int = 0          # Maslov parity surrogate
    verdict: str = "Inconclusive"

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps(d, indent=2, sort_keys=True)


def stability_report(model: MultisymplecticModel, wave: WaveFamily, c: float,
                     numerics: Numerics | None = None,
                     params: dict | None = None) -> StabilityReport:
    """Assemble the full verdict: real unstable eigenvalue iff chi*Pi*dIdc*d_inf < 0.

    d_inf is the sign of D at the right end of the default scan window
    (lambda = 3), evaluated directly.
    """
    nm = numerics or Numerics()
    I = momentum(model, wave, c)
    didc = dIdc(model, wave, c)
    cm, cp, chi = chi_factors(model, wave, c)
    pi = lazutkin_pi(model, wave, c)
    der = derivatives_at_zero(model, wave, c, numerics=nm)
    dval = evans_det(model, wave, c, 3.0, numerics=nm).D.real
    d_inf = 1 if dval > 0 else (-1 if dval < 0 else 0)
    denom = 2.0 * chi * pi * didc
    report = StabilityReport(
        c=c, params=dict(params or {}),
        chi_minus=cm, chi_plus=cp, chi=chi, Pi=pi, I=I, dIdc=didc,
        D2_raw=der.D2_raw, D2_scaled=der.D2_scaled,
        ratio_check=der.D2_raw / denom,
        d_inf=d_inf, pi_sign=1 if pi > 0 else -1,
        verdict=("UnstableRealEigenvalue" if chi * pi * didc * d_inf < 0
                 else "Inconclusive"))
    return report
