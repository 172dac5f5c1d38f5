"""Mode integration for the linearized travelling-wave problem.

The spatial eigenvalue system J(c) u' = (B(xi) - lambda M) u is solved in
exponentially rescaled variables: for mode j the integrated quantity is
v(xi) = exp(-sigma mu_j xi) * (true mode), sigma = +1 for u-type runs and
-1 for w-type (adjoint-path) runs, so v stays O(1) across the domain and
equals the true mode exactly at xi = 0.

Runs are seeded with the matching eigenvector of the system at infinity
on the side where the true mode decays and integrated toward the match
point.  The stepper is an explicit Dormand-Prince 5(4) pair with the
standard quartic dense-output interpolant; local error is controlled per
unit xi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .asymptotics import InfinitySpectrum, spectrum
from .errors import Overflow, StepFail
from .model import MultisymplecticModel, WaveFamily, jc

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B = _A[6]  # fifth-order weights; FSAL
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])
# quartic dense-output coefficients (Shampine)
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_OVERFLOW = 1e12


@dataclass
class RescaledSolution:
    """One rescaled mode run.

    value_at_zero is the true (unscaled) mode at xi = 0 because the
    rescaling factor is 1 there.  grid/values hold dense samples of the
    rescaled solution when requested.
    """

    mu: complex
    lam_ode: complex
    sigma: int
    seed: np.ndarray
    xi_seed: float
    xi_end: float
    value_at_end: np.ndarray
    value_at_zero: Optional[np.ndarray]
    grid: Optional[np.ndarray]
    values: Optional[np.ndarray]
    nsteps: int
    nrejected: int


def _dopri5(f, x0: float, x1: float, y0: np.ndarray, tol: float,
            out_grid: Optional[np.ndarray]):
    """Adaptive DP5(4), complex state, error per unit xi.

    Returns (y_end, y_at_zero_or_None, out_values, nsteps, nrejected).
    out_grid must be monotone in the direction of integration.
    """
    span = x1 - x0
    direction = 1.0 if span > 0 else -1.0
    x, y = x0, y0.astype(complex)
    k = np.empty((7, y0.size), dtype=complex)
    k[0] = f(x, y)
    h = direction * min(abs(span) / 100.0, 1.0)
    nsteps = nrejected = 0
    out_vals = None if out_grid is None else np.empty((len(out_grid), y0.size), complex)
    i_out = 0
    if out_grid is not None and len(out_grid) and out_grid[0] == x0:
        out_vals[0] = y
        i_out = 1
    y_zero = y.copy() if x0 == 0.0 else None

    while direction * (x1 - x) > 0:
        if abs(h) < 1e-12 * abs(span):
            raise StepFail(f"step size {h:.2e} collapsed at xi={x:.4f}")
        if direction * (x + h - x1) > 0:
            h = x1 - x
        for i in range(1, 6):
            k[i] = f(x + _C[i] * h, y + h * (_A[i, :i] @ k[:i]))
        y_new = y + h * (_B @ k[:6])
        k[6] = f(x + h, y_new)  # FSAL stage, feeds error estimate only
        err_vec = h * (_E @ k)
        sc = tol * abs(h) * (1.0 + np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / sc))
        if err <= 1.0:
            # accepted; dense interpolant covers [x, x+h]
            xa, xb = x, x + h
            targets = []
            if out_grid is not None:
                while i_out < len(out_grid) and direction * (out_grid[i_out] - xb) <= 0:
                    targets.append((i_out, out_grid[i_out]))
                    i_out += 1
            crosses_zero = y_zero is None and direction * (0.0 - xa) > 0 \
                and direction * (0.0 - xb) <= 0
            if targets or crosses_zero:
                q = k.T @ _P  # (n, 4)
                def interp(xt):
                    th = (xt - xa) / h
                    pows = np.array([th, th ** 2, th ** 3, th ** 4])
                    return y + h * (q @ pows)
                for idx, xt in targets:
                    out_vals[idx] = interp(xt)
                if crosses_zero:
                    y_zero = interp(0.0)
            x, y = xb, y_new
            k[0] = k[6]  # FSAL
            nsteps += 1
            if float(np.max(np.abs(y))) > _OVERFLOW:
                raise Overflow(f"mode norm exceeded {_OVERFLOW:.0e} at xi={x:.3f}")
            fac = min(5.0, max(0.2, 0.9 * err ** -0.2)) if err > 0 else 5.0
            h *= fac
        else:
            nrejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)

    if out_grid is not None and i_out < len(out_grid):
        # the final point coincides with x1 up to roundoff
        while i_out < len(out_grid):
            out_vals[i_out] = y
            i_out += 1
    if y_zero is None and x1 == 0.0:
        y_zero = y.copy()
    return y, y_zero, out_vals, nsteps, nrejected


def amatrix(model: MultisymplecticModel, wave: WaveFamily, c: float,
            lam: complex, xi: float) -> np.ndarray:
    """A(xi, lambda) = J(c)^-1 (hessS(zhat) - lambda M)."""
    j = jc(model, c)
    b = model.hessS(wave.zhat(xi, c))
    return np.linalg.solve(j, b - lam * model.M)


def integrate_mode(model: MultisymplecticModel, wave: WaveFamily, c: float,
                   lam: complex, j: int, kind: str = "u",
                   tol: float = 1e-10, L: Optional[float] = None,
                   spec: Optional[InfinitySpectrum] = None,
                   out_grid: Optional[np.ndarray] = None,
                   until: float = 0.0) -> RescaledSolution:
    """Integrate one rescaled mode from its decay side to xi = until.

    j is the 1-based mode index.  kind "u" solves with lambda and seeds
    zeta_j; the mode decays as xi -> -infinity for j in {3, 4} (seed at
    -L) and as xi -> +infinity for j in {1, 2} (seed at +L).  kind "w"
    solves with -lambda, seeds eta_j, with the opposite seeding sides.
    """
    if kind not in ("u", "w"):
        raise ValueError("kind must be 'u' or 'w'")
    if j not in (1, 2, 3, 4):
        raise ValueError("mode index j must be 1..4")
    if spec is None:
        spec = spectrum(model, c, lam)
    Lbox = float(L) if L is not None else wave.default_L(c)
    mu = spec.mu[j - 1]

    if kind == "u":
        sigma, lam_ode = +1, complex(lam)
        seed = spec.zeta[j - 1]
        xi_seed = -Lbox if j in (3, 4) else +Lbox
    else:
        sigma, lam_ode = -1, -complex(lam)
        seed = spec.eta[j - 1]
        xi_seed = +Lbox if j in (3, 4) else -Lbox

    jinv = np.linalg.inv(jc(model, c))
    mmat = model.M
    hess = model.hessS
    zhat = wave.zhat
    shift = sigma * mu

    def rhs(xi, v):
        b = hess(zhat(xi, c))
        return jinv @ (b @ v - lam_ode * (mmat @ v)) - shift * v

    y_end, y_zero, out_vals, nsteps, nrej = _dopri5(
        rhs, xi_seed, float(until), seed, tol, out_grid)

    return RescaledSolution(
        mu=mu, lam_ode=lam_ode, sigma=sigma, seed=seed,
        xi_seed=xi_seed, xi_end=float(until),
        value_at_end=y_end, value_at_zero=y_zero,
        grid=out_grid, values=out_vals, nsteps=nsteps, nrejected=nrej)


def tangent_a(model: MultisymplecticModel, wave: WaveFamily, c: float,
              tol: float = 1e-10, L: Optional[float] = None,
              overlap: float = 2.0, n_out: int = 2001,
              spec: Optional[InfinitySpectrum] = None):
    """The two tangent solutions at lambda = 0.

    a_minus rides mode 4 forward from -L, a_plus rides the adjoint mode 4
    backward from +L; both are carried past the match point so pairings
    can be sampled on a common grid [-overlap, overlap].  Because the two
    rescaling exponents cancel, Omega(a_minus(xi), a_plus(xi)) equals the
    pairing of the rescaled trajectories pointwise.

    Returns (minus, plus) as RescaledSolution with dense grids.
    """
    if spec is None:
        spec = spectrum(model, c, 0.0)
    Lbox = float(L) if L is not None else wave.default_L(c)
    grid_m = np.linspace(-Lbox, overlap, n_out)
    grid_p = np.linspace(Lbox, -overlap, n_out)
    minus = integrate_mode(model, wave, c, 0.0, 4, "u", tol=tol, L=Lbox,
                           spec=spec, out_grid=grid_m, until=overlap)
    plus = integrate_mode(model, wave, c, 0.0, 4, "w", tol=tol, L=Lbox,
                          spec=spec, out_grid=grid_p, until=-overlap)
    return minus, plus
