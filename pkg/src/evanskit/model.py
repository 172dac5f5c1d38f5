"""Canonical multisymplectic models M Z_t + K Z_x = grad S(Z) on R^4.

A model is the algebraic data (M, K, S-derivatives, optional reversor);
a wave family is a c-parametrized steady profile in the moving frame
xi = x - c t together with its xi- and c-derivatives.  The coupled
second-order wave system is the fully worked example: its profile,
tangent solutions and Evans function all have closed forms, collected
in oracle_coupled_wave for use as reference values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParameter, NonSkew, SingularJc
from .linalg import det4

CANONICAL_M = np.array([[0, -1, 0, 0],
                        [1, 0, 0, 0],
                        [0, 0, 0, 1],
                        [0, 0, -1, 0]], dtype=float)

CANONICAL_K = np.array([[0, 0, 1, 0],
                        [0, 0, 0, -1],
                        [-1, 0, 0, 0],
                        [0, 1, 0, 0]], dtype=float)

REVERSOR = np.diag([1.0, -1.0, -1.0, 1.0])


@dataclass
class MultisymplecticModel:
    name: str
    M: np.ndarray
    K: np.ndarray
    gradS: Callable[[np.ndarray], np.ndarray]
    hessS: Callable[[np.ndarray], np.ndarray]
    R: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        self.K = np.asarray(self.K, dtype=float)
        for tag, a in (("M", self.M), ("K", self.K)):
            if a.shape != (4, 4):
                raise ValueError(f"{tag} must be 4x4")
            if np.max(np.abs(a + a.T)) > 1e-14:
                raise NonSkew(f"{tag} is not skew-symmetric")

    def binf(self) -> np.ndarray:
        """Hessian of S at the origin: the system matrix at infinity."""
        return self.hessS(np.zeros(4))


def jc(model: MultisymplecticModel, c: float) -> np.ndarray:
    """J(c) = K + c M, the symplectic operator of the travelling frame."""
    j = model.K + c * model.M
    if abs(det4(j)) < 1e-10:
        raise SingularJc(f"K + cM singular at c={c}")
    return j


@dataclass
class WaveFamily:
    """Solitary-wave profile zhat(xi, c) with derivatives.

    zhat_c may be omitted; the accessor zc() then falls back to a centered
    difference in c with step 1e-4.  decay_rate(c) is the slowest
    asymptotic decay exponent of the profile, used to size truncation
    domains as L = 40 / decay_rate(c).
    """

    zhat: Callable[[float, float], np.ndarray]
    zhat_xi: Callable[[float, float], np.ndarray]
    c_window: tuple
    decay_rate: Callable[[float], float]
    zhat_c: Optional[Callable[[float, float], np.ndarray]] = None

    def zc(self, xi: float, c: float) -> np.ndarray:
        if self.zhat_c is not None:
            return self.zhat_c(xi, c)
        dc = 1e-4
        return (self.zhat(xi, c + dc) - self.zhat(xi, c - dc)) / (2 * dc)

    def default_L(self, c: float) -> float:
        return 40.0 / self.decay_rate(c)


@dataclass
class WaveCheck:
    """Residual report for a travelling-wave profile."""

    ode_residual: float       # J(c) zhat_xi - grad S(zhat)
    kernel_residual: float    # L zhat_xi, L W = hessS(zhat) W - J(c) W_xi
    jordan_residual: float    # L zhat_c - M zhat_xi
    tail_norm: float          # |zhat| at xi = +-L

    def max_residual(self) -> float:
        return max(self.ode_residual, self.kernel_residual, self.jordan_residual)


def verify_wave(model: MultisymplecticModel, wave: WaveFamily, c: float,
                L: Optional[float] = None, n: int = 201,
                delta: float = 1e-5) -> WaveCheck:
    """Check the profile equations on a grid.

    The operator L W = hessS(zhat) W - J(c) W_xi is applied to the two
    supplied fields with W_xi formed by centered differencing (step
    delta) so the check is independent of any analytic differentiation
    done inside the wave family.
    """
    j = jc(model, c)
    Lbox = float(L) if L is not None else wave.default_L(c)
    grid = np.linspace(-Lbox, Lbox, n)

    r_ode = r_ker = r_jor = 0.0
    for xi in grid:
        z = wave.zhat(xi, c)
        zx = wave.zhat_xi(xi, c)
        zc = wave.zc(xi, c)
        r_ode = max(r_ode, float(np.max(np.abs(j @ zx - model.gradS(z)))))
        h = model.hessS(z)
        zxx = (wave.zhat_xi(xi + delta, c) - wave.zhat_xi(xi - delta, c)) / (2 * delta)
        zcx = (wave.zc(xi + delta, c) - wave.zc(xi - delta, c)) / (2 * delta)
        r_ker = max(r_ker, float(np.max(np.abs(h @ zx - j @ zxx))))
        r_jor = max(r_jor, float(np.max(np.abs(h @ zc - j @ zcx - model.M @ zx))))

    tail = max(float(np.max(np.abs(wave.zhat(-Lbox, c)))),
               float(np.max(np.abs(wave.zhat(Lbox, c)))))
    return WaveCheck(r_ode, r_ker, r_jor, tail)


# ---------------------------------------------------------------------------
# Dirac structure on R^{1,1}

@dataclass
class DiracStructure:
    """Generators of the Clifford algebra Cl(1,1) and the induced skew pair."""

    J1: np.ndarray
    J2: np.ndarray
    R4: np.ndarray      # induced metric diag(1,1,-1,-1)
    metric: np.ndarray  # base metric diag(1,-1)
    M: np.ndarray
    K: np.ndarray


def build_dirac() -> DiracStructure:
    j1 = np.array([[0, -1, 0, 0],
                   [1, 0, 0, 0],
                   [0, 0, 0, -1],
                   [0, 0, 1, 0]], dtype=int)
    j2 = np.array([[0, 0, 1, 0],
                   [0, 0, 0, -1],
                   [1, 0, 0, 0],
                   [0, -1, 0, 0]], dtype=int)
    r4 = np.diag([1, 1, -1, -1])
    return DiracStructure(J1=j1, J2=j2, R4=r4, metric=np.diag([1, -1]),
                          M=r4 @ j1, K=r4 @ j2)


# ---------------------------------------------------------------------------
# Massive Thirring model (structure only; no wave family here)

def build_mtm(alpha: float, nu: float) -> MultisymplecticModel:
    """S(Z) = -a/2 (w.w - v.v) - nu/4 (w.w + v.v)^2 + nu (w1 v2 + w2 v1)^2."""

    def gradS(z):
        w1, w2, v1, v2 = z
        t = w1 * w1 + w2 * w2 + v1 * v1 + v2 * v2
        q = w1 * v2 + w2 * v1
        return np.array([
            -alpha * w1 - nu * t * w1 + 2 * nu * q * v2,
            -alpha * w2 - nu * t * w2 + 2 * nu * q * v1,
            alpha * v1 - nu * t * v1 + 2 * nu * q * w2,
            alpha * v2 - nu * t * v2 + 2 * nu * q * w1,
        ])

    def hessS(z):
        w1, w2, v1, v2 = z
        t = w1 * w1 + w2 * w2 + v1 * v1 + v2 * v2
        q = w1 * v2 + w2 * v1
        h = np.empty((4, 4))
        h[0, 0] = -alpha - nu * (t + 2 * w1 * w1) + 2 * nu * v2 * v2
        h[1, 1] = -alpha - nu * (t + 2 * w2 * w2) + 2 * nu * v1 * v1
        h[2, 2] = alpha - nu * (t + 2 * v1 * v1) + 2 * nu * w2 * w2
        h[3, 3] = alpha - nu * (t + 2 * v2 * v2) + 2 * nu * w1 * w1
        h[0, 1] = h[1, 0] = -2 * nu * w1 * w2 + 2 * nu * v1 * v2
        h[0, 2] = h[2, 0] = -2 * nu * w1 * v1 + 2 * nu * v2 * w2
        h[0, 3] = h[3, 0] = 2 * nu * q
        h[1, 2] = h[2, 1] = 2 * nu * q
        h[1, 3] = h[3, 1] = -2 * nu * w2 * v2 + 2 * nu * v1 * w1
        h[2, 3] = h[3, 2] = -2 * nu * v1 * v2 + 2 * nu * w1 * w2
        return h

    return MultisymplecticModel(
        name="mtm", M=CANONICAL_M.copy(), K=CANONICAL_K.copy(),
        gradS=gradS, hessS=hessS, R=None,
        params={"alpha": alpha, "nu": nu})


def cme_to_Z(A: complex, B: complex) -> np.ndarray:
    """Real coordinates (w1, w2, v1, v2) from complex mode amplitudes."""
    w1 = 0.5 * (A.real + B.real)
    w2 = 0.5 * (A.imag + B.imag)
    v1 = 0.5 * (B.imag - A.imag)
    v2 = 0.5 * (B.real - A.real)
    return np.array([w1, w2, v1, v2])


def z_to_cme(z) -> tuple:
    w1, w2, v1, v2 = np.asarray(z, dtype=float)
    a = (w1 - v2) + 1j * (w2 - v1)
    b = (w1 + v2) + 1j * (w2 + v1)
    return a, b


# ---------------------------------------------------------------------------
# Coupled second-order wave system: the worked example with closed forms

def _alpha_of(c: float) -> float:
    if not -1.0 < c < 1.0:
        raise BadParameter(f"wave speed c={c} outside (-1, 1)")
    return 1.0 / np.sqrt(1.0 - c * c)


def build_coupled_wave(p: float):
    """Model and wave family for the coupled wave system.

    Coordinates Z = (phi, u1, u2, v);
    S(Z) = (u1^2 - u2^2)/2 + V(phi, v) with
    V = 2 phi^2 - 2 phi^3 - 2 v^2 + v^3 + (p/2)(2 phi - v)^2, p > 0.

    The profile rides on phi_hat = sech^2(alpha xi), alpha = 1/sqrt(1-c^2):
    zhat = (phi_hat, -(2-c) phi_hat', (1-2c) phi_hat', 2 phi_hat).
    Returns (model, wave).
    """
    if p <= 0:
        raise BadParameter(f"coupling p={p} must be positive")

    def gradS(z):
        phi, u1, u2, v = z
        vphi = 4 * phi - 6 * phi * phi + 2 * p * (2 * phi - v)
        vv = -4 * v + 3 * v * v - p * (2 * phi - v)
        return np.array([vphi, u1, -u2, vv])

    def hessS(z):
        phi, _, _, v = z
        return np.array([[4 - 12 * phi + 4 * p, 0, 0, -2 * p],
                         [0, 1, 0, 0],
                         [0, 0, -1, 0],
                         [-2 * p, 0, 0, -4 + 6 * v + p]])

    model = MultisymplecticModel(
        name="coupled-wave", M=CANONICAL_M.copy(), K=CANONICAL_K.copy(),
        gradS=gradS, hessS=hessS, R=REVERSOR.copy(), params={"p": p})

    def _profile(xi, c):
        al = _alpha_of(c)
        u = al * xi
        s2 = 1.0 / np.cosh(u) ** 2
        t = np.tanh(u)
        ph = s2
        ph_x = -2 * al * s2 * t
        return al, s2, t, ph, ph_x

    def zhat(xi, c):
        _, _, _, ph, ph_x = _profile(xi, c)
        return np.array([ph, -(2 - c) * ph_x, (1 - 2 * c) * ph_x, 2 * ph])

    def zhat_xi(xi, c):
        al, s2, t, ph, ph_x = _profile(xi, c)
        ph_xx = -2 * al * al * s2 * (s2 - 2 * t * t)
        return np.array([ph_x, -(2 - c) * ph_xx, (1 - 2 * c) * ph_xx, 2 * ph_x])

    def zhat_c(xi, c):
        al, s2, t, ph, ph_x = _profile(xi, c)
        dal = c * al ** 3
        ph_c = -2 * dal * xi * s2 * t
        ph_xc = -2 * dal * (s2 * t + al * xi * s2 * (s2 - 2 * t * t))
        return np.array([ph_c,
                         ph_x - (2 - c) * ph_xc,
                         -2 * ph_x + (1 - 2 * c) * ph_xc,
                         2 * ph_c])

    wave = WaveFamily(
        zhat=zhat, zhat_xi=zhat_xi, zhat_c=zhat_c,
        c_window=(-1.0, 1.0),
        decay_rate=lambda c: 2.0 * _alpha_of(c))
    return model, wave


@dataclass
class CoupledWaveOracle:
    """Closed-form reference values for the coupled wave system at (p, c)."""

    p: float
    c: float
    alpha: float
    gamma: float                 # sqrt(4 + 3p)
    chi: float                   # -1/(768 alpha)
    pi: float                    # 6p gamma (5-3p)(1+p) / (25 alpha)
    momentum: float              # -16 c alpha / 5
    dIdc: float                  # -16 alpha^3 / 5
    mu_at_zero: np.ndarray       # (-gamma a, -2a, 2a, gamma a)

    def psi_plus(self, xi: float) -> float:
        return self._psi(xi, +1)

    def psi_minus(self, xi: float) -> float:
        return self._psi(xi, -1)

    def _psi(self, xi, sgn):
        al, g, p = self.alpha, self.gamma, self.p
        t = np.tanh(al * xi)
        return np.exp(-sgn * al * g * xi) * (
            sgn * p * g / 5 + (1 + 6 * p / 5) * t + sgn * g * t * t + t ** 3)

    def _psi_xi(self, xi, sgn):
        al, g, p = self.alpha, self.gamma, self.p
        t = np.tanh(al * xi)
        s2 = 1.0 / np.cosh(al * xi) ** 2
        return (-sgn * al * g * self._psi(xi, sgn)
                + al * np.exp(-sgn * al * g * xi) * s2
                * (1 + 6 * p / 5 + sgn * 2 * g * t + 3 * t * t))

    def a_plus(self, xi: float) -> np.ndarray:
        return self._a(xi, +1)

    def a_minus(self, xi: float) -> np.ndarray:
        return self._a(xi, -1)

    def _a(self, xi, sgn):
        c = self.c
        ps, px = self._psi(xi, sgn), self._psi_xi(xi, sgn)
        return np.array([2 * ps, (2 * c - 1) * px, (2 - c) * px, ps])

    def evans_exact(self, lam: complex) -> complex:
        """Scaled Evans function: positive on the real axis away from roots
        iff the factored polynomial says so.  x = alpha lambda."""
        al, p = self.alpha, self.p
        x2 = (al * lam) ** 2
        s = np.sqrt(4 + x2) * np.sqrt(4 + 3 * p + x2)
        poly = ((3 + x2) * (5 - x2) * (3 + 3 * p + x2)
                * (3 * p + x2) * (5 - 3 * p - x2))
        return 3 * s * al * lam ** 2 * poly / (16 * 225 ** 2)


def oracle_coupled_wave(p: float, c: float = 0.0) -> CoupledWaveOracle:
    if p <= 0:
        raise BadParameter(f"coupling p={p} must be positive")
    al = _alpha_of(c)
    g = np.sqrt(4 + 3 * p)
    return CoupledWaveOracle(
        p=p, c=c, alpha=al, gamma=g,
        chi=-1.0 / (768.0 * al),
        pi=6 * p * g * (5 - 3 * p) * (1 + p) / (25 * al),
        momentum=-16.0 * c * al / 5.0,
        dIdc=-16.0 * al ** 3 / 5.0,
        mu_at_zero=np.array([-g * al, -2 * al, 2 * al, g * al]))
