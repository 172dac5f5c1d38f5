"""Evans function in determinant and wedge form, derivatives, scans, winding counts.

The determinant form pairs the two adjoint-normalized modes w3, w4 against the
two decaying modes u3, u4 at a matching point.  The wedge form takes the 4-fold
exterior product of all four u-modes.  Both are assembled from rescaled
trajectories, so every pairing is evaluated at O(1) scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import InfinitySpectrum, continuous_spectrum_distance, spectrum
from .errors import BadParameter, ContourOnSpectrum, NoConverge, NonClosure, StepTooLarge
from .integrator import integrate_mode
from .linalg import symplectic_form, wedge4
from .model import MultisymplecticModel, WaveFamily, jc

__all__ = [
    "Numerics",
    "EvansSample",
    "Derivatives",
    "ScanResult",
    "evans_det",
    "evans_wedge",
    "eta_identity_residual",
    "derivatives_at_zero",
    "real_axis_scan",
    "winding_count",
]


@dataclass(frozen=True)
class Numerics:
    """Shared numerical knobs for Evans-function assembly."""

    tol: float = 1e-10       # per-step integration tolerance
    L: float | None = None   # domain half-length override
    h: float = 0.1           # derivative step at the origin
    grid_n: int = 31         # default sample count for scans

    def __post_init__(self):
        if self.tol <= 0:
            raise BadParameter("tol must be positive")
        if self.h <= 0:
            raise BadParameter("h must be positive")


_DEFAULT = Numerics()


@dataclass
class EvansSample:
    """One Evans-function evaluation with its 2x2 pairing entries.

    The matrix is [[d1, d3], [d4, d2]] with d1 = Om(w3,u3), d2 = Om(w4,u4),
    d3 = Om(w3,u4), d4 = Om(w4,u3); D = d1*d2 - d3*d4.
    """

    lam: complex
    D: complex
    d1: complex = 0.0
    d2: complex = 0.0
    d3: complex = 0.0
    d4: complex = 0.0
    D_wedge: complex | None = None


def evans_det(model: MultisymplecticModel, wave: WaveFamily, c: float, lam: complex,
              numerics: Numerics | None = None, spec: InfinitySpectrum | None = None,
              xi_star: float = 0.0) -> EvansSample:
    """Determinant-form Evans function at one spectral point.

    Integrates u3, u4 from -L and w3, w4 from +L to the matching point
    xi_star and returns the determinant of the symplectic cross-pairings.
    Pairings with mismatched mode indices are rebalanced by
    exp((mu_i - mu_j) xi_star); the product d3*d4 is insensitive to this,
    so D itself does not depend on the rebalancing convention.
    """
    nm = numerics or _DEFAULT
    if spec is None:
        spec = spectrum(model, c, lam)
    runs = {}
    for j in (3, 4):
        runs["u", j] = integrate_mode(model, wave, c, lam, j, "u",
                                      tol=nm.tol, L=nm.L, spec=spec, until=xi_star)
        runs["w", j] = integrate_mode(model, wave, c, lam, j, "w",
                                      tol=nm.tol, L=nm.L, spec=spec, until=xi_star)
    if xi_star == 0.0:
        val = {k: r.value_at_zero for k, r in runs.items()}
        reb = {(i, j): 1.0 for i in (3, 4) for j in (3, 4)}
    else:
        val = {k: r.value_at_end for k, r in runs.items()}
        mu = spec.mu
        reb = {(i, j): np.exp((mu[i - 1] - mu[j - 1]) * xi_star)
               for i in (3, 4) for j in (3, 4)}
    J = jc(model, c)
    d1 = symplectic_form(J, val["w", 3], val["u", 3]) * reb[3, 3]
    d3 = symplectic_form(J, val["w", 3], val["u", 4]) * reb[4, 3]
    d4 = symplectic_form(J, val["w", 4], val["u", 3]) * reb[3, 4]
    d2 = symplectic_form(J, val["w", 4], val["u", 4]) * reb[4, 4]
    return EvansSample(lam=complex(lam), D=d1 * d2 - d3 * d4,
                       d1=d1, d2=d2, d3=d3, d4=d4)


def evans_wedge(model: MultisymplecticModel, wave: WaveFamily, c: float, lam: complex,
                numerics: Numerics | None = None,
                spec: InfinitySpectrum | None = None) -> complex:
    """Wedge-form Evans function: u1(0) ^ u2(0) ^ u3(0) ^ u4(0).

    The exponential prefactor that makes the wedge xi-independent equals 1 at
    the matching point xi = 0.
    """
    nm = numerics or _DEFAULT
    if spec is None:
        spec = spectrum(model, c, lam)
    vals = [integrate_mode(model, wave, c, lam, j, "u",
                           tol=nm.tol, L=nm.L, spec=spec).value_at_zero
            for j in (1, 2, 3, 4)]
    return complex(wedge4(*vals))


def eta_identity_residual(model: MultisymplecticModel, spec: InfinitySpectrum) -> float:
    """Relative residual of the bivector identity behind the wedge/determinant link.

    J eta3 ^ J eta4 must equal the contraction of zeta1 ^ zeta2 into the
    4-form built from all four J eta_j.
    """
    from .linalg import interior2, wedge2

    J = jc(model, spec.c)
    je = [J @ spec.eta[k] for k in range(4)]
    qstar = wedge4(*je)
    lhs = wedge2(je[2], je[3])
    rhs = interior2(qstar, wedge2(spec.zeta[0], spec.zeta[1]))
    num = max(abs(a - b) for a, b in zip(lhs.coords, rhs.coords))
    den = max(max(abs(x) for x in lhs.coords), 1e-300)
    return num / den


@dataclass
class Derivatives:
    """Evans derivatives at the origin from 5-point central differences."""

    D0: float
    D1: float
    D2_raw: float
    D2_scaled: float      # D2_raw / 2, matching the rescaled statement
    scale: float          # max |D| over the sample stencil
    samples: dict = field(default_factory=dict)


def derivatives_at_zero(model: MultisymplecticModel, wave: WaveFamily, c: float,
                        h: float | None = None,
                        numerics: Numerics | None = None) -> Derivatives:
    """D, D', D'' at lambda = 0 by central differences with Richardson extrapolation.

    Samples at {0, +-h/2, +-h}.  Raises StepTooLarge when a least-squares
    quadratic through the five samples leaves more than 1e-3 relative residual,
    which signals that h reaches outside the quadratic neighborhood of 0.
    """
    nm = numerics or _DEFAULT
    hh = nm.h if h is None else float(h)
    if hh <= 0:
        raise BadParameter("derivative step must be positive")
    lams = [0.0, hh / 2, -hh / 2, hh, -hh]
    vals = {}
    for lam in lams:
        vals[lam] = evans_det(model, wave, c, lam, numerics=nm).D.real
    scale = max(abs(v) for v in vals.values())
    # quadratic-fit guard: the stencil must sit inside the parabolic regime
    xs = np.array(lams)
    V = np.vander(xs, 3)
    coef, *_ = np.linalg.lstsq(V, np.array([vals[l] for l in lams]), rcond=None)
    resid = np.array([vals[l] for l in lams]) - V @ coef
    if scale > 0 and np.sqrt(np.mean(resid ** 2)) / scale > 1e-3:
        raise StepTooLarge(f"h={hh} leaves quadratic-fit residual "
                           f"{np.sqrt(np.mean(resid**2))/scale:.2e} relative")
    d1_h = (vals[hh] - vals[-hh]) / (2 * hh)
    d1_h2 = (vals[hh / 2] - vals[-hh / 2]) / hh
    d1 = (4 * d1_h2 - d1_h) / 3
    d2_h = (vals[hh] - 2 * vals[0.0] + vals[-hh]) / hh ** 2
    d2_h2 = (vals[hh / 2] - 2 * vals[0.0] + vals[-hh / 2]) / (hh / 2) ** 2
    d2 = (4 * d2_h2 - d2_h) / 3
    return Derivatives(D0=vals[0.0], D1=d1, D2_raw=d2, D2_scaled=d2 / 2,
                       scale=scale, samples=vals)


@dataclass
class ScanResult:
    lams: np.ndarray
    values: np.ndarray            # complex D(lambda)
    entries: np.ndarray           # (n, 4) complex d1..d4
    brackets: list                # (lo, hi) sign-change intervals before refinement
    roots: list                   # bisection-refined root locations
    d_inf: int                    # sign of D at the right end


def real_axis_scan(model: MultisymplecticModel, wave: WaveFamily, c: float,
                   lam_max: float, n: int | None = None,
                   numerics: Numerics | None = None) -> ScanResult:
    """Sample D on (0, lam_max], bracket sign changes, refine roots by bisection."""
    nm = numerics or _DEFAULT
    nn = nm.grid_n if n is None else int(n)
    if lam_max <= 0 or nn < 2:
        raise BadParameter("scan needs lam_max > 0 and at least two samples")
    lams = np.linspace(lam_max / nn, lam_max, nn)
    for lam in lams:
        if continuous_spectrum_distance(model, c, lam) < 1e-6:
            warnings.warn(f"scan sample lambda={lam:.6g} sits on the continuous "
                          "spectrum", stacklevel=2)
            break
    vals, ents = [], []
    for lam in lams:
        s = evans_det(model, wave, c, lam, numerics=nm)
        vals.append(s.D)
        ents.append((s.d1, s.d2, s.d3, s.d4))
    vals = np.array(vals)
    ents = np.array(ents)
    def f(lam):
        return evans_det(model, wave, c, lam, numerics=nm).D.real
    brackets, roots = [], []
    re = vals.real
    for k in range(nn - 1):
        if re[k] == 0.0:
            roots.append(float(lams[k]))
            continue
        if re[k] * re[k + 1] < 0:
            lo, hi = float(lams[k]), float(lams[k + 1])
            brackets.append((lo, hi))
            flo = re[k]
            while hi - lo > 1e-6:
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
    d_inf = 1 if re[-1] > 0 else (-1 if re[-1] < 0 else 0)
    return ScanResult(lams=lams, values=vals, entries=ents,
                      brackets=brackets, roots=roots, d_inf=d_inf)


def _rect_path(rect, m_per_edge):
    re0, re1, im0, im1 = rect
    corners = [complex(re0, im0), complex(re1, im0),
               complex(re1, im1), complex(re0, im1)]
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        for t in np.linspace(0.0, 1.0, m_per_edge, endpoint=False):
            pts.append(a + t * (b - a))
    pts.append(corners[0])
    return pts


def winding_count(model: MultisymplecticModel, wave: WaveFamily, c: float,
                  rect, numerics: Numerics | None = None,
                  m_per_edge: int = 12) -> int:
    """Argument-principle zero count of D inside an axis-aligned rectangle.

    The boundary is refined until consecutive image points subtend less than
    pi/2, so the winding of the image curve about 0 is unambiguous.  Contours
    default to a looser integration tolerance than pointwise evaluation; pass
    numerics to override.
    """
    nm = numerics or Numerics(tol=1e-8)
    re0, re1, im0, im1 = (float(x) for x in rect)
    if not (re0 < re1 and im0 < im1):
        raise BadParameter("rectangle must satisfy re0 < re1 and im0 < im1")
    if re0 <= 0.0 <= re1 and im0 <= 0.0 <= im1:
        raise BadParameter("contour must not enclose or touch the origin, "
                           "where D vanishes identically")
    pts = _rect_path((re0, re1, im0, im1), m_per_edge)
    for lam in pts[:-1]:
        if continuous_spectrum_distance(model, c, lam) < 1e-6:
            raise ContourOnSpectrum(f"contour point {lam:.6g} sits on the "
                                    "continuous spectrum")
    cache: dict[complex, complex] = {}

    def f(lam):
        if lam not in cache:
            cache[lam] = evans_det(model, wave, c, lam, numerics=nm).D
        return cache[lam]

    scale = max(abs(f(lam)) for lam in pts)
    if scale == 0.0:
        raise NonClosure("Evans function vanishes on the whole contour")

    def phase_step(za, zb, fa, fb, depth):
        if abs(fa) < 1e-14 * scale or abs(fb) < 1e-14 * scale:
            raise NonClosure("Evans function vanishes on the contour")
        dphi = np.angle(fb / fa)
        if abs(dphi) < np.pi / 2:
            return dphi
        if depth > 40:
            raise NoConverge("contour refinement did not localize the phase")
        zm = 0.5 * (za + zb)
        fm = f(zm)
        return (phase_step(za, zm, fa, fm, depth + 1)
                + phase_step(zm, zb, fm, fb, depth + 1))

    total = 0.0
    for k in range(len(pts) - 1):
        total += phase_step(pts[k], pts[k + 1], f(pts[k]), f(pts[k + 1]), 0)
    turns = total / (2 * np.pi)
    residual = abs(total - 2 * np.pi * round(turns))
    if residual >= 0.1:
        raise NonClosure(f"accumulated phase misses a full turn by {residual:.3f}")
    return int(round(turns))
