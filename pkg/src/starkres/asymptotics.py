"""Small-field predictions for Stark resonances and exact fixed-point forms.

Four families of resonances are predicted from field-free data:

* strings accumulating on the positive ``k`` axis, from ``G = -rho``,
* strings accumulating on the ray ``arg k = -pi/3``, from a reflection ratio
  evaluated on that ray,
* limit points at zeros of ``F`` inside ``-pi/3 < arg k < 0``,
* bound-state resonances near ``z = lambda0`` with exponentially small width.

Along a string, ``log(iG) = -l + i theta`` and

    k(j) = eta0(j) - f (theta + i l) / (4 eta0(j)**2),   eta0(j) = (3 pi f j / 2)**(1/3).

The exact matching condition is also rewritten as ``e^{4ik^3/3f} = Phi_k(k)``
with ``Phi_k`` assembled from O(1) quantities only, which turns it into a
contracting fixed-point iteration on ``k**3``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .airy import decompose_oscillatory
from .contour import ComplexRect
from .potential import Potential
from .resonance import (MatchDirection, NoConvergenceError, Resonance, _seed_data,
                        refine_root, residual_terms)
from .scattering import (DegenerateFunctionError, ReflectionZero, reflection_F_array,
                         rho_array)
from .schrodinger import propagate_array
from .spectrum import BoundState, predicted_width

__all__ = [
    "Family",
    "FTooSmallError",
    "GApprox",
    "GPoleError",
    "GuardViolationError",
    "RegionDescriptor",
    "StringPrediction",
    "TrackedResonance",
    "WidthUnderflowError",
    "bound_state_resonance",
    "eta0",
    "exact_exponential_ratio",
    "g_approx",
    "resonance_free_regions",
    "string_fixed_point",
    "string_line",
    "string_positive_axis",
    "track_reflection_zero_resonance",
]

F_MIN = 1e-8
G_POLE_CAP = 1e6
WIDTH_EXPONENT_MAX = 30.0
_BRANCH_STEP = 2e-3


class FTooSmallError(ValueError):
    """``|F|`` nearly vanishes on the window, so the string expansion breaks down."""


class GPoleError(ArithmeticError):
    """The line reflection ratio is too large: the window is next to one of its poles."""


class GuardViolationError(ValueError):
    """The fixed-point start is too close to a reflection zero."""


class WidthUnderflowError(ArithmeticError):
    """The predicted width is below double-precision resolution."""


class Family(str, Enum):
    POSITIVE_AXIS = "positive_axis"
    LINE = "line_2pi3"
    REFLECTION_ZERO = "reflection_zero"
    BOUND_STATE = "bound_state"


@dataclass(frozen=True)
class StringPrediction:
    family: Family
    j: int
    k_pred: complex
    eta0: float
    theta: float
    l: float
    order_estimate: float
    steps: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {"family": self.family.value, "j": self.j, "k_pred": self.k_pred,
                "eta0": self.eta0, "theta": self.theta, "l": self.l,
                "order_estimate": self.order_estimate}


@dataclass(frozen=True)
class TrackedResonance(Resonance):
    """A resonance near a reflection zero with the approach ``(f, |k(f) - k0|)``."""

    approach: tuple[tuple[float, float], ...] = ()


def eta0(f: float, j) -> np.ndarray | float:
    """``(3 pi f j / 2)**(1/3)``."""
    return np.cbrt(1.5 * math.pi * f * np.asarray(j, dtype=float))


def _j_range(f: float, lo: float, hi: float) -> np.ndarray:
    j0 = max(1, math.floor(2 * lo ** 3 / (3 * math.pi * f)))
    j1 = math.ceil(2 * hi ** 3 / (3 * math.pi * f)) + 1
    js = np.arange(j0, j1 + 1)
    e = eta0(f, js)
    return js[(e >= lo) & (e <= hi)]


def _check_window(window) -> tuple[float, float]:
    a, b = (float(v) for v in window)
    if not (0 < a < b):
        raise ValueError(f"window [{a}, {b}] must lie in (0, inf) with a < b")
    return a, b


def _continuous_log(logG: Callable[[np.ndarray], np.ndarray], a: float, lo: float,
                    hi: float, nodes: np.ndarray) -> np.ndarray:
    """``log G`` at ``nodes`` on the branch continuous over ``[lo, hi]`` and principal at ``a``."""
    n = max(8, math.ceil((hi - lo) / _BRANCH_STEP))
    grid = np.union1d(np.linspace(lo, hi, n + 1), np.concatenate([[a], nodes]))
    vals = logG(grid)
    im = np.unwrap(vals.imag)
    i_a = int(np.searchsorted(grid, a))
    im += vals.imag[i_a] - im[i_a]
    cont = vals.real + 1j * im
    return cont[np.searchsorted(grid, nodes)]


def _predict(f: float, js: np.ndarray, logiG: np.ndarray):
    e = eta0(f, js)
    theta, l = logiG.imag, -logiG.real
    shift = -(f / (4 * e * e)) * (theta + 1j * l)
    return e, theta, l, e + shift


def string_positive_axis(p: Potential, f: float, k_window, select: str = "eta0",
                         ) -> list[StringPrediction]:
    """Predicted resonances of the string on the positive ``k`` axis.

    ``select="eta0"`` keeps every ``j`` with ``eta0(j)`` in the window;
    ``select="k_pred"`` keeps those whose predicted ``Re k`` falls in it,
    which is the set to compare with an exact count over a ``k`` rectangle.
    """
    if f <= 0:
        raise ValueError("f must be positive")
    a, b = _check_window(k_window)
    pad = 0.0 if select == "eta0" else 0.1 * (b - a) + 2 * f
    if select not in ("eta0", "k_pred"):
        raise ValueError(f"unknown selection {select!r}")
    lo, hi = max(a - pad, 0.5 * a), b + pad
    grid = np.linspace(lo, hi, 33)
    F = reflection_F_array(p, grid.astype(complex))
    if np.min(np.abs(F)) < F_MIN:
        raise FTooSmallError(f"|F| < {F_MIN:g} on [{lo:.4g}, {hi:.4g}]; use the reflection-zero family")
    js = _j_range(f, lo, hi)
    if js.size == 0:
        raise ValueError(f"no string index j has eta0(j) in [{lo:.4g}, {hi:.4g}]")

    def logiG(x):
        return np.log(-1j * rho_array(p, x.astype(complex)))

    e, theta, l, k = _predict(f, js, _continuous_log(logiG, a, lo, hi, eta0(f, js)))
    keep = (e >= a) & (e <= b) if select == "eta0" else (k.real >= a) & (k.real <= b)
    return [StringPrediction(Family.POSITIVE_AXIS, int(jj), complex(kk), float(ee), float(t),
                             float(ll), f * f)
            for jj, kk, ee, t, ll in zip(js[keep], k[keep], e[keep], theta[keep], l[keep])]


def line_ratio(p: Potential, eta) -> np.ndarray:
    """``G_line(eta) = e^{-2ikL} (psi' - ik psi) / (psi' + ik psi)`` at ``-L``, ``k = e^{-i pi/3} eta``.

    ``psi`` is the field-free solution equal to ``e^{-ik(x - L)}`` right of the support.
    """
    num, den = _line_terms(p, eta)
    return num / den


def _line_terms(p: Potential, eta) -> tuple[np.ndarray, np.ndarray]:
    k = np.exp(-1j * math.pi / 3) * np.asarray(eta, dtype=complex)
    y, dy = propagate_array(p, k * k, 0.0, p.L, -p.L, 1.0 + 0 * k, -1j * k)
    return np.exp(-2j * k * p.L) * (dy - 1j * k * y), dy + 1j * k * y


def string_line(p: Potential, f: float, eta_window, select: str = "eta0",
                ) -> list[StringPrediction]:
    """Predicted resonances of the string on the ray ``arg k = -pi/3``."""
    if f <= 0:
        raise ValueError("f must be positive")
    a, b = _check_window(eta_window)
    if select not in ("eta0", "k_pred"):
        raise ValueError(f"unknown selection {select!r}")
    pad = 0.0 if select == "eta0" else 0.1 * (b - a) + 2 * f
    lo, hi = max(a - pad, 0.5 * a), b + pad
    grid = np.linspace(lo, hi, 33)
    num, den = _line_terms(p, grid)
    # without reflection psi stays e^{-ik(x - L)} and the denominator vanishes identically
    if np.max(np.abs(den) / np.abs(num)) < F_MIN:
        raise DegenerateFunctionError("the line reflection ratio is degenerate (V = 0)")
    with np.errstate(divide="ignore", invalid="ignore"):
        G = num / den
    if np.max(np.abs(G)) > G_POLE_CAP:
        raise GPoleError(f"|G_line| > {G_POLE_CAP:g} on [{lo:.4g}, {hi:.4g}]")
    js = _j_range(f, lo, hi)
    if js.size == 0:
        raise ValueError(f"no string index j has eta0(j) in [{lo:.4g}, {hi:.4g}]")

    def logiG(x):
        return np.log(1j * line_ratio(p, x))

    e, theta, l, eta = _predict(f, js, _continuous_log(logiG, a, lo, hi, eta0(f, js)))
    k = np.exp(-1j * math.pi / 3) * eta
    keep = (e >= a) & (e <= b) if select == "eta0" else (eta.real >= a) & (eta.real <= b)
    return [StringPrediction(Family.LINE, int(jj), complex(kk), float(ee), float(t),
                             float(ll), f * f)
            for jj, kk, ee, t, ll in zip(js[keep], k[keep], e[keep], theta[keep], l[keep])]


def exact_exponential_ratio(p: Potential, k: complex, f: float) -> complex:
    """``Phi(k, f)`` with ``residual(k) = 0`` exactly when ``e^{4i eta^{3/2}/3f} = Phi``.

    Here ``eta = k**2 - f L``.  ``A2`` at ``L`` is split into its two
    oscillatory components ``c_pm e^{pm i phi}`` with ``2 i phi = 4 i eta^{3/2}/3f``;
    the left-seeded solution ``psi`` then gives
    ``Phi = -(psi' c_- - psi c_-') / (psi' c_+ - psi c_+')``.
    Raises :class:`~starkres.airy.AirySectorError` when ``k`` is too far below
    the real axis for the split.
    """
    if f <= 0:
        raise ValueError("f must be positive")
    k = complex(k)
    f3 = f ** (1.0 / 3.0)
    dec = decompose_oscillatory(f3 * (p.L - k * k / f))
    y0, dy0, _ = _seed_data(p, np.array([k]), f, MatchDirection.SEED_LEFT)
    y, dy = propagate_array(p, np.array([k * k]), f, -p.L, p.L, y0, dy0)
    y, dy = complex(y[0]), complex(dy[0])
    plus = dy * dec.coeff_plus - y * f3 * dec.deriv_plus
    minus = dy * dec.coeff_minus - y * f3 * dec.deriv_minus
    return -minus / plus


def _cubic_shift(k: complex, f: float, L: float) -> complex:
    """``4i (k^3 - eta^{3/2}) / 3f``, an O(1) quantity."""
    eta = k * k - f * L
    return 4j * (k ** 3 - eta ** 1.5) / (3 * f)


def _log_phi_k(p: Potential, k: complex, f: float) -> complex:
    """``log`` of ``Phi_k = Phi e^{4i(k^3 - eta^{3/2})/3f}`` (principal)."""
    return cmath.log(exact_exponential_ratio(p, k, f)) + _cubic_shift(k, f, p.L)


def string_fixed_point(p: Potential, f: float, j: int, k_start: complex | None = None,
                       zero: ReflectionZero | None = None, eps: float = 0.5,
                       log_ref: complex | None = None, maxit: int = 40,
                       tol: float = 1e-12) -> StringPrediction:
    """Exact string resonance from ``k^3 = 3 pi f j / 2 - (3if/4) log Phi_k(k)``.

    The logarithm is continued along the iterates, starting on the branch
    nearest ``log_ref`` (principal when omitted).  With a registered
    reflection zero of order ``p`` the start must keep the distance
    ``f**((1 - eps)/p)`` from it.
    """
    if f <= 0:
        raise ValueError("f must be positive")
    k = complex(eta0(f, j)) if k_start is None else complex(k_start)
    if zero is not None:
        guard = f ** ((1.0 - eps) / zero.order)
        if abs(k - zero.k0) < guard:
            raise GuardViolationError(
                f"|k_start - k0| = {abs(k - zero.k0):.3g} is below the guard {guard:.3g}")
    c = 1.5 * math.pi * f * j
    prev_log = log_ref
    steps: list[float] = []
    for _ in range(maxit):
        lg = _log_phi_k(p, k, f)
        if prev_log is not None:
            lg += 2j * math.pi * round((prev_log - lg).imag / (2 * math.pi))
        prev_log = lg
        rhs = c - 0.75j * f * lg
        roots = [cmath.exp((cmath.log(rhs) + 2j * math.pi * m) / 3) for m in (-1, 0, 1)]
        k_new = min(roots, key=lambda r: abs(r - k))
        steps.append(abs(k_new - k))
        k = k_new
        if steps[-1] < tol * abs(k):
            break
    else:
        raise NoConvergenceError(f"fixed point did not converge in {maxit} iterations "
                                 f"(last step {steps[-1]:.3g})")
    logR, logscale, _ = residual_terms(p, np.array([k]), f, MatchDirection.SEED_LEFT)
    if logR[0].real - logscale[0] > math.log(1e-8):
        raise NoConvergenceError(f"fixed point {k} does not annihilate the residual")
    return StringPrediction(Family.POSITIVE_AXIS, int(j), k, float(eta0(f, j)),
                            float(-prev_log.imag), float(prev_log.real), 0.0, tuple(steps))


def track_reflection_zero_resonance(p: Potential, f: float, zero: ReflectionZero,
                                    halvings: int = 2, radius: float = 0.25,
                                    ) -> TrackedResonance:
    """The resonance converging to the simple zero ``zero.k0`` of ``F``.

    It is refined from ``k0`` at ``f, f/2, ..., f/2**halvings``; the distances
    to ``k0`` are recorded in ``approach``.  A root farther than ``radius``
    from ``k0`` belongs to another family and is rejected.
    """
    if zero.order != 1:
        raise ValueError(f"only simple zeros are supported (order {zero.order})")
    approach = []
    first = None
    for i in range(halvings + 1):
        fi = f / 2 ** i
        r = refine_root(p, zero.k0, fi, method=Family.REFLECTION_ZERO.value)
        d = abs(r.k - zero.k0)
        if d > radius:
            raise NoConvergenceError(f"refinement from k0 = {zero.k0} at f = {fi} "
                                     f"landed at distance {d:.3g}")
        approach.append((fi, d))
        first = r if first is None else first
    return TrackedResonance(first.k, first.z, first.residual, first.method, first.f,
                            first.j, first.iterations, tuple(approach))


def bound_state_resonance(p: Potential, f: float, bs: BoundState) -> tuple[Resonance, float]:
    """The resonance born from ``bs`` at field ``f`` and its predicted width."""
    if f <= 0:
        raise ValueError("f must be positive")
    expo = (4.0 / (3.0 * f)) * (-bs.lambda0) ** 1.5
    if expo > WIDTH_EXPONENT_MAX:
        raise WidthUnderflowError(f"width exponent {expo:.3g} exceeds {WIDTH_EXPONENT_MAX}; "
                                  f"the width is below double-precision resolution")
    width = predicted_width(bs, f)
    z0 = bs.lambda0 + f * bs.lambda1 - 1j * width
    k0 = cmath.sqrt(z0)
    r = refine_root(p, k0, f, variable="z", method=Family.BOUND_STATE.value)
    return r, width


@dataclass(frozen=True)
class GApprox:
    """``1 + e^{4ik^3/3f} F(k) / 2k``, kept in factored form.

    ``log_term`` is ``log(e^{4ik^3/3f} / 2k)``; ``value`` is NaN when that
    term overflows (``overflow`` is then set).
    """

    k: complex
    F: complex
    log_term: complex
    value: complex
    overflow: bool

    def relative(self) -> float:
        """``|value| / |e^{4ik^3/3f} / 2k|``, computed without overflow."""
        with np.errstate(over="ignore"):
            return abs(cmath.exp(-self.log_term) + self.F) if self.log_term.real > -700 \
                else abs(1.0 / cmath.exp(self.log_term) + self.F)


def g_approx(p: Potential, z: complex, f: float, delta: float = 0.1) -> GApprox:
    """Leading-order form of the Fredholm determinant along the positive-axis strings."""
    if f <= 0:
        raise ValueError("f must be positive")
    k = cmath.sqrt(complex(z))
    if not (-math.pi / 6 < cmath.phase(k) < 0 and delta < abs(k) < 1 / delta):
        raise ValueError(f"k = {k} is outside arg k in (-pi/6, 0), {delta} < |k| < {1 / delta}")
    F = complex(reflection_F_array(p, np.array([k]))[0])
    log_term = 4j * k ** 3 / (3 * f) - cmath.log(2 * k)
    if log_term.real > 700:
        return GApprox(k, F, log_term, complex(math.nan, math.nan), True)
    return GApprox(k, F, log_term, 1 + cmath.exp(log_term) * F, False)


@dataclass(frozen=True)
class RegionDescriptor:
    """A set of the ``k`` plane free of resonances for small ``f``, with probe rectangles."""

    label: str
    inequalities: str
    contains: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    probes: tuple[ComplexRect, ...]

    def to_dict(self) -> dict:
        return {"label": self.label, "inequalities": self.inequalities,
                "probes": [[r.re0, r.re1, r.im0, r.im1] for r in self.probes]}


def _abs_F(p: Potential):
    def g(k):
        with np.errstate(all="ignore"):
            v = np.abs(reflection_F_array(p, k))
        return np.where(np.isfinite(v), v, np.inf)
    return g


def _probe_rects(contains, centers: np.ndarray, half: float, n: int = 3) -> tuple[ComplexRect, ...]:
    """Up to ``n`` evenly spread squares, of half-side ``half``, lying inside the region."""
    t = np.linspace(-half, half, 7)
    offs = (t[None, :] + 1j * t[:, None]).ravel()
    ok = []
    for c in centers:
        pts = c + offs
        if pts.real.min() > 0 and pts.imag.max() < 0 and np.all(contains(pts)):
            ok.append(c)
    if not ok:
        return ()
    idx = np.unique(np.round(np.linspace(0, len(ok) - 1, n)).astype(int))
    return tuple(ComplexRect(ok[i].real - half, ok[i].real + half,
                             ok[i].imag - half, ok[i].imag + half) for i in idx)


def resonance_free_regions(p: Potential, f: float, delta: float = 0.2, C0: float = 10.0,
                           C1: float | None = None, spectrum: list[float] | None = None,
                           half: float = 0.03) -> list[RegionDescriptor]:
    """The six resonance-free sets, instantiated at ``f``, each with probe rectangles.

    ``C1`` (the ``|F|`` floor of the first set) defaults to ``delta``.
    ``spectrum`` lists the negative eigenvalues used by ``d(z)``; it is
    computed when omitted.
    """
    if delta <= 0 or C0 <= 0 or f <= 0:
        raise ValueError("delta, C0 and f must be positive")
    C1 = delta if C1 is None else C1
    if spectrum is None:
        from .spectrum import bound_states
        spectrum = [b.lambda0 for b in bound_states(p)]
    absF = _abs_F(p)
    logf = math.log(1 / f)
    rot = cmath.exp(1j * math.pi / 3)  # k = e^{-i pi/3}(k0 + i kappa) => e^{i pi/3} k = k0 + i kappa

    def zring(k):
        return (np.abs(k) ** 2 > delta) & (np.abs(k) ** 2 < 1 / delta)

    def dist(z):
        d = np.where(z.real >= 0, np.abs(z.imag), np.abs(z))
        for lam in spectrum:
            d = np.minimum(d, np.abs(z - lam))
        return d

    arg = np.angle
    regions: list[tuple[str, str, Callable]] = [
        ("i", f"|z| in ({delta}, {1 / delta}), arg k in [-pi/6, 0), Im k <= -{C0 * f:.6g}, "
              f"|F(k)| > {C1}",
         lambda k: zring(k) & (arg(k) >= -math.pi / 6) & (k.imag <= -C0 * f) & (absF(k) > C1)),
        ("ii", f"|z| in ({delta}, {1 / delta}), arg k in [-pi/6, 0), "
               f"Im k <= -3 f log(1/f) / 8|k|^2, |F(k)| > {C0 * f:.6g}",
         lambda k: zring(k) & (arg(k) >= -math.pi / 6)
         & (k.imag <= -3 * f * logf / (8 * np.abs(k) ** 2)) & (absF(k) > C0 * f)),
        ("iii", f"|z| in ({delta}, {1 / delta}), arg z in [-pi, -5pi/6], "
                f"d(z) > {C0 * f:.6g}",
         lambda k: zring(k) & (arg(k * k) <= -5 * math.pi / 6) & (dist(k * k) > C0 * f)),
        ("iv", f"|k| < {1 / delta}, arg k in [-pi/2 + {delta}, -pi/3], "
               f"k = e^(-i pi/3)(k0 - i kappa), k0 > {delta}, kappa > {C0 * f:.6g}",
         lambda k: (np.abs(k) < 1 / delta) & (arg(k) >= -math.pi / 2 + delta)
         & (arg(k) <= -math.pi / 3) & ((rot * k).real > delta) & (-(rot * k).imag > C0 * f)),
        ("v", f"|k| < {1 / delta}, arg k in [-pi/3, -{delta}], "
              f"k = e^(-i pi/3)(k0 + i kappa), k0 > {delta}, kappa > {C0 * f:.6g}, |F(k)| > {delta}",
         lambda k: (np.abs(k) < 1 / delta) & (arg(k) >= -math.pi / 3) & (arg(k) <= -delta)
         & ((rot * k).real > delta) & ((rot * k).imag > C0 * f) & (absF(k) > delta)),
        ("vi", f"|k| < {1 / delta}, arg k in [-pi/3, -{delta}], "
               f"k = e^(-i pi/3)(k0 + i kappa), k0 > {delta}, "
               f"kappa > f log(1/f) / 8|k|^2, |F(k)| > {C0 * f:.6g}",
         lambda k: (np.abs(k) < 1 / delta) & (arg(k) >= -math.pi / 3) & (arg(k) <= -delta)
         & ((rot * k).real > delta) & ((rot * k).imag > f * logf / (8 * np.abs(k) ** 2))
         & (absF(k) > C0 * f)),
    ]
    # candidate centres on a polar grid covering the quadrant, |k| up to 3
    radii = np.linspace(0.3, 3.0, 28)
    angles = np.linspace(-math.pi / 2 + 0.02, -0.02, 40)
    centers = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    out = []
    for label, text, pred in regions:
        out.append(RegionDescriptor(label, text, pred, _probe_rects(pred, centers, half)))
    return out
