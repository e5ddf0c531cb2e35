"""Exponentially scaled Airy function Ai for complex arguments.

Every evaluation returns mantissas together with an explicit exponent so that
``Ai(w) = value_mantissa * exp(scale_exponent)``.  Nothing here overflows for
arguments that are large in modulus; callers combine exponents in log space.

Evaluation strategy (vectorized over numpy arrays):

* Maclaurin series where it is well conditioned, i.e. where the series
  terms do not dwarf the function itself.
* Large-argument expansion in ``zeta = (2/3) w**1.5`` with optimal truncation
  for ``|w| >= R_ASYM`` and ``|arg w| <= 2*pi/3``.
* A short Taylor-series ODE bridge from ``|w| = R_ASYM`` inward along the ray
  for the remaining recessive directions, where the series loses accuracy and
  the expansion has not yet converged.
* The connection formula ``Ai(w) = e^{-i pi/3} Ai(w w3) + e^{i pi/3} Ai(w / w3)``
  (``w3 = e^{2 pi i/3}``) on the oscillatory side ``|arg w| > 2*pi/3``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "AiryEval",
    "AiryPoleError",
    "AirySectorError",
    "MethodTag",
    "OscillatoryDecomposition",
    "ai",
    "ai_logderiv",
    "ai_rotated",
    "airy_scaled",
    "decompose_oscillatory",
    "AI0",
    "AIP0",
]

AI0 = 0.35502805388781723926  # Ai(0) = 3^{-2/3} / Gamma(2/3)
AIP0 = -0.25881940379280679840  # Ai'(0) = -3^{-1/3} / Gamma(1/3)

OMEGA = cmath.exp(2j * math.pi / 3)
_E_P3 = cmath.exp(1j * math.pi / 3)
_E_M3 = cmath.exp(-1j * math.pi / 3)

R_ASYM = 7.5
# Maclaurin is used while |zeta| + Re(zeta) stays below this; the rounding
# error of the series is then about 1e-16 * exp(MACLAURIN_COND).
MACLAURIN_COND = 11.0
ROTATION_MIN_RADIUS = 6.0
_ROT_ARG = 2.0 * math.pi / 3.0
_N_MACLAURIN = 48
_N_ASYM = 40
_BRIDGE_STEP = 0.4
_TAYLOR_ORDER = 36


class MethodTag(str, Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    BRIDGE = "bridge"
    ROTATED = "rotated"


_TAGS = [MethodTag.SERIES, MethodTag.ASYMPTOTIC, MethodTag.BRIDGE, MethodTag.ROTATED]


class AiryPoleError(ArithmeticError):
    """Raised when a logarithmic derivative is requested next to a zero of Ai."""


class AirySectorError(ValueError):
    """Raised when an oscillatory decomposition is requested on the recessive side."""


@dataclass(frozen=True)
class AiryEval:
    value_mantissa: complex
    derivative_mantissa: complex
    scale_exponent: complex
    method_tag: MethodTag

    @property
    def value(self) -> complex:
        return self.value_mantissa * cmath.exp(self.scale_exponent)

    @property
    def derivative(self) -> complex:
        return self.derivative_mantissa * cmath.exp(self.scale_exponent)

    def rescaled(self, exponent: complex) -> tuple[complex, complex]:
        """Mantissas relative to a caller-chosen exponent ``exponent``."""
        factor = cmath.exp(self.scale_exponent - exponent)
        return self.value_mantissa * factor, self.derivative_mantissa * factor


@dataclass(frozen=True)
class OscillatoryDecomposition:
    """``Ai(w) = coeff_plus e^{phase} + coeff_minus e^{-phase}`` and likewise for Ai'.

    ``phase = i (2/3) (-w)**1.5`` on the principal branch of ``-w``, which is
    continuous across the negative real ``w`` axis.
    """

    coeff_plus: complex
    coeff_minus: complex
    deriv_plus: complex
    deriv_minus: complex
    phase: complex

    def recombine(self) -> tuple[complex, complex]:
        ep = cmath.exp(self.phase)
        em = cmath.exp(-self.phase)
        return (self.coeff_plus * ep + self.coeff_minus * em,
                self.deriv_plus * ep + self.deriv_minus * em)


def _asym_coefficients(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(n)
    v = np.empty(n)
    u[0] = v[0] = 1.0
    for s in range(1, n):
        u[s] = u[s - 1] * (6 * s - 5) * (6 * s - 3) * (6 * s - 1) / ((2 * s - 1) * 216.0 * s)
        v[s] = -(6 * s + 1) / (6 * s - 1) * u[s]
    return u, v


_U, _V = _asym_coefficients(_N_ASYM)


def _zeta(w):
    return (2.0 / 3.0) * w * np.sqrt(w)


def _maclaurin(w: np.ndarray):
    """Unscaled Ai, Ai' by the Maclaurin series."""
    z3 = w ** 3
    tf = np.ones_like(w)
    tg = w.copy()
    tfp = 0.5 * w * w
    tgp = np.ones_like(w)
    f, g, fp, gp = tf.copy(), tg.copy(), tfp.copy(), tgp.copy()
    for k in range(_N_MACLAURIN):
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        tfp = tfp * z3 / ((3 * k + 3) * (3 * k + 5))
        tgp = tgp * z3 / ((3 * k + 1) * (3 * k + 3))
        f += tf
        g += tg
        fp += tfp
        gp += tgp
    return AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp


def _asymptotic(w: np.ndarray):
    """Scaled mantissas from the large-argument expansion (|arg w| < pi)."""
    zeta = _zeta(w)
    inv = -1.0 / zeta
    n = w.shape[0]
    su = np.zeros(n, dtype=complex)
    sv = np.zeros(n, dtype=complex)
    live_u = np.ones(n, dtype=bool)
    live_v = np.ones(n, dtype=bool)
    prev_u = np.full(n, np.inf)
    prev_v = np.full(n, np.inf)
    power = np.ones(n, dtype=complex)
    for s in range(_N_ASYM):
        tu = _U[s] * power
        tv = _V[s] * power
        au = np.abs(tu)
        av = np.abs(tv)
        # optimal truncation: stop once terms stop decreasing
        live_u &= au < prev_u
        live_v &= av < prev_v
        su += np.where(live_u, tu, 0.0)
        sv += np.where(live_v, tv, 0.0)
        prev_u, prev_v = au, av
        if not (live_u.any() or live_v.any()):
            break
        live_u &= au > 1e-18 * np.abs(su)
        live_v &= av > 1e-18 * np.abs(sv)
        power = power * inv
    w4 = np.sqrt(np.sqrt(w))
    norm = 1.0 / (2.0 * math.sqrt(math.pi))
    return norm * su / w4, -norm * w4 * sv, -zeta


def _bridge(w: np.ndarray):
    """Integrate Ai inward from |w| = R_ASYM along the ray through w."""
    r = np.abs(w)
    unit = w / r
    start = R_ASYM * unit
    m0, dm0, s0 = _asymptotic(start)
    nsteps = int(math.ceil((R_ASYM - r.min()) / _BRIDGE_STEP))
    h = (w - start) / nsteps
    y, dy = m0, dm0  # Ai and Ai' relative to exp(s0)
    pos = start
    for _ in range(nsteps):
        y, dy = _taylor_ode(y, dy, pos, h)
        pos = pos + h
    zeta = _zeta(w)
    rescale = np.exp(s0 + zeta)
    return y * rescale, dy * rescale, -zeta


def _taylor_ode(y, dy, w0, h):
    h2 = h * h
    a = w0 * h2
    b = h2 * h
    dm1 = np.zeros_like(y)
    dn = y
    dn1 = dy * h
    val = dn + dn1
    der = dn1.copy()
    for n in range(_TAYLOR_ORDER):
        d2 = (a * dn + b * dm1) / ((n + 2) * (n + 1))
        val = val + d2
        der = der + (n + 2) * d2
        dm1, dn, dn1 = dn, dn1, d2
    return val, der / h


def _direct(w: np.ndarray):
    """Scaled evaluation for |arg w| <= 2 pi / 3 (no rotation)."""
    m = np.empty_like(w)
    dm = np.empty_like(w)
    s = np.empty_like(w)
    tag = np.empty(w.shape, dtype=np.int8)
    if w.size == 0:
        return m, dm, s, tag
    r = np.abs(w)
    zeta = _zeta(w)
    cond = np.abs(zeta) + zeta.real
    ser = (r < R_ASYM) & (cond <= MACLAURIN_COND)
    asy = r >= R_ASYM
    bri = ~(ser | asy)
    if ser.any():
        a, ap = _maclaurin(w[ser])
        e = np.exp(zeta[ser])
        m[ser], dm[ser], s[ser] = a * e, ap * e, -zeta[ser]
        tag[ser] = 0
    if asy.any():
        m[asy], dm[asy], s[asy] = _asymptotic(w[asy])
        tag[asy] = 1
    if bri.any():
        m[bri], dm[bri], s[bri] = _bridge(w[bri])
        tag[bri] = 2
    return m, dm, s, tag


def _rotation_parts(w: np.ndarray):
    """Scaled components of Ai(w) = e^{-i pi/3} Ai(w3 w) + e^{i pi/3} Ai(w / w3)."""
    mp_, dmp, sp, _ = _direct(w * OMEGA)
    mm, dmm, sm, _ = _direct(w * np.conj(OMEGA))
    return (_E_M3 * mp_, _E_P3 * dmp, sp), (_E_P3 * mm, _E_M3 * dmm, sm)


def airy_scaled(w):
    """Vectorized scaled Ai, Ai'.

    Returns ``(value_mantissa, derivative_mantissa, scale_exponent, tag)``
    arrays with ``Ai(w) = value_mantissa * exp(scale_exponent)``.  ``tag``
    indexes ``[series, asymptotic, bridge, rotated]``.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    shape = w.shape
    w = w.ravel()
    m = np.empty_like(w)
    dm = np.empty_like(w)
    s = np.empty_like(w)
    tag = np.empty(w.shape, dtype=np.int8)
    rot = (np.abs(np.angle(w)) > _ROT_ARG) & (np.abs(w) > ROTATION_MIN_RADIUS)
    if (~rot).any():
        m[~rot], dm[~rot], s[~rot], tag[~rot] = _direct(w[~rot])
    if rot.any():
        (m1, d1, s1), (m2, d2, s2) = _rotation_parts(w[rot])
        big = np.where(s1.real >= s2.real, s1, s2)
        e1 = np.exp(s1 - big)
        e2 = np.exp(s2 - big)
        m[rot] = m1 * e1 + m2 * e2
        dm[rot] = d1 * e1 + d2 * e2
        s[rot] = big
        tag[rot] = 3
    return m.reshape(shape), dm.reshape(shape), s.reshape(shape), tag.reshape(shape)


def ai(w: complex) -> AiryEval:
    """Scaled Ai(w) and Ai'(w) at a single complex point."""
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"Airy argument must be finite, got {w!r}")
    m, dm, s, tag = airy_scaled(np.array([w]))
    return AiryEval(complex(m[0]), complex(dm[0]), complex(s[0]), _TAGS[int(tag[0])])


def ai_rotated(w: complex, sector: int) -> AiryEval:
    """Scaled ``Ai(w e^{sector 2 pi i/3})`` and its derivative with respect to ``w``."""
    if sector not in (1, -1):
        raise ValueError("sector must be +1 or -1")
    rot = OMEGA if sector == 1 else OMEGA.conjugate()
    ev = ai(complex(w) * rot)
    return AiryEval(ev.value_mantissa, rot * ev.derivative_mantissa,
                    ev.scale_exponent, ev.method_tag)


def ai_logderiv(w: complex) -> complex:
    """Ai'(w) / Ai(w), formed from mantissas so the exponential scale cancels."""
    ev = ai(w)
    if abs(ev.value_mantissa) < 1e-12:
        raise AiryPoleError(f"w = {w!r} is within working precision of a zero of Ai")
    return ev.derivative_mantissa / ev.value_mantissa


def logderiv_array(w) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``Ai'/Ai``; second output is the value mantissa for pole checks."""
    m, dm, _, _ = airy_scaled(w)
    return dm / m, m


def oscillatory_phase(w):
    """``i (2/3) (-w)**1.5`` with the principal branch of ``-w``."""
    mw = -np.asarray(w, dtype=complex)
    return 1j * _zeta(mw)


def decompose_oscillatory_array(w):
    """Vectorized form of :func:`decompose_oscillatory` (no sector check)."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    (m1, d1, s1), (m2, d2, s2) = _rotation_parts(w)
    phase = oscillatory_phase(w)
    e1 = np.exp(s1 - phase)
    e2 = np.exp(s2 + phase)
    return m1 * e1, m2 * e2, d1 * e1, d2 * e2, phase


def decompose_oscillatory(w: complex) -> OscillatoryDecomposition:
    """Split Ai(w), Ai'(w) into the two single-exponential components.

    Only defined on the oscillatory side ``|arg w| >= 2 pi / 3``; each
    component is a single scaled Airy value from the connection formula.
    """
    w = complex(w)
    if w == 0 or abs(cmath.phase(w)) < _ROT_ARG - 1e-12:
        raise AirySectorError(f"arg w = {cmath.phase(w):.4f} is on the recessive side")
    cp, cm, dp, dmn, ph = decompose_oscillatory_array(np.array([w]))
    return OscillatoryDecomposition(complex(cp[0]), complex(cm[0]),
                                    complex(dp[0]), complex(dmn[0]), complex(ph[0]))
