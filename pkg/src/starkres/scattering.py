"""Field-free scattering data and the continued reflection function ``F``.

Conventions, with ``psi = e^{-ikx}`` to the left of the support and
``psi = c1 e^{ikx} + c2 e^{-ikx}`` to the right of it:

* ``t = 1 / c2``, the transmission amplitude (even in ``k``),
* ``rho = c1 / c2``, the reflection amplitude for a wave arriving from the
  right, i.e. the continuation of ``r(-k)``,
* ``r_left``, the reflection amplitude for a wave arriving from the left,
* ``F(k) = 2 i k rho(k)``.

Every formula is analytic in ``k``, so complex ``k`` gives the continuation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .contour import BoundaryZeroError, ComplexRect, winding_number
from .potential import Potential
from .schrodinger import propagate_array, transfer_matrix_array

__all__ = [
    "DegenerateFunctionError",
    "ReflectionZero",
    "ScatteringAmplitudes",
    "TransmissionPoleError",
    "F_derivative",
    "amplitudes",
    "find_F_zeros",
    "reflection_F",
    "reflection_F_array",
    "rho_array",
]

CAUCHY_RADIUS = 1e-3
CAUCHY_POINTS = 16


class TransmissionPoleError(ArithmeticError):
    """``c2`` vanishes: ``k`` is a pole of the transmission amplitude."""


class DegenerateFunctionError(ValueError):
    """``F`` vanishes identically (zero potential); its zeros are not isolated."""


@dataclass(frozen=True)
class ScatteringAmplitudes:
    k: complex
    t: complex
    rho: complex
    r_left: complex
    c1: complex
    c2: complex


@dataclass(frozen=True)
class ReflectionZero:
    k0: complex
    order: int
    F_prime: complex | None
    residual: float


def _left_seed(p: Potential, k):
    e = np.exp(1j * k * p.L)
    return e, -1j * k * e


def _split(p: Potential, k, psi, dpsi):
    """Coefficients of ``e^{ikx}`` and ``e^{-ikx}`` matching ``(psi, dpsi)`` at ``x = L``."""
    L = p.L
    c1 = (dpsi + 1j * k * psi) * np.exp(-1j * k * L) / (2j * k)
    c2 = (1j * k * psi - dpsi) * np.exp(1j * k * L) / (2j * k)
    return c1, c2


def _check_k(k):
    if np.any(np.asarray(k) == 0):
        raise ValueError("k = 0 is the branch point of the free resolvent")


def rho_array(p: Potential, k) -> np.ndarray:
    """Vectorized ``rho(k)``."""
    k = np.asarray(k, dtype=complex)
    _check_k(k)
    y, dy = _left_seed(p, k)
    y, dy = propagate_array(p, k * k, 0.0, -p.L, p.L, y, dy)
    c1, c2 = _split(p, k, y, dy)
    return c1 / c2


def reflection_F_array(p: Potential, k) -> np.ndarray:
    k = np.asarray(k, dtype=complex)
    return 2j * k * rho_array(p, k)


def reflection_F(p: Potential, k: complex) -> complex:
    """``F(k) = 2 i k rho(k)``."""
    return complex(reflection_F_array(p, complex(k)))


def amplitudes(p: Potential, k: complex) -> ScatteringAmplitudes:
    """Transmission and both reflection amplitudes at (possibly complex) ``k``."""
    k = complex(k)
    _check_k(k)
    m11, m12, m21, m22 = (complex(m) for m in transfer_matrix_array(p, k * k, 0.0))
    L = p.L
    ep, em = cmath.exp(1j * k * L), cmath.exp(-1j * k * L)
    # left seed e^{-ikx}
    y0, dy0 = ep, -1j * k * ep
    c1, c2 = _split(p, k, m11 * y0 + m12 * dy0, m21 * y0 + m22 * dy0)
    scale = max(abs(c1), 1.0)
    if abs(c2) < 1e-14 * scale:
        raise TransmissionPoleError(f"transmission pole at k = {k}")
    # left incidence: M (u + r v) = t w with u = e^{ikx}, v = e^{-ikx} at -L, w = e^{ikx} at L
    u = np.array([em, 1j * k * em])
    v = np.array([ep, -1j * k * ep])
    w = np.array([ep, 1j * k * ep])
    M = np.array([[m11, m12], [m21, m22]])
    A = np.column_stack([M @ v, -w])
    r_left, t_left = np.linalg.solve(A, -(M @ u))
    return ScatteringAmplitudes(k, 1.0 / c2, c1 / c2, complex(r_left), c1, c2)


def F_derivative(p: Potential, k: complex, radius: float = CAUCHY_RADIUS,
                 npts: int = CAUCHY_POINTS) -> complex:
    """``dF/dk`` from the trapezoid rule on a small circle (Cauchy integral)."""
    theta = 2.0 * math.pi * np.arange(npts) / npts
    e = np.exp(1j * theta)
    vals = reflection_F_array(p, complex(k) + radius * e)
    return complex(np.mean(vals / e) / radius)


def _in_sector(window: ComplexRect) -> bool:
    args = np.angle(window.corners())
    if not np.all((args > -math.pi / 3) & (args < 0)):
        return False
    # distance from the origin to the rectangle
    dx = max(window.re0, 0.0, -window.re1)
    dy = max(window.im0, 0.0, -window.im1)
    return math.hypot(dx, dy) > 0.1


def reflection_numerator_array(p: Potential, k) -> np.ndarray:
    """``F c2 = (psi' + i k psi) e^{-ikL}`` at ``L``: entire in ``k``, same zeros as ``F``.

    ``F`` itself has poles where ``c2`` vanishes (the field-free resonances),
    which would spoil zero counting by the argument principle.
    """
    k = np.asarray(k, dtype=complex)
    y, dy = _left_seed(p, k)
    y, dy = propagate_array(p, k * k, 0.0, -p.L, p.L, y, dy)
    return (dy + 1j * k * y) * np.exp(-1j * k * p.L)


def _log_F(p: Potential):
    def f(k):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(reflection_numerator_array(p, k))
    return f


def _newton(p: Potential, k: complex, rect: ComplexRect, maxit: int = 50):
    h = 1e-4
    for _ in range(maxit):
        F, Fp, Fm = reflection_numerator_array(p, np.array([k, k + h, k - h]))
        dF = (Fp - Fm) / (2 * h)
        if dF == 0:
            return None
        step = F / dF
        k = k - step
        if not rect.contains(k, pad=0.25 * rect.diameter):
            return None
        if abs(step) < 1e-13 * max(abs(k), 1.0):
            return k
    return None


def find_F_zeros(p: Potential, window: ComplexRect, min_size: float = 1e-6,
                 seed: int = 0) -> list[ReflectionZero]:
    """All zeros of ``F`` inside ``window`` (which must lie in ``-pi/3 < arg k < 0``).

    Cells are counted with the argument principle and quartered until each
    holds one zero that Newton's method locates, or until they shrink below
    ``min_size`` (the remaining winding is then reported as the order).
    """
    if not _in_sector(window):
        raise ValueError(f"{window} is not inside the open sector -pi/3 < arg k < 0 with |k| > 0.1")
    xs = np.linspace(window.re0, window.re1, 7)
    ys = np.linspace(window.im0, window.im1, 7)
    probe = (xs[None, :] + 1j * ys[:, None]).ravel()
    if np.max(np.abs(reflection_F_array(p, probe))) < 1e-13 * np.max(np.abs(probe)):
        raise DegenerateFunctionError("F vanishes identically on the window (degenerate)")

    rng = np.random.default_rng(seed)
    logF = _log_F(p)
    top = window
    for attempt in range(4):
        try:
            n = winding_number(logF, top)
            break
        except BoundaryZeroError:
            if attempt == 3:
                raise
            top = window.jittered(0.01, rng)
    zeros: list[ReflectionZero] = []
    _search(p, logF, top, n, zeros, min_size, rng)
    zeros.sort(key=lambda z: (z.k0.real, z.k0.imag))
    return zeros


def _split_rect(rect: ComplexRect, c: complex) -> list[ComplexRect]:
    return [ComplexRect(rect.re0, c.real, rect.im0, c.imag),
            ComplexRect(c.real, rect.re1, rect.im0, c.imag),
            ComplexRect(rect.re0, c.real, c.imag, rect.im1),
            ComplexRect(c.real, rect.re1, c.imag, rect.im1)]


def _search(p, logF, rect, n, out, min_size, rng):
    if n <= 0:
        return
    if n == 1:
        k = _newton(p, rect.center, rect)
        if k is not None and rect.contains(k):
            out.append(_make_zero(p, k, 1))
            return
    if rect.diameter < min_size:
        k = _newton(p, rect.center, rect) or rect.center
        out.append(_make_zero(p, k, n))
        return
    for attempt in range(4):
        frac = 0.5 + (0.0 if attempt == 0 else rng.uniform(-0.15, 0.15))
        c = complex(rect.re0 + frac * rect.width, rect.im0 + frac * rect.height)
        kids = _split_rect(rect, c)
        try:
            counts = [winding_number(logF, q, min_per_edge=16) for q in kids]
        except BoundaryZeroError:
            continue
        if sum(counts) == n:
            break
    else:
        raise BoundaryZeroError(f"could not subdivide {rect} consistently")
    for q, m in zip(kids, counts):
        _search(p, logF, q, m, out, min_size, rng)


def _make_zero(p, k, order):
    res = abs(reflection_F(p, k))
    return ReflectionZero(complex(k), int(order),
                          F_derivative(p, k) if order == 1 else None, float(res))
