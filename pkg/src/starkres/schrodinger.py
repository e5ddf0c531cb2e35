"""Propagation of solutions of ``-psi'' + (V(x) + f x - z) psi = 0``.

On every cell between potential breakpoints the coefficient
``q(x) = V(x) + f x - z`` is linear in ``x`` (piecewise-constant or linearly
interpolated ``V``), so the local Taylor recurrence

    (n + 2)(n + 1) c[n+2] = q0 c[n] + beta c[n-1]

is exact and converges everywhere.  Steps are chosen so that ``|q| h**2`` and
``|beta| h**3`` stay bounded, which keeps 30 terms at full double precision.
When ``f = 0`` and ``V`` is constant on a cell the exact trigonometric
segment matrix is used instead.

All array routines broadcast over ``z`` (last axis) and over stacked seeds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import Potential

__all__ = [
    "BoundaryData",
    "StepUnderflowError",
    "TransferMatrix",
    "propagate",
    "propagate_array",
    "propagate_through",
    "segment_matrix",
    "support_quadrature",
    "transfer_matrix",
    "transfer_matrix_array",
]

_ORDER = 30
_QH2_MAX = 4.0
_BH3_MAX = 4.0
MAX_STEPS = 200_000


class StepUnderflowError(ArithmeticError):
    """The step count needed to resolve the solution is unreasonably large."""


@dataclass(frozen=True)
class BoundaryData:
    position: float
    psi: complex
    dpsi: complex

    def __post_init__(self):
        if self.psi == 0 and self.dpsi == 0:
            raise ValueError("boundary data (0, 0) carries no solution")


@dataclass(frozen=True)
class TransferMatrix:
    """Maps ``(psi, psi')`` at ``x_from`` to ``(psi, psi')`` at ``x_to``."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex
    x_from: float
    x_to: float
    z: complex
    f: float

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def apply(self, psi: complex, dpsi: complex) -> tuple[complex, complex]:
        return self.m11 * psi + self.m12 * dpsi, self.m21 * psi + self.m22 * dpsi


def segment_matrix(v: float, z, h: float):
    """Exact ``f = 0`` propagator across a constant-potential segment of signed length ``h``.

    Returns the entries ``(m11, m12, m21, m22)`` of
    ``[[cos sh, sin(sh)/s], [-s sin sh, cos sh]]`` with ``s = sqrt(z - v)``.
    The entries are even in ``s``, so the branch of the root is irrelevant.
    """
    s = np.sqrt(np.asarray(z, dtype=complex) - v)
    sh = s * h
    c = np.cos(sh)
    sinc = h * np.sinc(sh / np.pi)  # sin(sh)/s, regular at s = 0
    return c, sinc, -s * s * sinc, c


def _taylor_advance(y, dy, q0, beta, h, nsteps):
    """``nsteps`` Taylor steps of signed size ``h`` along a cell with q = q0 + beta t."""
    h2 = h * h
    h3 = h2 * h
    order = _order_needed(float(np.max(np.abs(q0), initial=0.0)) + abs(beta * h) * nsteps,
                          abs(beta), abs(h))
    for k in range(nsteps):
        a = (q0 + beta * (k * h)) * h2
        b = beta * h3
        dm1 = 0.0
        dn = y
        dn1 = dy * h
        val = dn + dn1
        der = dn1
        for n in range(order):
            d2 = (a * dn + b * dm1) / ((n + 2) * (n + 1))
            val = val + d2
            der = der + (n + 2) * d2
            dm1, dn, dn1 = dn, dn1, d2
        y, dy = val, der / h
    return y, dy


def _order_needed(qmax: float, beta: float, h: float) -> int:
    """Taylor order at which the terms fall below 1e-17 (capped at 30)."""
    r = 1.25 * (math.sqrt(qmax) * h + (beta ** (1.0 / 3.0)) * h) + 1e-300
    term = 1.0
    for n in range(1, _ORDER + 1):
        term *= r / n
        if term < 1e-17 and n >= 4:
            return n
    return _ORDER


def _cell_plan(p: Potential, x0: float, x1: float):
    """Sub-intervals of the path x0 -> x1 with the linear data of V on each."""
    lo, hi, v0, slope = p.cells()
    a, b = min(x0, x1), max(x0, x1)
    nodes = {x0, x1}
    nodes.update(float(x) for x in np.concatenate([lo, hi]) if a < x < b)
    nodes = sorted(nodes, reverse=x1 < x0)
    plan = []
    for xa, xb in zip(nodes, nodes[1:]):
        mid = 0.5 * (xa + xb)
        if abs(mid) < p.L:
            i = int(np.clip(np.searchsorted(lo, mid, side="right") - 1, 0, len(lo) - 1))
            va = v0[i] + slope[i] * (xa - lo[i])
            plan.append((xa, xb, float(va), float(slope[i])))
        else:
            plan.append((xa, xb, 0.0, 0.0))
    return plan


def propagate_array(p: Potential, z, f: float, x0: float, x1: float, psi, dpsi):
    """Vectorized propagation of ``(psi, dpsi)`` from ``x0`` to ``x1``.

    ``z`` may be an array; ``psi`` and ``dpsi`` broadcast against it.
    """
    if f < 0:
        raise ValueError("field strength f must be non-negative")
    z = np.asarray(z, dtype=complex)
    y = np.asarray(psi, dtype=complex) + 0 * z
    dy = np.asarray(dpsi, dtype=complex) + 0 * z
    total = 0
    for xa, xb, va, sl in _cell_plan(p, float(x0), float(x1)):
        ell = xb - xa
        if f == 0.0 and sl == 0.0:
            m11, m12, m21, m22 = segment_matrix(va, z, ell)
            y, dy = m11 * y + m12 * dy, m21 * y + m22 * dy
            continue
        beta = sl + f
        q0 = va + f * xa - z
        qmax = float(np.max(np.maximum(np.abs(q0), np.abs(q0 + beta * ell)), initial=0.0))
        hmax = abs(ell)
        if qmax > 0:
            hmax = min(hmax, math.sqrt(_QH2_MAX / qmax))
        if beta != 0:
            hmax = min(hmax, (_BH3_MAX / abs(beta)) ** (1.0 / 3.0))
        nsteps = max(1, math.ceil(abs(ell) / hmax - 1e-12))
        total += nsteps
        if total > MAX_STEPS:
            raise StepUnderflowError(f"more than {MAX_STEPS} steps needed (|q| up to {qmax:.3g})")
        y, dy = _taylor_advance(y, dy, q0, beta, ell / nsteps, nsteps)
    return y, dy


def propagate(p: Potential, z: complex, f: float, seed: BoundaryData, to: float) -> BoundaryData:
    """Carry ``seed`` to position ``to`` for spectral parameter ``z`` and field ``f``."""
    y, dy = propagate_array(p, complex(z), f, seed.position, to, seed.psi, seed.dpsi)
    return BoundaryData(float(to), complex(y), complex(dy))


def transfer_matrix_array(p: Potential, z, f: float, x0: float | None = None,
                          x1: float | None = None):
    """Entries ``(m11, m12, m21, m22)`` as arrays over ``z``."""
    x0 = -p.L if x0 is None else x0
    x1 = p.L if x1 is None else x1
    seeds = np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]])
    z = np.asarray(z, dtype=complex)
    y, dy = propagate_array(p, z[..., None, :] if z.ndim else z[None], f, x0, x1,
                            seeds[0], seeds[1])
    y = y.reshape((2,) + z.shape)
    dy = dy.reshape((2,) + z.shape)
    return y[0], y[1], dy[0], dy[1]


def transfer_matrix(p: Potential, z: complex, f: float) -> TransferMatrix:
    """Transfer matrix from ``-L`` to ``L``, built from the seeds (1, 0) and (0, 1)."""
    m11, m12, m21, m22 = transfer_matrix_array(p, complex(z), f)
    return TransferMatrix(complex(m11), complex(m12), complex(m21), complex(m22),
                          -p.L, p.L, complex(z), float(f))


def propagate_through(p: Potential, z, f: float, x_start: float, xs, psi, dpsi):
    """Propagate from ``x_start`` through the monotone sequence ``xs``.

    Returns arrays of shape ``(len(xs),) + z.shape`` with ``psi`` and ``psi'``
    at every point of ``xs``.
    """
    z = np.asarray(z, dtype=complex)
    y = np.asarray(psi, dtype=complex) + 0 * z
    dy = np.asarray(dpsi, dtype=complex) + 0 * z
    out_y = np.empty((len(xs),) + y.shape, dtype=complex)
    out_dy = np.empty_like(out_y)
    pos = float(x_start)
    for i, x in enumerate(xs):
        y, dy = propagate_array(p, z, f, pos, float(x), y, dy)
        out_y[i], out_dy[i] = y, dy
        pos = float(x)
    return out_y, out_dy


def support_quadrature(p: Potential, max_panel: float, order: int = 10):
    """Gauss-Legendre nodes and weights on the cells where ``V`` is not zero.

    Panels respect the breakpoints of ``V`` (solutions are analytic inside
    each cell) and are no longer than ``max_panel``.
    """
    t, w = np.polynomial.legendre.leggauss(order)
    lo, hi, v0, sl = p.cells()
    xs, ws = [], []
    for a, b, v, s in zip(lo, hi, v0, sl):
        if v == 0.0 and s == 0.0:
            continue
        n = max(1, math.ceil((b - a) / max_panel))
        edges = np.linspace(a, b, n + 1)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            h = 0.5 * (e1 - e0)
            xs.append(e0 + h * (t + 1.0))
            ws.append(h * w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)
