"""Negative eigenvalues of ``-d^2/dx^2 + V`` and the data entering the Stark width.

For ``lambda < 0`` put ``kappa = sqrt(-lambda)``.  The solution decaying to the
left is ``e^{kappa x}`` for ``x <= -L``; it is an eigenfunction when it
matches ``e^{-kappa x}`` at ``x = L``, i.e. when

    W(lambda) = psi'(L) + kappa psi(L) = 0.

Integrals over ``[-L, L]`` use Gauss-Legendre panels aligned with the
potential breakpoints (the eigenfunction is analytic on each panel); the
exponential tails are integrated in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .potential import Potential
from .schrodinger import propagate_array

__all__ = [
    "BoundState",
    "WidthDomainError",
    "bound_states",
    "eigenvalue_with_field",
    "predicted_width",
    "predicted_width_forms",
]

N_SCAN = 400
_PANEL = 0.1
_GAUSS_ORDER = 12


class WidthDomainError(ValueError):
    """``-lambda0 - f lambda1 <= 0``: the width formula does not apply."""


@dataclass(frozen=True)
class BoundState:
    """A normalized real eigenfunction with its tail data.

    ``phi`` holds the eigenfunction at ``x`` (a grid on ``[-L, L]``); outside
    it equals ``kappa_minus e^{kappa x}`` on the left and
    ``kappa_plus e^{-kappa x}`` on the right.  The sign is fixed by
    ``kappa_minus > 0``.
    """

    lambda0: float
    kappa_minus: float
    kappa_plus: float
    lambda1: float
    norm_check: float
    overlap: float  # (V e^{-kappa x}, phi), equal to -2 kappa_minus kappa
    x: np.ndarray
    phi: np.ndarray

    @property
    def kappa(self) -> float:
        return math.sqrt(-self.lambda0)

    def to_dict(self) -> dict:
        return {"lambda0": self.lambda0, "kappa_minus": self.kappa_minus,
                "kappa_plus": self.kappa_plus, "lambda1": self.lambda1}


def _wronskian(p: Potential, lam, f: float = 0.0, R: float | None = None):
    R = p.L if R is None else R
    kap = np.sqrt(-np.asarray(lam, dtype=float))
    y, dy = propagate_array(p, np.asarray(lam, dtype=complex), f, -R, R, 1.0 + 0 * kap, kap)
    # divide out the generic growth e^{2 kappa R} so the scan stays O(1)
    return ((dy + kap * y) * np.exp(-2.0 * kap * R)).real


def _panels(p: Potential) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[-L, L]`` respecting breakpoints."""
    t, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    xs, ws = [], []
    bps = p.breakpoints()
    for a, b in zip(bps[:-1], bps[1:]):
        n = max(1, math.ceil((b - a) / _PANEL))
        edges = np.linspace(a, b, n + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            h = 0.5 * (hi - lo)
            xs.append(lo + h * (t + 1.0))
            ws.append(h * w)
    return np.concatenate(xs), np.concatenate(ws)


def _trajectory(p: Potential, lam: float, xs: np.ndarray) -> np.ndarray:
    """Left-decaying solution (seed ``(1, kappa)`` at ``-L``) sampled at sorted ``xs``."""
    kap = math.sqrt(-lam)
    y, dy = 1.0 + 0j, complex(kap)
    pos = -p.L
    out = np.empty(xs.size)
    for i, x in enumerate(xs):
        y, dy = propagate_array(p, complex(lam), 0.0, pos, x, y, dy)
        y, dy = complex(y), complex(dy)
        out[i] = y.real
        pos = x
    return out


def _build_state(p: Potential, lam: float, n_grid: int) -> BoundState:
    L = p.L
    kap = math.sqrt(-lam)
    xq, wq = _panels(p)
    grid = np.linspace(-L, L, n_grid)
    allx = np.concatenate([xq, grid])
    order = np.argsort(allx, kind="stable")
    vals = np.empty_like(allx)
    vals[order] = _trajectory(p, lam, allx[order])
    uq, ug = vals[:xq.size], vals[xq.size:]
    left, right = ug[0], ug[-1]

    inner = float(np.sum(wq * uq * uq))
    norm2 = inner + (left ** 2 + right ** 2) / (2 * kap)
    s = 1.0 / math.sqrt(norm2)
    uq, ug = uq * s, ug * s
    left, right = left * s, right * s

    kappa_minus = left * math.exp(kap * L)
    kappa_plus = right * math.exp(kap * L)
    first = float(np.sum(wq * xq * uq * uq))
    tail_m = left ** 2 * (-1.0 / (4 * kap * kap) - L / (2 * kap))
    tail_p = right ** 2 * (1.0 / (4 * kap * kap) + L / (2 * kap))
    lambda1 = first + tail_m + tail_p
    norm_check = float(np.sum(wq * uq * uq)) + (left ** 2 + right ** 2) / (2 * kap)
    overlap = float(np.sum(wq * p(xq) * np.exp(-kap * xq) * uq))
    return BoundState(float(lam), float(kappa_minus), float(kappa_plus), float(lambda1),
                      float(norm_check), overlap, grid, ug)


def bound_states(p: Potential, n_grid: int = 401) -> list[BoundState]:
    """All negative eigenvalues, bracketed on a 400-point grid and bisected to 1e-12."""
    vmin = float(np.min(p.cells()[2], initial=0.0))
    lo, hi, v0, sl = p.cells()
    vmin = min(vmin, float(np.min(v0 + sl * (hi - lo), initial=0.0)))
    if vmin >= 0:
        return []
    lam = np.linspace(vmin, 0.0, N_SCAN + 2)[1:-1]
    W = _wronskian(p, lam)
    states = []
    for i in np.flatnonzero(np.sign(W[:-1]) * np.sign(W[1:]) <= 0):
        a, b = lam[i], lam[i + 1]
        if W[i] == 0:
            root = a
        else:
            root = brentq(lambda t: float(_wronskian(p, t)), a, b, xtol=1e-14, rtol=1e-15)
        if states and abs(states[-1].lambda0 - root) < 1e-10:
            continue
        states.append(_build_state(p, root, n_grid))
    return sorted(states, key=lambda s: s.lambda0)


def eigenvalue_with_field(p: Potential, lam_guess: float, f: float, R: float,
                          bracket: float = 0.05) -> float:
    """Eigenvalue of ``-d^2/dx^2 + V + f x 1[-R, R]`` near ``lam_guess``.

    The truncated field is bounded, so the eigenvalue is real; it is found
    by the same shooting Wronskian with the matching points moved to ``+-R``.
    """
    g = lambda t: float(_wronskian(p, t, f, R))
    return brentq(g, lam_guess - bracket, min(lam_guess + bracket, -1e-9), xtol=1e-15,
                  rtol=1e-15)


def predicted_width_forms(bs: BoundState, f: float) -> tuple[float, float]:
    """The width ``-Im lambda(f)`` in its two equivalent forms.

    ``sqrt(-l0) kappa_minus**2 e^{-S}`` and ``e^{-S} (V e^{-kappa x}, phi)**2 / (4 sqrt(-l0))``
    with ``S = (4 / 3f) (-l0 - f l1)**1.5``.
    """
    if f <= 0:
        raise WidthDomainError("f must be positive")
    base = -bs.lambda0 - f * bs.lambda1
    if base <= 0:
        raise WidthDomainError(f"-lambda0 - f lambda1 = {base} is not positive")
    expo = math.exp(-(4.0 / (3.0 * f)) * base ** 1.5)
    kap = bs.kappa
    return kap * bs.kappa_minus ** 2 * expo, expo * bs.overlap ** 2 / (4.0 * kap)


def predicted_width(bs: BoundState, f: float) -> float:
    """Leading-order width ``-Im lambda(f)`` of the resonance born from ``bs``."""
    w1, w2 = predicted_width_forms(bs, f)
    if abs(w1 - w2) > 1e-6 * abs(w1):
        raise ArithmeticError(f"width forms disagree: {w1} vs {w2}")
    return w1
