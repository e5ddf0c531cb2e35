"""Exact Stark resonances from the Airy matching condition.

Outside ``[-L, L]`` the Stark equation is solved by

    A1(x) = Ai(w3 f^{1/3} (x - z/f)),   A2(x) = Ai(f^{1/3} (x - z/f)),

with ``w3 = e^{2 pi i/3}``.  ``z = k**2`` is a resonance exactly when the
solution equal to ``A1`` left of the support is proportional to ``A2`` right
of it, i.e. when the Wronskian of those two solutions vanishes.

The Wronskian is evaluated through an integral over the support of ``V``
(see :func:`residual_terms`) and returned as a logarithm, so that neither
the exponentially large Airy factors nor cancellation limit the range of
``k``.  Counting uses its phase; refinement divides it by ``exp`` of a
local polynomial fit of its exponent, which keeps it nearly linear.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .airy import OMEGA, airy_scaled
from .contour import BoundaryZeroError, ComplexRect, winding_number
from .potential import Potential
from .schrodinger import propagate_through, support_quadrature

__all__ = [
    "DepthExceededError",
    "EscapedDomainError",
    "MatchDirection",
    "NoConvergenceError",
    "Resonance",
    "count_zeros",
    "direction_for",
    "free_wronskian",
    "matching_residual",
    "refine_root",
    "residual_terms",
    "scan_rectangle",
]


class NoConvergenceError(ArithmeticError):
    pass


class EscapedDomainError(ArithmeticError):
    pass


class DepthExceededError(ArithmeticError):
    def __init__(self, msg: str, partial: list):
        super().__init__(msg)
        self.partial = partial


class MatchDirection(str, Enum):
    SEED_LEFT = "seed_left"
    SEED_RIGHT = "seed_right"


class Method(str, Enum):
    NEWTON = "newton"
    SCAN = "scan"
    STRING_REFINED = "string_refined"


@dataclass(frozen=True)
class Resonance:
    k: complex
    z: complex
    residual: float
    method: str
    f: float
    j: int | None = None
    iterations: int = 0


def direction_for(k: complex) -> MatchDirection:
    """Left seeding near the positive axis, right seeding deeper in the quadrant."""
    return MatchDirection.SEED_LEFT if cmath.phase(k) > -math.pi / 6 else MatchDirection.SEED_RIGHT


W0_UNIT = cmath.exp(-1j * math.pi / 6) / (2 * math.pi)


def free_wronskian(f: float) -> complex:
    """``A1' A2 - A1 A2'`` for the free Stark equation: ``f^{1/3} e^{-i pi/6} / 2 pi``."""
    return f ** (1.0 / 3.0) * W0_UNIT


def _panel(k) -> float:
    return 0.5 / max(1.0, float(np.max(np.abs(k), initial=1.0)))


def _seed_data(p: Potential, k, f: float, direction: MatchDirection):
    """Scaled Airy data ``(A, A', s)`` at the seed end."""
    z = k * k
    f3 = f ** (1.0 / 3.0)
    if direction is MatchDirection.SEED_LEFT:
        m, dm, s, _ = airy_scaled(OMEGA * f3 * (-p.L - z / f))
        return m, OMEGA * f3 * dm, s
    m, dm, s, _ = airy_scaled(f3 * (p.L - z / f))
    return m, f3 * dm, s


def _far_data(p: Potential, k, f: float, direction: MatchDirection, x):
    """Scaled far-end Airy solution ``(A, A', s)`` at the points ``x``."""
    z = k * k
    f3 = f ** (1.0 / 3.0)
    rot = 1.0 if direction is MatchDirection.SEED_LEFT else OMEGA
    m, dm, s, _ = airy_scaled(rot * f3 * (np.asarray(x)[..., None] - z / f))
    return m, rot * f3 * dm, s


def _log_parts(p: Potential, k, f: float, direction: MatchDirection | str):
    """The two parts of the matching Wronskian at an array of ``k``.

    With ``D(u, v) = u' v - u v'`` and ``psi`` the solution carrying the
    seed-end Airy data across the support, ``D' = V psi A`` gives exactly

        D(A1 solution, A2 solution) = W0 + int V psi A dx,

    where ``A`` is the free Airy solution of the far end and ``W0`` the free
    Wronskian.  Evaluating the integral instead of the end-point difference
    avoids the cancellation that makes ``psi' A2 - psi A2'`` meaningless
    where one exponential branch swamps the other.

    Returns ``(logE, logscale, S)``: ``W0 + exp(logE)`` is the Wronskian,
    ``exp(logscale) = |W0| + int |V psi A|`` is its rounding reference and
    ``S`` is the seed-end Airy scale exponent.
    """
    if f <= 0:
        raise ValueError("the matching residual needs f > 0")
    direction = MatchDirection(direction)
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    z = k * k
    W0 = free_wronskian(f)
    y0, dy0, s_seed = _seed_data(p, k, f, direction)
    xs, ws = support_quadrature(p, _panel(k))
    if xs.size == 0:
        one = np.ones(k.shape)
        return np.full(k.shape, -np.inf + 0j), math.log(abs(W0)) * one, s_seed
    order = np.arange(xs.size)
    x0 = -p.L
    if direction is MatchDirection.SEED_RIGHT:
        order = order[::-1]
        x0 = p.L
    xo = xs[order]
    psi, _ = propagate_through(p, z, f, x0, xo, y0, dy0)
    mx, _, sx = _far_data(p, k, f, direction, xo)
    s_ref = sx[-1]
    terms = (p(xo) * ws[order])[:, None] * psi * (mx * np.exp(sx - s_ref))
    I = terms.sum(axis=0)
    I_abs = np.abs(terms).sum(axis=0)
    S = s_seed + s_ref
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logE = S + np.log(I)
        logscale = np.logaddexp(math.log(abs(W0)), S.real + np.log(I_abs))
    return logE, logscale, s_seed


def residual_terms(p: Potential, k, f: float, direction: MatchDirection | str):
    """Logarithm of the matching Wronskian at an array of ``k``.

    Returns ``(logR, logscale, S)``; see :func:`_log_parts` for the method.
    """
    logE, logscale, s_seed = _log_parts(p, k, f, direction)
    W0 = free_wronskian(f)
    logW0 = np.log(W0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        big = logE.real > logW0.real
        u = np.where(big, W0 * np.exp(-logE), np.exp(logE - logW0))
        logR = np.where(big, logE, logW0) + np.log1p(u)
    return logR, logscale, s_seed


def matching_residual(p: Potential, k: complex, f: float,
                      direction: MatchDirection | str | None = None,
                      form: str = "ratio") -> complex:
    """Matching residual whose zeros in the lower quadrant are the resonances.

    ``form="bilinear"`` is ``psi' A - psi A'`` at the far end, with ``psi``
    seeded by the scaled Airy data of the near end and ``A`` the scaled
    far-end Airy solution (for the right seed the order of the two is swapped
    so both directions give the same function).  ``form="ratio"`` divides by
    the seed Airy mantissa, i.e. it seeds with ``psi = 1`` and the Airy
    logarithmic derivative; next to a zero of that mantissa it falls back to
    the bilinear form.  The exponential factors dropped by scaling never
    vanish, so the zeros are unchanged.
    """
    k = complex(k)
    if k == 0:
        raise ValueError("k = 0 is a branch point")
    direction = direction_for(k) if direction is None else MatchDirection(direction)
    ka = np.array([k])
    logR, _, s_seed = residual_terms(p, ka, f, direction)
    end = p.L if direction is MatchDirection.SEED_LEFT else -p.L
    _, _, s_far = _far_data(p, ka, f, direction, np.array([end]))
    bil = complex(np.exp(logR[0] - s_seed[0] - s_far[0, 0]))
    if form == "bilinear":
        return bil
    if form != "ratio":
        raise ValueError(f"unknown residual form {form!r}")
    m, dm, _ = _seed_data(p, ka, f, direction)
    if abs(m[0]) < 1e-12 * max(abs(dm[0]), 1.0):
        return bil
    return bil / complex(m[0])


def _log_true(p: Potential, f: float, direction: MatchDirection):
    def g(k):
        return residual_terms(p, k, f, direction)[0]
    return g


def _edge_density(rect: ComplexRect, f: float, L: float) -> int:
    """A priori samples per edge: the phase of the Wronskian moves at most
    about ``4|k|^2/f + 2L`` per unit ``k``."""
    kmax = float(np.max(np.abs(rect.corners())))
    speed = 4.0 * kmax ** 2 / f + 2.0 * L + 10.0
    edge = max(rect.width, rect.height)
    return int(min(4096, max(16, math.ceil(edge * speed / (0.25 * math.pi)))))


def _rect_direction(rect: ComplexRect) -> MatchDirection:
    return direction_for(rect.center)


def count_zeros(p: Potential, f: float, rect: ComplexRect, retries: int = 3,
                seed: int = 0) -> int:
    """Number of resonances with ``k`` inside ``rect`` (argument principle)."""
    _check_quadrant(rect)
    rng = np.random.default_rng(seed)
    r = rect
    for attempt in range(retries + 1):
        try:
            return winding_number(_log_true(p, f, _rect_direction(r)), r,
                                  min_per_edge=_edge_density(r, f, p.L), batch=2048)
        except BoundaryZeroError:
            if attempt == retries:
                raise
            r = rect.jittered(1e-3, rng)
    raise AssertionError("unreachable")


def _check_quadrant(rect: ComplexRect) -> None:
    if rect.im1 > 0 or rect.re1 <= 0 or rect.re0 < 0:
        raise ValueError(f"{rect} is not inside the lower-right quadrant of the k-plane")


class _Target:
    """The Wronskian times ``exp(-S_poly(u))`` in the iteration variable ``u``.

    ``S_poly`` is the quadratic Taylor polynomial, at the starting point, of
    the exponent carried by the potential term of the Wronskian.  Being a
    polynomial it adds no branch cuts, and it removes most of the exponential
    variation so that the secant sees a nearly linear function.
    """

    def __init__(self, p, f, direction, to_k, u0):
        self.p, self.f, self.direction, self.to_k = p, f, direction, to_k
        h = 1e-5 * max(abs(u0), 1e-3)
        us = np.array([u0 - h, u0, u0 + h])
        ks = np.array([to_k(u) for u in us])
        S = self._exponent(ks)
        self.u0 = u0
        self.S0 = S[1]
        self.S1 = (S[2] - S[0]) / (2 * h)
        self.S2 = (S[2] - 2 * S[1] + S[0]) / (h * h)

    def _exponent(self, ks):
        _, _, s_seed = _seed_data(self.p, ks, self.f, self.direction)
        xs, _ = support_quadrature(self.p, _panel(ks))
        if xs.size == 0:
            return s_seed
        end = xs.max() if self.direction is MatchDirection.SEED_LEFT else xs.min()
        _, _, s_far = _far_data(self.p, ks, self.f, self.direction, np.array([end]))
        return s_seed + s_far[0]

    def __call__(self, u: complex) -> tuple[complex, float]:
        k = self.to_k(u)
        logR, logscale, _ = residual_terms(self.p, np.array([k]), self.f, self.direction)
        d = u - self.u0
        expo = complex(logR[0]) - (self.S0 + self.S1 * d + 0.5 * self.S2 * d * d)
        rel = float(np.exp(logR[0].real - logscale[0]))
        if not math.isfinite(expo.real):
            return 0j, rel
        if expo.real > 700:
            raise EscapedDomainError(f"residual overflow at k = {k}")
        return cmath.exp(expo), rel


def _in_domain(k: complex, variable: str, margin: float) -> bool:
    if variable == "z":
        return (k * k).imag < margin * abs(k) ** 2 and k.real > -margin * abs(k)
    return k.real > -margin * abs(k) and k.imag < margin * abs(k)


def refine_root(p: Potential, k_guess: complex, f: float, tol: float | None = None,
                direction: MatchDirection | str | None = None,
                variable: str | None = None, maxit: int = 50,
                method: str = "newton", j: int | None = None) -> Resonance:
    """Polish a resonance from ``k_guess`` by complex secant, Muller as fallback.

    ``variable="z"`` iterates in ``z = k**2``, which is better conditioned
    near ``arg k = -pi/2`` (bound-state resonances); by default it is chosen
    when ``arg k_guess < -pi/2 + 0.2``.
    """
    k_guess = complex(k_guess)
    if not (k_guess.real > 0 and k_guess.imag < 0):
        raise EscapedDomainError(f"guess {k_guess} is not in the open lower quadrant")
    tol = 1e-10 * abs(k_guess) if tol is None else tol
    direction = direction_for(k_guess) if direction is None else MatchDirection(direction)
    if variable is None:
        variable = "z" if cmath.phase(k_guess) < -math.pi / 2 + 0.2 else "k"
    def to_k(u):
        if variable == "k":
            return u
        k = cmath.sqrt(u)
        return k if k.real >= 0 else -k

    u0 = k_guess if variable == "k" else k_guess * k_guess
    G = _Target(p, f, direction, to_k, u0)
    utol = tol if variable == "k" else 2 * abs(k_guess) * tol
    it = [0]

    def check(u):
        k = to_k(u)
        if not (math.isfinite(k.real) and math.isfinite(k.imag)) or not _in_domain(k, variable, 0.05):
            raise EscapedDomainError(f"iterate {k} left the lower quadrant")

    def done(u, du, rel):
        return abs(du) < utol and rel <= 1e-9

    try:
        u, rel, n = _secant(G, u0, utol, check, done, maxit // 2)
    except (NoConvergenceError, EscapedDomainError, ZeroDivisionError):
        u, rel, n = _muller(G, u0, utol, check, done, maxit - maxit // 2)
        n += maxit // 2
    k = to_k(u)
    if not (k.real > 0 and (k * k).imag < 0):
        raise EscapedDomainError(f"root {k} is not in the open lower quadrant")
    return Resonance(k, k * k, rel, method, f, j, n)


def _secant(G, u0, utol, check, done, maxit):
    h = max(1e-6 * abs(u0), 1e-9)
    u1 = u0 + h
    g0, _ = G(u0)
    g1, rel = G(u1)
    for n in range(1, maxit + 1):
        if g1 == g0:
            raise NoConvergenceError("secant slope vanished (residual locally constant)")
        du = -g1 * (u1 - u0) / (g1 - g0)
        u0, g0 = u1, g1
        u1 = u1 + du
        check(u1)
        g1, rel = G(u1)
        if done(u1, du, rel):
            return u1, rel, n
    raise NoConvergenceError(f"secant did not converge in {maxit} iterations")


def _muller(G, u0, utol, check, done, maxit):
    h = max(1e-4 * abs(u0), 1e-8)
    xs = [u0 - h, u0 + h, u0]
    gs = [G(x)[0] for x in xs]
    for n in range(1, maxit + 1):
        x0, x1, x2 = xs
        g0, g1, g2 = gs
        h1, h2 = x1 - x0, x2 - x1
        d1, d2 = (g1 - g0) / h1, (g2 - g1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4 * g2 * a)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            raise NoConvergenceError("Muller step undefined (residual locally constant)")
        du = -2 * g2 / den
        x3 = x2 + du
        check(x3)
        g3, rel = G(x3)
        if done(x3, du, rel):
            return x3, rel, n
        xs, gs = [x1, x2, x3], [g1, g2, g3]
    raise NoConvergenceError(f"no convergence in {maxit} Muller iterations")


def scan_rectangle(p: Potential, f: float, rect: ComplexRect, max_depth: int = 12,
                   tol: float | None = None, seed: int = 0) -> list[Resonance]:
    """All resonances with ``k`` in ``rect``: quadtree on winding numbers, then refinement."""
    _check_quadrant(rect)
    rng = np.random.default_rng(seed)
    n = count_zeros(p, f, rect, seed=seed)
    found: list[Resonance] = []
    _scan(p, f, rect, n, 0, max_depth, tol, found, rng)
    out: list[Resonance] = []
    for r in sorted(found, key=lambda r: (r.k.real, r.k.imag)):
        t = 10 * (tol if tol is not None else 1e-10 * abs(r.k))
        if not any(abs(r.k - q.k) < t for q in out):
            out.append(r)
    return out


def _scan(p, f, rect, n, depth, max_depth, tol, out, rng):
    if n <= 0:
        return
    if n == 1:
        try:
            r = refine_root(p, rect.center, f, tol=tol, method=Method.SCAN.value)
            if rect.contains(r.k, pad=1e-12):
                out.append(r)
                return
        except (NoConvergenceError, EscapedDomainError):
            pass
    if depth >= max_depth:
        raise DepthExceededError(f"depth {max_depth} reached with {n} zeros unresolved in {rect}",
                                 out)
    for attempt in range(4):
        frac = 0.5 if attempt == 0 else rng.uniform(0.35, 0.65)
        c = complex(rect.re0 + frac * rect.width, rect.im0 + frac * rect.height)
        kids = [ComplexRect(rect.re0, c.real, rect.im0, c.imag),
                ComplexRect(c.real, rect.re1, rect.im0, c.imag),
                ComplexRect(rect.re0, c.real, c.imag, rect.im1),
                ComplexRect(c.real, rect.re1, c.imag, rect.im1)]
        try:
            counts = [count_zeros(p, f, q, retries=0) for q in kids]
        except BoundaryZeroError:
            continue
        if sum(counts) == n:
            break
    else:
        raise BoundaryZeroError(f"could not subdivide {rect} consistently")
    for q, m in zip(kids, counts):
        _scan(p, f, q, m, depth + 1, max_depth, tol, out, rng)
