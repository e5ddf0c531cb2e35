"""Rectangles in the complex plane and argument-principle winding numbers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["BoundaryZeroError", "ComplexRect", "winding_number"]

LogFunc = Callable[[np.ndarray], np.ndarray]


class BoundaryZeroError(ArithmeticError):
    """A zero sits on (or numerically on) the contour."""


@dataclass(frozen=True)
class ComplexRect:
    re0: float
    re1: float
    im0: float
    im1: float

    def __post_init__(self):
        if not (self.re0 < self.re1 and self.im0 < self.im1):
            raise ValueError(f"degenerate rectangle {self}")

    @classmethod
    def parse(cls, text: str) -> "ComplexRect":
        """From ``"re0:re1:im0:im1"``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"rectangle must be re0:re1:im0:im1, got {text!r}")
        return cls(*(float(x) for x in parts))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))

    @property
    def width(self) -> float:
        return self.re1 - self.re0

    @property
    def height(self) -> float:
        return self.im1 - self.im0

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self) -> np.ndarray:
        return np.array([complex(self.re0, self.im0), complex(self.re1, self.im0),
                         complex(self.re1, self.im1), complex(self.re0, self.im1)])

    def contains(self, w: complex, pad: float = 0.0) -> bool:
        return (self.re0 - pad <= w.real <= self.re1 + pad
                and self.im0 - pad <= w.imag <= self.im1 + pad)

    def quarters(self) -> list["ComplexRect"]:
        c = self.center
        return [ComplexRect(self.re0, c.real, self.im0, c.imag),
                ComplexRect(c.real, self.re1, self.im0, c.imag),
                ComplexRect(self.re0, c.real, c.imag, self.im1),
                ComplexRect(c.real, self.re1, c.imag, self.im1)]

    def jittered(self, amount: float, rng: np.random.Generator) -> "ComplexRect":
        d = amount * rng.uniform(-1.0, 1.0, 4) * np.array([self.width, self.width,
                                                           self.height, self.height])
        return ComplexRect(self.re0 + d[0], self.re1 + d[1], self.im0 + d[2], self.im1 + d[3])

    def boundary(self, t: np.ndarray) -> np.ndarray:
        """Counter-clockwise perimeter parametrized by ``t`` in ``[0, 4)``."""
        c = self.corners()
        nxt = np.roll(c, -1)
        edge = np.floor(t).astype(int) % 4
        s = t - np.floor(t)
        return c[edge] + s * (nxt[edge] - c[edge])


def winding_number(logfunc: LogFunc, rect: ComplexRect, min_per_edge: int = 64,
                   max_points: int = 400_000, batch: int | None = None) -> int:
    """Number of zeros minus poles of ``g`` inside ``rect``.

    ``logfunc`` returns a branch of ``log g`` at an array of points; only the
    imaginary part modulo ``2 pi`` is used, so any exponent bookkeeping works
    as long as it is continuous along the contour.  The perimeter is refined
    until every phase step is below ``pi/2``.
    """
    t = np.linspace(0.0, 4.0, 4 * min_per_edge + 1)
    vals = _eval(logfunc, rect.boundary(t), batch)
    min_dt = 4.0 * 1e-12
    while True:
        if not np.all(np.isfinite(vals)):
            raise BoundaryZeroError(f"non-finite boundary values on {rect}")
        d = _wrap(np.diff(vals.imag))
        bad = np.flatnonzero(np.abs(d) >= 0.5 * math.pi)
        if bad.size == 0:
            break
        if np.min(np.diff(t)[bad]) < min_dt:
            raise BoundaryZeroError(f"zero on or near the contour of {rect}")
        if t.size + bad.size > max_points:
            raise BoundaryZeroError(f"phase unresolved with {max_points} samples on {rect}")
        tm = 0.5 * (t[bad] + t[bad + 1])
        vm = _eval(logfunc, rect.boundary(tm), batch)
        t = np.insert(t, bad + 1, tm)
        vals = np.insert(vals, bad + 1, vm)
    total = float(np.sum(d)) / (2.0 * math.pi)
    n = round(total)
    if abs(total - n) > 1e-6:
        raise BoundaryZeroError(f"non-integer winding {total:.6f} on {rect}")
    return int(n)


def _eval(logfunc: LogFunc, pts: np.ndarray, batch: int | None) -> np.ndarray:
    if batch is None or pts.size <= batch:
        return np.asarray(logfunc(pts), dtype=complex)
    return np.concatenate([np.asarray(logfunc(pts[i:i + batch]), dtype=complex)
                           for i in range(0, pts.size, batch)])


def _wrap(d: np.ndarray) -> np.ndarray:
    return (d + math.pi) % (2.0 * math.pi) - math.pi
