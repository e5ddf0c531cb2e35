"""Real, bounded, compactly supported potentials on the line."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Kind",
    "Potential",
    "PotentialError",
    "double_bump",
    "eval_potential",
    "parse_potential",
    "square_barrier",
    "square_well",
    "zero_potential",
]


class Kind(str, Enum):
    PIECEWISE_CONSTANT = "piecewise_constant"
    SAMPLED = "sampled"


class PotentialError(ValueError):
    """Malformed or out-of-domain potential description."""


@dataclass(frozen=True)
class Samples:
    x0: float
    dx: float
    values: tuple[float, ...]

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (len(self.values) - 1)


@dataclass(frozen=True)
class Potential:
    """A potential vanishing for ``|x| >= L``.

    Piecewise-constant potentials are stored as sorted, non-overlapping
    half-open segments ``[x_lo, x_hi)``.  Sampled potentials are linearly
    interpolated between grid nodes and are zero off the grid.
    Use the constructors or :func:`parse_potential`; direct construction
    goes through the same validation.
    """

    kind: Kind
    L: float
    segments: tuple[tuple[float, float, float], ...] = ()
    samples: Samples | None = None
    _cells: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise PotentialError(f"support half-width must be positive, got {self.L}")
        if self.kind is Kind.PIECEWISE_CONSTANT:
            segs = _validate_segments(self.segments)
            content = _segment_extent(segs)
            if content > self.L * (1 + 1e-12):
                raise PotentialError(f"segments extend to {content}, beyond L = {self.L}")
            object.__setattr__(self, "segments", segs)
        else:
            if self.samples is None:
                raise PotentialError("sampled potential needs samples")
            _validate_samples(self.samples)
            content = _sample_extent(self.samples)
            if content > self.L * (1 + 1e-12):
                raise PotentialError(f"samples are nonzero out to {content}, beyond L = {self.L}")
        object.__setattr__(self, "_cells", _build_cells(self))

    @property
    def is_zero(self) -> bool:
        return not np.any(self._cells[2]) and not np.any(self._cells[3])

    @property
    def vmax(self) -> float:
        """Bound on ``|V|``."""
        lo = np.abs(self._cells[2])
        hi = np.abs(self._cells[2] + self._cells[3] * (self._cells[1] - self._cells[0]))
        return float(max(lo.max(initial=0.0), hi.max(initial=0.0)))

    def cells(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Linear pieces tiling ``[-L, L]``: ``(x_lo, x_hi, v_at_x_lo, slope)``."""
        return self._cells

    def breakpoints(self) -> np.ndarray:
        c = self._cells
        return np.concatenate([c[0], c[1][-1:]])

    def __call__(self, x):
        return eval_potential(self, x)

    def mirrored(self) -> "Potential":
        """The potential ``V(-x)``."""
        if self.kind is Kind.PIECEWISE_CONSTANT:
            segs = tuple(sorted((-hi, -lo, v) for lo, hi, v in self.segments))
            return Potential(self.kind, self.L, segs)
        s = self.samples
        return Potential(self.kind, self.L,
                         samples=Samples(-s.x_end, s.dx, tuple(reversed(s.values))))

    def to_document(self) -> dict:
        if self.kind is Kind.PIECEWISE_CONSTANT:
            return {"kind": self.kind.value, "L": self.L,
                    "segments": [list(s) for s in self.segments]}
        s = self.samples
        return {"kind": self.kind.value, "L": self.L,
                "samples": {"x0": s.x0, "dx": s.dx, "values": list(s.values)}}


def _finite_real(v, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise PotentialError(f"{what} must be a real number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise PotentialError(f"{what} must be finite, got {v!r}")
    return v


def _validate_segments(segments: Iterable[Sequence[float]]):
    out = []
    for i, seg in enumerate(segments):
        if len(seg) != 3:
            raise PotentialError(f"segment {i} must be [x_lo, x_hi, v]")
        lo, hi, v = (_finite_real(x, f"segment {i}") for x in seg)
        if not lo < hi:
            raise PotentialError(f"segment {i} has x_lo >= x_hi")
        out.append((lo, hi, v))
    out.sort()
    for a, b in zip(out, out[1:]):
        if b[0] < a[1]:
            raise PotentialError(f"segments {a} and {b} overlap")
    return tuple(out)


def _segment_extent(segs) -> float:
    ext = [max(abs(lo), abs(hi)) for lo, hi, v in segs if v != 0.0]
    return max(ext, default=0.0)


def _validate_samples(s: Samples) -> None:
    _finite_real(s.x0, "samples.x0")
    if _finite_real(s.dx, "samples.dx") <= 0:
        raise PotentialError("samples.dx must be positive")
    if len(s.values) < 2:
        raise PotentialError("samples need at least two values")
    for v in s.values:
        _finite_real(v, "sample value")


def _sample_extent(s: Samples) -> float:
    vals = np.asarray(s.values)
    nz = np.flatnonzero(vals)
    if nz.size == 0:
        return 0.0
    # the interpolant is nonzero up to the neighbouring node (or the grid end)
    i0 = max(nz[0] - 1, 0)
    i1 = min(nz[-1] + 1, len(vals) - 1)
    return max(abs(s.x0 + i0 * s.dx), abs(s.x0 + i1 * s.dx))


def _build_cells(p: Potential):
    L = p.L
    xs: list[float] = []
    vs: list[float] = []
    sl: list[float] = []
    if p.kind is Kind.PIECEWISE_CONSTANT:
        edges = {-L, L}
        for lo, hi, _ in p.segments:
            edges.update(x for x in (lo, hi) if -L < x < L)
        grid = sorted(edges)
        for a, b in zip(grid, grid[1:]):
            xs.append(a)
            vs.append(_piecewise_value(p.segments, 0.5 * (a + b)))
            sl.append(0.0)
        grid_hi = grid[1:]
    else:
        s = p.samples
        nodes = s.x0 + s.dx * np.arange(len(s.values))
        edges = sorted({-L, L, s.x0, s.x_end} | {float(x) for x in nodes if -L < x < L})
        edges = [x for x in edges if -L <= x <= L]
        for a, b in zip(edges, edges[1:]):
            if s.x0 <= 0.5 * (a + b) <= s.x_end:
                va, vb = _sampled_value(s, np.array([a, b]))
            else:
                va = vb = 0.0
            xs.append(a)
            vs.append(float(va))
            sl.append(float(vb - va) / (b - a))
        grid_hi = edges[1:]
    return (np.array(xs), np.array(grid_hi, dtype=float), np.array(vs), np.array(sl))


def _piecewise_value(segs, x: float) -> float:
    for lo, hi, v in segs:
        if lo <= x < hi:
            return v
    return 0.0


def _sampled_value(s: Samples, x: np.ndarray) -> np.ndarray:
    vals = np.asarray(s.values, dtype=float)
    inside = (x >= s.x0) & (x <= s.x_end)
    out = np.zeros_like(x, dtype=float)
    if inside.any():
        nodes = s.x0 + s.dx * np.arange(len(vals))
        out[inside] = np.interp(x[inside], nodes, vals)
    return out


def eval_potential(p: Potential, x):
    """``V(x)``; exactly zero for ``|x| >= L``.  Accepts scalars or arrays."""
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    lo, hi, v0, slope = p.cells()
    idx = np.clip(np.searchsorted(lo, flat, side="right") - 1, 0, len(lo) - 1)
    out = v0[idx] + slope[idx] * (flat - lo[idx])
    out = np.where(np.abs(flat) < p.L, out, 0.0)
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def parse_potential(document: str | dict) -> Potential:
    """Build a :class:`Potential` from its JSON description.

    Fields: ``kind`` (``piecewise_constant`` or ``sampled``, inferred when
    absent), optional ``L``, and ``segments`` (list of ``[x_lo, x_hi, v]``)
    or ``samples`` (``{"x0", "dx", "values"}``).  Without ``L`` the support
    half-width is the smallest one covering the nonzero content (1 for the
    zero potential).  A given ``L`` must cover the content.
    """
    if isinstance(document, str):
        try:
            doc = json.loads(document, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise PotentialError(f"malformed potential document: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise PotentialError("potential document must be a JSON object")
    unknown = set(doc) - {"kind", "L", "segments", "samples"}
    if unknown:
        raise PotentialError(f"unknown fields {sorted(unknown)}")
    kind = doc.get("kind")
    if kind is None:
        kind = Kind.SAMPLED.value if "samples" in doc else Kind.PIECEWISE_CONSTANT.value
    try:
        kind = Kind(kind)
    except ValueError as exc:
        raise PotentialError(f"unknown potential kind {kind!r}") from exc

    if kind is Kind.PIECEWISE_CONSTANT:
        raw = doc.get("segments", [])
        if not isinstance(raw, list) or not all(isinstance(s, list) for s in raw):
            raise PotentialError("segments must be a list of [x_lo, x_hi, v]")
        segs = _validate_segments(raw)
        content = _segment_extent(segs)
        samples = None
    else:
        raw = doc.get("samples")
        if not isinstance(raw, dict) or set(raw) != {"x0", "dx", "values"}:
            raise PotentialError("samples must be an object with x0, dx, values")
        if not isinstance(raw["values"], list):
            raise PotentialError("samples.values must be a list")
        samples = Samples(_finite_real(raw["x0"], "samples.x0"),
                          _finite_real(raw["dx"], "samples.dx"),
                          tuple(_finite_real(v, "sample value") for v in raw["values"]))
        _validate_samples(samples)
        content = _sample_extent(samples)
        segs = ()

    if "L" in doc and doc["L"] is not None:
        L = _finite_real(doc["L"], "L")
        if L <= 0:
            raise PotentialError("L must be positive")
        if content > L * (1 + 1e-12):
            raise PotentialError(f"potential content reaches {content}, beyond L = {L}")
    else:
        L = content if content > 0 else 1.0
    return Potential(kind, L, segs, samples)


def _reject_constant(name: str):
    raise PotentialError(f"non-finite number {name} is not allowed")


def zero_potential(L: float = 1.0) -> Potential:
    return Potential(Kind.PIECEWISE_CONSTANT, L, ())


def square_well(V0: float, a: float) -> Potential:
    """``V = V0`` on ``[-a, a)``; ``V0 < 0``."""
    if V0 >= 0:
        raise PotentialError("a well needs V0 < 0")
    return Potential(Kind.PIECEWISE_CONSTANT, a, ((-a, a, V0),))


def square_barrier(V0: float, a: float) -> Potential:
    """``V = V0`` on ``[-a, a)``; ``V0 > 0``."""
    if V0 <= 0:
        raise PotentialError("a barrier needs V0 > 0")
    return Potential(Kind.PIECEWISE_CONSTANT, a, ((-a, a, V0),))


def double_bump(V0: float, a: float, gap: float, V1: float | None = None) -> Potential:
    """Two bumps of width ``a`` separated by ``gap``, centred on the origin.

    The left bump has height ``V0`` and the right one ``V1`` (default ``V0``).
    """
    if a <= 0 or gap < 0:
        raise PotentialError("need a > 0 and gap >= 0")
    V1 = V0 if V1 is None else V1
    h = 0.5 * gap
    L = h + a
    segs = ((-L, -h, V0), (h, L, V1)) if gap > 0 else ((-L, 0.0, V0), (0.0, L, V1))
    return Potential(Kind.PIECEWISE_CONSTANT, L, segs)
