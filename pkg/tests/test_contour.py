import numpy as np
import pytest

from starkres.contour import BoundaryZeroError, ComplexRect, winding_number


def log_poly(roots):
    def g(z):
        with np.errstate(divide="ignore"):
            return np.zeros_like(z) + sum(np.log(z - r) for r in roots)
    return g


@pytest.mark.parametrize("roots, n", [([0.5 - 0.5j], 1), ([0.2 - 0.2j, 0.8 - 0.9j, 3.0], 2),
                                      ([], 0), ([0.5 - 0.5j] * 3, 3)])
def test_counts_polynomial_roots(roots, n):
    rect = ComplexRect(0.0, 1.0, -1.0, 0.0)
    assert winding_number(log_poly(roots), rect) == n


def test_fast_phase_needs_refinement():
    # e^{40 i z} (z - c): the exponential winds fast along the edges but has no zeros
    rect = ComplexRect(0.0, 2.0, -1.0, 0.0)
    g = lambda z: 40j * z + np.log(z - (1.0 - 0.5j))
    assert winding_number(g, rect, min_per_edge=8) == 1


def test_zero_on_boundary_raises():
    rect = ComplexRect(0.0, 1.0, -1.0, 0.0)
    with pytest.raises(BoundaryZeroError):
        winding_number(log_poly([0.5 + 0j]), rect, min_per_edge=16)


def test_rect_helpers():
    r = ComplexRect.parse("0:2:-1:0")
    assert r.center == 1 - 0.5j
    assert r.contains(1.0 - 0.5j) and not r.contains(3.0)
    assert sum(q.width * q.height for q in r.quarters()) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        ComplexRect.parse("1:0:0:1")
