import cmath
import math

import numpy as np
import pytest

from starkres.contour import ComplexRect
from starkres.potential import square_barrier
from starkres.resonance import (DepthExceededError, EscapedDomainError, MatchDirection,
                                NoConvergenceError, count_zeros, direction_for, free_wronskian,
                                matching_residual, refine_root, residual_terms, scan_rectangle)

# exact roots from Ai/Bi matching on each constant segment, mpmath at 30 digits
# (scripts/oracle_mpmath.py)
K_BARRIER_J2 = 0.95043042280914842 - 0.00083624669476475616j
K_BARRIER_J3 = 1.0996313389473599 - 0.0011297121126817338j
K_BARRIER_LINE = 0.46254221843046495 - 0.8285184776814977j
K_WELL_BOUND = 0.0017981845465697737 - 1.1192500522665363j
K_BUMP = 1.2471477201835027 - 0.21065653379117923j


def test_free_wronskian_value():
    f = 0.3
    assert free_wronskian(f) == pytest.approx(f ** (1 / 3) * cmath.exp(-1j * math.pi / 6) / (2 * math.pi))


def test_free_residual_is_the_free_wronskian(free):
    ks = np.array([1.0 - 0.1j, 0.5 - 0.4j, 1.8 - 0.01j])
    logR, _, _ = residual_terms(free, ks, 0.2, MatchDirection.SEED_LEFT)
    assert np.allclose(np.exp(logR), free_wronskian(0.2), rtol=1e-14)


@pytest.mark.parametrize("f", [0.5, 0.1])
def test_free_potential_has_no_resonances(free, f):
    assert count_zeros(free, f, ComplexRect(0.3, 2.0, -0.6, -0.001)) == 0


@pytest.mark.parametrize("k, f, fixture", [
    (K_BARRIER_J2, 0.1, "barrier"), (K_BARRIER_J3, 0.1, "barrier"),
    (K_BARRIER_LINE, 0.1, "barrier"), (K_BUMP, 0.1, "bump"),
])
def test_refine_reproduces_oracle(request, k, f, fixture):
    p = request.getfixturevalue(fixture)
    r = refine_root(p, k * (1 + 2e-3), f)
    assert abs(r.k - k) < 1e-10 * abs(k)
    assert r.residual < 1e-9
    assert r.z == pytest.approx(r.k * r.k)


def test_refine_bound_state_in_z(well):
    r = refine_root(well, cmath.sqrt(-1.2527 - 0.004j), 0.3)
    assert abs(r.k - K_WELL_BOUND) < 1e-10


@pytest.mark.parametrize("k", [K_BARRIER_J2, K_BARRIER_LINE])
def test_both_directions_vanish_at_a_root(barrier, k):
    for d in MatchDirection:
        logR, logscale, _ = residual_terms(barrier, np.array([k]), 0.1, d)
        assert logR[0].real - logscale[0] < math.log(1e-9)


def test_residual_forms_share_zeros(barrier):
    far = abs(matching_residual(barrier, 1.0 - 0.01j, 0.1, form="bilinear"))
    near = abs(matching_residual(barrier, K_BARRIER_J2, 0.1, form="bilinear"))
    assert near < 1e-8 * far
    assert abs(matching_residual(barrier, K_BARRIER_J2, 0.1)) < 1e-8 * abs(
        matching_residual(barrier, 1.0 - 0.01j, 0.1))


def test_direction_choice():
    assert direction_for(1.0 - 0.1j) is MatchDirection.SEED_LEFT
    assert direction_for(0.5 - 1.0j) is MatchDirection.SEED_RIGHT


def test_scan_finds_the_oracle_roots(barrier):
    rect = ComplexRect(0.9, 1.1, -0.3, -1e-5)
    found = scan_rectangle(barrier, 0.1, rect)
    assert len(found) == count_zeros(barrier, 0.1, rect) == 2
    assert abs(found[0].k - K_BARRIER_J2) < 1e-10
    assert abs(found[1].k - K_BARRIER_J3) < 1e-10


def test_scan_of_free_potential_is_empty(free):
    assert scan_rectangle(free, 0.1, ComplexRect(0.3, 2.0, -0.6, -0.001)) == []


def test_count_is_additive(barrier):
    whole = ComplexRect(0.8, 1.2, -0.3, -1e-5)
    parts = [ComplexRect(0.8, 1.0013, -0.3, -1e-5), ComplexRect(1.0013, 1.2, -0.3, -1e-5)]
    assert count_zeros(barrier, 0.05, whole) == sum(count_zeros(barrier, 0.05, r) for r in parts) == 5


def test_depth_limit_reports_partial(barrier):
    with pytest.raises(DepthExceededError) as exc:
        scan_rectangle(barrier, 0.05, ComplexRect(0.8, 1.2, -0.3, -1e-5), max_depth=0)
    assert isinstance(exc.value.partial, list)


def test_free_refinement_fails(free):
    with pytest.raises(NoConvergenceError):
        refine_root(free, 1.0 - 0.1j, 0.1)


def test_guess_outside_quadrant(barrier):
    with pytest.raises(EscapedDomainError):
        refine_root(barrier, 1.0 + 0.1j, 0.1)


def test_rect_outside_quadrant(barrier):
    with pytest.raises(ValueError):
        count_zeros(barrier, 0.1, ComplexRect(0.5, 1.0, -0.5, 0.2))


def test_field_must_be_positive(barrier):
    with pytest.raises(ValueError):
        residual_terms(barrier, np.array([1.0 - 0.1j]), 0.0, MatchDirection.SEED_LEFT)
