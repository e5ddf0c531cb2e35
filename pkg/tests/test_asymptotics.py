import cmath
import json
import math

import numpy as np
import pytest

from starkres.asymptotics import (FTooSmallError, Family, GuardViolationError,
                                  WidthUnderflowError, bound_state_resonance, eta0,
                                  exact_exponential_ratio, g_approx, resonance_free_regions,
                                  string_fixed_point, string_line, string_positive_axis,
                                  track_reflection_zero_resonance)
from starkres.contour import ComplexRect
from starkres.resonance import count_zeros, refine_root
from starkres.scattering import DegenerateFunctionError, find_F_zeros
from starkres.spectrum import bound_states

from test_resonance import K_BARRIER_J2, K_BUMP, K_WELL_BOUND

K0_BUMP = 1.2433741726991829 - 0.19690289957483371j


@pytest.mark.parametrize("f, j, expected", [(0.1, 2, 0.98045), (0.05, 7, 1.18151), (1.0, 1, 1.67649)])
def test_eta0_values(f, j, expected):
    assert eta0(f, j) == pytest.approx(expected, abs=5e-5)
    assert eta0(f, j) ** 3 == pytest.approx(1.5 * math.pi * f * j)


def test_positive_axis_predictions_are_well_formed(well):
    preds = string_positive_axis(well, 0.05, (0.9, 1.5))
    assert [p.j for p in preds] == list(range(preds[0].j, preds[0].j + len(preds)))
    assert all(p.family is Family.POSITIVE_AXIS for p in preds)
    assert all(p.l > 0 and p.k_pred.imag < 0 for p in preds)
    assert np.all(np.abs(np.diff([p.theta for p in preds])) < math.pi / 2)
    for p in preds:
        assert p.k_pred == pytest.approx(p.eta0 - 0.05 * (p.theta + 1j * p.l) / (4 * p.eta0 ** 2))


def test_positive_axis_density(well):
    # one resonance per string index in the window, up to edge effects
    f, lo, hi = 0.03, 1.0, 1.3
    preds = string_positive_axis(well, f, (lo, hi))
    n = count_zeros(well, f, ComplexRect(lo, hi, -0.3, -1e-5))
    assert abs(n - len(preds)) <= 1
    assert len(preds) >= 8


@pytest.mark.parametrize("select", ["eta0", "k_pred"])
def test_positive_axis_selection(well, select):
    preds = string_positive_axis(well, 0.1, (0.9, 1.1), select=select)
    key = [p.eta0 for p in preds] if select == "eta0" else [p.k_pred.real for p in preds]
    assert preds and all(0.9 <= x <= 1.1 for x in key)


def test_positive_axis_error_is_small_at_small_field(barrier):
    preds = string_positive_axis(barrier, 0.1, (0.9, 1.0))
    pred = min(preds, key=lambda p: abs(p.k_pred - K_BARRIER_J2))
    assert abs(pred.k_pred - K_BARRIER_J2) < 0.1 * 0.1


def test_free_potential_has_no_strings(free):
    with pytest.raises(FTooSmallError):
        string_positive_axis(free, 0.1, (0.9, 1.1))
    with pytest.raises(DegenerateFunctionError):
        string_line(free, 0.1, (0.4, 1.2))


def test_line_string_predictions(barrier):
    preds = string_line(barrier, 0.1, (0.4, 1.2))
    assert all(p.family is Family.LINE for p in preds)
    for p in preds:
        assert abs(cmath.phase(p.k_pred) + math.pi / 3) < 0.2


@pytest.mark.parametrize("bad", [dict(select="nearest"), dict(f=-0.1)])
def test_positive_axis_rejects_bad_arguments(well, bad):
    kw = dict(f=0.1, select="eta0") | bad
    with pytest.raises(ValueError):
        string_positive_axis(well, kw["f"], (0.9, 1.1), select=kw["select"])


def test_fixed_point_matches_refinement(well):
    fp = string_fixed_point(well, 0.1, 2)
    r = refine_root(well, fp.k_pred * (1 + 1e-3), 0.1)
    assert abs(fp.k_pred - r.k) < 1e-10


def test_fixed_point_contracts(well):
    fp = string_fixed_point(well, 0.05, 5)
    s = np.array(fp.steps)
    s = s[s > 1e-14]
    assert np.max(s[1:] / s[:-1]) < 0.5


def test_fixed_point_guard(bump):
    zero = find_F_zeros(bump, ComplexRect(0.5, 2.5, -0.5, -0.01))[0]
    with pytest.raises(GuardViolationError):
        string_fixed_point(bump, 0.1, 3, k_start=zero.k0 + 0.01, zero=zero)


def test_exponential_ratio_at_a_root(barrier):
    eta = K_BARRIER_J2 ** 2 - 0.1 * barrier.L
    lhs = cmath.exp(4j * eta ** 1.5 / (3 * 0.1))
    assert abs(exact_exponential_ratio(barrier, K_BARRIER_J2, 0.1) / lhs - 1) < 1e-8


def test_exponential_ratio_limit(barrier):
    # Phi_k -> 1/(iG) = i/rho(k) at f -> 0, with an O(f) error
    from starkres.asymptotics import _cubic_shift
    from starkres.scattering import rho_array
    k = 1.0 - 0.01j
    target = 1j / complex(rho_array(barrier, np.array([k]))[0])
    err = []
    for f in (0.04, 0.02, 0.01):
        phi = exact_exponential_ratio(barrier, k, f) * cmath.exp(_cubic_shift(k, f, barrier.L))
        err.append(abs(phi - target))
    assert err[0] < 0.02
    assert err[1] / err[0] == pytest.approx(0.5, abs=0.05)
    assert err[2] / err[1] == pytest.approx(0.5, abs=0.05)


def test_reflection_zero_tracking(bump):
    zero = find_F_zeros(bump, ComplexRect(0.5, 2.5, -0.5, -0.01))[0]
    assert abs(zero.k0 - K0_BUMP) < 1e-12
    t = track_reflection_zero_resonance(bump, 0.1, zero)
    assert abs(t.k - K_BUMP) < 1e-10
    (_, d1), (_, d2), (_, d3) = t.approach
    assert d1 > d2 > d3 and d2 < 0.01 and d3 < 0.005
    assert d2 / d1 == pytest.approx(0.5, abs=0.05)


def test_bound_state_resonance(well):
    bs = bound_states(well)[0]
    r, width = bound_state_resonance(well, 0.3, bs)
    assert abs(r.k - K_WELL_BOUND) < 1e-10
    assert width > 0 and r.z.imag < 0


def test_bound_state_width_underflow(well):
    with pytest.raises(WidthUnderflowError):
        bound_state_resonance(well, 0.01, bound_states(well)[0])


@pytest.mark.parametrize("z", [1.0 - 0.05j, 2.0 - 0.3j, 0.5 - 0.01j])
def test_g_approx_is_one_without_potential(free, z):
    g = g_approx(free, z, 0.1)
    assert abs(g.F) < 1e-14 and g.value == pytest.approx(1.0)


def test_g_approx_overflow_is_flagged(barrier):
    g = g_approx(barrier, 9.0 - 5.0j, 0.01)
    assert g.overflow and math.isnan(g.value.real) and math.isfinite(g.relative())


def test_g_approx_sector(barrier):
    with pytest.raises(ValueError):
        g_approx(barrier, -1.0 - 0.5j, 0.1)


def test_free_regions_are_well_formed(well):
    regions = resonance_free_regions(well, 0.05)
    assert [r.label for r in regions] == ["i", "ii", "iii", "iv", "v", "vi"]
    for r in regions:
        assert r.probes and r.inequalities
        json.dumps(r.to_dict())
        for q in r.probes:
            assert r.contains(q.center) and q.im1 < 0
