import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starkres.airy import (OMEGA, AirySectorError, MethodTag, ai, ai_logderiv, ai_rotated,
                           airy_scaled, decompose_oscillatory, logderiv_array)

mp.mp.dps = 30


def mp_ai(w):
    w = mp.mpc(w)
    return complex(mp.airyai(w)), complex(mp.airyai(w, derivative=1))


def rel_err(w, got, want):
    """Error relative to the local envelope |Ai| + |Ai'|/sqrt|w| (finite at zeros of Ai)."""
    s = math.sqrt(max(1.0, abs(w)))
    env = math.hypot(abs(want[0]), abs(want[1]) / s)
    return max(abs(got[0] - want[0]), abs(got[1] - want[1]) / s) / env


POINTS = [r * cmath.exp(1j * a) for r in (0.3, 2.0, 5.9, 7.4, 12.0, 19.5)
          for a in np.linspace(-math.pi, math.pi, 13)]


@pytest.mark.parametrize("w", POINTS, ids=lambda w: f"{w:.3f}")
def test_matches_mpmath(w):
    e = ai(w)
    assert rel_err(w, (e.value, e.derivative), mp_ai(w)) < 1e-10


@pytest.mark.parametrize("w", [0j, 1e-12 + 0j, 1.0 + 0j, -1.0 + 0j])
def test_small_arguments(w):
    e = ai(w)
    want = mp_ai(w)
    assert abs(e.value - want[0]) < 1e-14
    assert abs(e.derivative - want[1]) < 1e-14


def test_zero_value_is_the_constant():
    e = ai(0)
    assert e.value == pytest.approx(0.35502805388781723926, rel=1e-15)
    assert e.derivative == pytest.approx(-0.25881940379280679840, rel=1e-15)


@pytest.mark.parametrize("w, tag", [(1.0, MethodTag.SERIES), (15.0, MethodTag.ASYMPTOTIC),
                                    (-15.0, MethodTag.ROTATED)])
def test_method_dispatch(w, tag):
    assert ai(w).method_tag is tag


def test_large_positive_argument_is_scaled():
    # Ai(60) ~ 1e-136: the mantissa stays O(1), the scale carries the decay
    e = ai(60.0)
    assert abs(e.value_mantissa) == pytest.approx(abs(complex(mp.airyai(60) * mp.exp(mp.mpf(2) / 3 * 60 ** 1.5))), rel=1e-12)
    assert e.scale_exponent.real == pytest.approx(-(2 / 3) * 60 ** 1.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(-math.pi, math.pi))
def test_connection_formula(r, a):
    w = r * cmath.exp(1j * a)
    m, dm, s, _ = airy_scaled(np.array([w, OMEGA * w, OMEGA.conjugate() * w]))
    top = max(s.real)
    vals = m * np.exp(s - top)
    ders = dm * np.exp(s - top)
    ph = cmath.exp(1j * math.pi / 3)
    res_v = vals[0] - vals[1] / ph - vals[2] * ph
    res_d = ders[0] - OMEGA * ders[1] / ph - OMEGA.conjugate() * ders[2] * ph
    dom = max(abs(vals).max(), 1e-300)
    domd = max(abs(ders).max(), 1e-300)
    assert abs(res_v) <= 1e-10 * dom
    assert abs(res_d) <= 1e-10 * domd


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 20.0), st.floats(2 * math.pi / 3, math.pi), st.sampled_from([1, -1]))
def test_decomposition_recombines(r, a, sign):
    w = r * cmath.exp(1j * sign * a)
    d = decompose_oscillatory(w)
    v, dv = d.recombine()
    e = ai(w)
    ref = abs(d.coeff_plus * cmath.exp(d.phase)) + abs(d.coeff_minus * cmath.exp(-d.phase))
    assert abs(v - e.value) <= 1e-12 * ref
    assert d.phase == pytest.approx(1j * (2 / 3) * (-w) ** 1.5)


def test_decomposition_sector_error():
    with pytest.raises(AirySectorError):
        decompose_oscillatory(3.0 + 1.0j)


@pytest.mark.parametrize("sector", [1, -1])
def test_rotated_evaluation(sector):
    w = 2.5 - 1.5j
    e = ai_rotated(w, sector)
    want = mp_ai(w * cmath.exp(sector * 2j * math.pi / 3))
    assert e.value == pytest.approx(want[0], rel=1e-11)


def test_logderiv_consistency():
    ws = np.array([3.0 + 1j, -4.0 + 0.5j, 10.0 - 2j])
    ld, _ = logderiv_array(ws)
    for w, v in zip(ws, ld):
        a, da = mp_ai(w)
        assert v == pytest.approx(da / a, rel=1e-10)
        assert ai_logderiv(w) == pytest.approx(v, rel=1e-14)


def test_asymptotic_error_terms_tend_to_one():
    # Ai(w) 2 sqrt(pi) w^{1/4} e^{zeta} -> 1 along the positive axis, with O(1/zeta) error
    prev = None
    for r in (8.0, 16.0, 32.0):
        e = ai(r)
        a1 = e.value_mantissa * 2 * math.sqrt(math.pi) * r ** 0.25
        err = abs(a1 - 1)
        assert err < 0.02
        if prev is not None:
            assert err < prev
        prev = err
