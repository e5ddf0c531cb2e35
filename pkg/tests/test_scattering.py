import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starkres.contour import ComplexRect
from starkres.scattering import (DegenerateFunctionError, F_derivative, amplitudes, find_F_zeros,
                                 reflection_F, reflection_F_array, rho_array)

# simple zero of F for double_bump(1, 0.5, 1, V1=2), from exact trigonometric matrices in
# mpmath at 30 digits (scripts/oracle_mpmath.py)
K0_BUMP = 1.2433741726991829 - 0.19690289957483371j


def barrier_t(k, V0=2.0, d=2.0):
    q = cmath.sqrt(k * k - V0)
    return cmath.exp(-1j * k * d) / (cmath.cos(q * d) - 1j * (k * k + q * q) / (2 * k * q) * cmath.sin(q * d))


@pytest.mark.parametrize("k", [0.3, 1.0, 1.7, 4.0, 1.2 - 0.3j])
def test_barrier_transmission_closed_form(barrier, k):
    assert amplitudes(barrier, k).t == pytest.approx(barrier_t(k), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5.0), st.sampled_from(["well", "barrier", "bump"]))
def test_unitarity(k, name):
    from starkres.potential import double_bump, square_barrier, square_well
    p = {"well": square_well(-2, 1), "barrier": square_barrier(2, 1),
         "bump": double_bump(1, 0.5, 1, V1=2)}[name]
    a = amplitudes(p, k)
    assert abs(a.r_left) ** 2 + abs(a.t) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert abs(a.rho) ** 2 + abs(a.t) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert abs(a.rho.conjugate() * a.t + a.r_left * a.t.conjugate()) < 1e-12


def test_symmetric_potential_reflects_alike(barrier):
    for k in (0.4, 1.3, 2.9):
        a = amplitudes(barrier, k)
        assert a.r_left == pytest.approx(a.rho, abs=1e-13)


def test_mirror_swaps_reflections(bump):
    for k in (0.5, 1.5):
        a, b = amplitudes(bump, k), amplitudes(bump.mirrored(), k)
        assert b.rho == pytest.approx(a.r_left, abs=1e-12)
        assert b.t == pytest.approx(a.t, abs=1e-12)


def test_free_potential_has_no_reflection(free):
    a = amplitudes(free, 1.1 - 0.2j)
    assert abs(a.rho) < 1e-15 and a.t == pytest.approx(1.0)


def test_F_is_2ik_rho(bump):
    k = 0.9 - 0.4j
    assert reflection_F(bump, k) == pytest.approx(2j * k * complex(rho_array(bump, k)))


def test_F_derivative_matches_differences(bump):
    k, h = 1.1 - 0.15j, 1e-5
    fd = (reflection_F(bump, k + h) - reflection_F(bump, k - h)) / (2 * h)
    assert F_derivative(bump, k) == pytest.approx(fd, rel=1e-8)


def test_finds_the_simple_zero(bump):
    zeros = find_F_zeros(bump, ComplexRect(0.5, 2.5, -0.5, -0.01))
    assert len(zeros) == 1
    z = zeros[0]
    assert z.order == 1
    assert abs(z.k0 - K0_BUMP) < 1e-12
    assert abs(z.F_prime) > 0.5
    assert abs(reflection_F(bump, z.k0)) < 1e-12


def test_symmetric_potentials_have_no_sector_zeros(well, barrier):
    for p in (well, barrier):
        assert find_F_zeros(p, ComplexRect(0.5, 2.5, -0.5, -0.01)) == []


def test_zero_search_rejects_free_potential(free):
    with pytest.raises(DegenerateFunctionError):
        find_F_zeros(free, ComplexRect(0.5, 2.5, -0.5, -0.01))


def test_zero_search_needs_the_sector(bump):
    with pytest.raises(ValueError):
        find_F_zeros(bump, ComplexRect(0.1, 1.0, -2.0, -0.01))


def test_k_zero_rejected(bump):
    with pytest.raises(ValueError):
        reflection_F_array(bump, np.array([0j]))
