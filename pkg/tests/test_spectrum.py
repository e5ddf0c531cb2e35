import math

import numpy as np
import pytest
from scipy.optimize import brentq

from starkres.potential import double_bump, parse_potential, square_barrier, square_well
from starkres.spectrum import (WidthDomainError, bound_states, eigenvalue_with_field,
                               predicted_width, predicted_width_forms)

# ground state of V = -2 on [-1, 1]: q tan q = sqrt(-lambda), q = sqrt(lambda + 2)
LAMBDA0_WELL = -1.2077956677267891


def test_transcendental_oracle():
    g = lambda lam: math.sqrt(lam + 2) * math.tan(math.sqrt(lam + 2)) - math.sqrt(-lam)
    assert brentq(g, -1.99, -0.01, xtol=1e-15) == pytest.approx(LAMBDA0_WELL, abs=1e-14)


def test_square_well_ground_state(well):
    states = bound_states(well)
    assert len(states) == 1
    s = states[0]
    assert s.lambda0 == pytest.approx(LAMBDA0_WELL, abs=1e-10)
    assert s.norm_check == pytest.approx(1.0, abs=1e-10)
    # even state: equal tails and no first-order Stark shift
    assert s.kappa_plus == pytest.approx(s.kappa_minus, rel=1e-10)
    assert abs(s.lambda1) < 1e-10
    assert s.kappa_minus > 0


def test_deeper_well_has_two_states():
    states = bound_states(square_well(-6.0, 1.0))
    assert len(states) == 2
    assert states[0].lambda0 < states[1].lambda0 < 0
    # the odd state changes sign
    assert states[1].kappa_plus == pytest.approx(-states[1].kappa_minus, rel=1e-8)


def test_overlap_identity(well):
    s = bound_states(well)[0]
    assert s.overlap == pytest.approx(-2 * s.kappa_minus * s.kappa, rel=1e-9)


def test_asymmetric_well_first_order_shift():
    p = parse_potential({"segments": [[-1, 0, -3], [0, 1, -1]]})
    s = bound_states(p)[0]
    # lambda1 = d lambda / d f of the truncated-field problem, by central differences;
    # the field -h on V equals the field +h on the mirrored potential
    h, R = 1e-4, 12.0
    up = eigenvalue_with_field(p, s.lambda0, h, R)
    dn = eigenvalue_with_field(p.mirrored(), s.lambda0, h, R)
    assert s.lambda1 == pytest.approx((up - dn) / (2 * h), rel=1e-5)
    assert s.lambda1 < 0


def test_no_bound_states_for_barrier(barrier, bump):
    assert bound_states(barrier) == []
    assert bound_states(bump) == []


def test_width_forms_agree(well):
    s = bound_states(well)[0]
    w1, w2 = predicted_width_forms(s, 0.2)
    assert w1 == pytest.approx(w2, rel=1e-9)
    assert predicted_width(s, 0.2) == w1
    assert predicted_width(s, 0.1) < 1e-7 < predicted_width(s, 0.3)


def test_width_domain(well):
    s = bound_states(well)[0]
    with pytest.raises(WidthDomainError):
        predicted_width(s, 0.0)
