"""Acceptance criteria A1-A9 at their stated tolerances, one report line each."""
import pytest

from starkres.verification import (check_a1, check_a2, check_a3_a9, check_a4, check_a5,
                                   check_a6, check_a7, check_a8, corpus,
                                   square_well_ground_state)

C = corpus()


@pytest.fixture(scope="module")
def strings():
    return check_a3_a9(C["square_barrier"], (0.2, 0.1, 0.05))


def report(capsys, result):
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.passed, result.measured


def test_a1_airy_accuracy(capsys):
    report(capsys, check_a1(n=200))


def test_a2_free_stark_null(capsys):
    report(capsys, check_a2(fs=(0.5, 0.1)))


def test_a3_positive_axis_strings(capsys, strings):
    report(capsys, strings[0])


def test_a4_line_strings(capsys):
    report(capsys, check_a4(C["square_barrier"], (0.2, 0.1, 0.05)))


def test_a5_bound_state_widths(capsys):
    report(capsys, check_a5(C["square_well"], (0.3, 0.2, 0.15),
                            oracle=square_well_ground_state(-2.0, 1.0)))


def test_a6_reflection_zero_limit(capsys):
    report(capsys, check_a6(C["double_bump"], f=0.1))


def test_a7_resonance_free_regions(capsys):
    report(capsys, check_a7({"square_well": C["square_well"]}, f=0.05, delta=0.2, C0=10))


def test_a8_unitarity(capsys):
    report(capsys, check_a8(C, n=200))


def test_a9_g_approx_bound(capsys, strings):
    report(capsys, strings[1])
