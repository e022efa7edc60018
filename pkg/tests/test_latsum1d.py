import numpy as np
import pytest
from frozen_values import FROZEN
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from latticetopo.errors import DomainError, ResonanceError
from latticetopo.greens import green_scalar
from latticetopo.latsum1d import (
    Sum1DArgs,
    light_line_distance_1d,
    oracle_direct_1d,
    oracle_extrapolated_1d,
    reduce_beta_1d,
    s0_1d,
    s1_plus,
    s2_plus,
    s3_plus,
    s_pm_1d,
)
from latticetopo.validation import light_line_jump_1d


def test_static_part_reference():
    assert abs(s1_plus(2.4, 0.25, 0.2) - FROZEN["s1_0.25_0.2"]) < 1e-8


def test_bracket_part_reference():
    assert abs(s2_plus(2.4, 0.25, 0.2) - FROZEN["s2_2.4_0.25_0.2"]) < 1e-7


def test_far_part_reference():
    assert abs(s3_plus(2.4, 0.25, 0.2) - FROZEN["s3_2.4_0.25_0.2"]) < 1e-7


def test_full_sums_reference():
    assert abs(s_pm_1d(2.4, 0.25, 0.2) - FROZEN["S+_2.4_0.25_0.2"]) < 1e-6
    assert abs(s_pm_1d(2.4, 0.25, 0.2, -1) - FROZEN["S+_2.4_-0.25_0.2"]) < 1e-6
    assert abs(s0_1d(2.4, 0.25) - FROZEN["S0_2.4_0.25"]) < 1e-6


def test_complex_alpha_reference():
    # far part continued through mpmath's Lerch function
    assert abs(s_pm_1d(2.4 - 0.3j, 0.25, 0.2) - FROZEN["S+_cplx_0.25_0.2"]) < 1e-9
    assert abs(s0_1d(2.4 - 0.3j, 0.25) - FROZEN["S0_cplx_0.25"]) < 1e-9


def test_bracket_swaps_under_beta_reversal():
    # the two Lerch terms exchange roles; compare with the direct reflection n -> -n, delta -> 1 - delta
    lhs = s2_plus(2.4, -0.25, 0.2)
    rhs = np.exp(-2j * np.pi * 0.25) * s2_plus(2.4, 0.25, 0.8)
    assert abs(lhs - rhs) < 1e-11


def test_continuity_at_zone_edge():
    a = s_pm_1d(2.4, 0.5 - 1e-3, 0.5).real
    b = s_pm_1d(2.4, 0.5, 0.5).real
    assert abs(a - b) < 1e-2


def test_coincident_limit_is_linear_in_delta():
    # S+(delta) - G(delta) -> S0 with an O(delta) remainder of slope about 62 at (2.4, 0.25)
    def gap(d):
        return s_pm_1d(2.4, 0.25, d) - green_scalar(d, 2 * np.pi * 2.4) - s0_1d(2.4, 0.25)

    g4, g5 = gap(1e-4), gap(1e-5)
    assert abs(g5) < 1e-3
    assert abs(g4 / g5 - 10) < 0.05
    # the remainder is physical: the direct sum carries the same value
    ref = oracle_extrapolated_1d(2.4, 0.25, 1e-4) - green_scalar(1e-4, 2 * np.pi * 2.4) - s0_1d(2.4, 0.25)
    assert abs(g4 - ref) < 1e-7


def test_oracle_short_ladder_residual():
    val = oracle_extrapolated_1d(2.4, 0.25, 0.2, eps_seq=[0.02, 0.01, 0.005])
    assert abs(val - s_pm_1d(2.4, 0.25, 0.2)) < 1e-6


def test_oracle_cutoff_doubling():
    a = oracle_direct_1d(2.4, 0.25, 0.2, 100_000, 0.005)
    b = oracle_direct_1d(2.4, 0.25, 0.2, 200_000, 0.005)
    assert abs(a.value - b.value) < 1e-8
    assert a.tail_bound < 1e-8


def test_oracle_domain():
    with pytest.raises(DomainError):
        oracle_direct_1d(2.4, 0.25, 0.2, 10, 0.01)
    with pytest.raises(DomainError):
        oracle_direct_1d(2.4, 0.25, 0.2, 5000, 0.0)
    with pytest.raises(ResonanceError):
        oracle_extrapolated_1d(2.4, 0.4, 0.2)


def test_resonance_and_domain_errors():
    with pytest.raises(ResonanceError):
        s0_1d(2.4, 0.4)
    with pytest.raises(ResonanceError):
        s_pm_1d(2.4, -0.4, 0.3)
    with pytest.raises(DomainError):
        Sum1DArgs(2.4, 0.7, 0.2)
    with pytest.raises(DomainError):
        s_pm_1d(2.4, 0.1, 1.0)
    with pytest.raises(DomainError):
        s_pm_1d(2.4, 0.1, 1e-7)
    with pytest.raises(DomainError):
        s_pm_1d(2.4, 0.1, 0.3, sign=0)


def test_static_limit_alpha_zero():
    b = 0.3
    assert s0_1d(0.0, b) == pytest.approx(b * b - b + 1 / 6, rel=1e-14)


def test_light_line_jump_pilot():
    # pilot run: the jump is 7.54 against a subradiant-side variation at the rounding level
    jump, var = light_line_jump_1d()
    assert jump > 10 * var
    assert jump == pytest.approx(7.54, rel=1e-3)


def test_reduce_beta():
    assert reduce_beta_1d(0.7) == pytest.approx(-0.3)
    assert reduce_beta_1d(-0.5) == -0.5


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------

alphas = st.builds(complex, st.floats(0.3, 2.8), st.floats(-0.3, 0.0))


@settings(max_examples=50, deadline=None)
@given(alphas, st.floats(-0.5, 0.5), st.floats(0.05, 0.95))
def test_inversion(alpha, beta, delta):
    assume(light_line_distance_1d(alpha, beta) > 1e-3)
    assert abs(s_pm_1d(alpha, beta, delta, 1) - s_pm_1d(alpha, -beta, delta, -1)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(alphas, st.floats(-0.5, 0.5), st.floats(0.05, 0.95), st.sampled_from([1, -1]))
def test_periodicity(alpha, beta, delta, sign):
    assume(light_line_distance_1d(alpha, beta) > 1e-3)
    assert abs(s_pm_1d(alpha, beta + 1, delta, sign) - s_pm_1d(alpha, beta, delta, sign)) < 1e-12
    assert abs(s0_1d(alpha, beta - 1) - s0_1d(alpha, beta)) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 2.8), st.floats(-0.45, 0.45), st.floats(0.1, 0.9))
def test_oracle_agreement_random(alpha, beta, delta):
    assume(light_line_distance_1d(alpha, beta) > 0.05)
    ref = oracle_extrapolated_1d(alpha, beta, delta)
    assert abs(s_pm_1d(alpha, beta, delta) - ref) < 1e-6 * max(1.0, abs(ref))


def test_cut_takes_guided_side_limit():
    # at Im alpha < 0 the light line Re alpha - beta = m is a cut; the value there is the |beta| -> + limit
    al = 2.4 - 0.36j
    for f in (lambda b: s_pm_1d(al, b, 0.2), lambda b: s0_1d(al, b)):
        on, guided, radiating = f(0.4), f(0.4 + 1e-9), f(0.4 - 1e-9)
        assert abs(on - guided) < 1e-6
        assert abs(on - radiating) > 1.0
