import numpy as np
import pytest
from frozen_values import FROZEN
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetopo.errors import DomainError
from latticetopo.greens import GreenArgs, green_far, green_near, green_scalar


def test_reference_value():
    # closed form with E1 on the imaginary axis taken from sine/cosine integrals
    assert abs(green_scalar(1.0, 2 * np.pi * 2.4) - FROZEN["G_1_2.4"]) < 1e-8


def test_static_limit():
    r = 1.3
    assert green_scalar(r, 0.0) == pytest.approx(1 / (2 * np.pi**2 * r**2), rel=1e-15)


def test_far_field_dominates():
    k, r = 50.0, 10.0
    ratio = green_scalar(r, k) / (k * np.exp(1j * k * r) / (2 * np.pi * r))
    assert abs(ratio - 1) < 1e-2


def test_accepts_args_and_arrays():
    r = np.array([0.5, 1.0, 2.0])
    vec = green_scalar(r, 3.0)
    assert vec.shape == (3,)
    assert vec[1] == pytest.approx(green_scalar(GreenArgs(1.0, 3.0)), rel=1e-15)
    assert green_near(1.0, 3.0) + green_far(1.0, 3.0) == pytest.approx(vec[1], rel=1e-15)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_domain(r):
    with pytest.raises(DomainError):
        green_scalar(r, 1.0)
    with pytest.raises(DomainError):
        GreenArgs(r, 1.0)


def test_imaginary_part_sign_follows_sin_kr():
    # Im G = k sin(kr) / (2 pi r): positive only while sin(kr) > 0
    k = 2 * np.pi * 2.4
    r = np.linspace(0.05, 3.0, 20)
    im = np.imag(green_scalar(r, k))
    assert np.allclose(im, k * np.sin(k * r) / (2 * np.pi * r), rtol=1e-12, atol=1e-13)
    assert np.any(im < 0)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.01, 40.0))
def test_imaginary_part_identity(r, k):
    g = green_scalar(r, k)
    assert abs(g.imag - k * np.sin(k * r) / (2 * np.pi * r)) <= 1e-11 * (1 + abs(g))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.5, 30.0))
def test_continuity_in_k(r, k):
    d1 = abs(green_scalar(r, k + 1e-4) - green_scalar(r, k))
    d2 = abs(green_scalar(r, k + 2e-4) - green_scalar(r, k))
    # linear in eps with a finite slope
    assert d1 < 1e-4 * (10 + 10 * k) / r**2
    assert d2 == pytest.approx(2 * d1, rel=1e-2, abs=1e-12)
