import warnings

import numpy as np
import pytest
from frozen_values import FROZEN
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetopo.bloch import (
    FixedPoint,
    HVector,
    LatticeParams,
    alpha_bar,
    band_grid,
    band_path,
    bands,
    eigvecs,
    h_vector,
    h_vectors,
    haldane_terms,
    light_line_flag,
    worker_count,
)
from latticetopo.errors import DegeneracyError, DomainError
from latticetopo.latsum2d import HONEYCOMB

P1 = LatticeParams()
P2 = LatticeParams(dim=2)


def test_bands_reference_default():
    b = bands(P1, 0.25)
    assert abs(b.alpha_plus - FROZEN["bands1d_0.2_0.25_plus"]) < 1e-6
    assert abs(b.alpha_minus - FROZEN["bands1d_0.2_0.25_minus"]) < 1e-6


def test_bands_reference_asymmetric():
    p = LatticeParams(alpha_a=2.45, alpha_b=2.4, kappa_a=0.012, kappa_b=0.01, delta=0.3)
    b = bands(p, 0.1)
    got = {b.alpha_plus, b.alpha_minus}
    for key in ("bands1d_asym_plus", "bands1d_asym_minus"):
        assert min(abs(g - FROZEN[key]) for g in got) < 1e-6


def test_alpha_bar():
    assert alpha_bar(P1) == pytest.approx(2.4 - 1j * np.pi * 0.02 * 4.8**2 / 4)


def test_hvector_matrix_eigenvalues():
    h = h_vector(P1, 0.1)
    ev = np.linalg.eigvals(h.matrix())
    b = bands(P1, 0.1)
    assert np.allclose(sorted(ev, key=lambda z: z.real), sorted([b.alpha_plus, b.alpha_minus], key=lambda z: z.real))


def test_eigvecs_biorthonormal():
    b = bands(P1, 0.13)
    m = h_vector(P1, 0.13).matrix()
    assert np.allclose(m @ b.right_plus, b.alpha_plus * b.right_plus)
    assert np.allclose(b.left_plus @ m, b.alpha_plus * b.left_plus)
    assert abs(b.left_plus @ b.right_plus - 1) < 1e-12
    assert abs(b.left_plus @ b.right_minus) < 1e-12
    with pytest.raises(DegeneracyError):
        eigvecs(HVector(1.0, 0.0, 0.0, 0.0))


def test_eigvecs_alternate_gauge():
    # h1 = h2 = 0 with h3 < 0 makes the first normalization vanish for one band
    h = HVector(0.0, 0.0, 0.0, -1.0)
    rp, rm, lp, lm = eigvecs(h)
    assert np.allclose(h.matrix() @ rp, rp)
    assert abs(lp @ rp - 1) < 1e-14


def test_spectrum_symmetric_under_beta_reversal():
    for b in (0.1, 0.3, 0.45):
        p, m = bands(P1, b), bands(P1, -b)
        assert np.allclose(sorted([p.alpha_plus, p.alpha_minus], key=abs),
                           sorted([m.alpha_plus, m.alpha_minus], key=abs), atol=1e-12)


def test_dirac_point_gap_closes_without_haldane():
    b = bands(P2, HONEYCOMB.K)
    assert abs(b.alpha_plus - b.alpha_minus) < 1e-9
    assert b.right_plus is None


def test_haldane_opens_gap():
    b = bands(P2.replace(t2=5e-3, phi=np.pi / 2), HONEYCOMB.K)
    assert abs(b.alpha_plus - b.alpha_minus) > 1e-2
    dh0, dh3 = haldane_terms(P2.replace(t2=5e-3, phi=np.pi / 2), HONEYCOMB.K)
    assert abs(dh0) < 1e-15
    assert abs(dh3) == pytest.approx(3 * np.sqrt(3) * 5e-3)


def test_fixed_point_refinement_is_self_consistent():
    b = bands(P1, 0.25, refine=FixedPoint())
    h = h_vector(P1, 0.25, b.alpha_plus)
    assert abs(h.h0 + h.norm - b.alpha_plus) < 1e-10
    lin = bands(P1, 0.25)
    # the nonlinear shift is of the order of the coupling (about 0.011 here)
    assert abs(b.alpha_plus - lin.alpha_plus) < 5 * (P1.kappa_a + P1.kappa_b)


def test_light_line_flag():
    assert light_line_flag(P1, 0.1) == 1
    assert light_line_flag(P1, 0.45) == 0
    assert light_line_flag(P1, 0.4) == 0
    assert light_line_flag(P2, np.zeros(2)) == 19


def test_band_grid_and_path_shapes():
    pts = band_grid(P1, 10)
    assert len(pts) == 10 and pts[0].beta == -0.5
    s, betas, path = band_path(P1, 5)
    assert len(s) == len(betas) == len(path) == 21
    s2, b2, path2 = band_path(P2, 3)
    assert len(path2) == 4 * 3 + 1
    assert np.all(np.diff(s2) > 0)
    with pytest.raises(DomainError):
        band_grid(P1, 0)
    with pytest.raises(DomainError):
        band_path(P1, 0)


def test_band_grid_through_light_line():
    # beta = 0.4 sits on the light line of Re alpha_bar = 2.4; the guided-side value is used
    pts = band_grid(P1, 10)
    p = pts[9]
    assert p.beta == pytest.approx(0.4)
    q = bands(P1, 0.4 + 1e-9)
    assert abs(p.alpha_plus - q.alpha_plus) < 1e-6 or abs(p.alpha_plus - q.alpha_minus) < 1e-6


def test_tracking_is_continuous():
    pts = band_grid(P1, 60, track=True)
    ap = np.array([p.alpha_plus for p in pts])
    plain = np.array([p.alpha_plus for p in band_grid(P1, 60)])
    assert np.max(np.abs(np.diff(ap))) <= np.max(np.abs(np.diff(plain))) + 1e-12


def test_threads_do_not_change_values(monkeypatch):
    betas = np.linspace(-0.45, 0.45, 20)
    a = h_vectors(P1, betas, workers=1)
    b = h_vectors(P1, betas, workers=4)
    assert np.array_equal(a, b)
    monkeypatch.setenv("LATTICETOPO_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.setenv("LATTICETOPO_THREADS", "many")
    with pytest.raises(DomainError):
        worker_count()


def test_parameter_validation():
    with pytest.raises(DomainError):
        LatticeParams(kappa_a=-0.1)
    with pytest.raises(DomainError):
        LatticeParams(dim=3)
    with pytest.raises(DomainError):
        LatticeParams(delta=1.0)
    with pytest.raises(DomainError):
        LatticeParams(t2=1e-3)
    with pytest.raises(DomainError):
        h_vector(P1, 0.7)
    with pytest.warns(UserWarning):
        LatticeParams(kappa_a=0.2)
    with pytest.warns(UserWarning):
        LatticeParams(alpha_a=3.0, alpha_b=2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        LatticeParams()


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.49, 0.49), st.floats(0.05, 0.95))
def test_trace_and_determinant(beta, delta):
    p = P1.replace(delta=delta)
    h = h_vector(p, beta)
    b = bands(p, beta)
    m = h.matrix()
    assert abs(b.alpha_plus + b.alpha_minus - np.trace(m)) < 1e-12
    assert abs(b.alpha_plus * b.alpha_minus - np.linalg.det(m)) < 1e-10

