import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetopo.bloch import LatticeParams, h_vector
from latticetopo.diracedge import (
    MassProfile,
    default_delta_profile,
    dirac_params_1d,
    dirac_params_2d,
    directional_fermi_velocity,
    edge_packet_2d,
    edge_state_1d,
    localized_count_1d,
    packet_quadrature,
    tanh_mass,
    transverse_profile_check,
)
from latticetopo.errors import DomainError, NonChiralError
from latticetopo.latsum2d import HONEYCOMB

P1 = LatticeParams()
P2 = LatticeParams(dim=2)


def test_fermi_velocity_stable_in_step():
    a = dirac_params_1d(P1.replace(delta=0.45))
    b = dirac_params_1d(P1.replace(delta=0.45), h=2e-4)
    assert abs(a.v_f - b.v_f) < 1e-7 * abs(a.v_f)
    assert abs(a.v_f - a.v_f_order2) < 1e-4 * abs(a.v_f)


def test_dirac_mass_is_minus_h1_at_zone_edge():
    p = P1.replace(delta=0.45)
    d = dirac_params_1d(p)
    h = h_vector(p, 0.5)
    assert d.m == -h.h1 and d.eps == h.h3 == 0


def test_mass_changes_sign_at_half():
    lo = dirac_params_1d(P1.replace(delta=0.48), alpha_eval=2.4)
    hi = dirac_params_1d(P1.replace(delta=0.52), alpha_eval=2.4)
    assert np.sign((lo.m / lo.v_f).real) == -np.sign((hi.m / hi.v_f).real)


def test_edge_state_sublattice_polarized():
    st = edge_state_1d(P1, alpha_eval=2.4)
    assert np.max(np.abs(st.psi[1])) == 0.0
    assert st.psi[0][np.flatnonzero(st.x == 0)[0]] == 1.0
    assert np.allclose(st.delta_x, default_delta_profile(st.x))


def test_real_energy_edge_state_is_localized():
    st = edge_state_1d(P1, alpha_eval=2.4)
    a = np.abs(st.psi[0])
    i0 = int(np.flatnonzero(st.x == 0)[0])
    assert localized_count_1d(st) == 1
    # |m / v_F| ~ 0.06 for a 0.02 offset, so over 10 units the decay is only about e^{-0.6}
    assert np.all(np.diff(a[:i0 + 1]) > 0) and np.all(np.diff(a[i0:]) < 0)
    assert 1.5 < a[i0] / a[0] < 2.0 and 1.5 < a[i0] / a[-1] < 2.0


def test_edge_grid_inserts_origin():
    st = edge_state_1d(P1, x_grid=np.linspace(-3.05, 3.05, 62), alpha_eval=2.4)
    assert 0.0 in st.x and len(st.x) == 63


def test_edge_errors():
    with pytest.raises(DomainError):
        edge_state_1d(P2)
    with pytest.raises(DomainError):
        edge_state_1d(P1, x_grid=[1.0, 0.0])
    with pytest.raises(DomainError):
        edge_state_1d(P1, delta_profile=lambda x: 1.5)
    with pytest.raises(NonChiralError):
        edge_state_1d(P1.replace(alpha_a=2.45), x_grid=np.linspace(-1, 1, 5))


def test_dirac_2d_isotropic_and_valley_symmetric():
    d = dirac_params_2d(P2)
    assert d.anisotropy < 1e-6
    assert abs(abs(d.v_f_kprime) - abs(d.v_f)) < 1e-6 * abs(d.v_f)
    v = directional_fermi_velocity(P2, np.radians([0, 45, 120]))
    assert np.max(np.abs(v - d.v_f)) < 1e-6 * abs(d.v_f)


def test_dirac_2d_masses_follow_haldane():
    d = dirac_params_2d(P2.replace(t2=5e-3, phi=np.pi / 2))
    assert abs(d.m_k + d.m_kprime) < 1e-12
    assert abs(abs(d.m_k) - 3 * np.sqrt(3) * 5e-3) < 1e-12
    with pytest.raises(DomainError):
        dirac_params_2d(P1)


def test_transverse_profile_admits_one_state():
    d = dirac_params_2d(P2)
    rep = transverse_profile_check(tanh_mass(5e-3, 0.1), d.v_f)
    assert rep.count == 1
    flipped = transverse_profile_check(tanh_mass(-5e-3, 0.1), d.v_f)
    assert flipped.count == 1 and flipped.admissible_signs == tuple(-s for s in rep.admissible_signs)
    flat = transverse_profile_check(MassProfile(lambda y: 5e-3 + 0 * y), d.v_f)
    assert flat.count == 0
    with pytest.raises(DomainError):
        tanh_mass(5e-3, 0.0)


def test_packet_matches_quadrature_and_moves():
    d = dirac_params_2d(P2)
    mass = tanh_mass(5e-3, 0.1)
    times = np.array([0.0, 5.0, 10.0])
    pk = edge_packet_2d(mass, d.v_f, d.alpha0, 0.5, times, y=np.linspace(-1, 1, 21))
    assert pk.psi.shape == (3, 401, 21, 2)
    assert np.max(pk.abs()[0]) == pytest.approx(1.0)
    for k, ix, iy in ((0, 200, 10), (1, 180, 3), (2, 150, 15)):
        ref = packet_quadrature(mass, d.v_f, d.alpha0, 0.5, pk.x[ix], pk.y[iy], times[k], pk.norm)
        assert np.max(np.abs(pk.psi[k, ix, iy] - ref)) < 1e-8
    peaks = [pk.x[np.argmax(a.max(axis=1))] for a in pk.abs()]
    dx = pk.x[1] - pk.x[0]
    assert np.all(np.abs(np.array(peaks) + d.v_f.real * times) <= dx)
    with pytest.raises(DomainError):
        edge_packet_2d(mass, d.v_f, d.alpha0, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 2e-2), st.floats(0.05, 0.5), st.floats(-1.0, 1.0))
def test_transverse_exponent_symmetric(t2, y0, y):
    # tanh is odd, so F(y) = int_0^y m / v is even and the single admissible profile decays both ways
    mass = tanh_mass(t2, y0)
    rep = transverse_profile_check(mass, 1.0, window=(-abs(y) - 0.01, abs(y) + 0.01))
    assert abs(rep.exponent_left - rep.exponent_right) < 1e-12
    assert rep.count == 1 and rep.admissible_signs == (1,)
