"""Low-energy Dirac parameters, domain-wall edge states and chiral edge packets.

1D: H(1/2 + q) ~ h0 + h1 sigma_x + q h2' sigma_y + h3 sigma_z gives the Dirac
equation (v_F d/dx + m sigma_z + eps sigma_x) psi = 0 with v_F = h2'(1/2),
m = -h1(1/2), eps = h3(1/2).

2D: near K, H ~ alpha0 - v_F q_y sigma_x + v_F q_x sigma_y + m_K sigma_z; a mass
wall m(y) binds one chiral mode psi ~ e^{-int_0^y m/v_F} e^{-i alpha0 tau} g(x + v_F tau) (1, -i).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .bloch import LatticeParams, alpha_bar, h_vectors
from .errors import ConvergenceError, DomainError, NonChiralError
from .latsum2d import HONEYCOMB
from .topology import dirac_masses

__all__ = [
    "DiracParams1D",
    "DiracParams2D",
    "MassProfile",
    "EdgeState1D",
    "PacketField",
    "TransverseReport",
    "tanh_mass",
    "default_delta_profile",
    "dirac_params_1d",
    "edge_state_1d",
    "localized_count_1d",
    "dirac_params_2d",
    "directional_fermi_velocity",
    "edge_packet_2d",
    "packet_quadrature",
    "transverse_profile_check",
]

FD_STEP = 1e-4
CHIRAL_TOL = 1e-8


@dataclass(frozen=True)
class DiracParams1D:
    v_f: complex
    m: complex
    eps: complex
    beta0: float = 0.5
    v_f_order2: complex = 0j  # plain central difference at step h/2, for the stability check


@dataclass(frozen=True)
class DiracParams2D:
    alpha0: complex
    v_f: complex
    m_k: complex
    m_kprime: complex
    anisotropy: float
    jacobian_k: np.ndarray = field(repr=False)  # [[dh1/dqx, dh1/dqy], [dh2/dqx, dh2/dqy]]
    jacobian_kprime: np.ndarray = field(repr=False)
    v_f_kprime: complex = 0j


@dataclass(frozen=True)
class MassProfile:
    """Position-dependent Dirac mass y -> m(y)."""

    func: Callable[[float], complex]
    description: str = ""

    def __call__(self, y):
        return self.func(y)


def tanh_mass(t2: float = 5e-3, y0: float = 0.1) -> MassProfile:
    """m(y) = t2 tanh(y / y0)."""
    if y0 <= 0:
        raise DomainError("y0 must be positive")
    return MassProfile(lambda y: t2 * np.tanh(np.asarray(y) / y0), f"{t2} tanh(y/{y0})")


def default_delta_profile(x):
    """delta(x) = 0.02 tanh(x) + 0.5."""
    return 0.02 * np.tanh(x) + 0.5


def _richardson(fp2, fm2, fp1, fm1, h):
    # central differences at steps h and h/2 combined to fourth order
    d_h = (fp1 - fm1) / (2 * h)
    d_h2 = (fp2 - fm2) / h
    return (4 * d_h2 - d_h) / 3, d_h2


# ---------------------------------------------------------------------------
# 1D
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _dirac_1d_cached(params: LatticeParams, alpha_eval, h: float) -> DiracParams1D:
    b0 = 0.5
    betas = np.array([b0, b0 + h / 2, b0 - h / 2, b0 + h, b0 - h])
    hv = h_vectors(params, betas, alpha_eval, workers=1)
    v4, v2 = _richardson(hv[2, 1], hv[2, 2], hv[2, 3], hv[2, 4], h)
    if not np.isfinite(v4) or abs(v4 - v2) > 1e-4 * max(abs(v4), 1e-300):
        raise ConvergenceError(f"Fermi velocity differentiation unstable at delta={params.delta}")
    return DiracParams1D(complex(v4), complex(-hv[1, 0]), complex(hv[3, 0]), b0, complex(v2))


def dirac_params_1d(params: LatticeParams, alpha_eval=None, h: float = FD_STEP) -> DiracParams1D:
    """v_F = h2'(1/2) (Richardson-extrapolated central differences), m = -h1(1/2), eps = h3(1/2)."""
    if params.dim != 1:
        raise DomainError("dirac_params_1d needs dim=1")
    ae = None if alpha_eval is None else complex(alpha_eval)
    return _dirac_1d_cached(params, ae, float(h))


@dataclass(frozen=True)
class EdgeState1D:
    x: np.ndarray
    delta_x: np.ndarray
    psi: np.ndarray  # shape (2, N)
    exponent: np.ndarray  # I(x) = int_0^x m/v_F


def _exponent_from_zero(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    # I(x) = int_0^x g by composite Simpson, starting at the grid point x = 0
    def cum(gg, xx):
        return (integrate.cumulative_simpson(gg.real, x=xx, initial=0)
                + 1j * integrate.cumulative_simpson(gg.imag, x=xx, initial=0))

    i0 = int(np.flatnonzero(x == 0.0)[0])
    out = np.zeros(len(x), dtype=complex)
    if i0 < len(x) - 1:
        out[i0:] = cum(g[i0:], x[i0:])
    if i0 > 0:
        # int_0^x g = -int_0^{|x|} g(-u) du on the mirrored (increasing) grid
        out[: i0 + 1] = -cum(g[i0::-1], -x[i0::-1])[::-1]
    return out


def edge_state_1d(params: LatticeParams, delta_profile: Callable | None = None, x_grid=None,
                  bc=(1.0, 0.0), alpha_eval=None) -> EdgeState1D:
    """psi(x) = exp(-sigma_z int_0^x m(y)/v_F(y) dy) psi(0) for a slowly varying delta(x).

    m and v_F are the bulk Dirac parameters at the local delta(x). x_grid must
    be increasing; x = 0 is inserted if absent.
    """
    if params.dim != 1:
        raise DomainError("edge_state_1d needs dim=1")
    profile = default_delta_profile if delta_profile is None else delta_profile
    x = np.linspace(-10.0, 10.0, 401) if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise DomainError("x_grid must be strictly increasing")
    if not np.any(x == 0.0):
        x = np.sort(np.append(x, 0.0))
    deltas = np.asarray([float(profile(xi)) for xi in x])
    if np.any((deltas <= 0) | (deltas >= 1)) or not np.all(np.isfinite(deltas)):
        raise DomainError("delta(x) must stay inside (0, 1)")
    ratio = np.empty(len(x), dtype=complex)
    for i, d in enumerate(deltas):
        dp = dirac_params_1d(params.replace(delta=float(d)), alpha_eval)
        if abs(dp.eps) > CHIRAL_TOL:
            raise NonChiralError(f"eps = {dp.eps:.3g} at delta={d}: the closed-form solution needs chiral symmetry")
        ratio[i] = dp.m / dp.v_f
    expo = _exponent_from_zero(x, ratio)
    bc = np.asarray(bc, dtype=complex)
    psi = np.stack([np.exp(-expo) * bc[0], np.exp(expo) * bc[1]])
    if not np.all(np.isfinite(psi)):
        raise ConvergenceError("edge-state solution overflowed on the grid")
    return EdgeState1D(x, deltas, psi, expo)


def _count_admissible(left_exponent: complex, right_exponent: complex, tol: float = 1e-9):
    # candidate e^{-s I}: decays towards both ends iff s Re I > 0 at both ends
    signs = [s for s in (1, -1) if s * left_exponent.real > tol and s * right_exponent.real > tol]
    return signs


def localized_count_1d(state: EdgeState1D) -> int:
    """Number of sublattice-polarized solutions e^{-+I(x)} decaying towards both window edges."""
    return len(_count_admissible(state.exponent[0], state.exponent[-1]))


# ---------------------------------------------------------------------------
# 2D
# ---------------------------------------------------------------------------


def _jacobian(hv_block: np.ndarray, h: float) -> np.ndarray:
    # hv_block columns: +x h/2, -x h/2, +x h, -x h, +y h/2, -y h/2, +y h, -y h
    jac = np.empty((2, 2), dtype=complex)
    for comp, row in ((1, 0), (2, 1)):
        f = hv_block[comp]
        jac[row, 0] = _richardson(f[0], f[1], f[2], f[3], h)[0]
        jac[row, 1] = _richardson(f[4], f[5], f[6], f[7], h)[0]
    return jac


def _stencil(center: np.ndarray, h: float) -> np.ndarray:
    ex, ey = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    pts = []
    for e in (ex, ey):
        for step in (h / 2, -h / 2, h, -h):
            pts.append(center + step * e)
    return np.array(pts)


def dirac_params_2d(params: LatticeParams, alpha_eval=None, h: float = FD_STEP) -> DiracParams2D:
    """alpha0 = h0(K), v_F = dh2/dq_x at K, masses at K and K', anisotropy ratio."""
    if params.dim != 2:
        raise DomainError("dirac_params_2d needs dim=2")
    g = HONEYCOMB
    pts = np.vstack([g.K[None, :], _stencil(g.K, h), _stencil(g.Kprime, h)])
    hv = h_vectors(params, pts, alpha_eval)
    jk = _jacobian(hv[:, 1:9], h)
    jkp = _jacobian(hv[:, 9:17], h)
    v_f = jk[1, 0]
    aniso = max(abs(jk[0, 0]), abs(jk[1, 1]), abs(jk[0, 1] + jk[1, 0])) / abs(v_f)
    if alpha_eval is None:
        m_k, m_kp = dirac_masses(params)
    else:
        # masses are h3 at K, K'
        hk = h_vectors(params, np.array([g.K, g.Kprime]), alpha_eval)
        m_k, m_kp = complex(hk[3, 0]), complex(hk[3, 1])
    return DiracParams2D(complex(hv[0, 0]), complex(v_f), m_k, m_kp, float(aniso), jk, jkp, complex(jkp[1, 0]))


def directional_fermi_velocity(params: LatticeParams, thetas, alpha_eval=None, h: float = FD_STEP,
                               reference: complex | None = None) -> np.ndarray:
    """v_F(theta) = sqrt((dh1/ds)^2 + (dh2/ds)^2) along q = s (cos theta, sin theta) at K.

    The root is chosen closest to reference (default: dh2/dq_x from the same stencil at theta = 0).
    """
    g = HONEYCOMB
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    pts = []
    for t in np.append(thetas, 0.0):
        e = np.array([np.cos(t), np.sin(t)])
        for step in (h / 2, -h / 2, h, -h):
            pts.append(g.K + step * e)
    hv = h_vectors(params, np.array(pts), alpha_eval)
    out = np.empty(len(thetas), dtype=complex)
    for i in range(len(thetas)):
        c = hv[:, 4 * i: 4 * i + 4]
        d1 = _richardson(c[1, 0], c[1, 1], c[1, 2], c[1, 3], h)[0]
        d2 = _richardson(c[2, 0], c[2, 1], c[2, 2], c[2, 3], h)[0]
        out[i] = np.sqrt(d1 * d1 + d2 * d2 + 0j)
    c0 = hv[:, -4:]
    ref = _richardson(c0[2, 0], c0[2, 1], c0[2, 2], c0[2, 3], h)[0] if reference is None else reference
    out = np.where(np.abs(out - ref) <= np.abs(out + ref), out, -out)
    return out


@dataclass(frozen=True)
class TransverseReport:
    count: int
    admissible_signs: tuple
    exponent_left: complex
    exponent_right: complex


def _transverse_exponent(mass: MassProfile, v_f: complex, y: float) -> complex:
    # F(y) = int_0^y m(z)/v_F dz
    if y == 0:
        return 0j
    # quad(complex_func=True) drops the orientation of reversed limits, so integrate upwards
    lo, hi, sgn = (0.0, y, 1.0) if y > 0 else (y, 0.0, -1.0)
    val, err = integrate.quad(lambda z: complex(mass(z)), lo, hi, complex_func=True, epsabs=1e-14, epsrel=1e-12, limit=200)
    if not np.isfinite(val):
        raise ConvergenceError("transverse quadrature failed")
    return sgn * complex(val) / v_f


def transverse_profile_check(mass: MassProfile, v_f, window=(-1.0, 1.0)) -> TransverseReport:
    """Count the solutions f = e^{-+F(y)} that decay towards both window edges."""
    v_f = complex(v_f)
    left = _transverse_exponent(mass, v_f, float(window[0]))
    right = _transverse_exponent(mass, v_f, float(window[1]))
    signs = _count_admissible(left, right)
    return TransverseReport(len(signs), tuple(signs), left, right)


@dataclass(frozen=True)
class PacketField:
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray  # shape (T, Nx, Ny, 2)
    norm: float

    def abs(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.psi) ** 2, axis=-1))


def _packet_unnormalized(f_y, v_f, alpha0, x0, tau, x):
    # closed form of int dq e^{i q (x + v tau) - q^2 x0^2/4} = (2 sqrt(pi)/x0) e^{-(x + v tau)^2/x0^2}
    gx = 2 * np.sqrt(np.pi) / x0 * np.exp(-((x + v_f * tau) ** 2) / x0**2)
    return np.exp(-1j * alpha0 * tau) * gx[:, None] * f_y[None, :]


def edge_packet_2d(mass: MassProfile, v_f, alpha0, x0: float = 0.5, times=None, x=None, y=None) -> PacketField:
    """Chiral wave packet at a mass wall, normalized so that max |psi| = 1 at tau = 0.

    psi = N e^{-F(y)} e^{-i alpha0 tau} (2 sqrt(pi)/x0) e^{-(x + v_F tau)^2/x0^2} (1, -i)^T.
    """
    if not x0 > 0:
        raise DomainError("x0 must be positive")
    v_f, alpha0 = complex(v_f), complex(alpha0)
    times = np.linspace(0.0, 20.0, 21) if times is None else np.asarray(times, dtype=float)
    x = np.linspace(-10.0, 10.0, 401) if x is None else np.asarray(x, dtype=float)
    y = np.linspace(-1.0, 1.0, 81) if y is None else np.asarray(y, dtype=float)
    f_y = np.exp(-np.array([_transverse_exponent(mass, v_f, float(yy)) for yy in y]))
    spinor = np.array([1.0, -1j])
    base = _packet_unnormalized(f_y, v_f, alpha0, x0, 0.0, x)
    peak = np.max(np.abs(base)) * np.sqrt(2.0)
    if not (np.isfinite(peak) and peak > 0):
        raise ConvergenceError("wave packet normalization failed")
    norm = 1.0 / peak
    psi = np.stack([_packet_unnormalized(f_y, v_f, alpha0, x0, t, x) for t in times]) * norm
    return PacketField(times, x, y, psi[..., None] * spinor, norm)


def packet_quadrature(mass: MassProfile, v_f, alpha0, x0: float, x: float, y: float, tau: float, norm: float = 1.0) -> np.ndarray:
    """Same packet by direct q_x quadrature of int dq e^{i q (x + v_F tau) - q^2 x0^2/4}."""
    v_f, alpha0 = complex(v_f), complex(alpha0)
    b = x + v_f * tau
    integrand = lambda q: np.exp(1j * q * b - q * q * x0 * x0 / 4)
    val, err = integrate.quad(integrand, -np.inf, np.inf, complex_func=True, epsabs=1e-14, epsrel=1e-13, limit=400)
    f_y = np.exp(-_transverse_exponent(mass, v_f, y))
    amp = norm * f_y * np.exp(-1j * alpha0 * tau) * val
    return amp * np.array([1.0, -1j])
