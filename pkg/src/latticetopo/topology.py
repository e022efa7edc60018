"""Topological invariants: 1D winding numbers and 2D biorthogonal Chern numbers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import LatticeParams, alpha_bar, h_vectors, haldane_terms
from .errors import DomainError, GapClosedError
from .latsum2d import HONEYCOMB, s0_2d

__all__ = [
    "WindingResult",
    "ChernResult",
    "winding_number",
    "winding_biorthogonal",
    "winding_sweep",
    "chern_numeric",
    "chern_analytic",
    "dirac_masses",
    "phase_diagram",
]

GAP_TOL = 1e-8
MASS_TOL = 1e-12
BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class WindingResult:
    """nu: integer winding of r = h1 + i h2; winding: the unrounded accumulated phase / 2 pi."""

    nu: int
    winding: float
    trajectory: np.ndarray
    betas: np.ndarray
    min_abs_r: float


@dataclass(frozen=True)
class ChernResult:
    c_analytic: int
    masses: tuple[complex, complex]
    c_lr_numeric: float | None = None


def _loop_betas(n_samples: int, reverse: bool) -> np.ndarray:
    # Bloch phases are e^{-2 pi i beta.R}, so the conventional crystal momentum is
    # k = -beta; the loop runs with increasing k, i.e. beta from 1/2 down to -1/2
    if n_samples < 8:
        raise DomainError("need at least 8 samples around the Brillouin zone")
    betas = 0.5 - np.arange(n_samples) / n_samples
    return betas[::-1] if reverse else betas


def _require_1d(params: LatticeParams):
    if params.dim != 1:
        raise DomainError("winding numbers are defined for dim=1")


def winding_number(params: LatticeParams, n_samples: int = 2000, reverse: bool = False,
                   workers: int | None = None) -> WindingResult:
    """Winding of r(beta) = h1 + i h2 around the origin over one Brillouin-zone loop.

    The loop is oriented along k = -beta (reverse=True runs along +beta). Sums the principal-branch argument increments of r between consecutive
    samples (the loop is closed back to the first sample).
    """
    _require_1d(params)
    betas = _loop_betas(n_samples, reverse)
    h = h_vectors(params, betas, workers=workers)
    r = h[1] + 1j * h[2]
    min_r = float(np.min(np.abs(r)))
    if min_r < GAP_TOL:
        raise GapClosedError(f"min |r| = {min_r:.3g} at delta={params.delta}: winding undefined")
    steps = np.angle(np.roll(r, -1) / r)
    w = float(np.sum(steps) / (2 * np.pi))
    return WindingResult(int(round(w)), w, r, betas, min_r)


def winding_biorthogonal(params: LatticeParams, n_samples: int = 2000, reverse: bool = False,
                         workers: int | None = None, symmetric: bool = True) -> tuple[float, float]:
    """(nu_plus, nu_minus) from the discrete Wilson line (i/2 pi) sum ln <L(beta_k)|R(beta_k+1)>.

    Eigenvectors are taken in the gauge R = (h1 - i h2, +-|h| - h3)/N,
    L = (h1 + i h2, +-|h| - h3)/N with N = sqrt(2|h|(|h| -+ h3)); |h| and N follow
    continuous branches along the loop. The real part of each phase is returned.

    With symmetric=True each link phase is ln<L_k|R_k+1> averaged with
    -ln<L_k+1|R_k>. Non-Hermitian links are not unimodular, so the plain forward
    product carries an O(1/n) bias and mis-weights the jumps of h at the
    light-line cuts; the symmetric form is exact for smooth loops and still
    gauge invariant. symmetric=False gives the plain forward product.
    """
    _require_1d(params)
    betas = _loop_betas(n_samples, reverse)
    h = h_vectors(params, betas, workers=workers)
    h1, h2, h3 = h[1], h[2], h[3]
    if np.min(np.abs(h1 + 1j * h2)) < GAP_TOL:
        raise GapClosedError(f"gap closed at delta={params.delta}")
    lam = _continuous_sqrt(h1**2 + h2**2 + h3**2)
    out = []
    for sgn in (1, -1):
        e = sgn * lam
        norm = _continuous_sqrt(2 * e * (e - h3))
        right = np.stack([h1 - 1j * h2, e - h3]) / norm
        left = np.stack([h1 + 1j * h2, e - h3]) / norm
        fwd = np.log(np.sum(left * np.roll(right, -1, axis=1), axis=0))
        if symmetric:
            bwd = np.log(np.sum(np.roll(left, -1, axis=1) * right, axis=0))
            fwd = 0.5 * (fwd - bwd)
        out.append(float(np.real(1j * np.sum(fwd) / (2 * np.pi))))
    return out[0], out[1]


def _continuous_sqrt(x: np.ndarray) -> np.ndarray:
    root = np.sqrt(x + 0j)
    for i in range(1, len(root)):
        if abs(root[i] + root[i - 1]) < abs(root[i] - root[i - 1]):
            root[i] = -root[i]
    return root


def winding_sweep(params: LatticeParams, deltas, n_samples: int = 2000, workers: int | None = None):
    """List of (delta, WindingResult or None when the gap is closed)."""
    out = []
    for d in deltas:
        try:
            out.append((float(d), winding_number(params.replace(delta=float(d)), n_samples, workers=workers)))
        except GapClosedError:
            out.append((float(d), None))
    return out


def dirac_masses(params: LatticeParams) -> tuple[complex, complex]:
    """(m_K, m_K') = h3 at K and K' including the Haldane term."""
    if params.dim != 2:
        raise DomainError("Dirac masses are defined for dim=2")
    alpha = alpha_bar(params)
    g = HONEYCOMB
    ka, kb = params.kappa_a, params.kappa_b
    if params.symmetric:
        base = 0j
    else:
        s0 = s0_2d(alpha, g.K, params.eta)
        base = 0.5 * (params.alpha_a - params.alpha_b - 2j * np.pi * (ka - kb) * alpha**2 - (ka - kb) * s0)
    _, dk = haldane_terms(params, g.K)
    _, dkp = haldane_terms(params, g.Kprime)
    return complex(base + dk), complex(base + dkp)


def _sign_formula(m_k: complex, m_kp: complex) -> int:
    val = 0.5 * np.real(m_kp / np.sqrt(m_kp**2 + 0j) - m_k / np.sqrt(m_k**2 + 0j))
    return int(round(val))


def chern_analytic(params: LatticeParams, grid_n: int | None = None) -> ChernResult:
    """C = (1/2) Re[m_K'/sqrt(m_K'^2) - m_K/sqrt(m_K^2)]; optionally with the numeric value."""
    m_k, m_kp = dirac_masses(params)
    if min(abs(m_k), abs(m_kp)) < MASS_TOL:
        raise GapClosedError(f"Dirac mass vanishes (|m_K|={abs(m_k):.3g}, |m_K'|={abs(m_kp):.3g})")
    c = _sign_formula(m_k, m_kp)
    numeric = chern_numeric(params, grid_n) if grid_n else None
    return ChernResult(c, (m_k, m_kp), numeric)


def chern_numeric(params: LatticeParams, grid_n: int = 24, workers: int | None = None) -> float:
    """Lower-band Chern number from plaquettes of left-right link overlaps.

    On the n x n grid beta = (i b1 + j b2)/n the link U_mu(k) = <L(k)|R(k + mu)>
    uses biorthonormal lower-band vectors (alpha = h0 - |h|, principal root).
    Each plaquette contributes arg[U_1(k) U_2(k+1) / (U_1(k+2) U_2(k))], and
    C = -sum / 2 pi; the sign accounts for b1 x b2 < 0 so that the sum runs
    over the zone with positive Cartesian orientation.
    """
    if params.dim != 2:
        raise DomainError("Chern numbers are defined for dim=2")
    if grid_n < 4:
        raise DomainError("grid_n must be >= 4")
    i, j = np.meshgrid(np.arange(grid_n) / grid_n, np.arange(grid_n) / grid_n, indexing="ij")
    betas = HONEYCOMB.to_cartesian(i.ravel(), j.ravel())
    h = h_vectors(params, betas, workers=workers).reshape(4, grid_n, grid_n)
    h1, h2, h3 = h[1], h[2], h[3]
    lam = np.sqrt(h1**2 + h2**2 + h3**2 + 0j)
    if np.min(lam.real) < GAP_TOL:
        raise GapClosedError(f"real gap closes on the grid (min Re|h| = {np.min(lam.real):.3g})")
    e = -lam
    # two gauges of the same eigenvector; pick the better-conditioned one per point
    na = e - h3
    nb = e + h3
    use_a = np.abs(na) >= np.abs(nb)
    right = np.where(use_a, np.stack([h1 - 1j * h2, e - h3]), np.stack([e + h3, h1 + 1j * h2]))
    left = np.where(use_a, np.stack([h1 + 1j * h2, e - h3]), np.stack([e + h3, h1 - 1j * h2]))
    right = right / np.sum(left * right, axis=0)

    def link(axis):
        return np.sum(left * np.roll(right, -1, axis=axis + 1), axis=0)

    u1, u2 = link(0), link(1)
    plaq = u1 * np.roll(u2, -1, axis=0) / (np.roll(u1, -1, axis=1) * u2)
    return float(-np.sum(np.angle(plaq)) / (2 * np.pi))


def phase_diagram(params_base: LatticeParams, kappa_b_range, phi_range, resolution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic Chern number on a (kappa_b, phi) grid.

    resolution is an int or a (n_kappa, n_phi) pair; the grids include both
    endpoints. Returns (kappa_b values, phi values, C array of shape
    (n_kappa, n_phi)) with NaN where a Dirac mass is below 1e-10.
    """
    if params_base.dim != 2:
        raise DomainError("phase diagrams are defined for dim=2")
    nk, nphi = (resolution, resolution) if np.isscalar(resolution) else resolution
    if nk < 1 or nphi < 1:
        raise DomainError("resolution must be positive")
    kappas = np.linspace(*kappa_b_range, int(nk))
    phis = np.linspace(*phi_range, int(nphi))
    if np.any(kappas <= 0):
        raise DomainError("kappa_b must be positive")
    g = HONEYCOMB
    sin_sum_k = np.sum([np.sin(2 * np.pi * g.K @ a) for a in (g.a1, g.a2, g.a3)])
    out = np.full((len(kappas), len(phis)), np.nan)
    for ik, kb in enumerate(kappas):
        p = params_base.replace(kappa_b=float(kb), phi=0.0)
        base, _ = dirac_masses(p)  # Haldane part vanishes at phi = 0
        for ip, ph in enumerate(phis):
            # h3 Haldane increment is -2 t2 sin(phi) sum sin(2 pi K.a_i), odd under K -> K'
            dm = -2 * p.t2 * np.sin(ph) * sin_sum_k
            m_k, m_kp = base + dm, base - dm
            if min(abs(m_k), abs(m_kp)) < BOUNDARY_TOL:
                continue
            out[ik, ip] = _sign_formula(m_k, m_kp)
    return kappas, phis, out
