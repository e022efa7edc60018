"""Effective two-band Bloch Hamiltonian H = h0 + h.sigma of the coupled atom lattices.

H(alpha, beta) follows from the self-consistent eigen-equations

    [alpha_A - 2 i pi kappa_A alpha^2 - kappa_A S0] psi_A - sqrt(kappa_A kappa_B) S+ psi_B = alpha psi_A
    [alpha_B - 2 i pi kappa_B alpha^2 - kappa_B S0] psi_B - sqrt(kappa_A kappa_B) S- psi_A = alpha psi_B

with the lattice sums evaluated at a fixed energy alpha_eval (by default the
isolated-atom value alpha_bar). Bands are alpha_+- = h0 +- |h| with the
principal complex square root, optionally refined by fixed-point iteration.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegeneracyError, DomainError
from .latsum1d import reduce_beta_1d, s0_1d, s_pm_1d
from .latsum2d import HONEYCOMB, reduce_beta_2d, s0_2d, s_pm_2d

__all__ = [
    "LatticeParams",
    "HVector",
    "BandPoint",
    "FixedPoint",
    "alpha_bar",
    "h_vector",
    "h_vectors",
    "haldane_terms",
    "bands",
    "eigvecs",
    "band_grid",
    "band_path",
    "path_points_2d",
    "light_line_flag",
    "worker_count",
]

DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class LatticeParams:
    """Dimensionless model parameters.

    alpha_a, alpha_b: renormalized resonance frequencies; kappa_a, kappa_b:
    coupling strengths; dim: 1 (two-site chain, offset delta) or 2 (honeycomb);
    t2, phi: Haldane next-nearest-neighbour amplitude and phase (2D only);
    eta: Ewald parameter for 2D sums (None selects it automatically).
    """

    alpha_a: float = 2.4
    alpha_b: float = 2.4
    kappa_a: float = 0.01
    kappa_b: float = 0.01
    dim: int = 1
    delta: float = 0.2
    t2: float = 0.0
    phi: float = 0.0
    eta: float | None = None

    def __post_init__(self):
        for name in ("alpha_a", "alpha_b", "kappa_a", "kappa_b"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive real number, got {v}")
        if self.dim not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {self.dim}")
        if self.dim == 1 and not (0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        if self.t2 < 0:
            raise DomainError("t2 must be non-negative")
        if self.dim == 1 and self.t2 != 0:
            raise DomainError("the Haldane term is only defined for dim=2")
        if self.eta is not None and not self.eta > 0:
            raise DomainError("eta must be positive")
        if max(self.kappa_a, self.kappa_b) > 0.1:
            warnings.warn("kappa > 0.1: outside the weak-coupling regime of the two-band model", stacklevel=2)
        if abs(self.alpha_a - self.alpha_b) > 0.1 * (self.alpha_a + self.alpha_b):
            warnings.warn("alpha_a and alpha_b are far from degenerate", stacklevel=2)

    @property
    def symmetric(self) -> bool:
        return self.alpha_a == self.alpha_b and self.kappa_a == self.kappa_b

    def replace(self, **changes) -> "LatticeParams":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return LatticeParams(**fields)


@dataclass(frozen=True)
class HVector:
    """Pauli coefficients of H at one momentum."""

    h0: complex
    h1: complex
    h2: complex
    h3: complex

    @property
    def norm(self) -> complex:
        """|h| = sqrt(h1^2 + h2^2 + h3^2), principal branch."""
        return complex(np.sqrt(self.h1**2 + self.h2**2 + self.h3**2 + 0j))

    @property
    def r(self) -> complex:
        return self.h1 + 1j * self.h2

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.h0 + self.h3, self.h1 - 1j * self.h2], [self.h1 + 1j * self.h2, self.h0 - self.h3]],
            dtype=complex,
        )


@dataclass(frozen=True)
class BandPoint:
    """Eigenvalues and biorthonormal eigenvectors at one momentum.

    Eigenvector fields are None at a degenerate point (|h| ~ 0).
    """

    beta: float | np.ndarray
    alpha_plus: complex
    alpha_minus: complex
    h: HVector
    right_plus: np.ndarray | None = None
    right_minus: np.ndarray | None = None
    left_plus: np.ndarray | None = None
    left_minus: np.ndarray | None = None


@dataclass(frozen=True)
class FixedPoint:
    """Settings of the nonlinear refinement alpha_{n+1} = h0(alpha_n) +- |h(alpha_n)|."""

    max_iters: int = 50
    tol: float = 1e-12


def worker_count(requested: int | None = None) -> int:
    """Worker threads for sweeps, capped by LATTICETOPO_THREADS."""
    cap = os.environ.get("LATTICETOPO_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise DomainError(f"LATTICETOPO_THREADS must be an integer, got {cap!r}") from exc
    return max(1, n)


def alpha_bar(params: LatticeParams) -> complex:
    """Mean isolated-atom energy (aA+aB)/2 - i pi (kA+kB)(aA+aB)^2/4."""
    s = params.alpha_a + params.alpha_b
    return complex(s / 2 - 1j * np.pi * (params.kappa_a + params.kappa_b) * s**2 / 4)


def haldane_terms(params: LatticeParams, beta) -> tuple[np.ndarray, np.ndarray]:
    """(h0 increment, h3 increment) of the Haldane term at Cartesian momenta beta."""
    beta = np.asarray(beta, dtype=float)
    g = HONEYCOMB
    phases = [2 * np.pi * (beta @ a) for a in (g.a1, g.a2, g.a3)]
    dh0 = 2 * params.t2 * np.cos(params.phi) * sum(np.cos(p) for p in phases)
    dh3 = -2 * params.t2 * np.sin(params.phi) * sum(np.sin(p) for p in phases)
    return dh0, dh3


def _assemble(params: LatticeParams, alpha: complex, sp, sm, s0):
    ka, kb = params.kappa_a, params.kappa_b
    g = np.sqrt(ka * kb)
    h0 = 0.5 * (params.alpha_a + params.alpha_b - 2j * np.pi * (ka + kb) * alpha**2 - (ka + kb) * s0)
    h1 = -0.5 * g * (sp + sm)
    h2 = g * (sp - sm) / 2j
    if params.symmetric:
        h3 = np.zeros_like(h0)
    else:
        h3 = 0.5 * (params.alpha_a - params.alpha_b - 2j * np.pi * (ka - kb) * alpha**2 - (ka - kb) * s0)
    return h0, h1, h2, h3


def h_vectors(params: LatticeParams, betas, alpha_eval=None, workers: int | None = None) -> np.ndarray:
    """Array of shape (4, M) with (h0, h1, h2, h3) at M momenta.

    1D momenta are scalars (shape (M,)); 2D momenta are Cartesian (shape (M, 2)).
    """
    alpha = alpha_bar(params) if alpha_eval is None else complex(alpha_eval)
    if params.dim == 1:
        betas = np.atleast_1d(np.asarray(betas, dtype=float))

        def one(b):
            b = reduce_beta_1d(b)
            return (s_pm_1d(alpha, b, params.delta, 1), s_pm_1d(alpha, b, params.delta, -1), s0_1d(alpha, b))

        n = worker_count(workers)
        if n > 1 and len(betas) > 8:
            with ThreadPoolExecutor(n) as ex:
                rows = list(ex.map(one, betas))
        else:
            rows = [one(b) for b in betas]
        sp, sm, s0 = (np.array(c, dtype=complex) for c in zip(*rows)) if rows else (np.zeros(0, complex),) * 3
        return np.array(_assemble(params, alpha, sp, sm, s0))
    betas = np.asarray(betas, dtype=float).reshape(-1, 2)
    reduced = reduce_beta_2d(betas)
    n = worker_count(workers)
    chunks = np.array_split(np.arange(len(reduced)), max(1, min(n, len(reduced) // 64 or 1)))

    def block(idx):
        b = reduced[idx]
        return (
            np.atleast_1d(s_pm_2d(alpha, b, 1, params.eta)),
            np.atleast_1d(s_pm_2d(alpha, b, -1, params.eta)),
            np.atleast_1d(s0_2d(alpha, b, params.eta)),
        )

    if len(chunks) > 1:
        with ThreadPoolExecutor(len(chunks)) as ex:
            parts = list(ex.map(block, chunks))
    else:
        parts = [block(chunks[0])]
    sp, sm, s0 = (np.concatenate([p[i] for p in parts]) for i in range(3))
    h = np.array(_assemble(params, alpha, sp, sm, s0))
    if params.t2 > 0:
        dh0, dh3 = haldane_terms(params, betas)
        h[0] = h[0] + dh0
        h[3] = h[3] + dh3
    return h


def h_vector(params: LatticeParams, beta, alpha_eval=None) -> HVector:
    """Pauli coefficients at a single momentum (scalar in 1D, Cartesian 2-vector in 2D)."""
    if params.dim == 1:
        b = float(beta)
        if not (-0.5 <= b <= 0.5):
            raise DomainError(f"beta={b} outside the first Brillouin zone [-1/2, 1/2]")
        h = h_vectors(params, [b], alpha_eval, workers=1)
    else:
        h = h_vectors(params, np.asarray(beta, dtype=float).reshape(1, 2), alpha_eval, workers=1)
    return HVector(*(complex(x) for x in h[:, 0]))


def eigvecs(h: HVector):
    """Biorthonormal (right_plus, right_minus, left_plus, left_minus).

    Right: (h1 - i h2, +-|h| - h3) / sqrt(2|h|(|h| -+ h3)); left: (h1 + i h2, +-|h| - h3) / same,
    with the overlap taken without complex conjugation. When that normalization
    vanishes (h1 = h2 = 0) the equivalent gauge (+-|h| + h3, h1 +- i h2) is used.
    """
    lam = h.norm
    if abs(lam) < DEGENERACY_TOL:
        raise DegeneracyError(f"|h| = {abs(lam):.3g}: bands are degenerate, eigenvectors undefined")
    out_r, out_l = [], []
    for sgn in (1, -1):
        e = sgn * lam
        n_a = 2 * e * (e - h.h3)
        n_b = 2 * e * (e + h.h3)
        if abs(n_a) >= abs(n_b):
            rv = np.array([h.h1 - 1j * h.h2, e - h.h3])
            lv = np.array([h.h1 + 1j * h.h2, e - h.h3])
            norm = np.sqrt(n_a)
        else:
            rv = np.array([e + h.h3, h.h1 + 1j * h.h2])
            lv = np.array([e + h.h3, h.h1 - 1j * h.h2])
            norm = np.sqrt(n_b)
        out_r.append(rv / norm)
        out_l.append(lv / norm)
    return out_r[0], out_r[1], out_l[0], out_l[1]


def _band_point(beta, h: HVector, lam: complex | None = None) -> BandPoint:
    lam = h.norm if lam is None else lam
    ap, am = h.h0 + lam, h.h0 - lam
    if abs(lam) < DEGENERACY_TOL:
        return BandPoint(beta, ap, am, h)
    if lam != h.norm:
        # band tracking picked the other root; relabel eigenvectors accordingly
        rm, rp, lm, lp = eigvecs(h)
    else:
        rp, rm, lp, lm = eigvecs(h)
    return BandPoint(beta, ap, am, h, rp, rm, lp, lm)


def bands(params: LatticeParams, beta, refine: FixedPoint | None = None) -> BandPoint:
    """Bands at one momentum; refine=FixedPoint(...) solves the nonlinear problem per band."""
    h = h_vector(params, beta)
    if refine is None:
        return _band_point(beta, h)
    roots = []
    for sgn in (1, -1):
        a = h.h0 + sgn * h.norm
        for _ in range(refine.max_iters):
            hn = h_vector(params, beta, a)
            a_next = hn.h0 + sgn * hn.norm
            if abs(a_next - a) < refine.tol:
                a = a_next
                break
            a = a_next
        else:
            raise ConvergenceError(f"fixed-point refinement did not converge at beta={beta}")
        roots.append(a)
    hp = h_vector(params, beta, roots[0])
    return BandPoint(beta, roots[0], roots[1], hp, *(_maybe_vecs(hp)))


def _maybe_vecs(h: HVector):
    try:
        return eigvecs(h)
    except DegeneracyError:
        return (None,) * 4


def _track(hs: np.ndarray) -> np.ndarray:
    # continuous choice of sqrt(h1^2+h2^2+h3^2) along an ordered sequence
    lam = np.sqrt(hs[1] ** 2 + hs[2] ** 2 + hs[3] ** 2 + 0j)
    for i in range(1, len(lam)):
        if abs(lam[i] + lam[i - 1]) < abs(lam[i] - lam[i - 1]):
            lam[i] = -lam[i]
    return lam


def light_line_flag(params: LatticeParams, beta) -> int:
    """1 if the momentum lies inside the (folded) light cone, 0 in the guided region.

    1D: |beta| < frac(Re alpha_bar), i.e. one more diffraction order radiates.
    2D: number of open orders |beta + G| < Re alpha_bar.
    """
    a = alpha_bar(params).real
    if params.dim == 1:
        return int(abs(reduce_beta_1d(float(beta))) < a - np.floor(a))
    from .latsum2d import light_line_count_2d

    return int(light_line_count_2d(a, beta))


def band_grid(params: LatticeParams, n: int, track: bool = False, workers: int | None = None) -> list[BandPoint]:
    """Bands on a uniform grid: beta_i = -1/2 + i/n in 1D; beta1, beta2 = i/n, j/n (row-major) in 2D."""
    if n < 1:
        raise DomainError("grid size must be >= 1")
    if params.dim == 1:
        betas = -0.5 + np.arange(n) / n
        pts = list(betas)
    else:
        i, j = np.meshgrid(np.arange(n) / n, np.arange(n) / n, indexing="ij")
        betas = HONEYCOMB.to_cartesian(i.ravel(), j.ravel())
        pts = list(betas)
    hs = h_vectors(params, betas, workers=workers)
    lam = _track(hs) if track else np.sqrt(hs[1] ** 2 + hs[2] ** 2 + hs[3] ** 2 + 0j)
    return [_band_point(b, HVector(*(complex(x) for x in hs[:, k])), complex(lam[k])) for k, b in enumerate(pts)]


def path_points_2d() -> dict[str, np.ndarray]:
    """High-symmetry points; Sigma and Lambda are the midpoints of Gamma-M and K-Gamma."""
    g = HONEYCOMB
    gamma = np.zeros(2)
    return {"Gamma": gamma, "Sigma": g.M / 2, "M": g.M, "K": g.K, "Lambda": g.K / 2}


def band_path(params: LatticeParams, n_per_segment: int = 50, workers: int | None = None):
    """Bands along Gamma -> Sigma -> M -> K -> Lambda (2D) or beta in [-1/2, 1/2] (1D).

    Returns (arc length s, momenta, list of BandPoint) with band tracking along the path.
    """
    if n_per_segment < 1:
        raise DomainError("n_per_segment must be >= 1")
    if params.dim == 1:
        betas = np.linspace(-0.5, 0.5, 4 * n_per_segment + 1)
        s = betas + 0.5
    else:
        pts = path_points_2d()
        corners = [pts[k] for k in ("Gamma", "Sigma", "M", "K", "Lambda")]
        segs, svals, s0 = [], [], 0.0
        for a, b in zip(corners[:-1], corners[1:]):
            t = np.arange(n_per_segment) / n_per_segment
            segs.append(a + t[:, None] * (b - a))
            svals.append(s0 + t * np.linalg.norm(b - a))
            s0 += np.linalg.norm(b - a)
        segs.append(corners[-1][None, :])
        svals.append(np.array([s0]))
        betas = np.concatenate(segs)
        s = np.concatenate(svals)
    hs = h_vectors(params, betas, workers=workers)
    lam = _track(hs)
    points = [_band_point(b, HVector(*(complex(x) for x in hs[:, k])), complex(lam[k])) for k, b in enumerate(betas)]
    return s, betas, points
