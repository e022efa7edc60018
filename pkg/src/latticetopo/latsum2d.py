"""Honeycomb lattice sums by a theta-kernel integral plus an Ewald split.

Each sum S(alpha, beta) = sum_R G(|R + d|) e^{-2 pi i beta.R} (d = +delta, -delta,
or 0 with R = 0 omitted) is written as

    int_0^inf K(s) Theta_d(s) ds  +  real-space Ewald sum  +  reciprocal Ewald sum

where K(s) = 1/(2 pi^2) - alpha erfcx(pi alpha / sqrt(s)) / (2 sqrt(pi s)) and
Theta_d(s) = sum_R exp(-s |R + d|^2 - 2 pi i beta.R) is a product of Jacobi theta
functions. The first two terms of G produce the theta integral, the outgoing
far field is split by the Ewald parameter eta. The total does not depend on
eta, but in float64 the split cancels terms of size exp(pi^2 Re(alpha^2) eta^2),
so eta is chosen near 1/(pi |alpha|) by default.

All functions accept a single Cartesian momentum (shape (2,)) or a stack of
momenta (shape (M, 2)) and return a complex scalar or an (M,) array.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError, ResonanceError
from .greens import green_far, green_near
from .specfun import Nome, jacobi_theta2, jacobi_theta3, jacobi_theta_batch

__all__ = [
    "LatticeGeometry2D",
    "HONEYCOMB",
    "Sum2DArgs",
    "EwaldPart",
    "default_eta",
    "reduce_beta_2d",
    "theta_lattice_sum",
    "theta_kernel_integral",
    "theta_lattice_sum_batch",
    "adaptive_gk15",
    "ewald_realspace",
    "ewald_reciprocal",
    "s_pm_2d",
    "s0_2d",
    "lattice_sums_2d",
    "quasi_inversion_check",
    "light_line_count_2d",
    "oracle_direct_2d",
]

SQRT3 = np.sqrt(3.0)
LIGHT_LINE_TOL = 1e-9


@dataclass(frozen=True)
class LatticeGeometry2D:
    """Honeycomb geometry in units of the nearest-neighbour Bravais spacing.

    a1, a2, a3 are the three unit lattice vectors (a1 + a2 + a3 = 0), b1, b2
    generate the reciprocal lattice (b3 = -b1 - b2), delta_vec is the A->B
    sublattice offset and K = (2 b1 + b2)/3 = -K'.
    """

    a1: np.ndarray = field(default_factory=lambda: np.array([SQRT3 / 2, -0.5]))
    a2: np.ndarray = field(default_factory=lambda: np.array([-SQRT3 / 2, -0.5]))
    a3: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))
    b1: np.ndarray = field(default_factory=lambda: np.array([1 / SQRT3, 1.0]))
    b2: np.ndarray = field(default_factory=lambda: np.array([1 / SQRT3, -1.0]))
    delta_vec: np.ndarray = field(default_factory=lambda: np.array([-1 / SQRT3, 0.0]))

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            if not np.isclose(np.linalg.norm(getattr(self, name)), 1.0):
                raise DomainError(f"|{name}| must be 1")
        gram = np.array([[a @ b for b in (self.b1, self.b2)] for a in (self.a1, self.a2)])
        if not np.allclose(gram, np.round(gram), atol=1e-12) or not np.isclose(abs(np.linalg.det(np.round(gram))), 1.0):
            raise DomainError("b1, b2 do not generate the reciprocal lattice of a1, a2")

    @property
    def b3(self) -> np.ndarray:
        return -self.b1 - self.b2

    @property
    def K(self) -> np.ndarray:
        return (2 * self.b1 + self.b2) / 3

    @property
    def Kprime(self) -> np.ndarray:
        return -self.K

    @property
    def M(self) -> np.ndarray:
        return self.b1 / 2

    @property
    def cell_area(self) -> float:
        return float(abs(self.a1[0] * self.a2[1] - self.a1[1] * self.a2[0]))

    def to_cartesian(self, beta1, beta2) -> np.ndarray:
        """beta1 b1 + beta2 b2 (reciprocal coordinates -> Cartesian)."""
        beta1 = np.asarray(beta1, dtype=float)
        beta2 = np.asarray(beta2, dtype=float)
        return beta1[..., None] * self.b1 + beta2[..., None] * self.b2

    def to_reduced(self, beta) -> np.ndarray:
        """Inverse of to_cartesian."""
        basis = np.stack([self.b1, self.b2], axis=1)
        return np.linalg.solve(basis, np.asarray(beta, dtype=float).T).T


HONEYCOMB = LatticeGeometry2D()


def default_eta(alpha) -> float:
    """Ewald splitting parameter balancing truncation and cancellation.

    Terms of size exp(pi^2 Re(alpha^2) eta^2) cancel between the two Ewald
    sums, so eta ~ 0.36/|alpha| keeps that factor below e^1.3.
    """
    return float(min(0.5, 0.36 / max(abs(complex(alpha)), 0.72)))


@dataclass(frozen=True)
class Sum2DArgs:
    """Inputs of the 2D sums. eta and shell counts of None select automatic values."""

    alpha: complex
    beta: np.ndarray
    eta: float | None = None
    realspace_shells: int | None = None
    reciprocal_shells: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        beta = np.asarray(self.beta, dtype=float)
        if beta.shape[-1] != 2:
            raise DomainError("beta must be a Cartesian 2-vector or an (M, 2) stack")
        object.__setattr__(self, "beta", beta)
        if self.eta is not None and not self.eta > 0:
            raise DomainError("eta must be positive")
        for name in ("realspace_shells", "reciprocal_shells"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise DomainError(f"{name} must be >= 1")

    @property
    def eta_value(self) -> float:
        return default_eta(self.alpha) if self.eta is None else float(self.eta)


@dataclass(frozen=True)
class EwaldPart:
    """Value of one Ewald sum with the number of rings used and a tail estimate."""

    value: complex | np.ndarray
    shells: int
    tail_bound: float


# ---------------------------------------------------------------------------
# Lattice helpers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _ring_indices(n_rings: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer pairs (m, n) on hexagonal rings 0..n_rings of a 120-degree basis."""
    j = np.arange(-n_rings, n_rings + 1)
    m, n = np.meshgrid(j, j, indexing="ij")
    m, n = m.ravel(), n.ravel()
    ring = np.maximum(np.maximum(np.abs(m), np.abs(n)), np.abs(m - n))
    keep = ring <= n_rings
    return np.stack([m[keep], n[keep]], axis=1), ring[keep]


def _ring_vectors(u: np.ndarray, v: np.ndarray, n_rings: int):
    idx, ring = _ring_indices(n_rings)
    vec = idx[:, :1] * u + idx[:, 1:] * v
    order = np.lexsort((np.linalg.norm(vec, axis=1), ring))
    return vec[order], ring[order]


def _real_lattice(geom: LatticeGeometry2D, n_rings: int):
    return _ring_vectors(geom.a1, geom.a2, n_rings)


def _reciprocal_lattice(geom: LatticeGeometry2D, n_rings: int):
    return _ring_vectors(geom.b1, geom.b2, n_rings)


def reduce_beta_2d(beta, geom: LatticeGeometry2D = HONEYCOMB) -> np.ndarray:
    """Shift beta by the reciprocal vector that brings it closest to Gamma."""
    beta = np.asarray(beta, dtype=float)
    flat = beta.reshape(-1, 2)
    red = geom.to_reduced(flat)
    base = np.floor(red)
    best = None
    best_norm = None
    for d1 in (0, 1):
        for d2 in (0, 1):
            for e1, e2 in ((0, 0), (-1, 0), (0, -1), (1, 0), (0, 1), (-1, 1), (1, -1)):
                shift = base + np.array([d1 + e1, d2 + e2])
                cand = flat - geom.to_cartesian(shift[:, 0], shift[:, 1])
                nrm = np.linalg.norm(cand, axis=1)
                if best is None:
                    best, best_norm = cand, nrm
                else:
                    better = nrm < best_norm - 1e-13
                    best = np.where(better[:, None], cand, best)
                    best_norm = np.where(better, nrm, best_norm)
    return best.reshape(beta.shape)


def _offset_vector(offset: int, geom: LatticeGeometry2D) -> np.ndarray:
    if offset not in (1, -1, 0):
        raise DomainError("offset must be +1, -1 or 0")
    return offset * geom.delta_vec


def _betas(beta) -> tuple[np.ndarray, bool]:
    beta = np.asarray(beta, dtype=float)
    if beta.shape == (2,):
        return beta[None, :], True
    if beta.ndim != 2 or beta.shape[1] != 2:
        raise DomainError("beta must have shape (2,) or (M, 2)")
    return beta, False


def _out(values: np.ndarray, scalar: bool):
    return complex(values[0]) if scalar else values


def light_line_count_2d(alpha, beta, geom: LatticeGeometry2D = HONEYCOMB) -> np.ndarray:
    """Number of reciprocal vectors with |beta + G| < Re(alpha) (open diffraction orders)."""
    betas, scalar = _betas(reduce_beta_2d(beta, geom))
    a = complex(alpha).real
    n_rings = int(np.ceil(a)) + 2
    G, _ = _reciprocal_lattice(geom, n_rings)
    p = np.linalg.norm(betas[:, None, :] + G[None, :, :], axis=2)
    counts = np.sum(p < a, axis=1)
    return int(counts[0]) if scalar else counts


# ---------------------------------------------------------------------------
# Theta-kernel integral
# ---------------------------------------------------------------------------


def theta_lattice_sum(s: float, beta, offset: int, geom: LatticeGeometry2D = HONEYCOMB, dual=None):
    """Theta_d(s) = sum_R exp(-s |R + d|^2 - 2 pi i beta.R), minus 1 for offset 0.

    For s >= 1 (or dual=False) this is the theta product
    e^{-s|d|^2}[th3(zx, e^{-3s}) th3(zy, e^{-s}) + th2(zx, e^{-3s}) th2(zy, e^{-s})]
    with zx = sqrt(3)(pi beta_x - i s d_x), zy = pi beta_y - i s d_y. For s < 1 the
    Poisson-dual Gaussian sum over reciprocal vectors is used.
    Only valid for the default honeycomb orientation (a3 along y).
    """
    betas, scalar = _betas(beta)
    d = _offset_vector(offset, geom)
    if dual is None:
        dual = s < 1.0
    if dual:
        G, _ = _reciprocal_lattice(geom, _dual_rings(s))
        p = betas[:, None, :] + G[None, :, :]
        expo = -np.pi**2 * np.sum(p * p, axis=2) / s + 2j * np.pi * (p @ d)
        val = np.pi / (geom.cell_area * s) * np.sum(np.exp(expo), axis=1)
    else:
        zx = SQRT3 * (np.pi * betas[:, 0] - 1j * s * d[0])
        zy = np.pi * betas[:, 1] - 1j * s * d[1]
        qx, qy = Nome(c=3.0 * s), Nome(c=s)
        val = np.exp(-s * (d @ d)) * (
            jacobi_theta3(zx, qx) * jacobi_theta3(zy, qy) + jacobi_theta2(zx, qx) * jacobi_theta2(zy, qy)
        )
        val = np.asarray(val)
    if offset == 0:
        val = val - 1.0
    return _out(np.atleast_1d(val), scalar)


def _dual_rings(s: float) -> int:
    # exp(-pi^2 p^2 / s) < 1e-18 beyond p = sqrt(41.5 s)/pi, plus |beta| <= 2/3
    return int(np.ceil(np.sqrt(41.5 * s) / np.pi + 0.7)) + 1


_KERNEL_ASYMPTOTIC = 25.0


def _kernel(s, alpha: complex):
    # K(s) = 1/(2 pi^2) - alpha erfcx(pi alpha / sqrt(s)) / (2 sqrt(pi s))
    #      = (1 - sqrt(pi) x erfcx(x)) / (2 pi^2),  x = pi alpha / sqrt(s).
    # The bracket cancels for large |x| (s -> 0); there the asymptotic series
    # sum_n (-1)^(n+1) (2n-1)!! / (2 x^2)^n is used instead.
    s = np.asarray(s, dtype=float)
    shape = s.shape
    x = np.atleast_1d(np.pi * alpha / np.sqrt(s))
    big = np.abs(x) > _KERNEL_ASYMPTOTIC
    xs = np.where(big, 1.0, x)
    out = 1.0 - np.sqrt(np.pi) * xs * special.erfcx(xs)
    if np.any(big):
        u = 1.0 / (2.0 * x[big] ** 2)
        term, acc = np.ones_like(u), np.zeros_like(u)
        for n in range(1, 16):
            term = term * (2 * n - 1) * u
            acc += term if n % 2 else -term
        out = np.where(big, 0j, out)
        out[big] = acc
    return (out / (2 * np.pi**2)).reshape(shape)


def theta_lattice_sum_batch(s_nodes, betas: np.ndarray, offset: int, geom: LatticeGeometry2D = HONEYCOMB,
                            max_block: int = 2_000_000) -> np.ndarray:
    """Theta_d(s) on many s at once: array of shape (len(s_nodes), len(betas)).

    Same representation as theta_lattice_sum (theta product for s >= 1, Poisson
    dual below), with the series vectorized over nodes and momenta.
    """
    s_nodes = np.atleast_1d(np.asarray(s_nodes, dtype=float))
    betas = np.atleast_2d(betas)
    d = _offset_vector(offset, geom)
    out = np.empty((len(s_nodes), len(betas)), dtype=complex)
    dual = s_nodes < 1.0
    if np.any(dual):
        sd = s_nodes[dual]
        G, _ = _reciprocal_lattice(geom, _dual_rings(float(sd.max())))
        pvec = betas[:, None, :] + G[None, :, :]
        p2 = np.sum(pvec * pvec, axis=2)
        phase = np.exp(2j * np.pi * (pvec @ d))
        step = max(1, max_block // max(1, p2.size))
        vals = []
        for i in range(0, len(sd), step):
            sc = sd[i:i + step, None, None]
            vals.append(np.pi / (geom.cell_area * sc[:, :, 0]) * np.sum(np.exp(-np.pi**2 * p2 / sc) * phase, axis=2))
        out[dual] = np.concatenate(vals)
    if np.any(~dual):
        st = s_nodes[~dual][:, None]
        zx = SQRT3 * (np.pi * betas[None, :, 0] - 1j * st * d[0])
        zy = np.pi * betas[None, :, 1] - 1j * st * d[1]
        cx, cy = 3.0 * st, st
        out[~dual] = np.exp(-st * (d @ d)) * (
            jacobi_theta_batch(zx, cx) * jacobi_theta_batch(zy, cy)
            + jacobi_theta_batch(zx, cx, half=True) * jacobi_theta_batch(zy, cy, half=True)
        )
    if offset == 0:
        out -= 1.0
    return out


# Gauss-Kronrod 15-point nodes (positive half, descending, centre last) and weights;
# the embedded 7-point Gauss rule uses every second node
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_GK_X = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GK_WG = np.zeros(15)
_GK_WG[[1, 3, 5]] = _WG[:3]
_GK_WG[[13, 11, 9]] = _WG[:3]
_GK_WG[7] = _WG[3]


def adaptive_gk15(f, breaks, epsabs: float = 1e-13, epsrel: float = 1e-12, max_rounds: int = 40,
                  max_panels: int = 4000):
    """Vector-valued adaptive Gauss-Kronrod (7/15) quadrature over [breaks[0], breaks[-1]].

    f maps an array of nodes (n,) to values (n, m) and is called once per
    refinement round with the nodes of every unresolved panel. A panel is
    accepted when max|K15 - G7| is within its share (by width) of
    max(epsabs, epsrel * max|integral|), or below 100 ulp of its absolute
    integral; rejected panels are bisected.
    Returns (integral, error estimate).
    """
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1], breaks[1:]
    width_total = breaks[-1] - breaks[0]
    total = None
    err_total = 0.0
    for _ in range(max_rounds):
        centre, half = (lo + hi) / 2, (hi - lo) / 2
        nodes = (centre[:, None] + half[:, None] * _GK_X[None, :]).ravel()
        vals = np.asarray(f(nodes)).reshape(len(lo), 15, -1)
        kron = half[:, None] * np.einsum("k,pkm->pm", _GK_WK, vals)
        gauss = half[:, None] * np.einsum("k,pkm->pm", _GK_WG, vals)
        err = np.max(np.abs(kron - gauss), axis=1)
        resabs = half * np.max(np.einsum("k,pkm->pm", _GK_WK, np.abs(vals)), axis=1)
        if total is None:
            total = np.zeros(kron.shape[1], dtype=kron.dtype)
        scale = max(epsabs, epsrel * float(np.max(np.abs(total + kron.sum(axis=0)))))
        # a panel is resolved at its tolerance share or at the rounding floor of its values
        ok = (err <= scale * (hi - lo) / width_total) | (err <= 100 * np.finfo(float).eps * resabs)
        if len(lo) > max_panels:
            raise ConvergenceError(f"adaptive quadrature needs more than {max_panels} panels")
        total = total + kron[ok].sum(axis=0)
        err_total += float(err[ok].sum())
        if np.all(ok):
            return total, err_total
        lo, hi = lo[~ok], hi[~ok]
        mid = (lo + hi) / 2
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    raise ConvergenceError(f"adaptive quadrature left {len(lo)} panels unresolved")


def _theta_breaks(s_max: float) -> np.ndarray:
    # panels split at s = 1 (dual/theta switch), refined geometrically towards both ends
    upper = [1.0]
    while upper[-1] * 2 < s_max:
        upper.append(upper[-1] * 2)
    return np.array([0.0, 0.125, 0.25, 0.5] + upper + [s_max])


def theta_kernel_integral(alpha, beta=None, offset: int = 1, geom: LatticeGeometry2D = HONEYCOMB,
                          epsabs: float = 1e-13, epsrel: float = 1e-12, method: str = "gk15"):
    """int_0^inf K(s) Theta_d(s) ds: the near-field (1/r^2 and E1) part of the sum.

    method='gk15' (default) runs a vectorized adaptive Gauss-Kronrod rule that
    evaluates all nodes of a refinement round in one batch; method='quad_vec'
    uses scipy's quad_vec on (0, 1) and (1, s_max) with node-by-node theta
    products (independent route, ~50x slower).
    """
    if isinstance(alpha, Sum2DArgs):
        alpha, beta = alpha.alpha, alpha.beta
    alpha = complex(alpha)
    betas, scalar = _betas(beta)
    d = _offset_vector(offset, geom)
    r_min2 = 1.0 if offset == 0 else float(d @ d)
    s_max = 46.0 / r_min2
    if alpha == 0 and np.any(np.linalg.norm(reduce_beta_2d(betas, geom), axis=1) < 1e-12):
        raise DomainError("the static sum of 1/r^2 diverges at beta = Gamma when alpha = 0")
    if method == "gk15":
        def fb(nodes):
            return _kernel(nodes, alpha)[:, None] * theta_lattice_sum_batch(nodes, betas, offset, geom)

        total, _ = adaptive_gk15(fb, _theta_breaks(s_max), epsabs, epsrel)
    elif method == "quad_vec":
        def f(s):
            return _kernel(s, alpha) * np.atleast_1d(theta_lattice_sum(s, betas, offset, geom))

        total = np.zeros(len(betas), dtype=complex)
        for lo, hi in ((0.0, 1.0), (1.0, s_max)):
            val, err = integrate.quad_vec(f, lo, hi, epsabs=epsabs, epsrel=epsrel, norm="max", limit=400)
            total += val
    else:
        raise DomainError("method must be 'gk15' or 'quad_vec'")
    if not np.all(np.isfinite(total)):
        raise ConvergenceError("theta-kernel quadrature produced non-finite values")
    return _out(total, scalar)


# ---------------------------------------------------------------------------
# Ewald sums of the far field
# ---------------------------------------------------------------------------


def _auto_real_rings(alpha: complex, eta: float, dnorm: float) -> int:
    growth = max(0.0, np.pi**2 * (alpha * alpha).real * eta**2)
    r_cut = eta * np.sqrt(growth + 41.0) + dnorm
    return int(np.ceil(r_cut / (SQRT3 / 2))) + 1


def _auto_recip_rings(alpha: complex, eta: float) -> int:
    p_cut = np.sqrt(max((alpha * alpha).real, 0.0) + 41.0 / (np.pi * eta) ** 2) + 2.0 / 3.0
    return int(np.ceil(p_cut)) + 1


def ewald_realspace(alpha, beta=None, offset: int = 1, eta=None, shells=None,
                    geom: LatticeGeometry2D = HONEYCOMB) -> EwaldPart:
    """(alpha/2) sum_R e^{-2 pi i beta.R} / r [e^{2 pi i alpha r} erfc(r/eta + i pi alpha eta) + (alpha -> -alpha)].

    r = |R + d|; R = 0 is skipped for offset 0. The erfc-exponential products
    are evaluated as exp(-r^2/eta^2 + pi^2 alpha^2 eta^2) erfcx(r/eta +- i pi alpha eta).
    """
    if isinstance(alpha, Sum2DArgs):
        alpha, beta, eta = alpha.alpha, alpha.beta, alpha.eta_value
    alpha = complex(alpha)
    eta = default_eta(alpha) if eta is None else float(eta)
    betas, scalar = _betas(beta)
    d = _offset_vector(offset, geom)
    n_rings = _auto_real_rings(alpha, eta, float(np.linalg.norm(d))) if shells is None else int(shells)
    R, ring = _real_lattice(geom, n_rings + 1)
    r = np.linalg.norm(R + d, axis=1)
    keep = r > 1e-12
    R, ring, r = R[keep], ring[keep], r[keep]
    w = np.pi * alpha * eta
    amp = np.exp(-(r / eta) ** 2 + (w * w)) * (special.erfcx(r / eta + 1j * w) + special.erfcx(r / eta - 1j * w))
    terms = alpha / 2 * amp / r
    inside = ring <= n_rings
    phases = np.exp(-2j * np.pi * betas @ R.T)
    value = phases[:, inside] @ terms[inside]
    tail = float(np.sum(np.abs(terms[~inside])))
    return EwaldPart(_out(value, scalar), n_rings, tail)


def _propagation_root(alpha: complex, p: np.ndarray, branch: str) -> np.ndarray:
    # sqrt(p^2 - alpha^2) continued from real alpha: -i sqrt(alpha^2 - p^2) for
    # open orders (p < Re alpha), principal root for closed ones
    a2 = alpha * alpha
    open_ = p < alpha.real
    sign = -1j if branch == "outgoing" else 1j
    root_open = sign * np.sqrt(a2 - p * p + 0j)
    root_closed = np.sqrt(p * p - a2 + 0j)
    return np.where(open_, root_open, root_closed)


def ewald_reciprocal(alpha, beta=None, offset: int = 1, eta=None, shells=None,
                     geom: LatticeGeometry2D = HONEYCOMB, branch: str = "outgoing") -> EwaldPart:
    """(alpha/A) sum_G erfc(pi eta sqrt(|beta+G|^2 - alpha^2)) / sqrt(...) e^{2 pi i (beta+G).d}.

    A is the cell area (alpha/A = 2 alpha/sqrt(3)). For offset 0 the two
    self-terms -2 alpha e^{pi^2 alpha^2 eta^2}/(sqrt(pi) eta) - 2 i pi alpha^2 erfc(-i pi alpha eta)
    are added. branch='incoming' flips the root of open orders (test switch).
    """
    if branch not in ("outgoing", "incoming"):
        raise DomainError("branch must be 'outgoing' or 'incoming'")
    if isinstance(alpha, Sum2DArgs):
        alpha, beta, eta = alpha.alpha, alpha.beta, alpha.eta_value
    alpha = complex(alpha)
    eta = default_eta(alpha) if eta is None else float(eta)
    betas, scalar = _betas(beta)
    d = _offset_vector(offset, geom)
    n_rings = _auto_recip_rings(alpha, eta) if shells is None else int(shells)
    G, ring = _reciprocal_lattice(geom, n_rings + 1)
    p_vec = betas[:, None, :] + G[None, :, :]
    p = np.linalg.norm(p_vec, axis=2)
    gap = np.abs(p * p - alpha * alpha)
    if np.any(gap < LIGHT_LINE_TOL):
        i, j = np.argwhere(gap < LIGHT_LINE_TOL)[0]
        raise ResonanceError(f"light line |beta+G| = alpha at beta={betas[i]}, G={G[j]}")
    root = _propagation_root(alpha, p, branch)
    terms = special.erfc(np.pi * eta * root) / root * np.exp(2j * np.pi * (p_vec @ d))
    terms *= alpha / geom.cell_area
    inside = ring <= n_rings
    value = np.sum(terms[:, inside], axis=1)
    tail = float(np.max(np.sum(np.abs(terms[:, ~inside]), axis=1)))
    if offset == 0:
        w = np.pi * alpha * eta
        value = value - 2 * alpha / (np.sqrt(np.pi) * eta) * np.exp(w * w) - 2j * np.pi * alpha**2 * special.erfc(-1j * w)
    return EwaldPart(_out(value, scalar), n_rings, tail)


def _unpack(alpha, beta, eta=None, realspace_shells=None, reciprocal_shells=None) -> Sum2DArgs:
    # public entry points take either (alpha, beta, ...) or a Sum2DArgs instance
    if isinstance(alpha, Sum2DArgs):
        return alpha
    return Sum2DArgs(alpha, beta, eta, realspace_shells, reciprocal_shells)


def _lattice_sum(alpha, beta, offset, eta, realspace_shells, reciprocal_shells, geom, branch):
    args = _unpack(alpha, beta, eta, realspace_shells, reciprocal_shells)
    realspace_shells, reciprocal_shells = args.realspace_shells, args.reciprocal_shells
    betas, scalar = _betas(reduce_beta_2d(args.beta, geom))
    eta = args.eta_value
    t = np.atleast_1d(theta_kernel_integral(args.alpha, betas, offset, geom))
    rs = ewald_realspace(args.alpha, betas, offset, eta, realspace_shells, geom)
    rc = ewald_reciprocal(args.alpha, betas, offset, eta, reciprocal_shells, geom, branch)
    total = t + np.atleast_1d(rs.value) + np.atleast_1d(rc.value)
    if not np.all(np.isfinite(total)):
        raise ConvergenceError(f"non-finite 2D lattice sum at alpha={alpha}, eta={eta}")
    return _out(total, scalar)


def s_pm_2d(alpha, beta=None, sign: int = 1, eta=None, realspace_shells=None, reciprocal_shells=None,
            geom: LatticeGeometry2D = HONEYCOMB, branch: str = "outgoing"):
    """S+ (sign=+1) or S- (sign=-1) = sum_R G(|R +- delta|; 2 pi alpha) e^{-2 pi i beta.R}."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    return _lattice_sum(alpha, beta, sign, eta, realspace_shells, reciprocal_shells, geom, branch)


def s0_2d(alpha, beta=None, eta=None, realspace_shells=None, reciprocal_shells=None,
          geom: LatticeGeometry2D = HONEYCOMB, branch: str = "outgoing"):
    """S0 = sum_{R != 0} G(|R|; 2 pi alpha) e^{-2 pi i beta.R}."""
    return _lattice_sum(alpha, beta, 0, eta, realspace_shells, reciprocal_shells, geom, branch)


def lattice_sums_2d(alpha, beta, eta=None, geom: LatticeGeometry2D = HONEYCOMB):
    """(S+, S-, S0) on a stack of momenta in one pass."""
    return (
        s_pm_2d(alpha, beta, 1, eta, geom=geom),
        s_pm_2d(alpha, beta, -1, eta, geom=geom),
        s0_2d(alpha, beta, eta, geom=geom),
    )


# ---------------------------------------------------------------------------
# Symmetry report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuasiInversionReport:
    q_values: tuple
    residuals: np.ndarray  # shape (len(q), 3), relative to max(|lhs|, |rhs|)
    gamma_scaled: np.ndarray  # same residuals relative to |S+(Gamma)|
    max_residual: float


def quasi_inversion_check(alpha, q_magnitudes, eta=None, geom: LatticeGeometry2D = HONEYCOMB) -> QuasiInversionReport:
    """Check S+(K + q b_i) = S-(K - q b_i) e^{-2 pi i/3, +2 pi i/3, 0} for i = 1, 2, 3."""
    q_values = tuple(float(q) for q in q_magnitudes)
    if any(abs(q) > 0.05 for q in q_values):
        raise DomainError("quasi-inversion check is meant for |q| <= 0.05")
    phases = (np.exp(-2j * np.pi / 3), np.exp(2j * np.pi / 3), 1.0)
    basis = (geom.b1, geom.b2, geom.b3)
    plus_pts, minus_pts = [], []
    for q in q_values:
        for b in basis:
            plus_pts.append(geom.K + q * b)
            minus_pts.append(geom.K - q * b)
    lhs = np.atleast_1d(s_pm_2d(alpha, np.array(plus_pts), 1, eta, geom=geom)).reshape(len(q_values), 3)
    rhs = np.atleast_1d(s_pm_2d(alpha, np.array(minus_pts), -1, eta, geom=geom)).reshape(len(q_values), 3)
    rhs = rhs * np.array(phases)[None, :]
    gamma = abs(s_pm_2d(alpha, np.zeros(2), 1, eta, geom=geom))
    diff = np.abs(lhs - rhs)
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    rel = np.where(np.maximum(np.abs(lhs), np.abs(rhs)) > 1e-8 * gamma, diff / scale, diff / gamma)
    return QuasiInversionReport(q_values, rel, diff / gamma, float(np.max(rel)))


# ---------------------------------------------------------------------------
# Direct-sum oracle
# ---------------------------------------------------------------------------


def oracle_direct_2d(alpha, beta, offset: int = 1, ratios=(5, 6, 7, 8, 9, 10), damping: str = "gauss",
                     geom: LatticeGeometry2D = HONEYCOMB, chunk: int = 400_000, return_terms: bool = False):
    """Damped real-space sum of G(|R + d|) e^{-2 pi i beta.R}, extrapolated to zero damping.

    damping='gauss' multiplies by exp(-eps |R|^2); in momentum space this
    smooths the light-circle singularities over a width sqrt(eps)/pi, and the
    ladder keeps that width at 1/ratio of the light-line distance. damping='exp'
    uses exp(-eps |R|) with eps = 2 pi * distance / ratio, which needs far more
    terms. Real alpha (or Im alpha >= 0) only. Intended for verification.
    With return_terms=True the number of lattice vectors summed is returned too.
    """
    alpha = complex(alpha)
    if alpha.imag < 0:
        raise DomainError("the direct sum diverges for Im alpha < 0")
    beta = np.asarray(beta, dtype=float)
    k = 2 * np.pi * alpha
    d = _offset_vector(offset, geom)
    G, _ = _reciprocal_lattice(geom, int(np.ceil(abs(alpha))) + 3)
    dist = float(np.min(np.abs(np.linalg.norm(G + beta, axis=1) - alpha.real)))
    if dist < 1e-2:
        raise DomainError(f"beta={beta} lies within {dist:.2g} of a light circle; the damped sum needs >1e6 rings")
    if damping == "gauss":
        eps = np.array([(np.pi * dist / r) ** 2 for r in ratios])
        r_max = np.sqrt(40.0 / eps.min())
        power = 2
    elif damping == "exp":
        eps = np.array([2 * np.pi * dist / r for r in ratios])
        r_max = 40.0 / eps.min()
        power = 1
    else:
        raise DomainError("damping must be 'gauss' or 'exp'")
    n_rings = int(np.ceil(r_max / (SQRT3 / 2))) + 1
    idx, _ = _ring_indices(n_rings)
    sums = np.zeros(len(eps), dtype=complex)
    n_terms = 0
    for start in range(0, len(idx), chunk):
        block = idx[start:start + chunk]
        R = block[:, :1] * geom.a1 + block[:, 1:] * geom.a2
        Rn = np.linalg.norm(R, axis=1)
        keep = Rn < r_max
        if offset == 0:
            keep &= Rn > 0
        R, Rn = R[keep], Rn[keep]
        n_terms += len(Rn)
        r = np.linalg.norm(R + d, axis=1)
        ph = np.exp(-2j * np.pi * (R @ beta))
        near = np.sum(green_near(r, k) * ph) if len(r) else 0.0
        far = green_far(r, k) * ph if len(r) else np.zeros(0)
        for i, e in enumerate(eps):
            sums[i] += near + np.sum(far * np.exp(-e * Rn**power))
    vander = np.vander(eps, len(eps), increasing=True)
    value = complex(np.linalg.solve(vander, sums)[0])
    return (value, n_terms) if return_terms else value
