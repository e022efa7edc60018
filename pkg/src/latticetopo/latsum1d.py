"""Closed-form lattice sums of the 1D two-site chain and a direct-sum oracle.

The inter-species sum S+(alpha, beta, delta) = sum_n G(|n + delta|) e^{-2 pi i beta n}
splits along the three terms of G into S1 (static 1/r^2 part), S2 (the E1
bracket) and S3 (outgoing far field). S-(alpha, beta, delta) = S+(alpha, -beta, delta)
by n -> -n. The intra-species sum S0 omits n = 0.

All closed forms accept complex alpha: each ingredient (log-gamma, principal
logs, Lerch functions) is continued analytically from real alpha, which places
the branch cuts vertically below the light-line points Re(alpha +- beta) in Z.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResonanceError
from .greens import green_far, green_near
from .specfun import (
    bernoulli_b2,
    lerch_phi1_continued,
    lerch_phi_ds_at0,
    log_gamma,
)

__all__ = [
    "Sum1DArgs",
    "reduce_beta_1d",
    "s1_plus",
    "s2_plus",
    "s3_plus",
    "s_pm_1d",
    "s0_1d",
    "OracleResult",
    "oracle_direct_1d",
    "oracle_extrapolated_1d",
    "light_line_distance_1d",
]

RESONANCE_TOL = 1e-9
# below this the Lerch derivative at z = e^{2 pi i delta} -> 1 loses accuracy
MIN_OFFSET = 1e-5


def reduce_beta_1d(beta: float) -> float:
    """Map beta into the first Brillouin zone [-1/2, 1/2)."""
    return float((beta + 0.5) % 1.0 - 0.5)


@dataclass(frozen=True)
class Sum1DArgs:
    """Arguments of the 1D sums: complex energy alpha, momentum beta in the FBZ, offset delta."""

    alpha: complex
    beta: float
    delta: float | None = None

    def __post_init__(self):
        a = complex(self.alpha)
        object.__setattr__(self, "alpha", a)
        if not (-0.5 <= self.beta <= 0.5):
            raise DomainError(f"beta={self.beta} outside the first Brillouin zone")
        if self.delta is not None and not (MIN_OFFSET <= self.delta <= 1.0 - MIN_OFFSET):
            raise DomainError(f"delta={self.delta} must lie in [{MIN_OFFSET}, 1 - {MIN_OFFSET}]")
        if 1.0 + a.real - abs(self.beta) <= 0:
            raise DomainError("need 1 + Re(alpha) +- beta > 0")


def _args(alpha, beta, delta=None) -> Sum1DArgs:
    return Sum1DArgs(complex(alpha), float(beta), None if delta is None else float(delta))


def _guard_resonance(alpha: complex, beta: float):
    for sgn in (1, -1):
        if abs(np.exp(2j * np.pi * (alpha + sgn * beta)) - 1.0) < RESONANCE_TOL:
            raise ResonanceError(
                f"light-line resonance: exp(2 pi i (alpha {'+' if sgn > 0 else '-'} beta)) = 1 "
                f"at alpha={alpha}, beta={beta}"
            )


def light_line_distance_1d(alpha, beta) -> float:
    """min_m |alpha +- beta - m|: distance to the nearest light-line singularity."""
    alpha = complex(alpha)
    d = np.inf
    for sgn in (1, -1):
        x = alpha + sgn * beta
        m = np.round(x.real)
        d = min(d, abs(x - m))
    return float(d)


def s1_plus(alpha, beta, delta) -> complex:
    """Static part sum_n e^{-2 pi i beta n} / (2 pi^2 (n + delta)^2)."""
    a = _args(alpha, beta, delta)
    cot = np.cos(np.pi * a.delta) / np.sin(np.pi * a.delta)
    b = a.beta
    return complex(
        np.exp(2j * np.pi * b * a.delta) * (0.5 + 0.5 * cot**2 - abs(b) - 1j * b * cot)
    )


def s2_plus(alpha, beta, delta) -> complex:
    """E1-bracket part, expressed through d/ds Phi(z, 0, a) on the unit circle."""
    a = _args(alpha, beta, delta)
    al, b = a.alpha, a.beta
    if al == 0:
        return 0j
    z = np.exp(2j * np.pi * a.delta)
    bracket = (
        np.log(al + abs(b))
        - z * lerch_phi_ds_at0(z, 1.0 + al + b)
        - (1.0 / z) * lerch_phi_ds_at0(1.0 / z, 1.0 + al - b)
    )
    return complex(al * np.exp(2j * np.pi * b * a.delta) * bracket)


CUT_TOL = 1e-12  # |Re x - m| below this counts as on the cut


def _phase(x: complex):
    """z = e^{2 pi i x} and the side of the cut z > 1 to use.

    For Im x < 0 and Re x an integer, z is real and > 1 and the continued sums
    jump as Re x crosses the integer. The value taken there is the limit from
    Re x -> m from below (z - i0), the guided side |beta| > light line.
    """
    x = complex(x)
    m = np.round(x.real)
    if x.imag < 0 and abs(x.real - m) < CUT_TOL:
        return complex(np.exp(-2 * np.pi * x.imag)), -1
    return np.exp(2j * np.pi * x), 0


def _log_one_minus(x: complex) -> complex:
    z, side = _phase(x)
    if side:
        # 1 - z = -(z - 1) approached from Im(1 - z) = +0
        return complex(np.log(z.real - 1.0) + 1j * np.pi)
    return complex(np.log(1 - z))


def s3_plus(alpha, beta, delta) -> complex:
    """Far-field part sum_n alpha e^{2 pi i alpha |n + delta|} / |n + delta| e^{-2 pi i beta n}."""
    a = _args(alpha, beta, delta)
    al, b, d = a.alpha, a.beta, a.delta
    if al == 0:
        return 0j
    _guard_resonance(al, b)
    own = al * np.exp(2j * np.pi * al * d) / d
    z_r, side_r = _phase(al - b)
    z_l, side_l = _phase(al + b)
    right = np.exp(2j * np.pi * (al * (1 + d) - b)) * lerch_phi1_continued(z_r, 1.0 + d, side_r)
    left = np.exp(2j * np.pi * (al * (1 - d) + b)) * lerch_phi1_continued(z_l, 1.0 - d, side_l)
    return complex(own + al * (right + left))


def s_pm_1d(alpha, beta, delta, sign: int = +1) -> complex:
    """S+ (sign=+1) or S- (sign=-1); beta is first reduced into the FBZ.

    S-(alpha, beta, delta) is evaluated as S+(alpha, -beta, delta).
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    b = reduce_beta_1d(sign * float(beta))
    return s1_plus(alpha, b, delta) + s2_plus(alpha, b, delta) + s3_plus(alpha, b, delta)


def s0_1d(alpha, beta) -> complex:
    """Intra-species sum over n != 0 of G(|n|) e^{-2 pi i beta n}."""
    a = _args(alpha, reduce_beta_1d(float(beta)))
    al, b = a.alpha, abs(a.beta)
    if al == 0:
        return complex(bernoulli_b2(b))
    _guard_resonance(al, b)
    val = (
        bernoulli_b2(b)
        - 2 * al**2
        + 2 * al**2 * np.log(al)
        + al * np.log(2 * np.pi * (al + b))
        - al * log_gamma(1 + al + b)
        - al * log_gamma(1 + al - b)
        - al * _log_one_minus(al + b)
        - al * _log_one_minus(al - b)
    )
    return complex(val)


# ---------------------------------------------------------------------------
# Direct-sum oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    value: complex
    tail_bound: float
    n_terms: int


def _oracle_terms(alpha: complex, beta, delta, n_cut: int):
    # (|n|, undamped near-part sum, far-part terms) of the truncated lattice sum
    k = 2 * np.pi * alpha
    n = np.arange(-n_cut, n_cut + 1)
    if delta is None:
        n = n[n != 0]
        r = np.abs(n).astype(float)
    else:
        r = np.abs(n + float(delta))
    phase = np.exp(-2j * np.pi * beta * n)
    near = green_near(r, k) * phase
    far = green_far(r, k) * phase
    return np.abs(n), near, far


def _tail_bound(alpha: complex, eps: float, n_cut: int) -> float:
    k = 2 * np.pi * alpha
    decay = eps + 2 * np.pi * max(alpha.imag, 0.0)
    tail = 2 * (abs(k) / (2 * np.pi) + 1) * np.exp(-decay * n_cut) / (n_cut * (1 - np.exp(-decay)))
    return float(tail + 2.0 / (3 * max(abs(k), 1.0) ** 2 * n_cut**3))


def oracle_direct_1d(alpha, beta, delta, n_cut: int, eps: float, damp_near: bool = False) -> OracleResult:
    """Damped partial sum sum_{|n| <= N} G(|n + delta|) e^{-2 pi i beta n - eps |n|}.

    delta=None gives the S0 summand (n = 0 omitted). By default only the
    oscillating far-field part of G is damped: the near part decays like r^-4
    and converges absolutely, while damping it would add an eps^3 ln(eps)
    term that polynomial extrapolation cannot remove. The tail bound uses
    |G(r)| <= (|k|/(2 pi) + 1) e^{-2 pi Im(alpha) r} / r for r >= 1.
    Requires Im(alpha) >= 0 for the undamped sum to be meaningful.
    """
    if n_cut < 1000:
        raise DomainError("oracle cutoff must be at least 1000")
    if not eps > 0:
        raise DomainError("damping eps must be positive")
    alpha = complex(alpha)
    absn, near, far = _oracle_terms(alpha, beta, delta, n_cut)
    damp = np.exp(-eps * absn)
    near_sum = np.sum(near * damp) if damp_near else np.sum(near)
    value = complex(near_sum + np.sum(far * damp))
    return OracleResult(value, _tail_bound(alpha, eps, n_cut), int(absn.size))


def oracle_extrapolated_1d(alpha, beta, delta, eps_seq=None, n_cut=None) -> complex:
    """Richardson extrapolation eps -> 0 of oracle_direct_1d.

    The damped sum is analytic in eps within radius 2 pi * (light-line
    distance), so the default eps ladder starts at a fifth of that radius
    and halves six times (seven levels, ~1e-12 agreement with the closed forms).
    The lattice terms are computed once and reused for every level.
    """
    if eps_seq is None:
        rho = 2 * np.pi * light_line_distance_1d(alpha, beta)
        if rho < 1e-6:
            raise ResonanceError(f"(alpha, beta) = ({alpha}, {beta}) sits on a light line")
        e0 = min(0.2 * rho, 0.2)
        eps_seq = [e0 / 2**i for i in range(7)]
    eps_seq = np.asarray(eps_seq, dtype=float)
    if np.any(eps_seq <= 0):
        raise DomainError("damping eps must be positive")
    if n_cut is None:
        n_cut = max(1000, int(np.ceil(40.0 / eps_seq.min())))
    absn, near, far = _oracle_terms(complex(alpha), beta, delta, n_cut)
    near_sum = np.sum(near)
    vals = np.array([near_sum + np.sum(far * np.exp(-e * absn)) for e in eps_seq])
    vander = np.vander(eps_seq, len(eps_seq), increasing=True)
    return complex(np.linalg.solve(vander, vals)[0])
