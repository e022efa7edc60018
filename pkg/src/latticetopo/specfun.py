"""Complex special functions used by the lattice sums.

E1 and the theta and Lerch functions are implemented here. The Faddeeva
based erfc/erfcx and log-gamma come from ``scipy.special``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError

EULER_GAMMA = 0.57721566490153286061

__all__ = [
    "ComplexValue",
    "Nome",
    "exp_integral_e1",
    "e1_scaled",
    "erfc_complex",
    "erfcx_complex",
    "log_gamma",
    "bernoulli_b2",
    "jacobi_theta2",
    "jacobi_theta3",
    "jacobi_theta_batch",
    "lerch_phi",
    "lerch_phi_ds_at0",
    "lerch_phi1_continued",
    "levin_u",
]


@dataclass(frozen=True)
class ComplexValue:
    """Finite complex number carried as two reals.

    Public functions accept and return plain Python ``complex``; this type is
    the serializable form used in configs and reports.
    """

    re: float
    im: float

    def __post_init__(self):
        if not (np.isfinite(self.re) and np.isfinite(self.im)):
            raise DomainError(f"non-finite complex value ({self.re}, {self.im})")

    @classmethod
    def of(cls, z) -> "ComplexValue":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class Nome:
    """Theta-function nome, given either as ``t`` or as ``c`` with t = exp(-c).

    Supplying ``c`` avoids underflow of t for strongly decaying series.
    """

    t: float | None = None
    c: float | None = None

    def __post_init__(self):
        if (self.t is None) == (self.c is None):
            raise DomainError("give exactly one of t or c")
        if self.t is not None and not (0.0 <= self.t < 1.0):
            raise DomainError(f"nome t={self.t} outside [0, 1)")
        if self.c is not None and not (self.c > 0.0):
            raise DomainError(f"nome exponent c={self.c} must be positive")

    @property
    def exponent(self) -> float:
        """c = -ln t (inf for t = 0)."""
        if self.c is not None:
            return float(self.c)
        return np.inf if self.t == 0.0 else -np.log(self.t)


def _as_nome(q) -> Nome:
    return q if isinstance(q, Nome) else Nome(t=float(q))


def _check_finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise ConvergenceError(f"{what} produced a non-finite value")
    return value


def _ret(value):
    """Return Python complex for 0-d results, arrays otherwise."""
    value = np.asarray(value)
    return complex(value) if value.ndim == 0 else value


# ---------------------------------------------------------------------------
# Exponential integral
# ---------------------------------------------------------------------------

_E1_SERIES_RADIUS = 4.0


def _e1_series(z: np.ndarray) -> np.ndarray:
    # E1(z) = -gamma - ln z - sum_{n>=1} (-z)^n / (n n!)
    term = np.ones_like(z)
    acc = np.zeros_like(z)
    for n in range(1, 400):
        term = term * (-z) / n
        contrib = term / n
        acc = acc + contrib
        if np.all(np.abs(contrib) <= 1e-17 * np.maximum(np.abs(acc), 1e-300)):
            break
    else:
        raise ConvergenceError("E1 power series did not converge")
    return -EULER_GAMMA - np.log(z) - acc


def _e1_scaled_cf(z: np.ndarray, max_iter: int = 20000) -> np.ndarray:
    # modified Lentz evaluation of exp(z) E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
    tiny = 1e-300
    b = z + 1.0
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter):
        an = -float(i * i)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        d = 1.0 / d
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 4e-16):
            return h
    raise ConvergenceError("E1 continued fraction did not converge")


def _e1_prepare(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("E1 is singular at z = 0")
    if np.any((z.imag == 0) & (z.real < 0)):
        raise DomainError("E1 argument on the branch cut (negative real axis)")
    use_series = (np.abs(z) <= _E1_SERIES_RADIUS) | (
        (z.real < 0) & (np.abs(z.imag) <= _E1_SERIES_RADIUS) & (np.abs(z) <= 50.0)
    )
    return z, use_series


def e1_scaled(z):
    """exp(z) * E1(z), finite for large |z| where the factors overflow."""
    z, use_series = _e1_prepare(z)
    out = np.empty_like(z)
    if np.any(use_series):
        zs = z[use_series]
        out[use_series] = np.exp(zs) * _e1_series(zs)
    if np.any(~use_series):
        out[~use_series] = _e1_scaled_cf(z[~use_series])
    return _ret(_check_finite(out, "e1_scaled"))


def exp_integral_e1(z):
    """Principal-branch exponential integral E1(z) = int_1^inf exp(-z t)/t dt.

    Power series for |z| <= 4 (and for moderate |z| hugging the negative real
    axis, where the series has no cancellation), modified-Lentz continued
    fraction elsewhere. Raises DomainError at z = 0 and on the cut z < 0.
    """
    z, use_series = _e1_prepare(z)
    out = np.empty_like(z)
    if np.any(use_series):
        out[use_series] = _e1_series(z[use_series])
    if np.any(~use_series):
        zc = z[~use_series]
        out[~use_series] = np.exp(-zc) * _e1_scaled_cf(zc)
    return _ret(_check_finite(out, "exp_integral_e1"))


# ---------------------------------------------------------------------------
# Error function, log-gamma, Bernoulli
# ---------------------------------------------------------------------------


def erfc_complex(z):
    """Complementary error function for complex arguments (Faddeeva based)."""
    return _ret(special.erfc(np.asarray(z, dtype=complex)))


def erfcx_complex(z):
    """Scaled complementary error function exp(z^2) erfc(z)."""
    return _ret(special.erfcx(np.asarray(z, dtype=complex)))


def log_gamma(z):
    """Principal branch of ln Gamma(z), continuous on the right half-plane."""
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise DomainError("log-gamma pole at a non-positive integer")
    return _ret(special.loggamma(z))


def bernoulli_b2(x):
    """Second Bernoulli polynomial x^2 - x + 1/6."""
    return x * x - x + 1.0 / 6.0


# ---------------------------------------------------------------------------
# Jacobi theta functions
# ---------------------------------------------------------------------------


def _theta_series(z, q, half: bool):
    nome = _as_nome(q)
    z = np.asarray(z, dtype=complex)
    c = nome.exponent
    if np.isinf(c):
        return _ret(np.zeros_like(z) if half else np.ones_like(z))
    y = np.max(np.abs(z.imag)) if z.size else 0.0
    # peak of exp(-c m^2 + 2 m |Im z|) sits at m = |Im z| / c
    if y * y / c > 690.0:
        raise DomainError("theta series terms overflow before decaying; |Im z| too large for this nome")
    shift = 0.5 if half else 0.0
    acc = np.zeros_like(z) if half else np.ones_like(z)
    n_min_terms = 3
    for n in range(0, 1_000_000):
        m = n + shift
        if m == 0:
            continue
        amp = np.exp(-c * m * m)
        term = 2.0 * amp * np.cos(2.0 * m * z)
        acc = acc + term
        bound = np.exp(-c * m * m + 2.0 * m * y)
        past_peak = m > y / c
        if n + 1 >= n_min_terms and past_peak and np.all(bound <= 1e-16 * np.maximum(np.abs(acc), 1e-300)):
            return _ret(_check_finite(acc, "theta"))
    raise ConvergenceError("theta series failed the stopping rule after 1e6 terms")


def jacobi_theta3(z, q):
    """theta_3(z, t) = sum_n t^(n^2) exp(2 i n z); q is t in [0,1) or a Nome."""
    return _theta_series(z, q, half=False)


def jacobi_theta2(z, q):
    """theta_2(z, t) = sum_n t^((n+1/2)^2) exp((2n+1) i z)."""
    return _theta_series(z, q, half=True)


def jacobi_theta_batch(z, c, half: bool = False):
    """theta_3 (half=False) or theta_2 (half=True) with nome exp(-c), z and c broadcast together.

    All elements share one term count: the series is cut where
    exp(-c m^2 + 2 m |Im z|) < 1e-18 for every element.
    """
    z = np.asarray(z, dtype=complex)
    c = np.asarray(c, dtype=float)
    if np.any(~(c > 0)):
        raise DomainError("nome exponents must be positive")
    z, c = np.broadcast_arrays(z, c)
    y = np.abs(z.imag)
    if np.any(y * y / c > 690.0):
        raise DomainError("theta series terms overflow before decaying; |Im z| too large for this nome")
    big = -np.log(1e-18)
    m_max = int(np.ceil(np.max((y + np.sqrt(y * y + c * big)) / c))) + 1
    shift = 0.5 if half else 0.0
    acc = np.zeros(z.shape, dtype=complex) if half else np.ones(z.shape, dtype=complex)
    for n in range(0, m_max + 1):
        m = n + shift
        if m == 0:
            continue
        # 2 e^{-c m^2} cos(2 m z) with the exponents combined so cosh(2 m Im z) cannot overflow
        acc += np.exp(-c * m * m + 2j * m * z) + np.exp(-c * m * m - 2j * m * z)
    return _check_finite(acc, "theta")


# ---------------------------------------------------------------------------
# Lerch transcendent
# ---------------------------------------------------------------------------


def levin_u(terms: np.ndarray, k: int, n0: int = 0, b: float = 1.0) -> complex:
    """Levin u-transform of order k built on partial sums n0..n0+k."""
    partial = np.cumsum(terms)
    num = 0.0 + 0.0j
    den = 0.0 + 0.0j
    for j in range(k + 1):
        n = n0 + j
        w = (n + b) * terms[n]
        coef = (-1) ** j * comb(k, j) * ((n + b) / (n0 + k + b)) ** (k - 1)
        num += coef * partial[n] / w
        den += coef / w
    return num / den


_LEVIN_N0 = 5
_DIRECT_RADIUS = 0.95  # plain summation up to here (at most ~740 terms)
_LEVIN_ORDERS = range(8, 23)
_LEVIN_AGREE = 1e-10


def _levin_sum(terms: np.ndarray):
    """Best Levin estimate and the consecutive-order spread at that order."""
    if np.any(terms == 0):
        return None, np.inf
    vals = [levin_u(terms, k, n0=_LEVIN_N0) for k in _LEVIN_ORDERS]
    diffs = [abs(vals[i] - vals[i - 1]) for i in range(1, len(vals))]
    i = int(np.argmin(diffs))
    return vals[i + 1], diffs[i]


def _quad_complex(f, a, b):
    # tolerances sit at the float64 floor; quad's roundoff warnings are expected,
    # a genuinely poor error estimate is not
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, complex_func=True, epsabs=1e-15, epsrel=1e-13, limit=500)
    if not np.isfinite(val) or abs(err) > 1e-9 * max(abs(val), 1.0):
        raise ConvergenceError(f"quadrature error estimate {err:.3g} for value {val}")
    return val


def _phi_integral(z: complex, s: complex, a: complex) -> complex:
    # Phi(z,s,a) = 1/Gamma(s) int_0^inf t^(s-1) exp(-a t) / (1 - z exp(-t)) dt
    if np.real(s) <= 0:
        raise ConvergenceError("integral fallback needs Re s > 0")
    f = lambda t: t ** (s - 1) * np.exp(-a * t) / (1.0 - z * np.exp(-t))
    val = _quad_complex(f, 0.0, 1.0) + _quad_complex(f, 1.0, np.inf)
    return complex(val / special.gamma(s))


def _check_lerch_args(z, a):
    if z == 1:
        raise DomainError("Lerch transcendent is singular at z = 1")
    if np.real(a) <= 0:
        raise DomainError("Lerch parameter a must have Re a > 0")


def lerch_phi(z, s, a) -> complex:
    """Lerch transcendent Phi(z, s, a) = sum_{n>=0} z^n (n+a)^(-s) for |z| <= 1.

    On and near the unit circle the series is Abel-summed by Levin-u
    acceleration; if consecutive orders do not agree to 1e-10 the integral
    representation (Re s > 0) is used instead.
    """
    z, s, a = complex(z), complex(s), complex(a)
    _check_lerch_args(z, a)
    if abs(z) > 1.0 + 1e-15:
        raise DomainError("lerch_phi requires |z| <= 1; use lerch_phi1_continued for s = 1")
    if z == 0:
        return complex(np.exp(-s * np.log(a)))
    if abs(z) <= _DIRECT_RADIUS:
        n_terms = int(np.ceil(38.0 / -np.log(abs(z)))) + 2
        n = np.arange(n_terms)
        return complex(np.sum(z**n * np.exp(-s * np.log(n + a))))
    n = np.arange(_LEVIN_N0 + max(_LEVIN_ORDERS) + 1)
    terms = z**n * np.exp(-s * np.log(n + a))
    value, spread = _levin_sum(terms)
    if spread <= _LEVIN_AGREE * max(abs(value), 1.0):
        return complex(value)
    return _phi_integral(z, s, a)


def lerch_phi_ds_at0(z, a) -> complex:
    """d/ds Phi(z, s, a) at s = 0, i.e. the Abel sum of -sum z^n ln(n + a), |z| = 1."""
    z, a = complex(z), complex(a)
    _check_lerch_args(z, a)
    if abs(abs(z) - 1.0) > 1e-12:
        raise DomainError("lerch_phi_ds_at0 is defined here for |z| = 1")
    n = np.arange(_LEVIN_N0 + max(_LEVIN_ORDERS) + 1)
    terms = -(z**n) * np.log(n + a)
    value, spread = _levin_sum(terms)
    if spread <= _LEVIN_AGREE * max(abs(value), 1.0):
        return complex(value)
    return _dphi0_integral(z, a)


def _dphi0_integral(z: complex, a: complex) -> complex:
    # dPhi/ds(z,0,a) = -ln(a)/(1-z) + int_0^inf e^{-at} z (e^{-t}-1) / (t (1 - z e^{-t}) (1 - z)) dt
    def f(t):
        em1 = np.expm1(-t) / t if t > 0 else -1.0
        return np.exp(-a * t) * z * em1 / ((1.0 - z * np.exp(-t)) * (1.0 - z))

    val = _quad_complex(f, 0.0, 1.0) + _quad_complex(f, 1.0, np.inf)
    return complex(-np.log(a) / (1.0 - z) + val)


def lerch_phi1_continued(z, a, side: int = 0) -> complex:
    """Phi(z, 1, a) continued to all z off [1, inf).

    Uses lerch_phi for |z| <= 1 and the integral
    int_0^inf exp(-a t) / (1 - z exp(-t)) dt outside the unit disc.
    On the cut z > 1, side=+1 or -1 selects the limit from z + i0 or z - i0;
    side=0 raises there.
    """
    z, a = complex(z), complex(a)
    _check_lerch_args(z, a)
    if abs(z) <= 1.0:
        return lerch_phi(z, 1.0, a)
    if z.imag == 0 and z.real >= 1.0:
        if side not in (1, -1):
            raise DomainError("Phi(z,1,a) has a branch cut on z in [1, inf)")
        return _phi1_rotated(z, a, side)
    if abs(np.sin(np.pi * a)) > 0.2 and abs(z) > 2.0:
        return _phi1_reflected(z, a)
    return _phi1_rotated(z, a)


def _phi1_reflected(z: complex, a: complex) -> complex:
    # sum over all n in Z of z^n/(n+a) = pi/sin(pi a) e^{i pi a (1 - 2 lam)}, z = e^{2 pi i lam},
    # 0 < Re lam < 1; the n < 0 half is z^{-1} Phi(1/z, 1, 1-a), geometric for |z| > 1
    lz = np.log(z)
    if lz.imag < 0:
        lz += 2j * np.pi
    lam = lz / (2j * np.pi)
    full = np.pi / np.sin(np.pi * a) * np.exp(1j * np.pi * a * (1 - 2 * lam))
    w = 1.0 / z
    b = 1.0 - a
    head = 0j
    shift = 0
    while b.real + shift <= 0:
        head += w**shift / (shift + b)
        shift += 1
    tail = w**shift * lerch_phi(w, 1.0, b + shift) if shift or b.real > 0 else 0j
    return complex(full + w * (head + tail))


def _phi1_rotated(z: complex, a: complex, side: int = 0) -> complex:
    # int_0^inf e^{-at}/(1 - z e^{-t}) dt along the ray t = u e^{i theta}. The poles
    # t = ln z + 2 pi i k approach the real axis when arg z -> 0, so the ray turns
    # away from the nearest one; no pole is crossed, so the value is unchanged.
    lz = np.log(z)
    gap = 2 * np.pi - abs(lz.imag)
    # on the cut itself the pole at t = ln z sits on the real axis; side says which way to pass it
    sgn = side if side else np.sign(lz.imag)
    theta = -sgn * 0.5 * np.arctan2(gap, lz.real)
    theta = float(np.clip(theta, -np.pi / 4, np.pi / 4))
    if (a * np.exp(1j * theta)).real <= 0:
        return _phi_integral(z, 1.0, a)
    rot = np.exp(1j * theta)

    def f(u):
        t = u * rot
        return rot * np.exp(-a * t) / (1.0 - z * np.exp(-t))

    scale = max(1.0, abs(lz.real))
    return complex(_quad_complex(f, 0.0, scale) + _quad_complex(f, scale, np.inf))
