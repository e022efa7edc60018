"""Scalar radiative Green's function of the dimensionless model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import e1_scaled

__all__ = ["GreenArgs", "green_scalar", "green_near", "green_far"]


@dataclass(frozen=True)
class GreenArgs:
    """Distance r (lattice units) and wavenumber k = 2 pi alpha."""

    r: float
    k: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"Green's function needs r > 0, got {self.r}")
        if np.real(self.k) < 0:
            raise DomainError(f"wavenumber must be non-negative, got {self.k}")


def _prepare(r, k):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("Green's function needs r > 0")
    return r, complex(k)


def green_near(r, k):
    """Non-oscillating part 1/(2 pi^2 r^2) - (ik/4 pi^2 r)[e^{ikr}E1(ikr) - e^{-ikr}E1(-ikr)]."""
    r, k = _prepare(r, k)
    if k == 0:
        out = 1.0 / (2 * np.pi**2 * r**2)
    else:
        x = 1j * k * r
        bracket = e1_scaled(x) - e1_scaled(-x)
        out = 1.0 / (2 * np.pi**2 * r**2) - 1j * k / (4 * np.pi**2 * r) * bracket
    return complex(out) if np.ndim(out) == 0 else out


def green_far(r, k):
    """Outgoing far-field part k e^{ikr} / (2 pi r)."""
    r, k = _prepare(r, k)
    out = k * np.exp(1j * k * r) / (2 * np.pi * r)
    return complex(out) if np.ndim(out) == 0 else out


def green_scalar(r, k=None):
    """G(r; k) = near + far part, with k = 2 pi alpha.

    Accepts a GreenArgs instance or (r, k) with r scalar or array. For real k
    the E1 arguments +-ikr lie on the imaginary axis, away from the cut. Complex
    k is accepted for analytic-continuation checks.
    """
    if isinstance(r, GreenArgs):
        r, k = r.r, r.k
    if k is None:
        raise DomainError("wavenumber k is required")
    near = green_near(r, k)
    far = green_far(r, k)
    return near + far
