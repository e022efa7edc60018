"""Band topology of two-species resonant atomic lattices with all-to-all dipolar coupling."""

__version__ = "0.1.0"

from . import bloch, diracedge, errors, greens, latsum1d, latsum2d, specfun, topology  # noqa: E402
from .bloch import LatticeParams, alpha_bar, band_grid, band_path, bands, h_vector  # noqa: E402
from .errors import (  # noqa: E402
    ConvergenceError, DegeneracyError, DomainError, GapClosedError, LatticeTopoError, NonChiralError, ResonanceError,
)

__all__ = [
    "__version__", "bloch", "diracedge", "errors", "greens", "latsum1d", "latsum2d", "specfun", "topology",
    "LatticeParams", "alpha_bar", "band_grid", "band_path", "bands", "h_vector",
    "ConvergenceError", "DegeneracyError", "DomainError", "GapClosedError", "LatticeTopoError", "NonChiralError",
    "ResonanceError",
]
