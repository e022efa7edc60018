"""Exception hierarchy shared by all modules."""


class LatticeTopoError(Exception):
    """Base class for every error raised by the package."""


class DomainError(LatticeTopoError, ValueError):
    """Input outside the domain of a function (branch cut, pole, bad range)."""


class ResonanceError(DomainError):
    """Evaluation on or too close to a light line, where a lattice sum diverges."""


class ConvergenceError(LatticeTopoError, ArithmeticError):
    """A series, quadrature or iteration failed to reach its target accuracy."""


class DegeneracyError(LatticeTopoError, ArithmeticError):
    """Two bands coincide (|h| ~ 0), so eigenvectors are undefined."""


class GapClosedError(LatticeTopoError, ArithmeticError):
    """A topological invariant was requested where the gap is closed."""


class NonChiralError(DomainError):
    """The chiral-symmetric solution was requested but h3 does not vanish."""
