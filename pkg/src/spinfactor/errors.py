"""Exception types shared across the library."""


class SpinFactorError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SpinFactorError, ValueError):
    """Operands live in spin factors of different dimensions."""


class ConsistencyError(SpinFactorError):
    """An internal numerical invariant was violated (indicates a bug or
    catastrophically ill-conditioned input, not a caller error)."""


class QuasiInverseUndefined(SpinFactorError):
    """The pair (x, y) is not quasi-invertible: |r(x, y)| is below tolerance."""


class PreconditionViolation(SpinFactorError, ValueError):
    """An argument fails a documented structural precondition."""


class InvalidIsometry(PreconditionViolation):
    """A matrix is not of the form exp(i*theta) * O with O real orthogonal."""


class DegenerateInput(SpinFactorError, ValueError):
    """Input too close to zero (or to the interior) for the requested
    decomposition."""


class DomainError(SpinFactorError, ValueError):
    """Input lies outside the domain of definition of the map."""


class OrthogonalityViolated(SpinFactorError):
    """The iterated family {T^k e} is not orthogonal at the checked tolerance."""


class NoRoot(SpinFactorError):
    """No level crossing h(u) = 1/t^2 was bracketed on the scanned grid.

    Carries the partial scan data so callers can report the profile.
    """

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data


class NoConvergence(SpinFactorError):
    """Iteration budget exhausted before the stopping rule was met."""


class WitnessNotFound(SpinFactorError):
    """Perturbation search budget exhausted without a quasi-invertible witness."""


class ConfigError(SpinFactorError, ValueError):
    """Invalid experiment configuration."""
