"""Exception hierarchy shared by every module of the toolkit."""


class WaveKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(WaveKitError, ValueError):
    """An input lies outside the physical domain (v <= 0, gamma <= 1, ...)."""


class InvalidRequestError(WaveKitError, ValueError):
    """A request violates an operation precondition."""


class DegeneracyError(WaveKitError):
    """The eigenstructure degenerates (umbilic point or vanishing eigenvector).

    ``coincidence`` names which pair of speeds collided and ``last_sample``
    carries the last good curve sample when raised during integration.
    """

    def __init__(self, message, coincidence=None, last_sample=None):
        super().__init__(message)
        self.coincidence = coincidence
        self.last_sample = last_sample


class ResonanceError(WaveKitError):
    """The transverse-field jump denominator vanishes (v_r = beta^2 / sigma^2)."""


class NoShockError(WaveKitError):
    """No admissible root of the Hugoniot closure was found."""


class AmbiguousShockError(WaveKitError):
    """More than one admissible root was found; ``roots`` lists them all."""

    def __init__(self, message, roots):
        super().__init__(message)
        self.roots = tuple(roots)


class InadmissibleWaveError(WaveKitError):
    """A wave fails Lax, sign or dissipation checks."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class RHResidualError(WaveKitError):
    """The Rankine-Hugoniot residual is too large for an identity to apply."""


class StiffnessError(WaveKitError):
    """The adaptive integrator step size underflowed."""


class NoCrossingError(WaveKitError):
    """No sign change of F_a was detected above the volume floor.

    ``trace`` holds the full curve and ``f_values`` the functional along it.
    """

    def __init__(self, message, trace=None, f_values=()):
        super().__init__(message)
        self.trace = trace
        self.f_values = tuple(f_values)


class DegenerateFunctionalError(WaveKitError):
    """F_a already vanishes at the curve origin (e.g. U_l == U_r)."""


class InconclusiveError(WaveKitError):
    """The criterion's hypotheses are unmet; this is not a contraction claim."""
