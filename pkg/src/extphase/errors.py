"""Exception hierarchy shared by all extphase modules."""


class ExtphaseError(Exception):
    """Base class for all errors raised by this package."""


class DomainEvaluationError(ExtphaseError):
    """A scalar field produced a non-finite value (overflow, division by zero)."""


class IntegrationStallError(ExtphaseError):
    """The adaptive integrator underflowed its minimum step size.

    Carries the last good sample so callers can inspect how far the
    integration got before stalling (e.g. a Kepler collision).
    """

    def __init__(self, message, s_last, state_last):
        super().__init__(message)
        self.s_last = s_last
        self.state_last = state_last


class ImplicitSolveError(ExtphaseError):
    """Damped Newton iteration failed to converge within its iteration budget."""


class DegeneracyError(ExtphaseError):
    """A generating function is degenerate (vanishing Hessian / unsolvable exchange)."""


class DegenerateTimeError(ExtphaseError):
    """The induced time map has vanishing derivative dt'/dt at the probe point."""


class SuperluminalError(ExtphaseError):
    """A boost was requested with |beta| >= 1."""


class UnphysicalMapError(ExtphaseError):
    """The oscillator map was evaluated at xi <= 0 where it has no physical meaning."""


class CoefficientSingularityError(ExtphaseError):
    """Auxiliary-system coefficients hit the q^2 floor (trajectory too close to origin)."""


class CollisionChartError(ExtphaseError):
    """The KS momentum solve is singular at u = 0."""
