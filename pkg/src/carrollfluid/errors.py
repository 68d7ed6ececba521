"""Exception hierarchy for carrollfluid."""


class CarrollError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CarrollError, ValueError):
    pass


class LiquescenceError(CarrollError, ValueError):
    """Raised when sigma <= 0 (the liquescence locus or beyond)."""


class DegeneracyError(CarrollError, ValueError):
    """Raised on the loss of strict hyperbolicity, beta == +-sigma**theta."""


class InversionError(CarrollError, ValueError):
    """Raised when Riemann invariants with w1 <= w2 are mapped back to (sigma, beta)."""


class ClassificationError(CarrollError, ValueError):
    pass


class DataError(CarrollError, ValueError):
    pass


class GateError(CarrollError):
    """Initial data failed the invariant-region admissibility gate."""

    def __init__(self, message, reasons=()):
        super().__init__(message)
        self.reasons = list(reasons)


class RegionError(CarrollError):
    """A state left the invariant region during a computation."""


class HorizonError(CarrollError):
    """Requested time is at or beyond the classical-solution horizon."""

    def __init__(self, message, t_star=None):
        super().__init__(message)
        self.t_star = t_star


class BracketError(CarrollError):
    """Foot-point root finding could not bracket a unique root."""


class BlowupError(CarrollError):
    """A gradient blew up before the requested time."""

    def __init__(self, message, t_star):
        super().__init__(message)
        self.t_star = t_star


class IterationError(CarrollError):
    """Fixed-point iteration did not converge."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class TimeStepError(CarrollError):
    """Time step violates the CFL restriction."""


class ConfigError(CarrollError):
    pass
