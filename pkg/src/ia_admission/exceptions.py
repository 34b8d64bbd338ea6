"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(SimulationError):
    """A network or sweep configuration violates a dimension/feasibility bound."""


class DegenerateChannelError(SimulationError):
    """A channel realization is numerically singular; regenerate the trial."""


class AlignmentViolationError(SimulationError):
    """Interference occupies more dimensions than the alignment solution allows."""


class DegenerateAlignmentError(SimulationError):
    """An effective signal matrix in a rate formula is singular."""


class BelowThresholdError(SimulationError):
    """Not enough transmit antennas for a zero-impact precoder; use the
    constrained designs instead."""


class IAConvergenceError(SimulationError):
    """Alignment iteration stopped without reaching the leakage target.

    Carries the final leakage and iteration count so callers can distinguish
    an infeasible configuration from a genuinely degenerate trial.
    """

    def __init__(self, message, leakage, iterations):
        super().__init__(message)
        self.leakage = float(leakage)
        self.iterations = int(iterations)
