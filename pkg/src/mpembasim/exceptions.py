"""Exception hierarchy shared across the package."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SimulationError, ValueError):
    """Invalid or out-of-range physical parameters."""


class UnstableSystemError(SimulationError):
    """The drift matrix has a non-decaying mode; no unique steady state."""


class DecompositionError(SimulationError):
    """Eigendecomposition failed or the generator is too close to defective."""


class ConfigError(SimulationError, ValueError):
    """Malformed run configuration; the message names the offending field."""
