"""Exception types raised by nmqubit."""


class NonFiniteInputError(ValueError):
    """An input matrix or vector contains NaN or infinite entries."""


class BosePoleError(ValueError):
    """Bose occupation requested at or below the chemical potential."""


class NonFiniteStateError(FloatingPointError):
    """The integrated state blew past the overflow guard.

    Usually means the step is too large for the memory kernel; retry with a
    smaller ``dt``.
    """


class DimensionMismatchError(ValueError):
    """Kernel tables or matrices disagree on shape or grid spacing."""


class GridMismatchError(ValueError):
    """Two trajectories are not sampled on the same time grid."""


class ConfigError(ValueError):
    """A run configuration failed validation."""
