"""Exception types raised by the library."""


class VolbreakError(Exception):
    """Base class for all library errors."""


class ConfigError(VolbreakError):
    """Invalid configuration or arguments."""


class DataError(VolbreakError):
    """Malformed or unusable input data."""


class EmptyWindowError(VolbreakError):
    """No sample point carries kernel weight at the requested query point."""


class DegenerateSampleError(VolbreakError):
    """The sample carries no variance information (normalizer is zero)."""


class SimulationDivergedError(VolbreakError):
    """A simulated recursion produced a non-finite value."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"simulation produced a non-finite value at step index {index}")


class TableFormatError(VolbreakError):
    """A null-distribution table file is malformed or incompatible."""
