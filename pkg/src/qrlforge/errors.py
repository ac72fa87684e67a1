"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Requested register size exceeds the supported qubit range."""


class WireError(IndexError):
    """Gate or observable references a qubit outside the register."""


class UnsupportedBindingError(ValueError):
    """A trainable parameter enters the circuit through a non-rotation gate."""


class InvalidActionError(RuntimeError):
    """Action is not permitted in the current environment state."""


class EpisodeDoneError(RuntimeError):
    """step() called after the episode terminated."""


class ConfigError(ValueError):
    """Run configuration is missing keys or combines incompatible options."""


class ArchitectureMismatchError(ValueError):
    """Two agents do not share the same parameter layout."""


class MetricsOrderError(ValueError):
    """Metric records violate the monotonicity invariants."""


class TrialError(RuntimeError):
    """A training trial failed; carries the trial context in its message."""
