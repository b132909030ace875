"""Exception taxonomy shared across the package."""


class JelliumError(Exception):
    """Base class for all package-specific errors."""


class InadmissibleGas(JelliumError):
    """The Gibbs measure does not exist: requires total charge alpha > n - 1."""


class NonIntegrableBackground(JelliumError):
    """Background measure has a divergent first absolute moment."""


class UnsortedInput(JelliumError):
    """Positions were expected in descending order."""


class NonNormalizableDensity(JelliumError):
    """The tilted potential does not grow at both ends; exp(-beta*V) has infinite mass."""


class MaxAttemptsExceeded(JelliumError):
    """A rejection sampler ran out of its attempt budget."""

    def __init__(self, message, attempted=None, accepted=None):
        super().__init__(message)
        self.attempted = attempted
        self.accepted = accepted


class DepthTooSmall(JelliumError):
    """Conditioning depth m must be at least the number of requested coordinates."""


class WindowTooDeep(JelliumError):
    """Tail-fit window reaches survival levels with too few samples."""


class ConfigInvalid(JelliumError):
    """Experiment configuration failed schema or admissibility validation."""

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer

    def __str__(self):
        base = super().__str__()
        if self.pointer:
            return f"{base} (at {self.pointer})"
        return base
