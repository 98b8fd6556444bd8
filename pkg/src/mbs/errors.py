"""Exception hierarchy shared by all mbs subpackages."""


class MbsError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(MbsError):
    """API misused: re-lock by holder, unlock without holding, bad nesting order."""


class ConfigurationError(MbsError):
    """Invalid static configuration (core id out of range, bad benchmark sizes)."""


class PlatformError(MbsError):
    """The operating system rejected a required operation (e.g. affinity pinning)."""


class CapabilityError(MbsError):
    """An optional facility (hardware counters) is unavailable on this platform."""


class ValidationError(MbsError):
    """A task set, resource wiring, or input file failed validation."""


class MutexPoisonedError(MbsError):
    """A previous critical section on this mutex raised; the failure is carried along."""

    def __init__(self, cause: BaseException):
        super().__init__(f"mutex poisoned by earlier failure: {cause!r}")
        self.cause = cause
