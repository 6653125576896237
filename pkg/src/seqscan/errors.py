"""Exception hierarchy shared by every module of the package."""


class SeqScanError(Exception):
    """Base class for all errors raised by seqscan."""

    code = "seqscan-error"


class DecidedStateError(SeqScanError):
    """A detector that already reached a decision was stepped again."""

    code = "decided-state"


class InvalidPlanError(SeqScanError):
    code = "invalid-plan"


class HorizonExceededError(SeqScanError):
    """The truncation horizon ran out before the requested stop-time mass accumulated."""

    code = "horizon-exceeded"

    def __init__(self, message, accumulated_mass):
        super().__init__(message)
        self.accumulated_mass = accumulated_mass


class InfeasibleTuningError(SeqScanError):
    code = "infeasible-tuning"


class NoCrossingError(SeqScanError):
    code = "no-crossing"


class BoundViolationError(SeqScanError):
    """The terminal row of a bounded test still contains continue cells."""

    code = "bound-violation"


class ConfigError(SeqScanError):
    code = "invalid-config"


class MalformedEventError(SeqScanError):
    code = "malformed-jsonl"
