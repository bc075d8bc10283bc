"""Exception types shared across the package."""


class CrowdBenchError(Exception):
    """Base class for all crowdbench errors."""


class InvalidInputError(CrowdBenchError, ValueError):
    """A numeric input was non-finite or outside its documented domain."""


class ScenarioGenerationError(CrowdBenchError, RuntimeError):
    """Rejection sampling could not place all agents without overlap."""


class PolicyConfigError(CrowdBenchError, ValueError):
    """A policy name or policy specification could not be resolved."""


class VisibilityError(CrowdBenchError, ValueError):
    """A metric was applied to a log recorded in the wrong visibility mode."""


class PolicyAborted(CrowdBenchError, RuntimeError):
    """The robot policy failed mid-episode; the episode must be aborted.

    Aborted episodes are excluded from metric aggregation and reported
    separately.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ProtocolError(PolicyAborted):
    """An external policy client violated the wire protocol."""
