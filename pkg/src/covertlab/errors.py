"""Exception types shared across covertlab."""

from __future__ import annotations


class CovertLabError(Exception):
    """Base class for every error raised by covertlab."""


class CapacityError(CovertLabError, ValueError):
    """The carrier does not have room for the payload."""

    def __init__(self, message: str, trapdoor=None):
        super().__init__(message)
        self.trapdoor = trapdoor


class ConfigError(CovertLabError, ValueError):
    """A channel, scenario or detector configuration is invalid."""


class ConstraintError(ConfigError):
    """The trapdoor budget T_s < T_m is violated for a protocol."""

    def __init__(self, message: str, protocol=None):
        super().__init__(message)
        self.protocol = protocol


class FixtureOnlyProtocolError(CovertLabError, ValueError):
    """Raised for protocols that exist only as recorded table values (TLS)."""


class UnknownFieldError(CovertLabError, KeyError):
    """A field name is not modeled for the given protocol."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class TraceFormatError(CovertLabError, ValueError):
    """A trace or profile file could not be parsed."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class TraceValidationError(TraceFormatError):
    """A trace line parsed but holds a value outside its field width."""


class TrainingError(CovertLabError, ValueError):
    """Not enough legitimate traffic to learn a baseline."""
