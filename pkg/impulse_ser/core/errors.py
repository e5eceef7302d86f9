"""Error hierarchy for impulse-ser.

All errors derive from ValueError so callers that only guard against bad
input keep working.
"""


class ImpulseSerError(ValueError):
    """Base class for package errors."""


class ConfigError(ImpulseSerError):
    """Scenario or command-line configuration problem.

    Attributes:
        field: Dotted config key the problem refers to, when known
        line: 1-based line number in the config file, when known
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class FitInputError(ImpulseSerError):
    """Target pdf handed to the fitter is asymmetric, unnormalized or too short."""


class FitError(ImpulseSerError):
    """A numerical mixture fit did not improve on the single-Gaussian baseline."""


class UnsupportedModulationError(ImpulseSerError):
    """QAM order is not square or has no tabulated constants."""


class SuppressorError(ImpulseSerError):
    """Suppressor misuse: missing genie labels or an unsupported kind."""
