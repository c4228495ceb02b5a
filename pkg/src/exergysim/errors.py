"""Exception hierarchy shared across the simulator.

The CLI maps the three base categories to distinct exit codes, so new
exceptions should subclass one of ConfigError, InputParseError, or
SimulationError.
"""


class ExergySimError(Exception):
    """Base class for all package errors."""


class ConfigError(ExergySimError):
    """Invalid or inconsistent run configuration."""


class InputParseError(ExergySimError):
    """Malformed cycle, map, curve, or coefficient file."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += f" [{path}"
            loc += f":{line}]" if line is not None else "]"
        super().__init__(message + loc)
        self.path = path
        self.line = line


class SimulationError(ExergySimError):
    """A component failed while advancing the simulation."""

    def __init__(self, message, step=None):
        self.base_message = message
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class PowerLimitError(SimulationError):
    """Requested battery power exceeds what the pack can physically supply."""


class StateOfChargeError(SimulationError):
    """Battery depleted below 0 or charged above 1."""


class CalibrationError(ExergySimError):
    """Engine heat-coefficient calibration could not reach its target."""
