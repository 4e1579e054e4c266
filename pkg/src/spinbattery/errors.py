"""Exception hierarchy for spinbattery."""


class SpinBatteryError(Exception):
    """Base class for all spinbattery errors."""


class DomainError(SpinBatteryError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ConfigError(DomainError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownPresetError(DomainError, KeyError):
    """A preset name is not in the catalog."""

    def __init__(self, name: str, available: list[str]):
        self.name = name
        self.available = available
        listing = ", ".join(available)
        super().__init__(f"Unknown preset '{name}'. Available presets: {listing}")

    def __str__(self) -> str:
        # KeyError quotes its argument otherwise
        return str(self.args[0])


class ConvergenceError(SpinBatteryError, ArithmeticError):
    """Krylov propagation did not reach the requested tolerance."""


class PlanError(SpinBatteryError):
    """A simulation plan failed; the original error is chained as __cause__."""

    def __init__(self, label: str, cause: BaseException):
        self.label = label
        super().__init__(f"Plan '{label}' failed: {cause}")
        self.__cause__ = cause


class OutputError(SpinBatteryError):
    """A result file could not be read or written."""

    def __init__(self, path: object, cause: OSError):
        self.path = path
        super().__init__(f"{path}: {cause.strerror or cause}")
