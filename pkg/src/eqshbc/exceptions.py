"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Invalid physical input or scenario description.

    The CLI maps this to exit code 2.
    """


class ScenarioFileError(ValidationError):
    """Scenario or preset file could not be parsed or failed its schema."""

    def __init__(self, message, path=None, line=None, key=None):
        self.path = path
        self.line = line
        self.key = key
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class UnitSuffixError(ScenarioFileError):
    """A key carries a missing or dimensionally wrong unit suffix."""


class DegenerateNetworkError(ValueError):
    """The nodal system is singular (isolated nodes or no AC path)."""

    def __init__(self, message, isolated=()):
        self.isolated = tuple(isolated)
        super().__init__(message)


class SingularConfigurationError(ValueError):
    """A closed-form expression hits a zero denominator.

    Callers can fall back to the nodal solver, which has no such singularity.
    """
