"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class GraphGaugeError(Exception):
    exit_code = 3


class ValidationError(GraphGaugeError, ValueError):
    """Bad input: malformed files, mismatched groups, non-unitary entries."""

    exit_code = 2


class OrientationError(ValidationError):
    def __init__(self, cycle, detail: str = ""):
        self.cycle = list(cycle)
        path = " -> ".join(str(v) for v in self.cycle)
        super().__init__(f"edge orientation has a directed cycle: {path}" + (f" ({detail})" if detail else ""))


class CliqueLookupError(ValidationError, LookupError):
    pass


class DistanceError(ValidationError):
    pass


class ContractViolation(GraphGaugeError):
    """An internal identity or precondition failed."""

    exit_code = 3


class UnsupportedPotential(ValidationError):
    pass
