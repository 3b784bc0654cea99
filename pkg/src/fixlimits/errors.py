"""Exception hierarchy shared by every module."""


class FixlimitsError(Exception):
    pass


class DomainError(FixlimitsError, ValueError):
    """An input refers to something outside the declared universe or is ill-formed."""


class CapacityError(FixlimitsError):
    """An exhaustive scan was requested above its desk-scale bound."""


class MonotonicityError(FixlimitsError):
    """Iteration produced a chain that is not ascending (or descending for gfp)."""


class FuelError(FixlimitsError):
    pass


class ParseError(DomainError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class PositivityError(DomainError):
    def __init__(self, violations):
        names = ", ".join(sorted({v.variable for v in violations}))
        super().__init__(f"bound variable(s) under odd negation: {names}")
        self.violations = violations
