"""Exception hierarchy.

Verification outcomes are never exceptions; they live in a CheckReport.
Exceptions are reserved for inputs outside an operation's domain.
"""


class AVError(Exception):
    pass


class MixedContext(AVError):
    """Operands live in different rings, dimensions or truncation orders."""


class DenominatorVanishes(AVError):
    pass


class DenominatorNotInvertible(AVError):
    pass


class NonUnit(AVError):
    pass


class NonUnitConstantTerm(NonUnit):
    pass


class NonzeroConstantTerm(AVError):
    pass


class NonInvertibleLinearPart(AVError):
    pass


class NotProNilpotent(AVError):
    pass


class NotUnipotent(AVError):
    pass


class OutOfOrder(AVError):
    pass


class NotInLplus(AVError):
    pass


class NotVanishingAtP(AVError):
    pass


class UnknownName(AVError):
    pass


class UnknownSuite(AVError):
    pass


class ValidationFailed(AVError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(AVError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        if source:
            where = f" in {source}" + where
        super().__init__(message + where)
