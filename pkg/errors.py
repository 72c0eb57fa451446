"""
Fehlerklassen des Workbench.

Alle fachlichen Fehler erben von HKModError, damit die CLI sie gesammelt
auf Exit-Code 1 abbilden kann (ParseError -> 2).
"""


class HKModError(Exception):
    """Basisklasse; `details` landet im Fehler-Dokument der CLI."""

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__class__.__name__)
        self.details = details


# -----------------------------
# exact / arrangement
# -----------------------------
class CapacityExceeded(HKModError):
    pass


class EmptyRegion(HKModError):
    pass


class ComplexClosureViolation(HKModError):
    pass


class UnsupportedDimension(HKModError):
    pass


# -----------------------------
# toric
# -----------------------------
class IndexOutOfRange(HKModError):
    pass


class InvalidToricData(HKModError):
    def __init__(self, message: str = "", diagnostics=None, **details):
        super().__init__(message, **details)
        self.diagnostics = list(diagnostics or [])


class DuplicateFlatError(HKModError):
    pass


class NotOrbifold(HKModError):
    pass


class SliceUnfixable(HKModError):
    pass


class BettiCrossCheckFailure(HKModError):
    pass


# -----------------------------
# modify
# -----------------------------
class ZeroCircle(HKModError):
    pass


class PickSizeMismatch(HKModError):
    pass


class GoodnessViolation(HKModError):
    def __init__(self, message: str = "", diagnostics=None, step: int | None = None, **details):
        super().__init__(message, step=step, **details)
        self.diagnostics = list(diagnostics or [])
        self.step = step


class BettiIncrementViolation(HKModError):
    pass


class EulerBookkeepingViolation(HKModError):
    pass


# -----------------------------
# flatlab
# -----------------------------
class WeightsNotCoprime(HKModError):
    pass


class ZeroWeight(HKModError):
    pass


# -----------------------------
# Dateien
# -----------------------------
class ParseError(HKModError):
    """Fehler beim Einlesen; `line` und `field` geben den Kontext an."""

    def __init__(self, message: str = "", line: int | None = None, field: str | None = None, **details):
        super().__init__(message, line=line, field=field, **details)
        self.line = line
        self.field = field

