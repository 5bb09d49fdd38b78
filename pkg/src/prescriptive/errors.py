"""Exception hierarchy shared by every module of the package."""


class PrescriptiveError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(PrescriptiveError, ValueError):
    pass


class UnsupportedKind(PrescriptiveError):
    pass


class UnknownCell(PrescriptiveError, KeyError):
    pass


class DimensionMismatch(PrescriptiveError, ValueError):
    pass


class LengthMismatch(PrescriptiveError, ValueError):
    pass


class DegenerateLabels(PrescriptiveError, ValueError):
    pass


class NonFiniteInput(PrescriptiveError, ValueError):
    pass


class SingleArmDataset(PrescriptiveError, ValueError):
    """Raised when an operation needs both treated and control units."""


class MissingCounterfactuals(PrescriptiveError):
    """Raised when a logged dataset is used where potential outcomes are required."""


class DuplicateUnitIds(PrescriptiveError, ValueError):
    pass


class CanvasError(PrescriptiveError, ValueError):
    """Base class for canvas parse errors; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CanvasSyntaxError(CanvasError):
    pass


class UnknownSection(CanvasError):
    pass


class UnknownKey(CanvasError):
    pass


class DuplicateKey(CanvasError):
    pass


class InvalidCanvas(PrescriptiveError, ValueError):
    """Raised when a canvas that must be valid has violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(f"{v.cell} [{v.rule}]" for v in self.violations)
        super().__init__(f"canvas has {len(self.violations)} violation(s): {summary}")
