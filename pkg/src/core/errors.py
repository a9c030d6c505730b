from typing import Optional


class DefiniteSumError(Exception):
    """Base class for every failure raised by the reduction pipeline."""


class VariableMismatchError(DefiniteSumError):
    def __init__(self, left: str, right: str):
        self.left = left
        self.right = right
        super().__init__(f"Variable mismatch: '{left}' vs '{right}'")


class ZeroDivisorError(DefiniteSumError, ZeroDivisionError):
    pass


class PoleError(DefiniteSumError):
    def __init__(self, point, shift: Optional[int] = None):
        self.point = point
        self.shift = shift
        where = f" (coefficient of E^{shift})" if shift is not None else ""
        super().__init__(f"Pole at {point}{where}")


class SingularSystemError(DefiniteSumError):
    def __init__(self, stage: int, size: int):
        self.stage = stage
        self.size = size
        super().__init__(f"Singular {size}x{size} system: no pivot in column {stage}")


class NonPolynomialOperatorError(DefiniteSumError):
    pass


class InconsistentInitialDataError(DefiniteSumError):
    def __init__(self, index: int, residual):
        self.index = index
        self.residual = residual
        super().__init__(f"Recurrence violated at k={index} (residual {residual})")


class InsufficientInitialDataError(DefiniteSumError):
    def __init__(self, index: int, at: int):
        self.index = index
        self.at = at
        super().__init__(f"Leading coefficient vanishes at k={at}; "
                         f"an initial value for h_{index} is required")


class MissingTruncationError(DefiniteSumError):
    pass


class InsufficientTermsError(DefiniteSumError):
    def __init__(self, needed: int, available: int):
        self.needed = needed
        self.available = available
        super().__init__(f"Sequence has {available} terms, {needed} needed")


class SectionIndexError(DefiniteSumError, IndexError):
    pass


class OperatorSyntaxError(DefiniteSumError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")
