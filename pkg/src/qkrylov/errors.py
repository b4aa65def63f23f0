"""Exception types raised across qkrylov.

Each error also derives from the closest builtin so callers that only catch
``ValueError`` or ``ArithmeticError`` keep working.
"""

from __future__ import annotations

from typing import Any


class QKrylovError(Exception):
    """Base class for all qkrylov errors."""


class DimensionMismatch(QKrylovError, ValueError):
    pass


class OperatorShapeMismatch(QKrylovError, ValueError):
    pass


class NotNormalized(QKrylovError, ValueError):
    pass


class NonFiniteInput(QKrylovError, ValueError):
    pass


class IndexOutOfRange(QKrylovError, IndexError):
    pass


class QuaternionZeroDivision(QKrylovError, ZeroDivisionError):
    pass


class ZeroPair(QKrylovError, ArithmeticError):
    pass


class SingularDiagonal(QKrylovError, ArithmeticError):
    def __init__(self, index: int, magnitude: float) -> None:
        super().__init__(f"singular diagonal at row {index} (|r_ii| = {magnitude:.3e})")
        self.index = index
        self.magnitude = magnitude


class HessenbergSingular(QKrylovError, ArithmeticError):
    """Rotated FOM diagonal vanished at ``step``; recorded, not raised by the solvers."""

    def __init__(self, step: int, magnitude: float) -> None:
        super().__init__(f"rotated Hessenberg diagonal singular at step {step} ({magnitude:.3e})")
        self.step = step
        self.magnitude = magnitude


class MaxIterExceeded(QKrylovError, RuntimeError):
    def __init__(self, iterations: int, solution: Any = None, report: Any = None) -> None:
        super().__init__(f"no convergence within {iterations} iterations")
        self.iterations = iterations
        self.solution = solution
        self.report = report


class MemoryBudgetExceeded(QKrylovError, MemoryError):
    pass


class ParseError(QKrylovError, ValueError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnsupportedField(QKrylovError, ValueError):
    pass


class UnsupportedFormat(QKrylovError, ValueError):
    pass


class ImageIOError(QKrylovError, OSError):
    pass
