"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class PsiHilferError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(PsiHilferError, ValueError):
    """An argument violates a documented precondition."""


class Singularity(PsiHilferError, ValueError):
    """A request would produce an unbounded value at the origin."""


class InsufficientResolution(PsiHilferError, ValueError):
    """The mesh is too coarse for the requested operation."""


class DegenerateMultiplier(PsiHilferError, ZeroDivisionError):
    """The hybrid multiplier u vanished at a mesh node."""

    def __init__(self, t: float, which: str = "u"):
        self.t = float(t)
        self.which = which
        super().__init__(f"multiplier {which} vanishes at t={self.t:.12g}")


class SingularBoundaryOperator(PsiHilferError, ZeroDivisionError):
    """The denominator a*u_i(0) + b*u_i(T) of a boundary constant vanished."""

    def __init__(self, index: int, denominator: float):
        self.index = int(index)
        self.denominator = float(denominator)
        super().__init__(
            f"boundary operator for equation {self.index} is singular "
            f"(denominator {self.denominator:.3e})"
        )


class EvaluationError(PsiHilferError, ArithmeticError):
    """A function could not be evaluated at a sample point."""

    def __init__(self, message: str, point=None):
        self.point = point
        if point is not None:
            message = f"{message} at {point}"
        super().__init__(message)


class ConfigError(PsiHilferError, ValueError):
    """A problem configuration is missing keys or holds invalid values."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
