"""Exception hierarchy.

Every error carries a ``code`` (stable, used in JSON reports) and a ``detail``
dict with the offending indices or identifiers.
"""

from __future__ import annotations

from typing import Any


class UltraQSError(ValueError):
    code = "error"

    def __init__(self, message: str, **detail: Any) -> None:
        super().__init__(message)
        self.detail = detail

    def to_json(self) -> dict[str, Any]:
        return {"code": self.code, "message": str(self), **self.detail}


class FormatError(UltraQSError):
    """Malformed input document (bad JSON shape, non-canonical rational, ...)."""

    code = "FormatError"


class SpaceError(UltraQSError):
    code = "SpaceError"


class EmptySpace(SpaceError):
    code = "EmptySpace"


class DimensionMismatch(SpaceError):
    code = "DimensionMismatch"


class DuplicatePoint(SpaceError):
    code = "DuplicatePoint"


class NotSymmetric(SpaceError):
    code = "NotSymmetric"


class NonzeroDiagonal(SpaceError):
    code = "NonzeroDiagonal"


class ZeroOffDiagonal(SpaceError):
    code = "ZeroOffDiagonal"


class NegativeDistance(SpaceError):
    code = "NegativeDistance"


class TriangleViolation(SpaceError):
    code = "TriangleViolation"


class StrongTriangleViolation(SpaceError):
    code = "StrongTriangleViolation"


class EmptySubset(UltraQSError):
    code = "EmptySubset"


class UnknownPoint(UltraQSError):
    code = "UnknownPoint"


class UnknownNode(UltraQSError):
    code = "UnknownNode"


class TooSmall(UltraQSError):
    code = "TooSmall"


class MalformedTree(UltraQSError):
    code = "MalformedTree"


class NotBijective(UltraQSError):
    code = "NotBijective"


class SizesDiffer(UltraQSError):
    code = "SizesDiffer"


class NotInvertible(UltraQSError):
    code = "NotInvertible"


class ModulusInfeasible(UltraQSError):
    code = "ModulusInfeasible"


class PreconditionNotMet(UltraQSError):
    code = "PreconditionNotMet"


class NotNested(UltraQSError):
    code = "NotNested"


class ZeroDiamA(UltraQSError):
    code = "ZeroDiamA"


class SamePoint(UltraQSError):
    code = "SamePoint"


class NotIncreasing(UltraQSError):
    code = "NotIncreasing"


class InfeasibleConfig(UltraQSError):
    code = "InfeasibleConfig"
