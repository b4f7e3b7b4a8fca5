"""Exception hierarchy. Every error can render itself as a JSON diagnostic."""

from __future__ import annotations

from typing import Any


class PolyCurrentsError(Exception):
    """Base class for computation errors raised by the toolkit."""

    code = "error"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.details = details

    def diagnostic(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error": self.code, "message": str(self)}
        for key, val in self.details.items():
            out[key] = _jsonable(val)
        return out


def _jsonable(val: Any) -> Any:
    if isinstance(val, (str, int, bool)) or val is None:
        return val
    if isinstance(val, float):
        return val if val == val and abs(val) != float("inf") else str(val)
    if isinstance(val, dict):
        return {str(k): _jsonable(v) for k, v in val.items()}
    if isinstance(val, (list, tuple)):
        return [_jsonable(v) for v in val]
    try:
        return _jsonable(val.tolist())
    except AttributeError:
        return str(val)


class DimensionMismatchError(PolyCurrentsError):
    code = "dimension-mismatch"


class UndefinedBoundaryError(PolyCurrentsError):
    code = "undefined-boundary"


class InvalidIntervalError(PolyCurrentsError):
    code = "invalid-interval"


class InvalidHyperplaneError(PolyCurrentsError):
    code = "invalid-hyperplane"


class MeshConformityError(PolyCurrentsError):
    code = "mesh-conformity"


class NotInComplexError(PolyCurrentsError):
    code = "not-in-complex"


class SolverError(PolyCurrentsError):
    code = "solver"


class NotACycleError(PolyCurrentsError):
    code = "not-a-cycle"


class BalanceError(PolyCurrentsError):
    code = "balance"


class SingularPositionError(PolyCurrentsError):
    code = "singular-position"


class ShiftSearchError(PolyCurrentsError):
    code = "shift-search-failure"


class UnsupportedError(PolyCurrentsError):
    code = "unsupported"


class EndpointMismatchError(PolyCurrentsError):
    code = "endpoint-mismatch"


class InvalidReparameterizationError(PolyCurrentsError):
    code = "invalid-reparameterization"


class NotATrajectoryError(PolyCurrentsError):
    code = "not-a-trajectory"


class NotApplicableError(PolyCurrentsError):
    code = "not-applicable"


class ContradictionError(PolyCurrentsError):
    code = "contradiction"


class FieldConstructionError(PolyCurrentsError):
    code = "field-construction"


class ConstructionError(PolyCurrentsError):
    code = "construction"


class HomologyObstructionError(PolyCurrentsError):
    code = "homology-obstruction"


class InvalidInputError(PolyCurrentsError):
    code = "invalid-input"
