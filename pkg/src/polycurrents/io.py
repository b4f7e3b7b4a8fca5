"""JSON and CSV file formats."""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Any

from .chains import Chain
from .complex import SimplicialComplex, complex_from_mesh
from .domain import PolygonalDomain
from .errors import InvalidInputError
from .pipeline import load_sequence
from .spacetime import SpaceTimeChain


def _clean(obj: Any) -> Any:
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, non-finite floats as strings."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise InvalidInputError("malformed JSON", path=str(path), reason=str(err)) from None


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def write_json(obj: Any, path: str | Path | None) -> None:
    write_text(dumps(obj), path)


def read_chain(path: str | Path) -> Chain:
    data = read_json(path)
    try:
        return Chain.from_json(data)
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidInputError("not a chain file", path=str(path), reason=str(err)) from None


def read_trajectory(path: str | Path) -> SpaceTimeChain:
    return SpaceTimeChain(read_chain(path))


def read_mesh(path: str | Path, check: bool = True) -> SimplicialComplex:
    """Mesh JSON: {"vertices": [[x, ...], ...], "cells": [[i, j, ...], ...]}."""
    data = read_json(path)
    try:
        return complex_from_mesh(data["vertices"], data["cells"], check=check)
    except (KeyError, TypeError) as err:
        raise InvalidInputError("not a mesh file", path=str(path), reason=str(err)) from None


def read_polygon(path: str | Path) -> PolygonalDomain:
    data = read_json(path)
    try:
        return PolygonalDomain.from_json(data)
    except (KeyError, TypeError) as err:
        raise InvalidInputError("not a polygon file", path=str(path), reason=str(err)) from None


def read_sequence(path: str | Path) -> tuple[Chain | None, list[Chain]]:
    data = read_json(path)
    try:
        return load_sequence(data)
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidInputError("not a sequence file", path=str(path), reason=str(err)) from None


def sequence_json(chains: list[Chain], limit: Chain | None = None) -> dict[str, Any]:
    return {"limit": limit.to_json() if limit is not None else None, "chains": [c.to_json() for c in chains]}
