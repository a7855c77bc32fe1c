"""Reading and writing operators as JSON or whitespace-delimited text.

JSON format::

    {"dim": n,
     "space": {"kind": "lp" | "ck" | "seq", "p": number, "a": number, "b": number},
     "rows": [[...], ...]}

Plain text files hold one matrix row per line; the space then defaults to a
sequence space with p = 2.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

import numpy as np

from .errors import PosispecError
from .operators import (
    Operator,
    SpaceKind,
    SpaceSemantics,
    ck_grid,
    from_dense,
    lp_grid,
    sequence_space,
)


def space_from_dict(spec: dict, dim: int) -> SpaceSemantics:
    kind = spec.get("kind", "seq")
    p = spec.get("p", 2.0)
    p = math.inf if p in (None, "inf") else float(p)
    a = float(spec.get("a", 0.0))
    b = float(spec.get("b", 1.0))
    if kind == SpaceKind.LP_GRID.value:
        return lp_grid(dim, p, (a, b))
    if kind == SpaceKind.CK_GRID.value:
        return ck_grid(dim, (a, b))
    if kind == SpaceKind.SEQUENCE.value:
        return sequence_space(dim, p)
    raise PosispecError(f"unknown space kind {kind!r}")


def operator_to_dict(T: Operator) -> dict:
    space = T.space.to_dict()
    if "a" not in space:
        space["a"], space["b"] = 0.0, 1.0
    return {"dim": T.dim, "space": space, "rows": T.matrix.tolist()}


def operator_from_dict(payload: dict, label: str = "") -> Operator:
    try:
        rows = payload["rows"]
        dim = int(payload.get("dim", len(rows)))
    except (KeyError, TypeError) as exc:
        raise PosispecError(f"malformed operator payload: {exc}") from exc
    m = np.asarray(rows, dtype=float)
    if m.ndim != 2 or m.shape != (dim, dim):
        raise PosispecError(
            f"rows have shape {m.shape}, expected ({dim}, {dim})")
    space = space_from_dict(payload.get("space", {}), dim)
    return from_dense(m, space, label)


def load_operator(path: Union[str, Path]) -> Operator:
    """Read an operator from a JSON or whitespace-delimited text file."""
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise PosispecError(f"{path}: empty file")
    if text.lstrip().startswith("{"):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PosispecError(f"{path}: invalid JSON: {exc}") from exc
        return operator_from_dict(payload, label=path.stem)
    try:
        m = np.atleast_2d(np.loadtxt(text.splitlines()))
    except ValueError as exc:
        raise PosispecError(f"{path}: cannot parse matrix rows: {exc}") from exc
    return from_dense(m, sequence_space(m.shape[0]), label=path.stem)


def save_operator(T: Operator, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(operator_to_dict(T), indent=2,
                                     sort_keys=True) + "\n")
