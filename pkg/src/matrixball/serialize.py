"""JSON and CSV serialization for CLI inputs and reports.

Vertex files carry a domain header and exactly three matrices; each entry is
a [re, im] pair so that files stay language-neutral.  Writers go through a
temp-and-rename so that partially written output never appears at the target
path.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .domain import MatrixPoint, ShapeError, as_point

__all__ = [
    "VertexFileError",
    "load_vertex_file",
    "matrix_from_json",
    "matrix_to_json",
    "write_json_atomic",
    "write_text_atomic",
]


class VertexFileError(ValueError):
    """Malformed vertex file; the message names the offending field."""


def matrix_to_json(entries: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(entries, dtype=complex)]


def matrix_from_json(obj, field: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise VertexFileError(f"field {field!r}: expected a non-empty list of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise VertexFileError(f"field {field!r}: row {i} is not a non-empty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise VertexFileError(f"field {field!r}: row {i} has length {len(row)}, expected {width}")
        out = []
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) for x in entry)
            ):
                raise VertexFileError(f"field {field!r}: entry [{i}][{j}] is not a [re, im] pair")
            out.append(complex(entry[0], entry[1]))
        rows.append(out)
    return np.array(rows, dtype=complex)


def load_vertex_file(path: str | Path) -> tuple[int, int, list[MatrixPoint]]:
    """Parse and validate a vertex file; returns (p, q, three points)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise VertexFileError(f"field 'document': invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise VertexFileError("field 'document': expected a JSON object")
    domain = doc.get("domain")
    if not isinstance(domain, dict):
        raise VertexFileError("field 'domain': missing or not an object")
    try:
        p, q = int(domain["p"]), int(domain["q"])
    except (KeyError, TypeError, ValueError) as exc:
        raise VertexFileError("field 'domain.p'/'domain.q': missing or non-integer") from exc
    if p < 1 or q < 1:
        raise VertexFileError("field 'domain.p'/'domain.q': must be positive")
    vertices = doc.get("vertices")
    if not isinstance(vertices, list) or len(vertices) != 3:
        raise VertexFileError("field 'vertices': expected exactly 3 matrices")
    points = []
    for k, mat in enumerate(vertices):
        arr = matrix_from_json(mat, f"vertices[{k}]")
        try:
            points.append(as_point(arr, p, q))
        except ShapeError as exc:
            raise VertexFileError(f"field 'vertices[{k}]': {exc}") from exc
    return p, q, points


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: str | Path, payload: dict) -> None:
    write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
