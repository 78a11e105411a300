"""Byte-deterministic JSON and CSV emission, and the sequence file format.

Floats are printed with 17 significant digits, Fractions as ``"num/den"``
strings, complex numbers as ``[re, im]`` pairs and infinities as the
strings ``"inf"`` / ``"-inf"``. Dictionary order is preserved as given.
"""

from __future__ import annotations

import csv
import io
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .sequence import Mode, Sequence, to_fraction

__all__ = [
    "SequenceFormatError",
    "format_float",
    "format_scalar",
    "to_json",
    "rows_to_csv",
    "sequence_to_json_value",
    "sequence_rows",
    "matrix_rows",
    "parse_sequence",
    "load_sequence",
]


class SequenceFormatError(ValueError):
    pass


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Enum):
        return json.dumps(v.value)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return json.dumps(str(v))
    if isinstance(v, (float, np.floating)):
        s = format_float(float(v))
        return json.dumps(s) if s in ("nan", "inf", "-inf") else s
    if isinstance(v, (complex, np.complexfloating)):
        return "[" + _json_value(float(v.real)) + ", " + _json_value(float(v.imag)) + "]"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, Sequence):
        return _json_value(sequence_to_json_value(v))
    if isinstance(v, dict):
        items = [json.dumps(str(k)) + ": " + _json_value(val) for k, val in v.items()]
        return "{" + ", ".join(items) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(doc) -> str:
    return _json_value(doc) + "\n"


def format_scalar(v) -> str:
    """CSV cell text for a scalar."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return format_float(v.real) + ("+" if v.imag >= 0 or math.isnan(v.imag) else "") + format_float(v.imag) + "j"
    if isinstance(v, Enum):
        return str(v.value)
    if v is None:
        return ""
    return str(v)


def rows_to_csv(header: list, rows: Iterable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([format_scalar(c) for c in row])
    return buf.getvalue()


def sequence_to_json_value(x: Sequence) -> list:
    """Exact coordinates as ``"num/den"`` strings; float ones as reals or ``[re, im]`` pairs."""
    if x.exact:
        return [str(c) for c in x.coords]
    a = x.coords
    if np.all(a.imag == 0):
        return [float(v) for v in a.real]
    return [complex(v) for v in a]


def sequence_rows(x: Sequence):
    """(header, rows) for CSV output of a sequence."""
    if x.exact:
        return ["n", "value"], [(n, c) for n, c in enumerate(x.coords)]
    return ["n", "re", "im"], [(n, float(c.real), float(c.imag)) for n, c in enumerate(x.coords)]


def matrix_rows(mat) -> list:
    """Row-major rows of a dense matrix (float ndarray or tuple of Fraction rows)."""
    if isinstance(mat, np.ndarray):
        return [[float(v) for v in row] for row in mat]
    return [list(row) for row in mat]


def _parse_coord(item, mode: Mode):
    if mode is Mode.EXACT:
        if isinstance(item, list):
            if len(item) != 2:
                raise SequenceFormatError("complex entries must be [re, im] pairs")
            if _parse_coord(item[1], mode) != 0:
                raise SequenceFormatError("exact mode supports real coordinates only")
            return _parse_coord(item[0], mode)
        if isinstance(item, bool):
            raise SequenceFormatError("booleans are not coordinates")
        if isinstance(item, float):
            if not math.isfinite(item):
                raise SequenceFormatError("non-finite coordinate")
            return Fraction(repr(item))
        try:
            return to_fraction(item)
        except (TypeError, ValueError) as exc:
            raise SequenceFormatError(str(exc)) from exc
    if isinstance(item, list):
        if len(item) != 2:
            raise SequenceFormatError("complex entries must be [re, im] pairs")
        return complex(_parse_coord(item[0], mode).real, _parse_coord(item[1], mode).real)
    if isinstance(item, bool):
        raise SequenceFormatError("booleans are not coordinates")
    if isinstance(item, (int, float)):
        return complex(item)
    if isinstance(item, str):
        try:
            return complex(float(Fraction(item.strip())))
        except (ValueError, ZeroDivisionError) as exc:
            raise SequenceFormatError(f"bad coordinate {item!r}") from exc
    raise SequenceFormatError(f"bad coordinate {item!r}")


def parse_sequence(text: str, mode: Union[Mode, str] = Mode.FLOAT) -> Sequence:
    """Parse the sequence file format: a JSON array of reals, [re, im] pairs or "num/den" strings.

    Decimal literals in exact mode are read as the rational they spell
    (``0.2`` is 1/5).
    """
    mode = Mode(mode)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SequenceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise SequenceFormatError("a sequence file holds a non-empty JSON array")
    return Sequence.of([_parse_coord(item, mode) for item in data], mode)


def load_sequence(path: Union[str, Path], mode: Union[Mode, str] = Mode.FLOAT) -> Sequence:
    return parse_sequence(Path(path).read_text(encoding="utf-8"), mode)
