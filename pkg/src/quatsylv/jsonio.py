"""Canonical JSON text for specs, solutions and reports.

Output is indented for review, except that flat lists of numbers (one
quaternion, one shape) stay on a single line.  Floats go through ``repr`` so a
parse/serialise round trip reproduces the same bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .errors import ParseError


def _is_flat_numbers(value: Any) -> bool:
    return isinstance(value, list) and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    )


def _encode(value: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_encode(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if _is_flat_numbers(value):
            return "[" + ", ".join(_encode(v, 0) for v in value) + "]"
        items = [f"{inner}{_encode(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot encode non-finite float {value!r}")
        if value == 0.0:
            return "0.0"  # fold -0.0 so sign-of-zero noise never changes the bytes
        return repr(value)
    return json.dumps(value)


def dumps(obj: Any) -> str:
    return _encode(obj, 0) + "\n"


def write(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
