"""Canonical JSON for reports and certificates.

Rationals are ``"n/d"`` strings, integers of 53 bits or more are decimal
strings, and dataclasses keep their field order. Sets are sorted by their
encoded form so output is byte-stable.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

from .exact import Mat2, QVec2
from .spectral import Frequency
from .zeros import DigitSet3

SCHEMA_VERSION = "1.0"
SAFE_INT = 2**53


def encode_number(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return encode_number(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x) if abs(x) >= SAFE_INT else x
    raise TypeError(f"not a number: {x!r}")


def to_jsonable(obj):
    if obj is None or isinstance(obj, (bool, str, float)):
        return obj
    if isinstance(obj, (int, Fraction)):
        return encode_number(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, QVec2):
        return [encode_number(obj.x), encode_number(obj.y)]
    if isinstance(obj, Mat2):
        return [[encode_number(e) for e in row] for row in obj.rows()]
    if isinstance(obj, DigitSet3):
        return [to_jsonable(d) for d in obj.digits()]
    if isinstance(obj, Frequency):
        return {"scale": encode_number(obj.scale), "direction": to_jsonable(obj.direction)}
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=True) + "\n"


def parse_number(x):
    """Inverse of ``encode_number`` for re-reading reports."""
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return Fraction(x) if "/" in x else int(x)
    raise TypeError(f"not an encoded number: {x!r}")
