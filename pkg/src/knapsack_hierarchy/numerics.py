"""Exact rational scalars and dense rational vectors/matrices.

``Rat`` is ``gmpy2.mpq`` when gmpy2 is importable and ``fractions.Fraction``
otherwise.  Both keep values in lowest terms with a positive denominator, and
both compare/hash equal to each other, so callers never need to care which
backend is active.  Set ``KH_RAT_BACKEND=fractions`` to force the stdlib type.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

if os.environ.get("KH_RAT_BACKEND", "").lower() == "fractions":
    Rat = Fraction
    RAT_BACKEND = "fractions"
else:
    try:
        from gmpy2 import mpq as Rat
        RAT_BACKEND = "gmpy2"
    except ImportError:  # pragma: no cover - depends on environment
        Rat = Fraction
        RAT_BACKEND = "fractions"

ZERO = Rat(0)
ONE = Rat(1)

_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class DimensionError(ValueError):
    """Vector or matrix shapes do not agree."""


def rat_from_string(s: str):
    """Parse ``"±int"`` or ``"±int/posint"`` into a canonical Rat."""
    if not isinstance(s, str):
        raise TypeError(f"expected str, got {type(s).__name__}")
    match = _RAT_RE.match(s)
    if match is None:
        raise ValueError(f"malformed rational: {s!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator: {s!r}")
    return Rat(num, den)


def rat_to_string(r) -> str:
    r = as_rat(r)
    if r.denominator == 1:
        return str(int(r.numerator))
    return f"{int(r.numerator)}/{int(r.denominator)}"


def as_rat(value):
    """Coerce int / str / Fraction / mpq to Rat.  Floats are refused."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an exact value")
    if isinstance(value, str):
        return rat_from_string(value)
    if isinstance(value, bool):
        return Rat(int(value))
    if isinstance(value, Fraction) and Rat is not Fraction:
        return Rat(value.numerator, value.denominator)
    return Rat(value)


def rat_vec(values: Iterable) -> tuple:
    return tuple(as_rat(v) for v in values)


def rat_mat(rows: Iterable[Iterable]) -> tuple:
    mat = tuple(rat_vec(r) for r in rows)
    if mat:
        width = len(mat[0])
        for i, row in enumerate(mat):
            if len(row) != width:
                raise DimensionError(f"row {i} has length {len(row)}, expected {width}")
    return mat


def zeros(n: int) -> tuple:
    return (ZERO,) * n


def check_dim(vec: Sequence, n: int, what: str = "vector") -> None:
    if len(vec) != n:
        raise DimensionError(f"{what} has length {len(vec)}, expected {n}")


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionError(f"dot of lengths {len(u)} and {len(v)}")
    total = ZERO
    for a, b in zip(u, v):
        if a and b:
            total += a * b
    return total


def vec_add(u: Sequence, v: Sequence) -> tuple:
    if len(u) != len(v):
        raise DimensionError(f"add of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> tuple:
    if len(u) != len(v):
        raise DimensionError(f"sub of lengths {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def mat_vec(mat: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in mat)


def mat_t_vec(mat: Sequence[Sequence], y: Sequence) -> tuple:
    """Return ``mat^T y``."""
    if len(mat) != len(y):
        raise DimensionError(f"matrix has {len(mat)} rows, multiplier has {len(y)}")
    if not mat:
        return ()
    out = [ZERO] * len(mat[0])
    for row, yi in zip(mat, y):
        if not yi:
            continue
        for j, a in enumerate(row):
            if a:
                out[j] += yi * a
    return tuple(out)


def common_denominator(values: Iterable) -> int:
    den = 1
    for v in values:
        d = int(as_rat(v).denominator)
        if d != 1:
            den = lcm(den, d)
    return den


def scale_to_ints(values: Sequence) -> tuple[list[int], int]:
    """Multiply by the lcm of denominators; return (integers, multiplier)."""
    mult = common_denominator(values)
    return [int(as_rat(v) * mult) for v in values], mult
