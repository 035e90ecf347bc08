"""Packing integer programs ``max{w.x : x in {0,1}^n, Ax <= b}`` and row-subset views."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .numerics import ZERO, DimensionError, rat_mat, rat_to_string, rat_vec


class InstanceError(ValueError):
    """Malformed or invalid instance data."""


@dataclass(frozen=True)
class PipInstance:
    A: tuple
    b: tuple
    w: tuple
    row_labels: Optional[tuple] = None
    col_labels: Optional[tuple] = None
    row_supports: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = rat_mat(self.A)
        b = rat_vec(self.b)
        w = rat_vec(self.w)
        m = len(A)
        n = len(w)
        if len(b) != m:
            raise DimensionError(f"b has length {len(b)} but A has {m} rows")
        for i, row in enumerate(A):
            if len(row) != n:
                raise DimensionError(f"A row {i} has length {len(row)}, expected {n}")
        if any(v < 0 for v in w) or any(v < 0 for v in b):
            raise InstanceError("w and b must be nonnegative")
        for i, row in enumerate(A):
            for j, a in enumerate(row):
                if a < 0:
                    raise InstanceError(f"A[{i}][{j}] = {a} is negative")
                if a > b[i]:
                    raise InstanceError(
                        f"variable {j} is infeasible on its own: A[{i}][{j}] = {a} > b[{i}] = {b[i]}"
                    )
        if self.row_labels is not None and len(self.row_labels) != m:
            raise DimensionError("row_labels length differs from m")
        if self.col_labels is not None and len(self.col_labels) != n:
            raise DimensionError("col_labels length differs from n")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "w", w)
        if self.row_labels is not None:
            object.__setattr__(self, "row_labels", tuple(self.row_labels))
        if self.col_labels is not None:
            object.__setattr__(self, "col_labels", tuple(self.col_labels))
        supports = tuple(tuple(j for j, a in enumerate(row) if a > 0) for row in A)
        object.__setattr__(self, "row_supports", supports)

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def m(self) -> int:
        return len(self.A)

    def is_feasible(self, chosen: Iterable[int]) -> bool:
        """Whether the column set ``chosen`` satisfies every row."""
        chosen = list(chosen)
        for row, cap in zip(self.A, self.b):
            load = ZERO
            for j in chosen:
                load += row[j]
            if load > cap:
                return False
        return True

    def to_json(self) -> dict:
        out = {
            "kind": "pip",
            "n": self.n,
            "m": self.m,
            "A": [[rat_to_string(a) for a in row] for row in self.A],
            "b": [rat_to_string(v) for v in self.b],
            "w": [rat_to_string(v) for v in self.w],
        }
        if self.row_labels is not None:
            out["row_labels"] = list(self.row_labels)
        if self.col_labels is not None:
            out["col_labels"] = list(self.col_labels)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PipInstance":
        if data.get("kind") != "pip":
            raise InstanceError(f"expected kind 'pip', got {data.get('kind')!r}")
        try:
            pip = cls(
                A=data["A"],
                b=data["b"],
                w=data["w"],
                row_labels=data.get("row_labels"),
                col_labels=data.get("col_labels"),
            )
        except KeyError as exc:
            raise InstanceError(f"missing field {exc}") from None
        except (TypeError, ZeroDivisionError) as exc:
            raise InstanceError(str(exc)) from None
        if data.get("n", pip.n) != pip.n or data.get("m", pip.m) != pip.m:
            raise InstanceError("declared n/m disagree with the data")
        return pip


@dataclass(frozen=True)
class SubSystem:
    """Rows ``S`` of a parent instance, restricted to the columns they touch."""

    parent: PipInstance
    rows: tuple
    support: tuple
    position: dict = field(repr=False, compare=False, hash=False)

    def restrict(self, x: Sequence) -> tuple:
        """Coordinates of a full-length vector on the support."""
        if len(x) != self.parent.n:
            raise DimensionError(f"vector has length {len(x)}, expected {self.parent.n}")
        return tuple(x[j] for j in self.support)

    def lift(self, v: Sequence) -> tuple:
        """Pad a support-indexed vector with zeros to full length."""
        if len(v) != len(self.support):
            raise DimensionError(f"vector has length {len(v)}, expected {len(self.support)}")
        out = [ZERO] * self.parent.n
        for j, val in zip(self.support, v):
            out[j] = val
        return tuple(out)

    def row_data(self) -> list[tuple[tuple, object]]:
        """``[(coefficients on support, rhs)]`` for each selected row."""
        A, b = self.parent.A, self.parent.b
        return [(tuple(A[i][j] for j in self.support), b[i]) for i in self.rows]


def subsystem(pip: PipInstance, S: Iterable[int], allow_empty: bool = False) -> SubSystem:
    rows = tuple(sorted(set(S)))
    if not rows and not allow_empty:
        raise ValueError("row set must be nonempty")
    for i in rows:
        if not (0 <= i < pip.m):
            raise IndexError(f"row index {i} out of range for m = {pip.m}")
    cols = set()
    for i in rows:
        cols.update(pip.row_supports[i])
    support = tuple(sorted(cols))
    return SubSystem(pip, rows, support, {j: k for k, j in enumerate(support)})


def is_feasible_point(sub: SubSystem, x01: Sequence) -> bool:
    """Whether the 0-1 vector ``x01`` (indexed by support) satisfies every row in ``sub``."""
    if len(x01) != len(sub.support):
        return False
    if any(v != 0 and v != 1 for v in x01):
        return False
    chosen = [j for j, v in zip(sub.support, x01) if v]
    A, b = sub.parent.A, sub.parent.b
    for i in sub.rows:
        row = A[i]
        load = ZERO
        for j in chosen:
            load += row[j]
        if load > b[i]:
            return False
    return True


def load_pip(path) -> PipInstance:
    with open(path) as fh:
        return PipInstance.from_json(json.load(fh))
