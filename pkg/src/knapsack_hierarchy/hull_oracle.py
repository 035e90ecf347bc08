"""Exact membership and separation for knapsack integer hulls ``K_I(S)``.

``membership`` answers with a certificate either way:

* ``Inside(ConvexCombination)``: feasible 0-1 atoms over the support whose
  weighted sum is exactly the query point restricted to the support.
* ``Outside(CutCertificate)``: an inequality ``coeffs . x <= rhs`` together
  with the maximizing feasible point that proves ``rhs`` is valid, and the
  (positive) amount by which the query point violates it.

Coordinates off the support are unconstrained by the rows in ``S``, so they
only get a box check; the hull factors as ``conv(F) x [0,1]^free``.

The search is column generation on a covering master

    max  -sum(p)   s.t.  sum_a lam_a a_j + p_j >= x_j,  sum_a lam_a = 1,

which is always feasible (zero atom plus ``p = x``).  Because feasible sets are
closed under taking subsets, covering ``x`` is as good as hitting it; an
exact equality combination is recovered afterwards by shaving coordinates off
atoms.  At a master optimum with value < 0 the negated coordinate duals form
the cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .exact_lp import EQ, GE, LinearProgram, Optimal, Row, open_session
from .knapsack import PricingResult, max_weight_feasible
from .numerics import ONE, ZERO, DimensionError, Rat, dot, rat_from_string, rat_to_string
from .pip_model import SubSystem, is_feasible_point


class BoxError(ValueError):
    """A query coordinate lies outside [0, 1]."""


@dataclass(frozen=True)
class ConvexCombination:
    atoms: tuple  # ((point, weight), ...) with point a 0-1 tuple over the support

    def point(self, dim: int) -> tuple:
        acc = [ZERO] * dim
        for pt, wt in self.atoms:
            for j, v in enumerate(pt):
                if v:
                    acc[j] += wt
        return tuple(acc)


@dataclass(frozen=True)
class CutCertificate:
    coeffs: tuple
    rhs: Rat
    witness: PricingResult
    violation: Rat


@dataclass(frozen=True)
class Inside:
    combination: ConvexCombination
    inside: bool = True
    # atoms worth seeding the next query on the same rows with
    pool: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class Outside:
    cut: CutCertificate
    inside: bool = False
    pool: tuple = field(default=(), compare=False, repr=False)


MembershipResult = Union[Inside, Outside]


def check_box(x: Sequence) -> None:
    for j, v in enumerate(x):
        if v < 0 or v > 1:
            raise BoxError(f"coordinate {j} = {v} is outside [0, 1]")


def level_set_combination(xs: Sequence) -> ConvexCombination:
    """Write ``xs`` as a combination of its nested upper level sets."""
    dim = len(xs)
    values = sorted({v for v in xs if v > 0}, reverse=True)
    atoms = []
    for k, v in enumerate(values):
        nxt = values[k + 1] if k + 1 < len(values) else ZERO
        pt = tuple(1 if xj >= v else 0 for xj in xs)
        atoms.append((pt, v - nxt))
    top = values[0] if values else ZERO
    if top < 1:
        atoms.append(((0,) * dim, ONE - top))
    return ConvexCombination(tuple(atoms))


def _shave(xs: Sequence, atoms: list) -> ConvexCombination:
    """Turn a covering combination (sum >= xs) into an exact one."""
    atoms = [[list(pt), wt] for pt, wt in atoms]
    dim = len(xs)
    total = [ZERO] * dim
    for pt, wt in atoms:
        for j in range(dim):
            if pt[j]:
                total[j] += wt
    for j in range(dim):
        excess = total[j] - xs[j]
        k = 0
        while excess > 0:
            pt, wt = atoms[k]
            k += 1
            if not pt[j]:
                continue
            if wt <= excess:
                pt[j] = 0
                excess -= wt
            else:
                atoms[k - 1][1] = wt - excess
                new = list(pt)
                new[j] = 0
                atoms.append([new, excess])
                excess = ZERO
    merged: dict = {}
    for pt, wt in atoms:
        key = tuple(pt)
        merged[key] = merged.get(key, ZERO) + wt
    return ConvexCombination(tuple((pt, wt) for pt, wt in merged.items() if wt > 0))


def _seed_atoms(sub: SubSystem, xs: Sequence, pool: Optional[Iterable]) -> list:
    dim = len(sub.support)
    seeds = [(0,) * dim]
    for j in range(dim):
        pt = [0] * dim
        pt[j] = 1
        seeds.append(tuple(pt))
    for pt, _ in level_set_combination(xs).atoms:
        if is_feasible_point(sub, pt):
            seeds.append(pt)
    if pool is not None:
        for pt in pool:
            pt = tuple(pt)
            if len(pt) == dim and is_feasible_point(sub, pt):
                seeds.append(pt)
    seen = set()
    out = []
    for pt in seeds:
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out


def membership(
    sub: SubSystem,
    x: Sequence,
    node_limit: Optional[int] = None,
    pool: Optional[Iterable] = None,
) -> MembershipResult:
    """Decide whether ``x`` (full length) lies in ``K_I(S)`` and certify the answer.

    ``pool`` may carry extra candidate atoms (0-1 tuples over the support) to
    warm-start the master, e.g. atoms found for the same rows in an earlier round.
    """
    if len(x) != sub.parent.n:
        raise DimensionError(f"point has length {len(x)}, expected {sub.parent.n}")
    check_box(x)
    xs = sub.restrict(x)
    dim = len(xs)
    quick = level_set_combination(xs)
    if all(is_feasible_point(sub, pt) for pt, _ in quick.atoms):
        return Inside(quick)

    atoms = _seed_atoms(sub, xs, pool)
    # columns: p_0..p_{dim-1}, then one lambda per atom
    n_cols = dim + len(atoms)
    rows = []
    for j in range(dim):
        coeffs = [ZERO] * n_cols
        coeffs[j] = ONE
        for k, pt in enumerate(atoms):
            if pt[j]:
                coeffs[dim + k] = ONE
        rows.append(Row(coeffs, xs[j], GE))
    conv = [ZERO] * dim + [ONE] * len(atoms)
    rows.append(Row(conv, ONE, EQ))
    objective = [-ONE] * dim + [ZERO] * len(atoms)
    session = open_session(LinearProgram(objective, rows))

    while True:
        out = session.solve()
        assert isinstance(out, Optimal)
        lam = list(out.x[dim:]) + list(session.extra_values())
        used = [(pt, w) for pt, w in zip(atoms, lam) if w > 0]
        if out.value == 0:
            return Inside(_shave(xs, used), pool=tuple(pt for pt, _ in used))
        duals = out.duals
        prices = tuple(-duals[j] for j in range(dim))
        mu = duals[dim]
        best = max_weight_feasible(sub, prices, node_limit=node_limit)
        if best.value > mu:
            pt = best.point
            atoms.append(pt)
            session.add_column([Rat(v) for v in pt] + [ONE], ZERO)
            continue
        cut = _make_cut(sub, xs, prices, node_limit)
        pool_out = tuple(pt for pt, _ in used) + (cut.witness.point,)
        return Outside(cut, pool=pool_out)


def _make_cut(sub: SubSystem, xs: Sequence, prices: Sequence, node_limit) -> CutCertificate:
    scale = max(abs(p) for p in prices)
    coeffs = tuple(p / scale for p in prices)
    witness = max_weight_feasible(sub, coeffs, node_limit=node_limit)
    rhs = witness.value
    violation = dot(coeffs, xs) - rhs
    assert violation > 0
    return CutCertificate(coeffs, rhs, witness, violation)


def verify_membership_certificate(sub: SubSystem, x: Sequence, cert) -> bool:
    """Check an ``Inside``/``Outside`` answer (or a bare combination/cut) exactly."""
    try:
        if len(x) != sub.parent.n:
            return False
        if any(v < 0 or v > 1 for v in x):
            return False
        xs = sub.restrict(x)
        if isinstance(cert, Inside):
            cert = cert.combination
        elif isinstance(cert, Outside):
            cert = cert.cut
        if isinstance(cert, ConvexCombination):
            return _verify_combination(sub, xs, cert)
        if isinstance(cert, CutCertificate):
            return _verify_cut(sub, xs, cert)
    except (TypeError, ValueError, IndexError, ZeroDivisionError):
        return False
    return False


def _verify_combination(sub: SubSystem, xs: Sequence, comb: ConvexCombination) -> bool:
    dim = len(xs)
    if not comb.atoms:
        return False
    total = ZERO
    for pt, wt in comb.atoms:
        if not wt > 0:
            return False
        if len(pt) != dim or not is_feasible_point(sub, pt):
            return False
        total += wt
    if total != 1:
        return False
    return comb.point(dim) == tuple(xs)


def _verify_cut(sub: SubSystem, xs: Sequence, cut: CutCertificate) -> bool:
    dim = len(xs)
    if len(cut.coeffs) != dim or dim == 0:
        return False
    if max(abs(c) for c in cut.coeffs) != 1:
        return False
    wit = cut.witness
    if not is_feasible_point(sub, wit.point):
        return False
    if dot(cut.coeffs, [Rat(v) for v in wit.point]) != wit.value:
        return False
    if max_weight_feasible(sub, cut.coeffs).value != wit.value:
        return False
    if wit.value > cut.rhs:
        return False
    viol = dot(cut.coeffs, xs) - cut.rhs
    return viol == cut.violation and viol > 0


# -- JSON ---------------------------------------------------------------------

def _bits(pt) -> str:
    return "".join("1" if v else "0" for v in pt)


def _unbits(s: str) -> tuple:
    if not isinstance(s, str) or any(ch not in "01" for ch in s):
        raise ValueError(f"malformed 0-1 string {s!r}")
    return tuple(int(ch) for ch in s)


def certificate_to_json(cert) -> dict:
    """Serialize an ``Inside``/``Outside`` answer or a bare combination/cut."""
    if isinstance(cert, Inside):
        cert = cert.combination
    elif isinstance(cert, Outside):
        cert = cert.cut
    if isinstance(cert, ConvexCombination):
        return {
            "kind": "combination",
            "atoms": [{"point": _bits(pt), "weight": rat_to_string(w)} for pt, w in cert.atoms],
        }
    if isinstance(cert, CutCertificate):
        return {
            "kind": "cut",
            "coeffs": [rat_to_string(c) for c in cert.coeffs],
            "rhs": rat_to_string(cert.rhs),
            "witness": {"point": _bits(cert.witness.point), "value": rat_to_string(cert.witness.value)},
            "violation": rat_to_string(cert.violation),
        }
    raise TypeError(f"not a membership certificate: {type(cert).__name__}")


def certificate_from_json(data: dict):
    kind = data.get("kind")
    if kind == "combination":
        return ConvexCombination(
            tuple((_unbits(a["point"]), rat_from_string(a["weight"])) for a in data["atoms"])
        )
    if kind == "cut":
        wit = data["witness"]
        return CutCertificate(
            coeffs=tuple(rat_from_string(c) for c in data["coeffs"]),
            rhs=rat_from_string(data["rhs"]),
            witness=PricingResult(_unbits(wit["point"]), rat_from_string(wit["value"])),
            violation=rat_from_string(data["violation"]),
        )
    raise ValueError(f"unknown certificate kind {kind!r}")
