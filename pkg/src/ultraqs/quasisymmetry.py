"""Quasisymmetry of finite bijections between metric spaces.

A bijection ``f`` satisfies ``d(x,a) <= t d(x,b)  =>  rho(fx,fa) <= eta(t) rho(fx,fb)``
for all triples and all ``t > 0`` exactly when ``eta`` dominates the finite set
of realized ratio pairs ``(d(x,a)/d(x,b), rho(fx,fa)/rho(fx,fb))``, because
``eta`` is increasing and the binding ``t`` of each triple is the distance ratio
itself.  That finite set is the constraint envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable

from ultraqs import errors
from ultraqs.ballean import enumerate_ballean
from ultraqs.exact import Real, compare, make_power
from ultraqs.mapping import PointMap
from ultraqs.modulus import Linear, Modulus, Power
from ultraqs.space import MetricSpace, _first_strong_violation, _rank_diameter
from ultraqs.verdict import Verdict

__all__ = [
    "BoundsReport",
    "ConstraintEnvelope",
    "PointMap",
    "all_nested_bounds",
    "bilipschitz_constant",
    "check_modulus",
    "envelope",
    "fit_linear",
    "fit_power",
    "image_ultrametric_check",
    "is_one_qs",
    "pointwise_bounds",
    "remark_equivalences_check",
    "verify_diameter_bounds",
]


@dataclass(frozen=True)
class ConstraintEnvelope:
    """``constraints``: max realized ratio per distance ratio, sorted by ``t``.

    ``pairs`` keeps every distinct realized ``(t, r)``; the per-``t`` maximum
    loses the information needed to compare an envelope with that of the
    inverse map.
    """

    constraints: tuple[tuple[Fraction, Fraction], ...]
    pairs: frozenset[tuple[Fraction, Fraction]]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Fraction, Fraction]]) -> "ConstraintEnvelope":
        pairs = frozenset(pairs)
        best: dict[Fraction, Fraction] = {}
        for t, r in pairs:
            if t not in best or r > best[t]:
                best[t] = r
        return cls(tuple(sorted(best.items())), pairs)

    def __len__(self) -> int:
        return len(self.constraints)

    def transposed(self) -> "ConstraintEnvelope":
        """Pairs ``(1/r, 1/t)``: the realized pairs of the inverse map."""
        return ConstraintEnvelope.from_pairs((1 / r, 1 / t) for t, r in self.pairs)

    def to_json(self) -> list[dict[str, str]]:
        return [{"t": str(t), "r": str(r)} for t, r in self.constraints]


def envelope(mapping: PointMap) -> ConstraintEnvelope:
    """Realized ``(t, r)`` pairs over ordered triples ``(x, a, b)``, ``a, b != x``.

    ``a == b`` contributes the pair ``(1, 1)``; triples with ``a == x`` are
    vacuous and triples with ``b == x`` have no finite ratio.  Points are
    grouped by their (source, target) distance class around ``x``, so the
    cost is governed by the number of classes rather than ``n**3``.
    """
    src, dst = mapping.source, mapping.target
    n = len(src)
    if n < 2:
        raise errors.TooSmall("an envelope needs at least two points", n=n)
    rs, rt, fwd = src.ranks, dst.ranks, mapping.forward
    vs, vt = src.values, dst.values
    seen_classes: set[frozenset[tuple[int, int]]] = set()
    ratio_cache: dict[tuple[int, int], Fraction] = {}
    out: set[tuple[Fraction, Fraction]] = {(Fraction(1), Fraction(1))}
    for x in range(n):
        fx_row, x_row = rt[fwd[x]], rs[x]
        classes = frozenset((x_row[a], fx_row[fwd[a]]) for a in range(n) if a != x)
        if classes in seen_classes:
            continue
        seen_classes.add(classes)
        for (da, ra), (db, rb) in combinations(classes, 2):
            t = ratio_cache.get((da, db))
            if t is None:
                t = ratio_cache[(da, db)] = vs[da] / vs[db]
            r = ratio_cache.get((-1 - ra, -1 - rb))
            if r is None:
                r = ratio_cache[(-1 - ra, -1 - rb)] = vt[ra] / vt[rb]
            out.add((t, r))
            out.add((1 / t, 1 / r))
    return ConstraintEnvelope.from_pairs(out)


def check_modulus(env: ConstraintEnvelope, eta: Modulus) -> Verdict:
    """``eta(t) >= r`` for every constraint; the witness is the first failure by ``t``."""
    for t, r in env.constraints:
        value = eta(t)
        if compare(value, r) < 0:
            return Verdict(False, {"t": str(t), "r": str(r), "eta_t": str(value)})
    return Verdict(True)


def _triple_witness(mapping: PointMap, x: int, a: int, b: int, kind: str) -> dict[str, Any]:
    src, dst, f = mapping.source, mapping.target, mapping.forward
    t = src.matrix[x][a] / src.matrix[x][b]
    r = dst.matrix[f[x]][f[a]] / dst.matrix[f[x]][f[b]]
    return {
        "kind": kind,
        "x": src.points[x],
        "a": src.points[a],
        "b": src.points[b],
        "t": str(t),
        "r": str(r),
    }


def is_one_qs(mapping: PointMap) -> Verdict:
    """Whether some modulus with ``eta(1) = 1`` admits ``mapping``.

    That holds iff around every base point ``x`` the map preserves the order
    of distances: equal distances go to equal distances and smaller ones to
    strictly smaller ones.
    """
    rs, rt, f = mapping.source.ranks, mapping.target.ranks, mapping.forward
    n = len(rs)
    for x in range(n):
        fx = rt[f[x]]
        row = sorted((rs[x][a], fx[f[a]], a) for a in range(n) if a != x)
        for (d0, r0, a0), (d1, r1, a1) in zip(row, row[1:]):
            if d0 == d1 and r0 != r1:
                # a1 has the larger image distance
                return Verdict(False, _triple_witness(mapping, x, a1, a0, "equal-distances-split"))
            if d0 < d1 and r0 >= r1:
                return Verdict(False, _triple_witness(mapping, x, a0, a1, "order-not-preserved"))
    return Verdict(True)


def image_ultrametric_check(mapping: PointMap) -> Verdict:
    """Whether the image of the (ultrametric) source is ultrametric."""
    dst = mapping.target
    bad = _first_strong_violation(dst.ranks)
    if bad is None:
        return Verdict(True)
    i, j, k = bad
    return Verdict(
        False,
        {
            "triple": dst.names((i, j, k)),
            "d_ij": str(dst.matrix[i][j]),
            "d_ik": str(dst.matrix[i][k]),
            "d_kj": str(dst.matrix[k][j]),
        },
    )


def remark_equivalences_check(mapping: PointMap) -> Verdict:
    """For all ``(a, b, x)``: the strict-isoceles and equilateral patterns of
    ``(d(a,b), d(x,a), d(x,b))`` coincide with those of the image triple."""
    src, dst, f = mapping.source, mapping.target, mapping.forward
    if not src.is_ultrametric or not dst.is_ultrametric:
        raise errors.PreconditionNotMet("both spaces must be ultrametric")
    one_qs = is_one_qs(mapping)
    if not one_qs:
        raise errors.PreconditionNotMet("map is not order preserving", witness=one_qs.witness)
    rs, rt = src.ranks, dst.ranks
    n = len(rs)
    pulled = [[rt[f[i]][f[j]] for j in range(n)] for i in range(n)]
    for a in range(n):
        for b in range(n):
            dab, pab = rs[a][b], pulled[a][b]
            for x in range(n):
                dxa, dxb, pxa, pxb = rs[x][a], rs[x][b], pulled[x][a], pulled[x][b]
                strict = (dab < dxa == dxb, pab < pxa == pxb)
                equal = (dab == dxa == dxb, pab == pxa == pxb)
                for name, (left, right) in (("strict-isoceles", strict), ("equilateral", equal)):
                    if left != right:
                        return Verdict(
                            False,
                            {"equivalence": name, "a": src.points[a], "b": src.points[b], "x": src.points[x]},
                        )
    return Verdict(True)


def _diam(space: MetricSpace, idxs) -> Fraction:
    return space.values[_rank_diameter(space.ranks, idxs)]


def _require_feasible(mapping: PointMap, eta: Modulus) -> None:
    if len(mapping.source) < 2:
        return
    verdict = check_modulus(envelope(mapping), eta)
    if not verdict:
        raise errors.ModulusInfeasible(
            f"{eta.spec} does not dominate the envelope", witness=verdict.witness
        )


def _show(x: Real) -> str:
    return str(x)


def _difference(a: Real, b: Real) -> str:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return str(a - b)
    return f"~{float(a) - float(b):.12g}"


@dataclass(frozen=True)
class BoundsReport:
    """Diameter-ratio bounds for one nested pair ``A <= B``.

    ``lower``/``upper`` are the ultrametric bounds ``1/eta(dB/dA)`` and
    ``eta(dA/dB)``; ``lower_general``/``upper_general`` are the general metric
    bounds ``1/(2 eta(dB/dA))`` and ``eta(2 dA/dB)``.
    """

    a: tuple[str, ...]
    b: tuple[str, ...]
    diam_a: Fraction
    diam_b: Fraction
    diam_fa: Fraction
    diam_fb: Fraction
    ratio: Fraction
    lower: Real
    upper: Real
    lower_general: Real
    upper_general: Real

    @property
    def holds(self) -> bool:
        return compare(self.lower, self.ratio) <= 0 <= compare(self.upper, self.ratio)

    @property
    def contained(self) -> bool:
        return compare(self.lower_general, self.lower) <= 0 <= compare(self.upper_general, self.upper)

    @property
    def strictly_contained(self) -> bool:
        return compare(self.lower_general, self.lower) < 0 < compare(self.upper_general, self.upper)

    @property
    def sharp(self) -> bool:
        return compare(self.lower, self.ratio) == 0 == compare(self.upper, self.ratio)

    def to_json(self) -> dict[str, Any]:
        return {
            "A": list(self.a),
            "B": list(self.b),
            "diam_A": str(self.diam_a),
            "diam_B": str(self.diam_b),
            "diam_fA": str(self.diam_fa),
            "diam_fB": str(self.diam_fb),
            "ratio": str(self.ratio),
            "lower": _show(self.lower),
            "upper": _show(self.upper),
            "lower_general": _show(self.lower_general),
            "upper_general": _show(self.upper_general),
            "slack_lower": _difference(self.ratio, self.lower),
            "slack_upper": _difference(self.upper, self.ratio),
            "holds": self.holds,
            "contained": self.contained,
            "strictly_contained": self.strictly_contained,
        }


def _bounds(mapping: PointMap, eta: Modulus, a: tuple[int, ...], b: tuple[int, ...]) -> BoundsReport:
    src, dst, f = mapping.source, mapping.target, mapping.forward
    if not set(a) <= set(b):
        raise errors.NotNested("A must be a subset of B", A=src.names(a), B=src.names(b))
    da, db = _diam(src, a), _diam(src, b)
    if da == 0:
        raise errors.ZeroDiamA("diam A must be positive", A=src.names(a))
    dfa, dfb = _diam(dst, [f[i] for i in a]), _diam(dst, [f[i] for i in b])
    up = db / da
    return BoundsReport(
        a=tuple(src.names(a)),
        b=tuple(src.names(b)),
        diam_a=da,
        diam_b=db,
        diam_fa=dfa,
        diam_fb=dfb,
        ratio=dfa / dfb,
        lower=1 / eta(up),
        upper=eta(da / db),
        lower_general=1 / (2 * eta(up)),
        upper_general=eta(2 * da / db),
    )


def verify_diameter_bounds(
    mapping: PointMap, eta: Modulus, a: Iterable[str | int], b: Iterable[str | int]
) -> BoundsReport:
    """Bounds on ``diam f(A) / diam f(B)`` for ``A <= B``; ``eta`` must dominate the envelope."""
    src = mapping.source
    ia, ib = src.resolve(a), src.resolve(b)
    if not set(ia) <= set(ib):
        raise errors.NotNested("A must be a subset of B", A=src.names(ia), B=src.names(ib))
    if len(ia) < 2:
        raise errors.ZeroDiamA("diam A must be positive", A=src.names(ia))
    _require_feasible(mapping, eta)
    return _bounds(mapping, eta, ia, ib)


def all_nested_bounds(
    mapping: PointMap, eta: Modulus, *, exhaustive_subsets: bool = False
) -> list[BoundsReport]:
    """Reports for every nested pair of balls ``A <= B`` with ``diam A > 0``.

    Balls suffice: the smallest ball containing a subset has the same
    diameter, and so does its image.  ``exhaustive_subsets`` ranges over all
    subset pairs instead (at most 8 points).
    """
    _require_feasible(mapping, eta)
    src = mapping.source
    if exhaustive_subsets:
        n = len(src)
        if n > 8:
            raise errors.TooSmall("exhaustive subset pairs are limited to 8 points", n=n)
        subsets = [tuple(i for i in range(n) if m >> i & 1) for m in range(1, 1 << n)]
    else:
        subsets = [ball.points for ball in enumerate_ballean(src)]
    reports = []
    for a in subsets:
        if len(a) < 2:
            continue
        sa = set(a)
        for b in subsets:
            if sa <= set(b):
                reports.append(_bounds(mapping, eta, a, b))
    return reports


@dataclass(frozen=True)
class PointwiseBounds:
    lower: Real
    upper: Real
    value: Fraction

    @property
    def holds(self) -> bool:
        return compare(self.lower, self.value) <= 0 <= compare(self.upper, self.value)

    def to_json(self) -> dict[str, Any]:
        return {"lower": str(self.lower), "upper": str(self.upper), "value": str(self.value), "holds": self.holds}


def pointwise_bounds(mapping: PointMap, eta: Modulus, x: str | int, y: str | int) -> PointwiseBounds:
    """``diamY / eta(diamX / d(x,y)) <= rho(fx, fy) <= diamY * eta(d(x,y) / diamX)``."""
    src, dst = mapping.source, mapping.target
    i, j = src.idx(x), src.idx(y)
    if i == j:
        raise errors.SamePoint("x and y must differ", point=src.points[i])
    _require_feasible(mapping, eta)
    d = src.matrix[i][j]
    dx, dy = src.values[-1], dst.values[-1]
    value = dst.matrix[mapping.forward[i]][mapping.forward[j]]
    return PointwiseBounds(lower=dy / eta(dx / d), upper=dy * eta(d / dx), value=value)


@dataclass(frozen=True)
class BiLipschitz:
    constant: Fraction
    verdict: Verdict
    tight_upper: bool  # some pair attains rho = L d
    tight_lower: bool  # some pair attains rho = d / L

    def __bool__(self) -> bool:
        return self.verdict.ok

    def to_json(self) -> dict[str, Any]:
        return {
            "L": str(self.constant),
            **self.verdict.to_json(),
            "tight_upper": self.tight_upper,
            "tight_lower": self.tight_lower,
        }


def bilipschitz_constant(mapping: PointMap, c: Fraction | int) -> BiLipschitz:
    """``L = C max(diamY/diamX, diamX/diamY)`` for a map admitting ``eta(t) = C t``,
    checked against every pair."""
    c = Fraction(c)
    _require_feasible(mapping, Linear(c))
    src, dst, f = mapping.source, mapping.target, mapping.forward
    dx, dy = src.values[-1], dst.values[-1]
    if dx == 0:
        return BiLipschitz(c, Verdict(True), False, False)
    big = c * max(dy / dx, dx / dy)
    n = len(src)
    tight_up = tight_low = False
    for i in range(n):
        for j in range(i + 1, n):
            d, rho = src.matrix[i][j], dst.matrix[f[i]][f[j]]
            if not d / big <= rho <= big * d:
                return BiLipschitz(
                    big,
                    Verdict(False, {"x": src.points[i], "y": src.points[j], "d": str(d), "rho": str(rho)}),
                    tight_up,
                    tight_low,
                )
            tight_up |= rho == big * d
            tight_low |= rho == d / big
    return BiLipschitz(big, Verdict(True), tight_up, tight_low)


def fit_linear(env: ConstraintEnvelope) -> Linear:
    """Smallest ``C`` with ``C t >= r`` on the envelope."""
    return Linear(max((r / t for t, r in env.constraints), default=Fraction(1)))


def fit_power(env: ConstraintEnvelope, alpha: Fraction | int) -> Power:
    """A power modulus ``C t**alpha`` dominating the envelope with rational ``C``.

    ``C`` is the exact optimum when that is rational, otherwise the optimum
    rounded up on a ``1/10**6`` grid.
    """
    alpha = Fraction(alpha)
    need: Real = Fraction(0)
    for t, r in env.constraints:
        cand = make_power(r, t, -alpha)
        if compare(cand, need) > 0:
            need = cand
    if isinstance(need, Fraction):
        return Power(alpha, need if need > 0 else 1)
    scale = 10**6
    c = Fraction(math.ceil(float(need) * scale), scale)
    while compare(c, need) < 0:
        c += Fraction(1, scale)
    return Power(alpha, c)
