"""Finite (ultra)metric spaces with exact rational distance matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from ultraqs import errors
from ultraqs.exact import parse_rational


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A finite metric space.  Build instances with :func:`validate_metric`.

    ``ranks`` replaces each distance by its position among the distinct
    distance values; every order-only question (balls, trees, strong triangle
    inequality) is answered on ranks, which is exact and much cheaper than
    comparing Fractions.
    """

    points: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    index: dict[str, int] = field(init=False, repr=False)
    values: tuple[Fraction, ...] = field(init=False, repr=False)
    ranks: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", {p: i for i, p in enumerate(self.points)})
        values = sorted({v for row in self.matrix for v in row})
        pos = {v: i for i, v in enumerate(values)}
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "ranks", tuple(tuple(pos[v] for v in row) for row in self.matrix))

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MetricSpace):
            return NotImplemented
        return self.points == other.points and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.points, self.matrix))

    def d(self, x: str | int, y: str | int) -> Fraction:
        return self.matrix[self.idx(x)][self.idx(y)]

    def idx(self, p: str | int) -> int:
        if isinstance(p, int) and not isinstance(p, bool):
            if 0 <= p < len(self.points):
                return p
        elif p in self.index:
            return self.index[p]
        raise errors.UnknownPoint(f"unknown point {p!r}", point=p)

    def resolve(self, subset: Iterable[str | int]) -> tuple[int, ...]:
        """Sorted distinct indices of a subset given by identifiers or indices."""
        return tuple(sorted({self.idx(p) for p in subset}))

    def names(self, idxs: Iterable[int]) -> list[str]:
        return [self.points[i] for i in idxs]

    @property
    def is_ultrametric(self) -> bool:
        return _first_strong_violation(self.ranks) is None

    def to_json(self) -> dict[str, Any]:
        return {
            "points": list(self.points),
            "matrix": [[str(v) for v in row] for row in self.matrix],
        }


class UltrametricSpace(MetricSpace):
    """A finite ultrametric space.  Build instances with :func:`validate_space`."""


@dataclass(frozen=True)
class DiametricalGraph:
    space: MetricSpace
    edges: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class Partition:
    parts: tuple[tuple[int, ...], ...]


def _coerce(points: Sequence[str], matrix: Sequence[Sequence[Any]]) -> tuple[tuple[str, ...], tuple]:
    points = tuple(points)
    if not points:
        raise errors.EmptySpace("a space needs at least one point")
    for p in points:
        if not isinstance(p, str):
            raise errors.FormatError(f"point identifiers must be strings, got {p!r}")
    seen: set[str] = set()
    for p in points:
        if p in seen:
            raise errors.DuplicatePoint(f"duplicate point {p!r}", point=p)
        seen.add(p)
    n = len(points)
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise errors.DimensionMismatch(f"matrix must be {n}x{n}", n=n)
    rows = tuple(
        tuple(v if isinstance(v, Fraction) else parse_rational(v) for v in row) for row in matrix
    )
    return points, rows


def _check_pairs(m: tuple[tuple[Fraction, ...], ...]) -> None:
    n = len(m)
    for i in range(n):
        for j in range(n):
            v = m[i][j]
            if i == j:
                if v != 0:
                    raise errors.NonzeroDiagonal(f"d({i},{i}) = {v} is not 0", i=i)
                continue
            if v < 0:
                raise errors.NegativeDistance(f"d({i},{j}) = {v} is negative", i=i, j=j)
            if v != m[j][i]:
                a, b = min(i, j), max(i, j)
                raise errors.NotSymmetric(f"d({a},{b}) != d({b},{a})", i=a, j=b)
            if v == 0:
                raise errors.ZeroOffDiagonal(f"d({i},{j}) = 0 for distinct points", i=i, j=j)


def _first_strong_violation(r: Sequence[Sequence[int]]) -> tuple[int, int, int] | None:
    """Lexicographically first (i, j, k) with r[i][j] > max(r[i][k], r[k][j])."""
    n = len(r)
    if n >= 3 and _kruskal_is_ultrametric(r):
        return None
    for i in range(n):
        ri = r[i]
        for j in range(n):
            dij = ri[j]
            if i == j:
                continue
            for k in range(n):
                if dij > ri[k] and dij > r[k][j]:
                    return (i, j, k)
    return None


def _kruskal_is_ultrametric(r: Sequence[Sequence[int]]) -> bool:
    # A symmetric matrix is ultrametric iff it equals its subdominant ultrametric,
    # whose value on a cross pair is the merge weight in single-linkage order.
    n = len(r)
    edges = sorted((r[i][j], i, j) for i in range(n) for j in range(i + 1, n))
    members = {i: [i] for i in range(n)}
    owner = list(range(n))
    for w, i, j in edges:
        a, b = owner[i], owner[j]
        if a == b:
            continue
        ma, mb = members[a], members[b]
        for u in ma:
            ru = r[u]
            for v in mb:
                if ru[v] != w:
                    return False
        if len(ma) < len(mb):
            a, b, ma, mb = b, a, mb, ma
        for v in mb:
            owner[v] = a
        ma.extend(mb)
        del members[b]
    return True


def validate_space(points: Sequence[str], matrix: Sequence[Sequence[Any]]) -> UltrametricSpace:
    """Validate an ultrametric distance matrix.

    Raises the first violation in lexicographic index order: pair checks
    (diagonal, sign, symmetry, zero off-diagonal) over ``(i, j)`` first, then
    ``StrongTriangleViolation(i, j, k)`` meaning ``d(i,j) > max(d(i,k), d(k,j))``.
    Entries may be Fractions, ints or canonical rational strings.
    """
    points, rows = _coerce(points, matrix)
    _check_pairs(rows)
    space = UltrametricSpace(points, rows)
    bad = _first_strong_violation(space.ranks)
    if bad is not None:
        i, j, k = bad
        raise errors.StrongTriangleViolation(
            f"d({i},{j}) = {rows[i][j]} > max(d({i},{k}), d({k},{j})) = "
            f"{max(rows[i][k], rows[k][j])}",
            i=i,
            j=j,
            k=k,
        )
    return space


def validate_metric(points: Sequence[str], matrix: Sequence[Sequence[Any]]) -> MetricSpace:
    """Validate a plain metric (ordinary triangle inequality only).

    Returns an :class:`UltrametricSpace` when the matrix happens to be
    ultrametric, so callers can branch on the type.
    """
    points, rows = _coerce(points, matrix)
    _check_pairs(rows)
    n = len(rows)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for k in range(n):
                if rows[i][j] > rows[i][k] + rows[k][j]:
                    raise errors.TriangleViolation(
                        f"d({i},{j}) > d({i},{k}) + d({k},{j})", i=i, j=j, k=k
                    )
    space = MetricSpace(points, rows)
    if _first_strong_violation(space.ranks) is None:
        return UltrametricSpace(points, rows)
    return space


def diameter(space: MetricSpace, subset: Iterable[str | int] | None = None) -> Fraction:
    idxs = range(len(space)) if subset is None else space.resolve(subset)
    if not idxs:
        raise errors.EmptySubset("diameter of the empty set is undefined")
    return space.values[_rank_diameter(space.ranks, idxs)]


def _rank_diameter(r: Sequence[Sequence[int]], idxs: Sequence[int]) -> int:
    best = 0
    for a in idxs:
        ra = r[a]
        for b in idxs:
            if ra[b] > best:
                best = ra[b]
    return best


def diametrical_graph(space: MetricSpace) -> DiametricalGraph:
    n = len(space)
    if n < 2:
        raise errors.TooSmall("the diametrical graph needs at least two points", n=n)
    top = _rank_diameter(space.ranks, range(n))
    edges = frozenset(
        (i, j) for i in range(n) for j in range(i + 1, n) if space.ranks[i][j] == top
    )
    return DiametricalGraph(space, edges)


def split_parts(r: Sequence[Sequence[int]], idxs: Sequence[int]) -> tuple[int, list[list[int]]]:
    """Diameter rank of ``idxs`` and its classes under ``d(u, v) < diam``.

    Classes come out ordered by their smallest member when ``idxs`` is sorted.
    """
    top = _rank_diameter(r, idxs)
    parts: list[list[int]] = []
    for u in idxs:
        ru = r[u]
        for part in parts:
            if ru[part[0]] < top:
                part.append(u)
                break
        else:
            parts.append([u])
    return top, parts


def multipartite_parts(space: UltrametricSpace) -> Partition:
    """Vertex classes of the complete multipartite diametrical graph."""
    n = len(space)
    if n < 2:
        raise errors.TooSmall("partition needs at least two points", n=n)
    top, parts = split_parts(space.ranks, range(n))
    r = space.ranks
    # the relation d < diam must be an equivalence; a failure means bad input
    for pi, part in enumerate(parts):
        for u in part:
            for qi, other in enumerate(parts):
                for v in other:
                    if (r[u][v] < top) != (pi == qi) and u != v:
                        raise AssertionError(f"d < diam is not transitive at ({u},{v})")
    assert len(parts) >= 2
    return Partition(tuple(tuple(p) for p in parts))


def space_from_json(doc: Any, *, ultrametric: bool = True) -> MetricSpace:
    if not isinstance(doc, dict) or "points" not in doc or "matrix" not in doc:
        raise errors.FormatError('space JSON needs "points" and "matrix"')
    points, matrix = doc["points"], doc["matrix"]
    if not isinstance(points, list) or not isinstance(matrix, list):
        raise errors.FormatError('"points" and "matrix" must be arrays')
    if not all(isinstance(row, list) for row in matrix):
        raise errors.FormatError("matrix rows must be arrays")
    return (validate_space if ultrametric else validate_metric)(points, matrix)


def load_space(path: str | Path, *, ultrametric: bool = True) -> MetricSpace:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise errors.FormatError(f"{path}: invalid JSON ({exc})") from exc
    return space_from_json(doc, ultrametric=ultrametric)
