"""Closed balls, ball-preserving bijections and rooted-tree isomorphism."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

from ultraqs import errors
from ultraqs.mapping import PointMap
from ultraqs.space import MetricSpace, UltrametricSpace
from ultraqs.tree import RepresentingTree, build_tree
from ultraqs.verdict import Verdict

EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True)
class Ball:
    points: tuple[int, ...]  # sorted point indices
    diameter: Fraction

    @property
    def key(self) -> tuple[int, int]:
        return (len(self.points), self.points[0])

    @property
    def mask(self) -> int:
        return _mask(self.points)


@dataclass(frozen=True)
class Ballean:
    space: MetricSpace
    balls: tuple[Ball, ...]

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    def point_sets(self) -> set[frozenset[int]]:
        return {frozenset(b.points) for b in self.balls}

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {"points": self.space.names(b.points), "diameter": str(b.diameter)} for b in self.balls
        ]


@dataclass(frozen=True)
class IsoWitness:
    pairs: tuple[tuple[int, int], ...]  # (node of A, node of B), A's preorder

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def to_json(self) -> dict[str, Any]:
        return {"pairs": [list(p) for p in self.pairs]}


def _mask(idxs: Iterable[int]) -> int:
    m = 0
    for i in idxs:
        m |= 1 << i
    return m


def enumerate_ballean(space: UltrametricSpace, tree: RepresentingTree | None = None) -> Ballean:
    """All closed balls, one per node of the representing tree.

    Ordered by size, then by smallest point index (ties cannot occur: balls of
    an ultrametric space are nested or disjoint).
    """
    tree = build_tree(space) if tree is None else tree
    balls = [Ball(node.leaves, node.label) for node in tree.nodes]
    balls.sort(key=lambda b: b.key)
    return Ballean(space, tuple(balls))


def is_ball(space: MetricSpace, subset: Iterable[str | int]) -> Verdict:
    """Ball test without enumerating centres and radii.

    A nonempty ``B`` is a ball iff ``d(x,y) < d(x,z) = d(y,z)`` for all
    ``x, y`` in ``B`` and ``z`` outside it.  The witness on failure is the
    lexicographically first ``(x, y, z)`` by point index.
    """
    idxs = space.resolve(subset)
    if not idxs:
        return Verdict(False, {"reason": "EmptySubset"})
    bad = _ball_violation(space.ranks, idxs)
    if bad is None:
        return Verdict(True)
    x, y, z = bad
    return Verdict(False, {"x": space.points[x], "y": space.points[y], "z": space.points[z]})


def _ball_violation(r, idxs: tuple[int, ...]) -> tuple[int, int, int] | None:
    inside = set(idxs)
    outside = [z for z in range(len(r)) if z not in inside]
    if not outside:
        return None
    for x in idxs:
        rx = r[x]
        for y in idxs:
            dxy, ry = rx[y], r[y]
            for z in outside:
                dxz = rx[z]
                if not (dxy < dxz and dxz == ry[z]):
                    return (x, y, z)
    return None



def _image_mask(mask: int, forward: tuple[int, ...]) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << forward[i]
        mask >>= 1
        i += 1
    return out


def is_ball_preserving(mapping: PointMap) -> Verdict:
    """Images of balls are balls and preimages of balls are balls.

    Balls of the source are tried first, then balls of the target, each in
    canonical order; the first failure is the witness.
    """
    src, dst = mapping.source, mapping.target
    bx, by = enumerate_ballean(src), enumerate_ballean(dst)
    return _preserving(bx, by, mapping.forward, mapping.inverse_)


def _preserving(bx: Ballean, by: Ballean, forward, inverse) -> Verdict:
    mx = {b.mask for b in bx}
    my = {b.mask for b in by}
    for ball in bx:
        if _image_mask(ball.mask, forward) not in my:
            return Verdict(
                False,
                {"direction": "image", "ball": bx.space.names(ball.points)},
            )
    for ball in by:
        if _image_mask(ball.mask, inverse) not in mx:
            return Verdict(
                False,
                {"direction": "preimage", "ball": by.space.names(ball.points)},
            )
    return Verdict(True)


def _codes(tree: RepresentingTree, table: dict, labeled: bool) -> list[int]:
    codes = [0] * len(tree.nodes)
    for node in reversed(tree.nodes):  # preorder reversed: children first
        key = tuple(sorted(codes[c] for c in node.children))
        if labeled:
            key = (node.label, key)
        codes[node.id] = table.setdefault(key, len(table))
    return codes


def tree_code(tree: RepresentingTree, labeled: bool = False) -> Any:
    """Nested canonical form of a tree (AHU); equal codes mean isomorphic trees."""

    def walk(nid: int) -> Any:
        node = tree.nodes[nid]
        inner = tuple(sorted((walk(c) for c in node.children), key=repr))
        return (str(node.label), inner) if labeled else inner

    return walk(tree.root)


def rooted_tree_isomorphic(
    a: RepresentingTree, b: RepresentingTree, *, labeled: bool = False
) -> IsoWitness | None:
    """Node pairing of an isomorphism of rooted trees, or None.

    Labels are ignored unless ``labeled`` is set.  Children with equal codes
    are matched in canonical child order, so the witness is deterministic.
    """
    table: dict = {}
    ca, cb = _codes(a, table, labeled), _codes(b, table, labeled)
    if ca[a.root] != cb[b.root]:
        return None
    pairs: list[tuple[int, int]] = []
    stack = [(a.root, b.root)]
    while stack:
        u, v = stack.pop()
        pairs.append((u, v))
        kids_a = sorted(a.nodes[u].children, key=lambda c: ca[c])
        kids_b = sorted(b.nodes[v].children, key=lambda c: cb[c])
        stack.extend(zip(kids_a, kids_b))
    pairs.sort()
    return IsoWitness(tuple(pairs))


def witness_point_map(
    witness: IsoWitness,
    x: MetricSpace,
    y: MetricSpace,
    tx: RepresentingTree,
    ty: RepresentingTree,
) -> PointMap:
    """Bijection of points read off the leaf pairs of a tree isomorphism."""
    pairs = [
        (tx.nodes[u].leaf_point, ty.nodes[v].leaf_point)
        for u, v in witness.pairs
        if tx.nodes[u].is_leaf
    ]
    return PointMap.from_pairs(x, y, pairs)


@dataclass(frozen=True)
class IsoReport:
    isomorphic: bool
    witness: IsoWitness | None
    phi: PointMap | None
    phi_ball_preserving: Verdict | None
    bijections_checked: int | None  # exhaustive search size when not isomorphic
    ball_preserving_found: int | None
    note: str

    @property
    def consistent(self) -> bool:
        """True when the outcome agrees with trees-isomorphic <=> ball-preserving bijection."""
        if self.isomorphic:
            return bool(self.phi_ball_preserving)
        return self.ball_preserving_found in (0, None)

    def to_json(self) -> dict[str, Any]:
        return {
            "isomorphic": self.isomorphic,
            "witness": None if self.witness is None else self.witness.to_json(),
            "phi": None if self.phi is None else self.phi.to_json(),
            "phi_ball_preserving": None
            if self.phi_ball_preserving is None
            else self.phi_ball_preserving.to_json(),
            "bijections_checked": self.bijections_checked,
            "ball_preserving_found": self.ball_preserving_found,
            "note": self.note,
        }


def ball_preserving_iff_iso_check(
    x: UltrametricSpace, y: UltrametricSpace, *, exhaustive_limit: int = EXHAUSTIVE_LIMIT
) -> IsoReport:
    """Relate tree isomorphism of ``x`` and ``y`` to ball-preserving bijections.

    If the trees are isomorphic, a bijection is built from the leaf pairing
    and verified.  Otherwise, for up to ``exhaustive_limit`` points, every
    bijection is tried and the number found ball-preserving is reported (the
    expected count is 0).
    """
    if len(x) != len(y):
        raise errors.SizesDiffer(f"|X| = {len(x)} but |Y| = {len(y)}", nx=len(x), ny=len(y))
    tx, ty = build_tree(x), build_tree(y)
    iso = rooted_tree_isomorphic(tx, ty)
    if iso is not None:
        phi = witness_point_map(iso, x, y, tx, ty)
        return IsoReport(True, iso, phi, is_ball_preserving(phi), None, None, "isomorphic")
    if len(x) > exhaustive_limit:
        return IsoReport(
            False,
            None,
            None,
            None,
            None,
            None,
            f"not isomorphic; no ball-preserving bijection exists (search skipped for |X| > {exhaustive_limit})",
        )
    checked, found = exhaustive_ball_preserving(x, y)
    return IsoReport(False, None, None, None, checked, found, "not isomorphic; exhaustive search done")


def exhaustive_ball_preserving(x: UltrametricSpace, y: UltrametricSpace) -> tuple[int, int]:
    """(number of bijections tried, number that are ball-preserving)."""
    bx, by = enumerate_ballean(x), enumerate_ballean(y)
    n = len(x)
    checked = found = 0
    for perm in itertools.permutations(range(n)):
        inv = [0] * n
        for i, j in enumerate(perm):
            inv[j] = i
        checked += 1
        if _preserving(bx, by, perm, inv):
            found += 1
    return checked, found
