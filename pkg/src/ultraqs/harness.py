"""Seeded generators of ultrametric spaces and maps, and brute-force oracles.

Generation procedure, version 1 (``GENERATOR_VERSION``): a ``random.Random``
(MT19937) seeded with the config seed draws a random monotone labelled tree
top-down.  At each internal node it picks a label from the pool below the
parent's label (leaving one smaller label per remaining level when it can), a child count, and a random composition of the node's leaf
count.  The ``n`` point names ``p0..p{n-1}`` are then shuffled onto the leaves
and distances are read off the tree.  Any change to this procedure must bump
the version and the golden fixtures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

from ultraqs import errors
from ultraqs.exact import compare
from ultraqs.mapping import PointMap
from ultraqs.modulus import Modulus
from ultraqs.space import MetricSpace, UltrametricSpace, validate_space
from ultraqs.tree import RepresentingTree, space_from_tree, tree_from_json

GENERATOR_VERSION = 1


def _default_labels() -> tuple[Fraction, ...]:
    return tuple(Fraction(k, 2) for k in range(1, 17))


@dataclass(frozen=True)
class GenConfig:
    seed: int
    n: int
    max_depth: int = 4
    labels: tuple[Fraction, ...] = field(default_factory=_default_labels)
    min_branch: int = 2
    max_branch: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(sorted({Fraction(x) for x in self.labels}, reverse=True)))
        if self.n < 1:
            raise errors.InfeasibleConfig("n must be at least 1", n=self.n)
        if any(x <= 0 for x in self.labels):
            raise errors.InfeasibleConfig("labels must be positive")
        if self.min_branch < 2 or self.max_branch < self.min_branch:
            raise errors.InfeasibleConfig("need 2 <= min_branch <= max_branch")
        if self.n >= 2 and (self.max_depth < 1 or not self.labels):
            raise errors.InfeasibleConfig("two or more points need depth >= 1 and a nonempty label pool")
        if not -(2**63) <= self.seed < 2**64:
            raise errors.InfeasibleConfig("seed must fit in 64 bits")

    def to_json(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "n": self.n,
            "max_depth": self.max_depth,
            "labels": [str(x) for x in self.labels],
            "min_branch": self.min_branch,
            "max_branch": self.max_branch,
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "GenConfig":
        from ultraqs.exact import parse_rational

        kwargs = dict(doc)
        if "labels" in kwargs:
            kwargs["labels"] = tuple(parse_rational(x) for x in kwargs["labels"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise errors.FormatError(f"bad generator config: {exc}") from exc


def gen_tree(config: GenConfig) -> RepresentingTree:
    """The random labelled tree that :func:`gen_space` realizes."""
    rng = random.Random(config.seed)
    counter = iter(range(config.n))

    def split(count: int, depth_left: int, avail: Sequence[Fraction]) -> dict[str, Any]:
        if count == 1:
            return {"label": "0", "point": next(counter)}
        # keep enough smaller labels for the remaining levels
        pick = rng.randrange(max(1, len(avail) - depth_left + 1))
        below = avail[pick + 1 :]
        if depth_left == 1 or not below:
            sizes = [1] * count
        else:
            k = rng.randint(min(config.min_branch, count), min(config.max_branch, count))
            cuts = sorted(rng.sample(range(1, count), k - 1))
            sizes = [b - a for a, b in zip([0, *cuts], [*cuts, count])]
        return {
            "label": str(avail[pick]),
            "children": [split(s, depth_left - 1, below) for s in sizes],
        }

    doc = split(config.n, config.max_depth, config.labels)
    names = [f"p{i}" for i in range(config.n)]
    slots = list(range(config.n))
    rng.shuffle(slots)

    def rename(node: dict[str, Any]) -> None:
        if "point" in node:
            node["point"] = names[slots[node["point"]]]
        for child in node.get("children", ()):
            rename(child)

    rename(doc)
    return tree_from_json(doc, points=names)


def gen_space(config: GenConfig) -> UltrametricSpace:
    return space_from_tree(gen_tree(config))



def gen_monotone_map(
    space: UltrametricSpace,
    g: Mapping[Fraction, Fraction] | Callable[[Fraction], Fraction],
    *,
    seed: int | None = None,
    prefix: str = "q",
) -> tuple[UltrametricSpace, PointMap]:
    """Target with distances ``g(d)`` and the map onto it.

    Without ``seed`` the target reuses the source's point names and order
    (identity pairing).  With ``seed`` the target points are renamed
    ``{prefix}0..`` and listed in a shuffled order, so the map is a genuine
    relabelling bijection.
    """
    lookup = g.__getitem__ if isinstance(g, Mapping) else g
    positive = [v for v in space.values if v > 0]
    image: dict[Fraction, Fraction] = {Fraction(0): Fraction(0)}
    prev = Fraction(0)
    for v in positive:
        try:
            w = Fraction(lookup(v))
        except KeyError:
            raise errors.NotIncreasing(f"g is undefined at distance {v}", value=str(v)) from None
        if w <= prev:
            raise errors.NotIncreasing(f"g is not strictly increasing at {v}", value=str(v))
        image[v] = prev = w
    n = len(space)
    if seed is None:
        target = validate_space(space.points, [[image[v] for v in row] for row in space.matrix])
        return target, PointMap.identity(space, target)
    order = list(range(n))
    random.Random(seed).shuffle(order)  # order[k] = source index placed at target slot k
    names = [f"{prefix}{k}" for k in range(n)]
    matrix = [[image[space.matrix[order[a]][order[b]]] for b in range(n)] for a in range(n)]
    target = validate_space(names, matrix)
    forward = [0] * n
    for k, i in enumerate(order):
        forward[i] = k
    return target, PointMap(space, target, tuple(forward))


def random_increasing(values: Iterable[Fraction], rng: random.Random) -> dict[Fraction, Fraction]:
    """A random strictly increasing positive step function on ``values``."""
    out: dict[Fraction, Fraction] = {}
    acc = Fraction(0)
    for v in sorted(set(values)):
        if v == 0:
            out[v] = Fraction(0)
            continue
        acc += Fraction(rng.randint(1, 12), rng.randint(1, 5))
        out[v] = acc
    return out


def scale_function(c: Fraction | int) -> Callable[[Fraction], Fraction]:
    c = Fraction(c)
    return lambda v: c * v


# ---------------------------------------------------------------- oracles


@lru_cache(maxsize=256)
def _all_ball_masks(space: MetricSpace) -> frozenset[int]:
    n = len(space)
    radii = {Fraction(0), *space.values}
    masks = set()
    for c in range(n):
        row = space.matrix[c]
        for r in radii:
            masks.add(sum(1 << x for x in range(n) if row[x] <= r))
    return frozenset(masks)


def oracle_ballean(space: MetricSpace) -> set[frozenset[int]]:
    """Every ``B_r(c)`` for every centre and every radius in ``{0} | distances``."""
    n = len(space)
    return {frozenset(i for i in range(n) if m >> i & 1) for m in _all_ball_masks(space)}


def oracle_is_ball(space: MetricSpace, subset: Iterable[str | int]) -> bool:
    idxs = space.resolve(subset)
    if not idxs:
        return False
    return sum(1 << i for i in idxs) in _all_ball_masks(space)


def oracle_envelope_pairs(mapping: PointMap) -> set[tuple[Fraction, Fraction]]:
    """Every realized ``(t, r)`` by walking all ordered triples ``(x, a, b)``, ``a, b != x``."""
    src, dst, f = mapping.source.matrix, mapping.target.matrix, mapping.forward
    n = len(src)
    out = set()
    for x in range(n):
        for a in range(n):
            for b in range(n):
                if x in (a, b):
                    continue
                out.add((src[x][a] / src[x][b], dst[f[x]][f[a]] / dst[f[x]][f[b]]))
    return out


def oracle_qs_quantifier(mapping: PointMap, eta: Modulus, t_grid: Iterable[Fraction]) -> bool:
    """Check ``d(x,a) <= t d(x,b) => rho(fx,fa) <= eta(t) rho(fx,fb)`` literally,
    for every triple and every ``t`` in the grid."""
    src, dst, f = mapping.source.matrix, mapping.target.matrix, mapping.forward
    n = len(src)
    grid = sorted({Fraction(t) for t in t_grid})
    etas = [eta(t) for t in grid]
    for x in range(n):
        for a in range(n):
            for b in range(n):
                dxa, dxb = src[x][a], src[x][b]
                rxa, rxb = dst[f[x]][f[a]], dst[f[x]][f[b]]
                for t, e in zip(grid, etas):
                    if dxa <= t * dxb and compare(rxa, e * rxb) > 0:
                        return False
    return True
