"""Bijections between finite metric spaces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from ultraqs import errors
from ultraqs.space import MetricSpace


@dataclass(frozen=True)
class PointMap:
    """A bijection ``source -> target`` stored as index arrays both ways."""

    source: MetricSpace
    target: MetricSpace
    forward: tuple[int, ...]
    inverse_: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.source)
        if len(self.target) != n or len(self.forward) != n or sorted(self.forward) != list(range(n)):
            raise errors.NotBijective("pairing is not a bijection between the point sets")
        inv = [0] * n
        for i, j in enumerate(self.forward):
            inv[j] = i
        object.__setattr__(self, "inverse_", tuple(inv))

    @classmethod
    def from_pairs(cls, source: MetricSpace, target: MetricSpace, pairs: Iterable[tuple[str, str]]) -> "PointMap":
        pairs = list(pairs)
        n = len(source)
        fwd: list[int | None] = [None] * n
        used: set[int] = set()
        for a, b in pairs:
            i, j = source.idx(a), target.idx(b)
            if fwd[i] is not None or j in used:
                raise errors.NotBijective(f"pair ({a!r}, {b!r}) repeats a point", source=a, target=b)
            fwd[i] = j
            used.add(j)
        if None in fwd or len(target) != n:
            raise errors.NotBijective("pairing must cover every point of both spaces exactly once")
        return cls(source, target, tuple(fwd))  # type: ignore[arg-type]

    @classmethod
    def identity(cls, space: MetricSpace, target: MetricSpace | None = None) -> "PointMap":
        """Index-wise identity, optionally onto another space of the same size."""
        return cls(space, space if target is None else target, tuple(range(len(space))))

    def inverse(self) -> "PointMap":
        return PointMap(self.target, self.source, self.inverse_)

    def compose(self, then: "PointMap") -> "PointMap":
        """``then o self``."""
        if then.source != self.target:
            raise errors.NotBijective("composition needs matching middle space")
        return PointMap(self.source, then.target, tuple(then.forward[j] for j in self.forward))

    def pairs(self) -> list[tuple[str, str]]:
        return [(self.source.points[i], self.target.points[j]) for i, j in enumerate(self.forward)]

    def to_json(self) -> dict[str, Any]:
        return {"pairs": [list(p) for p in self.pairs()]}


def mapping_from_json(doc: Any, source: MetricSpace, target: MetricSpace) -> PointMap:
    if not isinstance(doc, dict) or not isinstance(doc.get("pairs"), list):
        raise errors.FormatError('mapping JSON needs a "pairs" array')
    pairs = []
    for p in doc["pairs"]:
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p)):
            raise errors.FormatError(f"bad pair {p!r}")
        pairs.append((p[0], p[1]))
    return PointMap.from_pairs(source, target, pairs)


def load_mapping(path: str | Path, source: MetricSpace, target: MetricSpace) -> PointMap:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise errors.FormatError(f"{path}: invalid JSON ({exc})") from exc
    return mapping_from_json(doc, source, target)
