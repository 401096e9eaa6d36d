"""Representing trees of finite ultrametric spaces.

The root is the whole space labelled with its diameter; the children of a
node are the classes of its diametrical partition, recursively, down to
one-point leaves labelled 0.  Node ids are assigned in preorder and children
are ordered by the smallest point index beneath them, so a space has exactly
one serialized tree.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from ultraqs import errors
from ultraqs.exact import parse_rational
from ultraqs.space import UltrametricSpace, split_parts, validate_space


@dataclass(frozen=True)
class TreeNode:
    id: int
    label: Fraction
    parent: int | None
    children: tuple[int, ...]
    leaf_point: str | None
    leaves: tuple[int, ...]  # sorted point indices beneath this node

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class RepresentingTree:
    points: tuple[str, ...]
    nodes: tuple[TreeNode, ...]
    root: int = 0
    _leaf_of: dict[str, int] = field(init=False, repr=False, compare=False)
    _depth: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        leaf_of = {n.leaf_point: n.id for n in self.nodes if n.leaf_point is not None}
        depth = [0] * len(self.nodes)
        for n in self.nodes:  # preorder: parents precede children
            if n.parent is not None:
                depth[n.id] = depth[n.parent] + 1
        object.__setattr__(self, "_leaf_of", leaf_of)
        object.__setattr__(self, "_depth", tuple(depth))

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> TreeNode:
        if not isinstance(node_id, int) or not 0 <= node_id < len(self.nodes):
            raise errors.UnknownNode(f"unknown node {node_id!r}", node=node_id)
        return self.nodes[node_id]

    def leaf(self, point: str) -> TreeNode:
        try:
            return self.nodes[self._leaf_of[point]]
        except KeyError:
            raise errors.UnknownPoint(f"no leaf for point {point!r}", point=point) from None

    def depth(self, node_id: int) -> int:
        return self._depth[node_id]

    def path(self, a: int, b: int) -> list[int]:
        """Node ids along the unique path from node ``a`` to node ``b``."""
        up, down = [a], [b]
        while up[-1] != down[-1]:
            if self._depth[up[-1]] >= self._depth[down[-1]]:
                up.append(self.nodes[up[-1]].parent)
            else:
                down.append(self.nodes[down[-1]].parent)
        return up + down[-2::-1]

    def lca(self, a: int, b: int) -> int:
        while a != b:
            if self._depth[a] >= self._depth[b]:
                a = self.nodes[a].parent
            else:
                b = self.nodes[b].parent
        return a

    def to_json(self, node_id: int | None = None) -> dict[str, Any]:
        n = self.nodes[self.root if node_id is None else node_id]
        if n.is_leaf:
            return {"label": str(n.label), "point": n.leaf_point}
        return {"label": str(n.label), "children": [self.to_json(c) for c in n.children]}


@dataclass(frozen=True)
class LeafSet:
    node: int
    points: frozenset[int]


def _assemble(points: tuple[str, ...], spec: list[tuple[Fraction, int | None, list[int]]]) -> RepresentingTree:
    """Turn ``(label, parent, leaves)`` records (already in preorder) into a tree."""
    children: list[list[int]] = [[] for _ in spec]
    for nid, (_, parent, _) in enumerate(spec):
        if parent is not None:
            children[parent].append(nid)
    nodes = tuple(
        TreeNode(
            id=nid,
            label=label,
            parent=parent,
            children=tuple(children[nid]),
            leaf_point=points[leaves[0]] if not children[nid] else None,
            leaves=tuple(leaves),
        )
        for nid, (label, parent, leaves) in enumerate(spec)
    )
    return RepresentingTree(points, nodes)


def build_tree(space: UltrametricSpace) -> RepresentingTree:
    r = space.ranks
    spec: list[tuple[Fraction, int | None, list[int]]] = []
    stack: list[tuple[list[int], int | None]] = [(list(range(len(space))), None)]
    while stack:
        idxs, parent = stack.pop()
        nid = len(spec)
        if len(idxs) == 1:
            spec.append((Fraction(0), parent, idxs))
            continue
        top, parts = split_parts(r, idxs)
        label = space.values[top]
        assert label > 0 and len(parts) >= 2
        spec.append((label, parent, idxs))
        for part in reversed(parts):
            stack.append((part, nid))
    return _assemble(space.points, spec)


def tree_distance(tree: RepresentingTree, x: str, y: str) -> Fraction:
    """Distance between two points read off the tree: the label of their LCA."""
    a, b = tree.leaf(x).id, tree.leaf(y).id
    if a == b:
        return Fraction(0)
    return tree.nodes[tree.lca(a, b)].label


def path_max_distance(tree: RepresentingTree, x: str, y: str) -> Fraction:
    """Same quantity as :func:`tree_distance` via the maximum label on the path."""
    a, b = tree.leaf(x).id, tree.leaf(y).id
    if a == b:
        return Fraction(0)
    return max(tree.nodes[v].label for v in tree.path(a, b)[1:-1])


def leaf_set(tree: RepresentingTree, node_id: int) -> LeafSet:
    return LeafSet(node_id, frozenset(tree.node(node_id).leaves))


def check_tree(tree: RepresentingTree) -> None:
    """Raise MalformedTree naming the first broken invariant."""
    nodes = tree.nodes
    if not nodes:
        raise errors.MalformedTree("tree has no nodes")
    roots = [n.id for n in nodes if n.parent is None]
    if roots != [tree.root]:
        raise errors.MalformedTree(f"expected exactly one root, found {roots}", roots=roots)
    seen_points: list[str] = []
    for n in nodes:
        for c in n.children:
            if nodes[c].parent != n.id:
                raise errors.MalformedTree(f"child {c} does not point back to {n.id}", node=c)
            if not nodes[c].label < n.label:
                raise errors.MalformedTree(
                    f"label of node {c} is not below its parent's", node=c
                )
        if n.is_leaf:
            if n.label != 0:
                raise errors.MalformedTree(f"leaf {n.id} has nonzero label", node=n.id)
            if n.leaf_point is None:
                raise errors.MalformedTree(f"leaf {n.id} carries no point", node=n.id)
            seen_points.append(n.leaf_point)
        elif len(n.children) < 2:
            raise errors.MalformedTree(f"internal node {n.id} has < 2 children", node=n.id)
    if sorted(seen_points) != sorted(tree.points) or len(set(seen_points)) != len(seen_points):
        raise errors.MalformedTree("leaf points must be exactly the points, each once")


def space_from_tree(tree: RepresentingTree) -> UltrametricSpace:
    check_tree(tree)
    n = len(tree.points)
    m = [[Fraction(0)] * n for _ in range(n)]
    for node in tree.nodes:
        kids = [tree.nodes[c].leaves for c in node.children]
        for i, left in enumerate(kids):
            for right in kids[i + 1 :]:
                for a in left:
                    row = m[a]
                    for b in right:
                        row[b] = node.label
                        m[b][a] = node.label
    return validate_space(tree.points, m)


def _natural_key(s: str) -> list:
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", s)]


def tree_from_json(doc: Any, points: Sequence[str] | None = None) -> RepresentingTree:
    """Parse nested tree JSON into canonical form.

    Point order (the tie-break for child order) comes from ``points`` when
    given, otherwise from a natural sort of the leaf identifiers.
    """
    raw: list[tuple[Fraction, int | None, str | None]] = []
    kids: list[list[int]] = []

    def walk(obj: Any, parent: int | None) -> int:
        if not isinstance(obj, dict) or "label" not in obj:
            raise errors.FormatError("tree node must be an object with a label")
        label = parse_rational(obj["label"])
        has_kids = "children" in obj
        if has_kids == ("point" in obj):
            raise errors.FormatError('tree node needs exactly one of "children" or "point"')
        nid = len(raw)
        raw.append((label, parent, obj.get("point")))
        kids.append([])
        if has_kids:
            if not isinstance(obj["children"], list) or not obj["children"]:
                raise errors.FormatError('"children" must be a nonempty array')
            for child in obj["children"]:
                kids[nid].append(walk(child, nid))
        elif not isinstance(obj["point"], str):
            raise errors.FormatError('"point" must be a string')
        return nid

    walk(doc, None)
    leaf_points = [p for _, _, p in raw if p is not None]
    if len(set(leaf_points)) != len(leaf_points):
        raise errors.MalformedTree("a point labels more than one leaf")
    if points is None:
        points = sorted(leaf_points, key=_natural_key)
    points = tuple(points)
    if sorted(points) != sorted(leaf_points):
        raise errors.MalformedTree("leaf points do not match the point list")
    pos = {p: i for i, p in enumerate(points)}

    def leaves(nid: int) -> list[int]:
        p = raw[nid][2]
        if p is not None:
            return [pos[p]]
        return sorted(i for c in kids[nid] for i in leaves(c))

    # re-emit in canonical preorder
    spec: list[tuple[Fraction, int | None, list[int]]] = []
    stack: list[tuple[int, int | None]] = [(0, None)]
    while stack:
        old, parent = stack.pop()
        nid = len(spec)
        spec.append((raw[old][0], parent, leaves(old)))
        ordered = sorted(kids[old], key=lambda c: leaves(c)[0])
        for c in reversed(ordered):
            stack.append((c, nid))
    tree = _assemble(points, spec)
    check_tree(tree)
    return tree


def load_tree(path: str | Path) -> RepresentingTree:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise errors.FormatError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(doc, dict) and "points" in doc and "matrix" in doc:
        from ultraqs.space import space_from_json

        return build_tree(space_from_json(doc))
    return tree_from_json(doc)

