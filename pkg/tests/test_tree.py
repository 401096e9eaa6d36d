from fractions import Fraction

import pytest

from ultraqs import errors
from ultraqs.space import validate_space
from ultraqs.tree import (
    build_tree,
    leaf_set,
    path_max_distance,
    space_from_tree,
    tree_distance,
    tree_from_json,
)


def test_single_node_tree():
    t = build_tree(validate_space(["a"], [[0]]))
    assert len(t) == 1
    root = t.nodes[t.root]
    assert root.is_leaf and root.label == 0 and root.leaf_point == "a"
    assert space_from_tree(t) == validate_space(["a"], [[0]])


def test_x3_tree(x3):
    t = build_tree(x3)
    assert t.to_json() == {
        "label": "2",
        "children": [
            {"label": "1", "children": [{"label": "0", "point": "p0"}, {"label": "0", "point": "p1"}]},
            {"label": "0", "point": "p2"},
        ],
    }


def test_x4_tree(x4):
    t = build_tree(x4)
    root = t.nodes[t.root]
    assert root.label == 3
    assert [t.nodes[c].label for c in root.children] == [1, 1]
    assert all(len(t.nodes[c].children) == 2 for c in root.children)


def test_tree_distance(x3):
    t = build_tree(x3)
    assert tree_distance(t, "p0", "p2") == 2
    assert tree_distance(t, "p0", "p1") == 1
    assert tree_distance(t, "p1", "p1") == 0
    assert path_max_distance(t, "p0", "p2") == 2
    with pytest.raises(errors.UnknownPoint):
        tree_distance(t, "p0", "zz")


def test_leaf_sets(x3):
    t = build_tree(x3)
    inner = next(n for n in t.nodes if n.label == 1)
    assert leaf_set(t, inner.id).points == {0, 1}
    assert leaf_set(t, t.root).points == {0, 1, 2}
    p2 = t.leaf("p2")
    assert leaf_set(t, p2.id).points == {2}
    with pytest.raises(errors.UnknownNode):
        leaf_set(t, 99)


@pytest.mark.parametrize("name", ["X3.json", "X4.json", "Y4.json", "Eq3.json"])
def test_round_trip(name):
    from conftest import load

    s = load(name)
    assert space_from_tree(build_tree(s)) == s


def test_parser_recanonicalizes_child_order(x3):
    shuffled = {
        "label": "2",
        "children": [
            {"label": "0", "point": "p2"},
            {"label": "1", "children": [{"label": "0", "point": "p1"}, {"label": "0", "point": "p0"}]},
        ],
    }
    assert tree_from_json(shuffled).to_json() == build_tree(x3).to_json()


@pytest.mark.parametrize(
    "doc",
    [
        {"label": "1", "children": [{"label": "0", "point": "a"}]},
        {"label": "1", "children": [{"label": "2", "children": [{"label": "0", "point": "a"}, {"label": "0", "point": "b"}]}, {"label": "0", "point": "c"}]},
        {"label": "1", "children": [{"label": "0", "point": "a"}, {"label": "0", "point": "a"}]},
        {"label": "1", "children": [{"label": "1/2", "point": "a"}, {"label": "0", "point": "b"}]},
    ],
)
def test_malformed_trees_rejected(doc):
    with pytest.raises((errors.MalformedTree, errors.FormatError)):
        tree_from_json(doc)


def test_labels_decrease_along_paths(x4):
    t = build_tree(x4)
    for node in t.nodes:
        if node.parent is not None:
            assert node.label < t.nodes[node.parent].label
    assert all(n.label == Fraction(0) for n in t.nodes if n.is_leaf)
