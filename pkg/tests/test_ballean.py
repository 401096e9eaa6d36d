import itertools

import pytest

from ultraqs import errors
from ultraqs.ballean import (
    ball_preserving_iff_iso_check,
    enumerate_ballean,
    exhaustive_ball_preserving,
    is_ball,
    is_ball_preserving,
    rooted_tree_isomorphic,
)
from ultraqs.harness import oracle_ballean
from ultraqs.mapping import PointMap
from ultraqs.space import validate_space
from ultraqs.tree import build_tree, tree_from_json
from conftest import load


def test_x3_ballean_matches_brute_force(x3):
    balls = enumerate_ballean(x3)
    assert [b.points for b in balls] == [(0,), (1,), (2,), (0, 1), (0, 1, 2)]
    assert balls.point_sets() == oracle_ballean(x3)
    assert [b.diameter for b in balls] == [0, 0, 0, 1, 2]


def test_small_balleans(eq3):
    assert len(enumerate_ballean(validate_space(["a"], [[0]]))) == 1
    assert enumerate_ballean(eq3).point_sets() == oracle_ballean(eq3)
    assert len(enumerate_ballean(eq3)) == 4


def test_is_ball(x3):
    assert is_ball(x3, ["p0", "p1"])
    assert is_ball(x3, ["p0", "p1", "p2"])
    v = is_ball(x3, ["p0", "p2"])
    assert not v and v.witness == {"x": "p0", "y": "p2", "z": "p1"}
    empty = is_ball(x3, [])
    assert not empty and empty.witness == {"reason": "EmptySubset"}


def test_ball_preserving(x3, eq3, squared):
    assert is_ball_preserving(PointMap.identity(x3))
    assert is_ball_preserving(squared)
    v = is_ball_preserving(PointMap.identity(eq3, x3))
    assert not v
    assert v.witness == {"direction": "preimage", "ball": ["p0", "p1"]}


def test_not_bijective(x3):
    with pytest.raises(errors.NotBijective):
        PointMap.from_pairs(x3, x3, [("p0", "p0"), ("p1", "p0"), ("p2", "p2")])
    with pytest.raises(errors.NotBijective):
        PointMap.from_pairs(x3, x3, [("p0", "p0")])


def test_tree_isomorphism(x3, eq3):
    tx = build_tree(x3)
    doubled = build_tree(load("X3_doubled.json"))
    w = rooted_tree_isomorphic(tx, doubled)
    assert w is not None and w.as_dict()[tx.root] == doubled.root
    assert rooted_tree_isomorphic(tx, doubled, labeled=True) is None
    assert rooted_tree_isomorphic(tx, build_tree(eq3)) is None
    one = build_tree(validate_space(["a"], [[0]]))
    other = build_tree(validate_space(["b"], [[0]]))
    assert rooted_tree_isomorphic(one, other).pairs == ((0, 0),)


def _is_rooted_iso(a, b, pairs):
    m = dict(pairs)
    if sorted(m) != list(range(len(a))) or sorted(m.values()) != list(range(len(b))):
        return False
    if m[a.root] != b.root:
        return False
    return all(
        b.nodes[m[n.id]].parent == (None if n.parent is None else m[n.parent]) for n in a.nodes
    )


def test_witness_is_a_rooted_isomorphism():
    a = tree_from_json(
        {"label": "5", "children": [
            {"label": "0", "point": "a"},
            {"label": "2", "children": [{"label": "0", "point": "b"}, {"label": "0", "point": "c"}, {"label": "0", "point": "d"}]},
            {"label": "3", "children": [{"label": "0", "point": "e"}, {"label": "0", "point": "f"}]},
        ]}
    )
    b = tree_from_json(
        {"label": "9", "children": [
            {"label": "4", "children": [{"label": "0", "point": "u"}, {"label": "0", "point": "v"}]},
            {"label": "1", "children": [{"label": "0", "point": "w"}, {"label": "0", "point": "x"}, {"label": "0", "point": "y"}]},
            {"label": "0", "point": "z"},
        ]}
    )
    w = rooted_tree_isomorphic(a, b)
    assert w is not None and _is_rooted_iso(a, b, w.pairs)


def test_iff_check_isomorphic(x4, y4):
    report = ball_preserving_iff_iso_check(x4, y4)
    assert report.isomorphic and report.phi_ball_preserving and report.consistent
    same = ball_preserving_iff_iso_check(x4, x4)
    assert same.phi.forward == (0, 1, 2, 3)


def test_iff_check_not_isomorphic(x3, eq3):
    report = ball_preserving_iff_iso_check(x3, eq3)
    assert not report.isomorphic
    assert (report.bijections_checked, report.ball_preserving_found) == (6, 0)


def test_iff_sizes_differ(x3, x4):
    with pytest.raises(errors.SizesDiffer):
        ball_preserving_iff_iso_check(x3, x4)


def test_exhaustive_counts_automorphisms(x4, y4):
    # the 2+2 cherry has 8 automorphisms; each gives one ball-preserving bijection
    assert exhaustive_ball_preserving(x4, y4) == (24, 8)


def test_above_limit_skips_search():
    n = 9
    eq = validate_space([f"a{i}" for i in range(n)], [[0 if i == j else 1 for j in range(n)] for i in range(n)])
    m = [[0 if i == j else (1 if i // 3 == j // 3 else 2) for j in range(n)] for i in range(n)]
    clusters = validate_space([f"b{i}" for i in range(n)], m)
    report = ball_preserving_iff_iso_check(eq, clusters)
    assert not report.isomorphic and report.bijections_checked is None
