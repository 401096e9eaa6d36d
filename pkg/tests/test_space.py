from fractions import Fraction

import pytest

from ultraqs import errors
from ultraqs.space import (
    diameter,
    diametrical_graph,
    multipartite_parts,
    space_from_json,
    validate_metric,
    validate_space,
)

P3 = ["p0", "p1", "p2"]


def brute_strong_triangle(m):
    n = len(m)
    return all(m[i][j] <= max(m[i][k], m[k][j]) for i in range(n) for j in range(n) for k in range(n))


def test_x3_valid(x3):
    assert brute_strong_triangle(x3.matrix)
    assert diameter(x3) == 2


def test_single_point():
    s = validate_space(["a"], [[0]])
    assert diameter(s) == 0


def test_strong_triangle_violation_names_first_triple():
    with pytest.raises(errors.StrongTriangleViolation) as info:
        validate_space(P3, [[0, 1, 2], [1, 0, 3], [2, 3, 0]])
    assert (info.value.detail["i"], info.value.detail["j"], info.value.detail["k"]) == (1, 2, 0)


@pytest.mark.parametrize(
    "matrix,exc,detail",
    [
        ([[0, 1, 2], [1, 0, 2], [2, 3, 0]], errors.NotSymmetric, {"i": 1, "j": 2}),
        ([[0, 1, 2], [1, 1, 2], [2, 2, 0]], errors.NonzeroDiagonal, {"i": 1}),
        ([[0, 0, 2], [0, 0, 2], [2, 2, 0]], errors.ZeroOffDiagonal, {"i": 0, "j": 1}),
        ([[0, -1, 2], [-1, 0, 2], [2, 2, 0]], errors.NegativeDistance, {"i": 0, "j": 1}),
    ],
)
def test_pair_errors(matrix, exc, detail):
    with pytest.raises(exc) as info:
        validate_space(P3, matrix)
    assert info.value.detail == detail


def test_shape_errors():
    with pytest.raises(errors.DimensionMismatch):
        validate_space(P3, [[0, 1], [1, 0]])
    with pytest.raises(errors.DuplicatePoint):
        validate_space(["a", "a"], [[0, 1], [1, 0]])
    with pytest.raises(errors.EmptySpace):
        validate_space([], [])


def test_diameter_of_subsets(x3):
    assert diameter(x3, ["p0"]) == 0
    assert diameter(x3, ["p0", "p1"]) == 1
    assert diameter(x3, [0, 1, 2]) == 2
    with pytest.raises(errors.EmptySubset):
        diameter(x3, [])


def test_diametrical_graph(x3, eq3, x4):
    assert diametrical_graph(x3).edges == {(0, 2), (1, 2)}
    assert diametrical_graph(eq3).edges == {(0, 1), (0, 2), (1, 2)}
    assert diametrical_graph(x4).edges == {(0, 2), (0, 3), (1, 2), (1, 3)}
    with pytest.raises(errors.TooSmall):
        diametrical_graph(validate_space(["a"], [[0]]))


def test_multipartite_parts(x3, eq3, x4):
    assert multipartite_parts(x3).parts == ((0, 1), (2,))
    assert multipartite_parts(eq3).parts == ((0,), (1,), (2,))
    assert multipartite_parts(x4).parts == ((0, 1), (2, 3))


def test_parts_witness_complete_multipartite(x4):
    parts = multipartite_parts(x4).parts
    edges = diametrical_graph(x4).edges
    where = {i: k for k, part in enumerate(parts) for i in part}
    for i in range(4):
        for j in range(i + 1, 4):
            assert ((i, j) in edges) == (where[i] != where[j])


def test_json_round_trip_is_fixed_point(x4):
    doc = x4.to_json()
    again = space_from_json(doc)
    assert again == x4 and again.to_json() == doc


def test_metric_mode_accepts_plain_metric():
    m = validate_metric(["q0", "q1", "q2"], [[0, 1, 2], [1, 0, "5/2"], [2, "5/2", 0]])
    assert not m.is_ultrametric
    with pytest.raises(errors.TriangleViolation):
        validate_metric(P3, [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(errors.StrongTriangleViolation):
        validate_space(["q0", "q1", "q2"], [[0, 1, 2], [1, 0, "5/2"], [2, "5/2", 0]])


def test_fraction_entries_are_kept_exact():
    s = validate_space(["a", "b"], [[0, Fraction(1, 3)], [Fraction(1, 3), 0]])
    assert s.d("a", "b") == Fraction(1, 3)
