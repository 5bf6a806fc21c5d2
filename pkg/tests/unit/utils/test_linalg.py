from fractions import Fraction

from saltext.liemodels.utils import linalg

F = Fraction


def test_rref_pivots():
    rows = [[F(1), F(2), F(3)], [F(2), F(4), F(6)], [F(0), F(1), F(1)]]
    reduced, pivots = linalg.rref(rows, 3)
    assert pivots == (0, 1)
    assert reduced == [[1, 0, 1], [0, 1, 1]]
    assert linalg.rank(rows, 3) == 2


def test_rref_empty():
    assert linalg.rref([], 3) == ([], ())
    assert linalg.rank([], 0) == 0


def test_nullspace():
    rows = [[F(1), F(1), F(0)]]
    kernel = linalg.nullspace(rows, 3)
    assert len(kernel) == 2
    for vector in kernel:
        assert sum(r * v for r, v in zip(rows[0], vector)) == 0


def test_nullspace_without_rows_is_everything():
    assert linalg.nullspace([], 2) == [[1, 0], [0, 1]]


def test_left_nullspace():
    rows = [[F(1), F(0)], [F(2), F(0)], [F(0), F(1)]]
    (combo,) = linalg.left_nullspace(rows, 2)
    assert linalg.combine(combo, rows, 2) == [0, 0]


def test_solve_combination():
    vectors = [[F(1), F(0), F(1)], [F(0), F(1), F(1)]]
    assert linalg.solve_combination(vectors, [F(2), F(3), F(5)], 3) == [2, 3]
    assert linalg.solve_combination(vectors, [F(0), F(0), F(1)], 3) is None
    assert linalg.solve_combination([], [F(0)], 1) == []


def test_extend_independent():
    basis = [[F(1), F(0)]]
    candidates = [[F(2), F(0)], [F(1), F(1)], [F(0), F(1)]]
    assert linalg.extend_independent(basis, candidates, 2) == [1]


def test_coordinatizer():
    coordinatizer = linalg.Coordinatizer([[F(1), F(1)], [F(0), F(1)]], 2)
    assert len(coordinatizer) == 2
    assert coordinatizer.coordinates([F(3), F(5)]) == [3, 2]
