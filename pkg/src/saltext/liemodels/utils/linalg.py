"""
Exact linear algebra over the rationals.

Vectors are sequences of :py:class:`fractions.Fraction`; matrices are lists of
rows. All elimination is delegated to sympy's ``DomainMatrix`` over ``QQ``.
"""

import logging
from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

log = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


def to_domain(rows, ncols):
    """
    Build a ``DomainMatrix`` over ``QQ`` from rows of fractions.
    """
    return DomainMatrix(
        [[QQ(int(entry.numerator), int(entry.denominator)) for entry in row] for row in rows],
        (len(rows), ncols),
        QQ,
    )


def from_domain(matrix):
    return [
        [Fraction(int(entry.numerator), int(entry.denominator)) for entry in row]
        for row in matrix.to_list()
    ]


def rref(rows, ncols):
    """
    Reduced row echelon form.

    Returns the nonzero rows of the echelon form and the tuple of pivot
    columns.
    """
    if not rows or not ncols:
        return [], ()
    reduced, pivots = to_domain(rows, ncols).rref()
    return from_domain(reduced)[: len(pivots)], tuple(pivots)


def rank(rows, ncols):
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """
    Basis of ``{x : rows @ x = 0}``.
    """
    if not ncols:
        return []
    if not rows:
        return [unit(ncols, i) for i in range(ncols)]
    return [row for row in from_domain(to_domain(rows, ncols).nullspace()) if any(row)]


def left_nullspace(rows, ncols):
    """
    Basis of ``{c : sum_k c[k] * rows[k] = 0}``.
    """
    return nullspace(transpose(rows, ncols), len(rows))


def transpose(rows, ncols):
    return [[row[j] for row in rows] for j in range(ncols)]


def unit(size, index):
    vector = [ZERO] * size
    vector[index] = ONE
    return vector


def independent_subset(vectors, ncols):
    """
    Indices of the first maximal independent subset of ``vectors`` taken in
    order (pivot-greedy).
    """
    if not vectors or not ncols:
        return []
    return list(rref(transpose(vectors, ncols), len(vectors))[1])


def extend_independent(basis, candidates, ncols):
    """
    Indices of the candidates that extend ``basis`` greedily, in order.
    """
    stacked = list(basis) + list(candidates)
    return [
        index - len(basis)
        for index in independent_subset(stacked, ncols)
        if index >= len(basis)
    ]


def combine(coefficients, vectors, ncols):
    total = [ZERO] * ncols
    for coefficient, vector in zip(coefficients, vectors):
        if coefficient:
            for j, entry in enumerate(vector):
                if entry:
                    total[j] += coefficient * entry
    return total


def solve_combination(vectors, target, ncols):
    """
    Coefficients ``c`` with ``sum_k c[k] * vectors[k] == target``, or ``None``
    when ``target`` is outside the span.
    """
    if not any(target):
        return [ZERO] * len(vectors)
    if not vectors:
        return None
    augmented = transpose(vectors, ncols)
    for j, row in enumerate(augmented):
        row.append(target[j])
    reduced, pivots = rref(augmented, len(vectors) + 1)
    if len(vectors) in pivots:
        return None
    solution = [ZERO] * len(vectors)
    for row, pivot in zip(reduced, pivots):
        solution[pivot] = row[-1]
    return solution


class Coordinatizer:
    """
    Coordinates against a fixed independent list of vectors.

    The elimination ``[B | I] -> [R | T]`` is done once; afterwards
    coordinates of ``v`` are ``v[pivots] @ T``, followed by a membership
    check.
    """

    def __init__(self, vectors, ncols):
        self.vectors = [list(vector) for vector in vectors]
        self.ncols = ncols
        size = len(self.vectors)
        if not size:
            self.pivots = ()
            self.transform = []
            return
        augmented = [vector + unit(size, k) for k, vector in enumerate(self.vectors)]
        reduced, pivots = rref(augmented, ncols + size)
        if len(pivots) != size or any(pivot >= ncols for pivot in pivots):
            raise ValueError("vectors are not linearly independent")
        self.pivots = pivots
        self.transform = [row[ncols:] for row in reduced]

    def __len__(self):
        return len(self.vectors)

    def coordinates(self, vector):
        """
        Coordinates of ``vector``, or ``None`` when it is not in the span.
        """
        size = len(self.vectors)
        if not size:
            return [] if not any(vector) else None
        leading = [vector[pivot] for pivot in self.pivots]
        coords = [
            sum((leading[r] * self.transform[r][k] for r in range(size)), ZERO)
            for k in range(size)
        ]
        if combine(coords, self.vectors, self.ncols) != list(vector):
            return None
        return coords
