import math
import random
from fractions import Fraction

import pytest
from sympy import divisors
from sympy import factorint

from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import UndefinedOnZero
from saltext.liemodels.utils.lie_core import Bracket
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.lie_core import bracket
from saltext.liemodels.utils.lie_core import express
from saltext.liemodels.utils.lie_core import free_dimensions
from saltext.liemodels.utils.lie_core import koszul_sign
from saltext.liemodels.utils.lie_core import max_res_deg
from tests.unit.utils.helpers import el
from tests.unit.utils.helpers import random_element

A = Generator("a", 1)
B = Generator("b", 1)
X = Generator("x", 2)
U = Generator("u", 3, 1)
GENERATORS = (A, B, X, U)
BIDEGREES = [(1, 0), (2, 0), (3, 0), (3, 1), (4, 1)]


def _random_homogeneous(rng):
    while True:
        element = random_element(GENERATORS, rng.choice(BIDEGREES), rng)
        if element:
            return element


def test_generator_degrees():
    with pytest.raises(DegreeMismatch):
        Generator("g", 0)
    with pytest.raises(DegreeMismatch):
        Generator("g", 2, -1)
    assert U.bidegree == (3, 1)


def test_odd_square_is_nonzero_even_square_vanishes():
    assert bracket(el(A), el(A))
    assert not bracket(el(X), el(X))
    assert not bracket(bracket(el(A), el(A)), el(A))


@pytest.mark.parametrize(
    "generators,top_deg,expected",
    [
        ((A,), 1, {0: 1}),
        ((A,), 2, {0: 1}),
        ((A,), 3, {}),
        ((A, B), 2, {0: 3}),
        ((A, B), 3, {0: 2}),
        ((X,), 4, {}),
    ],
)
def test_free_dimensions(generators, top_deg, expected):
    assert free_dimensions(generators, top_deg) == expected


def test_basis_respects_bound():
    with pytest.raises(CutoffExceeded):
        basis_at(GENERATORS, (9, 0), bound=8)


def test_max_res_deg():
    element = el(U) + bracket(el(A), el(X))
    assert max_res_deg(element) == 1
    with pytest.raises(UndefinedOnZero):
        max_res_deg(LieElement())


def test_components():
    element = el(U) + bracket(el(A), el(X))
    assert set(element.components()) == {(3, 0), (3, 1)}
    assert element.res_component(1) == el(U)
    assert element.top_deg == 3
    with pytest.raises(DegreeMismatch):
        element.bidegree  # pylint: disable=pointless-statement


def test_of_bracket_monomial():
    monomial = Bracket(Bracket(A, B), X)
    assert LieElement.of(monomial) == bracket(bracket(el(A), el(B)), el(X))


def test_format():
    assert str(el(A)) == "a"
    assert str(LieElement()) == "0"
    assert str(bracket(el(A), el(B)) * -2) == "-2*[a,b]"
    assert str(bracket(el(A), el(A)) * Fraction(1, 2)) == "(1/2)*[a,a]"


def test_express_reconstructs():
    rng = random.Random(7)
    for _ in range(20):
        element = _random_homogeneous(rng)
        assert LieElement.combination(express(element)) == element


def test_antisymmetry_randomized():
    rng = random.Random(11)
    for _ in range(60):
        x, y = _random_homogeneous(rng), _random_homogeneous(rng)
        sign = koszul_sign(x.top_deg, y.top_deg)
        assert bracket(x, y) == -(bracket(y, x) * sign)


def test_odd_cube_vanishes_randomized():
    rng = random.Random(23)
    odd = [bidegree for bidegree in BIDEGREES if bidegree[0] % 2]
    for _ in range(30):
        x = random_element(GENERATORS, rng.choice(odd), rng)
        assert not bracket(x, bracket(x, x))


def _mobius(n):
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def _witt(counts):
    """
    Dimension of the multidegree ``counts`` of an ordinary free Lie algebra.
    """
    n = sum(counts)
    total = 0
    for d in divisors(math.gcd(*counts)):
        arrangements = math.factorial(n // d)
        for count in counts:
            arrangements //= math.factorial(count // d)
        total += _mobius(d) * arrangements
    return total // n


@pytest.mark.parametrize("length", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("names", [("p", "q"), ("z", "a")])
def test_even_basis_matches_witt_count(length, names):
    low, high = Generator(names[0], 2, 0), Generator(names[1], 2, 1)
    for res in range(length + 1):
        size = len(basis_at((low, high), (2 * length, res)))
        assert size == _witt([length - res, res] if 0 < res < length else [length])


def test_basis_dimensions_ignore_names():
    renamed = (Generator("b", 1), Generator("a", 1), Generator("w", 2), Generator("v", 3, 1))
    for top_deg in range(1, 7):
        assert free_dimensions(GENERATORS, top_deg) == free_dimensions(renamed, top_deg)


def test_jacobi_randomized():
    rng = random.Random(13)
    for _ in range(60):
        x, y, z = (_random_homogeneous(rng) for _ in range(3))
        lhs = bracket(x, bracket(y, z))
        rhs = bracket(bracket(x, y), z) + bracket(y, bracket(x, z)) * koszul_sign(
            x.top_deg, y.top_deg
        )
        assert lhs == rhs
