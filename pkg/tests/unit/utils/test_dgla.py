import random

import pytest

from saltext.liemodels.utils.dgla import Derivation
from saltext.liemodels.utils.dgla import LieMorphism
from saltext.liemodels.utils.dgla import TruncatedModel
from saltext.liemodels.utils.dgla import ad
from saltext.liemodels.utils.dgla import apply
from saltext.liemodels.utils.dgla import check_maurer_cartan
from saltext.liemodels.utils.dgla import check_square_zero
from saltext.liemodels.utils.dgla import der_bracket
from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import MissingGeneratorValue
from saltext.liemodels.utils.homology import chain_complex
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import bracket
from saltext.liemodels.utils.lie_core import koszul_sign
from saltext.liemodels.utils.perturbation import random_gauge_element
from tests.unit.utils.helpers import el
from tests.unit.utils.helpers import random_element

A = Generator("a", 1)
B = Generator("b", 1)
X = Generator("x", 2)
U = Generator("u", 3, 1)
GENERATORS = (A, B, X, U)
BIDEGREES = [(1, 0), (2, 0), (3, 0), (3, 1), (4, 1)]


def _random_derivation(rng, shift):
    values = {}
    for generator in GENERATORS:
        value = LieElement()
        for res in range(generator.res_deg + 1):
            value = value + random_element(GENERATORS, (generator.top_deg + shift, res), rng)
        values[generator] = value
    return Derivation(values, shift)


def _random_perturbation(model, rng):
    """
    A degree -1 derivation lowering resolution by 2, not necessarily
    Maurer-Cartan.
    """
    complex_ = chain_complex(model.model)
    values = {}
    for generator in model.generators:
        if generator.res_deg < 2:
            continue
        space = complex_.space(generator.top_deg - 1)
        total = LieElement()
        for k, res in enumerate(space.res_of_index):
            if res <= generator.res_deg - 2 and rng.random() < 0.5:
                total = total + space.elements[k] * rng.randint(-2, 2)
        values[generator] = total
    return Derivation.on(model.generators, values, -1, 2)


def test_derivation_checks_degrees():
    with pytest.raises(DegreeMismatch):
        Derivation({X: el(A)}, 0)
    with pytest.raises(DegreeMismatch):
        Derivation({U: bracket(el(A), el(A))}, -1, 2)
    with pytest.raises(MissingGeneratorValue):
        Derivation({X: el(A)}, -1)(el(B))


def test_derivation_on_fills_zero():
    der = Derivation.on(GENERATORS, {X: el(A)}, -1)
    assert der.support() == [X]
    assert der(bracket(el(X), el(B))) == bracket(el(A), el(B))


@pytest.mark.parametrize("shift", [-1, 0, 1])
def test_leibniz_randomized(shift):
    rng = random.Random(100 + shift)
    for _ in range(20):
        der = _random_derivation(rng, shift)
        x = random_element(GENERATORS, rng.choice(BIDEGREES), rng)
        y = random_element(GENERATORS, rng.choice(BIDEGREES), rng)
        if not x or not y:
            continue
        lhs = apply(der, bracket(x, y))
        rhs = bracket(apply(der, x), y) + bracket(x, apply(der, y)) * koszul_sign(
            shift, x.top_deg
        )
        assert lhs == rhs


def test_der_bracket_is_commutator():
    rng = random.Random(5)
    for _ in range(10):
        u, v = _random_derivation(rng, 1), _random_derivation(rng, -1)
        commutator = der_bracket(u, v)
        x = random_element(GENERATORS, rng.choice(BIDEGREES), rng)
        expected = apply(u, apply(v, x)) - apply(v, apply(u, x)) * koszul_sign(1, -1)
        assert commutator(x) == expected


def test_der_bracket_antisymmetry_randomized():
    rng = random.Random(17)
    for _ in range(15):
        shifts = (rng.choice([-1, 0, 1]), rng.choice([-1, 0, 1]))
        u, v = (_random_derivation(rng, shift) for shift in shifts)
        assert der_bracket(u, v) == -(der_bracket(v, u) * koszul_sign(*shifts))


def test_der_bracket_jacobi_randomized():
    rng = random.Random(19)
    for _ in range(10):
        shifts = [rng.choice([-1, 0, 1]) for _ in range(3)]
        u, v, w = (_random_derivation(rng, shift) for shift in shifts)
        lhs = der_bracket(u, der_bracket(v, w))
        rhs = der_bracket(der_bracket(u, v), w) + der_bracket(
            v, der_bracket(u, w)
        ) * koszul_sign(shifts[0], shifts[1])
        assert lhs == rhs


def test_morphism_is_multiplicative():
    rng = random.Random(3)
    for _ in range(20):
        f = LieMorphism(
            {
                A: random_element(GENERATORS, (1, 0), rng),
                B: random_element(GENERATORS, (1, 0), rng),
                X: random_element(GENERATORS, (2, 0), rng),
                U: random_element(GENERATORS, (3, 1), rng)
                + random_element(GENERATORS, (3, 0), rng),
            }
        )
        x = random_element(GENERATORS, rng.choice(BIDEGREES), rng)
        y = random_element(GENERATORS, rng.choice(BIDEGREES), rng)
        assert f(bracket(x, y)) == bracket(f(x), f(y))


def test_morphism_identity_and_compose():
    identity = LieMorphism.identity(GENERATORS)
    swap = LieMorphism({A: el(B), B: el(A), X: el(X), U: el(U)})
    assert swap.compose(swap) == identity
    with pytest.raises(DegreeMismatch):
        LieMorphism({X: el(A)})


def test_truncated_model_validation():
    with pytest.raises(DegreeMismatch):
        TruncatedModel((A, Generator("a", 2)), Derivation.zero([A, Generator("a", 2)], -1), 4)
    with pytest.raises(CutoffExceeded):
        TruncatedModel((A, X), Derivation.zero([A, X], -1), 1)
    with pytest.raises(DegreeMismatch):
        TruncatedModel((A,), Derivation.zero([A], 0), 4)
    model = TruncatedModel((A,), Derivation.zero([A], -1), 2)
    with pytest.raises(CutoffExceeded):
        model.d(bracket(bracket(el(A), el(B)), el(A)))


def test_square_zero_detects_failure():
    b, c = Generator("b", 2), Generator("c", 3)
    model = TruncatedModel((A, b, c), Derivation.on([A, b, c], {b: el(A), c: el(b)}, -1), 4)
    report = check_square_zero(model)
    assert not report.passed
    assert report.failures[0]["generator"] == "c"


def test_square_zero_on_cellular_elements(cp2_cellular):
    rng = random.Random(17)
    generators = cp2_cellular.generators
    for _ in range(50):
        top = rng.randint(2, 6)
        x = random_element(generators, (top, 0), rng)
        assert not cp2_cellular.d(cp2_cellular.d(x))


def test_derivation_differential_squares_to_zero(cp2_bigraded):
    rng = random.Random(19)
    d = cp2_bigraded.differential
    for _ in range(50):
        theta = random_gauge_element(cp2_bigraded, rng)
        assert ad(d, ad(d, theta)).is_zero()


def test_maurer_cartan_formulations_agree(quartic):
    rng = random.Random(23)
    for _ in range(50):
        tau = _random_perturbation(quartic, rng)
        report = check_maurer_cartan(quartic.model, tau)
        assert report.details["formulations_agree"]


def test_maurer_cartan_rejects_wrong_degree(cp2_bigraded):
    with pytest.raises(DegreeMismatch):
        check_maurer_cartan(cp2_bigraded.model, Derivation.zero(cp2_bigraded.generators, 0))
