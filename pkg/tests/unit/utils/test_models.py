from collections import Counter
from fractions import Fraction

import pytest

from saltext.liemodels.utils import linalg
from saltext.liemodels.utils.dgla import Derivation
from saltext.liemodels.utils.dgla import check_square_zero
from saltext.liemodels.utils.exceptions import CutoffTooSmall
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import NotAnAutomorphism
from saltext.liemodels.utils.exceptions import PresentationInvalid
from saltext.liemodels.utils.exceptions import SquareNonzero
from saltext.liemodels.utils.homology import class_of
from saltext.liemodels.utils.homology import homology_table
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.lie_core import bracket
from saltext.liemodels.utils.lie_core import max_res_deg
from saltext.liemodels.utils.models import BigradedModel
from saltext.liemodels.utils.models import Cell
from saltext.liemodels.utils.models import CWDescription
from saltext.liemodels.utils.models import build_bigraded
from saltext.liemodels.utils.models import build_cellular
from saltext.liemodels.utils.models import check_minimal
from saltext.liemodels.utils.models import check_zero_region
from saltext.liemodels.utils.models import relabel
from saltext.liemodels.utils.parser import parse
from saltext.liemodels.utils.perturbation import reduce_representative
from tests.unit.utils.helpers import el
from tests.unit.utils.helpers import load
from tests.unit.utils.helpers import proportional


def test_cellular_generators(cp2_cellular):
    names = [(g.name, g.bidegree) for g in cp2_cellular.generators]
    assert names == [("a", (1, 0)), ("b", (3, 0))]
    a, b = cp2_cellular.generators
    assert cp2_cellular.differential.value(b) == bracket(el(a), el(a)) * Fraction(1, 2)
    assert cp2_cellular.metadata["family"] == "cellular"


def test_cellular_drops_cells_above_cutoff():
    model = build_cellular(load("cp2.cw").body, 2)
    assert [g.name for g in model.generators] == ["a"]


def test_cellular_rejects_bad_cells():
    with pytest.raises(DegreeMismatch):
        build_cellular(CWDescription((Cell("e", 1),)), 4)
    a = Cell("a", 2)
    with pytest.raises(DegreeMismatch):
        build_cellular(CWDescription((a, Cell("b", 4, el(a.generator)))), 4)


def test_cellular_rejects_attaching_maps_that_do_not_square_to_zero():
    a = Cell("a", 2)
    b = Cell("b", 4, bracket(el(a.generator), el(a.generator)))
    e = Cell("e", 8, bracket(el(b.generator), el(b.generator)))
    with pytest.raises(SquareNonzero):
        build_cellular(CWDescription((a, b, e)), 7)


def test_cp2_bigraded_model(cp2_bigraded):
    gens = cp2_bigraded.model.by_name
    assert {name: g.bidegree for name, g in gens.items()} == {
        "a": (1, 0),
        "x": (4, 0),
        "b": (3, 1),
        "c": (5, 2),
        "y": (6, 1),
    }
    d = cp2_bigraded.differential
    a, x, b = el(gens["a"]), el(gens["x"]), el(gens["b"])
    assert proportional(d.value(gens["b"]), bracket(a, a))
    assert proportional(d.value(gens["c"]), bracket(b, a))
    assert proportional(d.value(gens["y"]), bracket(x, a))
    assert check_square_zero(cp2_bigraded.model).passed
    assert check_minimal(cp2_bigraded)
    assert [entry["generator"] for entry in cp2_bigraded.log] == ["b", "c", "y"]


def test_s2_bigraded_model_has_no_new_generators(s2_bigraded):
    assert [g.name for g in s2_bigraded.generators] == ["a"]


def test_generated_names(cp2_bigraded):
    built = build_bigraded(load("cp2.gla").body, 6)
    assert [g.bidegree for g in built.generators] == [g.bidegree for g in cp2_bigraded.generators]
    assert {g.name for g in built.generators} == {"a", "x", "t3r1", "t5r2", "t6r1"}


def test_reserved_names(quartic):
    at_52 = [g for g in quartic.generators if g.bidegree == (5, 2)]
    assert sorted(g.name for g in at_52) == ["w", "z"]


def test_quartic_low_differentials(quartic):
    gens = quartic.model.by_name
    a, b = el(gens["a"]), el(gens["b"])
    d = quartic.differential
    at_31 = [g for g in quartic.generators if g.bidegree == (3, 1)]
    assert len(at_31) == 2
    low = basis_at(quartic.generators, (2, 0), quartic.bound)
    images = [low.vector(d.value(g)) for g in at_31]

    def killing(target):
        coefficients = linalg.solve_combination(images, low.vector(target), len(low))
        assert coefficients is not None
        return el(at_31[0]) * coefficients[0] + el(at_31[1]) * coefficients[1]

    x, y = killing(bracket(b, b)), killing(bracket(a, b))
    middle = basis_at(quartic.generators, (4, 1), quartic.bound)
    found = [middle.vector(d.value(gens[name])) for name in ("w", "z")]
    expected = [
        middle.vector(bracket(b, x)),
        middle.vector(bracket(a, x) + bracket(b, y) * 2),
    ]
    assert gens["w"].bidegree == gens["z"].bidegree == (5, 2)
    assert linalg.rank(found, len(middle)) == 2
    assert linalg.rank(found + expected, len(middle)) == 2


def test_name_clash_and_bad_reservation():
    presentation = load("cp2.gla").body
    with pytest.raises(PresentationInvalid):
        build_bigraded(presentation, 6, names=["x"])
    with pytest.raises(PresentationInvalid):
        build_bigraded(presentation, 6, names=["b@three"])


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmall):
        build_bigraded(load("cp2.gla").body, 1)
    with pytest.raises(CutoffTooSmall):
        build_bigraded(load("ab_quartic.gla").body, 8)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_seeded_models_are_certified(seed):
    built = build_bigraded(load("cp2.gla").body, 6, seed=seed)
    assert homology_table(built.model).dims() == {1: 1, 2: 0, 3: 0, 4: 1, 5: 0}
    assert check_square_zero(built.model).passed


@pytest.mark.parametrize("source,cutoff", [("cp2.gla", 6), ("ab_quartic.gla", 5)])
def test_seeded_models_have_the_same_generators(source, cutoff):
    presentation = load(source).body
    counts = Counter(g.bidegree for g in build_bigraded(presentation, cutoff).generators)
    for seed in (4, 5, 6):
        built = build_bigraded(presentation, cutoff, seed=seed)
        assert Counter(g.bidegree for g in built.generators) == counts


@pytest.mark.parametrize("fixture", ["s2_bigraded", "cp2_bigraded", "quartic"])
def test_zero_region_and_resolution_zero_representatives(fixture, request):
    built = request.getfixturevalue(fixture)
    assert check_zero_region(built).passed
    zero = Derivation.zero(built.generators, -1, 2)
    table = homology_table(built.model)
    for entry in table.degrees.values():
        for rep in entry.representatives:
            reduced = reduce_representative(built, zero, rep)
            assert max_res_deg(reduced) == 0
            assert class_of(built.model, reduced) == class_of(built.model, rep)


def test_zero_region_failure():
    model = parse("gen a deg 1 res 0\ngen b deg 2 res 1\n").body
    report = check_zero_region(model)
    assert not report.passed
    assert report.failures == [{"generator": "b", "bidegree": [2, 1]}]


def test_section_and_evaluate(quartic):
    gens = quartic.model.by_name
    assert quartic.section({"ca": 1}) != LieElement()
    assert quartic.evaluate(quartic.section({"ca": 1})) == {"ca": 1}
    assert quartic.evaluate(bracket(el(gens["c"]), el(gens["a"]))) == {"ca": 1}
    assert quartic.certified_to == 5


def test_from_model(cp2_written):
    assert cp2_written.presentation.names == ["a", "x"]
    assert cp2_written.rho == {
        cp2_written.model.generator("a"): {"a": 1},
        cp2_written.model.generator("x"): {"x": 1},
    }
    assert cp2_written.certified_to == 5


def test_from_model_rejects_non_minimal():
    text = "gen a deg 2 res 0\ngen b deg 3 res 1\ndiff b = a\n"
    with pytest.raises(PresentationInvalid):
        BigradedModel.from_model(parse(text).body)


def test_relabel_swaps_generators():
    built = build_bigraded(load("az.gla").body, 4)
    gens = built.model.by_name
    a, z = gens["a"], gens["z"]
    (killer,) = [g for g in built.generators if g.bidegree == (3, 1)]
    assert proportional(built.differential.value(killer), bracket(el(z), el(z)))
    swapped = relabel(built, {a: el(z), z: el(a)})
    assert proportional(swapped.differential.value(killer), bracket(el(a), el(a)))
    assert check_square_zero(swapped.model).passed
    with pytest.raises(NotAnAutomorphism):
        relabel(built, {a: el(a) + el(z)})
