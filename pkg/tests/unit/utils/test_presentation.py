from fractions import Fraction

import pytest

from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import InvalidStructureConstants
from saltext.liemodels.utils.exceptions import NotAnAutomorphism
from saltext.liemodels.utils.exceptions import PresentationInvalid
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import bracket
from saltext.liemodels.utils.parser import parse
from saltext.liemodels.utils.presentation import GLAPresentation
from saltext.liemodels.utils.presentation import format_vector
from tests.unit.utils.helpers import el
from tests.unit.utils.helpers import load

ONE = Fraction(1)


def test_mirror_brackets_are_completed():
    presentation = GLAPresentation(
        (("a", 1), ("b", 1), ("c", 2), ("x", 2), ("y", 3)),
        {("a", "b"): {"c": ONE}, ("a", "x"): {"y": ONE}},
    )
    assert presentation.basis_bracket("b", "a") == {"c": 1}
    assert presentation.basis_bracket("x", "a") == {"y": -1}


def test_antisymmetry_violation():
    with pytest.raises(InvalidStructureConstants):
        GLAPresentation(
            (("a", 1), ("b", 1), ("c", 2)),
            {("a", "b"): {"c": ONE}, ("b", "a"): {"c": -ONE}},
        )


def test_even_self_bracket_must_vanish():
    with pytest.raises(InvalidStructureConstants):
        GLAPresentation((("x", 2), ("y", 4)), {("x", "x"): {"y": ONE}})


def test_jacobi_failure_names_the_triple():
    with pytest.raises(InvalidStructureConstants) as excinfo:
        GLAPresentation(
            (("a", 1), ("x", 2), ("y", 3)),
            {("a", "a"): {"x": ONE}, ("a", "x"): {"y": ONE}},
        )
    assert excinfo.value.info["triple"] == ["a", "a", "a"]


def test_jacobi_beyond_cutoff_is_not_checked():
    presentation = GLAPresentation(
        (("a", 1), ("x", 2), ("y", 3)),
        {("a", "a"): {"x": ONE}, ("a", "x"): {"y": ONE}},
        cutoff=2,
    )
    assert presentation.known_to() == 2


def test_bad_degrees_and_names():
    with pytest.raises(DegreeMismatch):
        GLAPresentation((("a", 1), ("y", 3)), {("a", "a"): {"y": ONE}})
    with pytest.raises(PresentationInvalid):
        GLAPresentation((("a", 1),), {("a", "a"): {"q": ONE}})
    with pytest.raises(PresentationInvalid):
        GLAPresentation((("a", 1), ("a", 2)))
    with pytest.raises(DegreeMismatch):
        GLAPresentation((("a", 0),))


def test_indecomposables():
    assert load("s2.gla").body.indecomposables() == ["a"]
    assert load("ab_quartic.gla").body.indecomposables() == ["a", "b", "c", "e"]
    assert load("cp2.gla").body.indecomposables() == ["a", "x"]


def test_evaluate():
    presentation = load("s2.gla").body
    a = Generator("a", 1)
    rho = {a: {"a": ONE}}
    assert presentation.evaluate(bracket(el(a), el(a)), rho) == {"aa": 1}
    assert presentation.evaluate(bracket(bracket(el(a), el(a)), el(a)), rho) == {}


def test_check_automorphism():
    s2 = load("s2.gla").body
    with pytest.raises(NotAnAutomorphism):
        s2.check_automorphism({"a": {"a": 2 * ONE}})
    full = s2.check_automorphism({"a": {"a": 2 * ONE}, "aa": {"aa": 4 * ONE}})
    assert s2.invert_map(full) == {"a": {"a": Fraction(1, 2)}, "aa": {"aa": Fraction(1, 4)}}
    cp2 = load("cp2.gla").body
    assert cp2.check_automorphism({"x": {"x": -ONE}})["x"] == {"x": -1}
    with pytest.raises(NotAnAutomorphism):
        cp2.check_automorphism({"x": {}})
    with pytest.raises(NotAnAutomorphism):
        cp2.check_automorphism({"q": {"x": ONE}})


def test_to_text_reads_back():
    presentation = load("ab_quartic.gla").body
    again = parse(presentation.to_text()).body
    assert again == presentation
    assert again.brackets == presentation.brackets


def test_format_vector():
    assert format_vector({"b": -ONE, "a": Fraction(1, 2)}) == "(1/2)*a - b"
    assert format_vector({}) == "0"
