import pytest

from saltext.liemodels.utils.dgla import LieMorphism
from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import NotACycle
from saltext.liemodels.utils.exceptions import NotAChainMap
from saltext.liemodels.utils.homology import build_splitting
from saltext.liemodels.utils.homology import chain_complex
from saltext.liemodels.utils.homology import class_of
from saltext.liemodels.utils.homology import homology_table
from saltext.liemodels.utils.homology import induced_map
from saltext.liemodels.utils.homology import is_boundary
from saltext.liemodels.utils.homology import lie_structure
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import bracket
from tests.unit.utils.helpers import el
from tests.unit.utils.helpers import proportional


def test_s2_cellular_homology(s2_cellular):
    assert homology_table(s2_cellular).dims() == {1: 1, 2: 1, 3: 0, 4: 0}


def test_cp2_cellular_homology(cp2_cellular):
    table = homology_table(cp2_cellular)
    assert table.dims() == {1: 1, 2: 0, 3: 0, 4: 1, 5: 0}
    assert table.certified_to == 5
    a, b = cp2_cellular.generators
    (rep,) = table.representatives(4)
    assert proportional(rep, bracket(el(b), el(a)))


def test_cp2_bigraded_homology_is_p(cp2_bigraded):
    assert homology_table(cp2_bigraded.model).dims() == {1: 1, 2: 0, 3: 0, 4: 1, 5: 0}


def test_include_cutoff_is_partial(cp2_cellular):
    table = homology_table(cp2_cellular, include_cutoff=True)
    assert table.degrees[6].partial
    assert 6 not in table.dims()
    assert table.to_dict()["degrees"][-1]["partial"] is True


def test_class_of(cp2_cellular):
    a, b = cp2_cellular.generators
    assert is_boundary(cp2_cellular, bracket(el(a), el(a)))
    assert class_of(cp2_cellular, el(a)).coords != (0,)
    assert class_of(cp2_cellular, LieElement()).is_boundary
    with pytest.raises(NotACycle):
        class_of(cp2_cellular, el(b))
    with pytest.raises(CutoffExceeded):
        class_of(cp2_cellular, bracket(el(b), el(b)))


def test_preimage(cp2_cellular):
    a, b = cp2_cellular.generators
    complex_ = chain_complex(cp2_cellular)
    assert complex_.preimage(bracket(el(a), el(a))) == el(b) * 2
    assert complex_.preimage(el(a)) is None
    assert complex_.preimage(LieElement()) == LieElement()


def test_preimage_restricted_to_resolution(cp2_bigraded):
    gens = cp2_bigraded.model.by_name
    complex_ = chain_complex(cp2_bigraded.model)
    db = cp2_bigraded.differential.value(gens["b"])
    assert complex_.preimage(db, exact_res=1) == el(gens["b"])
    assert complex_.preimage(db, exact_res=2) is None
    assert complex_.preimage(db, max_res=0) is None


@pytest.mark.parametrize("seed", [None, 1, 2])
def test_splitting(cp2_cellular, seed):
    splitting = build_splitting(cp2_cellular, seed=seed)
    assert splitting.verify()
    a, b = cp2_cellular.generators
    boundary = bracket(el(a), el(a))
    assert cp2_cellular.d(splitting.phi(boundary)) == boundary
    w, v, part = splitting.decompose(el(b))
    assert w + v + part == el(b)


def test_splitting_outside_range(cp2_cellular):
    a, b = cp2_cellular.generators
    with pytest.raises(CutoffExceeded):
        build_splitting(cp2_cellular).phi(bracket(el(b), el(b)))


def test_induced_identity(cp2_cellular):
    identity = LieMorphism.identity(cp2_cellular.generators)
    induced = induced_map(identity, cp2_cellular, cp2_cellular)
    assert induced.bijective
    assert [entry.matrix for _, entry in sorted(induced.degrees.items())][3] == [[1]]


def test_induced_rejects_non_chain_map(cp2_cellular):
    a, b = cp2_cellular.generators
    with pytest.raises(NotAChainMap):
        induced_map(LieMorphism({a: el(a), b: LieElement()}), cp2_cellular, cp2_cellular)


def test_lie_structure_of_sphere(s2_cellular):
    table, constants = lie_structure(s2_cellular)
    assert table.dims()[2] == 1
    assert any(constants[(1, 1, 0, 0)])
