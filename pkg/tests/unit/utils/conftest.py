import pytest

from saltext.liemodels.utils.models import BigradedModel
from saltext.liemodels.utils.models import build_bigraded
from saltext.liemodels.utils.models import build_cellular
from tests.unit.utils.helpers import load


@pytest.fixture(scope="session")
def s2_cellular():
    return build_cellular(load("s2.cw").body, 5)


@pytest.fixture(scope="session")
def cp2_cellular():
    return build_cellular(load("cp2.cw").body, 6)


@pytest.fixture(scope="session")
def s2_bigraded():
    return build_bigraded(load("s2.gla").body, 5)


@pytest.fixture(scope="session")
def cp2_bigraded():
    return build_bigraded(load("cp2.gla").body, 6, names=["b", "c", "y"])


@pytest.fixture(scope="session")
def cp2_written():
    """
    The hand-written CP^2 model, adopted without a presentation.
    """
    return BigradedModel.from_model(load("cp2.bgm").body)


@pytest.fixture(scope="session")
def quartic():
    return build_bigraded(load("ab_quartic.gla").body, 6, names=["w@5,2", "z@5,2"])


@pytest.fixture(scope="session")
def quartic_taus():
    return load("ab_quartic.taus")
