"""
Shared helpers for the engine tests.
"""

from saltext.liemodels import DATA_ROOT
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.parser import parse


def load(name, default_cutoff=None):
    return parse((DATA_ROOT / name).read_text(encoding="utf-8"), default_cutoff=default_cutoff)


def proportional(first, second):
    """
    Nonzero ``q`` with ``first == q * second``, or ``None``.
    """
    if not first or not second:
        return None
    word, coeff = next(iter(second.coords.items()))
    q = first.coords.get(word, 0) / coeff
    if q and first == second * q:
        return q
    return None


def el(generator):
    return LieElement.of(generator)


def random_element(generators, bidegree, rng, scale=3):
    """
    Random integer combination of the basis of ``bidegree``.
    """
    total = LieElement()
    for element in basis_at(generators, bidegree).elements:
        total = total + element * rng.randint(-scale, scale)
    return total
