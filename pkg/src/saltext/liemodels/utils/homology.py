"""
Cycles, boundaries, homology and the splitting of the differential.

Everything is computed one topological degree at a time over the direct sum
of the resolution degrees present there. Homology is certified up to
``cutoff - 1``: boundaries into the cutoff degree would need generators above
it.
"""

import dataclasses
import functools
import logging
import random
from typing import Dict
from typing import List
from typing import Tuple

from saltext.liemodels.utils import linalg
from saltext.liemodels.utils.dgla import LieMorphism
from saltext.liemodels.utils.dgla import apply
from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import LieModelError
from saltext.liemodels.utils.exceptions import NotACycle
from saltext.liemodels.utils.exceptions import NotAChainMap
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.lie_core import bracket
from saltext.liemodels.utils.lie_core import max_res_deg
from saltext.liemodels.utils.lie_core import res_range

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ChainSpace:
    """
    The chains of one topological degree, ``L_i = sum_r L_{i,r}``.

    Coordinates run through the resolution degrees in increasing order.
    """

    top_deg: int
    bases: Tuple

    @property
    def dim(self):
        return sum(len(basis) for basis in self.bases)

    @functools.cached_property
    def offsets(self):
        offsets, start = {}, 0
        for basis in self.bases:
            offsets[basis.bidegree[1]] = start
            start += len(basis)
        return offsets

    @functools.cached_property
    def res_of_index(self):
        return [basis.bidegree[1] for basis in self.bases for _ in basis.elements]

    @functools.cached_property
    def elements(self):
        return [element for basis in self.bases for element in basis.elements]

    def vector(self, element):
        vector = [linalg.ZERO] * self.dim
        by_res = {basis.bidegree[1]: basis for basis in self.bases}
        for (top, res), piece in element.components().items():
            basis = by_res.get(res)
            coords = basis.coordinates(piece) if basis is not None and top == self.top_deg else None
            if coords is None:
                raise LieModelError(
                    f"element does not lie in the chains of degree {self.top_deg}",
                    info={"bidegree": [top, res], "element": str(element)},
                )
            start = self.offsets[res]
            vector[start : start + len(coords)] = coords
        return vector

    def element(self, vector):
        total = LieElement()
        for coefficient, element in zip(vector, self.elements):
            if coefficient:
                total = total + element * coefficient
        return total


@dataclasses.dataclass
class HomologyDegree:
    top_deg: int
    dim: int
    representatives: List[LieElement]
    cycle_dim: int
    boundary_dim: int
    partial: bool = False

    def to_dict(self):
        return {
            "top_deg": self.top_deg,
            "dim": self.dim,
            "representatives": [str(rep) for rep in self.representatives],
            "max_res_deg": [max_res_deg(rep) for rep in self.representatives],
            "cycle_dim": self.cycle_dim,
            "boundary_dim": self.boundary_dim,
            "partial": self.partial,
        }


@dataclasses.dataclass
class HomologyTable:
    """
    Homology per topological degree, with representatives of minimal
    resolution degree.
    """

    degrees: Dict[int, HomologyDegree]
    certified_to: int

    def dims(self):
        return {i: entry.dim for i, entry in self.degrees.items() if not entry.partial}

    def representatives(self, top_deg):
        return self.degrees[top_deg].representatives

    def to_dict(self):
        return {
            "certified_to": self.certified_to,
            "degrees": [entry.to_dict() for _, entry in sorted(self.degrees.items())],
        }


def is_bihomogeneous(der):
    """
    True when every generator value has the same bidegree shift.
    """
    shifts = {
        (top - generator.top_deg, res - generator.res_deg)
        for generator, value in der.values.items()
        for top, res in value.bidegrees()
    }
    return len(shifts) <= 1


class ChainComplex:
    """
    Lazily computed linear algebra of one model.
    """

    def __init__(self, model):
        self.model = model
        self.bihomogeneous = is_bihomogeneous(model.differential)
        self._spaces = {}
        self._rows = {}
        self._cycles = {}
        self._boundaries = {}
        self._homology = {}
        self._coordinatizers = {}

    def space(self, top_deg):
        if top_deg not in self._spaces:
            generators = self.model.generators_up_to(top_deg)
            bases = []
            for res in res_range(generators, top_deg):
                basis = basis_at(generators, (top_deg, res), bound=self.model.bound)
                if len(basis):
                    bases.append(basis)
            self._spaces[top_deg] = ChainSpace(top_deg, tuple(bases))
        return self._spaces[top_deg]

    def boundary_rows(self, top_deg):
        """
        Row ``k`` holds the coordinates of ``d`` of the ``k``-th basis element
        of ``L_top_deg`` in ``L_{top_deg - 1}``.
        """
        if top_deg > self.model.cutoff:
            raise CutoffExceeded(
                f"the differential is only known up to degree {self.model.cutoff}",
                info={"top_deg": top_deg, "cutoff": self.model.cutoff},
            )
        if top_deg not in self._rows:
            source = self.space(top_deg)
            target = self.space(top_deg - 1)
            self._rows[top_deg] = [
                target.vector(apply(self.model.differential, element))
                for element in source.elements
            ]
        return self._rows[top_deg]

    def cycles(self, top_deg):
        if top_deg not in self._cycles:
            space = self.space(top_deg)
            rows = self.boundary_rows(top_deg)
            self._cycles[top_deg] = linalg.left_nullspace(rows, self.space(top_deg - 1).dim)
            log.debug("dim Z_%d = %d of %d", top_deg, len(self._cycles[top_deg]), space.dim)
        return self._cycles[top_deg]

    def boundaries(self, top_deg):
        if top_deg not in self._boundaries:
            rows = self.boundary_rows(top_deg + 1)
            self._boundaries[top_deg] = linalg.rref(rows, self.space(top_deg).dim)[0]
        return self._boundaries[top_deg]

    def _layered_cycles(self, top_deg):
        """
        Cycle candidates, lowest resolution layer first.
        """
        space = self.space(top_deg)
        rows = self.boundary_rows(top_deg)
        target_dim = self.space(top_deg - 1).dim
        candidates = []
        for res in sorted(set(space.res_of_index)):
            if self.bihomogeneous:
                indices = [k for k, r in enumerate(space.res_of_index) if r == res]
            else:
                indices = [k for k, r in enumerate(space.res_of_index) if r <= res]
            kernel = linalg.left_nullspace([rows[k] for k in indices], target_dim)
            for vector in kernel:
                full = [linalg.ZERO] * space.dim
                for k, entry in zip(indices, vector):
                    full[k] = entry
                candidates.append(full)
        return candidates

    def homology(self, top_deg, partial=False):
        if top_deg in self._homology:
            return self._homology[top_deg]
        space = self.space(top_deg)
        cycles = self.cycles(top_deg)
        if partial:
            boundaries = []
        else:
            boundaries = self.boundaries(top_deg)
        candidates = self._layered_cycles(top_deg)
        chosen = linalg.extend_independent(boundaries, candidates, space.dim)
        representatives = [space.element(candidates[k]) for k in chosen]
        if len(representatives) != len(cycles) - len(boundaries):
            raise LieModelError(
                "rank-nullity check failed",
                info={
                    "top_deg": top_deg,
                    "cycles": len(cycles),
                    "boundaries": len(boundaries),
                    "representatives": len(representatives),
                },
            )
        entry = HomologyDegree(
            top_deg=top_deg,
            dim=len(representatives),
            representatives=representatives,
            cycle_dim=len(cycles),
            boundary_dim=len(boundaries),
            partial=partial,
        )
        if not partial:
            self._homology[top_deg] = entry
        return entry

    def class_coordinatizer(self, top_deg):
        if top_deg not in self._coordinatizers:
            space = self.space(top_deg)
            reps = [space.vector(rep) for rep in self.homology(top_deg).representatives]
            self._coordinatizers[top_deg] = linalg.Coordinatizer(
                reps + self.boundaries(top_deg), space.dim
            )
        return self._coordinatizers[top_deg]

    def preimage(self, element, max_res=None, exact_res=None):
        """
        Some ``y`` with ``d(y) == element``, or ``None``.

        max_res
            Restrict ``y`` to resolution degrees up to this value.

        exact_res
            Restrict ``y`` to this single resolution degree.
        """
        if not element:
            return LieElement()
        top_deg = element.top_deg
        source = self.space(top_deg + 1)
        rows = self.boundary_rows(top_deg + 1)
        indices = [
            k
            for k, r in enumerate(source.res_of_index)
            if (max_res is None or r <= max_res) and (exact_res is None or r == exact_res)
        ]
        target = self.space(top_deg).vector(element)
        solution = linalg.solve_combination(
            [rows[k] for k in indices], target, self.space(top_deg).dim
        )
        if solution is None:
            return None
        vector = [linalg.ZERO] * source.dim
        for k, entry in zip(indices, solution):
            vector[k] = entry
        return source.element(vector)


@functools.lru_cache(maxsize=64)
def chain_complex(model):
    return ChainComplex(model)


def homology_table(model, include_cutoff=False):
    """
    Homology of ``model`` in degrees ``1 .. cutoff - 1``.

    include_cutoff
        Also report degree ``cutoff`` with the boundaries that are known
        (none), flagged ``partial``.
    """
    complex_ = chain_complex(model)
    degrees = {}
    for top_deg in range(1, model.cutoff):
        degrees[top_deg] = complex_.homology(top_deg)
    if include_cutoff and model.cutoff >= 1:
        degrees[model.cutoff] = complex_.homology(model.cutoff, partial=True)
    return HomologyTable(degrees=degrees, certified_to=model.cutoff - 1)


@dataclasses.dataclass(frozen=True)
class ClassCoordinates:
    """
    Coordinates of a homology class against the table representatives.
    """

    top_deg: int
    coords: Tuple

    @property
    def is_boundary(self):
        return not any(self.coords)

    def to_dict(self):
        if self.is_boundary:
            return {"top_deg": self.top_deg, "class": "boundary"}
        return {"top_deg": self.top_deg, "class": [str(c) for c in self.coords]}


def class_of(model, element):
    """
    Class of the cycle ``element`` in ``H(model)``.
    """
    if not element:
        return ClassCoordinates(0, ())
    top_deg = element.top_deg
    if top_deg > model.cutoff - 1:
        raise CutoffExceeded(
            f"homology is certified up to degree {model.cutoff - 1}",
            info={"top_deg": top_deg, "cutoff": model.cutoff},
        )
    if apply(model.differential, element):
        raise NotACycle(f"{element} is not a cycle", info={"element": str(element)})
    complex_ = chain_complex(model)
    size = complex_.homology(top_deg).dim
    coords = complex_.class_coordinatizer(top_deg).coordinates(
        complex_.space(top_deg).vector(element)
    )
    if coords is None:
        raise LieModelError("cycle is outside V + B", info={"element": str(element)})
    return ClassCoordinates(top_deg, tuple(coords[:size]))


def is_boundary(model, element):
    return class_of(model, element).is_boundary


@dataclasses.dataclass
class DegreeSplitting:
    top_deg: int
    complement: List[LieElement]
    harmonic: List[LieElement]
    boundaries: List[LieElement]
    lifts: List[LieElement]


class SplittingData:
    """
    ``L_i = W_i + V_i + B_i`` for ``i <= cutoff - 1`` and the splitting ``phi``
    sending ``B_i`` back to ``W_{i+1}``.
    """

    def __init__(self, model, degrees):
        self.model = model
        self.degrees = degrees
        self._coordinatizers = {}

    def _coordinatizer(self, top_deg):
        if top_deg not in self._coordinatizers:
            entry = self.degrees[top_deg]
            space = chain_complex(self.model).space(top_deg)
            vectors = [
                space.vector(element)
                for element in entry.complement + entry.harmonic + entry.boundaries
            ]
            self._coordinatizers[top_deg] = linalg.Coordinatizer(vectors, space.dim)
        return self._coordinatizers[top_deg]

    def decompose(self, element):
        """
        ``(w, v, b)`` parts of a homogeneous element.
        """
        top_deg = element.top_deg
        entry = self._entry(top_deg)
        coords = self._coordinatizer(top_deg).coordinates(
            chain_complex(self.model).space(top_deg).vector(element)
        )
        sizes = (len(entry.complement), len(entry.harmonic))
        parts = (
            (coords[: sizes[0]], entry.complement),
            (coords[sizes[0] : sizes[0] + sizes[1]], entry.harmonic),
            (coords[sizes[0] + sizes[1] :], entry.boundaries),
        )
        return tuple(_span(c, elements) for c, elements in parts)

    def _entry(self, top_deg):
        if top_deg not in self.degrees:
            raise CutoffExceeded(
                f"the splitting is only defined up to degree {self.model.cutoff - 1}",
                info={"top_deg": top_deg, "cutoff": self.model.cutoff},
            )
        return self.degrees[top_deg]

    def phi(self, element):
        total = LieElement()
        for top_deg in element.top_degrees():
            piece = element.top_component(top_deg)
            entry = self._entry(top_deg)
            coords = self._coordinatizer(top_deg).coordinates(
                chain_complex(self.model).space(top_deg).vector(piece)
            )
            offset = len(entry.complement) + len(entry.harmonic)
            total = total + _span(coords[offset:], entry.lifts)
        return total

    __call__ = phi

    def verify(self):
        """
        ``d phi = id`` on each ``B_i``, ``phi d = id`` on each ``W_i``,
        ``phi`` vanishes on ``V_i`` and ``W_i``.
        """
        d = self.model.differential
        for top_deg, entry in self.degrees.items():
            for b, lift in zip(entry.boundaries, entry.lifts):
                if apply(d, lift) != b or self.phi(b) != lift:
                    return False
            for element in entry.complement + entry.harmonic:
                if self.phi(element):
                    return False
            if top_deg - 1 in self.degrees:
                for w in entry.complement:
                    if self.phi(apply(d, w)) != w:
                        return False
        return True

    def to_dict(self):
        return {
            str(i): {
                "W": [str(x) for x in entry.complement],
                "V": [str(x) for x in entry.harmonic],
                "B": [str(x) for x in entry.boundaries],
                "phi": {str(b): str(w) for b, w in zip(entry.boundaries, entry.lifts)},
            }
            for i, entry in sorted(self.degrees.items())
        }


def _span(coords, elements):
    total = LieElement()
    for coefficient, element in zip(coords, elements):
        if coefficient:
            total = total + element * coefficient
    return total


def _complement(cycles, dim, order):
    """
    Unit vectors completing ``cycles`` to a basis, chosen pivot-greedy along
    the column order ``order``.
    """
    if not cycles:
        return [linalg.unit(dim, k) for k in order]
    permuted = [[vector[k] for k in order] for vector in cycles]
    pivots = set(linalg.rref(permuted, dim)[1])
    return [linalg.unit(dim, order[j]) for j in range(dim) if j not in pivots]


def build_splitting(model, seed=None):
    """
    Choose ``W_i``, ``V_i``, ``B_i`` and ``phi`` for every certified degree.

    seed
        When given, the column order used to pick the complements ``W_i`` is
        shuffled with ``random.Random(seed)``.
    """
    complex_ = chain_complex(model)
    rng = random.Random(seed) if seed is not None else None
    complements = {}
    for top_deg in range(1, model.cutoff + 1):
        space = complex_.space(top_deg)
        order = list(range(space.dim))
        if rng is not None:
            rng.shuffle(order)
        complements[top_deg] = [
            space.element(vector)
            for vector in _complement(complex_.cycles(top_deg), space.dim, order)
        ]
    degrees = {}
    for top_deg in range(1, model.cutoff):
        lifts = complements[top_deg + 1]
        degrees[top_deg] = DegreeSplitting(
            top_deg=top_deg,
            complement=complements[top_deg],
            harmonic=list(complex_.homology(top_deg).representatives),
            boundaries=[apply(model.differential, w) for w in lifts],
            lifts=list(lifts),
        )
    return SplittingData(model, degrees)


@dataclasses.dataclass
class InducedDegree:
    top_deg: int
    matrix: List[List]
    injective: bool
    surjective: bool

    @property
    def bijective(self):
        return self.injective and self.surjective

    def to_dict(self):
        return {
            "top_deg": self.top_deg,
            "matrix": [[str(c) for c in row] for row in self.matrix],
            "injective": self.injective,
            "surjective": self.surjective,
        }


@dataclasses.dataclass
class InducedMap:
    degrees: Dict[int, InducedDegree]

    @property
    def bijective(self):
        return all(entry.bijective for entry in self.degrees.values())

    def to_dict(self):
        return {"degrees": [entry.to_dict() for _, entry in sorted(self.degrees.items())]}


def induced_map(f, source, target):
    """
    Matrix of ``f`` on homology, one row per source representative.

    f
        A :py:class:`LieMorphism` (checked against the differentials on every
        generator) or any linear callable (checked on representatives and
        boundaries).
    """
    if isinstance(f, LieMorphism):
        for generator in source.generators:
            lhs = f(source.differential.value(generator))
            rhs = apply(target.differential, f.value(generator))
            if lhs != rhs:
                raise NotAChainMap(
                    f"map does not commute with the differentials on {generator}",
                    info={"generator": generator.name, "fd": str(lhs), "df": str(rhs)},
                )
    source_table = homology_table(source)
    target_table = homology_table(target)
    source_complex = chain_complex(source)
    degrees = {}
    for top_deg in range(1, min(source.cutoff, target.cutoff)):
        if not isinstance(f, LieMorphism):
            space = source_complex.space(top_deg)
            for vector in source_complex.boundaries(top_deg):
                image = f(space.element(vector))
                if image and not _is_target_boundary(target, image):
                    raise NotAChainMap(
                        "map does not send boundaries to boundaries",
                        info={"top_deg": top_deg, "image": str(image)},
                    )
        rows = []
        for rep in source_table.representatives(top_deg):
            image = f(rep)
            try:
                rows.append(list(class_of(target, image).coords) if image else None)
            except NotACycle as exc:
                raise NotAChainMap(
                    "map sends a cycle to a non-cycle", info={"representative": str(rep)}
                ) from exc
        size = target_table.degrees[top_deg].dim
        rows = [row if row is not None else [linalg.ZERO] * size for row in rows]
        rank = linalg.rank(rows, size)
        degrees[top_deg] = InducedDegree(
            top_deg=top_deg,
            matrix=rows,
            injective=rank == len(rows),
            surjective=rank == size,
        )
    return InducedMap(degrees)


def _is_target_boundary(target, element):
    if apply(target.differential, element):
        return False
    return class_of(target, element).is_boundary


def lie_structure(model):
    """
    Structure constants of ``H(model)`` on the table representatives.

    Returns ``(table, constants)`` where ``constants[(i, j, p, q)]`` lists the
    coordinates of ``[rep_{i,p}, rep_{j,q}]`` in degree ``i + j``.
    """
    table = homology_table(model)
    constants = {}
    for i, first in table.degrees.items():
        for j, second in table.degrees.items():
            if i + j > table.certified_to:
                continue
            for p, x in enumerate(first.representatives):
                for q, y in enumerate(second.representatives):
                    coords = class_of(model, bracket(x, y)).coords
                    if any(coords):
                        constants[(i, j, p, q)] = tuple(coords)
    return table, constants
