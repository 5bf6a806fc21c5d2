"""
The two model families: cellular models read off a CW structure and
bigraded models resolved from a presentation of the homotopy Lie algebra.
"""

import dataclasses
import logging
import random
from fractions import Fraction
from typing import Dict
from typing import List
from typing import Tuple

from saltext.liemodels.utils import linalg
from saltext.liemodels.utils.dgla import CheckReport
from saltext.liemodels.utils.dgla import Derivation
from saltext.liemodels.utils.dgla import LieMorphism
from saltext.liemodels.utils.dgla import TruncatedModel
from saltext.liemodels.utils.dgla import check_square_zero
from saltext.liemodels.utils.exceptions import CutoffTooSmall
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import HomologyMismatch
from saltext.liemodels.utils.exceptions import LieModelError
from saltext.liemodels.utils.exceptions import NotAnAutomorphism
from saltext.liemodels.utils.exceptions import PresentationInvalid
from saltext.liemodels.utils.exceptions import SquareNonzero
from saltext.liemodels.utils.homology import chain_complex
from saltext.liemodels.utils.homology import class_of
from saltext.liemodels.utils.homology import homology_table
from saltext.liemodels.utils.homology import lie_structure
from saltext.liemodels.utils.lie_core import DEFAULT_BOUND
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.presentation import GLAPresentation
from saltext.liemodels.utils.presentation import clean

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class Cell:
    name: str
    dim: int
    attaching: LieElement = dataclasses.field(default_factory=LieElement)

    @property
    def generator(self):
        return Generator(self.name, self.dim - 1, 0)


@dataclasses.dataclass(frozen=True)
class CWDescription:
    """
    Cells above the implicit 0-cell, each with its attaching map written in
    the generators of earlier cells.
    """

    cells: Tuple[Cell, ...] = ()

    def __len__(self):
        return len(self.cells)


def build_cellular(cw, cutoff, bound=DEFAULT_BOUND):
    """
    One generator in degree ``n - 1`` per ``n``-cell, differential the
    attaching map.

    Cells whose generator would lie above ``cutoff`` are left out.
    """
    generators, values = [], {}
    for cell in cw.cells:
        if cell.dim < 2:
            raise DegreeMismatch(
                f"cell {cell.name} has dimension {cell.dim}; only cells of dimension 2 "
                "and up are allowed above the 0-cell",
                info={"cell": cell.name, "dim": cell.dim},
            )
        if cell.dim - 1 > cutoff:
            log.debug("dropping cell %s above the cutoff %d", cell.name, cutoff)
            continue
        if cell.attaching and cell.attaching.top_degrees() != [cell.dim - 2]:
            raise DegreeMismatch(
                f"attaching map of {cell.name} must have degree {cell.dim - 2}",
                info={"cell": cell.name, "attaching": str(cell.attaching)},
            )
        known = set(generators)
        for used in cell.attaching.generators():
            if used not in known:
                raise DegreeMismatch(
                    f"attaching map of {cell.name} uses {used}, which is not an earlier cell",
                    info={"cell": cell.name, "generator": used.name},
                )
        generators.append(cell.generator)
        values[cell.generator] = cell.attaching
    model = TruncatedModel(
        tuple(generators),
        Derivation.on(generators, values, -1),
        cutoff,
        bound,
        metadata={"family": "cellular", "certified_to": cutoff - 1},
    )
    report = check_square_zero(model)
    if not report.passed:
        raise SquareNonzero(
            "attaching maps do not square to zero", info={"failures": report.failures}
        )
    return model


@dataclasses.dataclass
class BigradedModel:
    """
    A minimal bigraded model together with its identification with ``P``.

    rho
        ``{generator: vector of P}`` on the resolution-0 generators.

    log
        One entry per generator added in positive resolution degree, naming
        the class it kills.
    """

    model: TruncatedModel
    presentation: GLAPresentation
    rho: Dict[Generator, Dict[str, Fraction]]
    log: List[dict] = dataclasses.field(default_factory=list)

    def __hash__(self):
        return hash(self.model)

    @property
    def generators(self):
        return self.model.generators

    @property
    def differential(self):
        return self.model.differential

    @property
    def cutoff(self):
        return self.model.cutoff

    @property
    def bound(self):
        return self.model.bound

    @property
    def certified_to(self):
        return min(self.model.cutoff - 1, self.presentation.known_to())

    def evaluate(self, element):
        """
        Image in ``P`` of the resolution-0 part of ``element``.
        """
        return self.presentation.evaluate(element.res_component(0), self.rho)

    def section(self, vector):
        """
        A resolution-0 element of the model evaluating to ``vector``.
        """
        total = LieElement()
        for name, coeff in clean(vector).items():
            total = total + self._section_of(name) * coeff
        return total

    def _section_of(self, name):
        cache = self.__dict__.setdefault("_sections", {})
        if name not in cache:
            for generator, image in self.rho.items():
                if image == {name: Fraction(1)}:
                    cache[name] = LieElement.of(generator)
                    break
            else:
                cache[name] = self._solve_section(name)
        return cache[name]

    def _solve_section(self, name):
        top_deg = self.presentation.degrees[name]
        names = self.presentation.names_in_degree(top_deg)
        basis = basis_at(self.model.generators_up_to(top_deg), (top_deg, 0), self.model.bound)
        images = [
            [self.presentation.evaluate_monomial(m, self.rho).get(n, linalg.ZERO) for n in names]
            for m in basis.monomials
        ]
        coords = linalg.solve_combination(
            images, linalg.unit(len(names), names.index(name)), len(names)
        )
        if coords is None:
            raise HomologyMismatch(
                f"{name} is not hit by the resolution-0 part of the model",
                info={"name": name},
            )
        return basis.element(coords)

    def with_model(self, model):
        return BigradedModel(model, self.presentation, self.rho, self.log)

    def to_dict(self):
        return {
            "generators": [
                {"name": g.name, "top_deg": g.top_deg, "res_deg": g.res_deg}
                for g in self.generators
            ],
            "differential": {
                g.name: str(self.differential.value(g)) for g in self.generators
            },
            "rho": {g.name: {n: str(c) for n, c in v.items()} for g, v in self.rho.items()},
            "log": list(self.log),
            "cutoff": self.cutoff,
            "certified_to": self.certified_to,
        }

    @classmethod
    def from_model(cls, model):
        """
        Adopt a minimal bigraded model given without a presentation; ``P`` is
        read off its homology.
        """
        if any(
            bidegree[1] != g.res_deg - 1
            for g, value in model.differential.values.items()
            for bidegree in value.bidegrees()
        ):
            raise DegreeMismatch("differential does not have bidegree (-1,-1)")
        if not check_minimal(model):
            raise PresentationInvalid("differential has a linear part; the model is not minimal")
        table, constants = lie_structure(model)
        names = {}
        basis = []
        taken = {g.name for g in model.generators}
        for top_deg, entry in sorted(table.degrees.items()):
            for k, rep in enumerate(entry.representatives):
                gens = rep.generators()
                if len(gens) == 1 and rep == LieElement.of(gens[0]):
                    name = gens[0].name
                else:
                    name = _fresh(f"h{top_deg}", k, len(entry.representatives), taken)
                    taken.add(name)
                names[(top_deg, k)] = name
                basis.append((name, top_deg))
        brackets = {}
        for (i, j, p, q), coords in constants.items():
            brackets[(names[(i, p)], names[(j, q)])] = {
                names[(i + j, k)]: c for k, c in enumerate(coords) if c
            }
        presentation = GLAPresentation(tuple(basis), brackets, cutoff=table.certified_to)
        rho = {}
        for generator in model.generators:
            if generator.res_deg or generator.top_deg > table.certified_to:
                continue
            coords = class_of(model, LieElement.of(generator)).coords
            rho[generator] = {
                names[(generator.top_deg, k)]: c for k, c in enumerate(coords) if c
            }
        return cls(model, presentation, rho, [])


def _fresh(stem, index, count, taken):
    name = stem if count == 1 else f"{stem}_{index + 1}"
    while name in taken:
        name += "_"
    return name


def _res_indices(space, res):
    return [k for k, r in enumerate(space.res_of_index) if r == res]


def _excess(complex_, presentation, rho, top_deg):
    """
    ``{res_deg: [cycle, ...]}``: classes of ``H_{top_deg}`` to be killed.
    """
    space = complex_.space(top_deg)
    rows = complex_.boundary_rows(top_deg)
    upper = complex_.space(top_deg + 1)
    upper_rows = complex_.boundary_rows(top_deg + 1)
    target_dim = complex_.space(top_deg - 1).dim
    names = presentation.names_in_degree(top_deg)
    excess = {}
    for res in sorted(set(space.res_of_index)):
        indices = _res_indices(space, res)
        kernel = linalg.left_nullspace([rows[k] for k in indices], target_dim)
        if res == 0 and kernel:
            monomials = [m for basis in space.bases for m in basis.monomials]
            values = [
                [
                    presentation.evaluate_monomial(monomials[k], rho).get(n, linalg.ZERO)
                    for n in names
                ]
                for k in indices
            ]
            images = [linalg.combine(z, values, len(names)) for z in kernel]
            combos = linalg.left_nullspace(images, len(names))
            kernel = [linalg.combine(c, kernel, len(indices)) for c in combos]
        boundaries = [
            [upper_rows[k][j] for j in indices] for k in _res_indices(upper, res + 1)
        ]
        chosen = linalg.extend_independent(boundaries, kernel, len(indices))
        if not chosen:
            continue
        reps = []
        for k in chosen:
            full = [linalg.ZERO] * space.dim
            for j, entry in zip(indices, kernel[k]):
                full[j] = entry
            reps.append(space.element(full))
        excess[res] = (reps, boundaries, indices)
    return excess


def _scramble(rng, reps, boundaries, indices, space):
    """
    Replace the chosen representatives by another basis of the same classes.
    """
    scrambled = []
    for k, rep in enumerate(reps):
        total = rep
        for earlier in reps[:k]:
            total = total + earlier * rng.randint(-2, 2)
        for vector in boundaries:
            full = [linalg.ZERO] * space.dim
            for j, entry in zip(indices, vector):
                full[j] = entry
            total = total + space.element(full) * rng.randint(-2, 2)
        scrambled.append(total)
    return scrambled


def _name_plan(names):
    """
    Split ``names`` into plain names and names reserved for a bidegree.
    """
    pending, reserved = [], {}
    for entry in names:
        name, _, bidegree = entry.partition("@")
        if not bidegree:
            pending.append(name)
            continue
        try:
            top_deg, res_deg = (int(part) for part in bidegree.split(","))
        except ValueError:
            raise PresentationInvalid(
                f"cannot read the bidegree of {entry}", info={"name": entry}
            ) from None
        reserved.setdefault((top_deg, res_deg), []).append(name)
    return pending, reserved


def build_bigraded(presentation, cutoff, names=None, bound=DEFAULT_BOUND, seed=None):
    """
    Resolve ``presentation`` into its bigraded model up to ``cutoff``.

    names
        Names for the generators added in positive resolution degree, in
        creation order; generated names are used once the list runs out. An
        entry ``name@top,res`` is reserved for the next generator created in
        that bidegree.

    seed
        Pick the killed representatives with ``random.Random(seed)`` instead
        of the first ones found.
    """
    if cutoff < 2:
        raise CutoffTooSmall(
            "a cutoff below 2 certifies nothing", info={"cutoff": cutoff}
        )
    if presentation.cutoff is not None and presentation.cutoff < cutoff - 1:
        raise CutoffTooSmall(
            f"the presentation is only known up to degree {presentation.cutoff}",
            info={"cutoff": cutoff, "presentation_cutoff": presentation.cutoff},
        )
    rng = random.Random(seed) if seed is not None else None
    pending, reserved = _name_plan(names or [])
    taken = set(presentation.names)
    generators, values, rho = [], {}, {}
    for name in presentation.indecomposables():
        top_deg = presentation.degrees[name]
        if top_deg > cutoff:
            continue
        generator = Generator(name, top_deg, 0)
        generators.append(generator)
        values[generator] = LieElement()
        rho[generator] = {name: Fraction(1)}
    build_log = []
    for top_deg in range(1, cutoff):
        model = TruncatedModel(
            tuple(generators), Derivation(values, -1, 1), cutoff, bound
        )
        complex_ = chain_complex(model)
        for res, (reps, boundaries, indices) in _excess(
            complex_, presentation, rho, top_deg
        ).items():
            if rng is not None:
                reps = _scramble(rng, reps, boundaries, indices, complex_.space(top_deg))
            for k, rep in enumerate(reps):
                bidegree = (top_deg + 1, res + 1)
                if reserved.get(bidegree):
                    name = reserved[bidegree].pop(0)
                elif pending:
                    name = pending.pop(0)
                else:
                    name = None
                if name is not None:
                    if name in taken:
                        raise PresentationInvalid(
                            f"generator name {name} is already taken", info={"name": name}
                        )
                else:
                    name = _fresh(f"t{top_deg + 1}r{res + 1}", k, len(reps), taken)
                taken.add(name)
                generator = Generator(name, top_deg + 1, res + 1)
                generators.append(generator)
                values[generator] = rep
                build_log.append(
                    {
                        "generator": name,
                        "bidegree": [top_deg + 1, res + 1],
                        "kills": str(rep),
                    }
                )
                log.debug("added %s at (%d,%d) with d = %s", name, top_deg + 1, res + 1, rep)
    model = TruncatedModel(
        tuple(generators),
        Derivation(values, -1, 1),
        cutoff,
        bound,
        metadata={"family": "bigraded", "certified_to": cutoff - 1},
    )
    built = BigradedModel(model, presentation, rho, build_log)
    _certify(built)
    log.info(
        "bigraded model with %d generators certified up to degree %d",
        len(model.generators),
        built.certified_to,
    )
    return built


def _certify(built):
    """
    Check that the model's homology maps isomorphically onto ``P``.
    """
    table = homology_table(built.model)
    presentation = built.presentation
    for top_deg, entry in table.degrees.items():
        if top_deg > presentation.known_to():
            continue
        names = presentation.names_in_degree(top_deg)
        images = [
            [built.evaluate(rep).get(n, linalg.ZERO) for n in names]
            for rep in entry.representatives
        ]
        if entry.dim != len(names) or linalg.rank(images, len(names)) != len(names):
            raise LieModelError(
                f"homology in degree {top_deg} does not match the presentation",
                info={"top_deg": top_deg, "homology": entry.dim, "presentation": len(names)},
            )


def _truncated(model):
    return model.model if isinstance(model, BigradedModel) else model


def check_minimal(model):
    """
    True when no generator's differential has a linear component.
    """
    model = _truncated(model)
    return not any(
        model.differential.value(g).is_generator_linear() for g in model.generators
    )


def check_zero_region(model):
    """
    No generator, hence no element, with ``res_deg - top_deg / 2 >= 0``.
    """
    truncated = _truncated(model)
    failures = [
        {"generator": g.name, "bidegree": [g.top_deg, g.res_deg]}
        for g in truncated.generators
        if 2 * g.res_deg >= g.top_deg and g.res_deg > 0
    ]
    return CheckReport(
        "zero-region",
        not failures,
        failures,
        details={"cutoff": truncated.cutoff},
    )


def relabel(model, values):
    """
    Conjugate ``model`` by the generator-level automorphism ``values``
    (``{generator: element}``), each generator going to a nonzero multiple of
    a generator of the same bidegree.

    Returns the model whose differential ``d'`` satisfies
    ``d' o sigma = sigma o d``.
    """
    truncated = _truncated(model)
    full = {g: LieElement.of(g) for g in truncated.generators}
    full.update(values)
    targets = {}
    for generator, image in full.items():
        words = list(image.coords.items())
        if len(words) != 1 or len(words[0][0]) != 1:
            raise NotAnAutomorphism(
                f"{generator} is not sent to a multiple of a generator",
                info={"generator": generator.name, "image": str(image)},
            )
        (target,), scale = words[0]
        if target.bidegree != generator.bidegree or target in targets:
            raise NotAnAutomorphism(
                f"{generator} -> {image} does not permute the generators",
                info={"generator": generator.name, "image": str(image)},
            )
        targets[target] = (generator, scale)
    sigma = LieMorphism(full)
    new_values = {
        target: sigma(truncated.differential.value(source)) / scale
        for target, (source, scale) in targets.items()
    }
    relabelled = truncated.with_differential(
        Derivation(new_values, -1, truncated.differential.declared_res_drop),
        relabelled=True,
    )
    if not isinstance(model, BigradedModel):
        return relabelled
    rho = {}
    for target, (source, scale) in targets.items():
        if source in model.rho:
            rho[target] = {n: c / scale for n, c in model.rho[source].items()}
    return BigradedModel(relabelled, model.presentation, rho, list(model.log))

