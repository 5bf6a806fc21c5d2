"""
Perturbations of bigraded models and the gauge action on them.

A perturbation ``tau`` is a derivation of degree -1 lowering resolution
degree by at least 2 with ``(d + tau)^2 = 0``; gauge elements ``theta`` have
degree 0 and lower resolution degree by at least 1, so ``exp(ad_theta)`` is a
finite sum on every generator.
"""

import dataclasses
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict
from typing import List
from typing import Optional

import sympy

from saltext.liemodels.utils import linalg
from saltext.liemodels.utils.dgla import Derivation
from saltext.liemodels.utils.dgla import LieMorphism
from saltext.liemodels.utils.dgla import apply
from saltext.liemodels.utils.dgla import check_maurer_cartan
from saltext.liemodels.utils.dgla import der_bracket
from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import HomologyMismatch
from saltext.liemodels.utils.exceptions import LieModelError
from saltext.liemodels.utils.exceptions import NotAnAutomorphism
from saltext.liemodels.utils.exceptions import RepresentativeReductionFailed
from saltext.liemodels.utils.exceptions import SquareNonzero
from saltext.liemodels.utils.homology import build_splitting
from saltext.liemodels.utils.homology import chain_complex
from saltext.liemodels.utils.homology import class_of
from saltext.liemodels.utils.homology import homology_table
from saltext.liemodels.utils.homology import induced_map
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.lie_core import max_res_deg
from saltext.liemodels.utils.presentation import format_vector

log = logging.getLogger(__name__)


def _processing_order(generators):
    return sorted(generators, key=lambda g: (g.res_deg, g.top_deg, g.name))


def theta_membership(der, degree):
    """
    True when ``der`` has topological degree ``degree`` and every value
    component lowers resolution degree by more than ``-degree``.
    """
    if der.top_shift != degree:
        return False
    for generator, value in der.values.items():
        for _, res in value.bidegrees():
            if generator.res_deg - res <= -degree:
                return False
    return True


def perturbation(model, values, check=True):
    """
    Build ``tau`` on the generators of ``model`` from ``{generator: value}``.

    check
        Also require the Maurer-Cartan equation.
    """
    tau = Derivation.on(model.generators, values, -1)
    if not theta_membership(tau, -1):
        raise DegreeMismatch(
            "a perturbation must lower resolution degree by at least 2",
            info={"tau": repr(tau)},
        )
    tau = tau.with_drop(2)
    if check:
        report = check_maurer_cartan(_truncated(model), tau)
        if not report.passed:
            raise SquareNonzero(
                "(d + tau)^2 does not vanish", info={"failures": report.failures}
            )
    return tau


def gauge_element(model, values):
    """
    Build ``theta`` of degree 0 from ``{generator: value}``.
    """
    theta = Derivation.on(model.generators, values, 0)
    if not theta_membership(theta, 0):
        raise DegreeMismatch(
            "a gauge element must lower resolution degree by at least 1",
            info={"theta": repr(theta)},
        )
    return theta.with_drop(1)


def _truncated(model):
    return getattr(model, "model", model)


def perturbed(model, tau):
    """
    ``(L, d + tau)`` as a model in its own right.
    """
    truncated = _truncated(model)
    return truncated.with_differential(
        (truncated.differential + tau).with_drop(1), perturbed=True
    )


def reduce_representative(model, tau, element):
    """
    Move a ``(d + tau)``-cycle to a homologous one in resolution degree 0 by
    peeling off its top resolution layer.
    """
    truncated = _truncated(model)
    complex_ = chain_complex(truncated)
    total = (truncated.differential + tau).with_drop(1)
    current = element
    while current and max_res_deg(current) > 0:
        top = max_res_deg(current)
        layer = current.res_component(top)
        lift = complex_.preimage(layer, exact_res=top + 1)
        if lift is None:
            raise RepresentativeReductionFailed(
                f"top layer of {element} in resolution degree {top} is not a boundary of d",
                info={"element": str(element), "layer": str(layer)},
            )
        current = current - apply(total, lift)
    return current


@dataclasses.dataclass
class Triple:
    """
    A perturbed model with its identification of homology with ``P``.

    identification
        ``{top_deg: [vector of P, ...]}``, one vector per representative.
    """

    model: object
    tau: Derivation
    representatives: Dict[int, List[LieElement]]
    identification: Dict[int, List[dict]]

    def to_dict(self):
        names = self.model.presentation.names
        return {
            "tau": {g.name: str(v) for g, v in self.tau.values.items() if v},
            "degrees": [
                {
                    "top_deg": top_deg,
                    "representatives": [str(rep) for rep in self.representatives[top_deg]],
                    "images": [format_vector(v, names) for v in vectors],
                }
                for top_deg, vectors in sorted(self.identification.items())
            ],
        }


def triple_identification(model, tau):
    """
    Identify ``H(L, d + tau)`` with ``P`` through resolution-0 representatives.
    """
    table = homology_table(perturbed(model, tau))
    presentation = model.presentation
    representatives, identification = {}, {}
    for top_deg, entry in table.degrees.items():
        if top_deg > model.certified_to:
            continue
        names = presentation.names_in_degree(top_deg)
        reps = [reduce_representative(model, tau, rep) for rep in entry.representatives]
        images = [model.evaluate(rep) for rep in reps]
        rows = [[image.get(n, linalg.ZERO) for n in names] for image in images]
        if len(reps) != len(names) or linalg.rank(rows, len(names)) != len(names):
            raise HomologyMismatch(
                f"H(L, d + tau) in degree {top_deg} does not map isomorphically onto P",
                info={"top_deg": top_deg, "homology": len(reps), "presentation": len(names)},
            )
        representatives[top_deg] = reps
        identification[top_deg] = images
    return Triple(model, tau, representatives, identification)


def exp_derivation(theta, generators, limit=None):
    """
    The automorphism ``exp(theta) = sum theta^k / k!`` of a locally
    nilpotent degree-0 derivation.
    """
    values = {}
    for generator in generators:
        term = LieElement.of(generator)
        total = term
        for k in range(1, _iteration_limit(generators, limit)):
            term = apply(theta, term) / k
            if not term:
                break
            total = total + term
        else:
            raise LieModelError(
                "derivation is not locally nilpotent", info={"generator": generator.name}
            )
        values[generator] = total
    return LieMorphism(values)


def log_automorphism(phi, generators, limit=None):
    """
    ``log(phi) = sum (-1)^(k+1) (phi - id)^k / k`` for a unipotent ``phi``.
    """
    values = {}
    for generator in generators:
        power = LieElement.of(generator)
        total = LieElement()
        for k in range(1, _iteration_limit(generators, limit)):
            power = phi(power) - power
            if not power:
                break
            total = total + power * Fraction((-1) ** (k + 1), k)
        else:
            raise LieModelError(
                "automorphism is not unipotent", info={"generator": generator.name}
            )
        values[generator] = total
    return Derivation(values, 0, 1)


def _iteration_limit(generators, limit):
    if limit is not None:
        return limit
    return max((g.res_deg for g in generators), default=0) + 3


def exp_ad(theta, der, limit=None):
    """
    ``exp(ad_theta)(der) = sum ad_theta^k(der) / k!``.
    """
    total = der
    term = der
    for k in range(1, _iteration_limit(der.domain, limit)):
        term = der_bracket(theta, term) * Fraction(1, k)
        if term.is_zero():
            return total
        total = total + term
    raise LieModelError("ad_theta is not nilpotent on the truncation")


def gauge_apply(model, theta, tau):
    """
    ``tau' = exp(ad_theta)(d + tau) - d``.

    The result is recomputed as ``Phi (d + tau) Phi^-1`` with
    ``Phi = exp(theta)`` and both answers must agree.
    """
    if not theta_membership(theta, 0):
        raise DegreeMismatch(
            "theta must have degree 0 and lower resolution degree",
            info={"theta": repr(theta)},
        )
    truncated = _truncated(model)
    theta = theta.with_drop(1)
    d = truncated.differential
    total = (d + tau).with_drop(1)
    image = exp_ad(theta, total)
    phi = exp_derivation(theta, truncated.generators)
    phi_inverse = exp_derivation(-theta, truncated.generators)
    for generator in truncated.generators:
        conjugated = phi(apply(total, phi_inverse.value(generator)))
        if conjugated != image.value(generator):
            raise LieModelError(
                "exp(ad_theta) disagrees with conjugation by exp(theta)",
                info={
                    "generator": generator.name,
                    "series": str(image.value(generator)),
                    "conjugation": str(conjugated),
                },
            )
    result = image - d
    if not theta_membership(result, -1):
        raise LieModelError(
            "gauge action left the perturbations", info={"tau": repr(result)}
        )
    result = result.with_drop(2)
    report = check_maurer_cartan(truncated, result)
    if not report.passed:
        raise LieModelError(
            "gauge action broke the Maurer-Cartan equation", info={"failures": report.failures}
        )
    return result


@dataclasses.dataclass
class Obstruction:
    """
    Why no homomorphism can be extended over ``generator``.
    """

    generator: str
    residual: LieElement
    representative: LieElement
    image: dict

    def to_dict(self):
        return {
            "generator": self.generator,
            "residual": str(self.residual),
            "representative": str(self.representative),
            "class": format_vector(self.image),
        }


@dataclasses.dataclass
class Equivalence:
    equivalent: bool
    certified_to: int
    theta: Optional[Derivation] = None
    phi: Optional[LieMorphism] = None
    obstruction: Optional[Obstruction] = None

    def to_dict(self):
        data = {"equivalent": self.equivalent, "certified_to": self.certified_to}
        if self.theta is not None:
            data["theta"] = {g.name: str(v) for g, v in self.theta.values.items() if v}
        if self.obstruction is not None:
            data["obstruction"] = self.obstruction.to_dict()
        return data


@dataclasses.dataclass(frozen=True)
class PhiUnknown:
    generator: object
    element: LieElement
    symbol: sympy.Symbol


class PhiSystem:
    """
    The equations ``Phi (d + tau) = (d + tau') Phi`` in the coefficients of
    ``Phi - id``.

    ``Phi(u) - u`` ranges over the basis of ``L`` in the degree of ``u`` below
    its resolution degree, so ``Phi`` is the identity on resolution degree 0
    and unipotent. Every block is a polynomial in the unknowns, keyed by
    monomials (sorted tuples of unknown indices) with coordinate vectors as
    coefficients.
    """

    def __init__(self, model, source, target):
        self.model = model
        truncated = model.model
        complex_ = chain_complex(truncated)
        self.order = _processing_order(truncated.generators)
        self.unknowns = []
        by_generator = {}
        for generator in self.order:
            if not generator.res_deg:
                continue
            space = complex_.space(generator.top_deg)
            for k, r in enumerate(space.res_of_index):
                if r < generator.res_deg:
                    by_generator.setdefault(generator, []).append(len(self.unknowns))
                    self.unknowns.append(
                        PhiUnknown(
                            generator,
                            space.elements[k],
                            sympy.Symbol(f"p_{generator.name}_{len(self.unknowns)}"),
                        )
                    )
        images = {}
        for generator in truncated.generators:
            images[generator] = [((), LieElement.of(generator))] + [
                ((k,), self.unknowns[k].element) for k in by_generator.get(generator, [])
            ]
        self.blocks = {}
        for generator in self.order:
            if not generator.res_deg:
                continue
            space = complex_.space(generator.top_deg - 1)
            if not space.dim:
                continue
            terms = _polynomial_image(source.value(generator), images)
            terms[()] = terms.get((), LieElement()) - target.value(generator)
            for k in by_generator.get(generator, []):
                terms[(k,)] = terms.get((k,), LieElement()) - apply(
                    target, self.unknowns[k].element
                )
            vectors = {mono: space.vector(value) for mono, value in terms.items() if value}
            self.blocks[generator] = (space.dim, vectors)
        log.debug(
            "Phi system: %d unknowns over %d generators", len(self.unknowns), len(self.blocks)
        )

    def is_linear(self, generators=None):
        return all(
            len(mono) <= 1 for _, vectors in self._blocks(generators) for mono in vectors
        )

    def _blocks(self, generators):
        if generators is None:
            return list(self.blocks.values())
        return [self.blocks[g] for g in generators if g in self.blocks]

    def solve(self, generators=None):
        """
        ``{unknown index: value}`` solving the blocks of ``generators`` (all
        of them by default), or ``None`` when they are inconsistent.
        """
        blocks = self._blocks(generators)
        if self.is_linear(generators):
            return self._solve_linear(blocks)
        return self._solve_polynomial(blocks)

    def _solve_linear(self, blocks):
        size = sum(dim for dim, _ in blocks)
        columns = [[linalg.ZERO] * size for _ in self.unknowns]
        target = [linalg.ZERO] * size
        offset = 0
        for dim, vectors in blocks:
            for mono, vector in vectors.items():
                for j, entry in enumerate(vector):
                    if not entry:
                        continue
                    if mono:
                        columns[mono[0]][offset + j] += entry
                    else:
                        target[offset + j] -= entry
            offset += dim
        if not self.unknowns:
            return {} if not any(target) else None
        solution = linalg.solve_combination(columns, target, size)
        if solution is None:
            return None
        return {k: c for k, c in enumerate(solution) if c}

    def equations(self, blocks=None):
        symbols = [u.symbol for u in self.unknowns]
        found = []
        for dim, vectors in blocks if blocks is not None else self._blocks(None):
            for j in range(dim):
                expr = sympy.Integer(0)
                for mono, vector in vectors.items():
                    if vector[j]:
                        term = _to_sympy(vector[j])
                        for k in mono:
                            term *= symbols[k]
                        expr += term
                expr = sympy.expand(expr)
                if expr != 0:
                    found.append(expr)
        return found

    def _solve_polynomial(self, blocks):
        equations = self.equations(blocks)
        symbols = [u.symbol for u in self.unknowns]
        zeros = {symbol: sympy.Integer(0) for symbol in symbols}
        for solution in sympy.solve(equations, symbols, dict=True):
            values = {
                symbol: sympy.sympify(solution.get(symbol, 0)).xreplace(zeros)
                for symbol in symbols
            }
            if not all(value.is_Rational for value in values.values()):
                continue
            if all(sympy.expand(expr.xreplace(values)) == 0 for expr in equations):
                return {
                    k: Fraction(int(values[s].p), int(values[s].q))
                    for k, s in enumerate(symbols)
                    if values[s]
                }
        return None

    def morphism(self, point):
        values = {g: LieElement.of(g) for g in self.model.model.generators}
        for k, c in point.items():
            unknown = self.unknowns[k]
            values[unknown.generator] = values[unknown.generator] + unknown.element * c
        return LieMorphism(values)


def _polynomial_image(element, images):
    """
    ``Phi(element)`` as ``{monomial: LieElement}`` where ``images`` gives each
    generator's image as ``[(monomial, LieElement)]``.
    """
    total = defaultdict(lambda: defaultdict(Fraction))
    for word, coeff in element.coords.items():
        partial = {((), ()): coeff}
        for letter in word:
            step = defaultdict(Fraction)
            for (mono, prefix), c in partial.items():
                for inner_mono, inner in images[letter]:
                    merged = tuple(sorted(mono + inner_mono))
                    for inner_word, inner_coeff in inner.coords.items():
                        step[(merged, prefix + inner_word)] += c * inner_coeff
            partial = {key: c for key, c in step.items() if c}
            if not partial:
                break
        for (mono, full), c in partial.items():
            total[mono][full] += c
    result = {}
    for mono, coords in total.items():
        value = LieElement(coords)
        if value:
            result[mono] = value
    return result


def decide_equivalence(first, second):
    """
    Decide whether two triples over the same bigraded model are related by the
    gauge action.

    Looks for a unipotent ``Phi`` with ``Phi (d + tau) = (d + tau') Phi`` by
    solving :py:class:`PhiSystem` on all generators at once, so cycles added
    to ``Phi`` on earlier generators are available to later ones. On success
    the witness is ``theta = log(Phi)``, checked against
    :py:func:`gauge_apply`. Otherwise the obstruction sits at the first
    generator, in order of resolution degree, whose equations cannot be met
    together with those before it.
    """
    model = first.model
    if second.model.model != model.model:
        raise LieModelError("triples live over different models")
    truncated = model.model
    d = truncated.differential
    source = (d + first.tau).with_drop(1)
    target = (d + second.tau).with_drop(1)
    system = PhiSystem(model, source, target)
    point = system.solve()
    if point is None:
        obstruction = _obstruction(model, second.tau, system, source, target)
        log.info(
            "no gauge equivalence: obstruction at %s is %s",
            obstruction.generator,
            obstruction.residual,
        )
        return Equivalence(False, model.certified_to, obstruction=obstruction)
    phi = system.morphism(point)
    for generator in truncated.generators:
        if phi(source.value(generator)) != apply(target, phi.value(generator)):
            raise LieModelError(
                "constructed map is not a chain map", info={"generator": generator.name}
            )
    theta = log_automorphism(phi, truncated.generators)
    if gauge_apply(model, theta, first.tau) != second.tau:
        raise LieModelError("recovered witness does not reproduce the second perturbation")
    log.info("perturbations are gauge equivalent up to degree %d", model.certified_to)
    return Equivalence(True, model.certified_to, theta=theta, phi=phi)


def _obstruction(model, tau, system, source, target):
    solved, point, failing = [], {}, None
    for generator in system.order:
        attempt = system.solve(solved + [generator])
        if attempt is None:
            failing = generator
            break
        solved.append(generator)
        point = attempt
    if failing is None:
        raise LieModelError("Phi system is inconsistent but every prefix solves")
    phi = system.morphism(point)
    residual = phi(source.value(failing)) - target.value(failing)
    if chain_complex(perturbed(model, tau)).preimage(residual) is None:
        representative = reduce_representative(model, tau, residual)
        image = model.evaluate(representative)
    else:
        # a boundary, but only of elements too high in resolution degree
        representative, image = LieElement(), {}
    return Obstruction(failing.name, residual, representative, image)


@dataclasses.dataclass
class PerturbationResult:
    """
    ``tau`` on the source model and a chain map ``pi`` into the target.
    """

    tau: Derivation
    pi: LieMorphism
    cases: Dict[str, str]

    def to_dict(self):
        return {
            "tau": {g.name: str(v) for g, v in self.tau.values.items() if v},
            "pi": {g.name: str(v) for g, v in self.pi.values.items()},
            "cases": dict(self.cases),
        }


class _TargetIdentification:
    """
    ``eta``: P -> cycles of the target, through ``pi`` of the source section,
    and its inverse ``i'`` on homology classes.
    """

    def __init__(self, source, target, pi_values):
        self.source = source
        self.target = target
        self.pi = LieMorphism(pi_values)
        self._inverse = {}

    def inverse(self, top_deg):
        if top_deg not in self._inverse:
            names = self.source.presentation.names_in_degree(top_deg)
            rows = []
            for name in names:
                cycle = self.pi(self.source.section({name: 1}))
                rows.append(list(class_of(self.target, cycle).coords) if cycle else None)
            size = chain_complex(self.target).homology(top_deg).dim
            rows = [row if row is not None else [linalg.ZERO] * size for row in rows]
            if size != len(names) or linalg.rank(rows, size) != size:
                raise HomologyMismatch(
                    f"target homology in degree {top_deg} does not match P",
                    info={"top_deg": top_deg, "target": size, "presentation": len(names)},
                )
            self._inverse[top_deg] = (names, rows)
        return self._inverse[top_deg]

    def to_presentation(self, cycle):
        """
        ``i'`` of the class of ``cycle``.
        """
        coords = class_of(self.target, cycle).coords
        names, rows = self.inverse(cycle.top_deg)
        solution = linalg.solve_combination(rows, list(coords), len(coords))
        return {name: c for name, c in zip(names, solution) if c}


def _match_resolution_zero(source, target):
    """
    Send the resolution-0 generators to target cycles whose classes complete
    the classes of the decomposables, degree by degree.
    """
    complex_ = chain_complex(target)
    values = {}
    zeros = sorted((g for g in source.generators if not g.res_deg), key=lambda g: g.sort_key)
    for top_deg in sorted({g.top_deg for g in zeros}):
        wanted = [g for g in zeros if g.top_deg == top_deg]
        if top_deg > target.cutoff - 1:
            raise CutoffExceeded(
                f"target homology is only certified up to degree {target.cutoff - 1}",
                info={"top_deg": top_deg},
            )
        pi = LieMorphism(values)
        lower = [g for g in values if g.top_deg < top_deg]
        decomposables = []
        for res_basis in [basis_at(lower, (top_deg, 0), source.model.bound)] if lower else []:
            for element in res_basis.elements:
                image = pi(element)
                if image:
                    decomposables.append(list(class_of(target, image).coords))
        entry = complex_.homology(top_deg)
        units = [linalg.unit(entry.dim, k) for k in range(entry.dim)]
        chosen = linalg.extend_independent(decomposables, units, entry.dim)
        if len(chosen) != len(wanted):
            raise HomologyMismatch(
                f"target has {len(chosen)} indecomposable classes in degree {top_deg}, "
                f"expected {len(wanted)}",
                info={"top_deg": top_deg},
            )
        for generator, k in zip(wanted, chosen):
            values[generator] = entry.representatives[k]
    return values


def perturb_toward(source, target):
    """
    Perturb the bigraded model ``source`` until it maps quasi-isomorphically
    onto ``target``, a model whose homology is ``P``.

    Returns a :py:class:`PerturbationResult` with ``pi (d + tau) = delta pi``
    on every generator.
    """
    if target.cutoff < source.cutoff:
        raise CutoffExceeded(
            "target must be known at least as far as the source",
            info={"source": source.cutoff, "target": target.cutoff},
        )
    target_complex = chain_complex(target)
    pi_values = _match_resolution_zero(source, target)
    identification = _TargetIdentification(source, target, pi_values)
    tau_values, cases = {}, {}
    for generator in _processing_order(source.generators):
        if not generator.res_deg:
            continue
        du = source.differential.value(generator)
        tau_partial = Derivation.on(source.generators, tau_values, -1)
        correction = LieElement()
        if generator.res_deg >= 3:
            partial_model = perturbed(source, tau_partial)
            correction = chain_complex(partial_model).preimage(
                apply(tau_partial, du), max_res=generator.res_deg - 2
            )
            if correction is None:
                raise HomologyMismatch(
                    f"tau(d{generator}) is not a low boundary",
                    info={"generator": generator.name},
                )
        image = LieMorphism(pi_values)(du - correction)
        if generator.res_deg >= 2 and image and not class_of(target, image).is_boundary:
            alpha = identification.to_presentation(image)
            value = -correction - source.section(alpha)
            cases[generator.name] = f"not a boundary: class {format_vector(alpha)}"
        else:
            value = -correction
            cases[generator.name] = "boundary"
        tau_values[generator] = value
        lift = target_complex.preimage(LieMorphism(pi_values)(du + value))
        if lift is None:
            raise HomologyMismatch(
                f"pi(d + tau){generator} is not a boundary in the target",
                info={"generator": generator.name},
            )
        pi_values[generator] = lift
        log.debug("tau(%s) = %s, pi(%s) = %s", generator, value, generator, lift)
    tau = perturbation(source, tau_values)
    pi = LieMorphism(pi_values)
    total = (source.differential + tau).with_drop(1)
    for generator in source.generators:
        if pi(total.value(generator)) != apply(target.differential, pi.value(generator)):
            raise LieModelError(
                "pi is not a chain map", info={"generator": generator.name}
            )
    log.info("perturbation found with support %s", [g.name for g in tau.support()])
    return PerturbationResult(tau, pi, cases)


class ComparisonMap:
    """
    ``f(x) = x + tau phi(x)`` from ``(L, d)`` to ``(L, d + tau)`` and its
    inverse ``sum (-1)^i (tau phi)^i``.
    """

    def __init__(self, model, tau, splitting=None):
        self.model = model
        self.tau = tau
        self.splitting = splitting or build_splitting(_truncated(model))

    def _step(self, element):
        if not element:
            return element
        return apply(self.tau, self.splitting.phi(element))

    def __call__(self, element):
        return element + self._step(element)

    def inverse(self, element):
        total = LieElement()
        term = element
        sign = 1
        while term:
            total = total + term * sign
            term = self._step(term)
            sign = -sign
        return total

    def verify(self):
        """
        ``f o f^-1 = f^-1 o f = id`` on every basis element, full rank in every
        certified degree, and an isomorphism on homology.
        """
        truncated = _truncated(self.model)
        complex_ = chain_complex(truncated)
        ranks = {}
        for top_deg in range(1, truncated.cutoff):
            space = complex_.space(top_deg)
            rows = []
            for element in space.elements:
                image = self(element)
                if self.inverse(image) != element or self(self.inverse(element)) != element:
                    return False, {"top_deg": top_deg, "element": str(element)}
                rows.append(space.vector(image))
            ranks[top_deg] = linalg.rank(rows, space.dim) == space.dim
        if not all(ranks.values()):
            return False, {"ranks": ranks}
        induced = induced_map(self, truncated, perturbed(self.model, self.tau))
        return induced.bijective, induced.to_dict()


def comparison_map(model, tau):
    return ComparisonMap(model, tau)


def _invert(morphism, truncated):
    """
    Inverse of a bidegree-preserving automorphism, solved on each generator's
    bidegree component.
    """
    values = {}
    for generator in truncated.generators:
        basis = basis_at(
            truncated.generators_up_to(generator.top_deg), generator.bidegree, truncated.bound
        )
        images = []
        for element in basis.elements:
            coords = basis.coordinates(morphism(element))
            if coords is None:
                raise NotAnAutomorphism(
                    "lift does not preserve bidegree", info={"generator": generator.name}
                )
            images.append(coords)
        target = basis.coordinates(LieElement.of(generator))
        solution = linalg.solve_combination(images, target, len(basis))
        if solution is None:
            raise NotAnAutomorphism(
                f"lift is not invertible at {generator}", info={"generator": generator.name}
            )
        values[generator] = basis.element(solution)
    return LieMorphism(values)


def lift_automorphism(model, sigma):
    """
    Lift an automorphism of ``P`` (``{basis name: vector}``) to a chain
    automorphism of the bigraded model.
    """
    presentation = model.presentation
    full = presentation.check_automorphism(sigma)
    truncated = model.model
    complex_ = chain_complex(truncated)
    values = {}
    for generator in _processing_order(truncated.generators):
        if not generator.res_deg:
            values[generator] = model.section(
                presentation.apply_linear(full, model.rho.get(generator, {}))
            )
            continue
        image = LieMorphism(values)(truncated.differential.value(generator))
        lift = complex_.preimage(image, exact_res=generator.res_deg)
        if lift is None:
            raise NotAnAutomorphism(
                f"automorphism does not lift over {generator}",
                info={"generator": generator.name},
            )
        values[generator] = lift
    return LieMorphism(values)


def apply_automorphism(model, sigma, tau):
    """
    Conjugate ``d + tau`` by the lift ``S`` of ``sigma``:
    ``tau' = S tau S^-1``.
    """
    truncated = model.model
    lift = lift_automorphism(model, sigma)
    inverse = _invert(lift, truncated)
    values = {
        generator: lift(apply(tau, inverse.value(generator)))
        for generator in truncated.generators
    }
    result = perturbation(model, values)
    log.info("automorphism carries tau to support %s", [g.name for g in result.support()])
    return result


@dataclasses.dataclass(frozen=True)
class Unknown:
    generator: object
    index: int
    element: LieElement
    symbol: sympy.Symbol


class MCSystem:
    """
    The Maurer-Cartan equations of the bigraded model in the coefficients of
    ``tau`` against the admissible targets of each generator.
    """

    def __init__(self, model, unknowns, equations, trivial):
        self.model = model
        self.unknowns = unknowns
        self.equations = equations
        self.trivial = trivial

    @property
    def symbols(self):
        return [u.symbol for u in self.unknowns]

    def linear_part(self):
        """
        ``[{symbol name: coefficient}]``: the degree-1 terms of every equation.
        """
        rows = []
        for _, expr in self.equations:
            poly = sympy.Poly(expr, *self.symbols) if self.symbols else None
            row = {}
            if poly is not None:
                for monom, coeff in poly.terms():
                    if sum(monom) == 1:
                        row[str(self.symbols[monom.index(1)])] = coeff
            if row:
                rows.append(row)
        return rows

    def verify(self, point):
        """
        True when ``point`` (``{symbol or name: value}``) solves every
        equation; missing unknowns are zero.
        """
        values = {u.symbol: sympy.Rational(0) for u in self.unknowns}
        by_name = {str(u.symbol): u.symbol for u in self.unknowns}
        for key, value in point.items():
            symbol = by_name[str(key)]
            value = Fraction(value)
            values[symbol] = sympy.Rational(value.numerator, value.denominator)
        return all(sympy.expand(expr.xreplace(values)) == 0 for _, expr in self.equations)

    def point_of(self, tau):
        """
        Coefficients of ``tau`` on the unknowns.
        """
        point = {}
        by_generator = {}
        for u in self.unknowns:
            by_generator.setdefault(u.generator, []).append(u)
        for generator, unknowns in by_generator.items():
            value = tau.values.get(generator, LieElement())
            vectors = [self._vector(u.element) for u in unknowns]
            coords = linalg.solve_combination(
                vectors, self._vector(value), len(vectors[0])
            ) if value else [linalg.ZERO] * len(unknowns)
            if coords is None:
                raise DegreeMismatch(
                    f"tau({generator}) is not an admissible target",
                    info={"generator": generator.name},
                )
            for u, c in zip(unknowns, coords):
                if c:
                    point[str(u.symbol)] = c
        for generator, value in tau.values.items():
            if value and generator not in by_generator:
                raise DegreeMismatch(
                    f"{generator} admits no perturbation", info={"generator": generator.name}
                )
        return point

    def _vector(self, element):
        top_deg = element.top_deg
        return chain_complex(self.model.model).space(top_deg).vector(element)

    def is_trivial(self, generator, element):
        vectors = [self._vector(b) for b in self.trivial.get(generator, [])]
        if not vectors:
            return not element
        return linalg.solve_combination(vectors, self._vector(element), len(vectors[0])) is not None

    def single_target_solutions(self):
        """
        Unknowns that solve the system on their own, skipping targets that
        are boundaries.
        """
        found = []
        for u in self.unknowns:
            if self.is_trivial(u.generator, u.element):
                continue
            if self.verify({u.symbol: 1}):
                found.append(u)
        return found

    def perturbation_at(self, point):
        values = {}
        by_name = {str(u.symbol): u for u in self.unknowns}
        for key, value in point.items():
            u = by_name[str(key)]
            current = values.get(u.generator, LieElement())
            values[u.generator] = current + u.element * Fraction(value)
        return perturbation(self.model, values)

    def to_dict(self):
        return {
            "unknowns": [
                {"symbol": str(u.symbol), "generator": u.generator.name, "target": str(u.element)}
                for u in self.unknowns
            ],
            "equations": [
                {"generator": g.name, "equation": str(expr)} for g, expr in self.equations
            ],
            "linear_part": [
                {name: str(c) for name, c in row.items()} for row in self.linear_part()
            ],
            "trivial_directions": {
                g.name: [str(b) for b in directions]
                for g, directions in self.trivial.items()
                if directions
            },
            "single_target_solutions": [
                {"generator": u.generator.name, "target": str(u.element)}
                for u in self.single_target_solutions()
            ],
        }


def _to_sympy(value):
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def mc_system(model):
    """
    Emit the Maurer-Cartan system of ``model`` symbolically.
    """
    truncated = model.model
    complex_ = chain_complex(truncated)
    d = truncated.differential
    unknowns = []
    trivial = {}
    for generator in truncated.generators:
        if generator.res_deg < 2 or generator.top_deg < 2:
            continue
        space = complex_.space(generator.top_deg - 1)
        admissible = [
            k for k, r in enumerate(space.res_of_index) if r <= generator.res_deg - 2
        ]
        for k in admissible:
            unknowns.append(
                Unknown(
                    generator,
                    len(unknowns),
                    space.elements[k],
                    sympy.Symbol(f"t_{generator.name}_{len(unknowns)}"),
                )
            )
        trivial[generator] = _boundaries_in(complex_, generator)
    by_generator = {}
    for u in unknowns:
        by_generator.setdefault(u.generator, []).append(u)

    elementary_derivations = {
        u.index: Derivation.on(truncated.generators, {u.generator: u.element}, -1)
        for u in unknowns
    }

    def elementary(u, element):
        return apply(elementary_derivations[u.index], element)

    equations = []
    for generator in truncated.generators:
        if generator.top_deg < 3:
            continue
        target_space = complex_.space(generator.top_deg - 2)
        if not target_space.dim:
            continue
        coords = [sympy.Integer(0)] * target_space.dim
        dg = d.value(generator)

        def accumulate(element, factor):
            if not element:
                return
            for j, c in enumerate(target_space.vector(element)):
                if c:
                    coords[j] += factor * _to_sympy(c)

        for u in by_generator.get(generator, []):
            accumulate(apply(d, u.element), u.symbol)
            for v in unknowns:
                if v.generator in u.element.generators():
                    accumulate(elementary(v, u.element), u.symbol * v.symbol)
        for v in unknowns:
            if v.generator in dg.generators():
                accumulate(elementary(v, dg), v.symbol)
        for j, expr in enumerate(coords):
            expr = sympy.expand(expr)
            if expr != 0:
                equations.append((generator, expr))
    log.debug("Maurer-Cartan system: %d unknowns, %d equations", len(unknowns), len(equations))
    return MCSystem(model, unknowns, equations, trivial)


def _boundaries_in(complex_, generator):
    """
    Basis of the boundaries among the admissible targets of ``generator``.
    """
    top_deg = generator.top_deg - 1
    space = complex_.space(top_deg)
    rows = complex_.boundary_rows(top_deg + 1)
    source = complex_.space(top_deg + 1)
    vectors = [
        rows[k]
        for k, r in enumerate(source.res_of_index)
        if r - 1 <= generator.res_deg - 2
    ]
    reduced = linalg.rref(vectors, space.dim)[0]
    return [space.element(vector) for vector in reduced]


def random_gauge_element(model, rng, density=0.5, scale=3):
    """
    A random element of the gauge algebra: each generator goes to a random
    integer combination of the basis below its resolution degree.
    """
    truncated = _truncated(model)
    complex_ = chain_complex(truncated)
    values = {}
    for generator in truncated.generators:
        if not generator.res_deg:
            continue
        space = complex_.space(generator.top_deg)
        total = LieElement()
        for k, r in enumerate(space.res_of_index):
            if r < generator.res_deg and rng.random() < density:
                total = total + space.elements[k] * rng.randint(-scale, scale)
        values[generator] = total
    return gauge_element(truncated, values)

