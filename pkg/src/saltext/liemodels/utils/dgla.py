"""
Truncated free differential graded Lie algebras.

A derivation of a free Lie algebra is determined by its values on the
generators; it is extended to the tensor algebra by the Leibniz rule, a
derivation of degree ``k`` picking up ``(-1)**(k*|x|)`` when it moves past
``x``.
"""

import dataclasses
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict
from typing import Tuple

from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import MissingGeneratorValue
from saltext.liemodels.utils.lie_core import DEFAULT_BOUND
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import koszul_sign

log = logging.getLogger(__name__)


class Derivation:
    """
    A derivation given by its generator values.

    values
        Mapping from :py:class:`Generator` to :py:class:`LieElement`; its keys
        are the domain of the derivation.

    top_shift
        Topological degree of the derivation.

    declared_res_drop
        Least amount every value lowers resolution degree by. Checked.
    """

    __slots__ = ("values", "top_shift", "declared_res_drop")

    def __init__(self, values, top_shift, declared_res_drop=0):
        self.values = dict(values)
        self.top_shift = top_shift
        self.declared_res_drop = declared_res_drop
        for generator, value in self.values.items():
            for top, res in value.bidegrees():
                if top != generator.top_deg + top_shift:
                    raise DegreeMismatch(
                        f"value on {generator} has topological degree {top}, expected "
                        f"{generator.top_deg + top_shift}",
                        info={"generator": generator.name, "value": str(value)},
                    )
                if res > generator.res_deg - declared_res_drop:
                    raise DegreeMismatch(
                        f"value on {generator} lowers resolution degree by "
                        f"{generator.res_deg - res}, declared {declared_res_drop}",
                        info={"generator": generator.name, "value": str(value)},
                    )

    @classmethod
    def zero(cls, generators, top_shift, declared_res_drop=0):
        return cls({g: LieElement() for g in generators}, top_shift, declared_res_drop)

    @classmethod
    def on(cls, generators, values, top_shift, declared_res_drop=0):
        """
        Derivation defined on ``generators``, zero wherever ``values`` is silent.
        """
        full = {g: LieElement() for g in generators}
        full.update(values)
        return cls(full, top_shift, declared_res_drop)

    @property
    def domain(self):
        return tuple(sorted(self.values, key=lambda g: g.sort_key))

    def value(self, generator):
        try:
            return self.values[generator]
        except KeyError:
            raise MissingGeneratorValue(
                f"derivation has no value on {generator}", info={"generator": generator.name}
            ) from None

    def support(self):
        return [g for g in self.domain if self.values[g]]

    def is_zero(self):
        return not any(self.values.values())

    def res_drop(self):
        """
        Least resolution drop actually realized; ``None`` for the zero map.
        """
        drops = [
            generator.res_deg - res
            for generator, value in self.values.items()
            for _, res in value.bidegrees()
        ]
        return min(drops) if drops else None

    def __call__(self, element):
        return apply(self, element)

    def _combine(self, other, sign):
        if other.top_shift != self.top_shift:
            raise DegreeMismatch(
                "cannot add derivations of different degree",
                info={"degrees": [self.top_shift, other.top_shift]},
            )
        values = dict(self.values)
        for generator, value in other.values.items():
            values[generator] = values.get(generator, LieElement()) + value * sign
        return Derivation(
            values, self.top_shift, min(self.declared_res_drop, other.declared_res_drop)
        )

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, scalar):
        return Derivation(
            {g: value * scalar for g, value in self.values.items()},
            self.top_shift,
            self.declared_res_drop,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.top_shift != other.top_shift:
            return False
        keys = set(self.values) | set(other.values)
        return all(
            self.values.get(g, LieElement()) == other.values.get(g, LieElement()) for g in keys
        )

    def __hash__(self):
        return hash((self.top_shift, frozenset((g, v) for g, v in self.values.items() if v)))

    def with_drop(self, declared_res_drop):
        return Derivation(self.values, self.top_shift, declared_res_drop)

    def __repr__(self):
        shown = ", ".join(f"{g} -> {v}" for g, v in self.values.items() if v)
        return f"<Derivation deg={self.top_shift} {{{shown}}}>"


def apply(der, element):
    """
    Apply ``der`` to ``element`` through the graded Leibniz rule.
    """
    coords = defaultdict(Fraction)
    shift = der.top_shift
    for word, coeff in element.coords.items():
        passed = 0
        for i, letter in enumerate(word):
            image = der.value(letter)
            if image:
                sign = koszul_sign(shift, passed)
                head, tail = word[:i], word[i + 1 :]
                for inner, inner_coeff in image.coords.items():
                    coords[head + inner + tail] += sign * coeff * inner_coeff
            passed += letter.top_deg
    return LieElement(coords)


def der_bracket(u, v):
    """
    Graded commutator ``u o v - (-1)**(|u||v|) v o u`` on generator values.
    """
    sign = koszul_sign(u.top_shift, v.top_shift)
    values = {}
    for generator in u.domain:
        values[generator] = apply(u, v.value(generator)) - apply(v, u.value(generator)) * sign
    return Derivation(
        values, u.top_shift + v.top_shift, u.declared_res_drop + v.declared_res_drop
    )


class LieMorphism:
    """
    Degree-preserving Lie algebra map between free Lie algebras, given on
    generators and extended multiplicatively on tensor words.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = dict(values)
        for generator, value in self.values.items():
            if value and value.top_degrees() != [generator.top_deg]:
                raise DegreeMismatch(
                    f"image of {generator} is not in degree {generator.top_deg}",
                    info={"generator": generator.name, "value": str(value)},
                )

    @classmethod
    def identity(cls, generators):
        return cls({g: LieElement.of(g) for g in generators})

    def value(self, generator):
        try:
            return self.values[generator]
        except KeyError:
            raise MissingGeneratorValue(
                f"map has no value on {generator}", info={"generator": generator.name}
            ) from None

    def __call__(self, element):
        total = defaultdict(Fraction)
        for word, coeff in element.coords.items():
            partial = {(): coeff}
            for letter in word:
                image = self.value(letter)
                step = defaultdict(Fraction)
                for prefix, prefix_coeff in partial.items():
                    for inner, inner_coeff in image.coords.items():
                        step[prefix + inner] += prefix_coeff * inner_coeff
                partial = {w: c for w, c in step.items() if c}
                if not partial:
                    break
            for w, c in partial.items():
                total[w] += c
        return LieElement(total)

    def compose(self, other):
        """
        ``self o other``.
        """
        return LieMorphism({g: self(value) for g, value in other.values.items()})

    def __eq__(self, other):
        if not isinstance(other, LieMorphism):
            return NotImplemented
        keys = set(self.values) | set(other.values)
        return all(
            self.values.get(g, LieElement()) == other.values.get(g, LieElement()) for g in keys
        )

    __hash__ = None


@dataclasses.dataclass(frozen=True)
class TruncatedModel:
    """
    A free DGLA whose data is trusted up to topological degree ``cutoff``.
    """

    generators: Tuple[Generator, ...]
    differential: Derivation
    cutoff: int
    bound: int = DEFAULT_BOUND
    metadata: Dict = dataclasses.field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.generators, key=lambda g: g.sort_key))
        object.__setattr__(self, "generators", ordered)
        names = [g.name for g in ordered]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise DegreeMismatch(
                f"duplicate generator names: {', '.join(duplicates)}",
                info={"names": duplicates},
            )
        if self.differential.top_shift != -1:
            raise DegreeMismatch(
                "a differential has topological degree -1",
                info={"top_shift": self.differential.top_shift},
            )
        for generator in ordered:
            if generator.top_deg > self.cutoff:
                raise CutoffExceeded(
                    f"generator {generator} lies above the cutoff {self.cutoff}",
                    info={"generator": generator.name, "cutoff": self.cutoff},
                )
            self.differential.value(generator)

    def __hash__(self):
        return hash((self.generators, self.differential, self.cutoff))

    @property
    def by_name(self):
        return {g.name: g for g in self.generators}

    def generator(self, name):
        return self.by_name[name]

    def generators_up_to(self, top_deg):
        return [g for g in self.generators if g.top_deg <= top_deg]

    def max_res(self):
        return max((g.res_deg for g in self.generators), default=0)

    def check_degree(self, element):
        for top in element.top_degrees():
            if top > self.cutoff:
                raise CutoffExceeded(
                    f"degree {top} lies above the cutoff {self.cutoff}",
                    info={"top_deg": top, "cutoff": self.cutoff},
                )

    def d(self, element):
        self.check_degree(element)
        return apply(self.differential, element)

    def with_differential(self, differential, **metadata):
        merged = dict(self.metadata)
        merged.update(metadata)
        return TruncatedModel(self.generators, differential, self.cutoff, self.bound, merged)


@dataclasses.dataclass
class CheckReport:
    """
    Pass/fail verdict of a structural check.

    failures
        One dictionary per offending generator or bidegree.
    """

    name: str
    passed: bool
    failures: list = dataclasses.field(default_factory=list)
    details: dict = dataclasses.field(default_factory=dict)

    def to_dict(self):
        return dataclasses.asdict(self)


def check_square_zero(model):
    """
    Evaluate ``d(d(g))`` on every generator up to the cutoff.
    """
    failures = []
    for generator in model.generators:
        residual = apply(model.differential, model.differential.value(generator))
        if residual:
            failures.append({"generator": generator.name, "residual": str(residual)})
    if failures:
        log.info("d^2 fails on %d generators", len(failures))
    return CheckReport("square-zero", not failures, failures)


def check_maurer_cartan(model, tau):
    """
    Check ``(d + tau)^2 = 0`` and ``D tau + 1/2 [tau, tau] = 0`` on every
    generator, and whether the two agree.
    """
    if tau.top_shift != -1:
        raise DegreeMismatch(
            "a perturbation has topological degree -1", info={"top_shift": tau.top_shift}
        )
    d = model.differential
    total = d + tau
    mc = der_bracket(d, tau) + der_bracket(tau, tau) * Fraction(1, 2)
    failures = []
    agree = True
    for generator in model.generators:
        square = apply(total, total.value(generator))
        equation = mc.value(generator)
        if square != equation:
            agree = False
        if square or equation:
            failures.append(
                {
                    "generator": generator.name,
                    "square": str(square),
                    "maurer_cartan": str(equation),
                }
            )
    return CheckReport(
        "maurer-cartan",
        not failures,
        failures,
        details={"formulations_agree": agree},
    )


def ad(d, der):
    """
    ``D(der) = [d, der]``, the differential of the derivation algebra.
    """
    return der_bracket(d, der)
