"""
Finite graded Lie algebras given by structure constants.

Elements are sparse vectors ``{basis name: Fraction}``. Brackets that are not
listed are zero; listed brackets determine their mirror images through graded
antisymmetry.
"""

import dataclasses
import itertools
import logging
import math
from collections import defaultdict
from fractions import Fraction
from typing import Dict
from typing import Optional
from typing import Tuple

from saltext.liemodels.utils import linalg
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import InvalidStructureConstants
from saltext.liemodels.utils.exceptions import NotAnAutomorphism
from saltext.liemodels.utils.exceptions import PresentationInvalid
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import express
from saltext.liemodels.utils.lie_core import format_scalar
from saltext.liemodels.utils.lie_core import koszul_sign

log = logging.getLogger(__name__)


def clean(vector):
    return {name: Fraction(coeff) for name, coeff in vector.items() if coeff}


def add(first, second, scale=1):
    total = defaultdict(Fraction, first)
    for name, coeff in second.items():
        total[name] += coeff * scale
    return clean(total)


def format_vector(vector, order=None):
    names = order or sorted(vector)
    chunks = []
    for name in names:
        coeff = vector.get(name)
        if not coeff:
            continue
        sign = "-" if coeff < 0 else "+"
        body = name if abs(coeff) == 1 else f"{format_scalar(abs(coeff))}*{name}"
        if not chunks:
            chunks.append(body if sign == "+" else f"-{body}")
        else:
            chunks.append(f"{sign} {body}")
    return " ".join(chunks) or "0"


@dataclasses.dataclass(frozen=True)
class GLAPresentation:
    """
    A graded Lie algebra with a homogeneous basis.

    basis
        Pairs ``(name, top_deg)`` in display order.

    brackets
        ``{(name, name): vector}`` for the listed brackets.

    cutoff
        Degree up to which the data is meant to be complete; ``None`` means
        the algebra vanishes above its top basis degree.
    """

    basis: Tuple[Tuple[str, int], ...]
    brackets: Dict[Tuple[str, str], Dict[str, Fraction]] = dataclasses.field(
        default_factory=dict, hash=False
    )
    cutoff: Optional[int] = None

    def __post_init__(self):
        names = [name for name, _ in self.basis]
        if len(set(names)) != len(names):
            raise PresentationInvalid("duplicate basis names", info={"basis": names})
        for name, top in self.basis:
            if top < 1:
                raise DegreeMismatch(
                    f"basis element {name} has degree {top}",
                    info={"name": name, "top_deg": top},
                )
        object.__setattr__(self, "brackets", self._complete(self.brackets))
        self.validate()

    def __hash__(self):
        return hash((self.basis, self.cutoff, frozenset(
            (pair, frozenset(vector.items())) for pair, vector in self.brackets.items()
        )))

    @property
    def degrees(self):
        return dict(self.basis)

    @property
    def names(self):
        return [name for name, _ in self.basis]

    @property
    def top_degree(self):
        return max((top for _, top in self.basis), default=0)

    def known_to(self):
        return math.inf if self.cutoff is None else self.cutoff

    def names_in_degree(self, top_deg):
        return [name for name, top in self.basis if top == top_deg]

    def _complete(self, listed):
        degrees = dict(self.basis)
        complete = {}
        for (x, y), vector in listed.items():
            for name in (x, y, *vector):
                if name not in degrees:
                    raise PresentationInvalid(
                        f"unknown basis element {name}", info={"name": name}
                    )
            vector = clean(vector)
            for name in vector:
                if degrees[name] != degrees[x] + degrees[y]:
                    raise DegreeMismatch(
                        f"[{x},{y}] has degree {degrees[x] + degrees[y]} but lists {name} "
                        f"of degree {degrees[name]}",
                        info={"pair": [x, y], "name": name},
                    )
            sign = -koszul_sign(degrees[x], degrees[y])
            mirror = {name: coeff * sign for name, coeff in vector.items()}
            if (y, x) in complete and complete[(y, x)] != mirror:
                raise InvalidStructureConstants(
                    f"[{x},{y}] and [{y},{x}] violate graded antisymmetry",
                    info={"pair": [x, y]},
                )
            if x == y and vector and vector != mirror:
                raise InvalidStructureConstants(
                    f"[{x},{x}] must vanish for even degree", info={"pair": [x, x]}
                )
            complete[(x, y)] = vector
            complete[(y, x)] = mirror
        return {pair: vector for pair, vector in complete.items() if vector}

    def basis_bracket(self, x, y):
        return self.brackets.get((x, y), {})

    def bracket(self, first, second):
        total = defaultdict(Fraction)
        for x, cx in first.items():
            for y, cy in second.items():
                for name, coeff in self.basis_bracket(x, y).items():
                    total[name] += cx * cy * coeff
        return clean(total)

    def degree_of(self, vector):
        degrees = {self.degrees[name] for name in vector}
        if len(degrees) > 1:
            raise DegreeMismatch("vector is not homogeneous", info={"vector": vector})
        return degrees.pop() if degrees else None

    def validate(self):
        """
        Check the graded Jacobi identity on every triple of basis elements
        whose degree stays within the data.
        """
        degrees = self.degrees
        limit = self.known_to()
        unit = {name: {name: Fraction(1)} for name in degrees}
        for x, y, z in itertools.product(self.names, repeat=3):
            if degrees[x] + degrees[y] + degrees[z] > limit:
                continue
            # [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
            lhs = self.bracket(unit[x], self.bracket(unit[y], unit[z]))
            rhs = add(
                self.bracket(self.bracket(unit[x], unit[y]), unit[z]),
                self.bracket(unit[y], self.bracket(unit[x], unit[z])),
                koszul_sign(degrees[x], degrees[y]),
            )
            if lhs != rhs:
                raise InvalidStructureConstants(
                    f"graded Jacobi fails on ({x}, {y}, {z})",
                    info={"triple": [x, y, z]},
                )

    def vector(self, vector):
        """
        Dense coordinates of a homogeneous sparse vector in its degree.
        """
        top = self.degree_of(vector)
        if top is None:
            return top, []
        return top, [vector.get(name, linalg.ZERO) for name in self.names_in_degree(top)]

    def decomposables(self, top_deg):
        """
        Dense spanning vectors of ``[P,P]`` in ``top_deg``.
        """
        names = self.names_in_degree(top_deg)
        spanning = []
        for (x, y), vector in self.brackets.items():
            if self.degrees[x] + self.degrees[y] == top_deg:
                spanning.append([vector.get(name, linalg.ZERO) for name in names])
        return spanning

    def indecomposables(self):
        """
        Basis elements spanning a complement of ``[P,P]``, pivot-greedy in
        basis order.
        """
        chosen = []
        for top_deg in sorted({top for _, top in self.basis}):
            names = self.names_in_degree(top_deg)
            units = [linalg.unit(len(names), k) for k in range(len(names))]
            keep = linalg.extend_independent(self.decomposables(top_deg), units, len(names))
            chosen.extend(names[k] for k in keep)
        return chosen

    def evaluate(self, element, rho):
        """
        Image of a free Lie element under the Lie map sending each generator
        ``g`` to ``rho[g]``; generators missing from ``rho`` map to zero.
        """
        total = {}
        for coefficient, monomial in express(element):
            total = add(total, self.evaluate_monomial(monomial, rho), coefficient)
        return total

    def evaluate_monomial(self, monomial, rho):
        if isinstance(monomial, Generator):
            return dict(rho.get(monomial, {}))
        left = self.evaluate_monomial(monomial.left, rho)
        if not left:
            return {}
        return self.bracket(left, self.evaluate_monomial(monomial.right, rho))

    def check_automorphism(self, sigma):
        """
        Raise unless ``sigma`` (``{basis name: vector}``, identity where
        silent) is a degree-preserving Lie automorphism.
        """
        full = self.complete_map(sigma)
        for name, image in full.items():
            if image and self.degree_of(image) != self.degrees[name]:
                raise NotAnAutomorphism(
                    f"{name} is not sent to its own degree", info={"name": name}
                )
        for x, y in itertools.product(self.names, repeat=2):
            if self.degrees[x] + self.degrees[y] > self.known_to():
                continue
            lhs = self.apply_linear(full, self.basis_bracket(x, y))
            rhs = self.bracket(full[x], full[y])
            if lhs != rhs:
                raise NotAnAutomorphism(
                    f"map does not preserve [{x},{y}]", info={"pair": [x, y]}
                )
        for top_deg in sorted({top for _, top in self.basis}):
            names = self.names_in_degree(top_deg)
            rows = [[full[name].get(other, linalg.ZERO) for other in names] for name in names]
            if linalg.rank(rows, len(names)) != len(names):
                raise NotAnAutomorphism(
                    f"map is not invertible in degree {top_deg}", info={"top_deg": top_deg}
                )
        return full

    def complete_map(self, sigma):
        full = {name: {name: Fraction(1)} for name in self.names}
        for name, image in sigma.items():
            if name not in full:
                raise NotAnAutomorphism(f"unknown basis element {name}", info={"name": name})
            full[name] = clean(image)
        return full

    def apply_linear(self, full, vector):
        total = {}
        for name, coeff in vector.items():
            total = add(total, full[name], coeff)
        return total

    def invert_map(self, full):
        inverse = {}
        for top_deg in sorted({top for _, top in self.basis}):
            names = self.names_in_degree(top_deg)
            images = [[full[name].get(other, linalg.ZERO) for other in names] for name in names]
            for k, name in enumerate(names):
                coords = linalg.solve_combination(images, linalg.unit(len(names), k), len(names))
                if coords is None:
                    raise NotAnAutomorphism(
                        f"map is not invertible in degree {top_deg}", info={"top_deg": top_deg}
                    )
                inverse[name] = clean(dict(zip(names, coords)))
        return inverse

    def to_text(self):
        lines = []
        if self.cutoff is not None:
            lines.append(f"cutoff {self.cutoff}")
        lines.extend(f"gen {name} deg {top}" for name, top in self.basis)
        order = {name: k for k, name in enumerate(self.names)}
        for (x, y), vector in sorted(
            self.brackets.items(), key=lambda item: (order[item[0][0]], order[item[0][1]])
        ):
            if order[x] <= order[y]:
                lines.append(f"bracket [{x},{y}] = {format_vector(vector, self.names)}")
        return "\n".join(lines) + "\n"
