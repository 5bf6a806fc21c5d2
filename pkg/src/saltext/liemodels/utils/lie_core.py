"""
Free bigraded Lie algebras over the rationals.

Lie elements are identified with their image in the tensor algebra under
``g -> g`` and ``[x, y] -> x*y - (-1)**(|x||y|) y*x``; the tensor coordinates
are the only thing equality looks at. Signs use the topological degree only,
resolution degree never contributes a sign.

Per-bidegree bases are cut out of the left-normed bracket words by exact
row reduction, so they are deterministic given the generator order
``(top_deg, res_deg, name)``.
"""

import dataclasses
import functools
import logging
from collections import defaultdict
from fractions import Fraction
from types import MappingProxyType
from typing import Tuple
from typing import Union

from saltext.liemodels.utils import linalg
from saltext.liemodels.utils.exceptions import CutoffExceeded
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import LieModelError
from saltext.liemodels.utils.exceptions import UndefinedOnZero

log = logging.getLogger(__name__)

DEFAULT_BOUND = 16


@dataclasses.dataclass(frozen=True)
class Generator:
    """
    A free generator with bidegree ``(top_deg, res_deg)``.

    The name doubles as the identifier; models reject duplicates.
    """

    name: str
    top_deg: int
    res_deg: int = 0

    def __post_init__(self):
        if self.top_deg < 1:
            raise DegreeMismatch(
                f"generator {self.name} has topological degree {self.top_deg}; "
                "simply connected models have no generators below degree 1",
                info={"generator": self.name, "top_deg": self.top_deg},
            )
        if self.res_deg < 0:
            raise DegreeMismatch(
                f"generator {self.name} has negative resolution degree",
                info={"generator": self.name, "res_deg": self.res_deg},
            )

    @property
    def bidegree(self):
        return (self.top_deg, self.res_deg)

    @property
    def sort_key(self):
        return (self.top_deg, self.res_deg, self.name)

    def __str__(self):
        return self.name


@dataclasses.dataclass(frozen=True)
class Bracket:
    left: "Monomial"
    right: "Monomial"

    def __str__(self):
        return f"[{self.left},{self.right}]"


Monomial = Union[Generator, Bracket]
Word = Tuple[Generator, ...]


def monomial_bidegree(monomial):
    if isinstance(monomial, Generator):
        return monomial.bidegree
    left = monomial_bidegree(monomial.left)
    right = monomial_bidegree(monomial.right)
    return (left[0] + right[0], left[1] + right[1])


def monomial_leaves(monomial):
    if isinstance(monomial, Generator):
        return (monomial,)
    return monomial_leaves(monomial.left) + monomial_leaves(monomial.right)


def left_normed(generators):
    """
    ``[[[g1, g2], g3], ...]`` for a non-empty sequence of generators.
    """
    return functools.reduce(Bracket, generators)


def word_top(word):
    return sum(letter.top_deg for letter in word)


def word_bidegree(word):
    return (sum(letter.top_deg for letter in word), sum(letter.res_deg for letter in word))


def _clean(coords):
    return {word: coeff for word, coeff in coords.items() if coeff}


class LieElement:
    """
    A finite rational combination of bracket monomials, held as tensor
    coordinates.
    """

    __slots__ = ("_coords", "_hash")

    def __init__(self, coords=None):
        self._coords = _clean({word: Fraction(coeff) for word, coeff in (coords or {}).items()})
        self._hash = None

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def of(cls, monomial):
        if isinstance(monomial, Generator):
            return cls({(monomial,): 1})
        return bracket(cls.of(monomial.left), cls.of(monomial.right))

    @classmethod
    def combination(cls, terms):
        """
        Sum of ``coefficient * monomial`` over ``(coefficient, monomial)`` pairs.
        """
        total = cls()
        for coefficient, monomial in terms:
            total = total + cls.of(monomial) * coefficient
        return total

    @property
    def coords(self):
        return MappingProxyType(self._coords)

    def __bool__(self):
        return bool(self._coords)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._coords
        if not isinstance(other, LieElement):
            return NotImplemented
        return self._coords == other._coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._coords.items()))
        return self._hash

    def __add__(self, other):
        coords = defaultdict(Fraction, self._coords)
        for word, coeff in other._coords.items():
            coords[word] += coeff
        return LieElement(coords)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LieElement({word: -coeff for word, coeff in self._coords.items()})

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        if not scalar:
            return LieElement()
        return LieElement({word: coeff * scalar for word, coeff in self._coords.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def bidegrees(self):
        return sorted({word_bidegree(word) for word in self._coords})

    def top_degrees(self):
        return sorted({word_top(word) for word in self._coords})

    def components(self):
        """
        Homogeneous pieces keyed by bidegree.
        """
        pieces = defaultdict(dict)
        for word, coeff in self._coords.items():
            pieces[word_bidegree(word)][word] = coeff
        return {bidegree: LieElement(coords) for bidegree, coords in sorted(pieces.items())}

    def component(self, bidegree):
        return LieElement(
            {word: coeff for word, coeff in self._coords.items() if word_bidegree(word) == bidegree}
        )

    def top_component(self, top_deg):
        return LieElement(
            {word: coeff for word, coeff in self._coords.items() if word_top(word) == top_deg}
        )

    def res_component(self, res_deg):
        return LieElement(
            {
                word: coeff
                for word, coeff in self._coords.items()
                if word_bidegree(word)[1] == res_deg
            }
        )

    def generators(self):
        return sorted({letter for word in self._coords for letter in word}, key=_sort_key)

    def is_generator_linear(self):
        """
        True when some tensor coordinate sits on a length-one word.
        """
        return any(len(word) == 1 for word in self._coords)

    @property
    def top_deg(self):
        degrees = self.top_degrees()
        if len(degrees) != 1:
            raise DegreeMismatch(
                "element is not homogeneous in topological degree",
                info={"degrees": degrees},
            )
        return degrees[0]

    @property
    def bidegree(self):
        degrees = self.bidegrees()
        if len(degrees) != 1:
            raise DegreeMismatch("element is not bihomogeneous", info={"bidegrees": degrees})
        return degrees[0]

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"<LieElement {self}>"


def _sort_key(generator):
    return generator.sort_key


def bracket(x, y):
    """
    Graded bracket ``[x, y]``.

    x, y
        Lie elements, homogeneous or finite sums of homogeneous pieces; the
        Koszul sign is taken word by word.
    """
    coords = defaultdict(Fraction)
    for u, cu in x.coords.items():
        du = word_top(u)
        for v, cv in y.coords.items():
            product = cu * cv
            coords[u + v] += product
            if (du * word_top(v)) % 2:
                coords[v + u] += product
            else:
                coords[v + u] -= product
    return LieElement(coords)


def koszul_sign(first, second):
    return -1 if (first * second) % 2 else 1


@dataclasses.dataclass(frozen=True)
class DegreeBasis:
    """
    Basis of one bidegree component of a free Lie algebra.

    monomials and elements are parallel; ``words`` fixes the column order of
    the tensor coordinate vectors.
    """

    bidegree: Tuple[int, int]
    generators: Tuple[Generator, ...]
    monomials: Tuple[Monomial, ...]
    elements: Tuple[LieElement, ...]
    words: Tuple[Word, ...]
    coordinatizer: linalg.Coordinatizer = dataclasses.field(compare=False, repr=False)

    def __len__(self):
        return len(self.elements)

    def vector(self, element):
        """
        Tensor coordinate vector of ``element`` against ``words``; ``None``
        when it uses a word outside them.
        """
        index = {word: j for j, word in enumerate(self.words)}
        vector = [linalg.ZERO] * len(self.words)
        for word, coeff in element.coords.items():
            if word not in index:
                return None
            vector[index[word]] = coeff
        return vector

    def coordinates(self, element):
        """
        Coordinates of a homogeneous element of this bidegree in the basis,
        or ``None`` when it does not lie in the span.
        """
        if not element:
            return [linalg.ZERO] * len(self.elements)
        vector = self.vector(element)
        if vector is None:
            return None
        return self.coordinatizer.coordinates(vector)

    def element(self, coordinates):
        total = LieElement()
        for coefficient, element in zip(coordinates, self.elements):
            if coefficient:
                total = total + element * coefficient
        return total


def _sequences(generators, top_deg, res_deg):
    """
    Generator sequences with the given total bidegree, length first, then
    lexicographic in generator order.
    """
    found = []

    def extend(prefix, top, res):
        if top == top_deg:
            if res == res_deg:
                found.append(tuple(prefix))
            return
        for generator in generators:
            if top + generator.top_deg > top_deg or res + generator.res_deg > res_deg:
                continue
            prefix.append(generator)
            extend(prefix, top + generator.top_deg, res + generator.res_deg)
            prefix.pop()

    extend([], 0, 0)
    found.sort(key=lambda seq: (len(seq), [g.sort_key for g in seq]))
    return found


def basis_at(generators, bidegree, bound=None):
    """
    Basis of the free Lie algebra on ``generators`` in ``bidegree``.

    generators
        Iterable of :py:class:`Generator`; order does not matter.

    bidegree
        ``(top_deg, res_deg)``.

    bound
        Largest topological degree enumeration is allowed to reach. Defaults
        to ``DEFAULT_BOUND``.
    """
    bound = DEFAULT_BOUND if bound is None else bound
    top_deg, res_deg = bidegree
    if top_deg > bound:
        raise CutoffExceeded(
            f"enumeration of degree {top_deg} exceeds the bound {bound}",
            info={"bidegree": list(bidegree), "bound": bound},
        )
    return _basis_at(tuple(sorted(set(generators), key=_sort_key)), (top_deg, res_deg))


@functools.lru_cache(maxsize=4096)
def _basis_at(generators, bidegree):
    top_deg, res_deg = bidegree
    if top_deg < 1 or res_deg < 0:
        return _empty_basis(generators, bidegree)
    monomials = [left_normed(seq) for seq in _sequences(generators, top_deg, res_deg)]
    candidates = [(monomial, LieElement.of(monomial)) for monomial in monomials]
    candidates = [(monomial, element) for monomial, element in candidates if element]
    if not candidates:
        return _empty_basis(generators, bidegree)
    words = sorted(
        {word for _, element in candidates for word in element.coords},
        key=lambda word: (len(word), [letter.sort_key for letter in word]),
    )
    index = {word: j for j, word in enumerate(words)}
    vectors = []
    for _, element in candidates:
        vector = [linalg.ZERO] * len(words)
        for word, coeff in element.coords.items():
            vector[index[word]] = coeff
        vectors.append(vector)
    chosen = linalg.independent_subset(vectors, len(words))
    log.debug(
        "basis at %s on %d generators has dimension %d", bidegree, len(generators), len(chosen)
    )
    return DegreeBasis(
        bidegree=bidegree,
        generators=generators,
        monomials=tuple(candidates[k][0] for k in chosen),
        elements=tuple(candidates[k][1] for k in chosen),
        words=tuple(words),
        coordinatizer=linalg.Coordinatizer([vectors[k] for k in chosen], len(words)),
    )


def _empty_basis(generators, bidegree):
    return DegreeBasis(
        bidegree=bidegree,
        generators=generators,
        monomials=(),
        elements=(),
        words=(),
        coordinatizer=linalg.Coordinatizer([], 0),
    )


def res_range(generators, top_deg):
    """
    Resolution degrees that can occur in topological degree ``top_deg``.
    """
    if not generators:
        return range(0)
    ratio = max(Fraction(g.res_deg, g.top_deg) for g in generators)
    return range(0, int(ratio * top_deg) + 1)


def express(element, bound=None):
    """
    Rewrite ``element`` on the ``basis_at`` basis of each of its bidegrees.

    Returns a list of ``(coefficient, monomial)`` pairs in basis order.
    """
    terms = []
    for bidegree, piece in element.components().items():
        basis = basis_at(piece.generators(), bidegree, bound=bound)
        coords = basis.coordinates(piece)
        if coords is None:
            raise LieModelError(
                "tensor coordinates do not come from a Lie element",
                info={"bidegree": list(bidegree)},
            )
        terms.extend(
            (coefficient, monomial)
            for coefficient, monomial in zip(coords, basis.monomials)
            if coefficient
        )
    return terms


def normalize(expr, bound=None):
    """
    Canonical form of a combination of bracket monomials.

    expr
        A :py:class:`LieElement` or an iterable of ``(coefficient, monomial)``.

    Returns the element together with its terms on the chosen bases.
    """
    element = expr if isinstance(expr, LieElement) else LieElement.combination(expr)
    return element, express(element, bound=bound)


def max_res_deg(element):
    """
    Largest resolution degree carrying a nonzero component of ``element``.
    """
    if not element:
        raise UndefinedOnZero("max_res_deg is undefined on the zero element")
    return max(res for _, res in element.bidegrees())


def format_scalar(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"({value.numerator}/{value.denominator})"


def format_terms(terms):
    if not terms:
        return "0"
    chunks = []
    for position, (coefficient, monomial) in enumerate(terms):
        sign = "-" if coefficient < 0 else "+"
        magnitude = abs(coefficient)
        body = str(monomial) if magnitude == 1 else f"{format_scalar(magnitude)}*{monomial}"
        if position == 0:
            chunks.append(body if sign == "+" else f"-{body}")
        else:
            chunks.append(f"{sign} {body}")
    return " ".join(chunks)


@functools.lru_cache(maxsize=8192)
def format_element(element):
    """
    Render an element on the chosen bases, in the input grammar.
    """
    return format_terms(express(element))


def free_dimensions(generators, top_deg, bound=None):
    """
    ``{res_deg: dimension}`` of the free Lie algebra in topological degree
    ``top_deg``, skipping empty components.
    """
    dims = {}
    for res_deg in res_range(generators, top_deg):
        size = len(basis_at(generators, (top_deg, res_deg), bound=bound))
        if size:
            dims[res_deg] = size
    return dims
