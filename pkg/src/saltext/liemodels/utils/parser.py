"""
Reader for the line-oriented input documents.

One directive per line, ``#`` starts a comment::

    cutoff 6
    gen a deg 1
    bracket [a,a] = aa
    cell b dim 4 attach (1/2)*[a,a]
    diff c = [b,a]
    perturbation p1
    tau c -> -x
    theta y -> 2*[a,b]
    sigma x -> -x

Expressions are parsed into a small tree first and resolved against the
generators or basis names of the document once all of them are known.
"""

import dataclasses
import logging
from fractions import Fraction
from typing import Dict
from typing import List
from typing import Tuple

import pyparsing as pp

from saltext.liemodels.utils.dgla import Derivation
from saltext.liemodels.utils.dgla import TruncatedModel
from saltext.liemodels.utils.exceptions import InputError
from saltext.liemodels.utils.exceptions import LieModelError
from saltext.liemodels.utils.lie_core import Generator
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import bracket
from saltext.liemodels.utils.lie_core import format_element
from saltext.liemodels.utils.lie_core import format_scalar
from saltext.liemodels.utils.models import Cell
from saltext.liemodels.utils.models import CWDescription
from saltext.liemodels.utils.presentation import GLAPresentation
from saltext.liemodels.utils.presentation import add

log = logging.getLogger(__name__)

KINDS = ("presentation", "cw-complex", "model", "perturbation-set", "automorphism", "gauge")


@dataclasses.dataclass(frozen=True)
class Name:
    name: str
    column: int = dataclasses.field(default=0, compare=False)

    def __str__(self):
        return self.name


@dataclasses.dataclass(frozen=True)
class BracketNode:
    left: "Sum"
    right: "Sum"

    def __str__(self):
        return f"[{self.left},{self.right}]"


@dataclasses.dataclass(frozen=True)
class Term:
    coefficient: Fraction
    node: object = None


@dataclasses.dataclass(frozen=True)
class Sum:
    terms: Tuple[Term, ...] = ()

    def __str__(self):
        chunks = []
        for term in self.terms:
            if term.node is None or not term.coefficient:
                continue
            node = f"({term.node})" if isinstance(term.node, Sum) else str(term.node)
            magnitude = abs(term.coefficient)
            body = node if magnitude == 1 else f"{format_scalar(magnitude)}*{node}"
            if not chunks:
                chunks.append(f"-{body}" if term.coefficient < 0 else body)
            else:
                chunks.append(f"{'-' if term.coefficient < 0 else '+'} {body}")
        return " ".join(chunks) or "0"

    def names(self):
        for term in self.terms:
            if isinstance(term.node, Name):
                yield term.node
            elif isinstance(term.node, BracketNode):
                yield from term.node.left.names()
                yield from term.node.right.names()
            elif isinstance(term.node, Sum):
                yield from term.node.names()


@dataclasses.dataclass(frozen=True)
class Directive:
    keyword: str
    args: tuple
    line: int


def _fraction(s, loc, toks):
    if toks[1] == 0:
        raise pp.ParseFatalException(s, loc, "zero denominator")
    return Fraction(toks[0], toks[1])


def _sum(toks):
    terms = []
    sign = 1
    for token in toks:
        if token == "-":
            sign = -1
        elif token == "+":
            sign = 1
        else:
            terms.append(Term(token.coefficient * sign, token.node))
            sign = 1
    return Sum(tuple(terms))


def _grammar():
    integer = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))
    name = pp.Word(pp.alphas + "_", pp.alphanums + "_").set_parse_action(
        lambda s, loc, t: Name(t[0], pp.col(loc, s))
    )
    lbr, rbr, comma, lpar, rpar, star, slash = map(pp.Suppress, "[],()*/")
    expr = pp.Forward()
    ratio = (lpar + integer + slash + integer + rpar).set_parse_action(_fraction)
    whole = pp.Word(pp.nums).set_parse_action(lambda t: Fraction(int(t[0])))
    coefficient = ratio | whole
    bracket_node = (lbr + expr + comma + expr + rbr).set_parse_action(
        lambda t: BracketNode(t[0], t[1])
    )

    def node():
        return name | bracket_node | (lpar + expr + rpar)

    scaled = (coefficient + star + node()).set_parse_action(lambda t: Term(t[0], t[1]))
    plain = node().set_parse_action(lambda t: Term(Fraction(1), t[0]))
    zero = pp.Regex(r"0(?![0-9])").set_parse_action(lambda: Term(Fraction(0)))
    term = scaled | plain | zero
    sign = pp.Literal("+") | pp.Literal("-")
    expr <<= (pp.Opt(pp.Literal("-")) + term + pp.ZeroOrMore(sign + term)).set_parse_action(
        _sum
    )

    arrow, equals = pp.Suppress("->"), pp.Suppress("=")
    keyword = pp.Keyword
    directive = (
        keyword("cutoff") + integer
        | keyword("gen")
        + name
        + pp.Suppress(keyword("deg"))
        + integer
        + pp.Opt(pp.Suppress(keyword("res")) + integer)
        | keyword("bracket") + lbr + name + comma + name + rbr + equals + expr
        | keyword("cell") + name + pp.Suppress(keyword("dim")) + integer
        + pp.Opt(pp.Suppress(keyword("attach")) + expr)
        | keyword("diff") + name + equals + expr
        | keyword("perturbation") + name
        | (keyword("tau") | keyword("theta") | keyword("sigma")) + name + arrow + expr
    )
    assignment = pp.Opt(
        pp.Suppress(keyword("tau") | keyword("theta") | keyword("sigma"))
    ) + name + arrow + expr
    return expr, directive, assignment


EXPRESSION, DIRECTIVE, ASSIGNMENT = _grammar()


def _syntax_error(exc, line, offset=0):
    return InputError(exc.msg, line=line, column=exc.col + offset, kind="syntax-error")


def parse_expression(text, line=1):
    try:
        return EXPRESSION.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as exc:
        raise _syntax_error(exc, line) from None


def parse_directives(text):
    directives = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        try:
            tokens = DIRECTIVE.parse_string(body, parse_all=True)
        except pp.ParseBaseException as exc:
            raise _syntax_error(exc, number) from None
        directives.append(Directive(tokens[0], tuple(tokens[1:]), number))
    return directives


def parse_assignments(text):
    """
    Inline ``name -> expr`` statements separated by ``;``; ``zero`` or an
    empty string stands for the zero map.
    """
    if text is None or text.strip() in ("", "zero", "0"):
        return []
    assignments = []
    offset = 0
    for chunk in text.split(";"):
        if chunk.strip():
            try:
                tokens = ASSIGNMENT.parse_string(chunk, parse_all=True)
            except pp.ParseBaseException as exc:
                raise _syntax_error(exc, 1, offset) from None
            assignments.append((tokens[0], tokens[1], 1))
        offset += len(chunk) + 1
    return assignments


def _unknown(name, line):
    return InputError(f"unknown name {name}", line=line, column=name.column, kind="unknown-name")


def to_element(expr, generators, line=None):
    """
    Resolve ``expr`` against ``{name: Generator}``.
    """
    total = LieElement()
    for term in expr.terms:
        if term.node is None:
            continue
        if isinstance(term.node, Name):
            if term.node.name not in generators:
                raise _unknown(term.node, line)
            value = LieElement.of(generators[term.node.name])
        elif isinstance(term.node, BracketNode):
            value = bracket(
                to_element(term.node.left, generators, line),
                to_element(term.node.right, generators, line),
            )
        else:
            value = to_element(term.node, generators, line)
        total = total + value * term.coefficient
    return total


def to_vector(expr, degrees, line=None, presentation=None):
    """
    Resolve ``expr`` into ``{basis name: Fraction}``; brackets need a
    ``presentation`` to be evaluated in.
    """
    total = {}
    for term in expr.terms:
        if term.node is None:
            continue
        if isinstance(term.node, Name):
            if term.node.name not in degrees:
                raise _unknown(term.node, line)
            value = {term.node.name: Fraction(1)}
        elif isinstance(term.node, BracketNode):
            if presentation is None:
                raise InputError(
                    "brackets are not allowed on the right of a structure constant",
                    line=line,
                    column=next(term.node.left.names(), Name("", 0)).column,
                    kind="syntax-error",
                )
            value = presentation.bracket(
                to_vector(term.node.left, degrees, line, presentation),
                to_vector(term.node.right, degrees, line, presentation),
            )
        else:
            value = to_vector(term.node, degrees, line, presentation)
        total = add(total, value, term.coefficient)
    return total


def _engine_error(exc, line=None):
    return InputError(str(exc), line=line, column=1 if line else None, kind=exc.kind)


def _degree_error(message, line):
    return InputError(message, line=line, column=1, kind="degree-mismatch")


def _duplicate(name, line):
    return InputError(
        f"{name} is declared twice", line=line, column=name.column, kind="syntax-error"
    )


@dataclasses.dataclass
class InputDocument:
    """
    A parsed document.

    body
        :py:class:`GLAPresentation`, :py:class:`CWDescription` or
        :py:class:`TruncatedModel` depending on ``kind``; ``None`` for
        documents holding only maps.

    perturbations, theta, sigma
        Unresolved ``(Name, Sum, line)`` assignments; resolve them against a
        model with :py:func:`resolve_derivation` or :py:func:`resolve_sigma`.
    """

    kind: str
    body: object = None
    cutoff: int = None
    perturbations: Dict[str, List[tuple]] = dataclasses.field(default_factory=dict)
    theta: List[tuple] = dataclasses.field(default_factory=list)
    sigma: List[tuple] = dataclasses.field(default_factory=list)

    def to_text(self):
        """
        Normalized rendering in the input grammar.
        """
        lines = []
        if self.kind == "presentation":
            lines.extend(self.body.to_text().splitlines())
        else:
            if self.cutoff is not None:
                lines.append(f"cutoff {self.cutoff}")
            if self.kind == "cw-complex":
                for cell in self.body.cells:
                    attach = f" attach {format_element(cell.attaching)}" if cell.attaching else ""
                    lines.append(f"cell {cell.name} dim {cell.dim}{attach}")
            elif self.kind == "model":
                for g in self.body.generators:
                    lines.append(f"gen {g.name} deg {g.top_deg} res {g.res_deg}")
                for g in self.body.generators:
                    value = self.body.differential.value(g)
                    if value:
                        lines.append(f"diff {g.name} = {format_element(value)}")
        labels = list(self.perturbations)
        for label in labels:
            if labels != ["tau"]:
                lines.append(f"perturbation {label}")
            lines.extend(f"tau {n} -> {e}" for n, e, _ in self.perturbations[label])
        lines.extend(f"theta {n} -> {e}" for n, e, _ in self.theta)
        lines.extend(f"sigma {n} -> {e}" for n, e, _ in self.sigma)
        return "\n".join(lines) + "\n"


def infer_kind(directives):
    keywords = {d.keyword for d in directives}
    if "cell" in keywords:
        return "cw-complex"
    if "diff" in keywords or any(d.keyword == "gen" and len(d.args) == 3 for d in directives):
        return "model"
    if keywords & {"bracket", "gen"}:
        return "presentation"
    if keywords & {"tau", "perturbation"}:
        return "perturbation-set"
    if "sigma" in keywords:
        return "automorphism"
    if "theta" in keywords:
        return "gauge"
    return "cw-complex"


def _check_mixture(kind, directives):
    allowed = {
        "cw-complex": {"cell"},
        "model": {"gen", "diff"},
        "presentation": {"gen", "bracket"},
    }.get(kind, set())
    structural = {"cell", "gen", "diff", "bracket"}
    for directive in directives:
        if directive.keyword in structural and directive.keyword not in allowed:
            raise InputError(
                f"'{directive.keyword}' does not belong in a {kind} document",
                line=directive.line,
                column=1,
                kind="syntax-error",
            )


def parse(text, default_cutoff=None):
    """
    Parse ``text`` into an :py:class:`InputDocument`.

    default_cutoff
        Cutoff for model documents that do not declare one.
    """
    directives = parse_directives(text)
    kind = infer_kind(directives)
    _check_mixture(kind, directives)
    cutoff = None
    perturbations, theta, sigma = {}, [], []
    label = "tau"
    for directive in directives:
        if directive.keyword == "cutoff":
            cutoff = directive.args[0]
        elif directive.keyword == "perturbation":
            label = directive.args[0].name
            perturbations.setdefault(label, [])
        elif directive.keyword == "tau":
            perturbations.setdefault(label, []).append((*directive.args, directive.line))
        elif directive.keyword == "theta":
            theta.append((*directive.args, directive.line))
        elif directive.keyword == "sigma":
            sigma.append((*directive.args, directive.line))
    if kind == "presentation":
        body = _build_presentation(directives, cutoff)
    elif kind == "cw-complex":
        body = _build_cw(directives)
    elif kind == "model":
        body = _build_model(directives, cutoff if cutoff is not None else default_cutoff)
    else:
        body = None
    log.debug("parsed %s document with %d directives", kind, len(directives))
    return InputDocument(kind, body, cutoff, perturbations, theta, sigma)


def _build_presentation(directives, cutoff):
    degrees = {}
    for directive in directives:
        if directive.keyword == "gen":
            name = directive.args[0]
            if name.name in degrees:
                raise _duplicate(name, directive.line)
            degrees[name.name] = directive.args[1]
    basis = list(degrees.items())
    brackets = {}
    for directive in directives:
        if directive.keyword != "bracket":
            continue
        x, y, expr = directive.args
        for name in (x, y):
            if name.name not in degrees:
                raise _unknown(name, directive.line)
        brackets[(x.name, y.name)] = to_vector(expr, degrees, directive.line)
    try:
        return GLAPresentation(tuple(basis), brackets, cutoff=cutoff)
    except LieModelError as exc:
        raise _engine_error(exc) from exc


def _build_cw(directives):
    cells, generators = [], {}
    for directive in directives:
        if directive.keyword != "cell":
            continue
        name, dim, *rest = directive.args
        if name.name in generators:
            raise _duplicate(name, directive.line)
        if dim < 2:
            raise _degree_error(f"cell {name} has dimension {dim}", directive.line)
        attaching = to_element(rest[0], generators, directive.line) if rest else LieElement()
        if attaching and attaching.top_degrees() != [dim - 2]:
            raise _degree_error(
                f"attaching map of {name} must have degree {dim - 2}", directive.line
            )
        cell = Cell(name.name, dim, attaching)
        generators[name.name] = cell.generator
        cells.append(cell)
    return CWDescription(tuple(cells))


def _build_model(directives, cutoff):
    generators = {}
    for directive in directives:
        if directive.keyword == "gen":
            name, top, *res = directive.args
            if name.name in generators:
                raise _duplicate(name, directive.line)
            try:
                generators[name.name] = Generator(name.name, top, res[0] if res else 0)
            except LieModelError as exc:
                raise _engine_error(exc, directive.line) from exc
    values = {}
    for directive in directives:
        if directive.keyword != "diff":
            continue
        name, expr = directive.args
        if name.name not in generators:
            raise _unknown(name, directive.line)
        generator = generators[name.name]
        value = to_element(expr, generators, directive.line)
        if value and value.top_degrees() != [generator.top_deg - 1]:
            raise _degree_error(
                f"diff {generator} must have degree {generator.top_deg - 1}", directive.line
            )
        values[generator] = value
    if cutoff is None:
        cutoff = max((g.top_deg for g in generators.values()), default=1)
    try:
        return TruncatedModel(
            tuple(generators.values()),
            Derivation.on(generators.values(), values, -1),
            cutoff,
            metadata={"family": "parsed"},
        )
    except LieModelError as exc:
        raise _engine_error(exc) from exc


def resolve_derivation(assignments, model, top_shift):
    """
    ``{Generator: LieElement}`` from parsed assignments against ``model``.
    """
    by_name = {g.name: g for g in model.generators}
    values = {}
    for name, expr, line in assignments:
        if name.name not in by_name:
            raise _unknown(name, line)
        generator = by_name[name.name]
        value = to_element(expr, by_name, line)
        if value and value.top_degrees() != [generator.top_deg + top_shift]:
            raise _degree_error(
                f"value on {generator} must have degree {generator.top_deg + top_shift}", line
            )
        values[generator] = values.get(generator, LieElement()) + value
    return values


def resolve_sigma(assignments, presentation):
    """
    ``{basis name: vector}`` from parsed assignments against ``presentation``.
    """
    degrees = presentation.degrees
    sigma = {}
    for name, expr, line in assignments:
        if name.name not in degrees:
            raise _unknown(name, line)
        sigma[name.name] = to_vector(expr, degrees, line, presentation)
    return sigma
