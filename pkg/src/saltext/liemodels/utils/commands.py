"""
Command implementations shared by the console script and the execution
module. Every command takes a parsed document and keyword options and returns
a :py:class:`~saltext.liemodels.utils.report.Report`.
"""

import logging

from saltext.liemodels.utils.dgla import Derivation
from saltext.liemodels.utils.dgla import check_maurer_cartan
from saltext.liemodels.utils.dgla import check_square_zero
from saltext.liemodels.utils.exceptions import DegreeMismatch
from saltext.liemodels.utils.exceptions import InputError
from saltext.liemodels.utils.homology import homology_table
from saltext.liemodels.utils.lie_core import DEFAULT_BOUND
from saltext.liemodels.utils.models import BigradedModel
from saltext.liemodels.utils.models import build_bigraded
from saltext.liemodels.utils.models import build_cellular
from saltext.liemodels.utils.models import check_minimal
from saltext.liemodels.utils.models import check_zero_region
from saltext.liemodels.utils.parser import InputDocument
from saltext.liemodels.utils.parser import parse_assignments
from saltext.liemodels.utils.parser import resolve_derivation
from saltext.liemodels.utils.parser import resolve_sigma
from saltext.liemodels.utils.perturbation import apply_automorphism
from saltext.liemodels.utils.perturbation import decide_equivalence
from saltext.liemodels.utils.perturbation import gauge_apply
from saltext.liemodels.utils.perturbation import gauge_element
from saltext.liemodels.utils.perturbation import mc_system
from saltext.liemodels.utils.perturbation import perturb_toward
from saltext.liemodels.utils.perturbation import perturbation
from saltext.liemodels.utils.perturbation import theta_membership
from saltext.liemodels.utils.perturbation import triple_identification
from saltext.liemodels.utils.report import Report
from saltext.liemodels.utils.report import generator_grid
from saltext.liemodels.utils.report import homology_grid

log = logging.getLogger(__name__)

DEFAULT_CUTOFF = 8
CHECKS = ("minimal", "square-zero", "zero-region", "theta", "maurer-cartan")


def resolve_cutoff(document, cutoff=None):
    if cutoff is not None:
        return int(cutoff)
    if document.cutoff is not None:
        return document.cutoff
    return DEFAULT_CUTOFF


def _wrong_kind(command, document, wanted):
    return InputError(
        f"{command} needs a {' or '.join(wanted)} document, got {document.kind}",
        kind="syntax-error",
    )


def bigraded_of(document, cutoff=None, bound=DEFAULT_BOUND, names=None, seed=None, command=""):
    """
    The bigraded model a document stands for: built from a presentation or
    adopted from a written model.
    """
    if document.kind == "presentation":
        return build_bigraded(
            document.body, resolve_cutoff(document, cutoff), names=names, bound=bound, seed=seed
        )
    if document.kind == "model":
        return BigradedModel.from_model(document.body)
    raise _wrong_kind(command, document, ("presentation", "model"))


def model_of(document, cutoff=None, bound=DEFAULT_BOUND, names=None, command=""):
    if document.kind == "cw-complex":
        return build_cellular(document.body, resolve_cutoff(document, cutoff), bound)
    if document.kind == "presentation":
        return bigraded_of(document, cutoff, bound, names).model
    if document.kind == "model":
        return document.body
    raise _wrong_kind(command, document, ("cw-complex", "presentation", "model"))


def _assignments(document, selector, label="tau"):
    """
    Assignments named by ``selector``: a perturbation label of ``document``,
    inline text, or ``None`` for the document's own lines.
    """
    if selector is None:
        if label == "theta":
            return document.theta
        if label == "sigma":
            return document.sigma
        if not document.perturbations:
            return []
        return document.perturbations.get("tau") or next(iter(document.perturbations.values()))
    if selector in document.perturbations:
        return document.perturbations[selector]
    return parse_assignments(selector)


def _show(der):
    return {g.name: str(value) for g, value in der.values.items() if value}


def _map_lines(prefix, der):
    return [f"{prefix} {name} -> {value}" for name, value in _show(der).items()]


def cellular(document, cutoff=None, bound=DEFAULT_BOUND, **_):
    if document.kind != "cw-complex":
        raise _wrong_kind("cellular", document, ("cw-complex",))
    model = build_cellular(document.body, resolve_cutoff(document, cutoff), bound)
    return Report(
        "cellular",
        tables=[generator_grid(model, "cellular model")],
        data={
            "cutoff": model.cutoff,
            "generators": [{"name": g.name, "top_deg": g.top_deg} for g in model.generators],
            "differential": _show(model.differential),
        },
        lines=[f"d{name} = {value}" for name, value in _show(model.differential).items()],
    )


def bigraded(
    document, cutoff=None, bound=DEFAULT_BOUND, names=None, seed=None, emit_model=False, **_
):
    built = bigraded_of(document, cutoff, bound, names, seed, "bigraded")
    if emit_model:
        text = InputDocument("model", built.model, built.cutoff).to_text()
        return Report("bigraded", data=built.to_dict(), lines=text.splitlines())
    return Report(
        "bigraded",
        tables=[generator_grid(built.model, "bigraded model")],
        data=built.to_dict(),
        lines=[f"d{name} = {value}" for name, value in _show(built.differential).items()],
    )


def homology(document, cutoff=None, bound=DEFAULT_BOUND, include_cutoff=False, **_):
    model = model_of(document, cutoff, bound, command="homology")
    table = homology_table(model, include_cutoff=include_cutoff)
    lines = [
        f"H_{degree}: dim {entry.dim}"
        + (f": {'; '.join(str(r) for r in entry.representatives)}" if entry.dim else "")
        + (" (partial)" if entry.partial else "")
        for degree, entry in sorted(table.degrees.items())
    ]
    return Report(
        "homology", tables=[homology_grid(table)], data=table.to_dict(), lines=lines
    )


def check(
    document,
    what="square-zero",
    cutoff=None,
    bound=DEFAULT_BOUND,
    tau=None,
    theta=None,
    names=None,
    **_,
):
    if what not in CHECKS:
        raise InputError(f"unknown check {what}", kind="syntax-error")
    model = model_of(document, cutoff, bound, names, command="check")
    if what == "minimal":
        passed = check_minimal(model)
        return Report("check", passed, data={"name": "minimal", "passed": passed})
    if what == "square-zero":
        result = check_square_zero(model)
    elif what == "zero-region":
        result = check_zero_region(model)
    elif what == "theta":
        if theta is not None or document.theta:
            values = resolve_derivation(_assignments(document, theta, "theta"), model, 0)
            degree = 0
        else:
            values = resolve_derivation(_assignments(document, tau), model, -1)
            degree = -1
        try:
            passed = theta_membership(Derivation.on(model.generators, values, degree), degree)
        except DegreeMismatch:
            # a value raising resolution degree
            passed = False
        return Report(
            "check", passed, data={"name": "theta", "degree": degree, "passed": passed}
        )
    else:
        values = resolve_derivation(_assignments(document, tau), model, -1)
        result = check_maurer_cartan(model, Derivation.on(model.generators, values, -1))
    lines = [f"{failure}" for failure in result.failures]
    return Report("check", result.passed, data=result.to_dict(), lines=lines)


def perturb_toward_command(
    document, target=None, cutoff=None, bound=DEFAULT_BOUND, names=None, **_
):
    if target is None:
        raise InputError("perturb-toward needs a target document", kind="syntax-error")
    source = bigraded_of(document, cutoff, bound, names, command="perturb-toward")
    goal = model_of(target, source.cutoff, bound, command="perturb-toward")
    result = perturb_toward(source, goal)
    triple = triple_identification(source, result.tau)
    data = result.to_dict()
    data["identification"] = triple.to_dict()["degrees"]
    return Report(
        "perturb-toward",
        True,
        tables=[generator_grid(source.model, "source model")],
        data=data,
        lines=_map_lines("tau", result.tau)
        + [f"pi {g.name} -> {v}" for g, v in result.pi.values.items() if v],
    )


def gauge_apply_command(
    document, tau=None, theta=None, cutoff=None, bound=DEFAULT_BOUND, names=None, **_
):
    model = bigraded_of(document, cutoff, bound, names, command="gauge-apply")
    tau_der = perturbation(model, resolve_derivation(_assignments(document, tau), model, -1))
    theta_der = gauge_element(
        model, resolve_derivation(_assignments(document, theta, "theta"), model, 0)
    )
    result = gauge_apply(model, theta_der, tau_der)
    return Report(
        "gauge-apply",
        True,
        data={"tau": _show(tau_der), "theta": _show(theta_der), "result": _show(result)},
        lines=_map_lines("tau", result),
    )


def equivalent(
    document, tau=None, tau2=None, cutoff=None, bound=DEFAULT_BOUND, names=None, **_
):
    model = bigraded_of(document, cutoff, bound, names, command="equivalent")
    first = perturbation(model, resolve_derivation(_assignments(document, tau), model, -1))
    second = perturbation(model, resolve_derivation(_assignments(document, tau2), model, -1))
    decision = decide_equivalence(
        triple_identification(model, first), triple_identification(model, second)
    )
    if decision.equivalent:
        lines = ["equivalent"] + _map_lines("theta", decision.theta)
    else:
        obstruction = decision.obstruction
        lines = [
            "inequivalent",
            f"obstruction at {obstruction.generator}: {obstruction.residual}",
            f"class in P: {obstruction.to_dict()['class']}",
        ]
    return Report("equivalent", decision.equivalent, data=decision.to_dict(), lines=lines)


def mc_system_command(
    document, perturbations=None, cutoff=None, bound=DEFAULT_BOUND, names=None, **_
):
    model = bigraded_of(document, cutoff, bound, names, command="mc-system")
    system = mc_system(model)
    data = system.to_dict()
    candidates = dict(document.perturbations)
    if perturbations is not None:
        candidates.update(perturbations.perturbations)
    verified = {}
    for label, assignments in candidates.items():
        values = resolve_derivation(assignments, model.model, -1)
        tau = perturbation(model, values, check=False)
        verified[label] = system.verify(system.point_of(tau))
    data["verified"] = verified
    lines = [
        f"{len(system.unknowns)} unknowns, {len(system.equations)} equations",
    ]
    lines.extend(
        f"solution: tau {u.generator.name} -> {u.element}"
        for u in system.single_target_solutions()
    )
    trivial = {}
    for name, targets in data["trivial_directions"].items():
        for target in targets:
            trivial.setdefault(target, []).append(name)
    lines.extend(f"trivial: {target} on {', '.join(names)}" for target, names in trivial.items())
    lines.extend(f"{label}: {'solves' if ok else 'fails'}" for label, ok in verified.items())
    verdict = all(verified.values()) if verified else None
    return Report("mc-system", verdict, data=data, lines=lines)


def apply_aut(
    document, sigma=None, tau=None, cutoff=None, bound=DEFAULT_BOUND, names=None, **_
):
    model = bigraded_of(document, cutoff, bound, names, command="apply-aut")
    automorphism = resolve_sigma(_assignments(document, sigma, "sigma"), model.presentation)
    tau_der = perturbation(model, resolve_derivation(_assignments(document, tau), model, -1))
    result = apply_automorphism(model, automorphism, tau_der)
    return Report(
        "apply-aut",
        True,
        data={"sigma": automorphism, "tau": _show(tau_der), "result": _show(result)},
        lines=_map_lines("tau", result),
    )


def parse_command(document, **_):
    text = document.to_text()
    return Report("parse", data={"kind": document.kind, "text": text}, lines=text.splitlines())


COMMANDS = {
    "cellular": cellular,
    "bigraded": bigraded,
    "homology": homology,
    "check": check,
    "perturb-toward": perturb_toward_command,
    "gauge-apply": gauge_apply_command,
    "equivalent": equivalent,
    "mc-system": mc_system_command,
    "apply-aut": apply_aut,
    "parse": parse_command,
}


def run(command, document, **options):
    """
    Dispatch ``command`` on ``document``.
    """
    try:
        handler = COMMANDS[command]
    except KeyError:
        raise InputError(f"unknown command {command}", kind="syntax-error") from None
    log.debug("running %s on a %s document", command, document.kind)
    return handler(document, **options)
