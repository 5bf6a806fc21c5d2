"""
Module for building and comparing Lie models of rational homotopy types

:depends: sympy, pyparsing

:configuration: The module reads an optional configuration profile from the
    minion config, minion pillar, or master config. The 'liemodels' key is
    used by default, if defined.

    For example:

    .. code-block:: yaml

        liemodels:
            cutoff: 8
            enumeration_bound: 16
            format: structured

Every function takes ``source``: a path on the minion, a ``salt://`` URL or
the document text itself.
"""

import logging
import os

import salt.utils.files
from salt.exceptions import CommandExecutionError

try:
    import pyparsing  # pylint: disable=unused-import
    import sympy  # pylint: disable=unused-import

    from saltext.liemodels.utils import commands
    from saltext.liemodels.utils.parser import parse as parse_document
    from saltext.liemodels.utils.report import emit

    HAS_LIBS = True
except ImportError:
    HAS_LIBS = False

log = logging.getLogger(__name__)

__virtualname__ = "liemodels"


def __virtual__():
    """
    Only load if sympy and pyparsing are installed
    """
    if HAS_LIBS:
        return __virtualname__
    return (
        False,
        f'The "{__virtualname__}" module could not be loaded: '
        '"sympy" or "pyparsing" is not installed.',
    )


def _profile(profile):
    if isinstance(profile, str):
        profile = __salt__["config.option"](profile)
    return profile or {}


def _read_source(source):
    if source.startswith("salt://"):
        cached = __salt__["cp.cache_file"](source)
        if not cached:
            raise CommandExecutionError(f"unable to cache {source}")
        source = cached
    if "\n" not in source and os.path.isfile(source):
        with salt.utils.files.fopen(source, "r", encoding="utf-8") as handle:
            return handle.read()
    return source


def _names(names):
    if isinstance(names, str):
        return names.split()
    return names


def _run(command, source, profile, cutoff=None, **options):
    """
    Parse the documents and dispatch ``command``. The cutoff is the explicit
    argument, else the document's ``cutoff`` line, else the profile, else 8.
    """
    profile = _profile(profile)
    fallback = cutoff if cutoff is not None else profile.get("cutoff")
    text = _read_source(source)
    document = parse_document(text, default_cutoff=fallback)
    if cutoff is None and document.cutoff is None:
        cutoff = profile.get("cutoff")
    for key in ("target", "perturbations"):
        if options.get(key) is not None:
            options[key] = parse_document(_read_source(options[key]), default_cutoff=fallback)
    if "names" in options:
        options["names"] = _names(options["names"])
    report = commands.run(
        command,
        document,
        cutoff=cutoff,
        bound=int(profile.get("enumeration_bound", 16)),
        **options,
    )
    if profile.get("format", "structured") == "text":
        return emit(report, "text")
    return report.to_dict()


def cellular(source, cutoff=None, profile="liemodels"):
    """
    Build the cellular model of a CW complex.

    source
        CW document (``cell NAME dim N attach EXPR`` lines).

    cutoff
        Top degree kept. Defaults to the profile, the document, then 8.

    profile
        Configuration profile or dictionary. Default is 'liemodels'.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.cellular /srv/liemodels/cp2.cw cutoff=6
    """
    return _run("cellular", source, profile, cutoff)


def bigraded(source, cutoff=None, names=None, seed=None, emit_model=False, profile="liemodels"):
    """
    Build the bigraded model of a graded Lie algebra presentation.

    source
        Presentation document (``gen``/``bracket`` lines).

    names
        Names for the created generators, in creation order or as
        ``name@top,res``.

    seed
        Randomize the choice of killed representatives.

    emit_model
        Report the model as a document that can be read back.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.bigraded salt://liemodels/cp2.gla cutoff=6
    """
    return _run(
        "bigraded", source, profile, cutoff, names=names, seed=seed, emit_model=emit_model
    )


def homology(source, cutoff=None, include_cutoff=False, profile="liemodels"):
    """
    Homology of a CW complex, presentation or model document.

    include_cutoff
        Also list the cutoff degree, flagged partial.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.homology /srv/liemodels/s2.cw
    """
    return _run("homology", source, profile, cutoff, include_cutoff=include_cutoff)


def check(
    source, what="square-zero", tau=None, theta=None, cutoff=None, names=None, profile="liemodels"
):
    """
    Run a structural check.

    what
        One of ``minimal``, ``square-zero``, ``zero-region``, ``theta`` or
        ``maurer-cartan``.

    tau, theta
        Perturbation label of the document, or inline ``g -> expr; ...``.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.check /srv/liemodels/cp2.bgm what=maurer-cartan tau='c -> -x'
    """
    return _run("check", source, profile, cutoff, what=what, tau=tau, theta=theta, names=names)


def perturb_toward(source, target, cutoff=None, names=None, profile="liemodels"):
    """
    Perturb a bigraded model until it maps quasi-isomorphically onto
    ``target``.

    target
        CW complex or model document with the same homotopy Lie algebra.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.perturb_toward /srv/liemodels/cp2.gla /srv/liemodels/cp2.cw cutoff=6
    """
    return _run("perturb-toward", source, profile, cutoff, target=target, names=names)


def gauge_apply(source, tau=None, theta=None, cutoff=None, names=None, profile="liemodels"):
    """
    Apply ``exp(ad_theta)`` to a perturbed differential.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.gauge_apply /srv/liemodels/cp2.bgm tau='c -> -x' theta='c -> [b,[a,a]]'
    """
    return _run("gauge-apply", source, profile, cutoff, tau=tau, theta=theta, names=names)


def equivalent(source, tau=None, tau2=None, cutoff=None, names=None, profile="liemodels"):
    """
    Decide whether two perturbations are gauge equivalent.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.equivalent /srv/liemodels/cp2.bgm tau=zero tau2='c -> -x'
    """
    return _run("equivalent", source, profile, cutoff, tau=tau, tau2=tau2, names=names)


def mc_system(source, perturbations=None, cutoff=None, names=None, profile="liemodels"):
    """
    Emit the Maurer-Cartan equations of a bigraded model.

    perturbations
        Perturbation-set document whose entries are checked against the
        system.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.mc_system /srv/liemodels/ab_quartic.gla cutoff=6 names='w@5,2 z@5,2'
    """
    return _run(
        "mc-system", source, profile, cutoff, perturbations=perturbations, names=names
    )


def apply_aut(source, sigma=None, tau=None, cutoff=None, names=None, profile="liemodels"):
    """
    Carry a perturbation along an automorphism of the homotopy Lie algebra.

    sigma
        Inline ``name -> vector; ...`` on basis names of the presentation.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.apply_aut /srv/liemodels/cp2.bgm sigma='x -> -x' tau='c -> x'
    """
    return _run("apply-aut", source, profile, cutoff, sigma=sigma, tau=tau, names=names)


def parse(source, profile="liemodels"):
    """
    Echo a document in normalized form.

    CLI Example:

    .. code-block:: bash

        salt '*' liemodels.parse 'gen a deg 1'
    """
    return _run("parse", source, profile)
