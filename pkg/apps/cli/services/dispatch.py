"""
Command handlers behind the ``geomodal`` management command.

Handlers validate their options, load documents, call one library
operation and turn its result into an Outcome. Exit codes: 0 verdict true
or success, 1 verdict false, 2 usage or validation error, 3 resource bound.
"""

import logging
import sys
import time
from pathlib import Path
from typing import IO, Any, Callable, Dict, Optional, Sequence, Tuple

from django.core.management import call_command
from django.core.management.base import CommandError

from apps.bisim.services.equivalence import behavioural_equiv, compare_equivalences
from apps.bisim.services.relations import greatest_lambda_bisim, is_lambda_bisim, search_am_transition
from apps.cli.services.acceptance import run_suite
from apps.cli.services.loaders import (
    load_derivation,
    load_frame,
    load_lifting_code,
    load_model,
    load_presentation,
    load_relation,
    load_space,
)
from apps.cli.services.reports import EXIT_BOUND, EXIT_INVALID, EXIT_TRUE, Outcome, build_report, render
from apps.coalgebra.services.duality import check_monotone_duality
from apps.coalgebra.services.functors import GeomModel, get_functor
from apps.coalgebra.services.kkplift import AGREEMENT_TARGETS, KKPFunctor, agreement_map, check_lift_theorems
from apps.coalgebra.services.liftings import (
    builtin_lifting,
    lifting_flags,
    lifting_from_code,
    liftings_for,
    sierpinski_code,
)
from apps.core.conf import enforce, limit
from apps.core.exceptions import GeomodalError, InvalidInputError, ResourceBoundError, UnknownIdentifierError
from apps.logic.services.proofsys import ConsequencePair, check_derivation, find_countermodel, soundness_sweep
from apps.logic.services.semantics import (
    equivalence_classes,
    modal_equiv,
    normal_form,
    theory_quotient,
    truth_set,
)
from apps.logic.services.syntax import Formula, parse, signature_of, to_text
from apps.topology.services.enumeration import discrete_spaces_up_to
from apps.topology.services.finspace import frame_points, sobrify
from apps.topology.services.framealg import (
    compare_presentations,
    present_M,
    present_Mprime,
    presentation_points,
    presented_frame_small,
)

logger = logging.getLogger(__name__)

Options = Dict[str, Any]
Handler = Callable[[Options, Optional[IO[str]]], Outcome]
HANDLERS: Dict[str, Handler] = {}

CONSEQUENCE_SEPARATOR = "|>"


def command_handler(name: str):
    def register(handler: Handler) -> Handler:
        HANDLERS[name] = handler
        return handler

    return register


# --- option helpers ---------------------------------------------------------------


def require_seed(options: Options, why: str) -> int:
    if options.get("seed") is None:
        raise InvalidInputError(f"--seed is required {why}", path="--seed")
    return options["seed"]


def max_points(options: Options) -> int:
    """``--max-points``, defaulting to and bounded by the MAX_POINTS setting."""
    value = options.get("max_points")
    if value is None:
        return limit("MAX_POINTS")
    if value < 0:
        raise InvalidInputError("--max-points must not be negative", path="--max-points")
    enforce("MAX_POINTS", value, "--max-points")
    return value


def formula_text(options: Options) -> str:
    inline = options.get("formula")
    path = options.get("formula_file")
    if inline is not None and path is not None:
        raise InvalidInputError(
            "Give the formula inline or with --formula-file, not both", path="--formula"
        )
    if path is not None:
        try:
            return Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError):
            raise InvalidInputError(f"Cannot read formula file {path}", path="--formula-file")
    if inline is None:
        raise InvalidInputError("A formula is required", path="--formula")
    return inline


def parse_option(text: str, signature, option: str) -> Formula:
    try:
        return parse(text, signature)
    except InvalidInputError as exc:
        exc.path = option
        raise


def select_liftings(model: GeomModel, selection: Optional[str]) -> Dict[str, Any]:
    """All liftings of the model's functor, or the comma list in ``selection``."""
    if not selection:
        return liftings_for(model.functor)
    selected = {}
    for name in (n.strip() for n in selection.split(",")):
        if name:
            try:
                selected[name] = builtin_lifting(model.functor, name)
            except UnknownIdentifierError as exc:
                exc.path = "--liftings"
                raise
    return selected


def point_option(model: GeomModel, name: str, option: str) -> int:
    if name not in model.space.index:
        raise UnknownIdentifierError(f"Unknown point: {name}", path=option, point=name)
    return model.space.index[name]


# --- handlers ---------------------------------------------------------------------


@command_handler("check")
def handle_check(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    text = formula_text(options)
    model = load_model(options["model"], stdin)
    liftings = select_liftings(model, options.get("liftings"))
    formula = parse_option(text, signature_of(liftings), "--formula")
    truth = truth_set(model, formula, liftings)
    result = {"formula": to_text(formula), "truth_set": model.space.names_of(truth)}
    if options.get("normal_form"):
        result["normal_form"] = to_text(normal_form(formula, liftings))
    if options.get("point") is None:
        return Outcome(None, result)
    index = point_option(model, options["point"], "--point")
    return Outcome(bool(truth >> index & 1), result)


@command_handler("equiv")
def handle_equiv(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    left = load_model(options["model"], stdin)
    right = load_model(options["other"]) if options.get("other") else None
    liftings = select_liftings(left, options.get("liftings"))
    x, y = options["x"], options["y"]
    point_option(left, x, "--x")
    point_option(right or left, y, "--y")
    if options.get("kind") == "behavioural":
        verdict = behavioural_equiv(left, x, right or left, y, liftings)
        return Outcome(verdict.equivalent is True, {"determinate": verdict.determinate, **verdict.as_dict()})
    equivalent = modal_equiv(left, x, y, other=right, liftings=liftings)
    result: Dict[str, Any] = {"equivalent": equivalent}
    if right is None:
        result["classes"] = equivalence_classes(left, liftings)
    return Outcome(equivalent, result)


@command_handler("bisim")
def handle_bisim(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    kind = options["kind"]
    seed = require_seed(options, "for --kind compare") if kind == "compare" else None
    left = load_model(options["left"], stdin)
    right = load_model(options["right"])
    liftings = select_liftings(left, options.get("liftings"))
    relation = load_relation(options["relation"], left, right) if options.get("relation") else None

    if kind == "compare":
        report = compare_equivalences(
            left, right, liftings, seed=seed, samples=options["samples"], max_nodes=options.get("max_nodes")
        )
        return Outcome(not report.violations, report.as_dict())
    if kind == "lambda":
        if relation is None:
            gfp = greatest_lambda_bisim(left, right, liftings)
            return Outcome(None, {"greatest": gfp.as_names(), "pairs": len(gfp)})
        check = is_lambda_bisim(relation, liftings)
        return Outcome(check.holds, {"relation": relation.as_names(), **check.as_dict()})

    if relation is None:
        relation = greatest_lambda_bisim(left, right, liftings)
    search = search_am_transition(relation, options.get("max_nodes"))
    if search.status == "bound":
        raise ResourceBoundError(
            "Aczel-Mendler search exhausted its node budget", limit="AM_SEARCH_NODES", nodes=search.nodes
        )
    return Outcome(search.found, {"relation": relation.as_names(), **search.as_dict(relation)})


@command_handler("lift")
def handle_lift(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    if options.get("code"):
        code = load_lifting_code(options["code"], stdin)
        lifting = lifting_from_code(code)
        round_trip = sierpinski_code(lifting).code == code.code
        return Outcome(
            round_trip,
            {"code": code.to_document(), "round_trip": round_trip, "flags": lifting_flags(lifting).as_dict()},
        )

    if not options.get("functor"):
        raise InvalidInputError("lift needs --functor or --code", path="--functor")
    functor = get_functor(options["functor"])
    if not isinstance(functor, KKPFunctor):
        raise InvalidInputError(f"{functor.name} is not a lifted functor", path="--functor")
    if options.get("space"):
        spaces = [load_space(options["space"], stdin)]
    else:
        spaces = [space for space in discrete_spaces_up_to(max_points(options)) if space.size]

    verdict = True
    entries = []
    for space in spaces:
        report = check_lift_theorems(functor, space)
        entry = {"space": space.to_document(), "checks": report.as_dict(), "confirmed": report.confirmed}
        verdict = verdict and report.confirmed
        if functor.base.name in AGREEMENT_TARGETS:
            agreement = agreement_map(functor, space)
            entry["agreement"] = agreement.as_dict()
            verdict = verdict and agreement.verdict is not False
        entries.append(entry)
    return Outcome(verdict, {"functor": functor.name, "spaces": entries})


PRESENTATIONS = {"M": present_M, "Mprime": present_Mprime}


@command_handler("present")
def handle_present(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    frame = load_frame(options["frame"], stdin)
    directed = options.get("directed", False)
    presentation = PRESENTATIONS[options["system"]](frame, directed)
    result: Dict[str, Any] = {
        "presentation": presentation.to_document(),
        "generators": len(presentation.generators),
        "relations": len(presentation.relations),
    }
    verdict = None
    if options.get("compare"):
        report = compare_presentations(present_M(frame, directed), present_Mprime(frame, directed))
        result["comparison"] = report.as_dict()
        verdict = report.isomorphic
    if options.get("presented_frame"):
        presented = presented_frame_small(presentation)
        result["presented_frame"] = {
            "elements": presented.frame.size,
            "labels": list(presented.frame.labels),
            "free_size": presented.free_size,
        }
    return Outcome(verdict, result)


@command_handler("points")
def handle_points(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    if options.get("presentation"):
        presentation = load_presentation(options["presentation"], stdin)
        points = presentation_points(presentation, options.get("max_generators"))
        generators = presentation.generators
        assignments = [
            [g for k, g in enumerate(generators) if mask >> k & 1] for mask in points.assignments
        ]
        return Outcome(
            None,
            {"space": points.space.to_document(), "points": points.space.size, "assignments": assignments},
        )
    if options.get("frame"):
        points = frame_points(load_frame(options["frame"], stdin), options.get("method") or "auto")
        return Outcome(None, {"space": points.space.to_document(), "points": points.space.size})
    if options.get("space"):
        sobrification = sobrify(load_space(options["space"], stdin))
        return Outcome(
            sobrification.is_sober,
            {
                "space": sobrification.space.to_document(),
                "points": sobrification.space.size,
                "sober": sobrification.is_sober,
                "t0": sobrification.is_t0,
                "unit": sobrification.unit.as_names(),
            },
        )
    raise InvalidInputError("points needs --presentation, --frame or --space", path="--presentation")


@command_handler("dualize")
def handle_dualize(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    report = check_monotone_duality(load_space(options["space"], stdin))
    return Outcome(report.holds, {"holds": report.holds, **report.as_dict()})


def consequence_pair(text: str) -> ConsequencePair:
    if text.count(CONSEQUENCE_SEPARATOR) != 1:
        raise InvalidInputError(f"A consequence pair is written 'lhs {CONSEQUENCE_SEPARATOR} rhs'", path="--pair")
    lhs, rhs = text.split(CONSEQUENCE_SEPARATOR)
    return ConsequencePair(parse_option(lhs, None, "--pair"), parse_option(rhs, None, "--pair"))


@command_handler("proofcheck")
def handle_proofcheck(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    if options.get("pair"):
        pair = consequence_pair(options["pair"])
        functor = options.get("functor") or "dkh"
        found = find_countermodel(pair, functor, max_points(options))
        result = {"pair": str(pair), "functor": functor, "countermodel": found.as_dict() if found else None}
        return Outcome(found is None, result)
    if not options.get("derivation"):
        raise InvalidInputError("proofcheck needs --derivation or --pair", path="--derivation")
    report = check_derivation(load_derivation(options["derivation"], stdin))
    return Outcome(report.valid, report.as_dict())


@command_handler("soundness")
def handle_soundness(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    samples = options.get("samples")
    seed = require_seed(options, "with --samples") if samples is not None else None
    report = soundness_sweep(
        options["system"], options["functor"], max_points(options), seed=seed, samples=samples
    )
    return Outcome(report.sound, report.as_dict())


@command_handler("quotient")
def handle_quotient(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    models = [load_model(path, stdin) for path in options["model"]]
    liftings = select_liftings(models[0], options.get("liftings"))
    quotient = theory_quotient(models, liftings)
    return Outcome(quotient.well_defined, quotient.as_dict())


@command_handler("accept")
def handle_accept(options: Options, stdin: Optional[IO[str]]) -> Outcome:
    seed = require_seed(options, "for the acceptance suite")
    report = run_suite(options.get("suite") or "all", max_points(options), seed)
    return Outcome(report["passed"], report)


# --- entry points -----------------------------------------------------------------


def execute(name: str, options: Options, stdin: Optional[IO[str]] = None) -> Tuple[int, Dict[str, Any]]:
    """
    Run one command and assemble its report.

    Returns:
        (exit code, report)
    """
    if name not in HANDLERS:
        raise UnknownIdentifierError(f"Unknown command: {name}", command=name)
    started = time.perf_counter()
    outcome: Optional[Outcome] = None
    error: Optional[Dict[str, Any]] = None
    try:
        outcome = HANDLERS[name](options, stdin)
    except ResourceBoundError as exc:
        logger.warning(f"{name}: {exc.message}")
        code, error = EXIT_BOUND, exc.as_dict()
    except GeomodalError as exc:
        logger.info(f"{name} rejected its input: {exc.message}")
        code, error = EXIT_INVALID, exc.as_dict()
    else:
        code = outcome.exit_code
    seconds = time.perf_counter() - started if options.get("timing") else None
    return code, build_report(name, options, outcome, error=error, seconds=seconds)


def run(argv: Sequence[str], stdout: Optional[IO[str]] = None, stdin: Optional[IO[str]] = None) -> int:
    """
    Run ``geomodal`` with ``argv`` and return the exit code.

    Usage errors are reported on ``stdout`` as an error body with exit 2.
    """
    stdout = stdout or sys.stdout
    try:
        call_command("geomodal", *argv, stdout=stdout, stdin=stdin)
    except SystemExit as exc:
        return int(exc.code or 0)
    except CommandError as exc:
        stdout.write(render({"error": {"type": "usage", "message": str(exc)}}))
        return EXIT_INVALID
    return EXIT_TRUE
