"""Django management command: the geomodal command-line front end."""

import sys

from django.core.management.base import BaseCommand

from apps.cli.services.dispatch import execute
from apps.cli.services.reports import render


def _common(parser):
    parser.add_argument(
        "--output",
        choices=["json", "text"],
        default="json",
        help="Report format (default: json)",
    )
    parser.add_argument(
        "--timing",
        action="store_true",
        help="Add wall-clock timing to the report",
    )
    parser.add_argument("--seed", type=int, help="Seed for randomized commands")
    parser.add_argument("--max-points", type=int, help="Largest enumerated space (default: GEOMODAL_MAX_POINTS)")
    return parser


def _formula(parser):
    parser.add_argument("--formula", type=str, help="Formula text, e.g. '<box>(p:p)'")
    parser.add_argument("--formula-file", type=str, help="File holding the formula text")


class Command(BaseCommand):
    """Check, compare and construct finite geometric modal structures."""

    help = "Model checking, bisimulation and duality checks on finite spaces"
    stealth_options = ("stdin",)

    def add_arguments(self, parser):
        """Add one subcommand per operation."""
        commands = parser.add_subparsers(dest="command", required=True)

        check = _common(commands.add_parser("check", help="Truth set of a formula"))
        check.add_argument("--model", required=True, help="Model document ('-' for stdin)")
        _formula(check)
        check.add_argument("--point", type=str, help="Decide the formula at this point")
        check.add_argument("--liftings", type=str, help="Comma list of lifting ids (default: all)")
        check.add_argument("--normal-form", action="store_true", help="Also print the normal form")

        equiv = _common(commands.add_parser("equiv", help="Modal or behavioural equivalence of two points"))
        equiv.add_argument("--model", required=True)
        equiv.add_argument("--other", type=str, help="Model of the second point (default: --model)")
        equiv.add_argument("--x", required=True)
        equiv.add_argument("--y", required=True)
        equiv.add_argument("--kind", choices=["modal", "behavioural"], default="modal")
        equiv.add_argument("--liftings", type=str)

        bisim = _common(commands.add_parser("bisim", help="Bisimulations between two models"))
        bisim.add_argument("--left", required=True)
        bisim.add_argument("--right", required=True)
        bisim.add_argument("--kind", choices=["lambda", "am", "compare"], default="lambda")
        bisim.add_argument("--liftings", type=str)
        bisim.add_argument("--relation", type=str, help="Relation document {'pairs': [[x, y], ...]}")
        bisim.add_argument("--samples", type=int, default=4, help="Random subrelations for --kind compare")
        bisim.add_argument("--max-nodes", type=int, help="Aczel-Mendler search budget")

        lift = _common(commands.add_parser("lift", help="Lifted functors and Sierpinski codes"))
        lift.add_argument("--functor", type=str, help="e.g. kkp:powerset:box,dia")
        lift.add_argument("--space", type=str, help="Space document (default: discrete spaces)")
        lift.add_argument("--code", type=str, help="Lifting code document")

        present = _common(commands.add_parser("present", help="Presentation M or M' of a frame"))
        present.add_argument("--frame", required=True)
        present.add_argument("--system", choices=["M", "Mprime"], default="M")
        present.add_argument("--directed", action="store_true", help="Add directed-join relations")
        present.add_argument("--compare", action="store_true", help="Compare the point spaces of M and M'")
        present.add_argument("--presented-frame", action="store_true", help="Build the presented frame")

        points = _common(commands.add_parser("points", help="Point space of a presentation, frame or space"))
        source = points.add_mutually_exclusive_group(required=True)
        source.add_argument("--presentation", type=str, help="Presentation or present report ('-' for stdin)")
        source.add_argument("--frame", type=str)
        source.add_argument("--space", type=str, help="Sobrify a space")
        points.add_argument("--method", choices=["auto", "brute", "prime"], default="auto")
        points.add_argument("--max-generators", type=int)

        dualize = _common(commands.add_parser("dualize", help="Monotone duality check on a space"))
        dualize.add_argument("--space", required=True)

        proofcheck = _common(commands.add_parser("proofcheck", help="Check a derivation or search a countermodel"))
        proofcheck.add_argument("--derivation", type=str)
        proofcheck.add_argument("--pair", type=str, help="Consequence pair 'lhs |> rhs'")
        proofcheck.add_argument("--functor", type=str, help="Functor for the countermodel search")

        soundness = _common(commands.add_parser("soundness", help="Soundness sweep of an axiom system"))
        soundness.add_argument("--system", required=True)
        soundness.add_argument("--functor", required=True)
        soundness.add_argument("--samples", type=int, help="Check a seeded sample of coalgebras")

        quotient = _common(commands.add_parser("quotient", help="Theory quotient of a model family"))
        quotient.add_argument("--model", action="append", required=True)
        quotient.add_argument("--liftings", type=str)

        accept = _common(commands.add_parser("accept", help="Run the acceptance suite"))
        accept.add_argument("--suite", default="all", help="'all' or a comma list of item ids or names")

    def handle(self, *args, **options):
        """Handle the command."""
        code, report = execute(options["command"], options, options.get("stdin"))
        self.stdout.write(render(report, options["output"]), ending="")
        if code:
            sys.exit(code)
