"""
Document loaders, report rendering, command dispatch and the acceptance suite.
"""

from apps.cli.services.acceptance import ITEMS, ItemResult, run_suite, select_items
from apps.cli.services.dispatch import HANDLERS, execute, run
from apps.cli.services.loaders import (
    load_derivation,
    load_frame,
    load_lifting_code,
    load_model,
    load_presentation,
    load_relation,
    load_space,
    read_document,
)
from apps.cli.services.reports import Outcome, build_report, render

__all__ = [
    "HANDLERS",
    "ITEMS",
    "ItemResult",
    "Outcome",
    "build_report",
    "execute",
    "load_derivation",
    "load_frame",
    "load_lifting_code",
    "load_model",
    "load_presentation",
    "load_relation",
    "load_space",
    "read_document",
    "render",
    "run",
    "run_suite",
    "select_items",
]
