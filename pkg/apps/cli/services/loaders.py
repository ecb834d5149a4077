"""
Loaders for the geomodal document files.

Documents are UTF-8 JSON. ``-`` reads standard input, which lets a report
produced by one command feed the next one.
"""

import json
import logging
import sys
from pathlib import Path
from typing import IO, Any, List, Optional

from apps.bisim.services.relations import Relation
from apps.cli.serializers import (
    BisimRelationSerializer,
    DerivationSerializer,
    FrameSerializer,
    GeomModelSerializer,
    LiftingCodeSerializer,
    PresentationSerializer,
    SpaceSerializer,
    build,
)
from apps.coalgebra.services.functors import GeomModel
from apps.coalgebra.services.liftings import SierpinskiCode
from apps.core.exceptions import InvalidInputError
from apps.logic.services.proofsys import RuleInstance
from apps.topology.services.finspace import FinFrame, FinSpace
from apps.topology.services.framealg import Presentation

logger = logging.getLogger(__name__)


def read_document(path: str, stdin: Optional[IO[str]] = None) -> Any:
    """
    Read and decode one JSON document.

    Raises:
        InvalidInputError: If the file is missing, not UTF-8 or not JSON
    """
    try:
        if path == "-":
            text = (stdin or sys.stdin).read()
        else:
            text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InvalidInputError(f"No such file: {path}", path=path)
    except UnicodeDecodeError as exc:
        raise InvalidInputError(f"File is not UTF-8: {path}", path=path, offset=exc.start)
    except OSError as exc:
        raise InvalidInputError(f"Cannot read {path}: {exc.strerror}", path=path)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"Parse error in {path}: {exc.msg}", path=path, line=exc.lineno, column=exc.colno
        )
    logger.debug(f"Read document from {path}")
    return document


def _unwrap(document: Any, key: str) -> Any:
    """Accept either a bare document or a command report carrying it under ``result.<key>``."""
    if isinstance(document, dict) and isinstance(document.get("result"), dict):
        if key in document["result"]:
            return document["result"][key]
    return document


def load_space(path: str, stdin: Optional[IO[str]] = None) -> FinSpace:
    return build(SpaceSerializer, _unwrap(read_document(path, stdin), "space"))


def load_model(path: str, stdin: Optional[IO[str]] = None) -> GeomModel:
    """
    Load a model document.

    Raises:
        InvalidInputError: Naming the path of the first violated invariant,
            e.g. ``valuation.p`` for a non-open valuation
        UnknownIdentifierError: For an unknown functor
    """
    return build(GeomModelSerializer, _unwrap(read_document(path, stdin), "model"))


def load_presentation(path: str, stdin: Optional[IO[str]] = None) -> Presentation:
    return build(PresentationSerializer, _unwrap(read_document(path, stdin), "presentation"))


def load_frame(path: str, stdin: Optional[IO[str]] = None) -> FinFrame:
    return build(FrameSerializer, read_document(path, stdin))


def load_derivation(path: str, stdin: Optional[IO[str]] = None) -> List[RuleInstance]:
    return build(DerivationSerializer, read_document(path, stdin))


def load_lifting_code(path: str, stdin: Optional[IO[str]] = None) -> SierpinskiCode:
    return build(LiftingCodeSerializer, read_document(path, stdin))


def load_relation(path: str, left: GeomModel, right: GeomModel) -> Relation:
    return build(
        BisimRelationSerializer, read_document(path), context={"left": left, "right": right}
    )
