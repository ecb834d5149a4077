"""
Serializers for the geomodal input documents.

Each serializer checks the document shape with DRF fields and its
``create`` builds the validated domain object. Domain invariants are
enforced by the library constructors; their errors are re-raised with the
path of the offending node inside the document.
"""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, Tuple

import networkx as nx
from rest_framework import serializers

from apps.bisim.services.relations import Relation as BisimRelation
from apps.coalgebra.services.functors import GeomModel, get_functor, make_model
from apps.coalgebra.services.liftings import SierpinskiCode, code_from_elements
from apps.core.exceptions import InvalidInputError
from apps.logic.services.proofsys import ConsequencePair, RuleInstance
from apps.logic.services.syntax import parse
from apps.topology.services.finspace import FinFrame, FinSpace, frame_from_order, space_from_opens
from apps.topology.services.framealg import Presentation, Relation, term_from_document


@contextmanager
def nested(prefix: str) -> Iterator[None]:
    """Prefix the path of InvalidInputErrors raised inside the block."""
    try:
        yield
    except InvalidInputError as exc:
        exc.path = f"{prefix}.{exc.path}" if exc.path else prefix
        raise


def first_error(errors: Any, path: str = "") -> Tuple[str, str]:
    """Path and message of the first error in a DRF ``errors`` structure."""
    if isinstance(errors, dict):
        for key, value in errors.items():
            if key == "non_field_errors":
                child = path
            elif isinstance(key, int):
                child = f"{path}[{key}]"
            else:
                child = f"{path}.{key}" if path else str(key)
            found = first_error(value, child)
            if found[1]:
                return found
        return path, ""
    if isinstance(errors, list):
        for k, value in enumerate(errors):
            if isinstance(value, str):
                return path, str(value)
            found = first_error(value, f"{path}[{k}]")
            if found[1]:
                return found
        return path, ""
    return path, str(errors)


def build(serializer_class, document: Any, prefix: str = "", **kwargs):
    """
    Validate ``document`` and return the domain object its serializer creates.

    Raises:
        InvalidInputError: Naming the path of the first rejected node
    """
    serializer = serializer_class(data=document, **kwargs)
    if not serializer.is_valid():
        path, message = first_error(serializer.errors)
        if prefix:
            path = f"{prefix}.{path}" if path else prefix
        raise InvalidInputError(message or "Invalid document", path=path or None)
    if prefix:
        with nested(prefix):
            return serializer.save()
    return serializer.save()


def _mask(space: FinSpace, names, path: str) -> int:
    mask = 0
    for k, name in enumerate(names):
        if name not in space.index:
            raise InvalidInputError(f"Unknown point: {name}", path=f"{path}[{k}]")
        mask |= 1 << space.index[name]
    return mask


class SpaceSerializer(serializers.Serializer):
    """``{"points": [...], "opens": [[...], ...]}``"""

    points = serializers.ListField(child=serializers.CharField(), allow_empty=True)
    opens = serializers.ListField(child=serializers.ListField(child=serializers.CharField()))

    def create(self, validated_data) -> FinSpace:
        points = validated_data["points"]
        index = {name: k for k, name in enumerate(points)}
        masks = []
        for k, names in enumerate(validated_data["opens"]):
            mask = 0
            for j, name in enumerate(names):
                if name not in index:
                    raise InvalidInputError(f"Unknown point: {name}", path=f"opens[{k}][{j}]")
                mask |= 1 << index[name]
            masks.append(mask)
        with nested("opens"):
            return space_from_opens(points, masks)


class GeomModelSerializer(serializers.Serializer):
    """``{"space": ..., "functor": ..., "gamma": {...}, "valuation": {...}}``"""

    space = serializers.JSONField()
    functor = serializers.CharField()
    gamma = serializers.DictField(child=serializers.JSONField())
    valuation = serializers.DictField(
        child=serializers.ListField(child=serializers.CharField()), required=False, default=dict
    )

    def create(self, validated_data) -> GeomModel:
        space = build(SpaceSerializer, validated_data["space"], "space")
        with nested("functor"):
            functor = get_functor(validated_data["functor"])
        gamma_document: Dict[str, Any] = validated_data["gamma"]
        for name in gamma_document:
            if name not in space.index:
                raise InvalidInputError(f"Transition given for unknown point {name}", path=f"gamma.{name}")
        gamma = []
        for name in space.points:
            if name not in gamma_document:
                raise InvalidInputError(f"Missing transition for {name}", path=f"gamma.{name}")
            gamma.append(functor.decode(space, gamma_document[name], f"gamma.{name}"))
        valuation = {
            letter: _mask(space, names, f"valuation.{letter}")
            for letter, names in validated_data["valuation"].items()
        }
        return make_model(space, functor, gamma, valuation)


class RelationSerializer(serializers.Serializer):
    lhs = serializers.JSONField()
    rel = serializers.ChoiceField(choices=["leq", "eq"])
    rhs = serializers.JSONField()


class PresentationSerializer(serializers.Serializer):
    """``{"generators": [...], "relations": [{"lhs": term, "rel": ..., "rhs": term}]}``"""

    generators = serializers.ListField(child=serializers.CharField())
    relations = RelationSerializer(many=True)
    name = serializers.CharField(required=False, default="", allow_blank=True)

    def create(self, validated_data) -> Presentation:
        relations = []
        for k, relation in enumerate(validated_data["relations"]):
            lhs = term_from_document(relation["lhs"], f"relations[{k}].lhs")
            rhs = term_from_document(relation["rhs"], f"relations[{k}].rhs")
            relations.append(Relation(lhs, relation["rel"], rhs))
        return Presentation(tuple(validated_data["generators"]), tuple(relations), validated_data["name"])


class FrameSerializer(serializers.Serializer):
    """
    ``{"elements": [...], "leq": [[a, b], ...]}``

    The order is the reflexive-transitive closure of the listed pairs.
    """

    elements = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    leq = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), min_length=2, max_length=2),
        required=False,
        default=list,
    )

    def validate_elements(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError("Frame elements must be distinct")
        return value

    def create(self, validated_data) -> FinFrame:
        elements = validated_data["elements"]
        index = {name: k for k, name in enumerate(elements)}
        order = nx.DiGraph()
        order.add_nodes_from(range(len(elements)))
        for k, (lower, upper) in enumerate(validated_data["leq"]):
            for j, name in enumerate((lower, upper)):
                if name not in index:
                    raise InvalidInputError(f"Unknown frame element: {name}", path=f"leq[{k}][{j}]")
            order.add_edge(index[lower], index[upper])
        closure = nx.transitive_closure(order, reflexive=True)
        return frame_from_order(list(range(len(elements))), closure.has_edge, labels=elements)


class ConclusionSerializer(serializers.Serializer):
    lhs = serializers.CharField()
    rhs = serializers.CharField()


class DerivationNodeSerializer(serializers.Serializer):
    """One derivation node; formulas are given as text."""

    id = serializers.IntegerField()
    rule = serializers.CharField()
    premises = serializers.ListField(child=serializers.IntegerField(), required=False, default=list)
    conclusion = ConclusionSerializer()
    subst = serializers.DictField(child=serializers.JSONField(), required=False, default=dict)

    def create(self, validated_data) -> RuleInstance:
        conclusion = validated_data["conclusion"]
        with nested("conclusion.lhs"):
            lhs = parse(conclusion["lhs"])
        with nested("conclusion.rhs"):
            rhs = parse(conclusion["rhs"])
        subst = {}
        for name, value in validated_data["subst"].items():
            with nested(f"subst.{name}"):
                if isinstance(value, list):
                    subst[name] = tuple(parse(text) for text in value)
                elif isinstance(value, str):
                    subst[name] = parse(value)
                else:
                    raise InvalidInputError("Substitution values are formula text or lists of it")
        return RuleInstance(
            validated_data["id"],
            validated_data["rule"],
            tuple(validated_data["premises"]),
            ConsequencePair(lhs, rhs),
            subst,
        )


class DerivationSerializer(serializers.ListSerializer):
    child = DerivationNodeSerializer()

    def create(self, validated_data):
        nodes = []
        for k, node in enumerate(validated_data):
            with nested(f"[{k}]"):
                nodes.append(self.child.create(node))
        return nodes


class LiftingCodeSerializer(serializers.Serializer):
    """``{"functor": ..., "arity": n, "code": [elements]}``"""

    functor = serializers.CharField()
    arity = serializers.IntegerField(min_value=0, max_value=2)
    code = serializers.ListField(child=serializers.JSONField())
    base = serializers.ChoiceField(choices=["sierpinski", "two"], required=False, default="sierpinski")

    def create(self, validated_data) -> SierpinskiCode:
        with nested("functor"):
            functor = get_functor(validated_data["functor"])
        return code_from_elements(
            functor, validated_data["arity"], validated_data["code"], validated_data["base"]
        )


class BisimRelationSerializer(serializers.Serializer):
    """``{"pairs": [[left point, right point], ...]}``"""

    pairs = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), min_length=2, max_length=2)
    )

    def create(self, validated_data) -> BisimRelation:
        left: Optional[GeomModel] = self.context.get("left")
        right: Optional[GeomModel] = self.context.get("right")
        return BisimRelation.from_names(left, right, validated_data["pairs"])
