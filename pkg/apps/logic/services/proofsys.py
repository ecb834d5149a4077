"""
Consequence pairs, rule schemata and derivation checking.

A rule schema is a list of premise templates and a conclusion template over
metavariables. Scalar metavariables stand for single formulas; family
metavariables stand for finite lists of formulas and may appear in a
family disjunction ``⋁{body | x ∈ A}`` or in a premise template repeated
once per member. Derivations are checked syntactically; soundness is
checked semantically by instantiating metavariables with opens of finite
coalgebras.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from apps.coalgebra.services.functors import GeomModel, TopFunctor, get_functor, make_model
from apps.coalgebra.services.liftings import liftings_for
from apps.core.conf import enforce
from apps.core.exceptions import InvalidInputError, UnknownIdentifierError
from apps.logic.services.semantics import Liftings, modal_step, truth_set
from apps.logic.services.syntax import (
    BOT,
    TOP,
    And,
    Formula,
    Modal,
    Or,
    Prop,
    Top,
    letters_of,
    same_formula,
    to_text,
)
from apps.topology.services.enumeration import spaces_up_to
from apps.topology.services.finspace import FinSpace, Mask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConsequencePair:
    """``lhs ◁ rhs``."""

    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{to_text(self.lhs)} |> {to_text(self.rhs)}"

    def matches(self, other: "ConsequencePair") -> bool:
        return same_formula(self.lhs, other.lhs) and same_formula(self.rhs, other.rhs)


# --- templates ------------------------------------------------------------------


@dataclass(frozen=True)
class Meta:
    name: str


@dataclass(frozen=True)
class FamilyOr:
    """Disjunction of ``body`` over the members of a family, bound to ``var``."""

    family: str
    body: "Template" = Meta("_")
    var: str = "_"


Template = Union[Top, Prop, And, Or, Modal, Meta, FamilyOr]


@dataclass(frozen=True)
class PairTemplate:
    lhs: Template
    rhs: Template


@dataclass(frozen=True)
class ForEach:
    """One premise per member of ``family``, bound to ``var``."""

    family: str
    pair: PairTemplate
    var: str = "_"


PremiseTemplate = Union[PairTemplate, ForEach]
Substitution = Mapping[str, Union[Formula, Tuple[Formula, ...]]]


@dataclass(frozen=True)
class Schema:
    """
    Attributes:
        id: Rule name
        premises: Premise templates
        conclusion: Conclusion template
        directed: Family required to be directed, if any
        member: ``(var, family)`` when ``var`` must be a member of ``family``
    """

    id: str
    premises: Tuple[PremiseTemplate, ...]
    conclusion: PairTemplate
    directed: Optional[str] = None
    member: Optional[Tuple[str, str]] = None

    @property
    def is_axiom(self) -> bool:
        return not self.premises and self.directed is None

    def metavariables(self) -> Tuple[List[str], List[str]]:
        """Free scalar and family metavariables, sorted."""
        scalars, families = set(), set()

        def walk(node, bound):
            if isinstance(node, Meta):
                if node.name not in bound:
                    scalars.add(node.name)
            elif isinstance(node, FamilyOr):
                families.add(node.family)
                walk(node.body, bound | {node.var})
            elif isinstance(node, And):
                walk(node.left, bound)
                walk(node.right, bound)
            elif isinstance(node, Or):
                for d in node.disjuncts:
                    walk(d, bound)
            elif isinstance(node, Modal):
                for a in node.args:
                    walk(a, bound)

        for premise in self.premises:
            if isinstance(premise, ForEach):
                families.add(premise.family)
                walk(premise.pair.lhs, {premise.var})
                walk(premise.pair.rhs, {premise.var})
            else:
                walk(premise.lhs, set())
                walk(premise.rhs, set())
        walk(self.conclusion.lhs, set())
        walk(self.conclusion.rhs, set())
        if self.directed:
            families.add(self.directed)
        if self.member:
            scalars.add(self.member[0])
            families.add(self.member[1])
        return sorted(scalars), sorted(families)

    def lifting_ids(self) -> List[str]:
        found = set()

        def walk(node):
            if isinstance(node, Modal):
                found.add(node.lifting)
                for a in node.args:
                    walk(a)
            elif isinstance(node, FamilyOr):
                walk(node.body)
            elif isinstance(node, And):
                walk(node.left)
                walk(node.right)
            elif isinstance(node, Or):
                for d in node.disjuncts:
                    walk(d)

        pairs = [p.pair if isinstance(p, ForEach) else p for p in self.premises] + [self.conclusion]
        for pair in pairs:
            walk(pair.lhs)
            walk(pair.rhs)
        return sorted(found)


def instantiate(template: Template, subst: Substitution) -> Formula:
    """
    Replace metavariables by formulas.

    Raises:
        InvalidInputError: If a metavariable is missing or has the wrong kind
    """
    if isinstance(template, Meta):
        value = _lookup(subst, template.name)
        if isinstance(value, tuple):
            raise InvalidInputError(f"Metavariable {template.name} needs a formula, not a family")
        return value
    if isinstance(template, FamilyOr):
        members = _family(subst, template.family)
        return Or(
            tuple(instantiate(template.body, {**subst, template.var: m}) for m in members)
        )
    if isinstance(template, And):
        return And(instantiate(template.left, subst), instantiate(template.right, subst))
    if isinstance(template, Or):
        return Or(tuple(instantiate(d, subst) for d in template.disjuncts))
    if isinstance(template, Modal):
        return Modal(template.lifting, tuple(instantiate(a, subst) for a in template.args))
    return template


def _lookup(subst: Substitution, name: str):
    if name not in subst:
        raise InvalidInputError(f"Substitution misses metavariable {name}", metavariable=name)
    return subst[name]


def _family(subst: Substitution, name: str) -> Tuple:
    value = _lookup(subst, name)
    if not isinstance(value, tuple):
        raise InvalidInputError(f"Metavariable {name} needs a family of formulas")
    return value


def instantiate_pair(pair: PairTemplate, subst: Substitution) -> ConsequencePair:
    return ConsequencePair(instantiate(pair.lhs, subst), instantiate(pair.rhs, subst))


def instantiate_premises(schema: Schema, subst: Substitution) -> List[ConsequencePair]:
    premises = []
    for premise in schema.premises:
        if isinstance(premise, ForEach):
            for member in _family(subst, premise.family):
                premises.append(instantiate_pair(premise.pair, {**subst, premise.var: member}))
        else:
            premises.append(instantiate_pair(premise, subst))
    return premises


# --- rule base ------------------------------------------------------------------


A, B, C = Meta("a"), Meta("b"), Meta("c")


def _pair(lhs: Template, rhs: Template) -> PairTemplate:
    return PairTemplate(lhs, rhs)


GEOMETRIC_RULES: Dict[str, Schema] = {
    schema.id: schema
    for schema in [
        Schema("identity", (), _pair(A, A)),
        Schema("cut", (_pair(A, B), _pair(B, C)), _pair(A, C)),
        Schema("conj-top", (), _pair(A, TOP)),
        Schema("conj-left", (), _pair(And(A, B), A)),
        Schema("conj-right", (), _pair(And(A, B), B)),
        Schema("conj-intro", (_pair(A, B), _pair(A, C)), _pair(A, And(B, C))),
        Schema("disj-inj", (), _pair(A, FamilyOr("S")), member=("a", "S")),
        Schema("disj-elim", (ForEach("S", _pair(Meta("_"), B)),), _pair(FamilyOr("S"), B)),
        Schema(
            "frame-dist",
            (),
            _pair(And(A, FamilyOr("S")), FamilyOr("S", And(A, Meta("_")))),
        ),
    ]
}


def _box(arg: Template) -> Modal:
    return Modal("box", (arg,))


def _dia(arg: Template) -> Modal:
    return Modal("dia", (arg,))


@dataclass(frozen=True)
class AxiomSystem:
    """
    Attributes:
        name: Registry name
        functors: Functors the system is meant for
        schemata: One-step axioms and rules by id
    """

    name: str
    functors: Tuple[str, ...]
    schemata: Dict[str, Schema] = field(hash=False)

    def schema(self, rule_id: str) -> Schema:
        if rule_id not in self.schemata:
            raise UnknownIdentifierError(
                f"System {self.name} has no rule {rule_id}", system=self.name, rule=rule_id
            )
        return self.schemata[rule_id]

    def check_liftings(self, liftings: Liftings) -> None:
        """Reject schemata that mention liftings missing from ``liftings``."""
        for schema in self.schemata.values():
            for lifting_id in schema.lifting_ids():
                if lifting_id not in liftings:
                    raise UnknownIdentifierError(
                        f"Rule {schema.id} of {self.name} uses unregistered lifting {lifting_id}",
                        system=self.name,
                        lifting=lifting_id,
                    )

    def with_schema(self, schema: Schema, name: Optional[str] = None) -> "AxiomSystem":
        return AxiomSystem(name or self.name, self.functors, {**self.schemata, schema.id: schema})


MONOTONE_SYSTEM = AxiomSystem(
    "monotone",
    ("dkh", "monotone"),
    {
        schema.id: schema
        for schema in [
            Schema("m1", (_pair(A, B),), _pair(_box(A), _box(B))),
            Schema("m2", (_pair(And(A, B), BOT),), _pair(And(_box(A), _dia(B)), BOT)),
            Schema("m3", (), _pair(_box(FamilyOr("A")), FamilyOr("A", _box(Meta("_")))), directed="A"),
            Schema("m4", (_pair(A, B),), _pair(_dia(A), _dia(B))),
            Schema("m5", (_pair(TOP, Or((A, B))),), _pair(TOP, Or((_box(A), _dia(B))))),
            Schema("m6", (), _pair(_dia(FamilyOr("A")), FamilyOr("A", _dia(Meta("_")))), directed="A"),
        ]
    },
)

POSITIVE_VIETORIS_SYSTEM = AxiomSystem(
    "positive-vietoris",
    ("vietoris", "kripke"),
    {
        schema.id: schema
        for schema in [
            Schema("v1", (), _pair(TOP, _box(TOP))),
            Schema("v2", (), _pair(And(_box(A), _box(B)), _box(And(A, B)))),
            Schema("v3", (), _pair(_dia(BOT), BOT)),
            Schema("v4", (), _pair(_dia(Or((A, B))), Or((_dia(A), _dia(B))))),
            Schema("v5", (), _pair(And(_box(A), _dia(B)), _dia(And(A, B)))),
            Schema("v6", (), _pair(_box(Or((A, B))), Or((_box(A), _dia(B))))),
            Schema("v7", (_pair(A, B),), _pair(_box(A), _box(B))),
            Schema("v8", (_pair(A, B),), _pair(_dia(A), _dia(B))),
            Schema("v9", (), _pair(_box(FamilyOr("A")), FamilyOr("A", _box(Meta("_")))), directed="A"),
            Schema("v10", (), _pair(_dia(FamilyOr("A")), FamilyOr("A", _dia(Meta("_"))))),
        ]
    },
)

AXIOM_SYSTEMS: Dict[str, AxiomSystem] = {
    system.name: system for system in (MONOTONE_SYSTEM, POSITIVE_VIETORIS_SYSTEM)
}


def axiom_system(name: str) -> AxiomSystem:
    if name not in AXIOM_SYSTEMS:
        raise UnknownIdentifierError(
            f"Unknown axiom system: {name}", system=name, known=sorted(AXIOM_SYSTEMS)
        )
    return AXIOM_SYSTEMS[name]


def resolve_rule(rule: str, systems: Optional[Mapping[str, AxiomSystem]] = None) -> Schema:
    """
    Schema for a rule id: a geometric rule name or ``onestep:<system>:<name>``.

    Raises:
        UnknownIdentifierError: For unknown rules or systems
    """
    if rule in GEOMETRIC_RULES:
        return GEOMETRIC_RULES[rule]
    parts = rule.split(":")
    if len(parts) == 3 and parts[0] == "onestep":
        registry = systems if systems is not None else AXIOM_SYSTEMS
        if parts[1] not in registry:
            raise UnknownIdentifierError(f"Unknown axiom system: {parts[1]}", system=parts[1])
        return registry[parts[1]].schema(parts[2])
    raise UnknownIdentifierError(f"Unknown rule: {rule}", rule=rule)


# --- derivations ------------------------------------------------------------------


@dataclass(frozen=True)
class RuleInstance:
    """
    Attributes:
        id: Node identifier, unique in the derivation
        rule: Geometric rule name or ``onestep:<system>:<name>``
        premises: Ids of earlier nodes used as premises
        conclusion: The derived pair
        subst: Metavariable to formula, or to a tuple of formulas for families
    """

    id: int
    rule: str
    premises: Tuple[int, ...]
    conclusion: ConsequencePair
    subst: Dict[str, Union[Formula, Tuple[Formula, ...]]] = field(default_factory=dict, hash=False)


@dataclass
class DerivationReport:
    valid: bool
    checked: int
    failure: Optional[Dict[str, object]] = None

    def as_dict(self) -> dict:
        return {"valid": self.valid, "checked": self.checked, "failure": self.failure}


def make_instance(
    node_id: int,
    rule: str,
    subst: Substitution,
    premises: Sequence[int] = (),
    systems: Optional[Mapping[str, AxiomSystem]] = None,
) -> RuleInstance:
    """Build a node whose conclusion is the rule's conclusion under ``subst``."""
    schema = resolve_rule(rule, systems)
    return RuleInstance(
        node_id, rule, tuple(premises), instantiate_pair(schema.conclusion, subst), dict(subst)
    )


def check_derivation(
    derivation: Sequence[RuleInstance], systems: Optional[Mapping[str, AxiomSystem]] = None
) -> DerivationReport:
    """
    Check every node against its schema, in order.

    Stops at the first failing node and reports it.
    """
    proved: Dict[int, ConsequencePair] = {}
    for checked, node in enumerate(derivation):
        failure = _check_node(node, proved, systems)
        if failure is not None:
            failure = {"id": node.id, "rule": node.rule, **failure}
            logger.info(f"Derivation fails at node {node.id}: {failure['reason']}")
            return DerivationReport(False, checked, failure)
        proved[node.id] = node.conclusion
    logger.debug(f"Derivation of {len(derivation)} nodes checked")
    return DerivationReport(True, len(derivation))


def _check_node(
    node: RuleInstance,
    proved: Dict[int, ConsequencePair],
    systems: Optional[Mapping[str, AxiomSystem]],
) -> Optional[Dict[str, object]]:
    if node.id in proved:
        return {"reason": "duplicate node id"}
    dangling = [p for p in node.premises if p not in proved]
    if dangling:
        return {"reason": "dangling premise", "premises": dangling}
    try:
        schema = resolve_rule(node.rule, systems)
        expected = instantiate_pair(schema.conclusion, node.subst)
        expected_premises = instantiate_premises(schema, node.subst)
    except InvalidInputError as exc:
        return {"reason": exc.message}
    if not expected.matches(node.conclusion):
        return {
            "reason": "conclusion does not match the schema",
            "expected": str(expected),
            "found": str(node.conclusion),
        }
    cited = [proved[p] for p in node.premises]
    for pair in expected_premises:
        if not any(pair.matches(c) for c in cited):
            return {"reason": "missing premise", "expected": str(pair)}
    if schema.member is not None:
        var, family = schema.member
        if not any(same_formula(node.subst[var], m) for m in node.subst[family]):
            return {"reason": f"{var} is not a member of {family}"}
    if schema.directed is not None and not _witnessed_directed(node.subst[schema.directed], cited):
        return {"reason": f"family {schema.directed} is not witnessed directed by the premises"}
    return None


def _witnessed_directed(family: Tuple[Formula, ...], cited: Sequence[ConsequencePair]) -> bool:
    """Each pair of members lies below a common member, by identity or a cited premise."""
    if not family:
        return False

    def below(x: Formula, y: Formula) -> bool:
        return same_formula(x, y) or any(c.matches(ConsequencePair(x, y)) for c in cited)

    return all(any(below(x, z) and below(y, z) for z in family) for x in family for y in family)


# --- semantics of templates -------------------------------------------------------------


OpenSubstitution = Mapping[str, Union[Mask, Tuple[Mask, ...]]]


def template_value(
    model: GeomModel, template: Template, subst: OpenSubstitution, liftings: Liftings
) -> Mask:
    """Value of a template with metavariables read as opens of the model."""
    space = model.space
    if isinstance(template, Meta):
        return subst[template.name]
    if isinstance(template, FamilyOr):
        value = 0
        for member in subst[template.family]:
            value |= template_value(model, template.body, {**subst, template.var: member}, liftings)
        return value
    if isinstance(template, Top):
        return space.full
    if isinstance(template, Prop):
        return model.valuation[template.name]
    if isinstance(template, And):
        return template_value(model, template.left, subst, liftings) & template_value(
            model, template.right, subst, liftings
        )
    if isinstance(template, Or):
        value = 0
        for d in template.disjuncts:
            value |= template_value(model, d, subst, liftings)
        return value
    if isinstance(template, Modal):
        args = [template_value(model, a, subst, liftings) for a in template.args]
        return modal_step(model, liftings[template.lifting], args)
    raise InvalidInputError(f"Not a template: {template!r}")


def _pair_holds(model: GeomModel, pair: PairTemplate, subst: OpenSubstitution, liftings: Liftings) -> bool:
    lhs = template_value(model, pair.lhs, subst, liftings)
    return lhs & ~template_value(model, pair.rhs, subst, liftings) == 0


def _premises_hold(model, schema: Schema, subst: OpenSubstitution, liftings) -> bool:
    for premise in schema.premises:
        if isinstance(premise, ForEach):
            for member in subst[premise.family]:
                if not _pair_holds(model, premise.pair, {**subst, premise.var: member}, liftings):
                    return False
        elif not _pair_holds(model, premise, subst, liftings):
            return False
    return True


def is_directed_family(family: Sequence[Mask]) -> bool:
    return bool(family) and all(
        any((a | b) & ~c == 0 for c in family) for a in family for b in family
    )


def validity(pair: ConsequencePair, model: GeomModel, liftings: Optional[Liftings] = None) -> bool:
    """⟦lhs⟧ ⊆ ⟦rhs⟧ in ``model``."""
    return truth_set(model, pair.lhs, liftings) & ~truth_set(model, pair.rhs, liftings) == 0


# --- soundness sweeps ---------------------------------------------------------------


def coalgebras_on(space: FinSpace, functor: TopFunctor) -> Iterator[GeomModel]:
    """All coalgebras on ``space``, as models without letters."""
    carrier = functor.carrier(space)
    for gamma in product(carrier.elements, repeat=space.size):
        try:
            yield make_model(space, functor, gamma)
        except InvalidInputError:
            continue


def models_up_to(
    functor: TopFunctor, max_points: int, letters: Sequence[str] = (), discrete_only: bool = False
) -> Iterator[GeomModel]:
    """Every model on spaces up to ``max_points`` points with open valuations of ``letters``."""
    enforce("MAX_POINTS", max_points, "Model enumeration size")
    for space in spaces_up_to(max_points):
        if discrete_only and not space.is_discrete:
            continue
        for model in coalgebras_on(space, functor):
            for values in product(space.opens, repeat=len(letters)):
                yield GeomModel(model.coalgebra, dict(zip(letters, values)))


def open_substitutions(schema: Schema, space: FinSpace, max_family: int = 2) -> Iterator[Dict]:
    """Assignments of opens to scalars and of small open families to families."""
    scalars, families = schema.metavariables()
    sizes = range(0, max_family + 1)
    family_choices = [c for size in sizes for c in combinations(space.opens, size)]
    for scalar_values in product(space.opens, repeat=len(scalars)):
        for family_values in product(family_choices, repeat=len(families)):
            subst = dict(zip(scalars, scalar_values))
            subst.update(zip(families, family_values))
            if schema.directed and not is_directed_family(subst[schema.directed]):
                continue
            if schema.member and subst[schema.member[0]] not in subst[schema.member[1]]:
                continue
            yield subst


@dataclass
class SoundnessReport:
    """
    Attributes:
        system: Axiom system name
        functor: Functor name
        models: Number of coalgebras examined
        instances: Number of (coalgebra, rule, substitution) checks
        violations: Witnesses of failing axioms or rules
    """

    system: str
    functor: str
    models: int = 0
    instances: int = 0
    violations: List[Dict[str, object]] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "system": self.system,
            "functor": self.functor,
            "models": self.models,
            "instances": self.instances,
            "sound": self.sound,
            "violations": self.violations,
        }


def soundness_sweep(
    system: Union[str, AxiomSystem],
    functor: Union[str, TopFunctor],
    max_points: int = 2,
    liftings: Optional[Liftings] = None,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    max_violations: int = 20,
) -> SoundnessReport:
    """
    Check every rule of ``system`` on finite coalgebras.

    Axioms must hold under every open substitution. Rules must carry valid
    premises to a valid conclusion. With ``seed`` and ``samples`` only a
    seeded random selection of coalgebras is examined.
    """
    system = axiom_system(system) if isinstance(system, str) else system
    functor = get_functor(functor) if isinstance(functor, str) else functor
    liftings = liftings if liftings is not None else liftings_for(functor)
    system.check_liftings(liftings)
    report = SoundnessReport(system.name, functor.name)

    models = list(models_up_to(functor, max_points))
    if samples is not None:
        rng = random.Random(seed)
        models = rng.sample(models, min(samples, len(models)))
    for model in models:
        report.models += 1
        for schema in system.schemata.values():
            for subst in open_substitutions(schema, model.space):
                report.instances += 1
                if not schema.is_axiom and not _premises_hold(model, schema, subst, liftings):
                    continue
                if _pair_holds(model, schema.conclusion, subst, liftings):
                    continue
                if len(report.violations) < max_violations:
                    report.violations.append(_violation(model, schema, subst))
    logger.info(
        f"Soundness sweep {system.name}/{functor.name}: {report.models} models, "
        f"{report.instances} instances, {len(report.violations)} violations"
    )
    return report


def _violation(model: GeomModel, schema: Schema, subst: OpenSubstitution) -> Dict[str, object]:
    space = model.space
    rendered = {
        name: [space.names_of(m) for m in value] if isinstance(value, tuple) else space.names_of(value)
        for name, value in subst.items()
    }
    kind = "axiom" if schema.is_axiom else "rule"
    return {"rule": schema.id, "kind": kind, "model": model.to_document(), "subst": rendered}


@dataclass
class Countermodel:
    model: GeomModel
    points: List[str]

    def as_dict(self) -> dict:
        return {"model": self.model.to_document(), "points": self.points}


def find_countermodel(
    pair: ConsequencePair,
    functor: Union[str, TopFunctor],
    max_points: int = 2,
    liftings: Optional[Liftings] = None,
) -> Optional[Countermodel]:
    """
    Smallest enumerated model where ``pair`` is not valid.

    Letters of the pair range over every open valuation.
    """
    functor = get_functor(functor) if isinstance(functor, str) else functor
    letters = sorted(set(letters_of(pair.lhs)) | set(letters_of(pair.rhs)))
    for model in models_up_to(functor, max_points, letters):
        gap = truth_set(model, pair.lhs, liftings) & ~truth_set(model, pair.rhs, liftings)
        if gap:
            logger.debug(f"Countermodel for {pair} on {model.space.size} points")
            return Countermodel(model, model.space.names_of(gap))
    return None
