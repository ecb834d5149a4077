"""
Formula syntax, semantics and the one-step proof systems.
"""

from apps.logic.services.proofsys import (
    AXIOM_SYSTEMS,
    GEOMETRIC_RULES,
    AxiomSystem,
    ConsequencePair,
    Countermodel,
    DerivationReport,
    RuleInstance,
    Schema,
    SoundnessReport,
    axiom_system,
    check_derivation,
    find_countermodel,
    make_instance,
    models_up_to,
    soundness_sweep,
    validity,
)
from apps.logic.services.semantics import (
    DefinableOpens,
    TheoryQuotient,
    TheorySignature,
    bounded_truth_sets,
    definable_opens,
    enumerate_formulas,
    equivalence_classes,
    modal_equiv,
    normal_form,
    random_formula,
    theory_quotient,
    theory_signature,
    truth_set,
)
from apps.logic.services.syntax import (
    BOT,
    TOP,
    And,
    Formula,
    Modal,
    Or,
    Prop,
    Top,
    parse,
    same_formula,
    to_text,
)

__all__ = [
    "AXIOM_SYSTEMS",
    "GEOMETRIC_RULES",
    "AxiomSystem",
    "ConsequencePair",
    "Countermodel",
    "DerivationReport",
    "RuleInstance",
    "Schema",
    "SoundnessReport",
    "axiom_system",
    "check_derivation",
    "find_countermodel",
    "make_instance",
    "models_up_to",
    "soundness_sweep",
    "validity",
    "DefinableOpens",
    "TheoryQuotient",
    "TheorySignature",
    "bounded_truth_sets",
    "definable_opens",
    "enumerate_formulas",
    "equivalence_classes",
    "modal_equiv",
    "normal_form",
    "random_formula",
    "theory_quotient",
    "theory_signature",
    "truth_set",
    "BOT",
    "TOP",
    "And",
    "Formula",
    "Modal",
    "Or",
    "Prop",
    "Top",
    "parse",
    "same_formula",
    "to_text",
]
