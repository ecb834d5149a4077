"""
Bisimulations, behavioural equivalence and the equivalence comparison harness.
"""

from apps.bisim.services.equivalence import (
    BehaviouralVerdict,
    EquivalenceReport,
    SignatureHypotheses,
    behavioural_equiv,
    compare_equivalences,
    signature_hypotheses,
)
from apps.bisim.services.relations import (
    AMSearch,
    BisimCheck,
    CoherentPair,
    Relation,
    coherent_pairs,
    graph_relation,
    greatest_lambda_bisim,
    is_am_bisim,
    is_lambda_bisim,
    random_lambda_bisims,
    search_am_transition,
)

__all__ = [
    "BehaviouralVerdict",
    "EquivalenceReport",
    "SignatureHypotheses",
    "behavioural_equiv",
    "compare_equivalences",
    "signature_hypotheses",
    "AMSearch",
    "BisimCheck",
    "CoherentPair",
    "Relation",
    "coherent_pairs",
    "graph_relation",
    "greatest_lambda_bisim",
    "is_am_bisim",
    "is_lambda_bisim",
    "random_lambda_bisims",
    "search_am_transition",
]
