"""Compile discrete belief networks into query DAGs and evaluate them."""

from ._core import (
    BeliefNetwork,
    EvaluationState,
    InconsistentEvidence,
    QDag,
    QDagError,
    compile,
    evaluate,
    load_network,
    load_qdag,
    marginal,
    oracle_query,
    parse_network,
    parse_qdag,
)

__all__ = [
    "BeliefNetwork",
    "EvaluationState",
    "InconsistentEvidence",
    "QDag",
    "QDagError",
    "compile",
    "evaluate",
    "load_network",
    "load_qdag",
    "marginal",
    "oracle_query",
    "parse_network",
    "parse_qdag",
]
