"""Persistent token-frequency agent and representational drift metrics."""

from ._statedrift import (
    CorpusSpec,
    PhaseInterval,
    ProtocolResult,
    Report,
    RunRecord,
    StabilitySummary,
    StateVector,
    StatedriftError,
    cosine,
    drift_series,
    generate_corpus,
    load_history,
    load_state,
    normalize,
    report,
    run_once,
    run_protocol,
    save_state,
    stability,
    tokenize,
)

__all__ = [
    "CorpusSpec",
    "PhaseInterval",
    "ProtocolResult",
    "Report",
    "RunRecord",
    "StabilitySummary",
    "StateVector",
    "StatedriftError",
    "cosine",
    "drift_series",
    "generate_corpus",
    "load_history",
    "load_state",
    "normalize",
    "report",
    "run_once",
    "run_protocol",
    "save_state",
    "stability",
    "tokenize",
]
