"""Simulate and audit learners in the limit on eventually periodic texts."""

from .core import NO_HYP, PAUSE, Text, content, expand, format_text, parse_text
from .hypspace import Base, Catalog, EvalContext, Guarded, Padded, Union, is_index, semantics
from .kernels import BACKEND
from .learners import BmsLearner, Divergence, HistoryLearner, IterLearner, Trace, run, trace, visited_states
from .restrictions import HOLDS, UNDETERMINED, VIOLATED, Pred, Verdict, check, check_all, implication_audit
from .transforms import (
    bms_to_it, equivalent_text, it_to_bms, pumped_text, state_decisive, strongly_conservative, witness_based,
)

__all__ = [
    "NO_HYP", "PAUSE", "Text", "content", "expand", "format_text", "parse_text",
    "Base", "Catalog", "EvalContext", "Guarded", "Padded", "Union", "is_index", "semantics",
    "BACKEND",
    "BmsLearner", "Divergence", "HistoryLearner", "IterLearner", "Trace", "run", "trace", "visited_states",
    "HOLDS", "UNDETERMINED", "VIOLATED", "Pred", "Verdict", "check", "check_all", "implication_audit",
    "bms_to_it", "equivalent_text", "it_to_bms", "pumped_text", "state_decisive", "strongly_conservative",
    "witness_based",
]

__version__ = "0.1.0"
