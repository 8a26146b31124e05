"""Controlled-language access-control intents for supply-chain assets."""

from .anomaly import AnomalyFlag, AnomalyRule, anomaly_scan, suggest_block_intent
from .grammar import (
    IntentSpec,
    ParseError,
    Permission,
    Shift,
    Vocabulary,
    default_vocabulary,
    parse_intent,
    render_intent,
)
from .kb import EventKind, KnowledgeBase, TelemetryEvent
from .model import HierarchyModel, ScopeKind, ScopePath, load_model
from .policy import (
    CompilationResult,
    Decision,
    PolicyProgram,
    PolicyStore,
    Verdict,
    apply_result,
    compile_intent,
    decide,
    render_policy,
)
from .service import create_app

__all__ = [
    "AnomalyFlag",
    "AnomalyRule",
    "CompilationResult",
    "Decision",
    "EventKind",
    "HierarchyModel",
    "IntentSpec",
    "KnowledgeBase",
    "ParseError",
    "Permission",
    "PolicyProgram",
    "PolicyStore",
    "ScopeKind",
    "ScopePath",
    "Shift",
    "TelemetryEvent",
    "Verdict",
    "Vocabulary",
    "anomaly_scan",
    "apply_result",
    "compile_intent",
    "create_app",
    "decide",
    "default_vocabulary",
    "load_model",
    "parse_intent",
    "render_intent",
    "render_policy",
    "suggest_block_intent",
]

__version__ = "0.1.0"
