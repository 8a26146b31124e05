"""File-backed knowledge base: hierarchy model, intent-store vocabulary,
versioned policy store, and an append-only telemetry log.

Each store is one JSON document in the knowledge-base directory
(``model.json``, ``intent_store.json``, ``policy_store.json``,
``telemetry.jsonl``); saves are atomic per document (write to a temp file,
then rename). All mutations flow through a single writer in the service
layer, so loads and snapshots never observe torn state.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from .grammar import Vocabulary, VocabularyError, default_vocabulary
from .model import HierarchyModel
from .policy import PolicyStore

MODEL_FILE = "model.json"
INTENT_STORE_FILE = "intent_store.json"
POLICY_STORE_FILE = "policy_store.json"
TELEMETRY_FILE = "telemetry.jsonl"


class KnowledgeBaseError(Exception):
    """Base class for knowledge-base errors."""


class CrossReferenceError(KnowledgeBaseError):
    """A stored policy references a user or spot absent from the model."""


class SynonymCollisionError(KnowledgeBaseError):
    """Synonym already bound to a different canonical token in that slot."""


class EventKind(str, Enum):
    DECISION = "decision"
    CONFLICT = "conflict"
    ALERT = "alert"
    INTENT_SUBMITTED = "intent-submitted"
    POLICY_APPLIED = "policy-applied"


@dataclass(frozen=True)
class TelemetryEvent:
    timestamp: float
    kind: EventKind
    payload: dict[str, Any]

    def to_document(self) -> dict[str, Any]:
        return {
            "timestamp": self.timestamp,
            "kind": self.kind.value,
            "payload": self.payload,
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> TelemetryEvent:
        return cls(
            timestamp=float(doc["timestamp"]),
            kind=EventKind(doc["kind"]),
            payload=dict(doc["payload"]),
        )


class KnowledgeBase:
    """In-memory working copy of the four stores."""

    def __init__(
        self,
        model: HierarchyModel,
        vocabulary: Vocabulary,
        policy_store: PolicyStore,
        telemetry: list[TelemetryEvent] | None = None,
    ):
        self.model = model
        self.vocabulary = vocabulary
        self.policy_store = policy_store
        self.telemetry = list(telemetry or [])

    # -- persistence -------------------------------------------------------

    @classmethod
    def load(cls, kb_dir: str | Path) -> KnowledgeBase:
        """Load and cross-validate the four stores from a directory."""
        base = Path(kb_dir)
        try:
            model_doc = _read_json(base / MODEL_FILE)
            vocab_doc = _read_json(base / INTENT_STORE_FILE)
            store_doc = _read_json(base / POLICY_STORE_FILE)
        except FileNotFoundError as exc:
            raise KnowledgeBaseError(f"missing knowledge-base document: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise KnowledgeBaseError(f"malformed knowledge-base document: {exc}") from exc
        model = HierarchyModel.from_document(model_doc)
        vocabulary = Vocabulary.from_document(vocab_doc)
        try:
            policy_store = PolicyStore.from_document(store_doc, model)
        except Exception as exc:
            raise CrossReferenceError(
                f"policy store does not fit the model: {exc}"
            ) from exc
        for program in policy_store.policies:
            if not model.has_user(program.user):
                raise CrossReferenceError(
                    f"policy '{program.id}' names unknown user '{program.user}'"
                )
        telemetry = []
        telemetry_path = base / TELEMETRY_FILE
        if telemetry_path.exists():
            with open(telemetry_path, encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        telemetry.append(TelemetryEvent.from_document(json.loads(line)))
                    except (json.JSONDecodeError, KeyError, ValueError) as exc:
                        raise KnowledgeBaseError(
                            f"malformed telemetry line {line_no}: {exc}"
                        ) from exc
        return cls(model, vocabulary, policy_store, telemetry)

    def save(self, kb_dir: str | Path) -> None:
        """Atomically replace every document; a reload yields an equal KB."""
        base = Path(kb_dir)
        base.mkdir(parents=True, exist_ok=True)
        _write_json(base / MODEL_FILE, self.model.to_document())
        _write_json(base / INTENT_STORE_FILE, self.vocabulary.to_document())
        _write_json(base / POLICY_STORE_FILE, self.policy_store.to_document())
        lines = "".join(
            json.dumps(e.to_document(), sort_keys=True) + "\n" for e in self.telemetry
        )
        _write_text(base / TELEMETRY_FILE, lines)

    @classmethod
    def initialize(
        cls, kb_dir: str | Path, model_document: dict[str, Any] | None = None
    ) -> KnowledgeBase:
        """Create a fresh knowledge base on disk (version 0, empty log)."""
        model = HierarchyModel.from_document(
            model_document if model_document is not None
            else {"organizations": [], "users": []}
        )
        kb = cls(model, default_vocabulary(), PolicyStore())
        kb.save(kb_dir)
        return kb

    # -- mutations ---------------------------------------------------------

    def vocab_add(self, slot: str, canonical: str, synonym: str) -> bool:
        """Enrich the vocabulary; False means the synonym was already there."""
        try:
            return self.vocabulary.add_synonym(slot, canonical, synonym)
        except VocabularyError as exc:
            raise SynonymCollisionError(str(exc)) from exc

    def record_event(self, event: TelemetryEvent) -> None:
        self.telemetry.append(event)

    # -- comparison --------------------------------------------------------

    def to_documents(self) -> dict[str, Any]:
        return {
            MODEL_FILE: self.model.to_document(),
            INTENT_STORE_FILE: self.vocabulary.to_document(),
            POLICY_STORE_FILE: self.policy_store.to_document(),
            TELEMETRY_FILE: [e.to_document() for e in self.telemetry],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.to_documents() == other.to_documents()


def kb_load(kb_dir: str | Path) -> KnowledgeBase:
    return KnowledgeBase.load(kb_dir)


def kb_save(kb: KnowledgeBase, kb_dir: str | Path) -> None:
    kb.save(kb_dir)


def _read_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write_json(path: Path, document: Any) -> None:
    _write_text(path, json.dumps(document, indent=2, sort_keys=True) + "\n")


def _write_text(path: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
