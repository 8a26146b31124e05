from __future__ import annotations

import json
import random

import pytest

from scintent.grammar import ParseError, Permission, default_vocabulary, parse_intent
from scintent.kb import (
    INTENT_STORE_FILE,
    MODEL_FILE,
    POLICY_STORE_FILE,
    TELEMETRY_FILE,
    CrossReferenceError,
    EventKind,
    KnowledgeBase,
    KnowledgeBaseError,
    SynonymCollisionError,
    TelemetryEvent,
    kb_load,
    kb_save,
)
from scintent.policy import apply_result, compile_intent
from conftest import GOLDEN_INTENT_1
from table_oracle import intent_sentence, random_intent_tuple, random_model_document


def read_bytes(kb_dir):
    return {
        name: (kb_dir / name).read_bytes()
        for name in (MODEL_FILE, INTENT_STORE_FILE, POLICY_STORE_FILE, TELEMETRY_FILE)
    }


def test_initialize_creates_version_zero(kb_dir):
    kb = kb_load(kb_dir)
    assert kb.policy_store.version == 0
    assert kb.policy_store.policies == []
    assert kb.telemetry == []
    assert kb.model.has_user("user-x")


def test_save_load_round_trip(kb_dir):
    kb = kb_load(kb_dir)
    spec = parse_intent(GOLDEN_INTENT_1, kb.vocabulary)
    apply_result(compile_intent(spec, kb.model, kb.policy_store), kb.policy_store)
    kb.record_event(TelemetryEvent(1.0, EventKind.INTENT_SUBMITTED, {"intent_id": "i-1"}))
    kb_save(kb, kb_dir)
    again = kb_load(kb_dir)
    assert again == kb
    assert again.policy_store.version == 1
    assert again.policy_store.get("p-1").to_document() == kb.policy_store.get(
        "p-1"
    ).to_document()


def test_two_saves_without_mutation_identical(kb_dir):
    kb = kb_load(kb_dir)
    kb.save(kb_dir)
    first = read_bytes(kb_dir)
    kb.save(kb_dir)
    assert read_bytes(kb_dir) == first


def test_version_visible_in_stored_document(kb_dir):
    kb = kb_load(kb_dir)
    spec = parse_intent(GOLDEN_INTENT_1, kb.vocabulary)
    apply_result(compile_intent(spec, kb.model, kb.policy_store), kb.policy_store)
    kb.save(kb_dir)
    doc = json.loads((kb_dir / POLICY_STORE_FILE).read_text())
    assert doc["version"] == 1
    assert len(doc["policies"]) == 1


def test_vocab_add_flips_acceptance(kb_dir):
    kb = kb_load(kb_dir)
    sentence = "user-x is denied to access to realm o1-r1"
    with pytest.raises(ParseError):
        parse_intent(sentence, kb.vocabulary)
    assert kb.vocab_add("permission", "block", "denied") is True
    assert parse_intent(sentence, kb.vocabulary).permission is Permission.BLOCK
    kb.save(kb_dir)
    assert parse_intent(sentence, kb_load(kb_dir).vocabulary).permission is Permission.BLOCK


def test_vocab_add_collision_and_idempotence(kb_dir):
    kb = kb_load(kb_dir)
    assert kb.vocab_add("permission", "block", "denied") is True
    assert kb.vocab_add("permission", "block", "denied") is False
    with pytest.raises(SynonymCollisionError):
        kb.vocab_add("permission", "allow", "denied")


def test_vocab_growth_is_monotone(kb_dir):
    """Adding a fresh synonym never changes the parse of existing sentences."""
    kb = kb_load(kb_dir)
    rng = random.Random(41)
    doc = random_model_document(rng)
    corpus = []
    for _ in range(80):
        users, effect, kind, spot, shifts = random_intent_tuple(rng, doc)
        corpus.append(intent_sentence(rng, users, effect, kind, spot, shifts))
    before = [parse_intent(s, kb.vocabulary) for s in corpus]
    kb.vocab_add("permission", "block", "denied")
    kb.vocab_add("shift", "night", "graveyard shift")
    kb.vocab_add("scope_kind", "realm", "zone")
    after = [parse_intent(s, kb.vocabulary) for s in corpus]
    assert before == after


def test_record_event_appends_in_order(kb_dir):
    kb = kb_load(kb_dir)
    for i in range(100):
        kb.record_event(TelemetryEvent(float(i), EventKind.DECISION, {"n": i}))
    assert [e.payload["n"] for e in kb.telemetry] == list(range(100))
    kb.save(kb_dir)
    assert [e.payload["n"] for e in kb_load(kb_dir).telemetry] == list(range(100))


def test_telemetry_prefix_property_across_saves(kb_dir):
    kb = kb_load(kb_dir)
    kb.record_event(TelemetryEvent(1.0, EventKind.DECISION, {"n": 1}))
    kb.save(kb_dir)
    first_log = (kb_dir / TELEMETRY_FILE).read_text()
    kb.record_event(TelemetryEvent(2.0, EventKind.DECISION, {"n": 2}))
    kb.save(kb_dir)
    second_log = (kb_dir / TELEMETRY_FILE).read_text()
    assert second_log.startswith(first_log)


def test_cross_reference_unknown_spot_rejected(kb_dir):
    store_doc = {
        "version": 1,
        "policies": [
            {
                "id": "p-1",
                "user": "user-x",
                "effect": "block",
                "scope": {"kind": "realm", "spot": "gone-realm"},
                "exceptions": [],
                "shifts": ["morning"],
                "status": "active",
                "provenance": {"intent_id": "i-1", "seq": 1},
            }
        ],
    }
    (kb_dir / POLICY_STORE_FILE).write_text(json.dumps(store_doc))
    with pytest.raises(CrossReferenceError):
        kb_load(kb_dir)


def test_cross_reference_unknown_user_rejected(kb_dir):
    store_doc = {
        "version": 1,
        "policies": [
            {
                "id": "p-1",
                "user": "ghost",
                "effect": "block",
                "scope": {"kind": "realm", "spot": "o1-r1"},
                "exceptions": [],
                "shifts": ["morning"],
                "status": "active",
                "provenance": {"intent_id": "i-1", "seq": 1},
            }
        ],
    }
    (kb_dir / POLICY_STORE_FILE).write_text(json.dumps(store_doc))
    with pytest.raises(CrossReferenceError):
        kb_load(kb_dir)


def test_missing_and_malformed_documents(kb_dir, tmp_path):
    with pytest.raises(KnowledgeBaseError):
        kb_load(tmp_path / "empty")
    (kb_dir / MODEL_FILE).write_text("{not json")
    with pytest.raises(KnowledgeBaseError):
        kb_load(kb_dir)


def test_malformed_telemetry_line_rejected(kb_dir):
    (kb_dir / TELEMETRY_FILE).write_text('{"timestamp": 1.0}\n')
    with pytest.raises(KnowledgeBaseError, match="telemetry line 1"):
        kb_load(kb_dir)


def test_initialize_without_model_yields_empty_hierarchy(tmp_path):
    kb = KnowledgeBase.initialize(tmp_path / "bare")
    assert kb.model.all_paths() == []
    assert default_vocabulary().to_document() == kb.vocabulary.to_document()
