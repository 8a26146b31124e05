from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from scintent.demo import demo_model_document
from scintent.grammar import default_vocabulary
from scintent.kb import KnowledgeBase
from scintent.model import load_model
from scintent.service import create_app

GOLDEN_INTENT_1 = "user-x is not allowed to access to realm o1-r1"
GOLDEN_INTENT_2 = "user-x is allowed to access to organization o1"

GOLDEN_LINES_1 = [
    "check user-x in database of Users",
    "block user-x to access assets in o1-r1",
    "alert admin in o1",
]
GOLDEN_LINES_2 = [
    "check user-x in database of Users",
    "allow user-x to access assets in o1 except o1-r1",
    "alert admin in o1",
]


@pytest.fixture
def model_document():
    return demo_model_document()


@pytest.fixture
def model(model_document):
    return load_model(model_document)


@pytest.fixture
def vocab():
    return default_vocabulary()


@pytest.fixture
def kb_dir(tmp_path):
    target = tmp_path / "kb"
    KnowledgeBase.initialize(target, demo_model_document())
    return target


@pytest.fixture
def client(kb_dir):
    return TestClient(create_app(kb_dir, test_mode=True))
