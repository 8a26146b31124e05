from __future__ import annotations

import json
import socket
import threading
import time

import pytest
import uvicorn
from click.testing import CliRunner

from scintent.cli import main
from scintent.kb import MODEL_FILE, POLICY_STORE_FILE, kb_load
from scintent.service import KB_DIR_ENV, create_app
from scintent.demo import demo_model_document
from conftest import GOLDEN_INTENT_1, GOLDEN_LINES_1


def free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture
def server(kb_dir):
    port = free_port()
    config = uvicorn.Config(
        create_app(kb_dir, test_mode=True),
        host="127.0.0.1",
        port=port,
        log_level="warning",
    )
    instance = uvicorn.Server(config)
    thread = threading.Thread(target=instance.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not instance.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    yield f"http://127.0.0.1:{port}"
    instance.should_exit = True
    thread.join(timeout=5)


def invoke(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def test_kb_init_demo(tmp_path):
    target = tmp_path / "kb"
    result = invoke("kb", "init", "--kb-dir", str(target), "--demo")
    assert result.exit_code == 0, result.output
    assert (target / MODEL_FILE).exists()
    assert kb_load(target).model.has_user("user-x")


def test_kb_init_with_model_file(tmp_path):
    model_file = tmp_path / "model.json"
    model_file.write_text(json.dumps(demo_model_document()))
    target = tmp_path / "kb"
    result = invoke("kb", "init", "--kb-dir", str(target), "--model", str(model_file))
    assert result.exit_code == 0, result.output
    assert kb_load(target).model.asset_ids() == [
        "asset-11",
        "asset-12",
        "asset-21",
        "asset-22",
    ]


def test_kb_init_flag_conflicts_and_missing_dir(tmp_path):
    model_file = tmp_path / "model.json"
    model_file.write_text("{}")
    both = invoke(
        "kb", "init", "--kb-dir", str(tmp_path / "kb"),
        "--demo", "--model", str(model_file),
    )
    assert both.exit_code == 2
    nowhere = invoke("kb", "init", env={KB_DIR_ENV: None})
    assert nowhere.exit_code == 2
    assert KB_DIR_ENV in nowhere.output


def test_kb_init_honors_environment(tmp_path):
    target = tmp_path / "kb-from-env"
    result = invoke("kb", "init", "--demo", env={KB_DIR_ENV: str(target)})
    assert result.exit_code == 0, result.output
    assert (target / POLICY_STORE_FILE).exists()


def test_submit_and_policies(server):
    result = invoke("submit", GOLDEN_INTENT_1, "--url", server)
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert body["applied"] is True
    assert body["rendered_policies"] == [GOLDEN_LINES_1]

    listing = invoke("policies", "--url", server)
    assert [p["id"] for p in json.loads(listing.output)] == ["p-1"]


def test_submit_dry_run(server):
    result = invoke("submit", GOLDEN_INTENT_1, "--dry-run", "--url", server)
    assert json.loads(result.output)["applied"] is False
    listing = invoke("policies", "--url", server)
    assert json.loads(listing.output) == []


def test_submit_parse_error_exits_nonzero(server):
    result = invoke("submit", "total gibberish", "--url", server)
    assert result.exit_code == 1
    assert "error" in json.loads(result.output)["parse"]


def test_decide_and_record(server, kb_dir):
    invoke("submit", GOLDEN_INTENT_1, "--url", server)
    plain = invoke("decide", "user-x", "asset-11", "10:00", "--url", server)
    assert json.loads(plain.output) == {
        "verdict": "blocked",
        "justification": ["p-1"],
        "default_applied": False,
    }
    before = [e.kind.value for e in kb_load(kb_dir).telemetry]
    assert "decision" not in before
    invoke("decide", "user-x", "asset-11", "10:00", "--record", "--url", server)
    after = [e.kind.value for e in kb_load(kb_dir).telemetry]
    assert after == before + ["decision"]


def test_alerts_listing_and_ack(server):
    invoke("submit", GOLDEN_INTENT_1, "--url", server)
    invoke("submit", "user-x is allowed to access to organization o1", "--url", server)
    listing = invoke("alerts", "--admin", "o1-admin", "--url", server)
    alerts = json.loads(listing.output)
    assert len(alerts) == 1
    acked = invoke("alerts", "--ack", alerts[0]["id"], "--url", server)
    assert json.loads(acked.output)["acknowledged"] is True
    assert json.loads(invoke("alerts", "--url", server).output) == []


def test_unreachable_server_exits_two():
    dead = f"http://127.0.0.1:{free_port()}"
    result = invoke("policies", "--url", dead)
    assert result.exit_code == 2
