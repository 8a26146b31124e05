"""Command-line client and server launcher.

Every data-path command (`submit`, `decide`, `policies`, `alerts`) talks to
a running gateway over HTTP and prints the JSON body it got back; the
policy engine is never invoked in-process here. `kb init` and `serve` are
the only commands that touch the knowledge-base directory directly.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx

from .kb import KnowledgeBase
from .service import KB_DIR_ENV, create_app

DEFAULT_URL = "http://127.0.0.1:8000"


def _print(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _request(method: str, url: str, **kwargs) -> dict | list:
    try:
        response = httpx.request(method, url, timeout=30.0, **kwargs)
    except httpx.HTTPError as exc:
        click.echo(f"request failed: {exc}", err=True)
        sys.exit(2)
    body = response.json() if response.content else None
    if response.status_code >= 400:
        _print(body)
        sys.exit(1)
    return body


def _kb_dir_option(value: str | None) -> Path:
    kb_dir = value or os.environ.get(KB_DIR_ENV)
    if kb_dir is None:
        click.echo(f"no knowledge-base directory: pass --kb-dir or set {KB_DIR_ENV}", err=True)
        sys.exit(2)
    return Path(kb_dir)


@click.group()
def main() -> None:
    """Access-control intents for supply-chain assets."""


@main.command()
@click.argument("text")
@click.option("--url", default=DEFAULT_URL, show_default=True)
@click.option("--dry-run", is_flag=True, help="Compile and report without applying.")
def submit(text: str, url: str, dry_run: bool) -> None:
    """Submit one intent sentence."""
    _print(_request("POST", f"{url}/intents", json={"text": text, "dry_run": dry_run}))


@main.command()
@click.argument("user")
@click.argument("asset")
@click.argument("time")
@click.option("--url", default=DEFAULT_URL, show_default=True)
@click.option("--record", is_flag=True, help="Log the decision to telemetry.")
def decide(user: str, asset: str, time: str, url: str, record: bool) -> None:
    """Query the verdict for USER on ASSET at TIME (HH:MM)."""
    headers = {"X-Record": "true"} if record else {}
    _print(
        _request(
            "POST",
            f"{url}/decisions/query",
            json={"user": user, "asset": asset, "time": time},
            headers=headers,
        )
    )


@main.command()
@click.option("--url", default=DEFAULT_URL, show_default=True)
def policies(url: str) -> None:
    """List stored policies."""
    _print(_request("GET", f"{url}/policies"))


@main.command()
@click.option("--url", default=DEFAULT_URL, show_default=True)
@click.option("--admin", default=None, help="Only alerts pending for this admin.")
@click.option("--ack", default=None, metavar="ALERT_ID", help="Acknowledge one alert.")
def alerts(url: str, admin: str | None, ack: str | None) -> None:
    """List pending alerts, or acknowledge one with --ack."""
    if ack is not None:
        _print(_request("POST", f"{url}/alerts/{ack}/ack"))
        return
    params = {"admin": admin} if admin is not None else {}
    _print(_request("GET", f"{url}/alerts", params=params))


@main.group()
def kb() -> None:
    """Knowledge-base maintenance."""


@kb.command("init")
@click.option("--kb-dir", default=None, help=f"Target directory (default ${KB_DIR_ENV}).")
@click.option("--model", "model_file", default=None, type=click.Path(exists=True),
              help="Hierarchy model JSON to install.")
@click.option("--demo", is_flag=True, help="Install the built-in demo hierarchy.")
def kb_init(kb_dir: str | None, model_file: str | None, demo: bool) -> None:
    """Create a fresh knowledge base."""
    target = _kb_dir_option(kb_dir)
    if demo and model_file:
        click.echo("--demo and --model are mutually exclusive", err=True)
        sys.exit(2)
    document = None
    if demo:
        from .demo import demo_model_document

        document = demo_model_document()
    elif model_file:
        document = json.loads(Path(model_file).read_text(encoding="utf-8"))
    KnowledgeBase.initialize(target, document)
    click.echo(f"initialized knowledge base in {target}")


@main.command()
@click.option("--kb-dir", default=None, help=f"Knowledge-base directory (default ${KB_DIR_ENV}).")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--test-mode", is_flag=True, help="Fixed clock for reproducible runs.")
@click.option("--anomaly-threshold", default=3, show_default=True)
@click.option("--anomaly-window", default=60, show_default=True,
              help="Anomaly window in minutes.")
def serve(kb_dir: str | None, port: int, host: str, test_mode: bool,
          anomaly_threshold: int, anomaly_window: int) -> None:
    """Run the HTTP gateway."""
    import uvicorn

    from .anomaly import AnomalyRule

    app = create_app(
        _kb_dir_option(kb_dir),
        test_mode=test_mode,
        anomaly_rule=AnomalyRule(anomaly_threshold, anomaly_window),
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
