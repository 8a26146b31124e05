"""HTTP/JSON gateway: intent submission, decision queries, store inspection.

The service owns the knowledge base, the simulated network controller, and
the alert registry. Reads run against snapshots; every mutation (apply,
vocabulary addition, acknowledgment, telemetry record) goes through one
lock and is persisted to the knowledge-base directory before the response
is returned.

``test_mode`` pins the clock so that identical knowledge-base state plus an
identical request always produce an identical response body.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Header, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .anomaly import AnomalyRule, anomaly_scan
from .controller import (
    AlertRegistry,
    AdminAlert,
    AlreadyAcknowledgedError,
    ControllerCommand,
    NetworkController,
    UnknownAlertError,
    Verb,
)
from .grammar import ParseError, parse_intent
from .kb import (
    EventKind,
    KnowledgeBase,
    KnowledgeBaseError,
    SynonymCollisionError,
    TelemetryEvent,
)
from .model import (
    KindMismatchError,
    ModelError,
    UnknownAssetError,
    UnknownSpotError,
    UnknownUserError,
)
from .policy import (
    CompilationResult,
    Resolution,
    ResolutionKind,
    apply_result,
    compile_intent,
    decide,
    render_policy,
)

logger = logging.getLogger("scintent.service")

KB_DIR_ENV = "SCINTENT_KB_DIR"
TEST_MODE_EPOCH = 1700000000.0

DEFAULT_ANOMALY_RULE = AnomalyRule(threshold=3, window_minutes=60)


class Clock:
    def now(self) -> float:
        return time.time()


class FixedClock(Clock):
    def __init__(self, at: float = TEST_MODE_EPOCH):
        self.at = at

    def now(self) -> float:
        return self.at


# -- request / response schemas -------------------------------------------


class IntentSubmission(BaseModel):
    text: str = Field(min_length=1)
    dry_run: bool = False
    expected_version: int | None = None


class SubmissionResponse(BaseModel):
    parse: dict[str, Any]
    compilation: dict[str, Any] | None
    applied: bool
    rendered_policies: list[list[str]]


class DecisionQuery(BaseModel):
    user: str
    asset: str
    time: str


class DecisionResponse(BaseModel):
    verdict: str
    justification: list[str]
    default_applied: bool


class VocabularyAddition(BaseModel):
    slot: str
    canonical: str
    synonym: str


@dataclass
class ServiceConfig:
    kb_dir: Path
    anomaly_rule: AnomalyRule = DEFAULT_ANOMALY_RULE
    test_mode: bool = False


class GatewayService:
    """Serialized command path over one knowledge base."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.kb = KnowledgeBase.load(config.kb_dir)
        self.clock: Clock = FixedClock() if config.test_mode else Clock()
        self.lock = threading.Lock()
        self.alerts = AlertRegistry()
        self.controller = NetworkController(self.kb.policy_store.get_or_none)
        self.controller.on_enact = self._record_enactment
        self._command_counter = 0
        self._replay_telemetry()
        self.controller.preload(self.kb.policy_store.active(), render_policy)

    def _replay_telemetry(self) -> None:
        """Rebuild alert registry and command counter from the event log."""
        for event in self.kb.telemetry:
            if event.kind is EventKind.ALERT:
                payload = event.payload
                if payload.get("status") == "created":
                    self.alerts.register(
                        AdminAlert(
                            id=payload["alert_id"],
                            admin=payload["admin"],
                            organization=payload["organization"],
                            message=payload["message"],
                            source=payload["source"],
                        )
                    )
                elif payload.get("status") == "acknowledged":
                    alert = self.alerts.get(payload["alert_id"])
                    alert.acknowledged = True
            elif event.kind is EventKind.POLICY_APPLIED:
                self._command_counter += 1

    # -- telemetry helpers -------------------------------------------------

    def _record(self, kind: EventKind, payload: dict[str, Any]) -> None:
        self.kb.record_event(
            TelemetryEvent(timestamp=self.clock.now(), kind=kind, payload=payload)
        )

    def _record_enactment(self, command: ControllerCommand) -> None:
        self._record(
            EventKind.POLICY_APPLIED,
            {
                "command_id": command.command_id,
                "policy_id": command.policy_id,
                "verb": command.verb.value,
            },
        )

    def _next_command_id(self) -> str:
        self._command_counter += 1
        return f"c-{self._command_counter}"

    # -- commands ----------------------------------------------------------

    def submit_intent(self, submission: IntentSubmission) -> SubmissionResponse:
        with self.lock:
            try:
                spec = parse_intent(submission.text, self.kb.vocabulary)
            except ParseError as exc:
                return SubmissionResponse(
                    parse={
                        "error": {
                            "position": exc.position,
                            "expected": exc.expected,
                            "found": exc.found,
                        }
                    },
                    compilation=None,
                    applied=False,
                    rendered_policies=[],
                )
            store = self.kb.policy_store
            if (
                submission.expected_version is not None
                and submission.expected_version != store.version
            ):
                raise HTTPException(
                    status_code=409,
                    detail={
                        "error": "stale-version",
                        "expected": submission.expected_version,
                        "current": store.version,
                    },
                )
            result = compile_intent(spec, self.kb.model, store)
            applied = False
            if not submission.dry_run:
                apply_result(result, store)
                self._commit(submission.text, spec.users, result)
                applied = True
            return SubmissionResponse(
                parse={"intent": spec.to_document()},
                compilation=result.to_document(),
                applied=applied,
                rendered_policies=[render_policy(p) for p in result.programs],
            )

    def _commit(
        self, text: str, users: tuple[str, ...], result: CompilationResult
    ) -> None:
        """Telemetry, alert registration, and controller enactment for one apply."""
        self._record(
            EventKind.INTENT_SUBMITTED,
            {
                "intent_id": result.intent_id,
                "text": text,
                "users": list(users),
                "programs": [p.id for p in result.programs],
            },
        )
        for conflict in result.conflicts:
            self._record(EventKind.CONFLICT, conflict.to_document())
        for alert in result.alerts:
            self.alerts.register(alert)
            self._record(
                EventKind.ALERT,
                {
                    "alert_id": alert.id,
                    "admin": alert.admin,
                    "organization": alert.organization,
                    "message": alert.message,
                    "source": alert.source,
                    "status": "created",
                },
            )
        for command in self._build_commands(result):
            self.controller.enact(command)
        self.kb.save(self.config.kb_dir)
        logger.info(
            "applied intent %s: %d program(s), %d conflict(s)",
            result.intent_id,
            len(result.programs),
            len(result.conflicts),
        )

    def _build_commands(self, result: CompilationResult) -> list[ControllerCommand]:
        commands = []
        for resolution in result.resolutions:
            verb = _resolution_verb(resolution)
            if verb is None:
                continue
            target = self.kb.policy_store.get(resolution.target_policy)
            commands.append(
                ControllerCommand(
                    command_id=self._next_command_id(),
                    policy_id=target.id,
                    verb=verb,
                    rendered_lines=tuple(render_policy(target)),
                )
            )
        for program in result.programs:
            commands.append(
                ControllerCommand(
                    command_id=self._next_command_id(),
                    policy_id=program.id,
                    verb=Verb.INSTALL,
                    rendered_lines=tuple(render_policy(program)),
                )
            )
        return commands

    def query_decision(self, query: DecisionQuery, record: bool) -> DecisionResponse:
        minute = _parse_hhmm(query.time)
        with self.lock:
            decision = decide(
                self.kb.policy_store, self.kb.model, query.user, query.asset, minute
            )
            if record:
                self._record(
                    EventKind.DECISION,
                    {
                        "user": query.user,
                        "asset": query.asset,
                        "minute": minute,
                        "verdict": decision.verdict.value,
                        "justification": list(decision.justification),
                        "default_applied": decision.default_applied,
                        "organization": self.kb.model.asset_path(
                            query.asset
                        ).organization,
                    },
                )
                self.kb.save(self.config.kb_dir)
        return DecisionResponse(**decision.to_document())

    def add_vocabulary(self, addition: VocabularyAddition) -> dict[str, Any]:
        with self.lock:
            added = self.kb.vocab_add(
                addition.slot, addition.canonical, addition.synonym
            )
            if added:
                self.kb.save(self.config.kb_dir)
        return {
            "slot": addition.slot,
            "canonical": addition.canonical,
            "synonym": addition.synonym,
            "status": "added" if added else "exists",
        }

    def acknowledge_alert(self, alert_id: str) -> AdminAlert:
        with self.lock:
            alert = self.alerts.acknowledge(alert_id)
            self._record(
                EventKind.ALERT,
                {
                    "alert_id": alert.id,
                    "admin": alert.admin,
                    "organization": alert.organization,
                    "message": alert.message,
                    "source": alert.source,
                    "status": "acknowledged",
                },
            )
            self.kb.save(self.config.kb_dir)
        return alert

    # -- read surface ------------------------------------------------------

    def policies_document(self) -> list[dict[str, Any]]:
        with self.lock:
            return [
                {**p.to_document(), "lines": render_policy(p)}
                for p in self.kb.policy_store.policies
            ]

    def anomalies(self) -> list[dict[str, Any]]:
        with self.lock:
            flags = anomaly_scan(self.kb.telemetry, self.config.anomaly_rule)
        return [flag.to_document() for flag in flags]


def _resolution_verb(resolution: Resolution) -> Verb | None:
    if resolution.kind is ResolutionKind.CARVE_IN_EXISTING:
        return Verb.AMEND
    if resolution.kind is ResolutionKind.SUPERSEDE:
        return Verb.REVOKE
    return None  # carve-in-new ships with the program's own install


def _parse_hhmm(value: str) -> int:
    parts = value.split(":")
    if len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
        hours, minutes = int(parts[0]), int(parts[1])
        if 0 <= hours <= 23 and 0 <= minutes <= 59:
            return hours * 60 + minutes
    raise HTTPException(
        status_code=400,
        detail={"error": "malformed-time", "value": value, "expected": "HH:MM"},
    )


def create_app(
    kb_dir: str | Path | None = None,
    *,
    test_mode: bool = False,
    anomaly_rule: AnomalyRule | None = None,
) -> FastAPI:
    """Build the gateway application over one knowledge-base directory."""
    if kb_dir is None:
        kb_dir = os.environ.get(KB_DIR_ENV)
    if kb_dir is None:
        raise KnowledgeBaseError(
            f"no knowledge-base directory: pass kb_dir or set {KB_DIR_ENV}"
        )
    config = ServiceConfig(
        kb_dir=Path(kb_dir),
        anomaly_rule=anomaly_rule or DEFAULT_ANOMALY_RULE,
        test_mode=test_mode,
    )
    service = GatewayService(config)
    app = FastAPI(title="scintent gateway", version="0.1.0")
    app.state.service = service
    # the admin console is served from a different origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/intents", response_model=SubmissionResponse)
    def submit_intent(submission: IntentSubmission):
        """Parse, compile, and (unless dry_run) apply one intent sentence."""
        try:
            response = service.submit_intent(submission)
        except (UnknownUserError, UnknownSpotError, KindMismatchError) as exc:
            raise _not_found(exc)
        if "error" in response.parse:
            return JSONResponse(status_code=400, content=response.model_dump())
        return response

    @app.post("/decisions/query", response_model=DecisionResponse)
    def query_decision(
        query: DecisionQuery, x_record: str | None = Header(default=None)
    ):
        """Access verdict for (user, asset, HH:MM); X-Record: true logs it."""
        record = (x_record or "").lower() == "true"
        try:
            return service.query_decision(query, record)
        except (UnknownUserError, UnknownAssetError) as exc:
            raise _not_found(exc)

    @app.get("/policies")
    def get_policies():
        """Every stored policy with its rendered action lines."""
        return service.policies_document()

    @app.get("/alerts")
    def get_alerts(
        admin: str | None = Query(default=None),
        include_acknowledged: bool = Query(default=False),
    ):
        """Pending alerts, optionally restricted to one admin."""
        if admin is not None:
            alerts = service.alerts.pending(admin)
        else:
            alerts = service.alerts.all_alerts(include_acknowledged)
        return [a.to_document() for a in alerts]

    @app.post("/alerts/{alert_id}/ack")
    def ack_alert(alert_id: str):
        """Acknowledge one alert."""
        try:
            return service.acknowledge_alert(alert_id).to_document()
        except UnknownAlertError as exc:
            raise _not_found(exc)
        except AlreadyAcknowledgedError as exc:
            raise HTTPException(
                status_code=409,
                detail={"error": "already-acknowledged", "message": str(exc)},
            )

    @app.get("/hierarchy")
    def get_hierarchy():
        """The supply-chain model document."""
        return service.kb.model.to_document()

    @app.get("/telemetry/anomalies")
    def get_anomalies():
        """Run the anomaly rule over the telemetry log."""
        return service.anomalies()

    @app.post("/vocabulary")
    def add_vocabulary(addition: VocabularyAddition):
        """Bind a new synonym phrase in the intent store."""
        try:
            return service.add_vocabulary(addition)
        except SynonymCollisionError as exc:
            raise HTTPException(
                status_code=409,
                detail={"error": "synonym-collision", "message": str(exc)},
            )

    @app.get("/debug/enforcement")
    def get_enforcement():
        """Simulated enforcement table (install/revoke/amend outcome)."""
        return service.controller.table_document()

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "store_version": service.kb.policy_store.version,
            "policies": len(service.kb.policy_store.policies),
            "test_mode": service.config.test_mode,
        }

    return app


def _not_found(exc: ModelError | Exception) -> HTTPException:
    return HTTPException(status_code=404, detail={"error": "not-found", "message": str(exc)})
