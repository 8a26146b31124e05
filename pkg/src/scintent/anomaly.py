"""Threshold-based scan of decision telemetry for users who should be blocked.

A deterministic stand-in for a learned behavioral model: a user who
accumulates ``threshold`` blocked decisions within a sliding window of
``window_minutes`` gets flagged once per scan, together with a ready-to-use
block intent for the organization the user was hammering. Suggestions are
advisory; nothing is auto-applied.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable

from .grammar import ALL_SHIFTS, IntentSpec, Permission, render_intent
from .kb import EventKind, TelemetryEvent
from .model import ScopeKind


@dataclass(frozen=True)
class AnomalyRule:
    threshold: int
    window_minutes: int

    def __post_init__(self) -> None:
        if self.threshold < 1:
            raise ValueError("anomaly threshold must be >= 1")
        if self.window_minutes < 1:
            raise ValueError("anomaly window must be >= 1 minute")


@dataclass(frozen=True)
class AnomalyFlag:
    user: str
    count: int
    window_end: float
    organization: str
    suggested_intent: str

    def to_document(self) -> dict[str, Any]:
        return {
            "user": self.user,
            "count": self.count,
            "window_end": self.window_end,
            "organization": self.organization,
            "suggested_intent": self.suggested_intent,
        }


def suggest_block_intent(flag: AnomalyFlag) -> str:
    """Canonical block intent for the flagged user's organization."""
    return _suggestion(flag.user, flag.organization)


def _suggestion(user: str, organization: str) -> str:
    return render_intent(
        IntentSpec(
            users=(user,),
            permission=Permission.BLOCK,
            scope_kind=ScopeKind.ORGANIZATION,
            spot=organization,
            timeframes=ALL_SHIFTS,
        )
    )


def anomaly_scan(
    events: Iterable[TelemetryEvent], rule: AnomalyRule
) -> list[AnomalyFlag]:
    """One flag per user whose blocked decisions fill a window.

    Events must be timestamp-ordered. For each user the earliest window of
    ``window_minutes`` (anchored at a blocked decision, inclusive at both
    ends) holding at least ``threshold`` blocked decisions produces the
    flag; the flag counts every blocked decision inside that window and
    suggests blocking the user's most-hit organization there.
    """
    window = rule.window_minutes * 60.0
    per_user: dict[str, list[TelemetryEvent]] = {}
    for event in events:
        if event.kind is not EventKind.DECISION:
            continue
        if event.payload.get("verdict") != "blocked":
            continue
        per_user.setdefault(event.payload["user"], []).append(event)

    flags = []
    for user in sorted(per_user):
        hits = per_user[user]
        times = [e.timestamp for e in hits]
        for i in range(len(hits) - rule.threshold + 1):
            if times[i + rule.threshold - 1] - times[i] <= window:
                window_end = times[i] + window
                in_window = [
                    e for e in hits[i:] if e.timestamp <= window_end
                ]
                orgs = Counter(
                    e.payload["organization"]
                    for e in in_window
                    if "organization" in e.payload
                )
                # most-hit organization; ties break on id for determinism
                organization = min(orgs, key=lambda o: (-orgs[o], o))
                flags.append(
                    AnomalyFlag(
                        user=user,
                        count=len(in_window),
                        window_end=window_end,
                        organization=organization,
                        suggested_intent=_suggestion(user, organization),
                    )
                )
                break
    return flags
