"""Simulated network controller and admin alert delivery.

The controller keeps an in-memory enforcement table keyed by policy id and
processes install / revoke / amend commands in submission order, with the
same API shape a real southbound client would expose. Alerts are pull-based:
they sit in a registry until an administrator acknowledges them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Callable

if TYPE_CHECKING:
    from .policy import PolicyProgram


class ControllerError(Exception):
    """Base class for controller and alert errors."""


class UnknownPolicyError(ControllerError):
    """Command references a policy that does not exist or is not installed."""


class DuplicateCommandError(ControllerError):
    """Command id was already processed."""


class DuplicateInstallError(ControllerError):
    """Policy is already present in the enforcement table."""


class UnknownAlertError(ControllerError):
    """No alert with that id."""


class AlreadyAcknowledgedError(ControllerError):
    """Alert was acknowledged before."""


class Verb(str, Enum):
    INSTALL = "install"
    REVOKE = "revoke"
    AMEND = "amend"


@dataclass(frozen=True)
class ControllerCommand:
    command_id: str
    policy_id: str
    verb: Verb
    rendered_lines: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.rendered_lines:
            raise ValueError("controller command carries no rendered lines")


@dataclass(frozen=True)
class Acknowledgment:
    command_id: str
    status: str


@dataclass
class EnforcementEntry:
    policy_id: str
    user: str
    effect: str
    spot: str
    rendered_lines: tuple[str, ...]

    def to_document(self) -> dict[str, Any]:
        return {
            "policy_id": self.policy_id,
            "user": self.user,
            "effect": self.effect,
            "spot": self.spot,
            "lines": list(self.rendered_lines),
        }


class NetworkController:
    """In-process stand-in for the southbound controller API."""

    def __init__(self, lookup: Callable[[str], "PolicyProgram | None"]):
        self._lookup = lookup
        self._table: dict[str, EnforcementEntry] = {}
        self._seen_commands: set[str] = set()
        self.on_enact: Callable[[ControllerCommand], None] | None = None

    def enact(self, command: ControllerCommand) -> Acknowledgment:
        """Apply one command to the enforcement table."""
        if command.command_id in self._seen_commands:
            raise DuplicateCommandError(f"command '{command.command_id}' already processed")
        program = self._lookup(command.policy_id)
        if program is None:
            raise UnknownPolicyError(f"unknown policy '{command.policy_id}'")
        if command.verb is Verb.INSTALL:
            if command.policy_id in self._table:
                raise DuplicateInstallError(
                    f"policy '{command.policy_id}' is already installed"
                )
        elif command.policy_id not in self._table:
            raise UnknownPolicyError(
                f"policy '{command.policy_id}' is not installed; cannot {command.verb.value}"
            )
        entry = EnforcementEntry(
            policy_id=program.id,
            user=program.user,
            effect=program.effect.value,
            spot=program.scope.node_id,
            rendered_lines=command.rendered_lines,
        )
        if command.verb is Verb.REVOKE:
            del self._table[command.policy_id]
        else:
            self._table[command.policy_id] = entry
        self._seen_commands.add(command.command_id)
        if self.on_enact is not None:
            self.on_enact(command)
        return Acknowledgment(command_id=command.command_id, status="applied")

    def preload(self, programs: list["PolicyProgram"], lines: Callable[["PolicyProgram"], list[str]]) -> None:
        """Rebuild the table from already-active policies (startup path)."""
        for program in programs:
            self._table[program.id] = EnforcementEntry(
                policy_id=program.id,
                user=program.user,
                effect=program.effect.value,
                spot=program.scope.node_id,
                rendered_lines=tuple(lines(program)),
            )

    def installed(self, policy_id: str) -> EnforcementEntry | None:
        return self._table.get(policy_id)

    def table_document(self) -> list[dict[str, Any]]:
        return [
            self._table[pid].to_document() for pid in sorted(self._table)
        ]


@dataclass
class AdminAlert:
    admin: str
    organization: str
    message: str
    source: str
    id: str = ""
    acknowledged: bool = False

    def to_document(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "admin": self.admin,
            "organization": self.organization,
            "message": self.message,
            "source": self.source,
            "acknowledged": self.acknowledged,
        }


class AlertRegistry:
    """Ordered store of admin alerts; ids are assigned at registration."""

    def __init__(self) -> None:
        self._alerts: dict[str, AdminAlert] = {}
        self._counter = 0

    def register(self, alert: AdminAlert) -> AdminAlert:
        if not alert.id:
            self._counter += 1
            alert.id = f"a-{self._counter}"
        else:
            seq = _alert_seq(alert.id)
            if seq is not None:
                self._counter = max(self._counter, seq)
        self._alerts[alert.id] = alert
        return alert

    def pending(self, admin: str) -> list[AdminAlert]:
        """Unacknowledged alerts for one admin, oldest first."""
        return [
            a for a in self._alerts.values() if a.admin == admin and not a.acknowledged
        ]

    def all_alerts(self, include_acknowledged: bool = False) -> list[AdminAlert]:
        return [
            a
            for a in self._alerts.values()
            if include_acknowledged or not a.acknowledged
        ]

    def get(self, alert_id: str) -> AdminAlert:
        alert = self._alerts.get(alert_id)
        if alert is None:
            raise UnknownAlertError(f"unknown alert '{alert_id}'")
        return alert

    def acknowledge(self, alert_id: str) -> AdminAlert:
        alert = self.get(alert_id)
        if alert.acknowledged:
            raise AlreadyAcknowledgedError(f"alert '{alert_id}' was already acknowledged")
        alert.acknowledged = True
        return alert


def _alert_seq(alert_id: str) -> int | None:
    if alert_id.startswith("a-") and alert_id[2:].isdigit():
        return int(alert_id[2:])
    return None
