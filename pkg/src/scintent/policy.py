"""Policy compilation, conflict resolution, and access decisions.

An intent fans out to one policy program per user. Each program is an
ordered action list: check the user, allow or block access to the assets
under a scope (minus carved exceptions), and alert the owning
organization's admin. Compilation is a pure proposal over a store snapshot;
nothing is persisted until :func:`apply`, which is guarded by an optimistic
version check.

Conflict handling generalizes the narrower-scope-wins scenario: when a new
policy overlaps an opposite-effect stored policy for the same user on at
least one shift, the narrower scope is carved out of the broader policy as
an exception, and equal scopes resolve by supersession (newer wins). Every
resolution queues an alert to the admin of the candidate's organization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .controller import AdminAlert
from .grammar import IntentSpec, Permission, Shift, shift_of, sorted_shifts
from .model import KIND_DEPTH, HierarchyModel, ScopeKind, ScopePath


class PolicyError(Exception):
    """Base class for policy engine errors."""


class StaleVersionError(PolicyError):
    """Compilation ran against an older store version; recompile."""


class UnknownPolicyIdError(PolicyError):
    """No policy with that id in the store."""


class ActionKind(str, Enum):
    CHECK_USER = "check-user"
    ALLOW_ACCESS = "allow-access"
    BLOCK_ACCESS = "block-access"
    ALERT_ADMIN = "alert-admin"


class PolicyStatus(str, Enum):
    ACTIVE = "active"
    SUPERSEDED = "superseded"


class Relation(str, Enum):
    EXISTING_INSIDE_NEW = "existing-inside-new"
    NEW_INSIDE_EXISTING = "new-inside-existing"
    EQUAL_SCOPE = "equal-scope"


class ResolutionKind(str, Enum):
    CARVE_IN_NEW = "carve-exception-in-new"
    CARVE_IN_EXISTING = "carve-exception-in-existing"
    SUPERSEDE = "supersede-existing"


class Verdict(str, Enum):
    ALLOWED = "allowed"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class PolicyAction:
    kind: ActionKind
    user: str | None = None
    scope: ScopePath | None = None
    exception_scopes: tuple[ScopePath, ...] = ()
    organization: str | None = None


@dataclass
class ExceptionEntry:
    """A scope carved out of a policy over a set of shifts."""

    scope: ScopePath
    timeframes: frozenset[Shift]

    def __post_init__(self) -> None:
        if not self.timeframes:
            raise ValueError("exception entry with empty timeframes")

    def covers(self, path: ScopePath, shift: Shift) -> bool:
        return shift in self.timeframes and self.scope.contains(path)

    def to_document(self) -> dict[str, Any]:
        return {
            "spot": self.scope.node_id,
            "shifts": [s.value for s in sorted_shifts(self.timeframes)],
        }


@dataclass(frozen=True)
class Provenance:
    intent_id: str
    seq: int


@dataclass
class PolicyProgram:
    id: str
    user: str
    effect: Permission
    scope: ScopePath
    timeframes: frozenset[Shift]
    provenance: Provenance
    exceptions: list[ExceptionEntry] = field(default_factory=list)
    status: PolicyStatus = PolicyStatus.ACTIVE

    @property
    def seq(self) -> int:
        return self.provenance.seq

    @property
    def specificity(self) -> int:
        return KIND_DEPTH[self.scope.kind]

    @property
    def actions(self) -> list[PolicyAction]:
        """check-user, then the effect on the scope, then alert-admin."""
        effect_kind = (
            ActionKind.ALLOW_ACCESS
            if self.effect is Permission.ALLOW
            else ActionKind.BLOCK_ACCESS
        )
        exception_scopes = tuple(
            e.scope for e in sorted(self.exceptions, key=lambda e: e.scope.node_id)
        )
        return [
            PolicyAction(ActionKind.CHECK_USER, user=self.user),
            PolicyAction(
                effect_kind,
                user=self.user,
                scope=self.scope,
                exception_scopes=exception_scopes,
            ),
            PolicyAction(ActionKind.ALERT_ADMIN, organization=self.scope.organization),
        ]

    def add_exception(self, entry: ExceptionEntry) -> None:
        """Merge by scope: carving the same scope again unions the shifts."""
        if not self.scope.contains(entry.scope) or entry.scope.node_id == self.scope.node_id:
            raise ValueError(
                f"exception scope '{entry.scope.node_id}' is not strictly inside "
                f"policy scope '{self.scope.node_id}'"
            )
        for existing in self.exceptions:
            if existing.scope.node_id == entry.scope.node_id:
                existing.timeframes = existing.timeframes | entry.timeframes
                return
        self.exceptions.append(entry)

    def applies_to(self, path: ScopePath, shift: Shift) -> bool:
        """Does this program govern an asset at ``path`` during ``shift``?"""
        if self.status is not PolicyStatus.ACTIVE:
            return False
        if shift not in self.timeframes or not self.scope.contains(path):
            return False
        return not any(e.covers(path, shift) for e in self.exceptions)

    def to_document(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "user": self.user,
            "effect": self.effect.value,
            "scope": {"kind": self.scope.kind.value, "spot": self.scope.node_id},
            "exceptions": [
                e.to_document()
                for e in sorted(self.exceptions, key=lambda e: e.scope.node_id)
            ],
            "shifts": [s.value for s in sorted_shifts(self.timeframes)],
            "status": self.status.value,
            "provenance": {
                "intent_id": self.provenance.intent_id,
                "seq": self.provenance.seq,
            },
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any], model: HierarchyModel) -> PolicyProgram:
        scope = model.resolve_spot(
            ScopeKind(doc["scope"]["kind"]), doc["scope"]["spot"]
        )
        exceptions = [
            ExceptionEntry(
                scope=model.path_of(e["spot"]),
                timeframes=frozenset(Shift(s) for s in e["shifts"]),
            )
            for e in doc.get("exceptions", [])
        ]
        return cls(
            id=doc["id"],
            user=doc["user"],
            effect=Permission(doc["effect"]),
            scope=scope,
            timeframes=frozenset(Shift(s) for s in doc["shifts"]),
            provenance=Provenance(
                intent_id=doc["provenance"]["intent_id"],
                seq=int(doc["provenance"]["seq"]),
            ),
            exceptions=exceptions,
            status=PolicyStatus(doc["status"]),
        )


@dataclass(frozen=True)
class Conflict:
    new_intent: str
    existing_policy: str
    relation: Relation
    overlapping_shifts: frozenset[Shift]

    def to_document(self) -> dict[str, Any]:
        return {
            "new_intent": self.new_intent,
            "existing_policy": self.existing_policy,
            "relation": self.relation.value,
            "overlapping_shifts": [
                s.value for s in sorted_shifts(self.overlapping_shifts)
            ],
        }


@dataclass(frozen=True)
class Resolution:
    kind: ResolutionKind
    target_policy: str
    exception: ExceptionEntry | None = None

    def to_document(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "target_policy": self.target_policy,
            "exception": self.exception.to_document() if self.exception else None,
        }


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    justification: tuple[str, ...]
    default_applied: bool

    def to_document(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "justification": list(self.justification),
            "default_applied": self.default_applied,
        }


class PolicyStore:
    """Ordered policy collection with an optimistic version counter."""

    def __init__(self, policies: list[PolicyProgram] | None = None, version: int = 0):
        self.policies: list[PolicyProgram] = list(policies or [])
        self.version = version
        self._by_id = {p.id: p for p in self.policies}

    @property
    def next_seq(self) -> int:
        return max((p.seq for p in self.policies), default=0) + 1

    def get(self, policy_id: str) -> PolicyProgram:
        program = self._by_id.get(policy_id)
        if program is None:
            raise UnknownPolicyIdError(f"unknown policy '{policy_id}'")
        return program

    def get_or_none(self, policy_id: str) -> PolicyProgram | None:
        return self._by_id.get(policy_id)

    def active(self) -> list[PolicyProgram]:
        return [p for p in self.policies if p.status is PolicyStatus.ACTIVE]

    def add(self, program: PolicyProgram) -> None:
        if program.id in self._by_id:
            raise PolicyError(f"policy id '{program.id}' already present")
        self.policies.append(program)
        self._by_id[program.id] = program

    def to_document(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "policies": [p.to_document() for p in self.policies],
        }

    @classmethod
    def from_document(cls, document: Any, model: HierarchyModel) -> PolicyStore:
        if not isinstance(document, dict):
            raise PolicyError("policy-store document must be a JSON object")
        unknown = set(document) - {"version", "policies"}
        if unknown:
            raise PolicyError(f"unknown policy-store fields: {sorted(unknown)}")
        policies = [
            PolicyProgram.from_document(p, model) for p in document.get("policies", [])
        ]
        return cls(policies, version=int(document.get("version", 0)))


@dataclass
class CompilationResult:
    """Pure proposal: programs plus the conflict work needed to admit them."""

    intent_id: str
    base_version: int
    programs: list[PolicyProgram]
    conflicts: list[Conflict]
    resolutions: list[Resolution]
    alerts: list[AdminAlert]

    def to_document(self) -> dict[str, Any]:
        return {
            "intent_id": self.intent_id,
            "base_version": self.base_version,
            "programs": [p.to_document() for p in self.programs],
            "conflicts": [c.to_document() for c in self.conflicts],
            "resolutions": [r.to_document() for r in self.resolutions],
            "alerts": [a.to_document() for a in self.alerts],
        }


def detect_conflicts(candidate: PolicyProgram, store: PolicyStore) -> list[Conflict]:
    """Conflicts between a candidate and the active policies of its user.

    A stored policy conflicts when it has the opposite effect, overlaps on at
    least one shift, and its scope equals, contains, or is contained by the
    candidate's scope. Disjoint scopes or disjoint shifts never conflict.
    """
    conflicts = []
    for policy in store.active():
        if policy.user != candidate.user or policy.effect is candidate.effect:
            continue
        overlap = policy.timeframes & candidate.timeframes
        if not overlap:
            continue
        if policy.scope.node_id == candidate.scope.node_id:
            relation = Relation.EQUAL_SCOPE
        elif candidate.scope.contains(policy.scope):
            relation = Relation.EXISTING_INSIDE_NEW
        elif policy.scope.contains(candidate.scope):
            relation = Relation.NEW_INSIDE_EXISTING
        else:
            continue
        conflicts.append(
            Conflict(
                new_intent=candidate.provenance.intent_id,
                existing_policy=policy.id,
                relation=relation,
                overlapping_shifts=overlap,
            )
        )
    return conflicts


def resolve_conflict(
    conflict: Conflict, candidate: PolicyProgram, store: PolicyStore
) -> Resolution:
    """Resolution rule per scope relation.

    existing-inside-new  -> carve the existing scope out of the new policy
    new-inside-existing  -> carve the new scope out of the existing policy
    equal-scope          -> supersede the existing policy (newer wins)

    Carves cover only the overlapping shifts, so a partially overlapping
    timeframe leaves the non-overlapping shifts untouched.
    """
    if conflict.relation is Relation.EXISTING_INSIDE_NEW:
        existing = store.get(conflict.existing_policy)
        return Resolution(
            kind=ResolutionKind.CARVE_IN_NEW,
            target_policy=candidate.id,
            exception=ExceptionEntry(existing.scope, conflict.overlapping_shifts),
        )
    if conflict.relation is Relation.NEW_INSIDE_EXISTING:
        return Resolution(
            kind=ResolutionKind.CARVE_IN_EXISTING,
            target_policy=conflict.existing_policy,
            exception=ExceptionEntry(candidate.scope, conflict.overlapping_shifts),
        )
    return Resolution(
        kind=ResolutionKind.SUPERSEDE,
        target_policy=conflict.existing_policy,
    )


def compile_intent(
    spec: IntentSpec, model: HierarchyModel, store: PolicyStore
) -> CompilationResult:
    """Compile one intent into per-user policy programs plus conflict work.

    Ids are assigned from the store's sequence counter; the optimistic
    version check in :func:`apply` guarantees they are still fresh when the
    result is committed.
    """
    for user in spec.users:
        model.get_user(user)
    scope = model.resolve_spot(spec.scope_kind, spec.spot)
    admin = model.admin_of(scope)

    seq = store.next_seq
    intent_id = f"i-{seq}"
    programs: list[PolicyProgram] = []
    conflicts: list[Conflict] = []
    resolutions: list[Resolution] = []
    alerts: list[AdminAlert] = []
    for user in spec.users:
        candidate = PolicyProgram(
            id=f"p-{seq}",
            user=user,
            effect=spec.permission,
            scope=scope,
            timeframes=spec.timeframes,
            provenance=Provenance(intent_id=intent_id, seq=seq),
        )
        seq += 1
        for conflict in detect_conflicts(candidate, store):
            resolution = resolve_conflict(conflict, candidate, store)
            if resolution.kind is ResolutionKind.CARVE_IN_NEW:
                assert resolution.exception is not None
                candidate.add_exception(
                    ExceptionEntry(
                        resolution.exception.scope,
                        resolution.exception.timeframes,
                    )
                )
            conflicts.append(conflict)
            resolutions.append(resolution)
            alerts.append(
                AdminAlert(
                    admin=admin,
                    organization=scope.organization,
                    message=(
                        f"intent {intent_id} conflicts with policy "
                        f"{conflict.existing_policy} ({conflict.relation.value}); "
                        f"resolved by {resolution.kind.value}"
                    ),
                    source=intent_id,
                )
            )
        programs.append(candidate)
    return CompilationResult(
        intent_id=intent_id,
        base_version=store.version,
        programs=programs,
        conflicts=conflicts,
        resolutions=resolutions,
        alerts=alerts,
    )


def apply_result(result: CompilationResult, store: PolicyStore) -> PolicyStore:
    """Commit a compilation result; fails when the store moved on."""
    if result.base_version != store.version:
        raise StaleVersionError(
            f"result was compiled against version {result.base_version}, "
            f"store is at {store.version}"
        )
    for resolution in result.resolutions:
        if resolution.kind is ResolutionKind.CARVE_IN_EXISTING:
            assert resolution.exception is not None
            store.get(resolution.target_policy).add_exception(
                ExceptionEntry(
                    resolution.exception.scope, resolution.exception.timeframes
                )
            )
        elif resolution.kind is ResolutionKind.SUPERSEDE:
            store.get(resolution.target_policy).status = PolicyStatus.SUPERSEDED
    for program in result.programs:
        store.add(program)
    store.version += 1
    return store


def decide(
    store: PolicyStore,
    model: HierarchyModel,
    user: str,
    asset: str,
    minute: int,
) -> Decision:
    """Verdict for (user, asset, minute of day), defaulting to blocked.

    Among active policies that govern the asset's domain at that minute's
    shift, the most specific scope wins (domain > realm > organization);
    recency (sequence number) breaks ties.
    """
    model.get_user(user)
    path = model.asset_path(asset)
    shift = shift_of(minute)
    applicable = [
        p
        for p in store.active()
        if p.user == user and p.applies_to(path, shift)
    ]
    applicable.sort(key=lambda p: (p.specificity, p.seq), reverse=True)
    if not applicable:
        return Decision(Verdict.BLOCKED, (), default_applied=True)
    verdict = (
        Verdict.ALLOWED
        if applicable[0].effect is Permission.ALLOW
        else Verdict.BLOCKED
    )
    return Decision(verdict, tuple(p.id for p in applicable), default_applied=False)


def render_policy(program: PolicyProgram) -> list[str]:
    """Human-readable policy listing, one line per action."""
    lines = []
    for action in program.actions:
        if action.kind is ActionKind.CHECK_USER:
            lines.append(f"check {action.user} in database of Users")
        elif action.kind in (ActionKind.ALLOW_ACCESS, ActionKind.BLOCK_ACCESS):
            verb = "allow" if action.kind is ActionKind.ALLOW_ACCESS else "block"
            assert action.scope is not None
            line = f"{verb} {action.user} to access assets in {action.scope.node_id}"
            if action.exception_scopes:
                spots = ", ".join(s.node_id for s in action.exception_scopes)
                line += f" except {spots}"
            lines.append(line)
        else:
            lines.append(f"alert admin in {action.organization}")
    return lines
