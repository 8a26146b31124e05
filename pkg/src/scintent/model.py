"""Supply-chain hierarchy: organizations contain realms, realms contain domains,
domains hold assets. The model is immutable after load and answers scope
containment, asset enumeration, and admin routing queries."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

IDENTIFIER_RE = re.compile(r"^[a-z0-9-]+$")


class ModelError(Exception):
    """Base class for hierarchy model errors."""


class ModelLoadError(ModelError):
    """Hierarchy document is malformed or violates a model invariant."""


class UnknownSpotError(ModelError):
    """No node with the requested identifier exists."""


class KindMismatchError(ModelError):
    """A node with the identifier exists, but with a different kind."""


class UnknownUserError(ModelError):
    """User identifier absent from the registry."""


class UnknownAssetError(ModelError):
    """Asset identifier absent from the model."""


class ScopeKind(str, Enum):
    ORGANIZATION = "organization"
    REALM = "realm"
    DOMAIN = "domain"


# Depth of each kind in an ancestry chain; also its specificity rank.
KIND_DEPTH: dict[ScopeKind, int] = {
    ScopeKind.ORGANIZATION: 0,
    ScopeKind.REALM: 1,
    ScopeKind.DOMAIN: 2,
}

_CHILD_KIND: dict[ScopeKind, ScopeKind | None] = {
    ScopeKind.ORGANIZATION: ScopeKind.REALM,
    ScopeKind.REALM: ScopeKind.DOMAIN,
    ScopeKind.DOMAIN: None,
}


@dataclass(frozen=True)
class ScopePath:
    """Canonical address of a node: its kind, id, and the id chain from the
    organization down to the node itself."""

    kind: ScopeKind
    node_id: str
    ancestry: tuple[str, ...]

    @property
    def depth(self) -> int:
        return KIND_DEPTH[self.kind]

    @property
    def organization(self) -> str:
        return self.ancestry[0]

    def contains(self, inner: ScopePath) -> bool:
        """True when this node is an ancestor of ``inner`` (or the same node)."""
        depth = self.depth
        return len(inner.ancestry) > depth and inner.ancestry[depth] == self.node_id


@dataclass(frozen=True)
class AssetRecord:
    id: str
    description: str = ""


@dataclass(frozen=True)
class UserRecord:
    id: str
    display_name: str = ""


@dataclass
class ScopeNode:
    id: str
    kind: ScopeKind
    children: list[ScopeNode] = field(default_factory=list)
    assets: list[AssetRecord] = field(default_factory=list)
    admin: str | None = None


_NODE_KEYS = {"id", "kind", "admin", "children", "assets"}


class HierarchyModel:
    """Validated, indexed view of one hierarchy document.

    Node and asset identifiers are unique model-wide, so a bare spot
    identifier addresses exactly one node.
    """

    def __init__(self, organizations: list[ScopeNode], users: list[UserRecord]):
        self.organizations = organizations
        self.users = users
        self._users: dict[str, UserRecord] = {}
        self._paths: dict[str, ScopePath] = {}
        self._nodes: dict[str, ScopeNode] = {}
        self._assets: dict[str, tuple[AssetRecord, ScopePath]] = {}
        self._index()

    # -- construction ------------------------------------------------------

    def _index(self) -> None:
        for user in self.users:
            _check_identifier(user.id, "user")
            if user.id in self._users:
                raise ModelLoadError(f"duplicate user identifier '{user.id}'")
            self._users[user.id] = user
        for org in self.organizations:
            self._index_node(org, ())

    def _index_node(self, node: ScopeNode, ancestors: tuple[str, ...]) -> None:
        _check_identifier(node.id, node.kind.value)
        if node.id in self._nodes:
            raise ModelLoadError(f"duplicate node identifier '{node.id}'")
        if node.kind is ScopeKind.ORGANIZATION:
            if not node.admin:
                raise ModelLoadError(f"organization '{node.id}' has no admin")
            _check_identifier(node.admin, "admin")
        elif node.admin is not None:
            raise ModelLoadError(
                f"{node.kind.value} '{node.id}' carries an admin; only organizations do"
            )
        if node.assets and node.kind is not ScopeKind.DOMAIN:
            raise ModelLoadError(
                f"{node.kind.value} '{node.id}' holds assets; only domains do"
            )
        path = ScopePath(node.kind, node.id, ancestors + (node.id,))
        self._nodes[node.id] = node
        self._paths[node.id] = path
        for asset in node.assets:
            _check_identifier(asset.id, "asset")
            if asset.id in self._assets:
                raise ModelLoadError(f"duplicate asset identifier '{asset.id}'")
            self._assets[asset.id] = (asset, path)
        child_kind = _CHILD_KIND[node.kind]
        if node.children and child_kind is None:
            raise ModelLoadError(f"domain '{node.id}' must not have children")
        for child in node.children:
            if child.kind is not child_kind:
                raise ModelLoadError(
                    f"node '{child.id}' of kind {child.kind.value} cannot be a child "
                    f"of {node.kind.value} '{node.id}'"
                )
            self._index_node(child, path.ancestry)

    @classmethod
    def from_document(cls, document: Any) -> HierarchyModel:
        if not isinstance(document, dict):
            raise ModelLoadError("hierarchy document must be a JSON object")
        unknown = set(document) - {"organizations", "users"}
        if unknown:
            raise ModelLoadError(f"unknown hierarchy fields: {sorted(unknown)}")
        orgs_doc = document.get("organizations", [])
        users_doc = document.get("users", [])
        if not isinstance(orgs_doc, list) or not isinstance(users_doc, list):
            raise ModelLoadError("'organizations' and 'users' must be lists")
        organizations = [_node_from_document(item, ScopeKind.ORGANIZATION) for item in orgs_doc]
        users = [_user_from_document(item) for item in users_doc]
        return cls(organizations, users)

    def to_document(self) -> dict[str, Any]:
        return {
            "organizations": [_node_to_document(org) for org in self.organizations],
            "users": [
                {"id": u.id, "display_name": u.display_name} for u in self.users
            ],
        }

    # -- queries -----------------------------------------------------------

    def resolve_spot(self, kind: ScopeKind, spot: str) -> ScopePath:
        """Resolve a spot identifier to its path, checking the declared kind."""
        path = self._paths.get(spot)
        if path is None:
            raise UnknownSpotError(f"unknown spot '{spot}'")
        if path.kind is not kind:
            raise KindMismatchError(
                f"spot '{spot}' is a {path.kind.value}, not a {kind.value}"
            )
        return path

    def path_of(self, node_id: str) -> ScopePath:
        path = self._paths.get(node_id)
        if path is None:
            raise UnknownSpotError(f"unknown spot '{node_id}'")
        return path

    def scope_contains(self, outer: ScopePath, inner: ScopePath) -> bool:
        return outer.contains(inner)

    def assets_under(self, scope: ScopePath) -> list[AssetRecord]:
        """All assets transitively under the scope, sorted by id."""
        found = [
            asset
            for asset, domain_path in self._assets.values()
            if scope.contains(domain_path)
        ]
        return sorted(found, key=lambda a: a.id)

    def admin_of(self, scope: ScopePath) -> str:
        admin = self._nodes[scope.organization].admin
        assert admin is not None  # guaranteed at load
        return admin

    def all_paths(self) -> list[ScopePath]:
        return list(self._paths.values())

    def get_user(self, user_id: str) -> UserRecord:
        user = self._users.get(user_id)
        if user is None:
            raise UnknownUserError(f"unknown user '{user_id}'")
        return user

    def has_user(self, user_id: str) -> bool:
        return user_id in self._users

    def asset_path(self, asset_id: str) -> ScopePath:
        """Path of the domain that owns the asset."""
        entry = self._assets.get(asset_id)
        if entry is None:
            raise UnknownAssetError(f"unknown asset '{asset_id}'")
        return entry[1]

    def get_asset(self, asset_id: str) -> AssetRecord:
        entry = self._assets.get(asset_id)
        if entry is None:
            raise UnknownAssetError(f"unknown asset '{asset_id}'")
        return entry[0]

    def asset_ids(self) -> list[str]:
        return sorted(self._assets)


def load_model(document: Any) -> HierarchyModel:
    """Build a validated model from a hierarchy document (parsed JSON)."""
    return HierarchyModel.from_document(document)


def _check_identifier(value: Any, what: str) -> None:
    if not isinstance(value, str) or not IDENTIFIER_RE.match(value):
        raise ModelLoadError(f"malformed {what} identifier {value!r}")


def _node_from_document(item: Any, expected_kind: ScopeKind) -> ScopeNode:
    if not isinstance(item, dict):
        raise ModelLoadError("hierarchy node must be a JSON object")
    unknown = set(item) - _NODE_KEYS
    if unknown:
        raise ModelLoadError(f"unknown node fields: {sorted(unknown)}")
    kind_value = item.get("kind")
    try:
        kind = ScopeKind(kind_value)
    except ValueError:
        raise ModelLoadError(f"unknown node kind {kind_value!r}") from None
    if kind is not expected_kind:
        raise ModelLoadError(
            f"node '{item.get('id')}' has kind {kind.value}; expected {expected_kind.value}"
        )
    child_kind = _CHILD_KIND[kind]
    children_doc = item.get("children", [])
    if not isinstance(children_doc, list):
        raise ModelLoadError("'children' must be a list")
    children = []
    if children_doc:
        if child_kind is None:
            raise ModelLoadError(f"domain '{item.get('id')}' must not have children")
        children = [_node_from_document(child, child_kind) for child in children_doc]
    assets_doc = item.get("assets", [])
    if not isinstance(assets_doc, list):
        raise ModelLoadError("'assets' must be a list")
    assets = [_asset_from_document(a) for a in assets_doc]
    return ScopeNode(
        id=item.get("id", ""),
        kind=kind,
        children=children,
        assets=assets,
        admin=item.get("admin"),
    )


def _asset_from_document(item: Any) -> AssetRecord:
    if not isinstance(item, dict):
        raise ModelLoadError("asset must be a JSON object")
    unknown = set(item) - {"id", "description"}
    if unknown:
        raise ModelLoadError(f"unknown asset fields: {sorted(unknown)}")
    return AssetRecord(id=item.get("id", ""), description=item.get("description", ""))


def _user_from_document(item: Any) -> UserRecord:
    if not isinstance(item, dict):
        raise ModelLoadError("user must be a JSON object")
    unknown = set(item) - {"id", "display_name"}
    if unknown:
        raise ModelLoadError(f"unknown user fields: {sorted(unknown)}")
    return UserRecord(id=item.get("id", ""), display_name=item.get("display_name", ""))


def _node_to_document(node: ScopeNode) -> dict[str, Any]:
    doc: dict[str, Any] = {"id": node.id, "kind": node.kind.value}
    if node.admin is not None:
        doc["admin"] = node.admin
    if node.children:
        doc["children"] = [_node_to_document(child) for child in node.children]
    if node.assets:
        doc["assets"] = [
            {"id": a.id, "description": a.description} for a in node.assets
        ]
    return doc
