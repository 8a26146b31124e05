from __future__ import annotations

import random

import pytest

from scintent.model import (
    HierarchyModel,
    KindMismatchError,
    ModelLoadError,
    ScopeKind,
    UnknownAssetError,
    UnknownSpotError,
    UnknownUserError,
    load_model,
)
from table_oracle import random_model_document


def test_demo_model_shape(model):
    assert len(model.organizations) == 1
    realm_ids = {p.node_id for p in model.all_paths() if p.kind is ScopeKind.REALM}
    assert realm_ids == {"o1-r1", "o1-r2"}
    assert model.has_user("user-x")
    assert model.asset_ids() == ["asset-11", "asset-12", "asset-21", "asset-22"]


def test_empty_model_is_valid():
    model = load_model({"organizations": [], "users": []})
    assert model.all_paths() == []
    assert model.asset_ids() == []


def test_duplicate_node_id_across_organizations_rejected():
    doc = {
        "organizations": [
            {
                "id": "o1",
                "kind": "organization",
                "admin": "a1",
                "children": [{"id": "o1-r1", "kind": "realm"}],
            },
            {
                "id": "o2",
                "kind": "organization",
                "admin": "a2",
                "children": [{"id": "o1-r1", "kind": "realm"}],
            },
        ],
        "users": [],
    }
    with pytest.raises(ModelLoadError, match="duplicate"):
        load_model(doc)


def test_duplicate_asset_and_user_ids_rejected():
    doc = {
        "organizations": [
            {
                "id": "o1",
                "kind": "organization",
                "admin": "a1",
                "children": [
                    {
                        "id": "r1",
                        "kind": "realm",
                        "children": [
                            {"id": "d1", "kind": "domain", "assets": [{"id": "x"}, {"id": "x"}]}
                        ],
                    }
                ],
            }
        ],
        "users": [],
    }
    with pytest.raises(ModelLoadError, match="duplicate asset"):
        load_model(doc)
    with pytest.raises(ModelLoadError, match="duplicate user"):
        load_model({"organizations": [], "users": [{"id": "u"}, {"id": "u"}]})


@pytest.mark.parametrize(
    "doc",
    [
        {"organizations": [{"id": "o1", "kind": "organization"}], "users": []},
        {
            "organizations": [
                {
                    "id": "o1",
                    "kind": "organization",
                    "admin": "a1",
                    "children": [{"id": "r1", "kind": "realm", "admin": "a2"}],
                }
            ],
            "users": [],
        },
        {
            "organizations": [
                {
                    "id": "o1",
                    "kind": "organization",
                    "admin": "a1",
                    "assets": [{"id": "x"}],
                }
            ],
            "users": [],
        },
        {
            "organizations": [
                {
                    "id": "o1",
                    "kind": "organization",
                    "admin": "a1",
                    "children": [{"id": "d1", "kind": "domain"}],
                }
            ],
            "users": [],
        },
        {"organizations": [{"id": "o1", "kind": "galaxy", "admin": "a1"}], "users": []},
        {"organizations": [{"id": "O1", "kind": "organization", "admin": "a1"}], "users": []},
        {"organizations": [], "users": [], "extra": 1},
        {
            "organizations": [
                {"id": "o1", "kind": "organization", "admin": "a1", "color": "red"}
            ],
            "users": [],
        },
    ],
)
def test_malformed_documents_rejected(doc):
    with pytest.raises(ModelLoadError):
        load_model(doc)


def test_resolve_spot_paths(model):
    realm = model.resolve_spot(ScopeKind.REALM, "o1-r1")
    assert realm.ancestry == ("o1", "o1-r1")
    org = model.resolve_spot(ScopeKind.ORGANIZATION, "o1")
    assert org.ancestry == ("o1",)
    with pytest.raises(KindMismatchError):
        model.resolve_spot(ScopeKind.DOMAIN, "o1")
    with pytest.raises(UnknownSpotError):
        model.resolve_spot(ScopeKind.REALM, "nope")


def test_contains_relation(model):
    org = model.path_of("o1")
    realm = model.path_of("o1-r1")
    assert org.contains(realm)
    assert org.contains(org)
    assert not realm.contains(org)
    other = model.path_of("o1-r2")
    assert not realm.contains(other)


def test_contains_is_partial_order_on_random_models():
    rng = random.Random(11)
    for _ in range(20):
        model = load_model(random_model_document(rng))
        paths = model.all_paths()
        for a in paths:
            assert a.contains(a)
            for b in paths:
                if a.contains(b) and b.contains(a):
                    assert a.node_id == b.node_id
                for c in paths:
                    if a.contains(b) and b.contains(c):
                        assert a.contains(c)


def test_assets_under(model):
    domain = model.path_of("o1-r1-d1")
    assert [a.id for a in model.assets_under(domain)] == ["asset-11", "asset-12"]
    org = model.path_of("o1")
    assert [a.id for a in model.assets_under(org)] == [
        "asset-11",
        "asset-12",
        "asset-21",
        "asset-22",
    ]
    bare = load_model(
        {
            "organizations": [
                {
                    "id": "o1",
                    "kind": "organization",
                    "admin": "a1",
                    "children": [{"id": "r1", "kind": "realm"}],
                }
            ],
            "users": [],
        }
    )
    assert bare.assets_under(bare.path_of("r1")) == []


def test_assets_under_monotone_in_containment():
    rng = random.Random(12)
    model = load_model(random_model_document(rng, 1, 1, 1))
    paths = model.all_paths()
    for outer in paths:
        outer_assets = {a.id for a in model.assets_under(outer)}
        for inner in paths:
            if outer.contains(inner):
                assert {a.id for a in model.assets_under(inner)} <= outer_assets


def test_admin_routing(model):
    assert model.admin_of(model.path_of("o1-r1")) == "o1-admin"
    assert model.admin_of(model.path_of("o1")) == "o1-admin"
    assert model.admin_of(model.path_of("o1-r2-d1")) == "o1-admin"


def test_every_node_resolves_by_its_own_kind():
    rng = random.Random(13)
    for _ in range(10):
        model = load_model(random_model_document(rng))
        for path in model.all_paths():
            resolved = model.resolve_spot(path.kind, path.node_id)
            assert resolved == path
            # ancestry replays the walk from the organization down
            for depth, node_id in enumerate(path.ancestry):
                assert model.path_of(node_id).depth == depth


def test_document_round_trip(model_document):
    model = load_model(model_document)
    again = HierarchyModel.from_document(model.to_document())
    assert again.to_document() == model.to_document()


def test_user_and_asset_lookups(model):
    assert model.get_user("user-x").display_name == "User X"
    with pytest.raises(UnknownUserError):
        model.get_user("ghost")
    assert model.asset_path("asset-11").node_id == "o1-r1-d1"
    assert model.get_asset("asset-21").description == "warehouse gateway"
    with pytest.raises(UnknownAssetError):
        model.asset_path("ghost")
