"""Small demo hierarchy: one organization with two realms, one domain each."""

from __future__ import annotations

from typing import Any


def demo_model_document() -> dict[str, Any]:
    return {
        "organizations": [
            {
                "id": "o1",
                "kind": "organization",
                "admin": "o1-admin",
                "children": [
                    {
                        "id": "o1-r1",
                        "kind": "realm",
                        "children": [
                            {
                                "id": "o1-r1-d1",
                                "kind": "domain",
                                "assets": [
                                    {"id": "asset-11", "description": "build server"},
                                    {"id": "asset-12", "description": "artifact registry"},
                                ],
                            }
                        ],
                    },
                    {
                        "id": "o1-r2",
                        "kind": "realm",
                        "children": [
                            {
                                "id": "o1-r2-d1",
                                "kind": "domain",
                                "assets": [
                                    {"id": "asset-21", "description": "warehouse gateway"},
                                    {"id": "asset-22", "description": "inventory database"},
                                ],
                            }
                        ],
                    },
                ],
            }
        ],
        "users": [
            {"id": "user-x", "display_name": "User X"},
            {"id": "user-y", "display_name": "User Y"},
            {"id": "o1-admin", "display_name": "O1 Administrator"},
        ],
    }
