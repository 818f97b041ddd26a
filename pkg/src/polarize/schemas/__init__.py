"""Bundled JSON schemas, one per document the command line emits.

Schema files live next to this module and ship with the package, so
downstream consumers can validate our reports without this codebase.
"""

from __future__ import annotations

import json
from importlib import resources

__all__ = ["load", "names"]


def load(name: str) -> dict:
    """Return the schema called name (without the .schema.json suffix)."""
    path = resources.files(__package__).joinpath(f"{name}.schema.json")
    return json.loads(path.read_text())


def names() -> tuple[str, ...]:
    return tuple(
        sorted(
            entry.name[: -len(".schema.json")]
            for entry in resources.files(__package__).iterdir()
            if entry.name.endswith(".schema.json")
        )
    )
