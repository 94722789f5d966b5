"""Topologies shipped with the package and their known causal counts."""
from __future__ import annotations

import json
from importlib import resources

from .topology import MultiloopTopology, parse_topology

_DIR = resources.files(__package__) / "topologies"


def names() -> list[str]:
    return sorted(
        p.name[:-5] for p in _DIR.iterdir() if p.name.endswith(".json") and p.name != "fixtures.json"
    )


def load(name: str) -> MultiloopTopology:
    path = _DIR / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no bundled topology named {name!r}; available: {', '.join(names())}")
    return parse_topology(json.loads(path.read_text()), name=name)


def fixtures() -> dict:
    return json.loads((_DIR / "fixtures.json").read_text())
