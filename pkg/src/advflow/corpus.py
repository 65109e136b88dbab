"""Bundled example networks used by the test suite, demos, and CLI."""

from __future__ import annotations

from importlib import resources

from .netgraph import Network, parse

GRAPH_NAMES = (
    "cockroach",
    "single_path",
    "chain2",
    "diamond",
    "parallel3",
    "wide4",
    "wide5",
    "braid",
    "crown",
    "funnel",
    "kite",
    "trident",
    "lopsided",
)


def graph_text(name: str) -> str:
    """Raw file contents of the bundled graph *name*."""
    if name not in GRAPH_NAMES:
        raise KeyError(f"no bundled graph named {name!r}")
    ref = resources.files(__package__).joinpath(f"data/graphs/{name}.graph")
    return ref.read_text(encoding="utf-8")


def load_graph(name: str) -> Network:
    """Parse and return the bundled graph *name*."""
    return parse(graph_text(name))


def all_graphs() -> dict[str, Network]:
    """All bundled graphs keyed by name, in declaration order."""
    return {name: load_graph(name) for name in GRAPH_NAMES}
