"""Unit-capacity directed acyclic networks with one source and one terminal.

Graph file format
-----------------
Plain text, ``#`` starts a comment that runs to end of line, blank lines are
ignored.  The first significant line declares the endpoints::

    SOURCE <id> TERMINAL <id>

Every following significant line is one unit-capacity edge, tail first::

    <tail> <head>

Repeating a line adds a parallel edge; parallel edges are distinct and are
identified by their position in the file.  Multi-edges are the only way to
express capacity above one.

Validation: the graph must be acyclic, the endpoints distinct, and every
node must lie on at least one source-to-terminal path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from ._limits import GuardExceeded, guard_limit

#: A path is the tuple of edge indices it traverses, in order.
Path = tuple[int, ...]

PATH_GUARD_DEFAULT = 1_000_000
SUBSET_GUARD_DEFAULT = 1_000_000


class GraphError(ValueError):
    """Raised for malformed graph text or an invalid network."""


@dataclass(frozen=True)
class Network:
    """An immutable DAG with unit-capacity edges and designated endpoints.

    Attributes:
        nodes: Node identifiers in first-appearance order.
        edges: ``(tail, head)`` pairs; the index of a pair is the edge's
            identity, so parallel edges stay distinct.
        source: Source node identifier.
        terminal: Terminal node identifier.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    source: str
    terminal: str

    @cached_property
    def _in_map(self) -> dict[str, tuple[int, ...]]:
        acc: dict[str, list[int]] = {v: [] for v in self.nodes}
        for i, (_, head) in enumerate(self.edges):
            acc[head].append(i)
        return {v: tuple(ixs) for v, ixs in acc.items()}

    @cached_property
    def _out_map(self) -> dict[str, tuple[int, ...]]:
        acc: dict[str, list[int]] = {v: [] for v in self.nodes}
        for i, (tail, _) in enumerate(self.edges):
            acc[tail].append(i)
        return {v: tuple(ixs) for v, ixs in acc.items()}

    def in_edges(self, node: str) -> tuple[int, ...]:
        """Indices of edges entering *node*."""
        return self._in_map[node]

    def out_edges(self, node: str) -> tuple[int, ...]:
        """Indices of edges leaving *node*."""
        return self._out_map[node]

    @property
    def internal_nodes(self) -> tuple[str, ...]:
        """All nodes except the source and the terminal."""
        return tuple(v for v in self.nodes if v not in (self.source, self.terminal))

    def path_nodes(self, path: Path) -> tuple[str, ...]:
        """Node sequence visited by *path*, source through terminal."""
        seq = [self.edges[path[0]][0]]
        for e in path:
            seq.append(self.edges[e][1])
        return tuple(seq)

    def path_internal_nodes(self, path: Path) -> frozenset[str]:
        """Internal nodes touched by *path*."""
        ends = (self.source, self.terminal)
        return frozenset(v for v in self.path_nodes(path) if v not in ends)


def parse(text: str) -> Network:
    """Parse graph text into a validated :class:`Network`.

    Raises:
        GraphError: on syntax errors (with 1-based line number), a missing
            endpoint declaration, a cycle, or a node on no source-terminal
            path.
    """
    source = terminal = None
    nodes: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str]] = []

    def note(node: str) -> None:
        if node not in seen:
            seen.add(node)
            nodes.append(node)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if source is None:
            if len(fields) != 4 or fields[0] != "SOURCE" or fields[2] != "TERMINAL":
                raise GraphError(
                    f"line {lineno}: expected 'SOURCE <id> TERMINAL <id>', got {line!r}"
                )
            source, terminal = fields[1], fields[3]
            note(source)
            note(terminal)
            continue
        if len(fields) != 2:
            raise GraphError(f"line {lineno}: expected '<tail> <head>', got {line!r}")
        tail, head = fields
        note(tail)
        note(head)
        edges.append((tail, head))

    if source is None:
        raise GraphError("missing 'SOURCE <id> TERMINAL <id>' declaration")
    net = Network(tuple(nodes), tuple(edges), source, terminal)
    validate(net)
    return net


def to_text(net: Network) -> str:
    """Serialize *net* in the graph file format, edges in identity order."""
    lines = [f"SOURCE {net.source} TERMINAL {net.terminal}"]
    lines.extend(f"{tail} {head}" for tail, head in net.edges)
    return "\n".join(lines) + "\n"


def load(path) -> Network:
    """Read and parse a graph file from *path*."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def validate(net: Network) -> Network:
    """Check the structural rules; raise :class:`GraphError` on violation."""
    if net.source == net.terminal:
        raise GraphError("source and terminal must differ")
    if _has_cycle(net):
        raise GraphError("cycle detected")
    from_source = _reachable(net, net.source, forward=True)
    to_terminal = _reachable(net, net.terminal, forward=False)
    for v in net.nodes:
        if v not in from_source or v not in to_terminal:
            raise GraphError(f"node {v!r} lies on no source-terminal path")
    return net


def _has_cycle(net: Network) -> bool:
    indeg = {v: len(net.in_edges(v)) for v in net.nodes}
    ready = [v for v in net.nodes if indeg[v] == 0]
    removed = 0
    while ready:
        v = ready.pop()
        removed += 1
        for e in net.out_edges(v):
            head = net.edges[e][1]
            indeg[head] -= 1
            if indeg[head] == 0:
                ready.append(head)
    return removed != len(net.nodes)


def _reachable(net: Network, start: str, forward: bool) -> set[str]:
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        step = net.out_edges(v) if forward else net.in_edges(v)
        for e in step:
            nxt = net.edges[e][1] if forward else net.edges[e][0]
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def topological_order(net: Network) -> tuple[str, ...]:
    """Nodes in a deterministic topological order (Kahn, index tie-break)."""
    index = {v: i for i, v in enumerate(net.nodes)}
    indeg = {v: len(net.in_edges(v)) for v in net.nodes}
    ready = sorted((v for v in net.nodes if indeg[v] == 0), key=index.get)
    order: list[str] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        changed = False
        for e in net.out_edges(v):
            head = net.edges[e][1]
            indeg[head] -= 1
            if indeg[head] == 0:
                ready.append(head)
                changed = True
        if changed:
            ready.sort(key=index.get)
    return tuple(order)


# ---------------------------------------------------------------------------
# Flow and cuts


def integer_max_flow(
    node_count: int,
    arcs: Sequence[tuple[int, int, int]],
    source: int,
    sink: int,
) -> tuple[int, list[int]]:
    """Integer max flow via shortest augmenting paths (Edmonds-Karp).

    Args:
        node_count: Number of nodes, labelled ``0..node_count-1``.
        arcs: ``(tail, head, capacity)`` triples with integer capacities.
        source: Source node label.
        sink: Sink node label.

    Returns:
        ``(value, flows)`` where ``flows[i]`` is the integral flow on
        ``arcs[i]``.
    """
    # adjacency holds [head, residual, index of reverse entry in adj[head]]
    adj: list[list[list[int]]] = [[] for _ in range(node_count)]
    slots: list[tuple[int, int]] = []
    for tail, head, cap in arcs:
        if cap < 0:
            raise ValueError("arc capacities must be non-negative")
        slots.append((tail, len(adj[tail])))
        adj[tail].append([head, cap, len(adj[head])])
        adj[head].append([tail, 0, len(adj[tail]) - 1])

    value = 0
    while True:
        parent: list[tuple[int, int] | None] = [None] * node_count
        parent[source] = (source, -1)
        queue = [source]
        while queue and parent[sink] is None:
            v = queue.pop(0)
            for k, (head, residual, _) in enumerate(adj[v]):
                if residual > 0 and parent[head] is None:
                    parent[head] = (v, k)
                    queue.append(head)
        if parent[sink] is None:
            break
        bottleneck = None
        v = sink
        while v != source:
            prev, k = parent[v]
            residual = adj[prev][k][1]
            bottleneck = residual if bottleneck is None else min(bottleneck, residual)
            v = prev
        v = sink
        while v != source:
            prev, k = parent[v]
            entry = adj[prev][k]
            entry[1] -= bottleneck
            adj[entry[0]][entry[2]][1] += bottleneck
            v = prev
        value += bottleneck

    capacities = [cap for _, _, cap in arcs]
    flows = [capacities[i] - adj[t][k][1] for i, (t, k) in enumerate(slots)]
    return value, flows


def min_cut(net: Network) -> int:
    """Size of a minimum source-terminal edge cut (equals max flow)."""
    index = {v: i for i, v in enumerate(net.nodes)}
    arcs = [(index[t], index[h], 1) for t, h in net.edges]
    value, _ = integer_max_flow(
        len(net.nodes), arcs, index[net.source], index[net.terminal]
    )
    return value


def enumerate_paths(net: Network, guard: int | None = None) -> tuple[Path, ...]:
    """All source-terminal paths in lexicographic edge-index order.

    Raises:
        GuardExceeded: when the path count passes the enumeration budget
            (default one million; override with ``ADVFLOW_GUARD``).
    """
    limit = guard if guard is not None else guard_limit(PATH_GUARD_DEFAULT)
    paths: list[Path] = []
    stack: list[int] = []

    def walk(v: str) -> None:
        if v == net.terminal:
            if len(paths) >= limit:
                raise GuardExceeded(
                    f"path enumeration exceeded guard of {limit} paths"
                )
            paths.append(tuple(stack))
            return
        for e in net.out_edges(v):
            stack.append(e)
            walk(net.edges[e][1])
            stack.pop()

    walk(net.source)
    return tuple(paths)


def internal_subsets(
    net: Network, size: int, guard: int | None = None
) -> Iterator[tuple[str, ...]]:
    """Yield size-*size* subsets of internal nodes in lexicographic order."""
    limit = guard if guard is not None else guard_limit(SUBSET_GUARD_DEFAULT)
    count = 0
    for combo in combinations(net.internal_nodes, size):
        count += 1
        if count > limit:
            raise GuardExceeded(f"subset enumeration exceeded guard of {limit}")
        yield combo


def is_node_cut(net: Network, nodes: Iterable[str]) -> bool:
    """True when deleting *nodes* (internal only) disconnects the endpoints."""
    blocked = set(nodes)
    if net.source in blocked or net.terminal in blocked:
        raise GraphError("a node cut may contain internal nodes only")
    seen = {net.source}
    frontier = [net.source]
    while frontier:
        v = frontier.pop()
        for e in net.out_edges(v):
            head = net.edges[e][1]
            if head == net.terminal:
                return False
            if head not in blocked and head not in seen:
                seen.add(head)
                frontier.append(head)
    return True


def minimal_node_cuts(net: Network, guard: int | None = None) -> tuple[tuple[str, ...], ...]:
    """All inclusion-minimal internal node cuts, smallest first.

    Subsets are scanned in increasing size with an enumeration budget, so
    this is meant for desk-scale networks.
    """
    limit = guard if guard is not None else guard_limit(SUBSET_GUARD_DEFAULT)
    internal = net.internal_nodes
    found: list[tuple[str, ...]] = []
    scanned = 0
    for size in range(1, len(internal) + 1):
        for combo in combinations(internal, size):
            scanned += 1
            if scanned > limit:
                raise GuardExceeded(f"node-cut scan exceeded guard of {limit}")
            if any(set(prev) <= set(combo) for prev in found):
                continue
            if is_node_cut(net, combo):
                found.append(combo)
    return tuple(found)
