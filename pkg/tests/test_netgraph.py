"""Network parsing, validation, flows, paths, and node cuts.

Flow values are cross-checked against networkx, which plays no part in
the library itself.
"""

from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advflow._limits import GuardExceeded
from advflow.corpus import GRAPH_NAMES, graph_text, load_graph
from advflow.netgraph import (
    GraphError,
    Network,
    enumerate_paths,
    integer_max_flow,
    is_node_cut,
    min_cut,
    minimal_node_cuts,
    parse,
    to_text,
    topological_order,
    validate,
)

from conftest import cached_net


def as_multigraph(net: Network) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    g.add_nodes_from(net.nodes)
    for tail, head in net.edges:
        g.add_edge(tail, head, capacity=1)
    return g


def as_capacitated(net: Network) -> nx.DiGraph:
    """Parallel edges collapsed into integer capacities."""
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    for tail, head in net.edges:
        if g.has_edge(tail, head):
            g[tail][head]["capacity"] += 1
        else:
            g.add_edge(tail, head, capacity=1)
    return g


# -- parsing -----------------------------------------------------------


def test_parse_roundtrip_all_bundled():
    for name in GRAPH_NAMES:
        net = load_graph(name)
        again = parse(to_text(net))
        assert again == net


def test_parallel_edges_kept_distinct():
    net = cached_net("cockroach")
    assert len(net.edges) == 14
    assert len(net.out_edges("s")) == 6
    assert net.edges.count(("s", "1")) == 2


def test_comments_and_blank_lines_ignored():
    net = parse("# hi\n\nSOURCE s TERMINAL t\n# mid\ns a\n\na t\n")
    assert net.edges == (("s", "a"), ("a", "t"))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("s a\na t\n", "SOURCE"),
        ("SOURCE s TERMINAL s\ns s\n", "differ"),
        ("SOURCE s TERMINAL t\n", "no source-terminal path"),
        ("SOURCE s TERMINAL t\ns a b\n", "line 2"),
        ("SOURCE s TERMINAL t\ns t\nt s\n", "cycle"),
        ("SOURCE s TERMINAL t\ns t\nx s\n", "'x'"),
        ("SOURCE s TERMINAL t\ns t\na a2\na2 a\n", "cycle"),
    ],
)
def test_rejected_inputs(text, fragment):
    with pytest.raises(GraphError, match=fragment):
        validate(parse(text))


def test_node_off_every_route_rejected():
    with pytest.raises(GraphError, match="path"):
        validate(parse("SOURCE s TERMINAL t\ns t\ns a\n"))


def test_all_bundled_graphs_validate():
    for name in GRAPH_NAMES:
        validate(load_graph(name))


# -- order and flow ----------------------------------------------------

def test_topological_order_respects_edges(any_graph):
    net = cached_net(any_graph)
    pos = {v: i for i, v in enumerate(topological_order(net))}
    for tail, head in net.edges:
        assert pos[tail] < pos[head]


def test_min_cut_matches_networkx(any_graph):
    net = cached_net(any_graph)
    expected = nx.maximum_flow_value(
        as_capacitated(net), net.source, net.terminal
    )
    assert min_cut(net) == expected


def test_min_cut_frozen_values():
    assert min_cut(cached_net("cockroach")) == 4
    assert min_cut(cached_net("diamond")) == 2
    assert min_cut(cached_net("parallel3")) == 3
    assert min_cut(cached_net("wide5")) == 5
    assert min_cut(cached_net("funnel")) == 2
    assert min_cut(cached_net("lopsided")) == 3


def test_integer_max_flow_conserves():
    net = cached_net("cockroach")
    index = {v: i for i, v in enumerate(net.nodes)}
    arcs = [(index[u], index[v], 1) for u, v in net.edges]
    value, flows = integer_max_flow(
        len(net.nodes), arcs, index[net.source], index[net.terminal]
    )
    assert value == 4
    assert all(f in (0, 1) for f in flows)
    for v in net.internal_nodes:
        into = sum(flows[e] for e in net.in_edges(v))
        out = sum(flows[e] for e in net.out_edges(v))
        assert into == out


# -- paths -------------------------------------------------------------


def test_enumerate_paths_complete_and_sorted(any_graph):
    net = cached_net(any_graph)
    paths = enumerate_paths(net)
    assert list(paths) == sorted(paths)
    expected = {
        tuple(p)
        for p in nx.all_simple_edge_paths(
            as_multigraph(net), net.source, net.terminal
        )
    }
    got = set()
    for path in paths:
        nodes = net.path_nodes(path)
        assert nodes[0] == net.source and nodes[-1] == net.terminal
        # translate edge indices to (tail, head, parallel-rank) triples
        key_path = []
        for e in path:
            tail, head = net.edges[e]
            rank = sum(1 for f in range(e) if net.edges[f] == (tail, head))
            key_path.append((tail, head, rank))
        got.add(tuple(key_path))
    assert len(paths) == len(expected)
    assert got == expected


def test_cockroach_has_twelve_paths():
    assert len(enumerate_paths(cached_net("cockroach"))) == 12


def test_enumerate_paths_guard():
    with pytest.raises(GuardExceeded):
        enumerate_paths(cached_net("cockroach"), guard=5)


# -- node cuts ---------------------------------------------------------


def test_is_node_cut():
    net = cached_net("diamond")
    assert is_node_cut(net, ("a", "b"))
    assert not is_node_cut(net, ("a",))


def test_minimal_node_cuts_braid():
    net = cached_net("braid")
    assert minimal_node_cuts(net) == (("a", "b"), ("c", "d"))


def test_minimal_node_cuts_have_no_cutting_subsets(any_graph):
    net = cached_net(any_graph)
    for cut in minimal_node_cuts(net):
        assert is_node_cut(net, cut)
        for drop in range(len(cut)):
            smaller = cut[:drop] + cut[drop + 1 :]
            if smaller:
                assert not is_node_cut(net, smaller)


# -- randomized cross-checks -------------------------------------------


@st.composite
def random_dag_text(draw):
    """A random layered DAG over s, v0..vk, t with some parallel edges."""
    k = draw(st.integers(min_value=1, max_value=4))
    names = [f"v{i}" for i in range(k)]
    order = ["s"] + names + ["t"]
    lines = []
    for i, tail in enumerate(order[:-1]):
        for head in order[i + 1 :]:
            copies = draw(st.integers(min_value=0, max_value=2))
            lines.extend(f"{tail} {head}" for _ in range(copies))
    return "SOURCE s TERMINAL t\n" + "\n".join(lines) + "\n"


@given(random_dag_text())
@settings(max_examples=60, deadline=None)
def test_random_dag_flow_matches_networkx(text):
    try:
        net = validate(parse(text))
    except GraphError:
        return
    expected = nx.maximum_flow_value(
        as_capacitated(net), net.source, net.terminal
    )
    assert min_cut(net) == expected


@given(random_dag_text())
@settings(max_examples=40, deadline=None)
def test_random_dag_paths_are_valid(text):
    try:
        net = validate(parse(text))
    except GraphError:
        return
    for path in enumerate_paths(net, guard=20000):
        nodes = net.path_nodes(path)
        assert nodes[0] == net.source and nodes[-1] == net.terminal
        assert len(set(nodes)) == len(nodes)
        for prev, nxt in zip(path, path[1:]):
            assert net.edges[prev][1] == net.edges[nxt][0]
