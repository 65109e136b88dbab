"""Independent checks: enumerated MI, exhaustive converse, cut structure."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from advflow import codec as cd
from advflow import oracle as orc
from advflow.corpus import GRAPH_NAMES
from advflow.exactlp import solve_rate
from advflow.netgraph import enumerate_paths

from conftest import cached_net, cached_plan, cached_solution


# -- enumerated mutual information ----------------------------------------


def test_mi_one_time_pad_is_zero():
    # observing message + key reveals nothing
    assert orc.mi_enumerate(2, np.array([[1, 1]]), 1) == 0


def test_mi_bare_message_is_one_symbol():
    assert orc.mi_enumerate(2, np.array([[1, 0]]), 1) == 1


def test_mi_identity_reveals_message_column():
    assert orc.mi_enumerate(3, np.eye(2, dtype=np.int64), 1) == 1


def test_mi_repeated_row_counts_once():
    assert orc.mi_enumerate(5, np.array([[1], [1]]), 1) == 1


def test_mi_triangular_map_leaks_one_dimension():
    assert orc.mi_enumerate(5, np.array([[1, 1], [0, 1]]), 1) == 1


def test_mi_no_observation_no_message():
    assert orc.mi_enumerate(3, np.zeros((0, 2), dtype=np.int64), 1) == 0
    assert orc.mi_enumerate(3, np.array([[1, 1]]), 0) == 0


def test_mi_scaled_full_rank_row():
    assert orc.mi_enumerate(7, np.array([[2, 4]]), 2) == 1


def test_mi_input_validation():
    with pytest.raises(orc.OracleError, match="matrix"):
        orc.mi_enumerate(3, np.array([1, 2]), 1)
    with pytest.raises(orc.OracleError, match="column"):
        orc.mi_enumerate(3, np.array([[1, 2]]), 3)


def test_mi_guard_blocks_huge_enumerations():
    wide = np.ones((1, 30), dtype=np.int64)
    with pytest.raises(orc.OracleError, match="guard"):
        orc.mi_enumerate(2, wide, 1)


@pytest.mark.parametrize("name", ["diamond", "parallel3", "kite"])
def test_mi_matches_rank_gap_on_codec_observations(name):
    net = cached_net(name)
    plan = cached_plan(name, 1)
    params = cd.params_for_plan(plan, "eaves", q=5)
    cases = [plan.packets_through((v,)) for v in net.internal_nodes]
    cases.append(tuple(range(params.N)))
    for observed in cases:
        mi = orc.mi_for_observation(params, observed)
        assert mi == cd.leakage_dimension(params, observed)


def test_mi_full_observation_is_message_dimension():
    plan = cached_plan("parallel3", 1)
    params = cd.params_for_plan(plan, "eaves", q=5)
    full = tuple(range(params.N))
    assert orc.mi_for_observation(params, full) == params.message_packets


def test_mi_eavesjam_needs_small_state_space():
    plan = cached_plan("cockroach", 1)
    params = cd.params_for_plan(plan, "eavesjam", n=25)
    with pytest.raises(orc.OracleError, match="guard"):
        orc.mi_for_observation(params, (0,), rho=1)


# -- exhaustive routing converse --------------------------------------------


def test_converse_cockroach_frozen():
    cert = orc.exhaustive_routing_converse(cached_net("cockroach"))
    assert cert.rate == Fraction(8, 3)
    assert cert.tau == 3
    assert cert.explored > 0


FAST_GRAPHS = ["single_path", "chain2", "diamond", "parallel3", "kite",
               "funnel", "trident", "lopsided"]


@pytest.mark.parametrize("name", FAST_GRAPHS)
def test_converse_meets_lp_optimum(name):
    net = cached_net(name)
    cert = orc.exhaustive_routing_converse(net)
    assert cert.rate == cached_solution(name, 1).objective


@pytest.mark.parametrize("name", ["diamond", "trident", "lopsided"])
def test_converse_certificate_is_feasible(name):
    net = cached_net(name)
    cert = orc.exhaustive_routing_converse(net)
    load: Counter = Counter()
    exposure: Counter = Counter()
    delivered = 0
    for path, count in cert.counts:
        delivered += count
        for e in path:
            load[e] += count
        for v in net.path_internal_nodes(path):
            exposure[v] += count
    assert all(c <= cert.tau for c in load.values())
    worst = max(exposure.values(), default=0)
    assert cert.rate == Fraction(delivered - worst, cert.tau)
    if cert.worst_node is not None:
        assert exposure[cert.worst_node] == worst


def test_converse_guard_limits_search():
    with pytest.raises(orc.OracleError, match="guard"):
        orc.exhaustive_routing_converse(cached_net("cockroach"), guard=10)


def replicated_optimum(net) -> Fraction:
    """Best rate when a packet may ride any nonempty set of paths.

    Exhaustive over multisets of path-sets with unit edge budgets; the
    returned value can never exceed the replication-free search, which
    is the reduction the converse oracle relies on.
    """
    paths = enumerate_paths(net)
    ids = range(len(paths))
    subsets = [
        frozenset(c)
        for r in range(1, len(paths) + 1)
        for c in combinations(ids, r)
    ]
    nodes_of = [
        set(net.path_internal_nodes(p)) for p in paths
    ]
    best = Fraction(0)

    def score(assignment: list[frozenset]) -> Fraction:
        exposure: Counter = Counter()
        for sub in assignment:
            seen = set().union(*(nodes_of[p] for p in sub))
            for v in seen:
                exposure[v] += 1
        worst = max(exposure.values(), default=0)
        return Fraction(len(assignment) - worst)

    def fits(assignment: list[frozenset]) -> bool:
        load: Counter = Counter()
        for sub in assignment:
            for p in sub:
                for e in paths[p]:
                    load[e] += 1
        return all(c <= 1 for c in load.values())

    def recurse(start: int, assignment: list[frozenset]) -> None:
        nonlocal best
        best = max(best, score(assignment))
        for i in range(start, len(subsets)):
            trial = assignment + [subsets[i]]
            if fits(trial):
                recurse(i, trial)

    recurse(0, [])
    return best


@pytest.mark.parametrize("name", ["diamond", "kite", "parallel3"])
def test_replication_never_beats_plain_forwarding(name):
    net = cached_net(name)
    cert = orc.exhaustive_routing_converse(net)
    assert replicated_optimum(net) == cert.rate


# -- node-cut structure -------------------------------------------------------


def test_nodecut_lopsided_mixed_members_frozen():
    cert = orc.nodecut_structure_check(cached_net("lopsided"))
    assert cert is not None
    assert cert.cut == ("a", "b")
    assert cert.lam_members == ("a",)
    assert cert.cap_members == ("b",)
    assert cert.lam == 2


def test_nodecut_single_path_is_balance_pinned():
    cert = orc.nodecut_structure_check(cached_net("single_path"))
    assert cert is not None
    assert cert.lam_members == ("v",)
    assert cert.cap_members == ()


def test_nodecut_exists_on_every_graph(any_graph):
    net = cached_net(any_graph)
    cert = orc.nodecut_structure_check(net, cached_solution(any_graph, 1))
    assert cert is not None
    assert set(cert.lam_members) | set(cert.cap_members) == set(cert.cut)
    assert not set(cert.lam_members) & set(cert.cap_members)
    flows = orc.node_flows(net, cached_solution(any_graph, 1))
    for v in cert.lam_members:
        assert flows[v] == cert.lam


def test_nodecut_needs_path_form():
    with pytest.raises(orc.OracleError, match="z = 1"):
        orc.nodecut_structure_check(
            cached_net("diamond"), cached_solution("diamond", 2)
        )


def test_node_flows_sum_matches_paths():
    net = cached_net("cockroach")
    solution = cached_solution("cockroach", 1)
    flows = orc.node_flows(net, solution)
    assert set(flows) == set(net.internal_nodes)
    total = sum(solution.path_flows)
    assert max(flows.values()) <= total


def test_nodecut_json_shape():
    cert = orc.nodecut_structure_check(cached_net("lopsided"))
    data = cert.to_json_dict()
    assert data["cut"] == ["a", "b"]
    assert data["lam"] == "2/1"


# -- LP cross-validation -------------------------------------------------------


def test_lp_crosscheck_z1(any_graph):
    result = orc.lp_crosscheck(cached_net(any_graph), 1)
    assert result["equal"]
    assert result["lp2"] == result["lp1"] == result["lp1_prime"]


def test_lp_crosscheck_z2_skips_edge_form():
    result = orc.lp_crosscheck(cached_net("cockroach"), 2)
    assert result["equal"]
    assert result["lp2"] is None
