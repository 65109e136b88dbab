"""Shared fixtures: bundled networks and their balanced solutions."""

from __future__ import annotations

from functools import lru_cache

import pytest

from advflow.corpus import GRAPH_NAMES, load_graph
from advflow.exactlp import solve_rate
from advflow.flowplan import make_plan, make_schedule


@lru_cache(maxsize=None)
def cached_net(name: str):
    return load_graph(name)


@lru_cache(maxsize=None)
def cached_solution(name: str, z: int):
    return solve_rate(cached_net(name), z)


@lru_cache(maxsize=None)
def cached_plan(name: str, z: int):
    return make_plan(cached_net(name), cached_solution(name, z))


@lru_cache(maxsize=None)
def cached_schedule(name: str, z: int):
    return make_schedule(cached_plan(name, z))


def jamming_n(plan, kind: str) -> int | None:
    """Smallest packet length giving the codec at least one message packet."""
    from advflow import codec as cd

    for n in range(plan.total_packets + 2, plan.total_packets + 41):
        try:
            params = cd.params_for_plan(plan, kind, n=n)
        except cd.CodecError:
            continue
        if params.reduced_packets >= 1:
            return n
    return None


@pytest.fixture
def cockroach():
    return cached_net("cockroach")


@pytest.fixture(params=GRAPH_NAMES)
def any_graph(request):
    return request.param
