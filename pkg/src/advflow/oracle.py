"""Independent ground-truth checks for the planner and the codecs.

Everything here recomputes a guarantee from first principles, without
reusing the machinery under test: mutual information by enumerating
every (message, key) pair, the routing rate limit by exhausting integral
packet-to-path assignments, and the balance structure of optimal flows
by scanning all minimal node-cuts.  These are desk-scale tools; guards
bound the state space and ``ADVFLOW_GUARD`` raises them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import codec as cd
from ._limits import guard_limit
from .exactlp import LpSolution, build_lp1, build_lp1_prime, build_lp2, solve_exact, solve_rate
from .flowplan import make_plan
from .gf import GF
from .netgraph import (
    Network,
    Path,
    enumerate_paths,
    integer_max_flow,
    minimal_node_cuts,
)


class OracleError(ValueError):
    """An oracle could not certify its input."""


# -- exact mutual information by enumeration ---------------------------


def mi_enumerate(
    q: int,
    A: np.ndarray,
    message_len: int,
    guard: int | None = None,
) -> Fraction:
    """Mutual information between message and observation, exactly.

    *A* maps a uniform column vector ``(message; key)`` over GF(q) to
    the observation.  Every input is enumerated (``q ** columns`` joint
    states, bounded by *guard*, default 10**7), and the value is
    returned in q-ary units as an exact rational.  Linear maps of
    uniform inputs make every probability ratio a power of ``q``; a
    non-power ratio raises :class:`OracleError`.

    For these instances the result always equals the rank gap
    ``rank(A) - rank(A_key)``, which is what callers cross-check.
    """
    gf = GF(q)
    A = gf.array(A)
    if A.ndim != 2:
        raise OracleError("observation map must be a matrix")
    cols = A.shape[1]
    if not 0 <= message_len <= cols:
        raise OracleError("message length must fit in the column count")
    limit = guard_limit(guard if guard is not None else 10**7)
    states = q**cols
    if states > limit:
        raise OracleError(
            f"{states} joint states exceed the enumeration guard {limit}"
        )
    key_len = cols - message_len
    if A.shape[0] == 0 or message_len == 0:
        return Fraction(0)
    A_m, A_k = A[:, :message_len], A[:, message_len:]

    def vectors(length: int) -> np.ndarray:
        if length == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(
            *([np.arange(q, dtype=np.int64)] * length), indexing="ij"
        )
        return np.stack([g.ravel() for g in grids], axis=1)

    keys = vectors(key_len)
    key_part = gf.matmul(keys, A_k.T)
    c_m = keys.shape[0]
    total = states
    obs_counts: dict[bytes, int] = {}
    per_message: list[dict[bytes, int]] = []
    for m in vectors(message_len):
        obs = gf.add(key_part, gf.matmul(A_m, m)[None, :])
        uniq, counts = np.unique(obs, axis=0, return_counts=True)
        hist = {
            row.tobytes(): int(c) for row, c in zip(uniq, counts)
        }
        per_message.append(hist)
        for o, c in hist.items():
            obs_counts[o] = obs_counts.get(o, 0) + c
    weighted = 0
    for hist in per_message:
        for o, c_mo in hist.items():
            ratio = Fraction(c_mo * total, c_m * obs_counts[o])
            exponent = 0
            while ratio > 1:
                ratio /= q
                exponent += 1
            while ratio < 1:
                ratio *= q
                exponent -= 1
            if ratio != 1:
                raise OracleError(
                    "joint distribution is not q-power structured; "
                    "this map is not linear over GF(q)"
                )
            weighted += c_mo * exponent
    return Fraction(weighted, total)


def mi_for_observation(
    params: cd.CodecParams,
    observed: tuple[int, ...],
    rho: int | None = None,
    guard: int | None = None,
) -> Fraction:
    """Enumerated mutual information for a codec observation set."""
    A, key_start = cd.observation_matrix(params, observed, rho)
    return mi_enumerate(params.q, A, key_start, guard=guard)


# -- exhaustive routing converse ---------------------------------------


@dataclass(frozen=True)
class ConverseCertificate:
    """Best secure rate any forwarding scheme reaches, with its witness.

    ``rate`` maximizes ``(delivered - worst_view) / tau`` over integral
    packet-to-path assignments respecting unit edge capacity per slot;
    ``counts`` is the first attaining assignment and ``worst_node`` the
    internal node sighting ``worst_view`` of its packets.
    """

    rate: Fraction
    tau: int
    counts: tuple[tuple[Path, int], ...]
    worst_node: str | None
    explored: int

    def to_json_dict(self) -> dict:
        return {
            "rate": f"{self.rate.numerator}/{self.rate.denominator}",
            "tau": self.tau,
            "paths": [
                {"edges": list(path), "packets": count}
                for path, count in self.counts
            ],
            "worst_node": self.worst_node,
            "explored_states": self.explored,
        }


def exhaustive_routing_converse(
    net: Network,
    tau_cap: int | None = None,
    guard: int | None = None,
) -> ConverseCertificate:
    """Search every replication-free forwarding scheme up to ``tau_cap``.

    A scheme with replication never beats one without: dropping all but
    one delivering copy of a packet keeps the terminal's information and
    shrinks every node's view.  So the search ranges over multisets of
    source-terminal paths with per-edge load at most ``tau``, scoring
    ``(packets - max packets through any one internal node) / tau``.

    ``tau_cap`` defaults to the generation length of the balanced plan,
    which is where the planner's own optimum becomes integral; integral
    assignments can never exceed the fractional optimum, so the returned
    rate matching the planner certifies both.
    """
    if tau_cap is None:
        tau_cap = make_plan(net, solve_rate(net, 1)).tau
    limit = guard_limit(guard if guard is not None else 10**7)
    paths = enumerate_paths(net)
    internal = sorted(net.internal_nodes)
    node_index = {v: i for i, v in enumerate(internal)}
    touches: list[tuple[int, ...]] = [
        tuple(sorted(node_index[v] for v in net.path_internal_nodes(p)))
        for p in paths
    ]
    index_of = {name: i for i, name in enumerate(net.nodes)}
    arc_defs = [
        (index_of[u], index_of[v]) for u, v in net.edges
    ]
    src, dst = index_of[net.source], index_of[net.terminal]

    best_rate = Fraction(-1)
    best: tuple[int, tuple[int, ...], int | None] | None = None
    explored = 0

    for tau in range(1, tau_cap + 1):
        caps = [tau] * len(net.edges)
        views = [0] * len(internal)
        counts = [0] * len(paths)

        def residual_flow() -> int:
            arcs = [
                (u, v, caps[e]) for e, (u, v) in enumerate(arc_defs)
            ]
            value, _ = integer_max_flow(len(net.nodes), arcs, src, dst)
            return value

        def dfs(i: int, delivered: int) -> None:
            nonlocal explored, best_rate, best
            explored += 1
            if explored > limit:
                raise OracleError(
                    f"converse search exceeded the guard {limit}"
                )
            worst = max(views) if views else 0
            if delivered - worst + residual_flow() <= best_rate * tau:
                return
            if i == len(paths):
                rate = Fraction(delivered - worst, tau)
                if rate > best_rate:
                    argmax = max(range(len(views)), key=views.__getitem__) if views else None
                    best_rate = rate
                    best = (tau, tuple(counts), argmax)
                return
            room = min((caps[e] for e in paths[i]), default=tau)
            for x in range(room, -1, -1):
                for e in paths[i]:
                    caps[e] -= x
                for v in touches[i]:
                    views[v] += x
                counts[i] = x
                dfs(i + 1, delivered + x)
                counts[i] = 0
                for e in paths[i]:
                    caps[e] += x
                for v in touches[i]:
                    views[v] -= x

        dfs(0, 0)

    if best is None:
        raise OracleError("no assignment found; is the network connected?")
    tau, counts, argmax = best
    named = tuple(
        (paths[i], c) for i, c in enumerate(counts) if c > 0
    )
    return ConverseCertificate(
        rate=best_rate,
        tau=tau,
        counts=named,
        worst_node=internal[argmax] if argmax is not None else None,
        explored=explored,
    )


# -- node-cut structure of optimal flows -------------------------------


@dataclass(frozen=True)
class NodeCutCertificate:
    """A minimal node-cut whose members are all flow-pinned.

    Every member either carries exactly the balance value ``lam`` or
    exactly its residual capacity (in/out degree after discarding edges
    internal to the cut), witnessing that the optimum is wedged between
    secrecy and capacity constraints.
    """

    cut: tuple[str, ...]
    lam_members: tuple[str, ...]
    cap_members: tuple[str, ...]
    lam: Fraction

    def to_json_dict(self) -> dict:
        return {
            "cut": list(self.cut),
            "balance_constrained": list(self.lam_members),
            "capacity_constrained": list(self.cap_members),
            "lam": f"{self.lam.numerator}/{self.lam.denominator}",
        }


def node_flows(net: Network, solution: LpSolution) -> dict[str, Fraction]:
    """Total optimal flow through each internal node."""
    flows = {v: Fraction(0) for v in net.internal_nodes}
    for path, value in zip(solution.paths, solution.path_flows):
        for v in net.path_internal_nodes(path):
            flows[v] += value
    return flows


def nodecut_structure_check(
    net: Network, solution: LpSolution | None = None
) -> NodeCutCertificate | None:
    """Find a minimal node-cut that pins the z=1 optimum, if any.

    Scans minimal node-cuts in lexicographic order and returns the
    first whose members each carry either the balance value or their
    residual capacity; ``None`` if no cut qualifies.
    """
    if solution is None:
        solution = solve_rate(net, 1)
    if solution.z != 1 or solution.paths is None:
        raise OracleError("need a path-form solution for z = 1")
    flows = node_flows(net, solution)
    lam = solution.lam
    for cut in minimal_node_cuts(net):
        members = set(cut)
        lam_members: list[str] = []
        cap_members: list[str] = []
        ok = True
        for v in cut:
            inner_in = sum(
                1 for e in net.in_edges(v) if net.edges[e][0] in members
            )
            inner_out = sum(
                1 for e in net.out_edges(v) if net.edges[e][1] in members
            )
            capacity = min(
                len(net.in_edges(v)) - inner_in,
                len(net.out_edges(v)) - inner_out,
            )
            if flows[v] == lam:
                lam_members.append(v)
            elif flows[v] == capacity:
                cap_members.append(v)
            else:
                ok = False
                break
        if ok:
            return NodeCutCertificate(
                cut=cut,
                lam_members=tuple(lam_members),
                cap_members=tuple(cap_members),
                lam=lam,
            )
    return None


# -- LP cross-validation -----------------------------------------------


def lp_crosscheck(net: Network, z: int) -> dict:
    """Solve the same instance through every LP form and compare.

    The subset-balanced and pinned-throughput forms must agree for all
    ``z``; the edge form is only claimed equivalent at ``z = 1``.
    Returns exact objectives plus an ``equal`` verdict.
    """
    lp1 = solve_exact(build_lp1(net, z))
    lp1p = solve_exact(build_lp1_prime(net, z))
    result = {
        "z": z,
        "lp1": lp1.objective,
        "lp1_prime": lp1p.objective,
        "lp2": None,
        "equal": lp1.objective == lp1p.objective,
    }
    if z == 1:
        lp2 = solve_exact(build_lp2(net, z))
        result["lp2"] = lp2.objective
        result["equal"] = result["equal"] and lp2.objective == lp1p.objective
    return result
