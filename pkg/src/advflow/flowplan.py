"""Turn an exact flow solution into packets, slots, and quantized variants.

A plan scales the optimal path flows by the smallest integer ``tau`` that
clears every denominator; each path then carries an integer number of
packets per generation of ``tau`` slots.  A schedule places each packet in
one slot so that no edge carries two packets in the same slot; a packet
crosses all edges of its path within its slot.

Quantization rebuilds an integral plan at a caller-chosen generation
length ``tau'`` by flooring the scaled edge flows, and certifies that the
rate loss stays below ``|E| / tau'``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .exactlp import LpSolution
from .netgraph import Network, Path, integer_max_flow, internal_subsets


class PlanError(RuntimeError):
    """A solution cannot be turned into an integral plan."""


class ScheduleError(RuntimeError):
    """No slot assignment satisfies the per-edge exclusivity rule."""


def _frac(value) -> str:
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class RoutingPlan:
    """An integral packet routing for one generation.

    Attributes:
        net: The network routed over.
        z: Adversary budget the balance value was computed for.
        tau: Generation length in slots.
        counts: ``(path, packets per generation)`` pairs, lexicographic.
        lam: Balance value of the underlying solution (worst subset flow).
        flow_value: Total flow, ``N / tau``.
        rate: Secure message rate, ``flow_value - lam``.
    """

    net: Network
    z: int
    tau: int
    counts: tuple[tuple[Path, int], ...]
    lam: Fraction
    flow_value: Fraction
    rate: Fraction

    @property
    def key_rate(self) -> Fraction:
        """Key consumption per slot; equals the balance value."""
        return self.lam

    @property
    def packets(self) -> tuple[Path, ...]:
        """Path of each packet; index in this tuple is the packet id."""
        out: list[Path] = []
        for path, count in self.counts:
            out.extend([path] * count)
        return tuple(out)

    @property
    def total_packets(self) -> int:
        return sum(c for _, c in self.counts)

    @property
    def key_packets(self) -> int:
        """Packets' worth of key per generation, ``tau * lam``."""
        value = self.tau * self.lam
        if value.denominator != 1:
            raise PlanError(f"tau*lam is not integral: {value}")
        return int(value)

    @property
    def message_packets(self) -> int:
        """Packets' worth of message per generation, ``N - tau*lam``."""
        return self.total_packets - self.key_packets

    def packets_through(self, nodes) -> tuple[int, ...]:
        """Ids of packets whose path touches any node in *nodes*."""
        members = frozenset(nodes)
        hit: list[int] = []
        for pid, path in enumerate(self.packets):
            if self.net.path_internal_nodes(path) & members:
                hit.append(pid)
        return tuple(hit)

    def to_json_dict(self) -> dict:
        return {
            "z": self.z,
            "tau": self.tau,
            "paths": [list(p) for p, _ in self.counts],
            "packets_per_path": [c for _, c in self.counts],
            "total_packets": self.total_packets,
            "message_packets": self.message_packets,
            "key_packets": self.key_packets,
            "rate": _frac(self.rate),
            "key_rate": _frac(self.key_rate),
            "flow_value": _frac(self.flow_value),
        }


def make_plan(net: Network, solution: LpSolution) -> RoutingPlan:
    """Scale a pinned path-form solution to integral packet counts.

    ``tau`` is the least common multiple of the denominators of the
    positive path flows, the smallest generation length that makes every
    count integral.

    Raises:
        PlanError: for non-path solutions or when total flow misses the
            min cut (plans require the pinned form).
    """
    if not solution.paths:
        raise PlanError("plans need a path-form solution")
    flows = solution.nonzero_path_flows()
    total = sum(flows.values(), Fraction(0))
    from .netgraph import min_cut

    cut = min_cut(net)
    if total != cut:
        raise PlanError(
            f"total flow {total} does not equal the min cut {cut}; "
            "solve the pinned form first"
        )
    tau = lcm(*(f.denominator for f in flows.values())) if flows else 1
    counts = tuple(
        sorted((path, int(f * tau)) for path, f in flows.items())
    )
    return RoutingPlan(
        net=net,
        z=solution.z,
        tau=tau,
        counts=counts,
        lam=solution.lam,
        flow_value=total,
        rate=total - solution.lam,
    )


@dataclass(frozen=True)
class RoutingSchedule:
    """Slot placement for every packet of a plan."""

    plan: RoutingPlan
    packet_slot: tuple[int, ...]

    @property
    def tau(self) -> int:
        return self.plan.tau

    def edge_map(self) -> dict[tuple[int, int], int]:
        """``(edge, slot) -> packet id`` for every traversal."""
        out: dict[tuple[int, int], int] = {}
        for pid, path in enumerate(self.plan.packets):
            slot = self.packet_slot[pid]
            for e in path:
                out[(e, slot)] = pid
        return out

    def packets_in_slot(self, slot: int) -> tuple[int, ...]:
        return tuple(
            pid for pid, s in enumerate(self.packet_slot) if s == slot
        )

    def to_json_dict(self) -> dict:
        slots: list[dict] = []
        for slot in range(self.tau):
            edges = {
                str(e): pid
                for (e, s), pid in sorted(self.edge_map().items())
                if s == slot
            }
            slots.append({"slot": slot, "edges": edges})
        return {
            "tau": self.tau,
            "packet_slots": list(self.packet_slot),
            "packet_paths": [list(p) for p in self.plan.packets],
            "slots": slots,
        }


def make_schedule(plan: RoutingPlan) -> RoutingSchedule:
    """Assign each packet the earliest slot where its whole path is free.

    Packets are taken in plan order (paths lexicographic, copies
    adjacent), which makes the assignment deterministic.

    Raises:
        ScheduleError: if some packet fits no slot; with counts derived
            from a feasible solution this indicates an invariant
            violation upstream, not an expected outcome.
    """
    used: list[set[int]] = [set() for _ in range(plan.tau)]
    assignment: list[int] = []
    for pid, path in enumerate(plan.packets):
        placed = False
        for slot in range(plan.tau):
            if not used[slot].intersection(path):
                used[slot].update(path)
                assignment.append(slot)
                placed = True
                break
        if not placed:
            raise ScheduleError(
                f"packet {pid} (path {path}) fits no slot out of {plan.tau}"
            )
    return RoutingSchedule(plan=plan, packet_slot=tuple(assignment))


def verify_schedule(schedule: RoutingSchedule) -> None:
    """Exhaustively recheck the schedule invariants.

    Raises:
        ScheduleError: on an edge carrying two packets in one slot, a
            slot out of range, or a packet count mismatch.
    """
    plan = schedule.plan
    if len(schedule.packet_slot) != plan.total_packets:
        raise ScheduleError("packet count mismatch")
    seen: set[tuple[int, int]] = set()
    for pid, path in enumerate(plan.packets):
        slot = schedule.packet_slot[pid]
        if not 0 <= slot < plan.tau:
            raise ScheduleError(f"packet {pid} slot {slot} out of range")
        for e in path:
            key = (e, slot)
            if key in seen:
                raise ScheduleError(f"edge {e} used twice in slot {slot}")
            seen.add(key)


# ---------------------------------------------------------------------------
# Quantization


@dataclass(frozen=True)
class QuantizeCertificate:
    """Rate-loss certificate for a quantized plan."""

    tau_prime: int
    rate: Fraction
    quantized_rate: Fraction
    bound: Fraction

    @property
    def loss(self) -> Fraction:
        return self.rate - self.quantized_rate

    @property
    def ok(self) -> bool:
        return self.loss < self.bound

    def to_json_dict(self) -> dict:
        return {
            "tau_prime": self.tau_prime,
            "rate": _frac(self.rate),
            "quantized_rate": _frac(self.quantized_rate),
            "loss": _frac(self.loss),
            "bound": _frac(self.bound),
            "ok": self.ok,
        }


def _lex_decompose(net: Network, flows: list[int]) -> dict[Path, int]:
    """Split an integral flow into unit paths, smallest edge index first."""
    residual = list(flows)
    counts: dict[Path, int] = {}
    while True:
        path: list[int] = []
        v = net.source
        while v != net.terminal:
            e = next(
                (e for e in net.out_edges(v) if residual[e] > 0), None
            )
            if e is None:
                break
            path.append(e)
            v = net.edges[e][1]
        if v != net.terminal:
            break
        for e in path:
            residual[e] -= 1
        key = tuple(path)
        counts[key] = counts.get(key, 0) + 1
    return counts


def quantize(
    net: Network, solution: LpSolution, tau_prime: int
) -> tuple[RoutingPlan, QuantizeCertificate]:
    """Rebuild an integral plan at generation length *tau_prime*.

    Edge flows are scaled by ``tau_prime`` and floored; a maximum integral
    flow under the floored capacities is re-decomposed into paths.  When
    *tau_prime* is a multiple of the natural generation length the original
    decomposition is reused scaled, so the loss is exactly zero.  The
    certificate states the rate loss and its bound ``|E| / tau_prime``.
    """
    if tau_prime < 1:
        raise ValueError("tau_prime must be positive")
    if not solution.paths:
        raise PlanError("quantize needs a path-form solution")
    base = make_plan(net, solution)

    if tau_prime % base.tau == 0:
        scale = tau_prime // base.tau
        counts = tuple((p, c * scale) for p, c in base.counts)
    else:
        floored = [
            int(Fraction(tau_prime) * f) for f in solution.edge_flows
        ]
        index = {v: i for i, v in enumerate(net.nodes)}
        arcs = [
            (index[t], index[h], floored[e])
            for e, (t, h) in enumerate(net.edges)
        ]
        _, flows = integer_max_flow(
            len(net.nodes), arcs, index[net.source], index[net.terminal]
        )
        counts = tuple(sorted(_lex_decompose(net, flows).items()))

    total = sum(c for _, c in counts)
    worst = 0
    size = min(solution.z, len(net.internal_nodes))
    for combo in internal_subsets(net, size):
        members = frozenset(combo)
        hit = sum(
            c
            for p, c in counts
            if net.path_internal_nodes(p) & members
        )
        worst = max(worst, hit)

    quantized = RoutingPlan(
        net=net,
        z=solution.z,
        tau=tau_prime,
        counts=counts,
        lam=Fraction(worst, tau_prime),
        flow_value=Fraction(total, tau_prime),
        rate=Fraction(total - worst, tau_prime),
    )
    certificate = QuantizeCertificate(
        tau_prime=tau_prime,
        rate=base.rate,
        quantized_rate=quantized.rate,
        bound=Fraction(len(net.edges), tau_prime),
    )
    return quantized, certificate
