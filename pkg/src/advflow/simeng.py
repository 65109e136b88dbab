"""Trial engine: route coded generations past a node adversary.

One trial encodes a fresh generation, walks every packet along its
scheduled path, lets the adversary observe and rewrite at the nodes it
owns, then decodes whatever reaches the terminal.  Campaigns repeat this
with per-trial seeding derived from ``(seed, trial)``, so results are
byte-identical across runs and independent of worker count.
"""

from __future__ import annotations

import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Any, Mapping

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import adversary as adv
from . import codec as cd
from .corpus import GRAPH_NAMES, load_graph
from .exactlp import solve_rate
from .flowplan import RoutingSchedule, make_plan, make_schedule
from .netgraph import Network, load as load_network


class SimError(ValueError):
    """Invalid simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    """One campaign: network, code, adversary, and trial budget."""

    network: str
    z: int = 1
    codec: str = "eaves"
    q: int | None = None
    n: int | None = None
    trials: int = 100
    seed: int = 0
    jobs: int = 1
    adversary: adv.AdversarySpec | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise SimError("trials must be positive")
        if self.jobs < 1:
            raise SimError("jobs must be positive")
        if self.codec not in cd.KINDS:
            raise SimError(f"unknown codec {self.codec!r}")
        if self.adversary is not None:
            if self.adversary.z != self.z:
                raise SimError(
                    f"adversary budget {self.adversary.z} disagrees with "
                    f"configured z={self.z}"
                )
            adv.check_compat(self.codec, self.adversary.model)


def config_from_dict(data: Mapping[str, Any]) -> SimConfig:
    """Build a :class:`SimConfig` from a parsed TOML table."""
    known = {"network", "z", "codec", "q", "n", "trials", "seed", "jobs"}
    fields: dict[str, Any] = {}
    for key, value in data.items():
        if key == "adversary":
            sub = dict(value)
            subset = sub.get("subset")
            if subset == "optimize":
                subset = None
            elif subset is not None:
                subset = tuple(str(v) for v in subset)
            try:
                fields["adversary"] = adv.AdversarySpec(
                    model=sub.pop("model"),
                    z=int(sub.pop("z", data.get("z", 1))),
                    subset=subset,
                    strategy=sub.pop("strategy", "pass-through"),
                    seed=int(sub.pop("seed", 0)),
                )
            except KeyError as exc:
                raise SimError(f"adversary table needs a {exc} entry") from None
            sub.pop("subset", None)
            if sub:
                raise SimError(f"unknown adversary keys: {sorted(sub)}")
        elif key in known:
            fields[key] = value
        else:
            raise SimError(f"unknown config key {key!r}")
    if "network" not in fields:
        raise SimError("config needs a network entry")
    try:
        return SimConfig(**fields)
    except TypeError as exc:
        raise SimError(str(exc)) from None


def config_from_toml(path: str | FsPath) -> SimConfig:
    with open(path, "rb") as fh:
        return config_from_dict(tomllib.load(fh))


def resolve_network(name: str) -> Network:
    """Accept a bundled graph name or a path to a graph file."""
    if name in GRAPH_NAMES:
        return load_graph(name)
    return load_network(name)


# -- single trial ------------------------------------------------------


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one generation.

    ``detected`` means the decoder refused to answer; ``undetected``
    means it answered with the wrong message (the bad case jamming
    bounds control).  ``leakage`` is the analytic message-rank exposed
    to the observing subset, or ``None`` when nobody observes.
    """

    success: bool
    detected: bool
    undetected: bool
    accepted: int
    leakage: int | None


def deliver(
    net: Network,
    schedule: RoutingSchedule,
    params: cd.CodecParams,
    packets: np.ndarray,
    spec: adv.AdversarySpec | None,
    subset: tuple[str, ...],
    adv_rng: np.random.Generator,
) -> tuple[np.ndarray, adv.CausalView]:
    """Walk every packet along its path; return what the terminal gets.

    Packets advance slot by slot in packet-id order.  An owned node's
    incoming edge is recorded into the view when the packet arrives and
    its outgoing edge is rewritten when the packet departs, so within a
    slot an upstream rewrite is visible downstream but never the other
    way around.
    """
    plan = schedule.plan
    view = adv.CausalView(mask_seed=params.kind != "eaves")
    watched: set[int] = set()
    rewrite: set[int] = set()
    strategy: adv.StrategyFn | None = None
    if spec is not None:
        watched = adv.watched_edges(spec, net, subset)
        if spec.jams:
            rewrite = adv.rewrite_edges(net, subset)
            strategy = adv.strategy_fn(spec.strategy)
    current = [packets[pid].copy() for pid in range(params.N)]
    paths = plan.packets
    for slot in range(plan.tau):
        for pid in schedule.packets_in_slot(slot):
            for edge in paths[pid]:
                if edge in rewrite and strategy is not None:
                    ctx = adv.CorruptionContext(
                        params=params,
                        schedule=schedule,
                        net=net,
                        view=view,
                        slot=slot,
                        edge=edge,
                        packet_id=pid,
                        rng=adv_rng,
                    )
                    current[pid] = adv.apply_corruption(
                        params, current[pid], strategy(ctx)
                    )
                if edge in watched:
                    view.record(slot, edge, pid, current[pid])
    return np.stack(current), view


def run_generation(
    net: Network,
    schedule: RoutingSchedule,
    params: cd.CodecParams,
    spec: adv.AdversarySpec | None,
    subset: tuple[str, ...],
    rng: np.random.Generator,
    adv_rng: np.random.Generator,
    leak_cache: dict[Any, int] | None = None,
) -> TrialResult:
    """Encode, deliver, decode, and account one generation."""
    gen = cd.random_generation(params, rng)
    delivered, _ = deliver(
        net, schedule, params, gen.packets, spec, subset, adv_rng
    )
    result = cd.decode(params, delivered)
    success = bool(result.ok and np.array_equal(result.message, gen.message))
    undetected = bool(result.ok) and not success
    leakage: int | None = None
    if spec is not None and spec.eavesdrops and params.kind != "jam":
        observed = schedule.plan.packets_through(subset)
        key = None if params.kind == "eaves" else gen.rho
        if leak_cache is not None and key in leak_cache:
            leakage = leak_cache[key]
        else:
            leakage = cd.leakage_dimension(params, observed, rho=gen.rho)
            if leak_cache is not None:
                leak_cache[key] = leakage
    return TrialResult(
        success=success,
        detected=not result.ok,
        undetected=undetected,
        accepted=len(result.accepted),
        leakage=leakage,
    )


# -- campaign ----------------------------------------------------------


@dataclass(frozen=True)
class SimReport:
    """Aggregated campaign outcome with exact rates."""

    config: SimConfig
    subset: tuple[str, ...]
    params: cd.CodecParams
    tau: int
    rate: Fraction
    trials: int
    successes: int
    detected: int
    undetected: int
    max_leakage: int | None

    @property
    def failure_rate(self) -> Fraction:
        return Fraction(self.trials - self.successes, self.trials)

    def to_json_dict(self) -> dict:
        spec = self.config.adversary
        return {
            "network": self.config.network,
            "z": self.config.z,
            "codec": self.params.to_json_dict(),
            "adversary": None
            if spec is None
            else {
                "model": spec.model,
                "subset": list(self.subset),
                "strategy": spec.strategy,
                "seed": spec.seed,
            },
            "tau": self.tau,
            "rate": f"{self.rate.numerator}/{self.rate.denominator}",
            "trials": self.trials,
            "successes": self.successes,
            "detected_failures": self.detected,
            "undetected_failures": self.undetected,
            "failure_rate": (
                f"{self.failure_rate.numerator}/{self.failure_rate.denominator}"
            ),
            "max_leakage": self.max_leakage,
            "seed": self.config.seed,
        }


def _campaign_parts(config: SimConfig):
    net = resolve_network(config.network)
    solution = solve_rate(net, config.z)
    plan = make_plan(net, solution)
    schedule = make_schedule(plan)
    params = cd.params_for_plan(plan, config.codec, q=config.q, n=config.n)
    spec = config.adversary
    if spec is None:
        subset: tuple[str, ...] = ()
    elif spec.subset is not None:
        missing = [v for v in spec.subset if v not in net.internal_nodes]
        if missing:
            raise SimError(f"subset nodes not internal: {missing}")
        subset = tuple(spec.subset)
    else:
        # Worst case by the plan's own exposure measure: the subset
        # carrying the most packets per generation (ties break
        # lexicographically).
        subset, _ = adv.worst_case_subset(
            net,
            spec.z,
            lambda combo: len(plan.packets_through(combo)),
        )
    return net, schedule, params, spec, subset


def _run_trials(config: SimConfig, lo: int, hi: int) -> tuple[int, int, int, int]:
    """Run trials ``lo..hi-1``; returns (successes, detected, undetected, leak)."""
    net, schedule, params, spec, subset = _campaign_parts(config)
    leak_cache: dict[Any, int] = {}
    successes = detected = undetected = 0
    max_leak = -1
    for trial in range(lo, hi):
        rng = np.random.default_rng([config.seed, trial])
        adv_seed = spec.seed if spec is not None else 0
        adv_rng = np.random.default_rng([adv_seed, trial])
        res = run_generation(
            net, schedule, params, spec, subset, rng, adv_rng, leak_cache
        )
        successes += res.success
        detected += res.detected
        undetected += res.undetected
        if res.leakage is not None:
            max_leak = max(max_leak, res.leakage)
    return successes, detected, undetected, max_leak


def run_campaign(config: SimConfig) -> SimReport:
    """Run all trials, possibly across processes, and aggregate.

    Per-trial generators are seeded from ``(seed, trial)``, so the
    aggregate is identical for any ``jobs`` value.
    """
    started = time.monotonic()
    net, schedule, params, spec, subset = _campaign_parts(config)
    trials = config.trials
    jobs = min(config.jobs, trials)
    if jobs <= 1:
        parts = [_run_trials(config, 0, trials)]
    else:
        step = -(-trials // jobs)
        spans = [
            (lo, min(lo + step, trials)) for lo in range(0, trials, step)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(
                pool.map(
                    _run_trials,
                    [config] * len(spans),
                    [lo for lo, _ in spans],
                    [hi for _, hi in spans],
                )
            )
    successes = sum(p[0] for p in parts)
    detected = sum(p[1] for p in parts)
    undetected = sum(p[2] for p in parts)
    leak_values = [p[3] for p in parts if p[3] >= 0]
    max_leak = max(leak_values) if leak_values else None
    plan = schedule.plan
    report = SimReport(
        config=config,
        subset=subset,
        params=params,
        tau=plan.tau,
        rate=_code_rate(params, plan.tau),
        trials=trials,
        successes=successes,
        detected=detected,
        undetected=undetected,
        max_leakage=max_leak,
    )
    elapsed = time.monotonic() - started
    print(
        f"{trials} trials on {config.network} ({config.codec}): "
        f"{successes} ok, {detected} detected, {undetected} undetected "
        f"[{elapsed:.2f}s]",
        file=sys.stderr,
    )
    return report


def _code_rate(params: cd.CodecParams, tau: int) -> Fraction:
    """Message packets-per-slot actually carried by the code."""
    if params.kind == "eaves":
        return Fraction(params.message_packets, tau)
    return Fraction(params.reduced_packets, tau)
