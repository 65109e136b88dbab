"""Node adversaries: what they see, what they may rewrite, and when.

An adversary owns up to ``z`` internal nodes.  Localized models observe
only packets arriving at owned nodes; the omniscient model observes all
traffic.  Jamming models rewrite packets leaving owned nodes.  Every
model is causal: a corruption emitted in slot ``i`` is a function of
observations up to slot ``i`` only.

Corruption strategies receive a :class:`CausalView` plus the public code
data (parameters, encoder, schedule, network).  They never receive the
realized key symbols or the hash seed: the seed rides in the trailing
symbol of each packet, which arrives after the payload it certifies, so
a causal rewriter must commit its payload without it.  Views hand
strategies seed-masked copies to enforce exactly that; strategies that
need to "leave traffic alone" return no corruption at all rather than
reconstructing packets from the masked view.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .codec import CodecParams
from .flowplan import RoutingSchedule
from .netgraph import Network, internal_subsets

MODELS = (
    "localized-eavesdrop",
    "localized-jam",
    "localized-eavesjam",
    "omniscient-jam",
)

STRATEGIES = (
    "pass-through",
    "uniform-random",
    "additive-random-error",
    "targeted-hash-forgery",
)

_JAMMING = {"localized-jam", "localized-eavesjam", "omniscient-jam"}
_OBSERVING = {"localized-eavesdrop", "localized-eavesjam"}


class AdversaryError(ValueError):
    """Invalid adversary configuration."""


@dataclass(frozen=True)
class AdversarySpec:
    """Which adversary to run.

    Attributes:
        model: One of :data:`MODELS`.
        z: Number of internal nodes the adversary controls.
        subset: Explicit controlled nodes, or ``None`` to sweep all
            size-``z`` subsets and keep the worst.
        strategy: One of :data:`STRATEGIES` (ignored by the pure
            eavesdropper, which never transmits).
        seed: Seed for the strategy's private randomness.
    """

    model: str
    z: int
    subset: tuple[str, ...] | None = None
    strategy: str = "pass-through"
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise AdversaryError(f"unknown adversary model {self.model!r}")
        if self.strategy not in STRATEGIES:
            raise AdversaryError(f"unknown strategy {self.strategy!r}")
        if self.z < 1:
            raise AdversaryError("z must be at least 1")
        if self.subset is not None and len(self.subset) > self.z:
            raise AdversaryError(
                f"subset {self.subset} exceeds the budget z={self.z}"
            )

    @property
    def jams(self) -> bool:
        return self.model in _JAMMING

    @property
    def eavesdrops(self) -> bool:
        return self.model in _OBSERVING

    @property
    def omniscient(self) -> bool:
        return self.model == "omniscient-jam"


def check_compat(codec_kind: str, model: str) -> None:
    """Reject pairings the schemes make no promise about.

    The eaves codec carries no integrity machinery, so running any
    jamming adversary against it is a configuration error.
    """
    if model not in MODELS:
        raise AdversaryError(f"unknown adversary model {model!r}")
    if codec_kind == "eaves" and model in _JAMMING:
        raise AdversaryError(
            "the eaves codec makes no integrity claim; pick the jam or "
            "eavesjam codec for jamming adversaries"
        )


@dataclass(frozen=True)
class Observation:
    """One packet sighting: where, when, and the (seed-masked) symbols."""

    slot: int
    edge: int
    packet_id: int
    symbols: np.ndarray


@dataclass
class CausalView:
    """Sightings accumulated so far, in arrival order.

    The engine appends as traffic crosses watched edges; strategies may
    read everything recorded, which by construction never runs ahead of
    the slot being corrupted.
    """

    mask_seed: bool
    observations: list[Observation] = field(default_factory=list)

    def record(
        self, slot: int, edge: int, packet_id: int, symbols: np.ndarray
    ) -> None:
        shown = symbols.copy()
        if self.mask_seed and shown.shape[0] > 0:
            shown[-1] = 0
        self.observations.append(Observation(slot, edge, packet_id, shown))

    def packets_seen(self) -> dict[int, np.ndarray]:
        """Latest sighting of each packet id."""
        return {obs.packet_id: obs.symbols for obs in self.observations}


@dataclass(frozen=True)
class CorruptionContext:
    """Everything a strategy may consult when rewriting one edge."""

    params: CodecParams
    schedule: RoutingSchedule
    net: Network
    view: CausalView
    slot: int
    edge: int
    packet_id: int
    rng: np.random.Generator


#: A corruption is ``None`` (leave the packet alone), ``("set", values)``
#: (overwrite the outgoing packet), or ``("add", noise)`` (the channel
#: adds *noise* symbol-wise; zero noise is exactly the identity).
Corruption = tuple[str, np.ndarray] | None

StrategyFn = Callable[[CorruptionContext], Corruption]


def _pass_through(ctx: CorruptionContext) -> Corruption:
    return None


def _uniform_random(ctx: CorruptionContext) -> Corruption:
    return "set", ctx.params.field.random(ctx.rng, ctx.params.n)


def _additive_random_error(ctx: CorruptionContext) -> Corruption:
    return "add", ctx.params.field.random(ctx.rng, ctx.params.n)


def _targeted_hash_forgery(ctx: CorruptionContext) -> Corruption:
    """Additive payload forgery with the most seed values on its side.

    The decoder accepts a rewritten payload iff the probe of the
    difference vanishes at the realized seed.  The difference is chosen
    as the coefficient vector of a polynomial with the maximum number of
    distinct roots its degree bound allows (roots ``1..L-1`` for payload
    length ``L``), so the forgery survives for exactly ``L - 1`` seeds,
    the degree bound, without the strategy ever reading the seed.
    """
    params = ctx.params
    if params.kind == "eaves":
        raise AdversaryError(
            "targeted-hash-forgery needs a digest-bearing codec"
        )
    L = params.payload_len
    gf = params.field
    coeffs = np.zeros(L, dtype=np.int64)
    coeffs[0] = 1
    degree = 0
    for root in range(1, L):
        # multiply the polynomial by (X - root)
        shifted = np.zeros(L, dtype=np.int64)
        shifted[1 : degree + 2] = coeffs[: degree + 1]
        coeffs = gf.sub(shifted, gf.mul(coeffs, root))
        degree += 1
    noise = np.zeros(params.n, dtype=np.int64)
    noise[:L] = coeffs
    return "add", noise


_STRATEGY_FNS: dict[str, StrategyFn] = {
    "pass-through": _pass_through,
    "uniform-random": _uniform_random,
    "additive-random-error": _additive_random_error,
    "targeted-hash-forgery": _targeted_hash_forgery,
}


def strategy_fn(name: str) -> StrategyFn:
    """Look up a built-in corruption strategy by name."""
    try:
        return _STRATEGY_FNS[name]
    except KeyError:
        raise AdversaryError(f"unknown strategy {name!r}") from None


def apply_corruption(
    params: CodecParams, current: np.ndarray, corruption: Corruption
) -> np.ndarray:
    """Resolve a strategy's answer against the true outgoing packet."""
    if corruption is None:
        return current
    mode, values = corruption
    gf = params.field
    values = gf.array(values)
    if values.shape != (params.n,):
        raise AdversaryError(
            f"corruption must cover all {params.n} symbols, got {values.shape}"
        )
    if mode == "set":
        return values
    if mode == "add":
        return gf.add(current, values)
    raise AdversaryError(f"unknown corruption mode {mode!r}")


def watched_edges(spec: AdversarySpec, net: Network, subset: Sequence[str]) -> set[int]:
    """Edges whose traffic the adversary observes."""
    if spec.omniscient:
        return set(range(len(net.edges)))
    return {e for v in subset for e in net.in_edges(v)}


def rewrite_edges(net: Network, subset: Sequence[str]) -> set[int]:
    """Edges the adversary may rewrite: all edges leaving owned nodes."""
    return {e for v in subset for e in net.out_edges(v)}


def worst_case_subset(
    net: Network,
    z: int,
    evaluate: Callable[[tuple[str, ...]], object],
) -> tuple[tuple[str, ...], object]:
    """Sweep all size-``z`` internal subsets; return the argmax.

    Subsets are scanned lexicographically and ties keep the first, so
    the sweep is deterministic.  *evaluate* must return comparable
    values (higher is worse for the defender).
    """
    size = min(z, len(net.internal_nodes))
    best: tuple[str, ...] | None = None
    best_value = None
    for combo in internal_subsets(net, size):
        value = evaluate(combo)
        if best is None or value > best_value:
            best, best_value = combo, value
    if best is None:
        raise AdversaryError("network has no internal nodes to control")
    return best, best_value
