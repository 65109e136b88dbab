"""Field codecs for one routed generation of packets.

Three schemes over a prime field, all built from one Vandermonde family
with evaluation points ``1, 2, ...`` (zero is excluded on purpose: a zero
point would blank a row of the trailing key-column block and break the
rank argument behind the secrecy guarantee):

``eaves``
    Coset code against a passive observer.  Each of the ``n`` symbol
    positions is an independent instance: the ``N`` packets carry
    ``V @ (message; key)`` where ``V`` is square.  Any set of at most
    ``key_packets`` observed packets meets full key rank, so it reveals
    nothing about the message.

``jam``
    Detection code against packet replacement.  The message is one flat
    vector; packet ``j`` carries its slice ``V(p_j) @ x`` of payload
    symbols plus a shared trailer ``[D | rho]`` where ``D_j`` is the
    degree-bounded probe of payload ``j`` under seed ``rho``.  The decoder
    majority-votes the trailer, discards payloads failing their probe,
    and solves the stacked system.  A forged payload committed without
    knowledge of ``rho`` survives for at most ``n - N - 2`` seeds.

``eavesjam``
    The jam construction with a key block appended to ``x`` so that the
    observable rows are covered by key columns; message length follows
    the combined-rate formula, and the key fills all residual decoding
    capacity, which dominates the observation rank at desk sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import log2

import numpy as np

from .flowplan import RoutingPlan
from .gf import (
    GF,
    GFError,
    InconsistentSystemError,
    SingularMatrixError,
    smallest_prime_above,
)

KINDS = ("eaves", "jam", "eavesjam")


class CodecError(ValueError):
    """Invalid codec parameters or inputs."""


@dataclass(frozen=True)
class CodecParams:
    """Shape of one generation's code.

    Attributes:
        kind: One of ``eaves``, ``jam``, ``eavesjam``.
        N: Packets per generation.
        tau: Slots per generation.
        key_packets: Worst-case packets observable or corruptible by the
            adversary over the generation (``tau * lambda``).
        n: Symbols per packet.
        q: Field order (prime).
    """

    kind: str
    N: int
    tau: int
    key_packets: int
    n: int
    q: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CodecError(f"unknown codec kind {self.kind!r}")
        if self.N < 1:
            raise CodecError("need at least one packet per generation")
        if not 0 <= self.key_packets <= self.N:
            raise CodecError("key budget must lie in [0, N]")
        if self.n < 1:
            raise CodecError("packets need at least one symbol")
        if self.kind == "eaves":
            if self.q <= self.N:
                raise CodecError(
                    f"field order {self.q} must exceed packet count {self.N}"
                )
        else:
            if self.n <= self.N + 1:
                raise CodecError(
                    f"packet length {self.n} must exceed N+1 = {self.N + 1}"
                )
            if 2 * self.key_packets >= self.N:
                raise CodecError(
                    "jamming codecs need the adversary budget below half "
                    f"the packets: 2*{self.key_packets} >= {self.N}"
                )
            if self.q <= self.payload_len * self.N:
                raise CodecError(
                    f"field order {self.q} must exceed the point count "
                    f"{self.payload_len * self.N}"
                )
        try:
            GF(self.q)
        except GFError as exc:
            raise CodecError(str(exc)) from exc

    # -- derived sizes -------------------------------------------------

    @property
    def field(self) -> GF:
        return GF(self.q)

    @property
    def redundancy(self) -> Fraction:
        """Per-packet overhead fraction: 0, or (N+1)/n for the trailer."""
        if self.kind == "eaves":
            return Fraction(0)
        return Fraction(self.N + 1, self.n)

    @property
    def bits_per_symbol(self) -> float:
        return log2(self.q)

    @property
    def payload_len(self) -> int:
        """Payload symbols per packet (trailer excluded)."""
        if self.kind == "eaves":
            return self.n
        return self.n - self.N - 1

    @property
    def message_packets(self) -> int:
        """Message rows for the eaves codec, ``N - key_packets``."""
        return self.N - self.key_packets

    @property
    def reduced_packets(self) -> int:
        """Message size, in packet-equivalents, for the jamming codecs."""
        room = Fraction(self.n - self.N - 1, self.n)
        if self.kind == "jam":
            usable = self.N - self.key_packets
        elif self.kind == "eavesjam":
            usable = self.N - 2 * self.key_packets
        else:
            raise CodecError("reduced_packets applies to jamming codecs")
        value = room * usable
        return max(0, int(value.numerator // value.denominator))

    @property
    def message_symbols(self) -> int:
        """Message symbols per generation."""
        if self.kind == "eaves":
            return self.message_packets * self.n
        return self.n * self.reduced_packets

    @property
    def key_symbols(self) -> int:
        """Key symbols per generation."""
        if self.kind == "eaves":
            return self.key_packets * self.n
        if self.kind == "jam":
            return 0
        return self.x_len - self.message_symbols

    @property
    def x_len(self) -> int:
        """Length of the flat coded vector for the jamming codecs."""
        if self.kind == "eaves":
            raise CodecError("the eaves codec has no flat vector")
        if self.kind == "jam":
            return self.n * self.reduced_packets
        return (self.N - self.key_packets) * self.payload_len

    @cached_property
    def _vandermonde(self) -> np.ndarray:
        gf = self.field
        if self.kind == "eaves":
            points = np.arange(1, self.N + 1)
            return gf.vandermonde(points, self.N)
        points = np.arange(1, self.payload_len * self.N + 1)
        return gf.vandermonde(points, self.x_len)

    def encoder_matrix(self) -> np.ndarray:
        """The full Vandermonde encoder (copy)."""
        return self._vandermonde.copy()

    def packet_rows(self, packet: int) -> np.ndarray:
        """Encoder rows that produce *packet*'s payload."""
        if self.kind == "eaves":
            return self._vandermonde[packet : packet + 1]
        lo = packet * self.payload_len
        return self._vandermonde[lo : lo + self.payload_len]

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "N": self.N,
            "tau": self.tau,
            "key_packets": self.key_packets,
            "n": self.n,
            "q": self.q,
            "redundancy": f"{self.redundancy.numerator}/{self.redundancy.denominator}",
            "message_symbols": self.message_symbols,
            "key_symbols": self.key_symbols,
        }
        if self.kind != "eaves":
            out["reduced_packets"] = self.reduced_packets
        return out


def params_for_plan(
    plan: RoutingPlan,
    kind: str,
    q: int | None = None,
    n: int | None = None,
) -> CodecParams:
    """Codec parameters matching *plan*'s packet and key counts.

    Defaults: one symbol per packet for ``eaves`` (positions are
    independent instances anyway); ``N + 5`` symbols for the jamming
    codecs; the smallest prime exceeding the needed evaluation points.
    """
    if kind not in KINDS:
        raise CodecError(f"unknown codec kind {kind!r}")
    N = plan.total_packets
    if n is None:
        n = 1 if kind == "eaves" else N + 5
    if q is None:
        if kind == "eaves":
            q = smallest_prime_above(N)
        else:
            q = smallest_prime_above(max(N, (n - N - 1) * N))
    return CodecParams(
        kind=kind,
        N=N,
        tau=plan.tau,
        key_packets=plan.key_packets,
        n=n,
        q=q,
    )


# ---------------------------------------------------------------------------
# Encode


@dataclass(frozen=True)
class Generation:
    """One generation's coded traffic and the secrets behind it."""

    params: CodecParams
    message: np.ndarray
    key: np.ndarray | None
    rho: int | None
    packets: np.ndarray  # shape (N, n)


def encode(
    params: CodecParams,
    message: np.ndarray,
    key: np.ndarray | None = None,
    rho: int | None = None,
) -> Generation:
    """Encode *message* into ``N`` packets of ``n`` symbols.

    Shapes: ``eaves`` takes message ``(message_packets, n)`` and key
    ``(key_packets, n)``; the jamming codecs take flat vectors of
    ``message_symbols`` and ``key_symbols`` plus a seed ``rho``.
    """
    gf = params.field
    message = gf.array(message)
    if params.kind == "eaves":
        if message.shape != (params.message_packets, params.n):
            raise CodecError(
                f"message must be {(params.message_packets, params.n)}, "
                f"got {message.shape}"
            )
        if key is None:
            raise CodecError("the eaves codec needs key rows")
        key = gf.array(key)
        if key.shape != (params.key_packets, params.n):
            raise CodecError(
                f"key must be {(params.key_packets, params.n)}, got {key.shape}"
            )
        x = np.vstack([message, key])
        packets = gf.matmul(params._vandermonde, x)
        return Generation(params, message, key, None, packets)

    if message.shape != (params.message_symbols,):
        raise CodecError(
            f"message must be flat of length {params.message_symbols}, "
            f"got {message.shape}"
        )
    if rho is None:
        raise CodecError("jamming codecs need a hash seed rho")
    rho = int(rho) % params.q
    if params.kind == "jam":
        if key is not None and np.asarray(key).size:
            raise CodecError("the jam codec takes no key")
        x = message
        key = None
    else:
        if key is None:
            raise CodecError("the eavesjam codec needs key symbols")
        key = gf.array(key)
        if key.shape != (params.key_symbols,):
            raise CodecError(
                f"key must be flat of length {params.key_symbols}, "
                f"got {key.shape}"
            )
        x = np.concatenate([message, key])

    payloads = gf.matmul(params._vandermonde, x).reshape(
        params.N, params.payload_len
    )
    probe = gf.hash_row(rho, params.payload_len)
    digests = gf.matmul(payloads, probe)
    packets = np.empty((params.N, params.n), dtype=np.int64)
    packets[:, : params.payload_len] = payloads
    packets[:, params.payload_len : params.n - 1] = digests[None, :]
    packets[:, params.n - 1] = rho
    return Generation(params, message, key, rho, packets)


def random_generation(
    params: CodecParams, rng: np.random.Generator
) -> Generation:
    """Encode a uniform message with uniform key material (and seed)."""
    gf = params.field
    if params.kind == "eaves":
        message = gf.random(rng, (params.message_packets, params.n))
        key = gf.random(rng, (params.key_packets, params.n))
        return encode(params, message, key)
    message = gf.random(rng, params.message_symbols)
    rho = int(rng.integers(0, params.q))
    if params.kind == "jam":
        return encode(params, message, rho=rho)
    key = gf.random(rng, params.key_symbols)
    return encode(params, message, key, rho=rho)


# ---------------------------------------------------------------------------
# Decode


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of decoding one generation."""

    ok: bool
    message: np.ndarray | None
    reason: str
    accepted: tuple[int, ...]


def decode(params: CodecParams, packets: np.ndarray) -> DecodeResult:
    """Decode received *packets* (shape ``(N, n)``).

    The eaves decoder inverts the square encoder.  The jamming decoders
    majority-vote the trailer, keep payloads passing their probe, and
    solve the stacked slices; any inconsistency or rank shortfall is a
    failure, never a silent wrong answer.
    """
    gf = params.field
    packets = gf.array(packets)
    if packets.shape != (params.N, params.n):
        raise CodecError(
            f"packets must be {(params.N, params.n)}, got {packets.shape}"
        )
    if params.kind == "eaves":
        x = gf.solve(params._vandermonde, packets)
        x = x.reshape(params.N, params.n)
        return DecodeResult(
            True, x[: params.message_packets], "ok", tuple(range(params.N))
        )

    trailer = packets[:, params.payload_len :]
    votes: dict[bytes, list[int]] = {}
    for j in range(params.N):
        votes.setdefault(trailer[j].tobytes(), []).append(j)
    winner = max(votes.values(), key=len)
    if 2 * len(winner) <= params.N:
        return DecodeResult(False, None, "no-majority", ())
    voted = trailer[winner[0]]
    digests, rho = voted[:-1], int(voted[-1])

    probe = gf.hash_row(rho, params.payload_len)
    checks = gf.matmul(packets[:, : params.payload_len], probe)
    accepted = tuple(
        j for j in range(params.N) if checks[j] == digests[j]
    )
    if not accepted:
        return DecodeResult(False, None, "rank-deficient", ())
    stack = np.vstack([params.packet_rows(j) for j in accepted])
    rhs = np.concatenate(
        [packets[j, : params.payload_len] for j in accepted]
    )
    try:
        x = gf.solve(stack, rhs)
    except InconsistentSystemError:
        return DecodeResult(False, None, "inconsistent", accepted)
    except SingularMatrixError:
        return DecodeResult(False, None, "rank-deficient", accepted)
    return DecodeResult(True, x[: params.message_symbols], "ok", accepted)


# ---------------------------------------------------------------------------
# Secrecy accounting


def observation_matrix(
    params: CodecParams,
    observed: tuple[int, ...],
    rho: int | None = None,
) -> tuple[np.ndarray, int]:
    """Linear map from secrets to what an observer of *observed* sees.

    Returns ``(A, key_start)``: rows of ``A`` are field functionals of
    the coded secrets, message columns first, key columns from
    ``key_start``.  For the eavesjam codec an observed packet also
    carries every packet's digest, so conditioned on the realized seed
    *rho* (itself message-independent) one probe row per packet joins
    the map; *rho* is therefore required there.
    """
    observed = tuple(sorted(set(observed)))
    if params.kind == "jam":
        raise CodecError("the jam codec makes no secrecy claim")
    if params.kind == "eaves":
        A = (
            params._vandermonde[list(observed)]
            if observed
            else np.zeros((0, params.N), dtype=np.int64)
        )
        return A, params.message_packets

    if not observed:
        return (
            np.zeros((0, params.x_len), dtype=np.int64),
            params.message_symbols,
        )
    if rho is None:
        raise CodecError("eavesjam observation map needs the realized seed")
    gf = params.field
    probe = gf.hash_row(rho, params.payload_len)
    blocks = [params.packet_rows(j) for j in observed]
    digests = gf.matmul(
        probe, params._vandermonde.reshape(params.N, params.payload_len, -1)
    )
    A = np.vstack(blocks + [digests])
    return A, params.message_symbols


def leakage_dimension(
    params: CodecParams, observed: tuple[int, ...], rho: int | None = None
) -> int:
    """Exact message dimensions exposed to an observer of *observed*.

    Computed as ``rank(A) - rank(A restricted to key columns)``; zero
    means the observations are statistically independent of the message
    (the key marginal covers everything seen).
    """
    gf = params.field
    A, key_start = observation_matrix(params, observed, rho)
    if A.shape[0] == 0:
        return 0
    return gf.rank(A) - gf.rank(A[:, key_start:])


def max_leakage(
    params: CodecParams,
    plan: RoutingPlan,
    z: int,
    seeds: tuple[int, ...] = (),
) -> tuple[int, dict[tuple[str, ...], int]]:
    """Worst leakage over every size-*z* internal subset of the plan's net.

    For the eavesjam codec the check runs once per seed in *seeds* and
    keeps the worst value.  Budget check: each subset must see at most
    ``key_packets`` packets; a violation raises, since it breaks the
    plan invariant the codec relies on.
    """
    from .netgraph import internal_subsets

    net = plan.net
    size = min(z, len(net.internal_nodes))
    per_subset: dict[tuple[str, ...], int] = {}
    worst = 0
    seed_list: tuple[int | None, ...]
    seed_list = (None,) if params.kind == "eaves" else tuple(seeds)
    if params.kind == "eavesjam" and not seed_list:
        raise CodecError("eavesjam leakage needs at least one seed")
    for combo in internal_subsets(net, size):
        observed = plan.packets_through(combo)
        if len(observed) > params.key_packets:
            raise CodecError(
                f"subset {combo} sees {len(observed)} packets, "
                f"budget is {params.key_packets}"
            )
        dim = max(
            leakage_dimension(params, observed, rho) for rho in seed_list
        )
        per_subset[combo] = dim
        worst = max(worst, dim)
    return worst, per_subset
