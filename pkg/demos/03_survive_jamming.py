"""Deliver the message even when the compromised node rewrites packets.

Secrecy is not enough if the owned node can also transmit garbage.  The
jamming codec appends a short trailer to every packet: digests of all
payloads under a hash seed that is revealed only in the final symbol.
The terminal majority-votes the trailer, discards payloads failing
their digest, and solves for the message from what remains.  A causal
rewriter must commit its forgery before the seed arrives, so it can
only gamble; this demo measures how rarely the gamble pays off.
"""

import numpy as np

from advflow import (
    AdversarySpec,
    SimConfig,
    decode,
    encode,
    load_graph,
    make_plan,
    params_for_plan,
    random_generation,
    run_campaign,
    solve_rate,
)
from advflow.adversary import CorruptionContext, CausalView, strategy_fn

net = load_graph("cockroach")
plan = make_plan(net, solve_rate(net, 1))
params = params_for_plan(plan, "jam")
print(f"jam codec: {params.N} packets of {params.n} symbols over GF({params.q})")
print(f"  payload {params.payload_len} symbols, trailer {params.N + 1} symbols")
print(f"  carries {params.reduced_packets} packet-equivalent of message per generation")
print()

# One corrupted packet, by hand.  The intact trailers win the vote,
# the forged payload fails its digest, and the decode still succeeds.
rng = np.random.default_rng(7)
gen = random_generation(params, rng)
packets = gen.packets.copy()
packets[3] = params.field.random(rng, params.n)
result = decode(params, packets)
print(f"one packet replaced with noise: decoded ok={result.ok}, "
      f"accepted {len(result.accepted)}/{params.N} packets")
assert result.ok and np.array_equal(result.message, gen.message)
print()

# The strongest causal attack: craft additive noise whose digest
# vanishes for as many seed values as algebra allows.  Sweep every
# seed to count exactly how many let the forgery through.
ctx = CorruptionContext(
    params=params, schedule=None, net=None,
    view=CausalView(mask_seed=True), slot=0, edge=0, packet_id=0,
    rng=np.random.default_rng(0),
)
_, noise = strategy_fn("targeted-hash-forgery")(ctx)
gf = params.field
message = gf.random(np.random.default_rng(1), params.message_symbols)
survived = []
for rho in range(params.q):
    gen = encode(params, message, rho=rho)
    packets = gen.packets.copy()
    packets[0] = gf.add(packets[0], noise)
    if 0 in decode(params, packets).accepted:
        survived.append(rho)
print(f"targeted forgery sweep over all {params.q} seeds:")
print(f"  forged payload accepted for seeds {survived}")
print(f"  that is {len(survived)} of {params.q}, the algebraic maximum "
      f"n-N-2 = {params.n - params.N - 2}")
print()

# Full campaigns: the worst-placed single jammer, two strategies,
# thousands of generations.  Failures are overwhelmingly detected
# (the decoder refuses) rather than silent.
for strategy in ("uniform-random", "targeted-hash-forgery"):
    config = SimConfig(
        network="cockroach",
        codec="jam",
        q=251,
        trials=2000,
        seed=42,
        jobs=4,
        adversary=AdversarySpec(
            model="localized-jam", z=1, strategy=strategy
        ),
    )
    report = run_campaign(config)
    print(f"{strategy}: {report.successes} ok, "
          f"{report.detected} detected, {report.undetected} silent "
          f"(failure rate {float(report.failure_rate):.4f})")
