"""Encode so the compromised node learns nothing about the message.

The routing plan already limits how many packets any single node can
see.  The codec turns that bound into perfect secrecy: mix the message
with exactly that many uniformly random key packets before transmitting,
and every observation the node can assemble is statistically independent
of the message.  This demo shows the mixing, verifies the independence
two different ways, and shows what breaks when the adversary sees more
than the plan allows.
"""

import numpy as np

from advflow import (
    decode,
    encode,
    internal_subsets,
    leakage_dimension,
    load_graph,
    make_plan,
    mi_for_observation,
    params_for_plan,
    solve_rate,
)

net = load_graph("cockroach")
plan = make_plan(net, solve_rate(net, 1))
params = params_for_plan(plan, "eaves")
print(f"codec: {params.message_packets} message + {params.key_packets} key packets,")
print(f"       mixed through a {params.N}x{params.N} Vandermonde over GF({params.q})")
print()

# Encode a concrete message.  The key rows must be fresh uniform
# randomness each generation; that randomness is what gets "spent"
# to blind the adversary.
rng = np.random.default_rng(2024)
gf = params.field
message = gf.random(rng, (params.message_packets, params.n))
key = gf.random(rng, (params.key_packets, params.n))
gen = encode(params, message, key)
print(f"message (one symbol per packet): {gen.message.ravel().tolist()}")
print(f"coded packets on the wire:       {gen.packets.ravel().tolist()}")
print()

# The terminal sees all N packets and inverts the mix exactly.
result = decode(params, gen.packets)
assert result.ok and np.array_equal(result.message, message)
print("terminal decode: exact recovery")
print()

# Any single node sees at most key_packets packets.  The rank of what
# it sees, minus the rank attributable to the key alone, is the number
# of message dimensions exposed.  Zero everywhere:
print("per-node exposure (rank of observed map minus key cover):")
for v in net.internal_nodes:
    observed = plan.packets_through((v,))
    dim = leakage_dimension(params, observed)
    print(f"  node {v}: sees packets {observed}, leakage {dim}")
print()

# For small instances the same fact can be checked by brute force:
# enumerate every (message, key) pair, build the joint distribution of
# (message, observation), and compute mutual information exactly.
small_net = load_graph("parallel3")
small_plan = make_plan(small_net, solve_rate(small_net, 1))
small = params_for_plan(small_plan, "eaves", q=5)
print(f"parallel3 at q=5: {small.N} packets, enumerating all 5^{small.N} states")
for subset in internal_subsets(small_net, 1):
    observed = small_plan.packets_through(subset)
    mi = mi_for_observation(small, observed)
    print(f"  subset {subset}: exact mutual information {mi}")
print()

# Secrecy is exactly calibrated: one packet beyond the budget starts
# leaking, and seeing everything reveals the whole message.
budget = plan.packets_through(("1",))
over = budget + (plan.packets_through(("2",))[:1])
print(f"observing {len(budget)} packets leaks {leakage_dimension(params, budget)}")
print(f"observing {len(over)} packets leaks {leakage_dimension(params, over)}")
full = tuple(range(params.N))
print(f"observing all {params.N} leaks {leakage_dimension(params, full)} "
      f"(the full message dimension)")
