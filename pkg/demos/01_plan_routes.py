"""Plan balanced routes through a network with a compromised node.

The scenario: a source wants to push packets to a terminal across a
unit-capacity network, but some internal node is controlled by an
adversary.  Whatever crosses that node is exposed, so the plan must
spread traffic thinly enough that no single node sees too much, while
still delivering as much as possible.  This demo walks the planning
pipeline end to end on the bundled "cockroach" network.
"""

from fractions import Fraction

from advflow import (
    build_lp1,
    build_lp1_prime,
    build_lp2,
    load_graph,
    make_plan,
    make_schedule,
    min_cut,
    quantize,
    solve_exact,
    solve_rate,
)

net = load_graph("cockroach")
print("network: cockroach")
print(f"  nodes: {net.nodes}")
print(f"  edges: {len(net.edges)} (unit capacity, one packet per slot)")
print(f"  min cut: {min_cut(net)} packets per slot ceiling")
print()

# Three equivalent linear programs compute the optimum.  All arithmetic
# is exact rational, so "equal" below means equal, not close.
for name, builder in [("LP1", build_lp1), ("LP1'", build_lp1_prime), ("LP2", build_lp2)]:
    solution = solve_exact(builder(net, 1))
    print(f"  {name}: secure rate {solution.objective}, balance {solution.lam}")
print()

# The pinned form is the workhorse; keep its solution around.
solution = solve_rate(net, 1)
print(f"optimal: {solution.objective} message packets per slot")
print("  (capacity 4 minus 4/3 that must be sacrificed to balance)")
print()

# The fractional flow becomes an integral plan over tau slots.
plan = make_plan(net, solution)
print(f"plan: tau={plan.tau} slots, {plan.total_packets} packets per generation")
print(f"  key packets (worst single-node exposure): {plan.key_packets}")
print(f"  message rate: {plan.rate} = {float(plan.rate):.4f}")
for pid, path in enumerate(plan.packets):
    hops = " -> ".join(net.path_nodes(path))
    print(f"  packet {pid:2d}: {hops}")
print()

# Each packet gets a slot such that no edge carries two packets at once.
schedule = make_schedule(plan)
for slot in range(plan.tau):
    print(f"  slot {slot}: packets {schedule.packets_in_slot(slot)}")
print()

# If the deployment cannot afford tau=3, quantize to a shorter
# generation.  Rounding down loses rate, but provably less than
# |E| / tau', and the loss vanishes as tau' grows.
print("quantized plans:")
for tau_prime in (1, 2, 3, 6, 12):
    qplan, cert = quantize(net, solution, tau_prime)
    bound = Fraction(len(net.edges), tau_prime)
    print(
        f"  tau'={tau_prime:2d}: rate {str(qplan.rate):>5s}"
        f"  loss {str(cert.loss):>5s} < {bound}"
    )
