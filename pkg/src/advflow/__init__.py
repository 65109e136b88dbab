"""Balanced routing and adversary-resilient coding on unit-capacity DAGs.

The pipeline: parse a network (:mod:`advflow.netgraph`), solve the
balance program exactly (:mod:`advflow.exactlp`), expand the optimum
into packets and time slots (:mod:`advflow.flowplan`), code the packets
against eavesdropping or jamming nodes (:mod:`advflow.codec`), and run
adversarial trial campaigns (:mod:`advflow.simeng`).  Independent
ground-truth checks live in :mod:`advflow.oracle`; ``advflow`` on the
command line wraps the whole chain.
"""

from .adversary import MODELS, STRATEGIES, AdversaryError, AdversarySpec, worst_case_subset
from .codec import KINDS, CodecError, CodecParams, decode, encode, leakage_dimension, max_leakage, params_for_plan, random_generation
from .corpus import GRAPH_NAMES, all_graphs, load_graph
from .exactlp import (
    InfeasibleError,
    LpError,
    LpProblem,
    LpSolution,
    UnboundedError,
    build_lp1,
    build_lp1_prime,
    build_lp2,
    solve_exact,
    solve_rate,
    verify,
)
from .flowplan import (
    PlanError,
    QuantizeCertificate,
    RoutingPlan,
    RoutingSchedule,
    ScheduleError,
    make_plan,
    make_schedule,
    quantize,
    verify_schedule,
)
from .gf import GF, GFError, smallest_prime_above
from .netgraph import (
    GraphError,
    Network,
    internal_subsets,
    load,
    min_cut,
    parse,
    validate,
)
from .oracle import (
    ConverseCertificate,
    NodeCutCertificate,
    OracleError,
    exhaustive_routing_converse,
    lp_crosscheck,
    mi_enumerate,
    mi_for_observation,
    nodecut_structure_check,
)
from .simeng import SimConfig, SimError, SimReport, config_from_toml, run_campaign

__version__ = "0.1.0"

__all__ = [
    "GF",
    "GFError",
    "GRAPH_NAMES",
    "KINDS",
    "MODELS",
    "STRATEGIES",
    "AdversaryError",
    "AdversarySpec",
    "CodecError",
    "CodecParams",
    "ConverseCertificate",
    "GraphError",
    "InfeasibleError",
    "LpError",
    "LpProblem",
    "LpSolution",
    "Network",
    "NodeCutCertificate",
    "OracleError",
    "PlanError",
    "QuantizeCertificate",
    "RoutingPlan",
    "RoutingSchedule",
    "ScheduleError",
    "SimConfig",
    "SimError",
    "SimReport",
    "UnboundedError",
    "all_graphs",
    "build_lp1",
    "build_lp1_prime",
    "build_lp2",
    "config_from_toml",
    "decode",
    "encode",
    "exhaustive_routing_converse",
    "internal_subsets",
    "leakage_dimension",
    "load",
    "load_graph",
    "lp_crosscheck",
    "make_plan",
    "make_schedule",
    "max_leakage",
    "mi_enumerate",
    "mi_for_observation",
    "min_cut",
    "nodecut_structure_check",
    "params_for_plan",
    "parse",
    "quantize",
    "random_generation",
    "run_campaign",
    "smallest_prime_above",
    "solve_exact",
    "solve_rate",
    "validate",
    "verify",
    "verify_schedule",
    "worst_case_subset",
]
