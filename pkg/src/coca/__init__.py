"""Exact reachability analysis for continuous one-counter automata.

A continuous one-counter automaton moves a rational counter along graph
edges, scaling each edge's update by an adversarially chosen fraction
in (0, 1]; runs must keep the counter inside per-state guard intervals.
This package decides reachability for such automata exactly (no floats
anywhere), over three feature tiers:

* plain automata with one global guard (:mod:`coca.analysis`),
* per-state interval guards (:mod:`coca.guarded`), and
* parametric updates/guards, compiled to linear-arithmetic sentences
  for an external SMT solver (:mod:`coca.encoding`).

:mod:`coca.oracle` holds the slow-but-obvious referees the fast paths
are tested against, and :mod:`coca.gadgets` generates the 3-SAT
reduction instances used as hardness test fixtures.
"""

from .rational import BACKEND, Rat, rat
from .intervals import (
    Interval,
    IntervalSet,
    interval,
    closed,
    point,
    parse_interval,
    format_interval,
    format_interval_set,
)
from .model import (
    Transition,
    Coca,
    GuardedCoca,
    EqCoca,
    ParamInterval,
    ParametricCoca,
    Run,
    instantiate,
    run_trace,
    run_is_admissible,
    run_scale,
    parse_model,
    serialize_model,
    load_model,
)
from .analysis import (
    Cond,
    PostRepr,
    cond_paths_exist,
    cond_paths_opt,
    enab_test,
    admissible_cycle,
    closure_endpoints,
    endpoint_membership,
    post_repr,
    reach,
    eq_reach,
)
from .guarded import (
    ReachMap,
    ExpandingCycle,
    Stabilized,
    Found,
    succ,
    succ_pow,
    find_expanding_cycle,
    accelerate,
    compute_reach,
    greach,
)
from .encoding import (
    Sentence,
    SolveResult,
    build_sentence,
    encode_acyclic,
    emit_smtlib,
    solve,
    rescale_to_integer,
)
from .gadgets import gen_sat_gadget, parse_dimacs
from .errors import (
    CocaError,
    ModelError,
    EngineError,
    EncodingError,
    SolverError,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Rat",
    "rat",
    "Interval",
    "IntervalSet",
    "interval",
    "closed",
    "point",
    "parse_interval",
    "format_interval",
    "format_interval_set",
    "Transition",
    "Coca",
    "GuardedCoca",
    "EqCoca",
    "ParamInterval",
    "ParametricCoca",
    "Run",
    "instantiate",
    "run_trace",
    "run_is_admissible",
    "run_scale",
    "parse_model",
    "serialize_model",
    "load_model",
    "Cond",
    "PostRepr",
    "cond_paths_exist",
    "cond_paths_opt",
    "enab_test",
    "admissible_cycle",
    "closure_endpoints",
    "endpoint_membership",
    "post_repr",
    "reach",
    "eq_reach",
    "ReachMap",
    "ExpandingCycle",
    "Stabilized",
    "Found",
    "succ",
    "succ_pow",
    "find_expanding_cycle",
    "accelerate",
    "compute_reach",
    "greach",
    "Sentence",
    "SolveResult",
    "build_sentence",
    "encode_acyclic",
    "emit_smtlib",
    "solve",
    "rescale_to_integer",
    "gen_sat_gadget",
    "parse_dimacs",
    "CocaError",
    "ModelError",
    "EngineError",
    "EncodingError",
    "SolverError",
    "__version__",
]
