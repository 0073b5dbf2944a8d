"""Lexicographical improvement toolkit for finite and splittable bottleneck congestion games."""

from __future__ import annotations

__version__ = "0.1.0"

from .congestion import (
    Additive,
    BottleneckGame,
    CongestionModel,
    Interference,
    LoadTable,
    SetTable,
    ValidationError,
    alex_pairs,
    build_game,
    make_interference,
    make_scheduling,
    phi_pi,
    psi_facility,
    upsilon,
)
from .dynamics import DynamicsConfig, RunReport, improvement_graph, longest_path_length, run
from .game import (
    INF,
    STRICT,
    WEAK_SSNE,
    Budget,
    BudgetError,
    DomainError,
    FiniteGame,
    ImprovingMove,
    Mode,
    PlayerTransform,
    alpha_strict,
    apply_transform,
    enumerate_pne,
    enumerate_sne,
    enumerate_ssne,
    improving_moves,
    is_minmax_fair,
    is_pne,
    is_sne,
    is_ssne,
    is_strict_pareto,
    is_weak_pareto,
    lp_cost,
    sorted_lex_minimizers,
    strong_poa,
    strong_pos,
    table_game,
)
from .io import GameFile, SchemaError, load_game, parse_game, serialize
from .lexorder import DimensionError, Ordering, a_lex_compare, sorted_lex_compare
from .potential import (
    LipFunction,
    PotentialSpec,
    compute_exponent,
    custom_function,
    path_bound,
    power_potential,
    topological_potential,
    verify_lip,
)
from .routing import (
    RoutingInstance,
    decompose_flow,
    max_flow_min_cut,
    sne_convex_costs,
    sne_identical_costs,
)
from .splittable import (
    PiecewiseLinear,
    SplittableInstance,
    alpha_exponent,
    alpha_potential,
    approx_sne,
    lip_certificates,
    loads,
    private_costs,
    verify_alpha_unilateral,
)
