"""Coalitional improvement dynamics and improvement graphs."""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field

from .game import STRICT, DomainError, FiniteGame, Mode, Profile, _coalition_cap, is_sne, is_ssne
from .potential import LipFunction, compute_exponent, path_bound, topological_potential

__all__ = [
    "DEFAULT_STEP_CAP",
    "DynamicsConfig",
    "ImprovementGraph",
    "RunReport",
    "default_step_cap",
    "improvement_graph",
    "longest_path_length",
    "run",
]

DEFAULT_STEP_CAP = 10**6
RULES = ("first", "best-response", "random")


@dataclass(frozen=True)
class DynamicsConfig:
    """``rule`` picks among the available moves: ``first`` takes the first in
    canonical order, ``best-response`` the one whose worst-off member gains
    most, ``random`` a uniformly random one (seeded)."""

    mode: Mode = STRICT
    max_coalition: int | None = None
    rule: str = "first"
    seed: int = 0
    step_cap: int | None = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown selection rule {self.rule!r}; choose from {RULES}")
        if self.step_cap is not None and self.step_cap < 1:
            raise ValueError("step cap must be at least 1")


@dataclass
class RunReport:
    path: list[Profile]
    coalitions: list[tuple[int, ...]]
    terminal: Profile
    steps: int
    classification: str  # SNE, SSNE, stuck or step-cap
    bound: int | None
    is_sne: bool
    is_ssne: bool
    step_cap: int = 0


def default_step_cap(game: FiniteGame, cfg: DynamicsConfig, phi: LipFunction | None = None) -> tuple[int, int | None]:
    """``(cap, bound)``: the path bound of ``phi`` (private costs by default) when it certifies."""
    if phi is None:
        phi = LipFunction("phi_pi", game.n, game.cost)
    try:
        spec = compute_exponent(game, phi, cfg.max_coalition, cfg.mode)
    except ValueError:
        return DEFAULT_STEP_CAP, None
    bound = path_bound(spec)
    return max(1, bound), bound


def _pick(moves, rule, rng, costs, src):
    if rule == "first":
        return moves[0]
    if rule == "random":
        return moves[rng.randrange(len(moves))]
    before = costs[src]

    def key(move):
        y, coalition = move
        gain = min(before[i] - costs[y][i] for i in coalition)
        return (-gain, coalition, y)

    return min(moves, key=key)


def run(game: FiniteGame, x0: Sequence[int], cfg: DynamicsConfig = DynamicsConfig(),
        phi: LipFunction | None = None) -> RunReport:
    """Apply improving moves from ``x0`` until none is left or the step cap is hit."""
    x0 = game.check_profile(x0)
    cap_size = _coalition_cap(game, cfg.max_coalition)
    table = game.table()
    if cfg.step_cap is None:
        step_cap, bound = default_step_cap(game, cfg, phi)
    else:
        step_cap, bound = cfg.step_cap, None
    rng = random.Random(cfg.seed)
    k = table.index[x0]
    path, coalitions = [x0], []
    classification = None
    while True:
        moves = table.moves_from(k, cap_size, cfg.mode)
        if not moves:
            break
        if len(coalitions) >= step_cap:
            classification = "step-cap"
            break
        y, coalition = _pick(moves, cfg.rule, rng, table.costs, k)
        k = y
        path.append(table.profiles[k])
        coalitions.append(coalition)
    terminal = table.profiles[k]
    sne, ssne = is_sne(game, terminal), is_ssne(game, terminal)
    if classification is None:
        if cfg.mode.kind == "weak" and ssne:
            classification = "SSNE"
        elif sne:
            classification = "SNE"
        else:
            classification = "stuck"
    return RunReport(path, coalitions, terminal, len(coalitions), classification, bound, sne, ssne, step_cap)


@dataclass
class ImprovementGraph:
    nodes: list[Profile]
    edges: list[tuple[int, int]]
    acyclic: bool
    cycle: list[Profile] | None = None
    labels: dict[Profile, int] | None = field(default=None, repr=False)


def improvement_graph(game: FiniteGame, max_coalition: int | None = None, mode: Mode = STRICT) -> ImprovementGraph:
    cap = _coalition_cap(game, max_coalition)
    table = game.table()
    edges = [
        (k, int(y)) for k in range(len(table)) for y in sorted(table.targets_from(k, cap, mode))
    ]
    topo = topological_potential(game, cap, mode)
    return ImprovementGraph(list(table.profiles), edges, topo.acyclic, topo.cycle, topo.labels)


def longest_path_length(graph: ImprovementGraph) -> int:
    """Number of arcs on a longest path; the graph must be acyclic."""
    if not graph.acyclic:
        raise DomainError("longest path is undefined on a graph with a cycle")
    succ: dict[int, list[int]] = {k: [] for k in range(len(graph.nodes))}
    for a, b in graph.edges:
        succ[a].append(b)
    # labels increase against the move direction, so ascending label order
    # visits every target before its sources
    order = sorted(range(len(graph.nodes)), key=lambda k: graph.labels[graph.nodes[k]])
    depth = [0] * len(graph.nodes)
    for k in order:
        depth[k] = max((depth[y] + 1 for y in succ[k]), default=0)
    return max(depth, default=0)
