"""Bottleneck routing games on directed graphs.

Players route one unit each along a path; an arc's cost depends on how many
players use it and a player pays the costliest arc on its path.  Two
polynomial algorithms compute strong equilibria for a common source and
sink:

* identical non-decreasing arc costs: spread the players as evenly as
  possible over a maximum set of arc-disjoint paths (:func:`sne_identical_costs`);
* convex non-decreasing arc costs bounded by ``C``: an integral flow
  minimising ``sum_a (c_a(x_a)/C)**M * x_a`` (:func:`sne_convex_costs`).

For brute-force checks the game is turned into a congestion model whose
strategies are the simple paths between each player's terminals.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .congestion import BottleneckGame, CongestionModel, LoadTable, ValidationError
from .game import Budget, DEFAULT_BUDGET, Profile
from .lexorder import as_fraction
from .potential import exponent_from_bounds

__all__ = [
    "Arc",
    "InfeasibleError",
    "IntegralFlow",
    "RoutingInstance",
    "RoutingResult",
    "decompose_flow",
    "max_flow_min_cut",
    "min_convex_cost_flow",
    "routing_exponent",
    "scaled_psi_potential",
    "simple_paths",
    "sne_convex_costs",
    "sne_identical_costs",
    "to_game",
    "to_model",
    "verify_cut_certificate",
]

Path = tuple[int, ...]  # arc indices


class InfeasibleError(ValueError):
    """The sink cannot be reached from the source."""


@dataclass(frozen=True)
class Arc:
    tail: str
    head: str
    costs: tuple[Fraction, ...]  # costs[k] = cost with k users

    def cost(self, k: int) -> Fraction:
        return self.costs[k]


@dataclass(frozen=True)
class RoutingInstance:
    vertices: tuple[str, ...]
    arcs: tuple[Arc, ...]
    terminals: tuple[tuple[str, str], ...]  # per player
    cost_bound: Fraction

    @classmethod
    def create(cls, vertices, arcs, terminals, players: int | None = None, cost_bound=None):
        vertices = tuple(str(v) for v in vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("vertex names must be unique")
        vset = set(vertices)
        arcs = tuple(Arc(str(t), str(h), tuple(as_fraction(c) for c in table)) for t, h, table in arcs)
        for a in arcs:
            if a.tail not in vset or a.head not in vset:
                raise ValueError(f"arc {a.tail}->{a.head} uses an unknown vertex")
            if a.tail == a.head:
                raise ValueError(f"self-loop at {a.tail}")
        if terminals and isinstance(terminals[0], str):
            if players is None:
                raise ValueError("a single (source, sink) pair needs a player count")
            terminals = [tuple(terminals)] * players
        terminals = tuple((str(s), str(t)) for s, t in terminals)
        if players is not None and players != len(terminals):
            raise ValueError(f"{len(terminals)} terminal pairs for {players} players")
        if not terminals:
            raise ValueError("need at least one player")
        for s, t in terminals:
            if s not in vset or t not in vset or s == t:
                raise ValueError(f"bad terminal pair ({s}, {t})")
        n = len(terminals)
        for k, a in enumerate(arcs):
            if len(a.costs) < n + 1:
                raise ValueError(f"arc {k} ({a.tail}->{a.head}) needs costs for 0..{n} users")
            for j, v in enumerate(a.costs):
                if v < 0:
                    raise ValidationError("non-negativity", f"arc {a.tail}->{a.head} c({j}) = {v}")
            for j in range(len(a.costs) - 1):
                if a.costs[j + 1] < a.costs[j]:
                    raise ValidationError(
                        "monotonicity", f"arc {a.tail}->{a.head} c({j + 1}) < c({j})"
                    )
        top = max((max(a.costs[: n + 1]) for a in arcs), default=Fraction(0))
        bound = top if cost_bound is None else as_fraction(cost_bound)
        if bound < top:
            raise ValidationError("cost bound", f"C = {bound} is below the largest arc cost {top}")
        return cls(vertices, arcs, terminals, bound)

    @property
    def n(self) -> int:
        return len(self.terminals)

    def out_arcs(self, v: str) -> list[int]:
        return [k for k, a in enumerate(self.arcs) if a.tail == v]

    def single_commodity(self) -> tuple[str, str]:
        pairs = set(self.terminals)
        if len(pairs) != 1:
            raise ValueError("the algorithm needs a common source and sink for all players")
        return next(iter(pairs))

    def arc_name(self, k: int) -> str:
        a = self.arcs[k]
        return f"{a.tail}->{a.head}"

    def path_label(self, path: Path) -> str:
        if not path:
            return ""
        verts = [self.arcs[path[0]].tail] + [self.arcs[k].head for k in path]
        return "-".join(verts)

    def loads(self, paths: Sequence[Path]) -> list[int]:
        x = [0] * len(self.arcs)
        for p in paths:
            for k in p:
                x[k] += 1
        return x

    def player_costs(self, paths: Sequence[Path]) -> tuple[Fraction, ...]:
        x = self.loads(paths)
        return tuple(max(self.arcs[k].cost(x[k]) for k in p) for p in paths)


@dataclass(frozen=True)
class IntegralFlow:
    arc_flow: tuple[int, ...]
    value: int
    paths: tuple[tuple[Path, int], ...]  # (path, multiplicity)


@dataclass(frozen=True)
class RoutingResult:
    """Paths per player with the quantities the algorithms certify."""

    paths: tuple[Path, ...]
    loads: tuple[int, ...]
    costs: tuple[Fraction, ...]
    flow: IntegralFlow
    cut: tuple[int, ...] = ()
    exponent: int | None = None
    objective: Fraction | None = None


def simple_paths(inst: RoutingInstance, s: str, t: str) -> list[Path]:
    """All simple s-t paths as arc-index tuples, in lexicographic order."""
    out: list[Path] = []
    by_tail: dict[str, list[int]] = {}
    for k, a in enumerate(inst.arcs):
        by_tail.setdefault(a.tail, []).append(k)

    def dfs(v: str, seen: set[str], path: list[int]):
        if v == t:
            out.append(tuple(path))
            return
        for k in by_tail.get(v, ()):
            h = inst.arcs[k].head
            if h not in seen:
                seen.add(h)
                path.append(k)
                dfs(h, seen, path)
                path.pop()
                seen.remove(h)

    dfs(s, {s}, [])
    return out


def to_model(inst: RoutingInstance) -> tuple[CongestionModel, list[list[Path]]]:
    """Congestion model over arcs whose strategies are simple terminal paths."""
    strategy_paths = []
    for i, (s, t) in enumerate(inst.terminals):
        paths = simple_paths(inst, s, t)
        if not paths:
            raise InfeasibleError(f"player {i}: no path from {s} to {t}")
        strategy_paths.append(paths)
    names = [f"{a.tail}->{a.head}#{k}" for k, a in enumerate(inst.arcs)]
    tables = [a.costs[: inst.n + 1] for a in inst.arcs]
    model = CongestionModel.create(names, strategy_paths, LoadTable(tables), n=inst.n)
    return model, strategy_paths


class _RoutingGame(BottleneckGame):
    def __init__(self, inst, model, paths, budget, name):
        self.instance = inst
        self.paths = paths
        super().__init__(model, budget=budget, name=name)
        self.labels = tuple(tuple(inst.path_label(p) for p in row) for row in paths)

    def profile_of(self, paths: Sequence[Path]) -> Profile:
        return tuple(self.paths[i].index(tuple(p)) for i, p in enumerate(paths))


def to_game(inst: RoutingInstance, budget: Budget = DEFAULT_BUDGET, name: str = "") -> _RoutingGame:
    """Finite bottleneck game over simple paths; ``profile_of`` maps paths to a profile."""
    model, paths = to_model(inst)
    return _RoutingGame(inst, model, paths, budget, name)


def max_flow_min_cut(inst: RoutingInstance, s: str, t: str) -> tuple[list[int], int, list[int]]:
    """Edmonds-Karp with unit arc capacities.

    Returns ``(arc_flow, value, cut)`` where ``cut`` lists the arcs leaving
    the set of vertices reachable from ``s`` in the final residual graph.
    """
    flow = [0] * len(inst.arcs)
    adj: dict[str, list[tuple[int, bool]]] = {v: [] for v in inst.vertices}
    for k, a in enumerate(inst.arcs):
        adj[a.tail].append((k, True))
        adj[a.head].append((k, False))

    def residual_bfs():
        parent: dict[str, tuple[int, bool] | None] = {s: None}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for k, forward in adj[v]:
                a = inst.arcs[k]
                w = a.head if forward else a.tail
                if w in parent:
                    continue
                if (forward and flow[k] < 1) or (not forward and flow[k] > 0):
                    parent[w] = (k, forward)
                    queue.append(w)
        return parent

    value = 0
    while True:
        parent = residual_bfs()
        if t not in parent:
            break
        v = t
        while parent[v] is not None:
            k, forward = parent[v]
            flow[k] += 1 if forward else -1
            v = inst.arcs[k].tail if forward else inst.arcs[k].head
        value += 1
    reach = set(parent)
    cut = [k for k, a in enumerate(inst.arcs) if a.tail in reach and a.head not in reach]
    return flow, value, cut


def decompose_flow(inst: RoutingInstance, arc_flow: Sequence[int], s: str, t: str) -> IntegralFlow:
    """Split an integral s-t flow into unit paths, smallest arc sequence first.

    Each unit path follows the lowest-numbered arc with remaining flow;
    closed walks met on the way are cancelled (they carry no s-t flow).
    """
    rest = list(arc_flow)
    for v in inst.vertices:
        if v in (s, t):
            continue
        inflow = sum(rest[k] for k, a in enumerate(inst.arcs) if a.head == v)
        outflow = sum(rest[k] for k, a in enumerate(inst.arcs) if a.tail == v)
        if inflow != outflow:
            raise ValueError(f"flow is not conserved at {v}")
    out_s = sum(rest[k] for k in inst.out_arcs(s)) - sum(rest[k] for k, a in enumerate(inst.arcs) if a.head == s)
    units: list[Path] = []
    for _ in range(out_s):
        path: list[int] = []
        pos = {s: 0}
        v = s
        while v != t:
            k = next((k for k in inst.out_arcs(v) if rest[k] > 0), None)
            if k is None:
                raise ValueError("flow decomposition got stuck")
            path.append(k)
            v = inst.arcs[k].head
            if v in pos:
                cycle = path[pos[v]:]
                for c in cycle:
                    rest[c] -= 1
                del path[pos[v]:]
                pos = {w: j for w, j in pos.items() if j <= pos[v]}
            else:
                pos[v] = len(path)
        for k in path:
            rest[k] -= 1
        units.append(tuple(path))
    grouped: list[tuple[Path, int]] = []
    for p in sorted(units):
        if grouped and grouped[-1][0] == p:
            grouped[-1] = (p, grouped[-1][1] + 1)
        else:
            grouped.append((p, 1))
    used = inst.loads(units)
    return IntegralFlow(tuple(used), len(units), tuple(grouped))


def sne_identical_costs(inst: RoutingInstance) -> RoutingResult:
    """Strong equilibrium for a common source/sink and one shared cost table.

    Computes a maximum set of ``m`` arc-disjoint paths (unit-capacity max
    flow), then puts ``floor(n/m)`` players on the first
    ``k = m*ceil(n/m) - n`` paths and ``ceil(n/m)`` on the others.
    """
    s, t = inst.single_commodity()
    first = inst.arcs[0].costs[: inst.n + 1] if inst.arcs else ()
    if any(a.costs[: inst.n + 1] != first for a in inst.arcs):
        raise ValidationError("identical costs", "arc cost tables differ")
    arc_flow, m, cut = max_flow_min_cut(inst, s, t)
    if m == 0:
        raise InfeasibleError(f"{t} is not reachable from {s}")
    flow = decompose_flow(inst, arc_flow, s, t)
    disjoint = [p for p, mult in flow.paths for _ in range(mult)]
    n = inst.n
    hi, lo = -(-n // m), n // m
    k = m * hi - n
    paths: list[Path] = []
    for j, p in enumerate(disjoint):
        paths.extend([p] * (lo if j < k else hi))
    loads = inst.loads(paths)
    return RoutingResult(
        paths=tuple(paths),
        loads=tuple(loads),
        costs=inst.player_costs(paths),
        flow=flow,
        cut=tuple(cut),
    )


def verify_cut_certificate(inst: RoutingInstance, paths: Sequence[Path]) -> bool:
    """Check the min-cut argument behind :func:`sne_identical_costs`.

    The largest load on the minimum cut must be ``ceil(n/m)`` and no player
    may pay more than ``c(ceil(n/m))``.
    """
    s, t = inst.single_commodity()
    _, m, cut = max_flow_min_cut(inst, s, t)
    if m == 0 or len(paths) != inst.n:
        return False
    hi = -(-inst.n // m)
    loads = inst.loads(paths)
    if max(loads[k] for k in cut) != hi:
        return False
    table = inst.arcs[0].costs
    return all(c <= table[hi] for c in inst.player_costs(paths))


def routing_exponent(inst: RoutingInstance) -> tuple[int, Fraction, Fraction]:
    """Exponent for the scaled facility potential of a routing game.

    Uses sound bounds that avoid enumerating improving moves: ``phi_max`` is
    the largest scaled arc cost at ``n`` users and ``eps_min`` the smallest
    positive difference between any two achievable scaled values (zero
    included, as unused arcs contribute zeros).  Returns ``(M, phi_max, eps_min)``.
    """
    C = inst.cost_bound
    n = inst.n
    scale = (lambda v: v / C) if C > 0 else (lambda v: v)
    values = sorted({Fraction(0)} | {scale(a.costs[k]) for a in inst.arcs for k in range(n + 1)})
    gaps = [b - a for a, b in zip(values, values[1:])]
    phi_max = max((scale(a.costs[n]) for a in inst.arcs), default=Fraction(0))
    if not gaps:
        return 1, phi_max, Fraction(1)
    eps = min(gaps)
    return exponent_from_bounds(n * len(inst.arcs), phi_max, eps), phi_max, eps


def min_convex_cost_flow(
    inst: RoutingInstance, s: str, t: str, value: int, unit_cost: list[list[Fraction]]
) -> list[int]:
    """Integral min-cost flow by successive shortest paths.

    ``unit_cost[a][k]`` is the cost of the (k+1)-th unit on arc ``a``; it
    must be non-decreasing in ``k``.  Shortest paths use Bellman-Ford on the
    residual graph, relaxing arcs in index order.
    """
    x = [0] * len(inst.arcs)
    vidx = {v: j for j, v in enumerate(inst.vertices)}
    for _ in range(value):
        dist: list[Fraction | None] = [None] * len(inst.vertices)
        pred: list[tuple[int, bool] | None] = [None] * len(inst.vertices)
        dist[vidx[s]] = Fraction(0)
        for _round in range(len(inst.vertices) + 1):
            changed = False
            for k, a in enumerate(inst.arcs):
                u, w = vidx[a.tail], vidx[a.head]
                if x[k] < value and dist[u] is not None:
                    d = dist[u] + unit_cost[k][x[k]]
                    if dist[w] is None or d < dist[w]:
                        dist[w], pred[w], changed = d, (k, True), True
                if x[k] > 0 and dist[w] is not None:
                    d = dist[w] - unit_cost[k][x[k] - 1]
                    if dist[u] is None or d < dist[u]:
                        dist[u], pred[u], changed = d, (k, False), True
            if not changed:
                break
        else:
            raise RuntimeError("negative residual cycle; unit costs are not convex")
        if dist[vidx[t]] is None:
            raise InfeasibleError(f"{t} is not reachable from {s}")
        v = vidx[t]
        steps = 0
        while v != vidx[s]:
            k, forward = pred[v]
            a = inst.arcs[k]
            x[k] += 1 if forward else -1
            v = vidx[a.tail] if forward else vidx[a.head]
            steps += 1
            if steps > len(inst.arcs) + len(inst.vertices):
                raise RuntimeError("predecessor walk did not reach the source")
    return x


def sne_convex_costs(inst: RoutingInstance) -> RoutingResult:
    """Strong equilibrium for a common source/sink and convex arc costs.

    Minimises ``sum_a g_a(x_a)`` over integral flows of value ``n`` with
    ``g_a(k) = (c_a(k)/C)**M * k`` and ``M`` from :func:`routing_exponent`,
    all in exact rational arithmetic, then splits the flow into unit paths.
    """
    s, t = inst.single_commodity()
    n = inst.n
    for a in inst.arcs:
        c = a.costs[: n + 1]
        for k in range(1, n):
            if c[k + 1] - c[k] < c[k] - c[k - 1]:
                raise ValidationError("convexity", f"arc {a.tail}->{a.head} has a concave step at {k}")
    M, _, _ = routing_exponent(inst)
    C = inst.cost_bound if inst.cost_bound > 0 else Fraction(1)
    g = [[(a.costs[k] / C) ** M * k for k in range(n + 1)] for a in inst.arcs]
    unit = [[row[k + 1] - row[k] for k in range(n)] for row in g]
    x = min_convex_cost_flow(inst, s, t, n, unit)
    flow = decompose_flow(inst, x, s, t)
    paths = [p for p, mult in flow.paths for _ in range(mult)]
    loads = inst.loads(paths)
    objective = sum((g[k][x[k]] for k in range(len(inst.arcs))), Fraction(0))
    return RoutingResult(
        paths=tuple(paths),
        loads=tuple(loads),
        costs=inst.player_costs(paths),
        flow=flow,
        exponent=M,
        objective=objective,
    )


def scaled_psi_potential(inst: RoutingInstance, paths: Sequence[Path], M: int) -> Fraction:
    """``sum_i sum_{a in path_i} (c_a(x_a)/C)**M`` for a routing profile."""
    C = inst.cost_bound if inst.cost_bound > 0 else Fraction(1)
    x = inst.loads(paths)
    return sum(((inst.arcs[k].cost(x[k]) / C) ** M for p in paths for k in p), Fraction(0))

