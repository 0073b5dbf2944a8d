"""Seeded random instance generators used by the property and acceptance tests.

All costs are small integers so that exact comparisons stay cheap and the
improvement-path bound is meaningful.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .congestion import CongestionModel, Interference, LoadTable, SetTable
from .routing import RoutingInstance
from .splittable import PiecewiseLinear, SplittableInstance

__all__ = [
    "random_congestion_model",
    "random_convex_table",
    "random_dag_routing",
    "random_monotone_table",
    "random_parallel_links",
    "random_splittable",
]


def random_monotone_table(rng: random.Random, length: int, top: int = 10) -> list[int]:
    vals = sorted(rng.randint(0, top) for _ in range(length))
    return vals


def random_convex_table(rng: random.Random, length: int, max_step: int = 4) -> list[int]:
    steps = sorted(rng.randint(0, max_step) for _ in range(length - 1))
    out = [rng.randint(0, 3)]
    for s in steps:
        out.append(out[-1] + s)
    return out


def _random_strategies(rng, n, m, max_strategies, max_size):
    rows = []
    for _ in range(n):
        k = rng.randint(1, max_strategies)
        pool = set()
        for _ in range(4 * k):
            if len(pool) >= k:
                break
            size = rng.randint(1, min(max_size, m))
            pool.add(frozenset(rng.sample(range(m), size)))
        rows.append(sorted(pool, key=sorted))
    return rows


def _random_set_table(rng, users: list[int], top: int = 10) -> dict:
    table = {frozenset(): rng.randint(0, top // 3)}
    for r in range(1, len(users) + 1):
        for combo in itertools.combinations(users, r):
            s = frozenset(combo)
            floor = max(table[s - {i}] for i in s)
            table[s] = floor + rng.randint(0, 3)
    return table


def random_congestion_model(
    rng: random.Random,
    max_players: int = 4,
    max_facilities: int = 6,
    max_strategies: int = 5,
    max_size: int = 3,
    kind: str | None = None,
) -> CongestionModel:
    """Random model with one of the cost kinds ``load_table``, ``set_oracle``, ``interference``."""
    n = rng.randint(1, max_players)
    m = rng.randint(1, max_facilities)
    strategies = _random_strategies(rng, n, m, max_strategies, max_size)
    kind = kind or rng.choice(["load_table", "set_oracle", "interference"])
    facilities = [f"f{j}" for j in range(m)]
    if kind == "load_table":
        costs = LoadTable([random_monotone_table(rng, n + 1) for _ in range(m)])
    elif kind == "set_oracle":
        potential = [sorted({i for i, row in enumerate(strategies) if any(f in s for s in row)}) for f in range(m)]
        costs = SetTable([_random_set_table(rng, users) for users in potential])
    elif kind == "interference":
        edges = [(u, v, rng.randint(0, 5)) for u, v in itertools.combinations(range(n), 2) if rng.random() < 0.6]
        costs = Interference(edges)
    else:
        raise ValueError(f"unknown cost kind {kind!r}")
    return CongestionModel.create(facilities, strategies, costs, n=n)


def random_dag_routing(
    rng: random.Random,
    max_players: int = 4,
    max_arcs: int = 12,
    costs: str = "convex",
) -> RoutingInstance:
    """Single-commodity instance on a random DAG containing an s-t chain.

    ``costs`` is ``"convex"`` (independent convex tables) or ``"identical"``
    (one monotone table shared by every arc).
    """
    n = rng.randint(1, max_players)
    inner = rng.randint(1, 4)
    order = ["s", *[f"v{k}" for k in range(inner)], "t"]
    chain = list(zip(order, order[1:]))
    candidates = [(u, v) for a, u in enumerate(order) for v in order[a + 1:] if (u, v) not in chain]
    rng.shuffle(candidates)
    extra = candidates[: max(0, rng.randint(0, max_arcs - len(chain)))]
    pairs = chain + extra
    shared = random_monotone_table(rng, n + 1)
    arcs = []
    for u, v in sorted(pairs, key=lambda p: (order.index(p[0]), order.index(p[1]))):
        table = random_convex_table(rng, n + 1) if costs == "convex" else shared
        arcs.append((u, v, table))
    return RoutingInstance.create(order, arcs, ("s", "t"), players=n)


def _random_piecewise(rng, upto: int, convex: bool, strict: bool) -> PiecewiseLinear:
    xs = sorted(set([0, upto] + [rng.randint(1, max(1, upto - 1)) for _ in range(rng.randint(0, 2))]))
    lo = 1 if strict else 0
    slopes = [rng.randint(lo, 4) for _ in xs[1:]]
    if convex:
        slopes.sort()
    y = Fraction(rng.randint(0, 3))
    pts = [(xs[0], y)]
    for (x0, x1), s in zip(zip(xs, xs[1:]), slopes):
        y += s * (x1 - x0)
        pts.append((x1, y))
    return PiecewiseLinear(pts)


def random_splittable(
    rng: random.Random,
    max_players: int = 3,
    max_facilities: int = 4,
    max_strategies: int = 3,
    strict: bool = False,
    convex: bool = False,
) -> SplittableInstance:
    """Random splittable game with integer demands and integer breakpoints."""
    n = rng.randint(1, max_players)
    m = rng.randint(2, max_facilities)
    strategies = _random_strategies(rng, n, m, max_strategies, 2)
    for row in strategies:
        # a single strategy leaves nothing to split
        while len(row) < 2:
            extra = frozenset([rng.randrange(m)])
            if extra not in row:
                row.append(extra)
    demands = [rng.randint(1, 3) for _ in range(n)]
    total = sum(demands)
    costs = [_random_piecewise(rng, total, convex, strict) for _ in range(m)]
    return SplittableInstance.create([f"f{j}" for j in range(m)], strategies, demands, costs)


def random_parallel_links(rng: random.Random, max_players: int = 3, max_links: int = 3) -> SplittableInstance:
    """Convex parallel-link network; every player may use at least two of the links."""
    n = rng.randint(1, max_players)
    m = rng.randint(2, max_links)
    strategies = []
    for _ in range(n):
        k = rng.randint(2, m)
        strategies.append([[j] for j in sorted(rng.sample(range(m), k))])
    demands = [rng.randint(1, 3) for _ in range(n)]
    total = sum(demands)
    costs = [_random_piecewise(rng, total, convex=True, strict=False) for _ in range(m)]
    return SplittableInstance.create([f"link{j}" for j in range(m)], strategies, demands, costs)
