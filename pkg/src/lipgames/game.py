"""Finite strategic games in normal form.

A game is described by the number of strategies of every player and a
cost oracle mapping a profile (a tuple of strategy indices) to the vector
of private costs.  Costs are exact rationals.  All brute-force operations
work on a :class:`CostTable` that evaluates the oracle once per profile and
rescales the costs to a common integer denominator, so that the coalition
checks can be vectorised with numpy without giving up exactness.

Moves are enumerated by *target profile*: the coalition of a move is the
set of players whose strategy changes.  For strict and alpha-strict moves
this loses nothing, since a coalition member that keeps its strategy can be
dropped without breaking the move.  For super-strong (weak) moves a
non-moving player may be the one that gains strictly; such a player is
added to the coalition when needed (smallest index first).
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Union

import numpy as np

from .lexorder import as_fraction, sorted_desc

__all__ = [
    "BudgetError",
    "Budget",
    "CostTable",
    "DomainError",
    "EfficiencyResult",
    "FiniteGame",
    "ImprovingMove",
    "INF",
    "Mode",
    "PlayerTransform",
    "STRICT",
    "WEAK_SSNE",
    "alpha_strict",
    "apply_transform",
    "enumerate_pne",
    "enumerate_sne",
    "enumerate_ssne",
    "improving_moves",
    "is_minmax_fair",
    "is_pne",
    "is_sne",
    "is_ssne",
    "is_strict_pareto",
    "is_weak_pareto",
    "lp_cost",
    "sorted_lex_minimizers",
    "strong_poa",
    "strong_pos",
    "table_game",
]

Profile = tuple[int, ...]
CostVec = tuple[Fraction, ...]
Norm = Union[int, str]

INF = "inf"

_INT64_SAFE = 2**62


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured budget."""


class DomainError(ValueError):
    """An operation is undefined for the given input."""


@dataclass(frozen=True)
class Budget:
    max_profiles: int = 10**6
    max_players: int = 12


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class Mode:
    """Kind of improving move: ``strict``, ``weak`` (super-strong) or ``alpha``."""

    kind: str
    alpha: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("strict", "weak", "alpha"):
            raise ValueError(f"unknown move mode {self.kind!r}")
        if self.kind == "alpha" and self.alpha <= 0:
            raise ValueError("alpha must be positive")

    def __str__(self) -> str:
        return f"alpha({self.alpha})" if self.kind == "alpha" else self.kind


STRICT = Mode("strict")
WEAK_SSNE = Mode("weak")


def alpha_strict(alpha) -> Mode:
    return Mode("alpha", as_fraction(alpha))


@dataclass(frozen=True)
class ImprovingMove:
    source: Profile
    coalition: tuple[int, ...]
    target: Profile
    mode: Mode = STRICT


class FiniteGame:
    """A finite cost-minimisation game with exact private costs.

    ``cost`` must be deterministic and return ``n`` non-negative rationals.
    ``labels`` optionally names the strategies of every player.
    """

    def __init__(
        self,
        strategy_counts: Sequence[int],
        cost: Callable[[Profile], Sequence],
        labels: Sequence[Sequence[str]] | None = None,
        budget: Budget = DEFAULT_BUDGET,
        name: str = "",
    ):
        counts = tuple(int(c) for c in strategy_counts)
        if not counts:
            raise ValueError("a game needs at least one player")
        if any(c < 1 for c in counts):
            raise ValueError("every player needs at least one strategy")
        if labels is not None:
            labels = tuple(tuple(str(s) for s in row) for row in labels)
            if tuple(len(row) for row in labels) != counts:
                raise ValueError("strategy labels do not match strategy counts")
        self.strategy_counts = counts
        self.labels = labels
        self.budget = budget
        self.name = name
        self._oracle = cost
        self._memo: dict[Profile, CostVec] = {}
        self._table: CostTable | None = None

    @property
    def n(self) -> int:
        return len(self.strategy_counts)

    @property
    def num_profiles(self) -> int:
        return math.prod(self.strategy_counts)

    def check_profile(self, x: Sequence[int]) -> Profile:
        x = tuple(int(v) for v in x)
        if len(x) != self.n:
            raise IndexError(f"profile {x} has {len(x)} entries, expected {self.n}")
        for i, (v, c) in enumerate(zip(x, self.strategy_counts)):
            if not 0 <= v < c:
                raise IndexError(f"strategy {v} of player {i} out of range [0, {c})")
        return x

    def cost(self, x: Sequence[int]) -> CostVec:
        x = self.check_profile(x)
        hit = self._memo.get(x)
        if hit is None:
            raw = self._oracle(x)
            hit = tuple(as_fraction(v) if not isinstance(v, Fraction) else v for v in raw)
            if len(hit) != self.n:
                raise ValueError(f"cost oracle returned {len(hit)} values for {self.n} players")
            if any(v < 0 for v in hit):
                raise ValueError(f"negative private cost at profile {x}: {hit}")
            self._memo[x] = hit
        return hit

    def profiles(self) -> Iterator[Profile]:
        self.require_enumerable()
        return itertools.product(*(range(c) for c in self.strategy_counts))

    def require_enumerable(self) -> None:
        if self.num_profiles > self.budget.max_profiles:
            raise BudgetError(
                f"{self.num_profiles} profiles exceed the budget of {self.budget.max_profiles}"
            )
        if self.n > self.budget.max_players:
            raise BudgetError(
                f"{self.n} players exceed the coalition budget of {self.budget.max_players}"
            )

    def table(self) -> "CostTable":
        if self._table is None:
            self._table = CostTable.build(self)
        return self._table

    def strategy_label(self, player: int, s: int) -> str:
        return self.labels[player][s] if self.labels else str(s)

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"<FiniteGame{tag} n={self.n} strategies={self.strategy_counts}>"


@dataclass
class CostTable:
    """All profiles of a game with their costs, scaled to integers."""

    profiles: list[Profile]
    index: dict[Profile, int]
    costs: list[CostVec]
    strat: np.ndarray
    scaled: np.ndarray
    scale: int

    @classmethod
    def build(cls, game: FiniteGame) -> "CostTable":
        profiles = list(game.profiles())
        costs = [game.cost(x) for x in profiles]
        scale = reduce(math.lcm, (v.denominator for row in costs for v in row), 1)
        ints = [[int(v * scale) for v in row] for row in costs]
        big = max((abs(v) for row in ints for v in row), default=0) >= _INT64_SAFE
        scaled = np.array(ints, dtype=object if big else np.int64).reshape(len(profiles), game.n)
        strat = np.array(profiles, dtype=np.int64).reshape(len(profiles), game.n)
        return cls(
            profiles=profiles,
            index={x: k for k, x in enumerate(profiles)},
            costs=costs,
            strat=strat,
            scaled=scaled,
            scale=scale,
        )

    def __len__(self) -> int:
        return len(self.profiles)

    def alpha_threshold(self, alpha: Fraction) -> int:
        # integer gap d satisfies d > alpha*scale  iff  d > floor(alpha*scale)
        return math.floor(alpha * self.scale)

    def _valid_mask(self, row: int, max_coalition: int, mode: Mode):
        changed = self.strat != self.strat[row]
        nchanged = changed.sum(axis=1)
        gain = self.scaled[row] - self.scaled  # positive = cost went down
        size_ok = (nchanged >= 1) & (nchanged <= max_coalition)
        if mode.kind == "strict":
            valid = (~changed | (gain > 0)).all(axis=1) & size_ok
        elif mode.kind == "alpha":
            t = self.alpha_threshold(mode.alpha)
            valid = (~changed | (gain > t)).all(axis=1) & size_ok
        else:
            weak_ok = (~changed | (gain >= 0)).all(axis=1)
            strict_inside = (changed & (gain > 0)).any(axis=1)
            strict_outside = (~changed & (gain > 0)).any(axis=1)
            valid = weak_ok & size_ok & (
                strict_inside | (strict_outside & (nchanged + 1 <= max_coalition))
            )
        return valid, changed, gain

    def moves_from(self, row: int, max_coalition: int, mode: Mode) -> list[tuple[int, tuple[int, ...]]]:
        """Targets reachable from profile ``row`` by one improving move.

        Returns ``(target_row, coalition)`` pairs in canonical order:
        coalition size, then coalition, then target profile.
        """
        valid, changed, gain = self._valid_mask(row, max_coalition, mode)
        out = []
        for y in np.flatnonzero(valid):
            movers = tuple(int(i) for i in np.flatnonzero(changed[y]))
            coalition = movers
            if mode.kind == "weak" and not any(gain[y, i] > 0 for i in movers):
                extra = next(i for i in range(changed.shape[1]) if not changed[y, i] and gain[y, i] > 0)
                coalition = tuple(sorted(movers + (extra,)))
            out.append((int(y), movers, coalition))
        out.sort(key=lambda t: (len(t[1]), t[1], t[0]))
        return [(y, coalition) for y, _, coalition in out]

    def targets_from(self, row: int, max_coalition: int, mode: Mode) -> np.ndarray:
        """Rows of all improving-move targets from ``row`` (unordered)."""
        return np.flatnonzero(self._valid_mask(row, max_coalition, mode)[0])

    def has_move(self, row: int, max_coalition: int, mode: Mode) -> bool:
        return bool(self._valid_mask(row, max_coalition, mode)[0].any())

    def sorted_keys(self, values: Sequence[Sequence]) -> np.ndarray:
        """Dense ranks of the sorted-descending keys of ``values``.

        ``rank[a] < rank[b]`` iff ``values[a]`` is sorted-lex smaller than
        ``values[b]``; equal sorted vectors share a rank.
        """
        return dense_rank([sorted_desc(v) for v in values])


def dense_rank(keys: Sequence) -> np.ndarray:
    order = sorted(set(keys))
    pos = {k: r for r, k in enumerate(order)}
    return np.array([pos[k] for k in keys], dtype=np.int64)


def _coalition_cap(game: FiniteGame, max_coalition: int | None) -> int:
    if max_coalition is None:
        return game.n
    if not 1 <= max_coalition <= game.n:
        raise ValueError(f"max_coalition must lie in [1, {game.n}], got {max_coalition}")
    return max_coalition


def improving_moves(
    game: FiniteGame,
    x: Sequence[int],
    max_coalition: int | None = None,
    mode: Mode = STRICT,
) -> list[ImprovingMove]:
    """All improving moves from ``x`` by coalitions of at most ``max_coalition`` players.

    Ordered by coalition size, then coalition (lexicographic), then target
    profile.  The coalition is the set of players that change strategy, plus
    (super-strong mode only) one non-moving player that gains strictly when
    no mover does.
    """
    x = game.check_profile(x)
    cap = _coalition_cap(game, max_coalition)
    table = game.table()
    row = table.index[x]
    return [
        ImprovingMove(x, coalition, table.profiles[y], mode)
        for y, coalition in table.moves_from(row, cap, mode)
    ]


def is_sne(game: FiniteGame, x: Sequence[int]) -> bool:
    table = game.table()
    return not table.has_move(table.index[game.check_profile(x)], game.n, STRICT)


def is_ssne(game: FiniteGame, x: Sequence[int]) -> bool:
    table = game.table()
    return not table.has_move(table.index[game.check_profile(x)], game.n, WEAK_SSNE)


def is_pne(game: FiniteGame, x: Sequence[int]) -> bool:
    table = game.table()
    return not table.has_move(table.index[game.check_profile(x)], 1, STRICT)


def _stable_profiles(game: FiniteGame, max_coalition: int, mode: Mode) -> list[Profile]:
    table = game.table()
    return [x for k, x in enumerate(table.profiles) if not table.has_move(k, max_coalition, mode)]


def enumerate_sne(game: FiniteGame) -> list[Profile]:
    """All strong Nash equilibria, in lexicographic profile order."""
    return _stable_profiles(game, game.n, STRICT)


def enumerate_ssne(game: FiniteGame) -> list[Profile]:
    return _stable_profiles(game, game.n, WEAK_SSNE)


def enumerate_pne(game: FiniteGame) -> list[Profile]:
    return _stable_profiles(game, 1, STRICT)


def is_weak_pareto(game: FiniteGame, x: Sequence[int]) -> bool:
    """No profile makes every player strictly better off."""
    table = game.table()
    cx = table.scaled[table.index[game.check_profile(x)]]
    return not bool((table.scaled < cx).all(axis=1).any())


def is_strict_pareto(game: FiniteGame, x: Sequence[int]) -> bool:
    """No profile makes someone strictly better off and nobody worse off."""
    table = game.table()
    cx = table.scaled[table.index[game.check_profile(x)]]
    dominated = (table.scaled <= cx).all(axis=1) & (table.scaled < cx).any(axis=1)
    return not bool(dominated.any())


def is_minmax_fair(game: FiniteGame, x: Sequence[int]) -> bool:
    """Check min-max fairness of ``x`` against every other profile.

    For every ``y`` and every player ``i`` with ``cost_i(y) < cost_i(x)`` there
    must be a player ``j`` with ``cost_j(x) >= cost_i(x)`` whose cost rises
    strictly in ``y``.
    """
    table = game.table()
    cx = table.scaled[table.index[game.check_profile(x)]]
    worse = table.scaled > cx  # worse[y, j]
    for i in range(game.n):
        better_i = table.scaled[:, i] < cx[i]
        if not better_i.any():
            continue
        heavy = cx >= cx[i]
        compensated = (worse[:, heavy]).any(axis=1)
        if (better_i & ~compensated).any():
            return False
    return True


def sorted_lex_minimizers(game: FiniteGame) -> list[Profile]:
    """Profiles whose private-cost vector is minimal in the sorted lexicographical order."""
    table = game.table()
    keys = [sorted_desc(c) for c in table.costs]
    best = min(keys)
    return [x for x, k in zip(table.profiles, keys) if k == best]


def _norm(p) -> Norm:
    if p in (INF, "Infinity", "infinity", "∞") or p == math.inf:
        return INF
    p = int(p)
    if p < 1:
        raise ValueError("p must be at least 1")
    return p


def lp_cost(game: FiniteGame, x: Sequence[int], p=1):
    """Social cost of ``x`` under the L_p norm of the private-cost vector.

    ``p=1`` and ``p="inf"`` give exact rationals; other integer ``p`` gives a
    float (root of an exact power sum).
    """
    return _lp(game.cost(x), _norm(p))


def _lp(costs: Sequence[Fraction], p: Norm):
    if p == INF:
        return max(costs)
    if p == 1:
        return sum(costs, Fraction(0))
    total = sum((c**p for c in costs), Fraction(0))
    return float(total) ** (1.0 / p)


@dataclass(frozen=True)
class EfficiencyResult:
    """Ratio of an equilibrium's social cost to the social optimum.

    ``unbounded`` is set when the optimum is zero while the equilibrium cost
    is positive; ``ratio`` is then ``math.inf``.  A zero equilibrium cost over
    a zero optimum counts as ratio 1.
    """

    ratio: Union[Fraction, float]
    unbounded: bool
    equilibrium: Profile
    equilibrium_cost: Union[Fraction, float]
    optimum: Profile
    optimum_cost: Union[Fraction, float]
    p: Norm
    sne_count: int = field(default=0)


def _efficiency(game: FiniteGame, p, worst: bool) -> EfficiencyResult:
    p = _norm(p)
    sne = enumerate_sne(game)
    if not sne:
        raise DomainError("the game has no strong Nash equilibrium")
    table = game.table()
    social = [_lp(c, p) for c in table.costs]
    opt_row = min(range(len(table)), key=lambda k: social[k])
    pick = max if worst else min
    eq = pick(sne, key=lambda x: social[table.index[x]])
    eq_cost = social[table.index[eq]]
    opt_cost = social[opt_row]
    if opt_cost == 0:
        unbounded = eq_cost > 0
        ratio = math.inf if unbounded else Fraction(1)
    else:
        unbounded = False
        ratio = eq_cost / opt_cost
    return EfficiencyResult(
        ratio=ratio,
        unbounded=unbounded,
        equilibrium=eq,
        equilibrium_cost=eq_cost,
        optimum=table.profiles[opt_row],
        optimum_cost=opt_cost,
        p=p,
        sne_count=len(sne),
    )


def strong_pos(game: FiniteGame, p=1) -> EfficiencyResult:
    """Strong price of stability: best SNE cost over the optimum."""
    return _efficiency(game, p, worst=False)


def strong_poa(game: FiniteGame, p=1) -> EfficiencyResult:
    """Strong price of anarchy: worst SNE cost over the optimum."""
    return _efficiency(game, p, worst=True)


class PlayerTransform:
    """Strictly increasing piecewise-linear maps, one per player.

    Each table is a list of ``(input, output)`` breakpoints; values between
    breakpoints are interpolated linearly and values outside the table raise
    :class:`DomainError`.
    """

    def __init__(self, tables: Sequence[Sequence[tuple]]):
        self.tables = []
        for i, table in enumerate(tables):
            pts = [(as_fraction(a), as_fraction(b)) for a, b in table]
            if not pts:
                raise ValueError(f"empty transform table for player {i}")
            for (a0, b0), (a1, b1) in zip(pts, pts[1:]):
                if not (a1 > a0 and b1 > b0):
                    raise ValueError(f"transform of player {i} is not strictly increasing")
            if any(a < 0 or b < 0 for a, b in pts):
                raise ValueError(f"transform of player {i} has negative breakpoints")
            self.tables.append(pts)

    @classmethod
    def identity(cls, n: int, upper) -> "PlayerTransform":
        upper = as_fraction(upper)
        return cls([[(0, 0), (upper, upper)]] * n)

    def __len__(self) -> int:
        return len(self.tables)

    def apply(self, player: int, value: Fraction) -> Fraction:
        pts = self.tables[player]
        if len(pts) == 1:
            if value == pts[0][0]:
                return pts[0][1]
            raise DomainError(f"value {value} outside the transform of player {player}")
        if value < pts[0][0] or value > pts[-1][0]:
            raise DomainError(
                f"value {value} outside [{pts[0][0]}, {pts[-1][0]}] for player {player}"
            )
        for (a0, b0), (a1, b1) in zip(pts, pts[1:]):
            if a0 <= value <= a1:
                return b0 + (b1 - b0) * (value - a0) / (a1 - a0)
        raise AssertionError("unreachable")


def apply_transform(game: FiniteGame, transform: PlayerTransform) -> FiniteGame:
    """Game with private costs ``transform_i(cost_i)``.

    Range errors surface when a profile is evaluated.
    """
    if len(transform) != game.n:
        raise ValueError(f"transform has {len(transform)} tables for {game.n} players")

    def cost(x):
        return tuple(transform.apply(i, c) for i, c in enumerate(game.cost(x)))

    return FiniteGame(
        game.strategy_counts, cost, labels=game.labels, budget=game.budget,
        name=f"{game.name}+transform" if game.name else "transformed",
    )


def table_game(n_strategies: Sequence[int], table: dict, labels=None, name: str = "") -> FiniteGame:
    """Game given by an explicit ``profile -> costs`` mapping."""
    data = {tuple(k): tuple(as_fraction(v) for v in vals) for k, vals in table.items()}
    game = FiniteGame(n_strategies, lambda x: data[x], labels=labels, name=name)
    missing = [x for x in game.profiles() if x not in data]
    if missing:
        raise ValueError(f"cost table misses profile {missing[0]}")
    return game
