"""Congestion models and bottleneck congestion games.

A facility's cost depends only on the set of players using it.  Four cost
kinds are supported, each of which makes that dependence structural:

* :class:`LoadTable`    -- ``c_f(k)`` for ``k = 0..n`` users
* :class:`SetTable`     -- explicit cost per user set
* :class:`Interference` -- total weight of interference edges inside the user set
* :class:`Additive`     -- sum of per-player processing times (scheduling)

The remaining axioms (non-negativity and monotonicity in the user set) are
checked by :meth:`CongestionModel.validate`.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .game import Budget, DEFAULT_BUDGET, FiniteGame, Profile
from .lexorder import as_fraction
from .potential import LipFunction

__all__ = [
    "Additive",
    "BottleneckGame",
    "CongestionModel",
    "Interference",
    "LoadTable",
    "SetTable",
    "ValidationError",
    "alex_pairs",
    "build_game",
    "facility_costs",
    "facility_loads",
    "make_interference",
    "make_scheduling",
    "phi_pi",
    "psi_facility",
    "upsilon",
]


class ValidationError(ValueError):
    """Input violates a model axiom; ``axiom`` names it and ``witness`` shows why."""

    def __init__(self, axiom: str, witness: str):
        super().__init__(f"{axiom} violated: {witness}")
        self.axiom = axiom
        self.witness = witness


class LoadTable:
    """Cost depends on the number of users: ``tables[f][k]``."""

    kind = "load_table"

    def __init__(self, tables: Sequence[Sequence]):
        self.tables = [tuple(as_fraction(v) for v in t) for t in tables]

    def cost(self, f: int, users: frozenset[int]) -> Fraction:
        return self.tables[f][len(users)]

    def validate(self, model: "CongestionModel") -> None:
        if len(self.tables) != model.m:
            raise ValueError(f"{len(self.tables)} cost tables for {model.m} facilities")
        for f, t in enumerate(self.tables):
            name = model.facilities[f]
            if len(t) < model.n + 1:
                raise ValueError(f"cost table of {name} needs entries for 0..{model.n} users")
            for k, v in enumerate(t):
                if v < 0:
                    raise ValidationError("non-negativity", f"c_{name}({k}) = {v}")
            for k in range(len(t) - 1):
                if t[k + 1] < t[k]:
                    raise ValidationError(
                        "monotonicity", f"c_{name}({k + 1}) = {t[k + 1]} < c_{name}({k}) = {t[k]}"
                    )


class SetTable:
    """Explicit cost for every user set that can occur on a facility."""

    kind = "set_oracle"

    def __init__(self, tables: Sequence[dict]):
        self.tables = [
            {frozenset(users): as_fraction(v) for users, v in t.items()} for t in tables
        ]

    def cost(self, f: int, users: frozenset[int]) -> Fraction:
        try:
            return self.tables[f][users]
        except KeyError:
            raise KeyError(f"no cost given for facility {f} with users {sorted(users)}") from None

    def validate(self, model: "CongestionModel", max_users: int = 12) -> None:
        if len(self.tables) != model.m:
            raise ValueError(f"{len(self.tables)} cost tables for {model.m} facilities")
        for f in range(model.m):
            name = model.facilities[f]
            potential = sorted(model.potential_users(f))
            if len(potential) > max_users:
                raise ValueError(
                    f"facility {name} has {len(potential)} potential users; "
                    f"exhaustive validation is limited to {max_users}"
                )
            table = self.tables[f]
            for r in range(len(potential) + 1):
                for users in itertools.combinations(potential, r):
                    s = frozenset(users)
                    if s not in table:
                        raise ValueError(f"facility {name}: no cost for users {sorted(s)}")
                    if table[s] < 0:
                        raise ValidationError("non-negativity", f"c_{name}({sorted(s)}) = {table[s]}")
                    for i in users:
                        smaller = s - {i}
                        if table[smaller] > table[s]:
                            raise ValidationError(
                                "monotonicity",
                                f"c_{name}({sorted(smaller)}) = {table[smaller]} > "
                                f"c_{name}({sorted(s)}) = {table[s]}",
                            )


class Interference:
    """Station cost = total weight of interference edges among its users."""

    kind = "interference"

    def __init__(self, edges: Sequence[tuple]):
        self.edges = [(int(u), int(v), as_fraction(w)) for u, v, w in edges]

    def cost(self, f: int, users: frozenset[int]) -> Fraction:
        return sum((w for u, v, w in self.edges if u in users and v in users), Fraction(0))

    def validate(self, model: "CongestionModel") -> None:
        for u, v, w in self.edges:
            if not (0 <= u < model.n and 0 <= v < model.n) or u == v:
                raise ValueError(f"bad interference edge ({u}, {v})")
            if w < 0:
                raise ValidationError("non-negativity", f"edge ({u}, {v}) has weight {w}")


class Additive:
    """Machine load = sum of processing times of the assigned jobs."""

    kind = "additive"

    def __init__(self, times: Sequence[Sequence]):
        # times[i][f]; None where job i may not run on machine f
        self.times = [[None if v is None else as_fraction(v) for v in row] for row in times]

    def cost(self, f: int, users: frozenset[int]) -> Fraction:
        return sum((self.times[i][f] for i in users), Fraction(0))

    def validate(self, model: "CongestionModel") -> None:
        for i, row in enumerate(self.times):
            for f, v in enumerate(row):
                if v is not None and v < 0:
                    raise ValidationError("non-negativity", f"processing time p[{i}][{f}] = {v}")
        for i, strategies in enumerate(model.strategies):
            for s in strategies:
                for f in s:
                    if self.times[i][f] is None:
                        raise ValueError(f"job {i} may not use machine {model.facilities[f]}")


@dataclass(frozen=True)
class CongestionModel:
    """Players, facilities, strategy sets (lists of facility sets) and costs."""

    n: int
    facilities: tuple[str, ...]
    strategies: tuple[tuple[frozenset[int], ...], ...]
    costs: LoadTable | SetTable | Interference | Additive

    @classmethod
    def create(cls, facilities, strategies, costs, n=None, validate=True) -> "CongestionModel":
        facilities = tuple(str(f) for f in facilities)
        fidx = {f: k for k, f in enumerate(facilities)}
        if len(fidx) != len(facilities):
            raise ValueError("facility names must be unique")

        def as_set(s):
            out = frozenset(fidx[f] if isinstance(f, str) else int(f) for f in s)
            if not out:
                raise ValueError("strategies must be non-empty facility sets")
            if any(not 0 <= f < len(facilities) for f in out):
                raise ValueError(f"strategy {s} names an unknown facility")
            return out

        strategies = tuple(tuple(as_set(s) for s in row) for row in strategies)
        n = len(strategies) if n is None else n
        if n != len(strategies) or n < 1:
            raise ValueError("need one non-empty strategy list per player")
        for i, row in enumerate(strategies):
            if not row:
                raise ValueError(f"player {i} has no strategies")
        model = cls(n, facilities, strategies, costs)
        if validate:
            model.validate()
        return model

    @property
    def m(self) -> int:
        return len(self.facilities)

    def potential_users(self, f: int) -> set[int]:
        return {i for i, row in enumerate(self.strategies) if any(f in s for s in row)}

    def validate(self) -> None:
        self.costs.validate(self)

    def users(self, x: Profile) -> list[frozenset[int]]:
        groups: list[set[int]] = [set() for _ in range(self.m)]
        for i, s in enumerate(x):
            for f in self.strategies[i][s]:
                groups[f].add(i)
        return [frozenset(g) for g in groups]

    def facility_costs(self, x: Profile) -> tuple[Fraction, ...]:
        return tuple(self.costs.cost(f, u) for f, u in enumerate(self.users(x)))

    def strategy_label(self, i: int, s: int) -> str:
        return "+".join(self.facilities[f] for f in sorted(self.strategies[i][s]))


class BottleneckGame(FiniteGame):
    """Finite game whose private cost is the costliest facility a player uses."""

    def __init__(self, model: CongestionModel, budget: Budget = DEFAULT_BUDGET, name: str = ""):
        self.model = model
        labels = [[model.strategy_label(i, s) for s in range(len(row))]
                  for i, row in enumerate(model.strategies)]
        super().__init__(
            [len(row) for row in model.strategies], self._private_costs,
            labels=labels, budget=budget, name=name,
        )

    def _private_costs(self, x: Profile) -> tuple[Fraction, ...]:
        fc = self.model.facility_costs(x)
        return tuple(max(fc[f] for f in self.model.strategies[i][s]) for i, s in enumerate(x))


def build_game(model: CongestionModel, budget: Budget = DEFAULT_BUDGET, name: str = "") -> BottleneckGame:
    model.validate()
    return BottleneckGame(model, budget=budget, name=name)


def facility_costs(game: BottleneckGame, x: Profile) -> tuple[Fraction, ...]:
    return game.model.facility_costs(tuple(x))


def facility_loads(game: BottleneckGame, x: Profile) -> tuple[int, ...]:
    return tuple(len(u) for u in game.model.users(tuple(x)))


def phi_pi(game: FiniteGame) -> LipFunction:
    """The private-cost vector itself."""
    return LipFunction("phi_pi", game.n, game.cost)


def psi_facility(game: BottleneckGame) -> LipFunction:
    """Per (player, facility) cost of used facilities, zero elsewhere; player-major."""
    model = game.model

    def evaluate(x):
        fc = model.facility_costs(x)
        out = []
        for i, s in enumerate(x):
            used = model.strategies[i][s]
            out.extend(fc[f] if f in used else Fraction(0) for f in range(model.m))
        return tuple(out)

    return LipFunction("psi_facility", game.n * model.m, evaluate)


def upsilon(game: BottleneckGame) -> LipFunction:
    """Facility-cost vector.  Not a certificate in general; strictly monotone costs only."""
    return LipFunction("upsilon", game.model.m, game.model.facility_costs)


def alex_pairs(game: BottleneckGame, x: Profile) -> tuple[tuple[Fraction, int], ...]:
    """``(cost, number of users)`` per facility, for the pair order of :mod:`lexorder`."""
    return tuple(zip(facility_costs(game, x), facility_loads(game, x)))


def make_interference(n: int, edges: Sequence[tuple], stations: int) -> CongestionModel:
    """Singleton model: every terminal picks one of ``stations`` base stations."""
    if stations < 1:
        raise ValueError("need at least one station")
    facilities = [f"station{j}" for j in range(stations)]
    strategies = [[[j] for j in range(stations)] for _ in range(n)]
    return CongestionModel.create(facilities, strategies, Interference(edges), n=n)


def make_scheduling(times: Sequence[Sequence], machines: Sequence[str] | None = None) -> CongestionModel:
    """Unrelated-machines scheduling; ``times[i][j]`` is ``None`` where job i is not allowed.

    Identical, related and restricted machines are special cases of the
    processing-time matrix.
    """
    m = len(times[0]) if times else 0
    if any(len(row) != m for row in times):
        raise ValueError("processing-time matrix must be rectangular")
    facilities = list(machines) if machines else [f"machine{j}" for j in range(m)]
    strategies = [[[j] for j in range(m) if row[j] is not None] for row in times]
    return CongestionModel.create(facilities, strategies, Additive(times), n=len(times))
