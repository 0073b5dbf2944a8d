"""Generalized strong ordinal potentials for finite games.

Two constructions are offered.  The power potential sums the M-th powers
of a vector function that decreases in the sorted lexicographical order
along every improving move; the exponent is chosen from the largest value
and the smallest decisive gap of that function.  The topological potential
labels the improvement graph in topological order and needs no structure
at all, only acyclicity.
"""

from __future__ import annotations

import graphlib
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .game import STRICT, FiniteGame, ImprovingMove, Mode, Profile, _coalition_cap, dense_rank
from .lexorder import as_fraction, sorted_desc

__all__ = [
    "LipCheck",
    "LipFunction",
    "PotentialSpec",
    "TopologicalResult",
    "compute_exponent",
    "custom_function",
    "exponent_from_bounds",
    "improvement_edges",
    "path_bound",
    "power_potential",
    "topological_potential",
    "verify_lip",
]


@dataclass(frozen=True)
class LipFunction:
    """Vector function on profiles, candidate certificate for the LIP."""

    name: str
    q: int
    evaluate: Callable[[Profile], tuple]

    def __call__(self, x: Profile) -> tuple[Fraction, ...]:
        v = tuple(self.evaluate(tuple(x)))
        if len(v) != self.q:
            raise ValueError(f"{self.name} returned {len(v)} entries, expected {self.q}")
        return v


def custom_function(name: str, q: int, fn: Callable[[Profile], Sequence]) -> LipFunction:
    return LipFunction(name, q, lambda x: tuple(as_fraction(v) for v in fn(x)))


@dataclass(frozen=True)
class LipCheck:
    holds: bool
    counterexample: ImprovingMove | None
    moves_checked: int
    before: tuple | None = None
    after: tuple | None = None


def improvement_edges(
    game: FiniteGame, max_coalition: int | None = None, mode: Mode = STRICT
) -> list[tuple[int, np.ndarray]]:
    """Improvement graph as ``(source_row, target_rows)`` per profile row."""
    cap = _coalition_cap(game, max_coalition)
    table = game.table()
    return [(k, table.targets_from(k, cap, mode)) for k in range(len(table))]


def verify_lip(
    game: FiniteGame,
    phi: LipFunction,
    max_coalition: int | None = None,
    mode: Mode = STRICT,
) -> LipCheck:
    """Check that ``phi`` strictly decreases (sorted-lex) along every improving move.

    Profiles are visited in lexicographic order and moves in the order of
    :func:`improving_moves`, so the reported counterexample is the first
    violation in that order.
    """
    cap = _coalition_cap(game, max_coalition)
    table = game.table()
    values = [phi(x) for x in table.profiles]
    rank = dense_rank([sorted_desc(v) for v in values])
    checked = 0
    for k in range(len(table)):
        targets = table.targets_from(k, cap, mode)
        checked += len(targets)
        if (rank[targets] < rank[k]).all():
            continue
        for y, coalition in table.moves_from(k, cap, mode):
            if rank[y] >= rank[k]:
                move = ImprovingMove(table.profiles[k], coalition, table.profiles[y], mode)
                return LipCheck(False, move, checked, values[k], values[y])
    return LipCheck(True, None, checked)


@dataclass(frozen=True)
class PotentialSpec:
    """Power potential ``sum_i phi_i(x)**M`` together with the data fixing M.

    ``degenerate`` marks the cases where no improving move exists (any
    function is a potential) or ``q == 1`` (``phi`` itself is one).
    """

    phi: LipFunction
    phi_max: Fraction
    eps_min: Fraction | None
    M: int
    degenerate: bool = False

    @property
    def q(self) -> int:
        return self.phi.q


def exponent_from_bounds(q: int, phi_max, eps_min) -> int:
    """Smallest integer strictly greater than ``ln(q) * phi_max / eps_min``."""
    phi_max, eps_min = Fraction(phi_max), Fraction(eps_min)
    if eps_min <= 0:
        raise ValueError("eps_min must be positive")
    if q <= 1 or phi_max == 0:
        return 1
    ratio = phi_max / eps_min
    with localcontext() as ctx:
        ctx.prec = 60
        bound = Decimal(q).ln() * Decimal(ratio.numerator) / Decimal(ratio.denominator)
    # ln(q) is irrational for q >= 2, so the bound is never an integer
    return max(1, int(bound.to_integral_value(rounding="ROUND_FLOOR")) + 1)


def _decisive_gap(before: tuple, after: tuple) -> Fraction:
    """First non-zero difference of the sorted vectors (positive on a decrease)."""
    for a, b in zip(sorted_desc(before), sorted_desc(after)):
        if a != b:
            return a - b
    return Fraction(0)


def compute_exponent(
    game: FiniteGame,
    phi: LipFunction,
    max_coalition: int | None = None,
    mode: Mode = STRICT,
) -> PotentialSpec:
    """Exponent M making ``sum phi_i**M`` a strong ordinal potential.

    ``phi_max`` is the largest entry of ``phi`` over all profiles and
    ``eps_min`` the smallest decisive gap over all improving moves, i.e. the
    difference at the first position where the sorted vectors differ.
    ``phi`` is assumed to satisfy the LIP (see :func:`verify_lip`); a
    violating move raises ``ValueError``.
    """
    cap = _coalition_cap(game, max_coalition)
    table = game.table()
    values = [phi(x) for x in table.profiles]
    phi_max = max((v for row in values for v in row), default=Fraction(0))
    eps = None
    for k in range(len(table)):
        for y in table.targets_from(k, cap, mode):
            gap = _decisive_gap(values[k], values[y])
            if gap <= 0:
                raise ValueError(
                    f"{phi.name} does not decrease along {table.profiles[k]} -> {table.profiles[y]}"
                )
            if eps is None or gap < eps:
                eps = gap
    if eps is None:
        return PotentialSpec(phi, Fraction(phi_max), None, 1, degenerate=True)
    M = exponent_from_bounds(phi.q, phi_max, eps)
    return PotentialSpec(phi, Fraction(phi_max), eps, M, degenerate=phi.q == 1)


def power_potential(spec: PotentialSpec, x: Profile) -> Fraction:
    return sum((v**spec.M for v in spec.phi(x)), Fraction(0))


def path_bound(spec: PotentialSpec) -> int:
    """Bound ``ceil(q * phi_max**M / eps_min)`` on improvement-path lengths.

    The bound is not invariant under rescaling of ``phi``; it is meant for
    functions whose values are integers or otherwise bounded away from zero.
    Degenerate specs without improving moves return 0.
    """
    if spec.eps_min is None:
        return 0
    return math.ceil(spec.q * spec.phi_max**spec.M / spec.eps_min)


@dataclass(frozen=True)
class TopologicalResult:
    """Either ``labels`` (decreasing along every edge) or a directed ``cycle``."""

    labels: dict[Profile, int] | None
    cycle: list[Profile] | None

    @property
    def acyclic(self) -> bool:
        return self.labels is not None


def topological_potential(
    game: FiniteGame, max_coalition: int | None = None, mode: Mode = STRICT
) -> TopologicalResult:
    table = game.table()
    # graphlib orders predecessors first; feed edges reversed so that
    # targets (lower potential) come out first.
    sorter = graphlib.TopologicalSorter()
    for k, targets in improvement_edges(game, max_coalition, mode):
        sorter.add(k, *(int(y) for y in targets))
    try:
        order = list(sorter.static_order())
    except graphlib.CycleError as err:
        # graphlib lists each node before the node that depends on it, which
        # runs against the moves; reverse to follow them.  First node repeats.
        cyc = [table.profiles[k] for k in reversed(err.args[1])]
        return TopologicalResult(None, cyc)
    return TopologicalResult({table.profiles[k]: r for r, k in enumerate(order)}, None)
