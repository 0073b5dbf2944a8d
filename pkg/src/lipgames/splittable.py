"""Splittable bottleneck congestion games.

Every player spreads a divisible demand ``d_i`` over its finite strategy
list.  A state is one intensity vector per player; facility loads add up
linearly and a player's cost is the largest facility cost among the
facilities it actually uses (strictly positive intensity).  That
used-facility rule makes private costs discontinuous in the state.

Exact rationals give exact semantics.  Float states are accepted as well;
there an intensity counts as used when it exceeds ``1e-12 * d_i``.

:func:`approx_sne` minimizes a smooth convex surrogate with pairwise
Frank-Wolfe steps and then checks the result with
:func:`verify_alpha_unilateral`, which is the actual certificate.
"""

from __future__ import annotations

import bisect
import logging
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .congestion import ValidationError
from .lexorder import as_fraction

log = logging.getLogger(__name__)

__all__ = [
    "ApproxResult",
    "PiecewiseLinear",
    "SplittableInstance",
    "Violation",
    "VerifyResult",
    "alpha_exponent",
    "alpha_potential",
    "approx_sne",
    "best_response_value",
    "is_improving",
    "lip_certificates",
    "loads",
    "private_costs",
    "random_state",
    "sample_moves",
    "surrogate_value",
    "uniform_state",
    "used_facilities",
    "validate_state",
    "verify_alpha_unilateral",
]

USED_REL = 1e-12
SIMPLEX_TOL = 1e-9

State = tuple[tuple, ...]


class PiecewiseLinear:
    """Continuous piecewise-linear function through ``points`` (sorted by load).

    The first breakpoint must sit at load 0.  Beyond the last breakpoint
    the last segment is extended, which only matters for float round-off.
    """

    def __init__(self, points: Sequence[Sequence]):
        pts = [(as_fraction(x), as_fraction(y)) for x, y in points]
        if not pts:
            raise ValueError("a cost function needs at least one breakpoint")
        if pts[0][0] != 0:
            raise ValueError("the first breakpoint must be at load 0")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if x1 <= x0:
                raise ValueError("breakpoint loads must be strictly increasing")
        self.points = tuple(pts)
        self.xs = [x for x, _ in pts]
        self.ys = [y for _, y in pts]
        self.slopes = [
            (y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(pts, pts[1:])
        ] or [Fraction(0)]
        self._fx = np.array([float(x) for x in self.xs])
        self._fy = np.array([float(y) for y in self.ys])
        self._fs = np.array([float(s) for s in self.slopes])

    @classmethod
    def constant(cls, value) -> "PiecewiseLinear":
        return cls([(0, value)])

    @classmethod
    def linear(cls, slope, intercept=0, upto=1) -> "PiecewiseLinear":
        slope, intercept = as_fraction(slope), as_fraction(intercept)
        return cls([(0, intercept), (upto, intercept + slope * as_fraction(upto))])

    def _segment(self, load) -> int:
        k = bisect.bisect_right(self.xs, load) - 1
        return min(max(k, 0), len(self.slopes) - 1)

    def __call__(self, load):
        k = self._segment(load)
        return self.ys[k] + self.slopes[k] * (load - self.xs[k])

    def slope_at(self, load):
        """Right derivative."""
        return self.slopes[self._segment(load)]

    def fvalue(self, load: float) -> float:
        k = min(max(int(np.searchsorted(self._fx, load, side="right")) - 1, 0), len(self._fs) - 1)
        return float(self._fy[k] + self._fs[k] * (load - self._fx[k]))

    def fslope(self, load: float) -> float:
        k = min(max(int(np.searchsorted(self._fx, load, side="right")) - 1, 0), len(self._fs) - 1)
        return float(self._fs[k])

    def max_load_below(self, theta: float, start: float, limit: float) -> float:
        """Largest ``x`` in ``[0, limit]`` with ``c(start + x) <= theta`` (0 if none)."""
        if self.fvalue(start) > theta:
            return 0.0
        if self.fvalue(start + limit) <= theta:
            return limit
        lo, hi = start, start + limit
        # the last breakpoint at or below theta bounds the crossing segment
        for x, y in zip(self._fx, self._fy):
            if lo < x < hi:
                if y <= theta:
                    lo = x
                else:
                    hi = x
                    break
        s = self.fslope(lo)
        if s <= 0:
            return lo - start
        return min(limit, max(0.0, lo + (theta - self.fvalue(lo)) / s - start))

    def is_convex(self) -> bool:
        return all(a <= b for a, b in zip(self.slopes, self.slopes[1:]))

    def is_strictly_increasing(self) -> bool:
        return all(s > 0 for s in self.slopes)


@dataclass(frozen=True)
class SplittableInstance:
    """Facilities, per-player strategy lists, demands and facility cost functions."""

    facilities: tuple[str, ...]
    strategies: tuple[tuple[frozenset[int], ...], ...]
    demands: tuple[Fraction, ...]
    costs: tuple[PiecewiseLinear, ...]
    C: Fraction

    @classmethod
    def create(cls, facilities, strategies, demands, costs, C=None, validate=True):
        facilities = tuple(str(f) for f in facilities)
        fidx = {f: k for k, f in enumerate(facilities)}

        def as_set(s):
            out = frozenset(fidx[f] if isinstance(f, str) else int(f) for f in s)
            if not out or any(not 0 <= f < len(facilities) for f in out):
                raise ValueError(f"bad strategy {s}")
            return out

        strategies = tuple(tuple(as_set(s) for s in row) for row in strategies)
        demands = tuple(as_fraction(d) for d in demands)
        costs = tuple(c if isinstance(c, PiecewiseLinear) else PiecewiseLinear(c) for c in costs)
        if len(costs) != len(facilities):
            raise ValueError(f"{len(costs)} cost functions for {len(facilities)} facilities")
        if len(demands) != len(strategies) or not strategies:
            raise ValueError("need one demand and one strategy list per player")
        total = sum(demands)
        top = max(c(total) for c in costs)
        inst = cls(facilities, strategies, demands, costs, as_fraction(C) if C is not None else top)
        if validate:
            inst.validate()
        return inst

    @property
    def n(self) -> int:
        return len(self.strategies)

    @property
    def m(self) -> int:
        return len(self.facilities)

    @property
    def total_demand(self) -> Fraction:
        return sum(self.demands, Fraction(0))

    def validate(self) -> None:
        for i, (row, d) in enumerate(zip(self.strategies, self.demands)):
            if not row:
                raise ValueError(f"player {i} has no strategies")
            if d <= 0:
                raise ValidationError("positive demand", f"d_{i} = {d}")
        total = self.total_demand
        for name, c in zip(self.facilities, self.costs):
            if c.ys[0] < 0:
                raise ValidationError("non-negativity", f"c_{name}(0) = {c.ys[0]}")
            if any(s < 0 for s in c.slopes):
                raise ValidationError("monotonicity", f"c_{name} decreases somewhere")
            if c(total) > self.C:
                raise ValidationError("cost bound", f"c_{name}({total}) = {c(total)} > C = {self.C}")

    def is_convex(self) -> bool:
        return all(c.is_convex() for c in self.costs)

    def strictly_increasing(self) -> bool:
        return all(c.is_strictly_increasing() for c in self.costs)

    def incidence(self, i: int) -> np.ndarray:
        """0/1 matrix ``strategies x facilities`` for player ``i``."""
        a = np.zeros((len(self.strategies[i]), self.m))
        for j, s in enumerate(self.strategies[i]):
            a[j, list(s)] = 1.0
        return a


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def validate_state(inst: SplittableInstance, xi: Sequence[Sequence]) -> State:
    """Check shape, signs and simplex sums; returns the state as nested tuples."""
    if len(xi) != inst.n:
        raise ValueError(f"state has {len(xi)} players, instance has {inst.n}")
    out = []
    for i, (row, d) in enumerate(zip(xi, inst.demands)):
        row = tuple(row)
        if len(row) != len(inst.strategies[i]):
            raise ValueError(f"player {i}: {len(row)} intensities for {len(inst.strategies[i])} strategies")
        if any(v < 0 for v in row):
            raise ValueError(f"player {i}: negative intensity")
        total = sum(row)
        if all(_is_exact(v) for v in row):
            if total != d:
                raise ValueError(f"player {i}: intensities sum to {total}, demand is {d}")
        elif abs(float(total) - float(d)) > SIMPLEX_TOL * max(1.0, float(d)):
            raise ValueError(f"player {i}: intensities sum to {total}, demand is {d}")
        out.append(row)
    return tuple(out)


def uniform_state(inst: SplittableInstance, exact: bool = True) -> State:
    rows = []
    for row, d in zip(inst.strategies, inst.demands):
        share = d / len(row) if exact else float(d) / len(row)
        rows.append(tuple(share for _ in row))
    return tuple(rows)


def loads(inst: SplittableInstance, xi) -> tuple:
    out = [Fraction(0)] * inst.m
    for row, strat in zip(xi, inst.strategies):
        for v, s in zip(row, strat):
            for f in s:
                out[f] = out[f] + v
    return tuple(out)


def _used(v, d) -> bool:
    if _is_exact(v):
        return v > 0
    return v > USED_REL * float(d)


def used_facilities(inst: SplittableInstance, xi, i: int) -> frozenset[int]:
    d = inst.demands[i]
    fs: set[int] = set()
    for v, s in zip(xi[i], inst.strategies[i]):
        if _used(v, d):
            fs |= s
    return frozenset(fs)


def _facility_costs(inst, ell):
    return tuple(c(v) for c, v in zip(inst.costs, ell))


def private_costs(inst: SplittableInstance, xi) -> tuple:
    """Largest cost over the facilities each player uses."""
    fc = _facility_costs(inst, loads(inst, xi))
    return tuple(
        max((fc[f] for f in used_facilities(inst, xi, i)), default=Fraction(0))
        for i in range(inst.n)
    )


def lip_certificates(inst: SplittableInstance, xi) -> dict[str, tuple]:
    """``phi`` (private costs), ``psi`` (player-major, n*m), ``nu`` (facility costs)
    and ``alex`` (facility ``(cost, load)`` pairs)."""
    ell = loads(inst, xi)
    fc = _facility_costs(inst, ell)
    psi = []
    phi = []
    for i in range(inst.n):
        used = used_facilities(inst, xi, i)
        psi.extend(fc[f] if f in used else Fraction(0) for f in range(inst.m))
        phi.append(max((fc[f] for f in used), default=Fraction(0)))
    return {
        "phi": tuple(phi),
        "psi": tuple(psi),
        "nu": fc,
        "alex": tuple(zip(fc, ell)),
    }


def _ceil_ln_bound(coef: Fraction, k: int) -> int:
    with localcontext() as ctx:
        ctx.prec = 60
        bound = Decimal(coef.numerator) / Decimal(coef.denominator) * Decimal(k).ln()
    return int(bound.to_integral_value(rounding="ROUND_CEILING"))


def alpha_exponent(inst: SplittableInstance | None, alpha, psi_max=None, nm: int | None = None) -> int:
    """Smallest integer ``>= (2 psi_max / alpha + 1) ln(n m)``, at least 1.

    Only ``psi_max / alpha`` matters, so using the bound ``C`` with ``alpha``
    in cost units equals the scaled instance with costs ``c / C``.
    """
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if psi_max is None:
        psi_max = inst.C
    if nm is None:
        nm = inst.n * inst.m
    coef = 2 * as_fraction(psi_max) / alpha + 1
    if nm <= 1:
        return 1
    return max(1, _ceil_ln_bound(coef, nm))


def alpha_potential(inst: SplittableInstance, xi, M: int, scaled: bool = True):
    """``sum_{i,f} psi_{i,f}(xi)**M``, with costs divided by ``C`` when ``scaled``."""
    psi = lip_certificates(inst, xi)["psi"]
    if scaled:
        if inst.C == 0:
            return Fraction(0)
        psi = [v / inst.C for v in psi]
    return sum((v**M for v in psi), Fraction(0))


def is_improving(inst: SplittableInstance, before, after, coalition: Sequence[int], alpha=0) -> bool:
    """Every coalition member lowers its private cost by more than ``alpha``."""
    pb, pa = private_costs(inst, before), private_costs(inst, after)
    return all(pb[i] - pa[i] > alpha for i in coalition)


def _random_row(rng: random.Random, size: int, d: Fraction, zero_prob: float, grain: int):
    while True:
        w = [0 if rng.random() < zero_prob else rng.randint(1, grain) for _ in range(size)]
        if sum(w):
            break
    total = sum(w)
    return tuple(Fraction(v, total) * d for v in w)


def random_state(inst: SplittableInstance, rng: random.Random, zero_prob: float = 0.3, grain: int = 6) -> State:
    """Exact random state; a fraction of intensities is exactly zero."""
    return tuple(
        _random_row(rng, len(row), d, zero_prob, grain) for row, d in zip(inst.strategies, inst.demands)
    )


def sample_moves(
    inst: SplittableInstance,
    rng: random.Random,
    count: int,
    alpha=0,
    coalition_sizes: Sequence[int] = (1, 2),
    max_tries: int = 200_000,
) -> list[tuple[State, tuple[int, ...], State]]:
    """Random exact states and random coalition reroutes that turn out improving.

    A move is kept when every member gains more than ``alpha``.
    """
    alpha = as_fraction(alpha)
    sizes = [k for k in coalition_sizes if k <= inst.n] or [1]
    moves = []
    for _ in range(max_tries):
        if len(moves) >= count:
            break
        xi = random_state(inst, rng)
        coalition = tuple(sorted(rng.sample(range(inst.n), rng.choice(sizes))))
        new = list(xi)
        for i in coalition:
            new[i] = _random_row(rng, len(inst.strategies[i]), inst.demands[i], 0.4, 6)
        new = tuple(new)
        if new != xi and is_improving(inst, xi, new, coalition, alpha):
            moves.append((xi, coalition, new))
    return moves


# ---------------------------------------------------------------- solver


@dataclass(frozen=True)
class Violation:
    coalition: tuple[int, ...]
    deviation: State
    before: tuple
    after: tuple


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    violation: Violation | None
    best_responses: tuple[float, ...]
    gains: tuple[float, ...]
    coalitions_sampled: int = 0


@dataclass
class ApproxResult:
    state: State
    verified: bool
    violation: Violation | None
    M: int
    iterations: int
    gap: float
    converged: bool
    surrogate: str
    trace: list[float] = field(default_factory=list)


def _log_level(inst, ell, M, surrogate):
    """log of the surrogate's per-facility marginal cost, -inf where zero."""
    C = float(inst.C)
    out = np.empty(inst.m)
    for f, c in enumerate(inst.costs):
        v = c.fvalue(ell[f]) / C
        if v <= 0:
            out[f] = -math.inf
            continue
        lv = M * math.log(v)
        if surrogate == "load-weighted":
            lv += math.log1p(M * ell[f] * c.fslope(ell[f]) / (v * C))
        out[f] = lv
    return out


def _logsumexp(values) -> float:
    values = [v for v in values if v != -math.inf]
    if not values:
        return -math.inf
    top = max(values)
    return top + math.log(sum(math.exp(v - top) for v in values))


def _log_segment_integral(a: float, b: float, length: float, M: int) -> float:
    """log of the integral of ``t**M`` for ``t`` moving linearly from a to b over ``length``."""
    if length <= 0 or b <= 0:
        return -math.inf
    lo, hi = min(a, b), max(a, b)
    r = lo / hi
    if r >= 1.0:
        factor = math.log(M + 1)
    else:
        factor = math.log(-math.expm1((M + 1) * math.log(r)) if r > 0 else 1.0) - math.log1p(-r)
    return math.log(length) + M * math.log(hi) - math.log(M + 1) + factor


def surrogate_value(inst: SplittableInstance, ell, M: int, surrogate: str = "integral") -> float:
    """log of the surrogate objective at loads ``ell`` (costs scaled by ``C``)."""
    C = float(inst.C)
    terms = []
    for f, c in enumerate(inst.costs):
        load = float(ell[f])
        if load <= 0:
            continue
        if surrogate == "load-weighted":
            v = c.fvalue(load) / C
            if v > 0:
                terms.append(M * math.log(v) + math.log(load))
            continue
        x0 = 0.0
        for k in range(len(c._fx)):
            x1 = float(c._fx[k + 1]) if k + 1 < len(c._fx) else math.inf
            seg_end = min(x1, load)
            if seg_end > x0:
                terms.append(
                    _log_segment_integral(c.fvalue(x0) / C, c.fvalue(seg_end) / C, seg_end - x0, M)
                )
            if x1 >= load:
                break
            x0 = x1
    return _logsumexp(terms)


def _strategy_logs(inst, i, ell, M, surrogate):
    lv = _log_level(inst, ell, M, surrogate)
    return [_logsumexp([lv[f] for f in s]) for s in inst.strategies[i]]


def _line_search(inst, i, ell, fw, away, t_max, M, surrogate, iters=80):
    """Step moving mass from strategy ``away`` to ``fw`` where marginals balance."""
    a_fw = np.zeros(inst.m)
    a_fw[list(inst.strategies[i][fw])] = 1.0
    a_aw = np.zeros(inst.m)
    a_aw[list(inst.strategies[i][away])] = 1.0
    delta = a_fw - a_aw

    def slope_sign(t):
        lv = _log_level(inst, ell + t * delta, M, surrogate)
        g_fw = _logsumexp([lv[f] for f in inst.strategies[i][fw]])
        g_aw = _logsumexp([lv[f] for f in inst.strategies[i][away]])
        return g_fw - g_aw

    if slope_sign(t_max) <= 0:
        return t_max
    lo, hi = 0.0, t_max
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if slope_sign(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def _default_tolerance(inst, alpha, M) -> float:
    target = (float(alpha) / (2 * float(inst.C))) ** M / 4 if inst.C > 0 else 0.0
    if target >= 1e-15:
        return min(target, 1e-8)
    log.warning(
        "(alpha/2)^M/4 = %.3g is below float resolution; using solver tolerance 1e-8, "
        "so the potential-gap condition is not certified and the verifier decides",
        target,
    )
    return 1e-8


def approx_sne(
    inst: SplittableInstance,
    alpha,
    eps_solver: float | None = None,
    surrogate: str = "integral",
    max_iter: int = 20_000,
    coalition_samples: int = 200,
    seed: int = 0,
) -> ApproxResult:
    """Approximately minimize a convex load surrogate, then verify the alpha-SNE property.

    ``surrogate="integral"`` uses ``sum_f int_0^l (c_f/C)^M``, whose marginal
    is ``(c_f/C)^M``; ``"load-weighted"`` uses ``sum_f (c_f(l)/C)^M * l``.
    Each iteration takes, for every player, a pairwise step from the
    support strategy with the largest marginal to the strategy with the
    smallest one, with exact line search.  ``eps_solver`` bounds the
    relative spread of marginals over each player's support.
    """
    if surrogate not in ("integral", "load-weighted"):
        raise ValueError(f"unknown surrogate {surrogate!r}")
    alpha = as_fraction(alpha)
    if not inst.is_convex():
        raise ValidationError("convexity", "cost functions must be convex for the solver")
    M = alpha_exponent(inst, alpha)
    tol = _default_tolerance(inst, alpha, M) if eps_solver is None else float(eps_solver)

    xi = [np.array([float(v) for v in row]) for row in uniform_state(inst, exact=False)]
    inc = [inst.incidence(i) for i in range(inst.n)]

    def current_loads():
        return sum(x @ a for x, a in zip(xi, inc))

    trace = [surrogate_value(inst, current_loads(), M, surrogate)]
    gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        gap = 0.0
        for i in range(inst.n):
            ell = current_loads()
            g = _strategy_logs(inst, i, ell, M, surrogate)
            d = float(inst.demands[i])
            support = [j for j, v in enumerate(xi[i]) if v > 0]
            fw = min(range(len(g)), key=lambda j: g[j])
            away = max(support, key=lambda j: g[j])
            if g[away] == -math.inf or away == fw:
                continue
            rel = -math.expm1(g[fw] - g[away])
            gap = max(gap, rel)
            if rel <= tol:
                continue
            t = _line_search(inst, i, ell, fw, away, xi[i][away], M, surrogate)
            if t >= xi[i][away]:
                xi[i][fw] += xi[i][away]
                xi[i][away] = 0.0
            else:
                xi[i][fw] += t
                xi[i][away] -= t
            xi[i] = np.clip(xi[i], 0.0, None)
            xi[i] *= d / xi[i].sum()
        trace.append(surrogate_value(inst, current_loads(), M, surrogate))
        if gap <= tol:
            break

    for i in range(inst.n):
        d = float(inst.demands[i])
        xi[i][xi[i] < SIMPLEX_TOL * d] = 0.0
        xi[i] *= d / xi[i].sum()
    state = tuple(tuple(float(v) for v in row) for row in xi)
    check = verify_alpha_unilateral(inst, state, alpha, samples=coalition_samples, seed=seed)
    return ApproxResult(
        state, check.ok, check.violation, M, it, gap, gap <= tol, surrogate, trace
    )


def _float_loads(inst, xi) -> np.ndarray:
    return sum(np.asarray(row, dtype=float) @ inst.incidence(i) for i, row in enumerate(xi))


def _route_capacity(inst, i, caps) -> float:
    """Most demand player ``i`` can route with facility capacities ``caps``."""
    strat = inst.strategies[i]
    if all(len(s) == 1 for s in strat):
        seen: set[int] = set()
        total = 0.0
        for s in strat:
            (f,) = s
            if f not in seen:
                seen.add(f)
                total += caps[f]
        return total
    a = inst.incidence(i)
    res = linprog(-np.ones(len(strat)), A_ub=a.T, b_ub=caps, bounds=(0, None), method="highs")
    return float(-res.fun) if res.success else 0.0


def best_response_value(inst: SplittableInstance, xi, i: int, iters: int = 100) -> float:
    """Lowest bottleneck cost player ``i`` can reach alone, by bisection on the threshold."""
    own = np.asarray(xi[i], dtype=float) @ inst.incidence(i)
    others = _float_loads(inst, xi) - own
    others = np.clip(others, 0.0, None)
    d = float(inst.demands[i])

    def feasible(theta):
        caps = np.array(
            [c.max_load_below(theta, others[f], d) for f, c in enumerate(inst.costs)]
        )
        return _route_capacity(inst, i, caps) >= d * (1 - 1e-12)

    lo, hi = 0.0, float(inst.C)
    if feasible(lo):
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return hi


def _best_response_state(inst, xi, i, theta):
    """A deviation for player ``i`` reaching about ``theta``."""
    own = np.asarray(xi[i], dtype=float) @ inst.incidence(i)
    others = np.clip(_float_loads(inst, xi) - own, 0.0, None)
    d = float(inst.demands[i])
    caps = np.array([c.max_load_below(theta, others[f], d) for f, c in enumerate(inst.costs)])
    a = inst.incidence(i)
    res = linprog(
        np.zeros(a.shape[0]), A_ub=a.T, b_ub=caps, A_eq=np.ones((1, a.shape[0])), b_eq=[d],
        bounds=(0, None), method="highs",
    )
    row = tuple(float(v) for v in res.x) if res.success else tuple(xi[i])
    new = list(xi)
    new[i] = row
    return tuple(new)


def verify_alpha_unilateral(
    inst: SplittableInstance, xi, alpha, samples: int = 200, seed: int = 0
) -> VerifyResult:
    """Check that no single player can gain more than ``alpha``; screen random coalitions too.

    The unilateral part is exact up to bisection precision.  Coalition
    deviations are only sampled, so a pass there is evidence, not proof.
    """
    alpha = float(as_fraction(alpha))
    cur = [float(v) for v in private_costs(inst, xi)]
    brs, gains = [], []
    violation = None
    for i in range(inst.n):
        br = best_response_value(inst, xi, i)
        brs.append(br)
        gains.append(cur[i] - br)
        if violation is None and cur[i] - br > alpha:
            dev = _best_response_state(inst, xi, i, br)
            after = private_costs(inst, dev)
            violation = Violation((i,), dev, tuple(cur), tuple(float(v) for v in after))
    rng = random.Random(seed)
    tried = 0
    if violation is None and inst.n >= 2:
        for _ in range(samples):
            k = rng.randint(2, inst.n)
            coalition = tuple(sorted(rng.sample(range(inst.n), k)))
            new = list(xi)
            for i in coalition:
                row = _random_row(rng, len(inst.strategies[i]), inst.demands[i], 0.4, 6)
                new[i] = tuple(float(v) for v in row)
            new = tuple(new)
            tried += 1
            after = [float(v) for v in private_costs(inst, new)]
            if all(cur[i] - after[i] > alpha for i in coalition):
                violation = Violation(coalition, new, tuple(cur), tuple(after))
                break
    return VerifyResult(violation is None, violation, tuple(brs), tuple(gains), tried)
