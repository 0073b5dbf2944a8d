from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from lipgames.congestion import build_game, phi_pi, psi_facility, upsilon
from lipgames.game import table_game
from lipgames.lexorder import Ordering, sorted_lex_compare
from lipgames.potential import (
    LipFunction,
    PotentialSpec,
    compute_exponent,
    custom_function,
    exponent_from_bounds,
    path_bound,
    power_potential,
    topological_potential,
    verify_lip,
)
from lipgames.random_instances import random_congestion_model
from oracles import all_profiles, brute_edges, fixture, longest_path

F = Fraction


def _const(q, v=1):
    return custom_function("const", q, lambda x: [v] * q)


def test_exponent_formula():
    # floor(ln 2 * 4) + 1
    assert exponent_from_bounds(2, 4, 1) == 3
    assert exponent_from_bounds(2, 4, 1) == math.floor(math.log(2) * 4) + 1
    assert exponent_from_bounds(1, 100, 1) == 1
    assert exponent_from_bounds(3, 0, 1) == 1
    assert exponent_from_bounds(5, 7, F(1, 3)) == math.floor(math.log(5) * 21) + 1
    with pytest.raises(ValueError):
        exponent_from_bounds(2, 1, 0)


def test_power_potential_arithmetic():
    spec = PotentialSpec(custom_function("v", 2, lambda x: [2, 1]), F(2), F(1), 3)
    assert power_potential(spec, (0,)) == 9
    zero = PotentialSpec(custom_function("z", 3, lambda x: [0, 0, 0]), F(0), F(1), 4)
    assert power_potential(zero, (0,)) == 0


def test_path_bound_formula():
    one = PotentialSpec(_const(1), F(1), F(1), 1)
    assert path_bound(one) == 1
    spec = PotentialSpec(_const(2), F(2), F(1, 2), 3)
    assert path_bound(spec) == 32


def test_root_game_power_potential_decreases():
    g = fixture("example_root").game()
    phi = phi_pi(g)
    assert verify_lip(g, phi).holds
    spec = compute_exponent(g, phi)
    assert spec.q == 3 and spec.phi_max == 1
    edges = brute_edges(g)
    assert edges
    for x, y in edges:
        assert power_potential(spec, y) < power_potential(spec, x)


def test_upsilon_counterexample():
    g = fixture("upsilon_counter").game()
    check = verify_lip(g, upsilon(g))
    assert not check.holds
    mv = check.counterexample
    assert (mv.source, mv.coalition, mv.target) == ((0, 0), (0,), (1, 0))
    assert check.before == (10, 0) and check.after == (10, 1)
    assert verify_lip(g, phi_pi(g)).holds
    assert verify_lip(g, psi_facility(g)).holds


def test_constant_function_fails_when_moves_exist():
    g = fixture("poa_unbounded").game()
    check = verify_lip(g, _const(2))
    assert not check.holds
    assert check.counterexample is not None


def test_function_of_wrong_length():
    g = fixture("poa_unbounded").game()
    bad = LipFunction("bad", 3, lambda x: (F(0),) * 2)
    with pytest.raises(ValueError):
        verify_lip(g, bad)


def test_compute_exponent_rejects_non_certificate():
    g = fixture("upsilon_counter").game()
    with pytest.raises(ValueError):
        compute_exponent(g, upsilon(g))


def test_no_moves_is_degenerate():
    g = table_game([2, 2], {x: [1, 1] for x in [(0, 0), (0, 1), (1, 0), (1, 1)]})
    spec = compute_exponent(g, phi_pi(g))
    assert spec.degenerate and spec.M == 1 and spec.eps_min is None
    assert path_bound(spec) == 0


def test_single_player_spec_is_degenerate():
    g = table_game([3], {(0,): [3], (1,): [1], (2,): [2]})
    spec = compute_exponent(g, phi_pi(g))
    assert spec.M == 1 and spec.degenerate
    assert spec.eps_min == 1


def test_eps_min_and_phi_max_match_enumeration():
    rng = random.Random(21)
    for _ in range(15):
        g = build_game(random_congestion_model(rng, max_players=3, max_strategies=3))
        phi = phi_pi(g)
        spec = compute_exponent(g, phi)
        assert spec.phi_max == max(v for x in all_profiles(g) for v in phi(x))
        edges = brute_edges(g)
        if not edges:
            assert spec.eps_min is None
            continue
        gaps = []
        for x, y in edges:
            a = sorted(phi(x), reverse=True)
            b = sorted(phi(y), reverse=True)
            gaps.append(next(u - v for u, v in zip(a, b) if u != v))
        assert spec.eps_min == min(gaps)


def test_matching_pennies_cycle():
    g = table_game([2, 2], {(0, 0): [0, 1], (0, 1): [1, 0], (1, 0): [1, 0], (1, 1): [0, 1]})
    res = topological_potential(g)
    assert not res.acyclic and res.labels is None
    cyc = res.cycle
    assert cyc[0] == cyc[-1] and len(cyc) == 5
    edges = brute_edges(g)
    for a, b in zip(cyc, cyc[1:]):
        assert (a, b) in edges


def test_single_profile_label():
    g = table_game([1], {(0,): [4]})
    res = topological_potential(g)
    assert res.labels == {(0,): 0}


def test_topological_labels_decrease_and_certify():
    rng = random.Random(22)
    for _ in range(25):
        g = build_game(random_congestion_model(rng, max_players=3))
        res = topological_potential(g)
        assert res.acyclic
        for x, y in brute_edges(g):
            assert res.labels[y] < res.labels[x]
        as_phi = custom_function("topo", 1, lambda x: [res.labels[tuple(x)]])
        assert verify_lip(g, as_phi).holds


def test_power_potential_consistent_with_order():
    rng = random.Random(23)
    for _ in range(25):
        g = build_game(random_congestion_model(rng, max_players=3))
        for phi in (phi_pi(g), psi_facility(g)):
            spec = compute_exponent(g, phi)
            ps = all_profiles(g)
            vals = {x: phi(x) for x in ps}
            pot = {x: power_potential(spec, x) for x in ps}
            for x in ps:
                for y in ps:
                    if sorted_lex_compare(vals[x], vals[y]) == Ordering.LESS and spec.eps_min is not None:
                        # only pairs whose decisive gap is at least eps_min are covered
                        a = sorted(vals[x], reverse=True)
                        b = sorted(vals[y], reverse=True)
                        gap = next(v - u for u, v in zip(a, b) if u != v)
                        if gap >= spec.eps_min:
                            assert pot[x] < pot[y]


def test_measured_paths_within_bound():
    for name in ("example_root", "poa_unbounded", "upsilon_counter", "scheduling_small",
                 "interference_small", "routing_pne_not_sne", "routing_multi_sne"):
        g = fixture(name).game()
        spec = compute_exponent(g, phi_pi(g))
        edges = brute_edges(g)
        assert longest_path(all_profiles(g), edges) <= path_bound(spec)
