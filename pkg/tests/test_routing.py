from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import pytest

from lipgames.congestion import ValidationError, phi_pi, psi_facility
from lipgames.game import INF, enumerate_sne, improving_moves, is_pne, is_sne, lp_cost
from lipgames.potential import compute_exponent, power_potential
from lipgames.random_instances import random_dag_routing
from lipgames.routing import (
    InfeasibleError,
    RoutingInstance,
    decompose_flow,
    max_flow_min_cut,
    routing_exponent,
    scaled_psi_potential,
    simple_paths,
    sne_convex_costs,
    sne_identical_costs,
    to_game,
    verify_cut_certificate,
)
from oracles import brute_sne, fixture

F = Fraction


def parallel(n, links=2, table=None):
    table = table or list(range(n + 1))
    arcs = [("s", "t", table) for _ in range(links)]
    return RoutingInstance.create(["s", "t"], arcs, ("s", "t"), players=n)


def path_of(inst, label):
    for p in simple_paths(inst, "s", "t"):
        if inst.path_label(p) == label:
            return p
    raise KeyError(label)


def test_identical_two_links_three_players():
    inst = parallel(3)
    res = sne_identical_costs(inst)
    assert sorted(res.loads) == [1, 2]
    assert set(res.costs) <= {1, 2}
    g = to_game(inst)
    x = g.profile_of(res.paths)
    assert brute_sne(g, x) and is_sne(g, x)
    assert verify_cut_certificate(inst, res.paths)


def test_identical_balanced_and_single_player():
    inst = parallel(3, links=3, table=[0, 2, 5, 9])
    res = sne_identical_costs(inst)
    assert res.costs == (2, 2, 2)
    one = sne_identical_costs(parallel(1, links=2, table=[0, 4]))
    assert one.costs == (4,)


def test_identical_requires_shared_table():
    inst = RoutingInstance.create(["s", "t"], [("s", "t", [0, 1]), ("s", "t", [0, 2])], ("s", "t"), players=1)
    with pytest.raises(ValidationError):
        sne_identical_costs(inst)


def test_unreachable_sink():
    inst = RoutingInstance.create(["s", "a", "t"], [("s", "a", [0, 1]), ("t", "a", [0, 1])], ("s", "t"), players=1)
    with pytest.raises(InfeasibleError):
        sne_identical_costs(inst)
    with pytest.raises(InfeasibleError):
        sne_convex_costs(inst)


def test_cut_certificate_rejects_piling():
    inst = parallel(3)
    p = simple_paths(inst, "s", "t")[0]
    assert not verify_cut_certificate(inst, [p, p, p])
    few = parallel(2, links=3)
    assert verify_cut_certificate(few, sne_identical_costs(few).paths)


def test_cut_loads_balanced():
    rng = random.Random(41)
    for _ in range(30):
        inst = random_dag_routing(rng, costs="identical")
        res = sne_identical_costs(inst)
        _, m, cut = max_flow_min_cut(inst, "s", "t")
        assert len(cut) == m
        n = inst.n
        assert all(res.loads[k] in {n // m, -(-n // m)} for k in cut)
        assert verify_cut_certificate(inst, res.paths)


def test_flow_decomposition_exact():
    rng = random.Random(42)
    for _ in range(30):
        inst = random_dag_routing(rng)
        res = sne_convex_costs(inst)
        flow = res.flow
        assert flow.value == inst.n
        rebuilt = [0] * len(inst.arcs)
        for p, mult in flow.paths:
            for k in p:
                rebuilt[k] += mult
        assert tuple(rebuilt) == flow.arc_flow == res.loads
        for v in inst.vertices:
            out = sum(flow.arc_flow[k] for k, a in enumerate(inst.arcs) if a.tail == v)
            into = sum(flow.arc_flow[k] for k, a in enumerate(inst.arcs) if a.head == v)
            expect = inst.n if v == "s" else -inst.n if v == "t" else 0
            assert out - into == expect
        again = decompose_flow(inst, flow.arc_flow, "s", "t")
        assert again == flow


def test_convex_objective_is_scaled_potential():
    rng = random.Random(43)
    for _ in range(30):
        inst = random_dag_routing(rng)
        res = sne_convex_costs(inst)
        assert res.objective == scaled_psi_potential(inst, res.paths, res.exponent)
        assert res.exponent == routing_exponent(inst)[0]


def test_convex_output_minimizes_potential_over_profiles():
    rng = random.Random(44)
    for _ in range(15):
        inst = random_dag_routing(rng, max_players=3, max_arcs=8)
        res = sne_convex_costs(inst)
        g = to_game(inst)
        paths = simple_paths(inst, "s", "t")
        best = min(scaled_psi_potential(inst, [paths[s] for s in x], res.exponent) for x in g.profiles())
        assert res.objective == best


def test_both_algorithms_give_sne():
    rng = random.Random(45)
    for _ in range(20):
        for kind in ("identical", "convex"):
            inst = random_dag_routing(rng, max_players=3, costs=kind)
            res = sne_identical_costs(inst) if kind == "identical" else sne_convex_costs(inst)
            g = to_game(inst)
            assert brute_sne(g, g.profile_of(res.paths))


def test_convex_two_links_split():
    res = sne_convex_costs(parallel(2))
    assert sorted(res.loads) == [1, 1]


def test_convex_rejects_concave_table():
    inst = parallel(3, table=[0, 2, 3, 4])
    with pytest.raises(ValidationError):
        sne_convex_costs(inst)


def test_zigzag_profile_is_pne_not_sne():
    gf = fixture("routing_pne_not_sne")
    inst, g = gf.obj, gf.game()
    zig = g.profile_of([path_of(inst, "s-a-b-t"), path_of(inst, "s-b-a-t")])
    assert is_pne(g, zig)
    assert not is_sne(g, zig)
    moves = improving_moves(g, zig)
    # only the pair moves, to either assignment of the two straight paths
    assert {m.coalition for m in moves} == {(0, 1)}
    assert len(moves) == 2
    paths = simple_paths(inst, "s", "t")
    for mv in moves:
        labels = sorted(inst.path_label(paths[s]) for s in mv.target)
        assert labels == ["s-a-t", "s-b-t"]
        assert g.cost(mv.target) == (0, 0)


def test_zigzag_fixture_convex_solver():
    gf = fixture("routing_pne_not_sne")
    inst, g = gf.obj, gf.game()
    res = sne_convex_costs(inst)
    x = g.profile_of(res.paths)
    assert is_sne(g, x) and brute_sne(g, x)
    assert sorted(inst.path_label(p) for p in res.paths) == ["s-a-t", "s-b-t"]


def test_multi_sne_fixture_types():
    gf = fixture("routing_multi_sne")
    inst, g = gf.obj, gf.game()
    n = inst.n
    paths = simple_paths(inst, "s", "t")
    label = {k: inst.path_label(p) for k, p in enumerate(paths)}
    sne = enumerate_sne(g)
    assert all(brute_sne(g, x) for x in sne)
    kinds = {}
    for x in sne:
        use = Counter(label[s] for s in x)
        kinds[tuple(sorted(use.items()))] = (tuple(sorted(g.cost(x))), sum(g.cost(x)))
    one_on_p2 = (("s-a-t", n - 1), ("s-b-t", 1))
    one_on_p3 = (("s-a-t", n - 1), ("s-b-a-t", 1))
    assert kinds[one_on_p2] == ((0,) * (n - 1) + (1,), 1)
    assert kinds[one_on_p3] == ((1,) * n, n)
    # every equilibrium falls in one of two cost classes
    assert {total for _, total in kinds.values()} == {1, n}
    x = next(x for x in sne if Counter(label[s] for s in x)["s-b-t"] == 1)
    assert lp_cost(g, x, INF) == 1


def test_multi_sne_fixture_is_not_convex():
    with pytest.raises(ValidationError):
        sne_convex_costs(fixture("routing_multi_sne").obj)


def test_terminal_validation():
    with pytest.raises(ValueError):
        RoutingInstance.create(["s", "t"], [("s", "t", [0])], ("s", "t"), players=1)
    with pytest.raises(ValidationError):
        RoutingInstance.create(["s", "t"], [("s", "t", [1, 0])], ("s", "t"), players=1)
    with pytest.raises(ValidationError):
        RoutingInstance.create(["s", "t"], [("s", "t", [0, 3])], ("s", "t"), players=1, cost_bound=2)


def test_multi_sne_potential_minimizers():
    g = fixture("routing_multi_sne").game()
    for phi in (phi_pi(g), psi_facility(g)):
        spec = compute_exponent(g, phi)
        pot = {x: power_potential(spec, x) for x in g.profiles()}
        low = min(pot.values())
        minimizers = [x for x in pot if pot[x] == low]
        # both potentials bottom out at the total-cost-1 equilibria
        assert all(sum(g.cost(x)) == 1 and is_sne(g, x) for x in minimizers)
