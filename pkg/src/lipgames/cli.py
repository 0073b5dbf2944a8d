"""Command-line front end: ``lipgames <command> --game FILE ...``.

Exit codes: 0 success, 2 invalid input (bad file, schema or model axiom),
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .congestion import BottleneckGame, ValidationError, phi_pi, psi_facility, upsilon
from .dynamics import DynamicsConfig, improvement_graph, longest_path_length, run
from .game import (
    STRICT,
    WEAK_SSNE,
    Budget,
    BudgetError,
    DomainError,
    alpha_strict,
    enumerate_pne,
    enumerate_sne,
    enumerate_ssne,
    improving_moves,
    is_minmax_fair,
    is_sne,
    is_strict_pareto,
    sorted_lex_minimizers,
    strong_poa,
    strong_pos,
)
from .io import SchemaError, format_number, load_game
from .potential import LipFunction, compute_exponent, path_bound, topological_potential, verify_lip
from .routing import InfeasibleError, sne_convex_costs, sne_identical_costs
from .splittable import approx_sne, lip_certificates, private_costs

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


def fixture_names() -> list[str]:
    root = resources.files("lipgames") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_game_path(arg: str) -> Path:
    """Use ``arg`` if it exists, else fall back to the packaged fixture of that name."""
    p = Path(arg)
    if p.exists():
        return p
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in fixture_names():
        with resources.as_file(resources.files("lipgames") / "fixtures" / f"{stem}.json") as f:
            return Path(f)
    raise FileNotFoundError(f"no such game file: {arg}")


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_number(v)
    if isinstance(v, float):
        return "inf" if math.isinf(v) else v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _mode(args):
    if args.mode == "weak":
        return WEAK_SSNE
    if args.mode == "alpha":
        if args.alpha is None:
            raise ValueError("--mode alpha needs --alpha")
        return alpha_strict(args.alpha)
    return STRICT


def _lip_function(game, name: str) -> LipFunction:
    if name == "phi":
        return phi_pi(game)
    if not isinstance(game, BottleneckGame):
        raise ValueError(f"function {name!r} needs a congestion-type game")
    return psi_facility(game) if name == "psi" else upsilon(game)


def _profile(game, x):
    return {"profile": list(x), "costs": list(game.cost(x))}


def _move(game, mv):
    return {
        "from": list(mv.source),
        "coalition": list(mv.coalition),
        "to": list(mv.target),
        "costs_before": list(game.cost(mv.source)),
        "costs_after": list(game.cost(mv.target)),
    }


# ---------------------------------------------------------------- commands


def cmd_check_lip(args, gf, game):
    phi = _lip_function(game, args.function)
    mode = _mode(args)
    res = verify_lip(game, phi, args.max_coalition, mode)
    out = {
        "function": phi.name,
        "verdict": "holds" if res.holds else "fails",
        "moves_checked": res.moves_checked,
    }
    if not res.holds:
        out["counterexample"] = _move(game, res.counterexample)
        out["counterexample"]["value_before"] = list(res.before)
        out["counterexample"]["value_after"] = list(res.after)
    return out, "certificate must decrease in sorted lexicographical order along every improving move"


def cmd_potential(args, gf, game):
    phi = _lip_function(game, args.function)
    mode = _mode(args)
    spec = compute_exponent(game, phi, args.max_coalition, mode)
    topo = topological_potential(game, args.max_coalition, mode)
    out = {
        "function": phi.name,
        "q": spec.q,
        "phi_max": spec.phi_max,
        "eps_min": spec.eps_min,
        "M": spec.M,
        "degenerate": spec.degenerate,
        "path_bound": path_bound(spec),
        "improvement_graph_acyclic": topo.acyclic,
    }
    return out, "power potential sum(phi_i^M) with M > ln(q) * phi_max / eps_min decreases along every improving move"


def cmd_dynamics(args, gf, game):
    mode = _mode(args)
    if args.action == "graph":
        graph = improvement_graph(game, args.max_coalition, mode)
        out = {
            "nodes": len(graph.nodes),
            "edges": len(graph.edges),
            "acyclic": graph.acyclic,
            "cycle": [list(x) for x in graph.cycle] if graph.cycle else None,
            "longest_path": longest_path_length(graph) if graph.acyclic else None,
        }
        if args.list_edges:
            out["edge_list"] = [[list(graph.nodes[a]), list(graph.nodes[b])] for a, b in graph.edges]
        return out, "improvement graph over all profiles; acyclic iff a generalized strong ordinal potential exists"
    start = [int(v) for v in args.start.split(",")] if args.start else [0] * game.n
    cfg = DynamicsConfig(mode, args.max_coalition, args.rule, args.seed, args.step_cap)
    rep = run(game, start, cfg)
    out = {
        "classification": rep.classification,
        "steps": rep.steps,
        "terminal": _profile(game, rep.terminal),
        "path": [list(x) for x in rep.path],
        "coalitions": [list(c) for c in rep.coalitions],
        "path_bound": rep.bound,
        "step_cap": rep.step_cap,
        "is_sne": rep.is_sne,
        "is_ssne": rep.is_ssne,
    }
    return out, "coalitional improvement dynamics terminate in games with a strong ordinal potential"


def cmd_sne_enum(args, gf, game):
    fn = {"sne": enumerate_sne, "ssne": enumerate_ssne, "pne": enumerate_pne}[args.concept]
    found = fn(game)
    out = {"concept": args.concept, "count": len(found), "profiles": [_profile(game, x) for x in found]}
    if args.show_moves and args.concept == "pne":
        out["blocking_moves"] = {
            ",".join(map(str, x)): [_move(game, m) for m in improving_moves(game, x)] for x in found
        }
    return out, "brute-force enumeration over all profiles and coalitions"


def cmd_fairness(args, gf, game):
    fair = [x for x in game.profiles() if is_minmax_fair(game, x)]
    mins = sorted_lex_minimizers(game)
    out = {
        "minmax_fair": [_profile(game, x) for x in fair],
        "sorted_lex_minimizers": [_profile(game, x) for x in mins],
        "coincide": fair == mins,
        "all_fair_strict_pareto": all(is_strict_pareto(game, x) for x in fair),
    }
    return out, "min-max fairness compared with sorted lexicographical minimality of private costs"


def _efficiency(res):
    return {
        "ratio": res.ratio,
        "unbounded": res.unbounded,
        "equilibrium": list(res.equilibrium),
        "equilibrium_cost": res.equilibrium_cost,
        "optimum": list(res.optimum),
        "optimum_cost": res.optimum_cost,
        "sne_count": res.sne_count,
    }


def cmd_efficiency(args, gf, game):
    p = "inf" if args.p in ("inf", "infinity") else int(args.p)
    out = {
        "p": p,
        "price_of_stability": _efficiency(strong_pos(game, p)),
        "price_of_anarchy": _efficiency(strong_poa(game, p)),
    }
    return out, "strong price of stability and anarchy with respect to the L_p norm of private costs"


def cmd_routing(args, gf, game):
    inst = gf.obj
    res = sne_identical_costs(inst) if args.algorithm == "sne-identical" else sne_convex_costs(inst)
    out = {
        "algorithm": args.algorithm,
        "paths": [inst.path_label(p) for p in res.paths],
        "costs": list(res.costs),
        "arc_loads": {inst.arc_name(k): v for k, v in enumerate(res.loads)},
    }
    if res.cut:
        out["min_cut"] = [inst.arc_name(k) for k in res.cut]
    if res.exponent is not None:
        out["exponent"] = res.exponent
    if args.verify:
        out["verified_sne"] = is_sne(game, game.profile_of(res.paths))
    return out, "polynomial strong-equilibrium construction for single-commodity bottleneck routing"


def cmd_splittable(args, gf, game):
    inst = gf.obj
    if args.alpha is None:
        raise ValueError("splittable approx needs --alpha")
    res = approx_sne(
        inst, args.alpha, eps_solver=args.eps_solver, surrogate=args.surrogate,
        coalition_samples=args.samples, seed=args.seed,
    )
    out = {
        "alpha": Fraction(args.alpha),
        "M": res.M,
        "state": [list(row) for row in res.state],
        "private_costs": [float(v) for v in private_costs(inst, res.state)],
        "certificates": {k: [float(c) if not isinstance(c, tuple) else [float(c[0]), float(c[1])] for c in v]
                         for k, v in lip_certificates(inst, res.state).items()},
        "iterations": res.iterations,
        "converged": res.converged,
        "relative_gap": res.gap,
        "surrogate": res.surrogate,
        "verified": res.verified,
        "violation": None if res.violation is None else {
            "coalition": list(res.violation.coalition),
            "deviation": [list(r) for r in res.violation.deviation],
            "costs_before": list(res.violation.before),
            "costs_after": list(res.violation.after),
        },
    }
    return out, "approximate strong equilibrium of a splittable game, certified by unilateral best responses"


def cmd_fixtures(args, gf, game):
    return {"fixtures": fixture_names()}, "packaged example games"


COMMANDS = {
    "check-lip": cmd_check_lip,
    "potential": cmd_potential,
    "dynamics": cmd_dynamics,
    "sne-enum": cmd_sne_enum,
    "fairness": cmd_fairness,
    "efficiency": cmd_efficiency,
    "routing": cmd_routing,
    "splittable": cmd_splittable,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--game", help="game file (JSON) or name of a packaged fixture")
    common.add_argument("--mode", choices=["strict", "weak", "alpha"], default="strict",
                        help="kind of improving move (weak = super-strong)")
    common.add_argument("--max-coalition", type=int, default=None, metavar="K")
    common.add_argument("--alpha", default=None, metavar="A", help="rational, e.g. 0.1 or 1/10")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--budget", type=int, default=10**6, metavar="N",
                        help="maximum number of profiles to enumerate")

    parser = argparse.ArgumentParser(prog="lipgames", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-lip", parents=[common], help="verify a certificate function")
    p.add_argument("--function", choices=["phi", "psi", "upsilon"], default="phi")
    p = sub.add_parser("potential", parents=[common], help="exponent and path bound of the power potential")
    p.add_argument("--function", choices=["phi", "psi", "upsilon"], default="phi")
    p = sub.add_parser("dynamics", parents=[common], help="improvement dynamics")
    p.add_argument("action", choices=["run", "graph"])
    p.add_argument("--start", help="comma-separated start profile (default all zeros)")
    p.add_argument("--rule", choices=["first", "best-response", "random"], default="first")
    p.add_argument("--step-cap", type=int, default=None)
    p.add_argument("--list-edges", action="store_true")
    p = sub.add_parser("sne-enum", parents=[common], help="enumerate equilibria")
    p.add_argument("--concept", choices=["sne", "ssne", "pne"], default="sne")
    p.add_argument("--show-moves", action="store_true", help="list coalition moves blocking each PNE")
    sub.add_parser("fairness", parents=[common], help="min-max fairness and sorted-lex minimizers")
    p = sub.add_parser("efficiency", parents=[common], help="strong price of stability and anarchy")
    p.add_argument("--p", default="1", help="norm: positive integer or inf")
    p = sub.add_parser("routing", parents=[common], help="strong equilibria for bottleneck routing")
    p.add_argument("algorithm", choices=["sne-identical", "sne-convex"])
    p.add_argument("--verify", action="store_true", help="also check the result by brute force")
    p = sub.add_parser("splittable", parents=[common], help="splittable games")
    p.add_argument("action", choices=["approx"])
    p.add_argument("--eps-solver", type=float, default=None)
    p.add_argument("--surrogate", choices=["integral", "load-weighted"], default="integral")
    p.add_argument("--samples", type=int, default=200, help="random coalition deviations to screen")
    sub.add_parser("fixtures", parents=[common], help="list packaged fixtures")
    return parser


def _text(value, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            nested = isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v))
            if v and nested:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v)):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(value)}")
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    budget = Budget(max_profiles=args.budget)
    try:
        gf = game = None
        if args.command != "fixtures":
            if not args.game:
                raise ValueError("--game is required")
            gf = load_game(resolve_game_path(args.game))
            needs_finite = not (args.command == "splittable")
            if args.command == "splittable" and gf.kind != "splittable":
                raise ValueError("the splittable command needs a splittable game file")
            if args.command == "routing" and gf.kind != "routing":
                raise ValueError("the routing command needs a routing game file")
            if needs_finite:
                game = gf.game(budget)
                game.require_enumerable()
        results, guarantee = COMMANDS[args.command](args, gf, game)
    except BudgetError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (FileNotFoundError, SchemaError, ValidationError, DomainError, InfeasibleError,
            ValueError, IndexError, KeyError, TypeError) as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return EXIT_INVALID

    config = {
        k: v for k, v in vars(args).items() if k not in ("command", "format") and v is not None
    }
    report = {
        "command": args.command,
        "config": config,
        "results": results,
        "provenance": {
            "tool": f"lipgames {__version__}",
            "game": gf.name if gf else None,
            "kind": gf.kind if gf else None,
            "guarantee": guarantee,
        },
    }
    report = _jsonable(report)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print("\n".join(_text(report)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
