"""JSON game files.

Every document carries a ``kind``:

``normal_form``
    ``strategies`` (label list per player) and ``costs``, a list of
    ``{"profile": [...], "costs": [...]}`` entries covering every profile.
``congestion``
    ``facilities``, ``strategies`` (per player, a list of facility-name
    lists) and ``costs``, one of ``{"type": "load_table", "tables": {f: [...]}}``,
    ``{"type": "set_oracle", "tables": {f: [{"users": [...], "cost": c}]}}``
    or ``{"type": "interference", "edges": [[u, v, w]]}``.
``scheduling``
    ``machines`` and ``times`` (jobs x machines, ``null`` = not allowed).
``interference``
    ``players``, ``stations`` and ``edges``.
``routing``
    ``vertices``, ``arcs`` (``{"from", "to", "costs"}``) and either
    ``source``/``sink``/``players`` or ``terminals``; optional ``cost_bound``.
``splittable``
    ``facilities``, ``strategies``, ``demands`` and ``costs`` mapping each
    facility to ``[[load, cost], ...]`` breakpoints; optional ``cost_bound``.

Optional ``name`` and ``annotations`` (free-form, kept verbatim) are
allowed everywhere.  Numbers are integers or strings such as ``"0.01"`` or
``"1/3"``; binary floats are rejected so that every value is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .congestion import (
    Additive,
    BottleneckGame,
    CongestionModel,
    Interference,
    LoadTable,
    SetTable,
    make_interference,
    make_scheduling,
)
from .game import DEFAULT_BUDGET, Budget, FiniteGame, table_game
from .lexorder import as_fraction
from .routing import RoutingInstance, to_game as routing_game
from .splittable import PiecewiseLinear, SplittableInstance

__all__ = [
    "GameFile",
    "KINDS",
    "SchemaError",
    "canonical",
    "dump_game",
    "format_number",
    "load_game",
    "parse_game",
    "serialize",
]

KINDS = ("normal_form", "congestion", "routing", "splittable", "scheduling", "interference")


class SchemaError(ValueError):
    """The document does not match the game-file layout."""


@dataclass
class GameFile:
    kind: str
    obj: Any  # FiniteGame, CongestionModel, RoutingInstance or SplittableInstance
    name: str = ""
    annotations: dict = field(default_factory=dict)

    def game(self, budget: Budget = DEFAULT_BUDGET) -> FiniteGame:
        """Finite game for every kind except ``splittable``."""
        if self.kind == "splittable":
            raise SchemaError("a splittable game has no finite strategy profiles")
        if self.kind == "routing":
            return routing_game(self.obj, budget=budget, name=self.name)
        if self.kind == "normal_form":
            self.obj.budget = budget
            return self.obj
        return BottleneckGame(self.obj, budget=budget, name=self.name)


def format_number(v) -> int | str:
    """Integers stay integers; other rationals become decimal or ``p/q`` strings."""
    v = Fraction(v)
    if v.denominator == 1:
        return v.numerator
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    digits = max(twos, fives)
    scaled = abs(v.numerator) * 10**digits // v.denominator
    sign = "-" if v < 0 else ""
    text = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _num(v, where: str) -> Fraction:
    try:
        return as_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as err:
        raise SchemaError(f"{where}: {err}") from None


def _req(doc: dict, key: str, kind: str):
    if key not in doc:
        raise SchemaError(f"{kind} document needs a {key!r} field")
    return doc[key]


def _list(v, where: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(f"{where} must be a list")
    return v


def parse_game(doc: dict) -> GameFile:
    if not isinstance(doc, dict):
        raise SchemaError("a game file is a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    name = str(doc.get("name", ""))
    annotations = doc.get("annotations", {})
    if not isinstance(annotations, dict):
        raise SchemaError("annotations must be an object")
    obj = _PARSERS[kind](doc)
    if kind == "normal_form":
        obj.name = name
    return GameFile(kind, obj, name, annotations)


def _parse_normal_form(doc):
    labels = [[str(s) for s in _list(row, "strategy labels")] for row in _list(_req(doc, "strategies", "normal_form"), "strategies")]
    counts = [len(row) for row in labels]
    table = {}
    for entry in _list(_req(doc, "costs", "normal_form"), "costs"):
        profile = tuple(int(v) for v in _list(entry.get("profile"), "profile"))
        if profile in table:
            raise SchemaError(f"profile {list(profile)} listed twice")
        table[profile] = [_num(v, f"costs of {list(profile)}") for v in _list(entry.get("costs"), "costs")]
    try:
        return table_game(counts, table, labels=labels)
    except (ValueError, IndexError, KeyError) as err:
        raise SchemaError(str(err)) from None


def _parse_costs(spec, facilities):
    kind = spec.get("type")
    if kind == "load_table":
        tables = spec["tables"]
        missing = [f for f in facilities if f not in tables]
        if missing:
            raise SchemaError(f"no cost table for facility {missing[0]}")
        return LoadTable([[_num(v, f"cost of {f}") for v in tables[f]] for f in facilities])
    if kind == "set_oracle":
        tables = spec["tables"]
        out = []
        for f in facilities:
            out.append({frozenset(int(u) for u in e["users"]): _num(e["cost"], f"cost of {f}")
                        for e in tables.get(f, [])})
        return SetTable(out)
    if kind == "interference":
        return Interference([(int(u), int(v), _num(w, "edge weight")) for u, v, w in spec["edges"]])
    raise SchemaError(f"unknown congestion cost type {kind!r}")


def _parse_congestion(doc):
    facilities = [str(f) for f in _list(_req(doc, "facilities", "congestion"), "facilities")]
    strategies = [[list(s) for s in row] for row in _list(_req(doc, "strategies", "congestion"), "strategies")]
    costs = _parse_costs(_req(doc, "costs", "congestion"), facilities)
    try:
        return CongestionModel.create(facilities, strategies, costs)
    except KeyError as err:
        raise SchemaError(f"unknown facility {err}") from None


def _parse_scheduling(doc):
    times = [[None if v is None else _num(v, "processing time") for v in row]
             for row in _list(_req(doc, "times", "scheduling"), "times")]
    machines = doc.get("machines")
    return make_scheduling(times, machines)


def _parse_interference(doc):
    n = int(_req(doc, "players", "interference"))
    stations = int(_req(doc, "stations", "interference"))
    edges = [(int(u), int(v), _num(w, "edge weight")) for u, v, w in _req(doc, "edges", "interference")]
    return make_interference(n, edges, stations)


def _parse_routing(doc):
    vertices = _list(_req(doc, "vertices", "routing"), "vertices")
    arcs = [(a["from"], a["to"], [_num(v, "arc cost") for v in a["costs"]])
            for a in _list(_req(doc, "arcs", "routing"), "arcs")]
    bound = _num(doc["cost_bound"], "cost_bound") if "cost_bound" in doc else None
    if "terminals" in doc:
        terminals = [tuple(p) for p in doc["terminals"]]
        return RoutingInstance.create(vertices, arcs, terminals, cost_bound=bound)
    terminals = (_req(doc, "source", "routing"), _req(doc, "sink", "routing"))
    return RoutingInstance.create(vertices, arcs, terminals, players=int(_req(doc, "players", "routing")),
                                  cost_bound=bound)


def _parse_splittable(doc):
    facilities = [str(f) for f in _list(_req(doc, "facilities", "splittable"), "facilities")]
    strategies = [[list(s) for s in row] for row in _list(_req(doc, "strategies", "splittable"), "strategies")]
    demands = [_num(d, "demand") for d in _list(_req(doc, "demands", "splittable"), "demands")]
    table = _req(doc, "costs", "splittable")
    missing = [f for f in facilities if f not in table]
    if missing:
        raise SchemaError(f"no cost function for facility {missing[0]}")
    costs = [PiecewiseLinear([(_num(x, "breakpoint"), _num(y, "breakpoint")) for x, y in table[f]])
             for f in facilities]
    bound = _num(doc["cost_bound"], "cost_bound") if "cost_bound" in doc else None
    return SplittableInstance.create(facilities, strategies, demands, costs, C=bound)


_PARSERS = {
    "normal_form": _parse_normal_form,
    "congestion": _parse_congestion,
    "scheduling": _parse_scheduling,
    "interference": _parse_interference,
    "routing": _parse_routing,
    "splittable": _parse_splittable,
}


def load_game(path: str | Path) -> GameFile:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_float=_reject_float)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path}: invalid JSON ({err})") from None
    return parse_game(doc)


def _reject_float(text: str):
    raise SchemaError(f"binary float {text} in game file; write it as a string such as \"{text}\"")


# ------------------------------------------------------------ serialization


def _fnames(model) -> list[str]:
    return list(model.facilities)


def _strategies_doc(model) -> list:
    return [[[model.facilities[f] for f in sorted(s)] for s in row] for row in model.strategies]


def serialize(gf: GameFile) -> dict:
    obj, kind = gf.obj, gf.kind
    doc: dict[str, Any] = {"kind": kind}
    if gf.name:
        doc["name"] = gf.name
    if gf.annotations:
        doc["annotations"] = gf.annotations
    if kind == "normal_form":
        doc["strategies"] = [list(row) for row in obj.labels] if obj.labels else [
            [str(s) for s in range(c)] for c in obj.strategy_counts]
        doc["costs"] = [{"profile": list(x), "costs": [format_number(v) for v in obj.cost(x)]}
                        for x in obj.profiles()]
    elif kind == "congestion":
        doc["facilities"] = _fnames(obj)
        doc["strategies"] = _strategies_doc(obj)
        doc["costs"] = _costs_doc(obj)
    elif kind == "scheduling":
        doc["machines"] = _fnames(obj)
        doc["times"] = [[None if v is None else format_number(v) for v in row] for row in obj.costs.times]
    elif kind == "interference":
        doc["players"] = obj.n
        doc["stations"] = obj.m
        doc["edges"] = [[u, v, format_number(w)] for u, v, w in obj.costs.edges]
    elif kind == "routing":
        doc["vertices"] = list(obj.vertices)
        doc["arcs"] = [{"from": a.tail, "to": a.head, "costs": [format_number(v) for v in a.costs]}
                       for a in obj.arcs]
        pairs = set(obj.terminals)
        if len(pairs) == 1:
            doc["source"], doc["sink"] = obj.terminals[0]
            doc["players"] = obj.n
        else:
            doc["terminals"] = [list(p) for p in obj.terminals]
        top = max((max(a.costs[: obj.n + 1]) for a in obj.arcs), default=Fraction(0))
        if obj.cost_bound != top:
            doc["cost_bound"] = format_number(obj.cost_bound)
    elif kind == "splittable":
        doc["facilities"] = list(obj.facilities)
        doc["strategies"] = _strategies_doc(obj)
        doc["demands"] = [format_number(d) for d in obj.demands]
        doc["costs"] = {f: [[format_number(x), format_number(y)] for x, y in c.points]
                        for f, c in zip(obj.facilities, obj.costs)}
        if obj.C != max(c(obj.total_demand) for c in obj.costs):
            doc["cost_bound"] = format_number(obj.C)
    return doc


def _costs_doc(model: CongestionModel) -> dict:
    c = model.costs
    if isinstance(c, LoadTable):
        return {"type": "load_table",
                "tables": {f: [format_number(v) for v in t] for f, t in zip(model.facilities, c.tables)}}
    if isinstance(c, SetTable):
        return {"type": "set_oracle", "tables": {
            f: [{"users": sorted(users), "cost": format_number(v)}
                for users, v in sorted(t.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]
            for f, t in zip(model.facilities, c.tables)}}
    if isinstance(c, Interference):
        return {"type": "interference", "edges": [[u, v, format_number(w)] for u, v, w in c.edges]}
    if isinstance(c, Additive):
        raise SchemaError("additive costs are written as a scheduling document")
    raise SchemaError(f"cannot serialize cost kind {type(c).__name__}")


_NAME_FIELDS = frozenset(
    {"kind", "name", "annotations", "strategies", "facilities", "machines",
     "vertices", "from", "to", "source", "sink", "terminals"}
)


def canonical(doc, _key: str | None = None):
    """Copy of ``doc`` with every numeric leaf in the form :func:`serialize` writes.

    Name-valued fields (strategy labels, vertices, facilities) and
    annotations are left untouched.
    """
    if _key in _NAME_FIELDS:
        return doc
    if isinstance(doc, dict):
        return {k: canonical(v, k) for k, v in doc.items()}
    if isinstance(doc, list):
        return [canonical(v, _key) for v in doc]
    if isinstance(doc, str):
        try:
            return format_number(Fraction(doc.strip()))
        except (ValueError, ZeroDivisionError):
            return doc
    return doc


def dump_game(gf: GameFile, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(serialize(gf), fh, indent=2, sort_keys=True)
        fh.write("\n")
