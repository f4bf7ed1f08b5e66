"""File formats: games, solution sets, congestion, polymatrix, networks, graphs.

All numeric fields accept integers, decimal floats, and "p/q" strings;
exact-rational fixtures round-trip losslessly through the string form.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from .congestion import CongestionGame
from .coordination import GraphColoringInstance
from .errors import ParseError
from .games import Game, SolutionSet, as_exact
from .polymatrix import PolymatrixGame
from .routing import Commodity, RoutingInstance, cost_from_spec


def _load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _tensor_profiles(shape):
    import itertools

    return itertools.product(*(range(k) for k in shape))


def game_from_dict(data: dict) -> Game:
    """Game from {"convention", "players", "strategies", "payoffs"}.

    The payoff tensor is nested profile-major (player 1's strategy index
    outermost) with a per-player vector innermost.  Ragged tensors are
    rejected.
    """
    if not isinstance(data, dict):
        raise ParseError("game document must be an object")
    try:
        convention = {"max": "max", "min": "min"}[data.get("convention", "max")]
    except KeyError:
        raise ParseError(f"unknown convention {data.get('convention')!r}") from None
    players = tuple(str(p) for p in data["players"])
    strategies = tuple(tuple(str(x) for x in row) for row in data["strategies"])
    if len(players) != len(strategies):
        raise ParseError("players and strategies disagree in length")
    shape = tuple(len(s) for s in strategies)

    payoffs = {}
    tensor = data["payoffs"]
    n = len(players)

    def walk(node, prefix):
        depth = len(prefix)
        if depth == n:
            if not isinstance(node, list) or len(node) != n:
                raise ParseError(
                    f"payoff vector at {prefix} must list {n} values"
                )
            payoffs[tuple(prefix)] = tuple(as_exact(v) for v in node)
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise ParseError(
                f"payoff tensor is ragged at {prefix}: expected {shape[depth]} entries"
            )
        for idx, sub in enumerate(node):
            walk(sub, prefix + [idx])

    walk(tensor, [])
    return Game(players, strategies, payoffs, convention)


def game_to_dict(game: Game) -> dict:
    def build(prefix):
        depth = len(prefix)
        if depth == game.n:
            return [str(v) for v in game.payoffs[tuple(prefix)]]
        return [build(prefix + [i]) for i in range(game.shape[depth])]

    return {
        "convention": game.convention,
        "players": list(game.players),
        "strategies": [list(s) for s in game.strategies],
        "payoffs": build([]),
    }


def load_game(path: str | Path) -> Game:
    return game_from_dict(_load_json(path))


def load_solution_set(path: str | Path, game: Game | None = None) -> SolutionSet:
    """SolutionSet from {"game": <path or inline>, "label", "members"}."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ParseError("solution document must be an object")
    if game is None:
        ref = data.get("game")
        if isinstance(ref, dict):
            game = game_from_dict(ref)
        elif isinstance(ref, str):
            base = Path(path).parent
            game = load_game(base / ref if not os.path.isabs(ref) else ref)
        else:
            raise ParseError("solution document needs a game path or inline game")
    members = tuple(tuple(int(x) for x in row) for row in data["members"])
    return SolutionSet(game, members, str(data.get("label", "user")))


def congestion_from_dict(data: dict) -> CongestionGame:
    """CongestionGame from {"resources", "costs", "strategies"}."""
    if not isinstance(data, dict):
        raise ParseError("congestion document must be an object")
    resources = int(data["resources"])
    costs = [[as_exact(v) for v in row] for row in data["costs"]]
    if len(costs) != resources:
        raise ParseError("one cost table per resource required")
    strategies = [
        [frozenset(int(j) for j in subset) for subset in menu]
        for menu in data["strategies"]
    ]
    return CongestionGame.build(strategies, costs)


def congestion_to_dict(cg: CongestionGame) -> dict:
    return {
        "resources": cg.n_resources,
        "costs": [[str(v) for v in table] for table in cg.costs],
        "strategies": [
            [sorted(subset) for subset in menu] for menu in cg.strategies
        ],
    }


def load_congestion(path: str | Path) -> CongestionGame:
    return congestion_from_dict(_load_json(path))


def polymatrix_from_dict(data: dict) -> PolymatrixGame:
    """PolymatrixGame from {"players": n, "matrices": {"i,j": [[...]]}}."""
    if not isinstance(data, dict):
        raise ParseError("polymatrix document must be an object")
    matrices = {}
    for key, rows in data["matrices"].items():
        try:
            i, j = (int(x) for x in key.split(","))
        except ValueError:
            raise ParseError(f"matrix key {key!r} is not 'i,j'") from None
        matrices[(i, j)] = rows
    n = int(data["players"]) if "players" in data else None
    return PolymatrixGame.build(matrices, n)


def polymatrix_to_dict(pg: PolymatrixGame) -> dict:
    return {
        "players": pg.n_players,
        "matrices": {
            f"{i},{j}": [[str(v) for v in row] for row in m]
            for (i, j), m in sorted(pg.matrices.items())
        },
    }


def load_polymatrix(path: str | Path) -> PolymatrixGame:
    return polymatrix_from_dict(_load_json(path))


def routing_from_dict(data: dict) -> RoutingInstance:
    """RoutingInstance from {"nodes", "edges", "commodities"}.

    Edges carry {"from", "to", "cost": {"poly": [...]} | {"pwl": [[x,y]..]}};
    commodities carry explicit path edge-index lists.
    """
    if not isinstance(data, dict):
        raise ParseError("network document must be an object")
    n_nodes = int(data["nodes"])
    edges = []
    costs = []
    for e in data["edges"]:
        edges.append((int(e["from"]), int(e["to"])))
        costs.append(cost_from_spec(e["cost"]))
    commodities = []
    for c in data["commodities"]:
        commodities.append(
            Commodity(
                int(c["source"]),
                int(c["sink"]),
                float(c["rate"]),
                tuple(tuple(int(x) for x in path) for path in c["paths"]),
            )
        )
    return RoutingInstance(n_nodes, tuple(edges), tuple(costs), tuple(commodities))


def routing_to_dict(inst: RoutingInstance) -> dict:
    return {
        "nodes": inst.n_nodes,
        "edges": [
            {"from": u, "to": v, "cost": cost.spec()}
            for (u, v), cost in zip(inst.edges, inst.costs)
        ],
        "commodities": [
            {
                "source": c.source,
                "sink": c.sink,
                "rate": c.rate,
                "paths": [list(p) for p in c.paths],
            }
            for c in inst.commodities
        ],
    }


def load_routing(path: str | Path) -> RoutingInstance:
    return routing_from_dict(_load_json(path))


def graph_from_dict(data: dict) -> GraphColoringInstance:
    if not isinstance(data, dict):
        raise ParseError("graph document must be an object")
    n = int(data["nodes"])
    edges = tuple((int(u), int(v)) for u, v in data["edges"])
    colors = None
    if "colors" in data and data["colors"] is not None:
        colors = tuple(tuple(int(c) for c in menu) for menu in data["colors"])
    return GraphColoringInstance(n, edges, colors)


def graph_to_dict(inst: GraphColoringInstance) -> dict:
    out = {"nodes": inst.n_nodes, "edges": [list(e) for e in inst.edges]}
    if inst.colors is not None:
        out["colors"] = [list(m) for m in inst.colors]
    return out


def graph_from_text(text: str) -> GraphColoringInstance:
    """Edge list, one "u v" pair per line; '#' starts a comment."""
    edges = []
    top = -1
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: node ids must be integers") from None
        edges.append((u, v))
        top = max(top, u, v)
    if top < 0:
        raise ParseError("edge list is empty")
    return GraphColoringInstance(top + 1, tuple(edges))


def load_graph(path: str | Path) -> GraphColoringInstance:
    p = Path(path)
    if p.suffix == ".json":
        return graph_from_dict(_load_json(p))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return graph_from_dict(json.loads(text))
    return graph_from_text(text)
