"""Command-line front end.

Verbs: prices, bounds, degree, routing, graph, theorem, oracle, fixtures.
Exit codes: 0 all asserted inequalities hold, 1 at least one failed (a
finding, printed prominently), 2 parse errors, 3 empty solution sets,
4 undefined prices, 5 other operational errors.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import fixtures as fx
from . import io as tio
from .congestion import verify_parallel_link_family
from .coordination import (
    check_stable_transition_exact,
    check_stable_transition_fast,
    clique_graph,
    construct_st_not_ne,
    cycle_graph,
    efficiency_bounds,
    is_ne_coloring,
    random_forest,
    stable_transitions,
)
from .efficiency import (
    check_bound_observations,
    extensive_smoothness,
    price_report,
    two_player_pots_condition,
)
from .errors import EmptySolutionSet, Infeasible, ParseError, TransitError, WrongArity
from .games import Game, SolutionSet, as_exact, enumerate_pure_ne
from .polymatrix import generate_theorem1_instances, verify_theorem1
from .reporting import Report
from .routing import fig2_family, stretch_bound, transition_costs
from .transitions import saturation_degree, transition_degree


def _load_game_arg(path_or_name: str) -> tuple[Game, dict]:
    kind, path = fx.resolve_input(path_or_name)
    provenance = {}
    if kind:
        if kind != "game":
            raise ParseError(f"fixture {path_or_name!r} is a {kind}, not a game")
        spec = fx.resolve_fixture(path_or_name)
        provenance = {"fixture": spec.name, "anchor": spec.anchor}
    return tio.load_game(path), provenance


def _solution_set(game: Game, args) -> SolutionSet:
    chosen = [bool(args.ne), args.eps is not None, args.solutions is not None]
    if sum(chosen) > 1:
        raise ParseError("choose one of --ne, --eps, --solutions")
    if args.solutions:
        return tio.load_solution_set(args.solutions, game)
    if args.eps is not None:
        return enumerate_pure_ne(game, as_exact(args.eps)).require_nonempty()
    return enumerate_pure_ne(game).require_nonempty()


def cmd_prices(args) -> Report:
    game, provenance = _load_game_arg(args.game)
    D = _solution_set(game, args)
    rep = price_report(game, D, args.stable)
    report = Report("prices", {"game": args.game, "solutions": D.label},
                    provenance=provenance)
    report.results = rep.as_dict()
    report.results["witnesses"] = {
        k: list(v) for k, v in rep.witnesses.items() if v is not None
    }
    report.record(
        "transition-anarchy-ordering",
        rep.observation1_holds(),
        "anarchy over transitions must not beat anarchy over solutions",
    )
    report.record("degree-chain", rep.chain_holds(), "m-price monotonicity")
    return report


def cmd_bounds(args) -> Report:
    game, provenance = _load_game_arg(args.game)
    D = _solution_set(game, args)
    rows = check_bound_observations(game, D)
    report = Report("bounds", {"game": args.game, "solutions": D.label},
                    provenance=provenance)
    report.results["rows"] = [row.as_dict() for row in rows]
    for row in rows:
        report.record(row.name, row.holds if not row.skipped else None)
    if game.n == 2 and game.convention == "max":
        try:
            cond = two_player_pots_condition(game)
            rep = price_report(game, D)
            report.results["two_player_condition"] = {
                "condition": cond,
                "pots": rep.pots,
                "pos": rep.pos,
            }
            if cond:
                report.record(
                    "two-player-stability-condition",
                    rep.pots == rep.pos,
                    "condition promises pots = pos",
                )
        except WrongArity:
            pass
    if game.convention == "max":
        try:
            smooth = extensive_smoothness(game, D)
            report.results["smoothness"] = {
                "alpha": smooth.alpha,
                "beta": smooth.beta,
                "best_bound": smooth.best_bound,
                "pota": smooth.pota,
                "holds": smooth.holds,
            }
            report.record("smoothness-certificate", smooth.holds,
                          "certified bound must not exceed the true price")
        except (Infeasible, EmptySolutionSet):
            report.results["smoothness"] = {"skipped": "no feasible certificate"}
    return report


def _parse_profile(game: Game, text: str):
    if "," in text:
        return game.validate_profile(tuple(int(x) for x in text.split(",")))
    rank = int(text)
    shape = game.shape
    if not 0 <= rank < game.num_profiles:
        raise ParseError(f"profile rank {rank} out of range")
    out = []
    for k in reversed(shape):
        out.append(rank % k)
        rank //= k
    return tuple(reversed(out))


def cmd_degree(args) -> Report:
    game, provenance = _load_game_arg(args.game)
    D = tio.load_solution_set(args.solutions, game).require_nonempty()
    report = Report("degree", {"game": args.game, "solutions": args.solutions},
                    provenance=provenance)
    if args.saturate:
        out = saturation_degree(D)
        report.results = {
            "m": out.m,
            "basis": [list(D.members[i]) for i in out.basis],
            "basis_is_minimal": out.basis_is_minimal,
        }
        return report
    if args.profile is None:
        raise ParseError("degree needs --profile IDX or --saturate")
    profile = _parse_profile(game, args.profile)
    witness = transition_degree(D, profile, "greedy" if args.greedy else "exact")
    report.results = {
        "profile": list(witness.profile),
        "degree": witness.degree,
        "witnesses": [list(D.members[i]) for i in witness.witnesses],
        "exact": witness.exact,
    }
    return report


def cmd_routing(args) -> Report:
    kind, path = fx.resolve_input(args.network)
    provenance = {}
    if kind:
        if kind != "routing":
            raise ParseError(f"fixture {args.network!r} is a {kind}, not a network")
        spec = fx.resolve_fixture(args.network)
        provenance = {"fixture": spec.name, "anchor": spec.anchor}
    inst = tio.load_routing(path)
    out = transition_costs(inst, tol=args.tol)
    sb = stretch_bound(inst, tol=args.tol)
    report = Report("routing", {"network": args.network, "tol": args.tol,
                                "m": args.m},
                    provenance=provenance)
    report.results = {
        "equilibrium_cost": out["equilibrium_cost"],
        "optimum_cost": out["optimum_cost"],
        "worst_transition_cost": out["worst_cost"],
        "best_transition_cost": out["best_cost"],
        "poa": out["poa"],
        "pota": out["pota"],
        "pots": out["pots"],
        "supported_paths": out["supported"],
        "supported_exact": out["supported_exact"],
        "worst_exact": out["worst_exact"],
        "stretch": sb["stretch"],
        "stretch_cap": sb["cap"],
        "stretch_ratio": sb["ratio"],
        "stretch_degenerate": sb["degenerate"],
    }
    if args.m is not None:
        # equilibria form a convex set, so one equilibrium witnesses every
        # supported path and the m-limited transition set is the full one
        report.results["m"] = args.m
        report.results["m_note"] = (
            "m-limited transition flows coincide with unrestricted ones "
            "for every m >= 1"
        )
    report.record("stretch-bound", sb["holds"],
                  "pota/poa must stay below the largest stretch")
    report.record(
        "cost-ordering",
        out["best_cost"] <= out["equilibrium_cost"] + 1e-9
        and out["equilibrium_cost"] <= out["worst_cost"] + 1e-9,
        "best <= equilibrium <= worst transition cost",
    )
    return report


def _load_graph_arg(name: str):
    kind, path = fx.resolve_input(name)
    provenance = {}
    if kind:
        if kind != "graph":
            raise ParseError(f"fixture {name!r} is a {kind}, not a graph")
        spec = fx.resolve_fixture(name)
        provenance = {"fixture": spec.name, "anchor": spec.anchor}
    return tio.load_graph(path), provenance


def cmd_graph(args) -> Report:
    inst, provenance = _load_graph_arg(args.graph)
    report = Report(f"graph-{args.action}", {"graph": args.graph},
                    provenance=provenance)
    if args.action == "check":
        if not args.coloring:
            raise ParseError("graph check needs --coloring c1,c2,...")
        col = tuple(int(c) for c in args.coloring.split(","))
        fast = None
        menus = inst.menus()
        if all(len(m) == 2 for m in menus):
            fast = check_stable_transition_fast(inst, col)
        exact = check_stable_transition_exact(inst, col, args.stable)
        report.results = {
            "coloring": list(col),
            "stable_fast": fast,
            "stable_exact": exact,
            "variant": args.stable,
            "is_equilibrium": is_ne_coloring(inst, col),
        }
        if fast is not None and args.stable == "strict":
            report.record("fast-exact-agreement", fast == exact,
                          "threshold check must match the direct evaluation")
        return report
    if args.action == "construct":
        if not args.topology:
            raise ParseError("graph construct needs --topology cycle|clique|forest")
        col = construct_st_not_ne(inst, args.topology)
        report.results = {"topology": args.topology}
        if col is None:
            report.results["coloring"] = None
            report.results["exists"] = False
        else:
            ok = check_stable_transition_exact(inst, col) and not is_ne_coloring(
                inst, col
            )
            report.results["coloring"] = list(col)
            report.results["exists"] = True
            report.record("construction-verified", ok,
                          "construction must be stable and not an equilibrium")
        return report
    out = efficiency_bounds(inst)
    report.results = dict(out)
    report.record("anarchy-floor", out["poa_holds"], "poa >= 1/2")
    report.record("stable-anarchy-floor", out["posta_holds"],
                  "posta >= 1/2 - |N| / (2|E|)")
    return report


def cmd_theorem(args) -> Report:
    handler = {
        "1": _theorem1,
        "2": _theorem2,
        "3": _theorem3,
        "4": _theorem4,
        "5": _theorem5,
    }[args.number]
    return handler(args)


def _theorem1(args) -> Report:
    rng = random.Random(args.seed)
    report = Report("theorem-1", {"instances": args.instances, "seed": args.seed})
    rows = []
    histogram: dict[int, int] = {}
    worst_slack = None
    for pg, D in generate_theorem1_instances(rng, args.instances):
        histogram[len(D.members)] = histogram.get(len(D.members), 0) + 1
        for m in (1, 2, 3):
            out = verify_theorem1(pg, D, m)
            if not out["holds"]:
                rows.append(out)
            if worst_slack is None or out["slack"] < worst_slack:
                worst_slack = out["slack"]
    report.results = {
        "checked": args.instances,
        "violations": rows,
        "solution_size_histogram": {str(k): v for k, v in sorted(histogram.items())},
        "worst_slack": worst_slack,
    }
    report.record("stable-degree-welfare-floor", not rows,
                  "m-posta >= poa / m on every generated instance")
    return report


def _theorem2(args) -> Report:
    n = args.n
    report = Report("theorem-2", {"n": n})
    rows = []
    for m in range(1, n + 1):
        fam = verify_parallel_link_family(n, m)
        rows.append(fam)
        report.record(f"degree-cap(m={m})", fam["cap_holds"],
                      "m-pota <= m * poa")
        report.record(
            f"single-pile-value(m={m})",
            fam["claimed_matches"],
            f"stated closed form {fam['claimed_value']} vs measured {fam['m_pota']}",
        )
        report.record(f"verified-closed-form(m={m})", fam["verified_matches"],
                      "floor(n/m) m^2 + (n mod m)^2 over n")
    report.record("tight-at-n", rows[-1]["tight_at_n"],
                  "the n-limited worst merge costs n times the anarchy price")
    report.results = {"rows": rows}
    return report


def _theorem3(args) -> Report:
    deltas = [float(x) for x in args.deltas.split(",")]
    report = Report("theorem-3", {"n": args.n, "m": args.m, "deltas": deltas})
    rows = []
    for delta in deltas:
        inst = fig2_family(args.n, args.m, delta)
        sb = stretch_bound(inst, tol=args.tol)
        rows.append(
            {
                "delta": delta,
                "cap": sb["cap"],
                "ratio": sb["ratio"],
                "gap": sb["cap"] - sb["ratio"],
                "holds": sb["holds"],
            }
        )
        report.record(f"stretch-bound(delta={delta})", sb["holds"])
    gaps = [row["gap"] for row in rows]
    if len(gaps) >= 2 and sorted(deltas, reverse=True) == deltas:
        report.record(
            "tightness-trend",
            all(b <= a for a, b in zip(gaps, gaps[1:])),
            "gap must shrink as the coefficient spread vanishes",
        )
    report.results = {"rows": rows}
    return report


def _theorem4(args) -> Report:
    report = Report("theorem-4", {"graph": args.graph, "random": args.random,
                                  "seed": args.seed})
    instances = []
    if args.graph:
        inst, _ = _load_graph_arg(args.graph)
        instances.append(("input", inst))
    if args.random:
        rng = random.Random(args.seed)
        from .coordination import random_graph

        made = 0
        while made < args.random:
            g = random_graph(rng, rng.randint(3, args.max_nodes))
            if g.edges:
                instances.append((f"random-{made}", g))
                made += 1
    if not instances:
        instances = [("cycle-4", cycle_graph(4))]
    rows = []
    bad = 0
    for name, inst in instances:
        out = efficiency_bounds(inst)
        ok = out["poa_holds"] and out["posta_holds"]
        bad += 0 if ok else 1
        rows.append({"name": name, "poa": out["poa"], "posta": out["posta"],
                     "holds": ok})
    report.results = {"rows": rows, "violations": bad}
    report.record("coordination-bounds", bad == 0,
                  "poa >= 1/2 and posta >= 1/2 - |N|/(2|E|)")
    return report


def _theorem5(args) -> Report:
    report = Report("theorem-5", {"forests": args.forests, "seed": args.seed})
    rows = []

    def check(name, inst, topology, expect_exists):
        col = construct_st_not_ne(inst, topology)
        exists = col is not None
        verified = None
        if exists:
            verified = check_stable_transition_exact(inst, col) and not \
                is_ne_coloring(inst, col)
        rows.append({"name": name, "exists": exists, "verified": verified})
        report.record(
            f"construction({name})",
            (exists == expect_exists) and (verified is not False),
            "existence parity and verification",
        )
        if not exists and not expect_exists:
            leftovers = [
                c for c in stable_transitions(inst) if not is_ne_coloring(inst, c)
            ]
            report.record(f"emptiness({name})", leftovers == [],
                          "no stable non-equilibrium may survive exhaustion")

    for n in range(4, 9):
        check(f"cycle-{n}", cycle_graph(n), "cycle", True)
    for n, expect in ((3, False), (4, True), (5, False), (6, True)):
        check(f"clique-{n}", clique_graph(n), "clique", expect)
    rng = random.Random(args.seed)
    forest_bad = 0
    for k in range(args.forests):
        inst = random_forest(rng, rng.randint(2, 12))
        col = construct_st_not_ne(inst, "forest")
        if col is None:
            ok = not inst.edges
        else:
            ok = check_stable_transition_exact(inst, col) and not is_ne_coloring(
                inst, col
            )
        forest_bad += 0 if ok else 1
    rows.append({"name": f"forests-x{args.forests}", "failures": forest_bad})
    report.record("forest-constructions", forest_bad == 0)
    report.results = {"rows": rows}
    return report


def cmd_oracle(args) -> Report:
    if args.update:
        inst, exp = fx.write_fixture_files(args.fixture)
        report = Report("oracle", {"fixture": args.fixture, "update": True})
        report.results = {"instance": str(inst), "expectations": str(exp)}
        return report
    out = fx.compare_expectations(args.fixture)
    report = Report("oracle", {"fixture": args.fixture})
    report.results = out
    report.record("expectations-current", out["ok"],
                  "shipped expectations must match the recomputation")
    return report


def cmd_fixtures(args) -> Report:
    report = Report("fixtures", {})
    report.results = {"corpus": fx.fixtures()}
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transit",
        description="Transitions between game solutions and their efficiency.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")

    def add_solution_flags(p):
        p.add_argument("--ne", action="store_true", help="use the pure equilibria")
        p.add_argument("--eps", help="epsilon for approximate equilibria")
        p.add_argument("--solutions", help="solution-set JSON file")

    p = sub.add_parser("prices", help="all efficiency measures of a solution set")
    p.add_argument("game")
    add_solution_flags(p)
    p.add_argument("--stable", choices=("strict", "weak"), default="strict")
    add_format(p)
    p.set_defaults(func=cmd_prices)

    p = sub.add_parser("bounds", help="condition-based bounds with tightest constants")
    p.add_argument("game")
    add_solution_flags(p)
    add_format(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("degree", help="transition degree or saturation degree")
    p.add_argument("game")
    p.add_argument("solutions")
    p.add_argument("--profile", help="profile rank or comma-separated indices")
    p.add_argument("--saturate", action="store_true")
    p.add_argument("--greedy", action="store_true")
    add_format(p)
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("routing", help="routing analyses")
    action = p.add_subparsers(dest="action", required=True)
    pa = action.add_parser("analyze", help="equilibrium, transitions, stretch")
    pa.add_argument("network")
    pa.add_argument("--tol", type=float, default=1e-8)
    pa.add_argument("--m", type=int, default=None)
    add_format(pa)
    pa.set_defaults(func=cmd_routing)

    p = sub.add_parser("graph", help="coordination-game analyses")
    p.add_argument("action", choices=("check", "construct", "bounds"))
    p.add_argument("graph")
    p.add_argument("--coloring")
    p.add_argument("--topology", choices=("cycle", "clique", "forest"))
    p.add_argument("--stable", choices=("strict", "weak"), default="strict")
    add_format(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("theorem", help="theorem verification harnesses")
    p.add_argument("number", choices=("1", "2", "3", "4", "5"))
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--deltas", default="0.1,0.01")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--graph")
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--max-nodes", type=int, default=9)
    p.add_argument("--forests", type=int, default=50)
    add_format(p)
    p.set_defaults(func=cmd_theorem)

    p = sub.add_parser("oracle", help="recompute a fixture's expectations")
    p.add_argument("fixture")
    p.add_argument("--update", action="store_true")
    add_format(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fixtures", help="list the shipped corpus")
    add_format(p)
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except TransitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(report.render(args.format))
    if report.findings:
        print("findings:", file=sys.stderr)
        for line in report.findings:
            print(f"  FAILED {line}", file=sys.stderr)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
