"""Congestion games: resource-based costs, merge welfare bound, degree scaling.

A congestion game assigns each player a menu of resource subsets; using a
resource costs c_j(k) where k is how many players chose it.  Subadditive
costs make the welfare of any merge of profiles at most the summed welfare
of its constituents, which caps the worst m-limited transition at m times
the price of anarchy; the parallel-link family attains that cap exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .efficiency import price_report
from .errors import ParseError, PreconditionFailed
from .games import Game, Profile, SolutionSet, as_exact, enumerate_pure_ne
from .transitions import merge_set

F = Fraction


@dataclass(frozen=True)
class CongestionGame:
    """n players, resources 0..m-1, per-player menus of resource subsets.

    costs[j][k-1] is the cost of resource j when k players use it, tabulated
    for k = 1..n.  Costs must be nonnegative.
    """

    n_players: int
    n_resources: int
    strategies: tuple[tuple[frozenset[int], ...], ...]
    costs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if self.n_players < 1 or self.n_resources < 1:
            raise ParseError("need at least one player and one resource")
        if len(self.strategies) != self.n_players:
            raise ParseError("one strategy menu per player required")
        for menu in self.strategies:
            if not menu:
                raise ParseError("every player needs at least one strategy")
            for sub in menu:
                if not sub:
                    raise ParseError("strategies are nonempty resource subsets")
                if any(not (0 <= j < self.n_resources) for j in sub):
                    raise ParseError("strategy uses an unknown resource")
        if len(self.costs) != self.n_resources:
            raise ParseError("one cost table per resource required")
        for table in self.costs:
            if len(table) != self.n_players:
                raise ParseError("cost tables must cover loads 1..n")
            if any(v < 0 for v in table):
                raise ParseError("congestion costs must be nonnegative")

    @classmethod
    def build(cls, strategies, costs) -> "CongestionGame":
        menus = tuple(
            tuple(frozenset(int(j) for j in sub) for sub in menu) for menu in strategies
        )
        tables = tuple(tuple(as_exact(v) for v in table) for table in costs)
        n = len(menus)
        m = len(tables)
        return cls(n, m, menus, tables)

    def loads(self, s: Sequence[int]) -> list[int]:
        out = [0] * self.n_resources
        for i, choice in enumerate(s):
            for j in self.strategies[i][choice]:
                out[j] += 1
        return out

    def player_cost(self, i: int, s: Sequence[int]) -> Fraction:
        loads = self.loads(s)
        return sum(
            (self.costs[j][loads[j] - 1] for j in self.strategies[i][s[i]]),
            start=F(0),
        )

    def shape(self) -> tuple[int, ...]:
        return tuple(len(menu) for menu in self.strategies)


def congestion_to_game(cg: CongestionGame, convention: str = "min") -> Game:
    """Dense strategic-form view; costs by default, utilities on request."""
    names = tuple(
        tuple("{" + ",".join(str(j) for j in sorted(sub)) + "}" for sub in menu)
        for menu in cg.strategies
    )
    return Game.from_function(
        cg.shape(),
        lambda s: tuple(cg.player_cost(i, s) for i in range(cg.n_players)),
        convention=convention,
        strategies=names,
    )


def _additivity(cg: CongestionGame, superadditive: bool) -> bool:
    n = cg.n_players
    for table in cg.costs:
        for x in range(1, n + 1):
            for y in range(1, n - x + 1):
                lhs = table[x + y - 1]
                rhs = table[x - 1] + table[y - 1]
                if superadditive:
                    if lhs < rhs:
                        return False
                elif lhs > rhs:
                    return False
    return True


def is_subadditive(cg: CongestionGame) -> bool:
    """Every tabulated cost satisfies c(x+y) <= c(x) + c(y) for x+y <= n."""
    return _additivity(cg, superadditive=False)


def is_superadditive(cg: CongestionGame) -> bool:
    """Dual check used for utility-maximisation congestion games."""
    return _additivity(cg, superadditive=True)


def social_cost(cg: CongestionGame, s: Sequence[int]) -> Fraction:
    return sum((cg.player_cost(i, s) for i in range(cg.n_players)), start=F(0))


def verify_merge_lemma(cg: CongestionGame, profiles: Sequence[Profile]) -> dict:
    """Check sw(t) <= sum of member welfares for every merge t.

    Must never fail when the cost tables are subadditive; when they are not,
    a violation is legitimate and comes back as a counterexample, not an
    exception.
    """
    members = [tuple(p) for p in profiles]
    budget = sum((social_cost(cg, s) for s in members), start=F(0))
    checked = 0
    counterexample = None
    for t in merge_set(members):
        checked += 1
        if social_cost(cg, t) > budget:
            counterexample = {
                "merge": t,
                "merge_welfare": social_cost(cg, t),
                "budget": budget,
            }
            break
    return {
        "holds": counterexample is None,
        "checked": checked,
        "budget": budget,
        "counterexample": counterexample,
        "subadditive": is_subadditive(cg),
    }


def verify_theorem2(cg: CongestionGame, m: int, D: SolutionSet | None = None) -> dict:
    """Assert the m-limited anarchy cap m * poa for subadditive costs.

    D defaults to the pure equilibria of the cost game.  Refuses to assert
    when the cost tables are not subadditive.
    """
    if not is_subadditive(cg):
        raise PreconditionFailed("cost functions are not subadditive")
    game = congestion_to_game(cg, "min")
    if D is None:
        D = enumerate_pure_ne(game)
    D.require_nonempty()
    report = price_report(game, D)
    m_pota = report.m_pota_at(m)
    bound = m * report.poa
    return {
        "m": m,
        "poa": report.poa,
        "m_pota": m_pota,
        "bound": bound,
        "holds": m_pota <= bound,
        "slack": bound - m_pota,
    }


def parallel_links(n: int) -> CongestionGame:
    """n players choosing one of n identical unit-slope links.

    Equilibria are exactly the assignments with all-distinct links; merging
    m of them can pile m players onto one link, driving the social cost to
    m^2 + (n - m).
    """
    if n < 1:
        raise ParseError("need at least one player")
    menu = tuple(frozenset([j]) for j in range(n))
    table = tuple(F(k) for k in range(1, n + 1))
    return CongestionGame(n, n, (menu,) * n, (table,) * n)


def parallel_link_m_pota_claimed(n: int, m: int) -> Fraction:
    """The single-overloaded-link cost ratio, (m^2 + n - m) / n.

    This is the cost of piling m players onto one link while the rest stay
    spread out.  It is attainable but NOT always the worst m-limited
    transition; see parallel_link_m_pota for the verified maximum.
    """
    return F(m * m + n - m, n)


def parallel_link_m_pota(n: int, m: int) -> Fraction:
    """Verified worst m-limited transition cost ratio on parallel links.

    A profile is an m-limited transition iff its maximum link load is at
    most m (m equilibria can hand the same link to m different players, and
    a load-L link forces L distinct equilibria).  The social cost
    sum of squared loads is maximised by filling floor(n/m) links to load m
    and putting the remainder on one more, giving
    (floor(n/m) * m^2 + (n mod m)^2) / n.  This exceeds the
    single-overloaded-link value whenever 2m <= n and m >= 2, and always
    respects the m * poa cap since n mod m <= m.
    """
    q, r = divmod(n, m)
    return F(q * m * m + r * r, n)


def verify_parallel_link_family(n: int, m: int) -> dict:
    """Brute-force the parallel-link fixture and compare both closed forms."""
    cg = parallel_links(n)
    game = congestion_to_game(cg, "min")
    D = enumerate_pure_ne(game)
    report = price_report(game, D)
    measured = report.m_pota_at(m)
    claimed = parallel_link_m_pota_claimed(n, m)
    verified = parallel_link_m_pota(n, m)
    return {
        "n": n,
        "m": m,
        "poa": report.poa,
        "m_pota": measured,
        "claimed_value": claimed,
        "claimed_matches": measured == claimed,
        "verified_value": verified,
        "verified_matches": measured == verified,
        "cap": m * report.poa,
        "cap_holds": measured <= m * report.poa,
        "tight_at_n": report.m_pota_at(n) == n * report.poa,
    }


def has_monotone_costs(cg: CongestionGame) -> bool:
    return all(
        table[k] >= table[k - 1]
        for table in cg.costs
        for k in range(1, cg.n_players)
    )


def random_subadditive_costs(rng: random.Random, n: int, hi=10) -> tuple[Fraction, ...]:
    """Sample a nondecreasing subadditive cost table for loads 1..n.

    Each value is drawn uniformly between the previous value and the
    tightest subadditivity budget min over splits of c(x) + c(k - x).
    Monotonicity matters: the merge welfare bound fails on subadditive but
    decreasing tables (a lone user can pay c(1) after others leave a
    resource whose crowded price c(2) was cheap), so the property class is
    the nondecreasing one.
    """
    table: list[Fraction] = [F(rng.randint(0, hi))]
    for k in range(2, n + 1):
        cap = min(table[x - 1] + table[k - x - 1] for x in range(1, k))
        table.append(F(rng.randint(int(table[-1]), int(cap))))
    return tuple(table)


def random_congestion_game(
    rng: random.Random,
    n_players: int,
    n_resources: int,
    subadditive: bool = True,
) -> CongestionGame:
    resources = list(range(n_resources))
    available = (1 << n_resources) - 1  # nonempty subsets
    menus = []
    for _ in range(n_players):
        count = min(rng.randint(2, 3), available)
        menu = set()
        while len(menu) < count:
            size = rng.randint(1, n_resources)
            menu.add(frozenset(rng.sample(resources, size)))
        menus.append(tuple(sorted(menu, key=sorted)))
    if subadditive:
        tables = tuple(
            random_subadditive_costs(rng, n_players) for _ in range(n_resources)
        )
    else:
        tables = tuple(
            tuple(F(rng.randint(0, 10)) for _ in range(n_players))
            for _ in range(n_resources)
        )
    return CongestionGame(n_players, n_resources, tuple(menus), tables)
