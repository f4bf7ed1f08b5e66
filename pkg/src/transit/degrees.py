"""Degree algorithms: set-cover reduction, greedy and exact solvers, saturation.

The minimum number of solutions needed to assemble a given transition is a
set-cover problem: each solution covers the players whose coordinate it
matches.  The exact solver is a small branch-and-bound; the greedy solver
carries the usual 1 + ln(n) guarantee.  Everything here works on raw
profile tuples so the rest of the package can layer richer types on top.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import Infeasible, NotATransition, TooLarge

Profile = tuple[int, ...]

DEFAULT_NODE_CAP = 1_000_000


def covers(members: Sequence[Profile], t: Sequence[Profile]) -> bool:
    """True iff every coordinate of t appears in some member at that slot."""
    return all(any(d[i] == t[i] for d in members) for i in range(len(t)))


def projections(members: Sequence[Profile], n: int) -> tuple[tuple[int, ...], ...]:
    """Per-coordinate sorted value sets of a nonempty profile list."""
    return tuple(tuple(sorted({d[i] for d in members})) for i in range(n))


def product_profiles(projs: Sequence[Sequence[int]]) -> Iterator[Profile]:
    return itertools.product(*projs)


def product_size(projs: Sequence[Sequence[int]]) -> int:
    return math.prod(len(p) for p in projs)


@dataclass(frozen=True)
class CoverInstance:
    """Set-cover instance induced by (solution list, target profile).

    universe: player indices to cover.
    sets:     coverage masks, one per retained solution; empties dropped.
    origins:  index into the original solution list for each retained set.
    """

    universe: frozenset[int]
    sets: tuple[frozenset[int], ...]
    origins: tuple[int, ...]

    def feasible(self) -> bool:
        got: set[int] = set()
        for s in self.sets:
            got |= s
        return got >= self.universe


def reduce_to_cover(members: Sequence[Profile], t: Sequence[int]) -> CoverInstance:
    """Build the cover instance whose optimum is the transition degree of t.

    Solutions covering no coordinate of t are eliminated up front.  Raises
    NotATransition when some coordinate of t appears in no solution.
    """
    target = tuple(t)
    n = len(target)
    sets = []
    origins = []
    for idx, d in enumerate(members):
        mask = frozenset(i for i in range(n) if d[i] == target[i])
        if mask:
            sets.append(mask)
            origins.append(idx)
    covered: set[int] = set()
    for m in sets:
        covered |= m
    if covered != set(range(n)):
        raise NotATransition(
            f"profile {target} is not a transition; players "
            f"{sorted(set(range(n)) - covered)} are uncovered"
        )
    return CoverInstance(frozenset(range(n)), tuple(sets), tuple(origins))


def greedy_cover(ci: CoverInstance) -> list[int]:
    """Greedy cover: largest uncovered coverage first, ties by lowest index.

    Returns indices into ci.sets.  Size is at most (1 + ln |universe|) times
    the optimum.
    """
    if not ci.feasible():
        raise Infeasible("cover instance cannot cover its universe")
    uncovered = set(ci.universe)
    chosen: list[int] = []
    while uncovered:
        best_idx = -1
        best_gain = 0
        for idx, s in enumerate(ci.sets):
            gain = len(s & uncovered)
            if gain > best_gain:
                best_gain = gain
                best_idx = idx
        chosen.append(best_idx)
        uncovered -= ci.sets[best_idx]
    return chosen


def exact_cover(
    ci: CoverInstance, node_cap: int = DEFAULT_NODE_CAP
) -> tuple[list[int], bool]:
    """Branch-and-bound minimum cover.

    Returns (indices into ci.sets, exact_flag).  When the node cap is hit the
    greedy witness is returned with exact_flag False.  Duplicate masks are
    collapsed (keeping the lowest index) before searching; the lower bound is
    ceil(uncovered / largest set size).
    """
    greedy = greedy_cover(ci)

    seen: dict[frozenset[int], int] = {}
    for idx, s in enumerate(ci.sets):
        if s not in seen:
            seen[s] = idx
    masks = sorted(seen.items(), key=lambda kv: (-len(kv[0]), kv[1]))
    max_size = len(masks[0][0]) if masks else 1

    best: list[int] = list(greedy)
    best_len = len(greedy)
    nodes = 0
    capped = False

    def element_choices(uncovered: frozenset[int]) -> list[tuple[frozenset[int], int]]:
        # branch on the uncovered element with the fewest covering sets
        counts: dict[int, list[tuple[frozenset[int], int]]] = {e: [] for e in uncovered}
        for mask, idx in masks:
            for e in mask & uncovered:
                counts[e].append((mask, idx))
        pick = min(counts, key=lambda e: (len(counts[e]), e))
        return counts[pick]

    def search(uncovered: frozenset[int], chosen: list[int]) -> None:
        nonlocal best, best_len, nodes, capped
        if capped:
            return
        nodes += 1
        if nodes > node_cap:
            capped = True
            return
        if not uncovered:
            if len(chosen) < best_len:
                best = list(chosen)
                best_len = len(chosen)
            return
        bound = len(chosen) + math.ceil(len(uncovered) / max_size)
        if bound >= best_len:
            return
        choices = element_choices(uncovered)
        if not choices:
            return
        choices.sort(key=lambda mi: (-len(mi[0] & uncovered), mi[1]))
        for mask, idx in choices:
            chosen.append(idx)
            search(uncovered - mask, chosen)
            chosen.pop()
            if capped:
                return

    search(ci.universe, [])
    return best, not capped


def exact_cover_brute(ci: CoverInstance) -> list[int]:
    """Reference solver: exhaustive subset search by increasing size."""
    if not ci.feasible():
        raise Infeasible("cover instance cannot cover its universe")
    indices = range(len(ci.sets))
    for size in range(1, len(ci.sets) + 1):
        for combo in itertools.combinations(indices, size):
            acc: set[int] = set()
            for idx in combo:
                acc |= ci.sets[idx]
            if acc >= ci.universe:
                return list(combo)
    raise Infeasible("no cover found")  # unreachable after feasible()


def is_independent(members: Sequence[Profile], subset: Sequence[int]) -> bool:
    """Independence oracle: no chosen solution is a transition of the others."""
    chosen = [members[i] for i in subset]
    for pos in range(len(chosen)):
        rest = chosen[:pos] + chosen[pos + 1 :]
        if rest and covers(rest, chosen[pos]):
            return False
    return True


def greedy_basis(members: Sequence[Profile]) -> list[int]:
    """Grow an independent set through the full oracle until maximal."""
    basis: list[int] = []
    for idx in range(len(members)):
        if is_independent(members, basis + [idx]):
            basis.append(idx)
    return basis


@dataclass(frozen=True)
class SaturationResult:
    """Minimum degree saturating the transition set, plus the greedy basis.

    `m` is the verified minimum (the largest exact transition degree over the
    whole transition set).  `basis` is the independent set the greedy farming
    produces; its size always satisfies the saturation property but can
    overshoot the minimum, in which case `basis_is_minimal` is False and the
    discrepancy should be surfaced, not hidden.
    """

    m: int
    basis: tuple[int, ...]
    basis_is_minimal: bool


def max_transition_degree(
    members: Sequence[Profile], cap: int | None = None
) -> int:
    """Largest exact transition degree over the full transition set."""
    if not members:
        raise Infeasible("empty solution list")
    n = len(members[0])
    projs = projections(members, n)
    if cap is not None and product_size(projs) > cap:
        raise TooLarge(
            f"transition set has {product_size(projs)} profiles, cap is {cap}"
        )
    worst = 1
    for t in product_profiles(projs):
        ci = reduce_to_cover(members, t)
        sol, _ = exact_cover(ci)
        worst = max(worst, len(sol))
    return worst


def saturation_degree(
    members: Sequence[Profile], cap: int | None = None
) -> SaturationResult:
    """Minimum m with every transition being an m-transition.

    The greedy independent basis bounds the answer from above (the basis
    projections already span the transition set), and the verified minimum
    is the exact worst transition degree.
    """
    basis = greedy_basis(members)
    m = max_transition_degree(members, cap=cap)
    return SaturationResult(m=m, basis=tuple(basis), basis_is_minimal=m == len(basis))
