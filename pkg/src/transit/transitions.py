"""Transition sets, limited transitions, stable transitions, and merges.

A transition of a solution set lets every player copy her own coordinate
from some solution, so the transition set is the Cartesian product of the
per-player projections.  Limited (m-) transitions restrict how many distinct
solutions may be combined; the minimum number for a given profile is its
transition degree.  Stable transitions additionally require every
non-best-responding player to have a helper whose own best-response switch
repairs her.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from . import degrees
from .errors import EmptySolutionSet, TooLarge
from .games import Game, Profile, SolutionSet, best_responses, profile_cap


@dataclass(frozen=True)
class TransitionSet:
    """Cartesian product of the per-player projections of a solution set."""

    source: SolutionSet
    projections: tuple[tuple[int, ...], ...]

    def __contains__(self, s: Sequence[int]) -> bool:
        t = tuple(s)
        if len(t) != len(self.projections):
            return False
        return all(t[i] in self.projections[i] for i in range(len(t)))

    def __iter__(self) -> Iterator[Profile]:
        return itertools.product(*self.projections)

    def __len__(self) -> int:
        size = 1
        for p in self.projections:
            size *= len(p)
        return size


def transition_set(D: SolutionSet) -> TransitionSet:
    D.require_nonempty()
    projs = degrees.projections(D.members, D.game.n)
    return TransitionSet(D, projs)


def is_transition(D: SolutionSet, s: Sequence[int]) -> bool:
    """True iff every player's coordinate in s occurs in some solution."""
    D.require_nonempty()
    t = D.game.validate_profile(s)
    return degrees.covers(D.members, t)


def merge_set(profiles: Sequence[Profile]) -> list[Profile]:
    """Transition set of an arbitrary nonempty profile list, enumerated.

    The inputs need not be solutions of anything; this is the merge used by
    the congestion-game welfare lemma.
    """
    if not profiles:
        raise EmptySolutionSet("cannot merge an empty profile list")
    n = len(profiles[0])
    projs = degrees.projections(profiles, n)
    if degrees.product_size(projs) > profile_cap():
        raise TooLarge("merge set exceeds the profile cap")
    return list(degrees.product_profiles(projs))


@dataclass(frozen=True)
class DegreeWitness:
    """A profile, its transition degree, and covering solution indices.

    `exact` is False only when branch-and-bound hit its node cap and the
    greedy witness was reported instead.
    """

    profile: Profile
    degree: int
    witnesses: tuple[int, ...]
    exact: bool = True


def transition_degree(
    D: SolutionSet, s: Sequence[int], mode: str = "exact"
) -> DegreeWitness:
    """Minimum number of solutions whose coordinates assemble s.

    mode "exact" runs branch-and-bound on the induced cover instance;
    "greedy" returns the 1 + ln(n)-approximate witness.
    """
    D.require_nonempty()
    t = D.game.validate_profile(s)
    ci = degrees.reduce_to_cover(D.members, t)
    if mode == "greedy":
        picks = degrees.greedy_cover(ci)
        exact = False
    elif mode == "exact":
        picks, exact = degrees.exact_cover(ci)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    origins = tuple(sorted(ci.origins[i] for i in picks))
    return DegreeWitness(t, len(picks), origins, exact)


def degree_map(D: SolutionSet, cap: int | None = None) -> dict[Profile, int]:
    """Exact transition degree of every profile in the transition set."""
    ts = transition_set(D)
    limit = cap if cap is not None else profile_cap()
    if len(ts) > limit:
        raise TooLarge(f"transition set has {len(ts)} profiles, cap is {limit}")
    out: dict[Profile, int] = {}
    for t in ts:
        ci = degrees.reduce_to_cover(D.members, t)
        picks, _ = degrees.exact_cover(ci)
        out[t] = len(picks)
    return out


def m_transition_set(D: SolutionSet, m: int) -> list[Profile]:
    """All transitions of degree at most m, in lexicographic order."""
    if m < 1:
        raise ValueError("m must be at least 1")
    D.require_nonempty()
    if m == 1:
        return sorted(D.members)
    out = []
    for t, deg in degree_map(D).items():
        if deg <= m:
            out.append(t)
    out.sort()
    return out


def iter_m_transitions(D: SolutionSet, m: int) -> Iterator[Profile]:
    """Lazy variant of m_transition_set; no materialisation, no cap."""
    if m < 1:
        raise ValueError("m must be at least 1")
    for t in transition_set(D):
        ci = degrees.reduce_to_cover(D.members, t)
        picks, _ = degrees.exact_cover(ci)
        if len(picks) <= m:
            yield t


def is_stable_transition(D: SolutionSet, s: Sequence[int], variant: str = "strict") -> bool:
    """Membership in the stable transition set.

    A transition s qualifies when every player i that is not best responding
    has a helper j != i whose switch to one of j's best responses makes i's
    current strategy a best response.  In the strict variant (the default)
    the helper must itself not be best responding; the weak variant only
    requires the helper to have a best response differing from its current
    strategy (a tie suffices).
    """
    if variant not in ("strict", "weak"):
        raise ValueError(f"unknown variant {variant!r}")
    D.require_nonempty()
    game = D.game
    t = game.validate_profile(s)
    if not degrees.covers(D.members, t):
        return False

    br_cache = [best_responses(game, i, t) for i in range(game.n)]
    for i in range(game.n):
        if t[i] in br_cache[i]:
            continue
        if not _has_helper(game, t, i, br_cache, variant):
            return False
    return True


def _has_helper(
    game: Game,
    t: Profile,
    i: int,
    br_cache: list[set[int]],
    variant: str,
) -> bool:
    for j in range(game.n):
        if j == i:
            continue
        brj = br_cache[j]
        if variant == "strict" and t[j] in brj:
            continue
        for alt in sorted(brj):
            if alt == t[j]:
                continue
            shifted = list(t)
            shifted[j] = alt
            if t[i] in best_responses(game, i, shifted):
                return True
    return False


def stable_transition_set(D: SolutionSet, variant: str = "strict") -> list[Profile]:
    """All stable transitions, enumerated from the transition set."""
    ts = transition_set(D)
    if len(ts) > profile_cap():
        raise TooLarge("transition set exceeds the profile cap")
    return [t for t in ts if is_stable_transition(D, t, variant)]


def saturation_degree(D: SolutionSet, cap: int | None = None) -> degrees.SaturationResult:
    """Minimum m with T(D, m) = T(D); see degrees.saturation_degree."""
    D.require_nonempty()
    return degrees.saturation_degree(D.members, cap=cap)


def is_product_set(profiles: Sequence[Profile]) -> bool:
    """True iff the profile set equals the product of its own projections."""
    if not profiles:
        raise EmptySolutionSet("empty profile list")
    n = len(profiles[0])
    projs = degrees.projections(profiles, n)
    return degrees.product_size(projs) == len(set(profiles))
