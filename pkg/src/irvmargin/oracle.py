"""Brute-force verifiers: tiny-instance ground truth for everything else.

The edit oracle enumerates manipulations at signature granularity (ballots
with equal rankings are interchangeable) and declares success when some
adversarial tie resolution of the manipulated profile elects a candidate
other than the original winner.  It is exponential and guarded to tiny
instances; its entire point is independence from the search machinery.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .election import Election
from .tabulate import run_irv

ORACLE_MAX_CANDIDATES = 4
ORACLE_MAX_BALLOTS = 40


@dataclass(frozen=True)
class EditBudget:
    """Manipulation allowance: at most ``k`` ballots, in the given mode."""

    k: int
    mode: str  # modify | add | delete

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("budget must be nonnegative")
        if self.mode not in ("modify", "add", "delete"):
            raise ValueError(f"unknown mode {self.mode!r}")


def all_signatures(num_candidates: int) -> list[tuple[int, ...]]:
    """Every possible ballot signature, including the empty one."""
    out: list[tuple[int, ...]] = []
    for size in range(num_candidates + 1):
        out.extend(itertools.permutations(range(num_candidates), size))
    return out


def adversarial_winners(profile: dict[tuple[int, ...], int], num_candidates: int) -> frozenset[int]:
    """Candidates electable under some resolution of minimal-tally ties."""
    memo: dict[frozenset[int], frozenset[int]] = {}

    def winners(standing: frozenset[int]) -> frozenset[int]:
        if len(standing) == 1:
            return frozenset(standing)
        cached = memo.get(standing)
        if cached is not None:
            return cached
        tallies = dict.fromkeys(standing, 0)
        for ranking, count in profile.items():
            for c in ranking:
                if c in standing:
                    tallies[c] += count
                    break
        low = min(tallies.values())
        result: set[int] = set()
        for c in standing:
            if tallies[c] == low:
                result |= winners(standing - {c})
        memo[standing] = frozenset(result)
        return memo[standing]

    return winners(frozenset(range(num_candidates)))


def _removals(groups: list[tuple[tuple[int, ...], int]], total: int):
    """Multisets of existing ballots of exactly ``total``, as per-group takes."""

    def rec(i: int, remaining: int, taken: list[int]):
        if remaining == 0:
            yield tuple(taken)
            return
        if i == len(groups):
            return
        cap = min(groups[i][1], remaining)
        for take in range(cap + 1):
            taken.append(take)
            yield from rec(i + 1, remaining - take, taken)
            taken.pop()

    yield from rec(0, total, [])


def edit_oracle(election: Election, budget: EditBudget) -> int | None:
    """Smallest manipulation within the budget that can change the winner.

    Enumerates all ways to remove ballots from the profile and/or append new
    signatures (removal and addition counts are equal in modify mode, zero on
    the forbidden side otherwise) and tests each resulting profile under
    adversarial tie-breaking.  Returns None when no manipulation of size at
    most ``budget.k`` succeeds.
    """
    n = election.num_candidates
    if n > ORACLE_MAX_CANDIDATES or election.total_ballots > ORACLE_MAX_BALLOTS:
        raise ValueError("edit oracle is limited to tiny instances")
    original_winner = run_irv(election).winner
    groups = list(election.groups)
    signatures = all_signatures(n)
    seen: dict[tuple, bool] = {}

    def changed(profile: dict[tuple[int, ...], int]) -> bool:
        key = tuple(sorted((r, c) for r, c in profile.items() if c > 0))
        cached = seen.get(key)
        if cached is None:
            cached = any(w != original_winner for w in adversarial_winners(profile, n))
            seen[key] = cached
        return cached

    base = {ranking: count for ranking, count in groups}
    if changed(base):
        return 0

    for j in range(1, budget.k + 1):
        removal_sizes = [j] if budget.mode in ("modify", "delete") else [0]
        addition_sizes = [j] if budget.mode in ("modify", "add") else [0]
        for r_total, a_total in itertools.product(removal_sizes, addition_sizes):
            for takes in _removals(groups, r_total):
                reduced = dict(base)
                for (ranking, _), take in zip(groups, takes):
                    if take:
                        reduced[ranking] -= take
                for added in itertools.combinations_with_replacement(signatures, a_total):
                    profile = dict(reduced)
                    for sig in added:
                        profile[sig] = profile.get(sig, 0) + 1
                    if changed(profile):
                        return j
    return None


def random_election(
    seed: int, num_candidates: int, num_ballots: int, num_groups: int
) -> Election:
    """Deterministic pseudo-random election: same arguments, same election."""
    if num_candidates < 1 or num_ballots < 1 or num_groups < 1:
        raise ValueError("all parameters must be positive")
    if num_groups > num_ballots:
        raise ValueError("cannot split ballots into more groups than ballots")
    rng = random.Random((seed, num_candidates, num_ballots, num_groups))
    names = tuple(chr(ord("A") + i) for i in range(num_candidates))

    rankings: list[tuple[int, ...]] = []
    used = set()
    attempts = 0
    while len(rankings) < num_groups:
        attempts += 1
        if attempts > 10_000:
            raise ValueError("not enough distinct rankings for the requested group count")
        length = rng.randint(1, num_candidates) if rng.random() > 0.05 else 0
        ranking = tuple(rng.sample(range(num_candidates), length))
        if ranking not in used:
            used.add(ranking)
            rankings.append(ranking)

    counts = [1] * num_groups
    for _ in range(num_ballots - num_groups):
        counts[rng.randrange(num_groups)] += 1
    return Election(names, list(zip(rankings, counts)))
