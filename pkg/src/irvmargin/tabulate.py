"""Instant runoff counting: repeated elimination of the lowest-tally candidate.

Tabulation here is deterministic: ties among minimal-tally candidates are
broken by an explicit policy and every tie is recorded, so the reported winner
is well defined.  The adversarial reading of ties (the manipulator chooses who
is eliminated) belongs to the margin search, not to tabulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .election import Election, tally

TIE_POLICIES = ("lexicographic", "by_index")


@dataclass(frozen=True)
class TabulationResult:
    """Outcome of one IRV count."""

    winner: int
    elimination_order: tuple[int, ...]  # first eliminated first; never contains winner
    round_tallies: tuple[dict[int, int], ...]  # one map per round, standing candidates only
    exhausted: tuple[int, ...]  # ballots counting toward nobody, per round
    tie_events: tuple[tuple[int, frozenset[int]], ...] = field(default_factory=tuple)

    @property
    def tied(self) -> bool:
        return bool(self.tie_events)


def run_irv(election: Election, tie_policy: str = "lexicographic") -> TabulationResult:
    """Count an election per the standard IRV loop.

    Each round tallies every standing candidate and eliminates the one with
    the smallest tally.  ``tie_policy`` picks among tied minima:
    ``"lexicographic"`` takes the smallest display name, ``"by_index"`` the
    smallest candidate index.  Every tie is recorded as a
    ``(round, tied candidate set)`` event.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    if election.num_candidates == 0:
        raise ValueError("cannot tabulate an election with zero candidates")

    standing = list(election.candidate_ids())
    eliminated: list[int] = []
    rounds: list[dict[int, int]] = []
    exhausted: list[int] = []
    ties: list[tuple[int, frozenset[int]]] = []

    while len(standing) > 1:
        tallies = {c: tally(election, standing, c) for c in standing}
        rounds.append(tallies)
        exhausted.append(election.total_ballots - sum(tallies.values()))
        low = min(tallies.values())
        lowest = [c for c in standing if tallies[c] == low]
        if len(lowest) > 1:
            ties.append((len(rounds), frozenset(lowest)))
        if tie_policy == "lexicographic":
            out = min(lowest, key=lambda c: election.names[c])
        else:
            out = min(lowest)
        eliminated.append(out)
        standing.remove(out)

    return TabulationResult(
        winner=standing[0],
        elimination_order=tuple(eliminated),
        round_tallies=tuple(rounds),
        exhausted=tuple(exhausted),
        tie_events=tuple(ties),
    )


def _final_round_gap(election: Election, tie_policy: str) -> int:
    if election.num_candidates < 2:
        raise ValueError("last-round margin requires at least two candidates")
    result = run_irv(election, tie_policy)
    final = result.round_tallies[-1]
    a, b = final.values()
    return abs(a - b)


def last_round_margin(election: Election, tie_policy: str = "lexicographic") -> int:
    """Half the final-round tally gap, rounded up."""
    return (_final_round_gap(election, tie_policy) + 1) // 2


def last_round_margin_add(election: Election, tie_policy: str = "lexicographic") -> int:
    """The unhalved final-round tally gap, used by addition- and deletion-only modes."""
    return _final_round_gap(election, tie_policy)
