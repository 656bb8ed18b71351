"""Closed-form lower bounds on manipulation counts, used to prune the search.

For a partial elimination order ``pi``, every candidate outside ``pi`` must
fall before any member of ``pi`` survives to the end.  Forcing candidate
``x`` out while ``c`` stays requires ``x``'s primary vote to drop to at most
the best tally ``c`` can be holding at that moment; the bounds below price
that repair.  Each modified ballot can close a two-candidate gap by 2 (take
one from ``x``, give one to ``c``), hence the halving in modify mode; an
added or deleted ballot moves the gap by only 1, so the add/delete variants
skip the division.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .election import Election, delta, delta_standing, primary_vote

BOUND_KINDS = ("lb1", "lb2")
BOUND_MODES = ("modify", "add_or_delete")


def _half_up(diff: int) -> int:
    return (diff + 1) // 2 if diff > 0 else 0


def l1(election: Election, c: int, x: int) -> int:
    """Modify-mode price of forcing ``x`` out before ``c``, pairwise view."""
    return _half_up(primary_vote(election, x) - delta(election, c, x))


def l1_add(election: Election, c: int, x: int) -> int:
    """Add/delete-mode counterpart of :func:`l1` (no halving)."""
    return max(0, primary_vote(election, x) - delta(election, c, x))


def _check_l2_args(pi: Sequence[int], c: int, x: int):
    if c not in pi:
        raise ValueError("c must be a surviving candidate (member of pi)")
    if x in pi:
        raise ValueError("x must be outside pi")


def l2(election: Election, c: int, x: int, pi: Sequence[int]) -> int:
    """Like :func:`l1` but with the whole survivor set standing.

    With ``{x} | pi`` still standing, fewer ballots can sit in ``c``'s tally,
    so this never undercuts :func:`l1`.
    """
    _check_l2_args(pi, c, x)
    standing = frozenset(pi) | {x}
    return _half_up(primary_vote(election, x) - delta_standing(election, c, x, standing))


def l2_add(election: Election, c: int, x: int, pi: Sequence[int]) -> int:
    _check_l2_args(pi, c, x)
    standing = frozenset(pi) | {x}
    return max(0, primary_vote(election, x) - delta_standing(election, c, x, standing))


def _pairs(election: Election, pi: Sequence[int]) -> Iterable[tuple[int, int]]:
    others = [x for x in election.candidate_ids() if x not in set(pi)]
    return ((c, x) for c in pi for x in others)


def lb1(election: Election, pi: Sequence[int]) -> int:
    """Modify-mode bound for any order ending in ``pi``: worst pairwise repair."""
    return max((l1(election, c, x) for c, x in _pairs(election, pi)), default=0)


def lb1_add(election: Election, pi: Sequence[int]) -> int:
    return max((l1_add(election, c, x) for c, x in _pairs(election, pi)), default=0)


def lb2(election: Election, pi: Sequence[int]) -> int:
    """Tighter variant of :func:`lb1`; independent of the order within ``pi``."""
    return max((l2(election, c, x, pi) for c, x in _pairs(election, pi)), default=0)


def lb2_add(election: Election, pi: Sequence[int]) -> int:
    return max((l2_add(election, c, x, pi) for c, x in _pairs(election, pi)), default=0)


_RULES = {
    ("lb1", "modify"): lb1,
    ("lb1", "add_or_delete"): lb1_add,
    ("lb2", "modify"): lb2,
    ("lb2", "add_or_delete"): lb2_add,
}


@dataclass(frozen=True)
class BoundRule:
    """A selected bound family and manipulation mode, exposed as a callable."""

    kind: str
    mode: str

    def __post_init__(self):
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}")
        if self.mode not in BOUND_MODES:
            raise ValueError(f"unknown bound mode {self.mode!r}")

    def score(self, election: Election, pi: Sequence[int]) -> int:
        return _RULES[(self.kind, self.mode)](election, pi)


def bound_rule(kind: str, manipulation_mode: str) -> BoundRule:
    """Pick the bound for a search: halved in modify mode, unhalved otherwise."""
    mode = "modify" if manipulation_mode == "modify" else "add_or_delete"
    return BoundRule(kind, mode)
