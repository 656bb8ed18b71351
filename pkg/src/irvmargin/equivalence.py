"""Canonical ballot-signature classes with respect to an elimination order.

Fix an elimination order ``pi`` (first entry eliminated first, last entry the
winner of the reduced election).  Two ballot signatures are interchangeable if
they feed the same candidate's tally at every round of that reduced election.
Each signature collapses to a canonical representative that is a subsequence
of ``pi``; the ``2**len(pi)`` subsequences index the variables of every
manipulation-distance program built over ``pi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

#: Refuse to enumerate classes past this order length: the class count is
#: 2**len(pi) and the downstream programs grow with it.
MAX_CLASS_ORDER = 20


class ClassCapExceeded(ValueError):
    """Raised when an elimination order is too long for full class enumeration."""


def class_of(signature: Sequence[int], pi: Sequence[int]) -> tuple[int, ...]:
    """Canonical representative of ``signature`` w.r.t. elimination order ``pi``.

    An element of the signature survives iff it belongs to ``pi`` and no
    earlier element of the signature outlives it in ``pi`` (a ballot never
    reaches a preference ranked below a still-standing one).  The result is a
    subsequence of ``pi`` and is a fixed point of this map.
    """
    pos = {c: i for i, c in enumerate(pi)}
    if len(pos) != len(pi):
        raise ValueError("elimination order contains duplicates")
    kept = []
    highest = -1
    for c in signature:
        j = pos.get(c)
        if j is not None and j > highest:
            kept.append(c)
            highest = j
    return tuple(kept)


def enumerate_classes(pi: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``2**len(pi)`` subsequences of ``pi``, in deterministic bitmask order.

    Bit ``i`` of the mask selects ``pi[i]``, so the empty class comes first
    and ``pi`` itself last.
    """
    pi = tuple(pi)
    if len(set(pi)) != len(pi):
        raise ValueError("elimination order contains duplicates")
    if len(pi) > MAX_CLASS_ORDER:
        raise ClassCapExceeded(
            f"order of length {len(pi)} exceeds the class enumeration cap {MAX_CLASS_ORDER}"
        )
    classes = []
    for mask in range(1 << len(pi)):
        classes.append(tuple(pi[i] for i in range(len(pi)) if mask >> i & 1))
    return classes


@dataclass(frozen=True)
class ClassTable:
    """Every equivalence class for an order, with ballot counts from an election."""

    order: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    counts: dict[tuple[int, ...], int]

    def count(self, rep: tuple[int, ...]) -> int:
        return self.counts.get(rep, 0)


def class_counts(election, pi: Sequence[int]) -> ClassTable:
    """Count ballots per equivalence class; total ballot mass is conserved."""
    pi = tuple(pi)
    classes = enumerate_classes(pi)
    counts = {rep: 0 for rep in classes}
    for ranking, count in election.groups:
        counts[class_of(ranking, pi)] += count
    return ClassTable(order=pi, classes=tuple(classes), counts=counts)


def counts_toward(rep: tuple[int, ...], pi: Sequence[int], round_no: int) -> int | None:
    """Which candidate a class feeds in the given (1-based) round of ``pi``.

    At round ``r`` the standing candidates are ``pi[r-1:]``; the class feeds
    the first element of its representative still standing, or nobody
    (``None``) once exhausted.
    """
    pos = {c: i for i, c in enumerate(pi)}
    for c in rep:
        if pos[c] >= round_no - 1:
            return c
    return None
