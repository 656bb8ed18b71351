"""Ranked-ballot election data model and counting statistics.

An :class:`Election` is a multiset of ranked ballots over a fixed candidate
set.  Candidates are referenced by dense integer index everywhere inside the
library; display names appear only at I/O boundaries.  Elections are immutable
after construction, so every operation in this module is a pure read and safe
to call concurrently.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class BallotFormatError(ValueError):
    """Raised when a ballot file (or in-memory definition) is malformed."""


class Candidate:
    """A candidate: dense integer ``id`` plus a display ``name``."""

    __slots__ = ("id", "name")

    def __init__(self, id: int, name: str):
        self.id = id
        self.name = name

    def __repr__(self):
        return f"Candidate({self.id}, {self.name!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Candidate)
            and self.id == other.id
            and self.name == other.name
        )

    def __hash__(self):
        return hash((self.id, self.name))


#: A ranking is an ordered sequence of candidate indices, most preferred
#: first.  It may be empty and need not mention every candidate.
Ranking = tuple  # tuple[int, ...]


class Election:
    """An immutable multiset of ranked ballots.

    Parameters
    ----------
    names:
        Display names, one per candidate; index in this sequence is the
        candidate id.
    groups:
        ``(ranking, count)`` pairs.  Duplicate rankings are merged by summing
        counts; zero or negative counts are rejected.
    """

    def __init__(self, names: Sequence[str], groups: Iterable[tuple[Sequence[int], int]]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise BallotFormatError("duplicate candidate name")
        self.names = names
        self.num_candidates = len(names)

        merged: dict[tuple[int, ...], int] = {}
        for ranking, count in groups:
            ranking = tuple(ranking)
            if count <= 0:
                raise BallotFormatError(f"non-positive ballot count {count!r}")
            if len(set(ranking)) != len(ranking):
                raise BallotFormatError(f"duplicate candidate within ranking {ranking!r}")
            for c in ranking:
                if not 0 <= c < self.num_candidates:
                    raise BallotFormatError(f"unknown candidate index {c!r}")
            merged[ranking] = merged.get(ranking, 0) + count
        self.groups: tuple[tuple[tuple[int, ...], int], ...] = tuple(sorted(merged.items()))
        self.total_ballots = sum(count for _, count in self.groups)

        # Shared memo for first-preference counts keyed by (standing, candidate);
        # dict writes are atomic under CPython so concurrent reads are fine.
        self._first_pref_cache: dict[tuple[frozenset[int], int], int] = {}

    @property
    def candidates(self) -> tuple[Candidate, ...]:
        return tuple(Candidate(i, n) for i, n in enumerate(self.names))

    def candidate_ids(self) -> range:
        return range(self.num_candidates)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown candidate name {name!r}") from None

    def __repr__(self):
        return (
            f"Election({len(self.names)} candidates, "
            f"{self.total_ballots} ballots in {len(self.groups)} groups)"
        )

    def __eq__(self, other):
        return (
            isinstance(other, Election)
            and self.names == other.names
            and self.groups == other.groups
        )

    def __hash__(self):
        return hash((self.names, self.groups))


def parse_election(text: str) -> Election:
    """Parse the line-oriented ballot file format.

    The first significant line is ``candidates: <name>(,<name>)*``.  Every
    further significant line is ``<count>: <name>(,<name>)*``, or ``<count>:``
    for an empty (immediately exhausted) ranking.  Blank lines and lines
    starting with ``#`` are ignored; whitespace around tokens is ignored.
    """
    lines = [
        (lineno, line.strip())
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines:
        raise BallotFormatError("missing 'candidates:' header line")

    lineno, header = lines[0]
    if ":" not in header:
        raise BallotFormatError(f"line {lineno}: expected 'candidates:' header")
    key, _, rest = header.partition(":")
    if key.strip().lower() != "candidates":
        raise BallotFormatError(f"line {lineno}: expected 'candidates:' header, got {key.strip()!r}")
    names = [n.strip() for n in rest.split(",")]
    if names == [""]:
        raise BallotFormatError(f"line {lineno}: empty candidate header")
    if any(not n for n in names):
        raise BallotFormatError(f"line {lineno}: empty candidate name")
    if len(set(names)) != len(names):
        raise BallotFormatError(f"line {lineno}: duplicate candidate name")
    index = {n: i for i, n in enumerate(names)}

    groups = []
    for lineno, line in lines[1:]:
        count_text, sep, rest = line.partition(":")
        if not sep:
            raise BallotFormatError(f"line {lineno}: expected '<count>: <ranking>'")
        try:
            count = int(count_text.strip())
        except ValueError:
            raise BallotFormatError(f"line {lineno}: malformed count {count_text.strip()!r}") from None
        if count <= 0:
            raise BallotFormatError(f"line {lineno}: count must be positive, got {count}")
        rest = rest.strip()
        ranking: tuple[int, ...] = ()
        if rest:
            tokens = [t.strip() for t in rest.split(",")]
            if any(not t for t in tokens):
                raise BallotFormatError(f"line {lineno}: empty candidate name in ranking")
            try:
                ranking = tuple(index[t] for t in tokens)
            except KeyError as exc:
                raise BallotFormatError(f"line {lineno}: unknown candidate {exc.args[0]!r}") from None
            if len(set(ranking)) != len(ranking):
                raise BallotFormatError(f"line {lineno}: duplicate candidate within ranking")
        groups.append((ranking, count))

    return Election(names, groups)


def format_election(election: Election) -> str:
    """Serialize back to the ballot file format (inverse of :func:`parse_election`)."""
    out = ["candidates: " + ",".join(election.names)]
    for ranking, count in election.groups:
        out.append(f"{count}: " + ",".join(election.names[c] for c in ranking))
    return "\n".join(out) + "\n"


def project(ranking: Sequence[int], standing: Iterable[int]) -> tuple[int, ...]:
    """Largest subsequence of ``ranking`` containing only members of ``standing``."""
    keep = standing if isinstance(standing, (set, frozenset)) else frozenset(standing)
    return tuple(c for c in ranking if c in keep)


def _first_preference(ranking: tuple[int, ...], standing: frozenset[int]) -> int | None:
    for c in ranking:
        if c in standing:
            return c
    return None


def tally(election: Election, standing: Iterable[int], candidate: int) -> int:
    """Number of ballots whose projection onto ``standing`` begins with ``candidate``."""
    standing = frozenset(standing)
    if candidate not in standing:
        raise ValueError(f"candidate {candidate} is not in the standing set")
    key = (standing, candidate)
    cached = election._first_pref_cache.get(key)
    if cached is not None:
        return cached
    total = 0
    for ranking, count in election.groups:
        if _first_preference(ranking, standing) == candidate:
            total += count
    election._first_pref_cache[key] = total
    return total


def primary_vote(election: Election, candidate: int) -> int:
    """Number of ballots ranking ``candidate`` first."""
    if not 0 <= candidate < election.num_candidates:
        raise ValueError(f"unknown candidate index {candidate}")
    if election.num_candidates == 0:
        return 0
    return tally(election, election.candidate_ids(), candidate)


def delta(election: Election, c: int, x: int) -> int:
    """Ballots on which ``c`` is ranked above ``x``, or ``c`` appears and ``x`` does not.

    This is the largest tally ``c`` can hold at the moment ``x`` is eliminated,
    ignoring which other candidates are still standing.
    """
    if c == x:
        raise ValueError("delta requires two distinct candidates")
    total = 0
    for ranking, count in election.groups:
        for p in ranking:
            if p == c:
                total += count
                break
            if p == x:
                break
    return total


def delta_standing(election: Election, c: int, x: int, standing: Iterable[int]) -> int:
    """Largest tally ``c`` can hold at the moment ``x`` is eliminated with ``standing`` still in.

    Equals the count of ballots whose projection onto ``standing`` begins with
    ``c``.  Results are memoized on the election, keyed by (standing, c); the
    search revisits many overlapping standing sets.
    """
    standing = frozenset(standing)
    if c == x:
        raise ValueError("delta_standing requires two distinct candidates")
    if c not in standing or x not in standing:
        raise ValueError("both candidates must belong to the standing set")
    return tally(election, standing, c)
