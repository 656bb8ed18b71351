"""Branch-and-bound engines over partial elimination orders.

Three engines compute the same quantity, the minimum number of ballot
manipulations that change the winner:

``compute_margin``
    Best-first search that scores nodes with a closed-form bound first and
    solves a distance program only when the bound alone cannot prune.
``mrsw_baseline``
    The older baseline: every child node is scored by a distance program.
``exhaustive_margin``
    Evaluates every full alternate order; no pruning.  Guarded to small
    candidate counts and used as an oracle in tests.

Nodes are suffixes of hypothetical full orders (children extend at the
front).  The frontier pops the lowest score, ties broken by the order's
name sequence, so single-threaded runs are bit-reproducible.
"""

from __future__ import annotations

import heapq
import itertools
import json
import threading
import time
from dataclasses import dataclass, field, replace

from .bounds import bound_rule
from .distance import MODES, DistanceCache
from .election import Election
from .tabulate import last_round_margin, last_round_margin_add, run_irv

ALGORITHMS = ("margin", "mrsw", "exhaustive")
EXHAUSTIVE_MAX_CANDIDATES = 6
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Node:
    """A scored suffix of a hypothetical full elimination order."""

    order: tuple[int, ...]
    score: int


class Frontier:
    """Min-heap of pending nodes: lowest score first, then lexicographic order name."""

    def __init__(self, election: Election):
        self._names = election.names
        self._heap: list[tuple[int, tuple[str, ...], tuple[int, ...]]] = []

    def push(self, node: Node):
        key = tuple(self._names[c] for c in node.order)
        heapq.heappush(self._heap, (node.score, key, node.order))

    def pop(self) -> Node:
        score, _, order = heapq.heappop(self._heap)
        return Node(order, score)

    def __len__(self):
        return len(self._heap)

    def __bool__(self):
        return bool(self._heap)


@dataclass(frozen=True)
class SearchStats:
    """Size and cost counters for one search run.

    ``node_scores`` maps the comma-joined order name of every scored node to
    the final score it was assigned (after any distance solve).
    """

    nodes_scored: int
    lps_solved: int
    elapsed_ms: float
    node_scores: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class MarginReport:
    """Result of a margin computation, plus provenance and search counters."""

    margin: int
    mode: str
    algorithm: str
    lrm: int
    winner: str
    elimination_order: tuple[str, ...]
    witness_order: tuple[str, ...] | None
    capped: bool
    tie_caveat: bool
    stats: SearchStats
    bound: str | None = None
    cap: int | None = None

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "margin_report",
            "margin": self.margin,
            "mode": self.mode,
            "algorithm": self.algorithm,
            "bound": self.bound,
            "cap": self.cap,
            "lrm": self.lrm,
            "winner": self.winner,
            "elimination_order": list(self.elimination_order),
            "witness_order": None if self.witness_order is None else list(self.witness_order),
            "capped": self.capped,
            "tie_caveat": self.tie_caveat,
            "stats": {
                "nodes_scored": self.stats.nodes_scored,
                "lps_solved": self.stats.lps_solved,
                "elapsed_ms": self.stats.elapsed_ms,
                "node_scores": dict(self.stats.node_scores),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MarginReport":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        stats = data["stats"]
        return cls(
            margin=data["margin"],
            mode=data["mode"],
            algorithm=data["algorithm"],
            bound=data.get("bound"),
            cap=data.get("cap"),
            lrm=data["lrm"],
            winner=data["winner"],
            elimination_order=tuple(data["elimination_order"]),
            witness_order=None
            if data["witness_order"] is None
            else tuple(data["witness_order"]),
            capped=data["capped"],
            tie_caveat=data["tie_caveat"],
            stats=SearchStats(
                nodes_scored=stats["nodes_scored"],
                lps_solved=stats["lps_solved"],
                elapsed_ms=stats["elapsed_ms"],
                node_scores=dict(stats["node_scores"]),
            ),
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "MarginReport":
        return cls.from_dict(json.loads(text))


class _Run:
    """Shared bookkeeping for one search invocation."""

    def __init__(self, election: Election, mode: str, tie_policy: str, distance: DistanceCache | None):
        if election.num_candidates < 2:
            raise ValueError("margin computation needs at least two candidates")
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.election = election
        self.mode = mode
        self.tabulation = run_irv(election, tie_policy)
        self.winner = self.tabulation.winner
        if mode == "modify":
            self.lrm = last_round_margin(election, tie_policy)
        else:
            self.lrm = last_round_margin_add(election, tie_policy)
        self.distance = distance if distance is not None else DistanceCache(election, mode)
        if self.distance.mode != mode or self.distance.election is not election:
            raise ValueError("distance cache does not match this election and mode")
        self.lps_solved = 0
        self.nodes_scored = 0
        self.node_scores: dict[str, int] = {}
        self.started = time.perf_counter()

    def name(self, order: tuple[int, ...]) -> str:
        return ",".join(self.election.names[c] for c in order)

    def solve_distance(self, order: tuple[int, ...], exact: bool) -> int:
        self.lps_solved += 1
        return self.distance.value(order, exact)

    def record(self, order: tuple[int, ...], score: int):
        self.nodes_scored += 1
        self.node_scores[self.name(order)] = score

    def losers(self) -> list[int]:
        ids = [c for c in self.election.candidate_ids() if c != self.winner]
        ids.sort(key=lambda c: self.election.names[c])
        return ids

    def extensions(self, order: tuple[int, ...]) -> list[int]:
        used = set(order)
        ids = [c for c in self.election.candidate_ids() if c not in used]
        ids.sort(key=lambda c: self.election.names[c])
        return ids

    def report(self, algorithm: str, margin: int, witness: tuple[int, ...] | None,
               capped: bool, bound: str | None = None, cap: int | None = None) -> MarginReport:
        elapsed_ms = (time.perf_counter() - self.started) * 1000.0
        return MarginReport(
            margin=margin,
            mode=self.mode,
            algorithm=algorithm,
            lrm=self.lrm,
            winner=self.election.names[self.winner],
            elimination_order=tuple(
                self.election.names[c] for c in self.tabulation.elimination_order
            ),
            witness_order=None if witness is None else tuple(
                self.election.names[c] for c in witness
            ),
            capped=capped,
            tie_caveat=self.tabulation.tied,
            stats=SearchStats(
                nodes_scored=self.nodes_scored,
                lps_solved=self.lps_solved,
                elapsed_ms=elapsed_ms,
                node_scores=self.node_scores,
            ),
            bound=bound,
            cap=cap,
        )


def compute_margin(
    election: Election,
    mode: str = "modify",
    rule: str = "lb2",
    cap: int | None = None,
    tie_policy: str = "lexicographic",
    distance: DistanceCache | None = None,
    threads: int = 1,
) -> MarginReport:
    """Margin of victory via bound-first branch and bound.

    The upper bound starts at the last-round margin of the active mode
    (lowered to ``cap + 1`` when a cap is given).  Root nodes are the single
    losers, scored by the closed-form bound alone.  A child's score is the
    maximum of its parent's score and its own bound; the distance program is
    solved only while that stays under the upper bound, and full orders are
    solved exactly.  The final upper bound is the margin; with a cap, a
    returned ``cap + 1`` means "not achievable within the cap" and the report
    is flagged ``capped``.
    """
    if cap is not None and cap < 0:
        raise ValueError("cap must be nonnegative")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    run = _Run(election, mode, tie_policy, distance)
    scorer = bound_rule(rule, mode)
    upper = run.lrm if cap is None else min(cap + 1, run.lrm)

    if threads > 1:
        return _margin_parallel(run, scorer, upper, cap, rule, threads)

    frontier = Frontier(election)
    witness: tuple[int, ...] | None = None
    full = election.num_candidates

    for c in run.losers():
        order = (c,)
        score = scorer.score(election, order)
        run.record(order, score)
        if score < upper:
            frontier.push(Node(order, score))

    while frontier:
        node = frontier.pop()
        if node.score >= upper:
            continue
        if len(node.order) == full:
            # exact by construction: full orders are scored with exact solves
            upper = node.score
            witness = node.order
            continue
        for c in run.extensions(node.order):
            child = (c,) + node.order
            score = max(node.score, scorer.score(election, child))
            if score < upper:
                value = run.solve_distance(child, exact=len(child) == full)
                score = max(score, value)
            run.record(child, score)
            if score < upper:
                frontier.push(Node(child, score))

    capped = cap is not None and upper == cap + 1
    return run.report("margin", upper, witness, capped, bound=rule, cap=cap)


def _margin_parallel(run: _Run, scorer, upper: int, cap: int | None, rule: str, threads: int) -> MarginReport:
    """Worker threads share the frontier and a monotonically decreasing bound.

    The final margin is schedule independent (a node scoring under the true
    margin is never pruned, so the optimal leaf is always reached); node and
    solve counters may vary between runs.
    """
    election = run.election
    full = election.num_candidates
    lock = threading.Lock()
    work_ready = threading.Condition(lock)
    state = {"upper": upper, "witness": None, "inflight": 0, "stop": False}
    frontier = Frontier(election)

    with lock:
        for c in run.losers():
            order = (c,)
            score = scorer.score(election, order)
            run.record(order, score)
            if score < state["upper"]:
                frontier.push(Node(order, score))

    def worker():
        while True:
            with work_ready:
                while not frontier and state["inflight"] > 0 and not state["stop"]:
                    work_ready.wait()
                if state["stop"] or (not frontier and state["inflight"] == 0):
                    state["stop"] = True
                    work_ready.notify_all()
                    return
                node = frontier.pop()
                if node.score >= state["upper"]:
                    continue
                if len(node.order) == full:
                    if node.score < state["upper"]:
                        state["upper"] = node.score
                        state["witness"] = node.order
                    continue
                state["inflight"] += 1
                upper_snapshot = state["upper"]
            children = []
            for c in run.extensions(node.order):
                child = (c,) + node.order
                score = max(node.score, scorer.score(election, child))
                solved = None
                if score < upper_snapshot:
                    solved = run.distance.value(child, exact=len(child) == full)
                    score = max(score, solved)
                children.append((child, score, solved is not None))
            with work_ready:
                for child, score, was_solved in children:
                    run.nodes_scored += 1
                    run.node_scores[run.name(child)] = score
                    if was_solved:
                        run.lps_solved += 1
                    if score < state["upper"]:
                        frontier.push(Node(child, score))
                state["inflight"] -= 1
                work_ready.notify_all()

    pool = [threading.Thread(target=worker) for _ in range(threads)]
    for t in pool:
        t.start()
    for t in pool:
        t.join()

    capped = cap is not None and state["upper"] == cap + 1
    return run.report("margin", state["upper"], state["witness"], capped, bound=rule, cap=cap)


def mrsw_baseline(
    election: Election,
    mode: str = "modify",
    tie_policy: str = "lexicographic",
    distance: DistanceCache | None = None,
) -> MarginReport:
    """Baseline search: root children enter free, every other node costs a solve."""
    run = _Run(election, mode, tie_policy, distance)
    upper = run.lrm
    frontier = Frontier(election)
    witness: tuple[int, ...] | None = None
    full = election.num_candidates

    for c in run.losers():
        order = (c,)
        run.record(order, 0)  # a one-candidate reduced election needs no changes
        frontier.push(Node(order, 0))

    while frontier:
        node = frontier.pop()
        if node.score >= upper:
            continue
        if len(node.order) == full:
            upper = node.score
            witness = node.order
            continue
        for c in run.extensions(node.order):
            child = (c,) + node.order
            score = run.solve_distance(child, exact=len(child) == full)
            run.record(child, score)
            if score < upper:
                frontier.push(Node(child, score))

    return run.report("mrsw", upper, witness, capped=False)


def exhaustive_margin(
    election: Election,
    mode: str = "modify",
    tie_policy: str = "lexicographic",
    distance: DistanceCache | None = None,
) -> MarginReport:
    """Oracle: exact distance of every full order not won by the reported winner."""
    if election.num_candidates > EXHAUSTIVE_MAX_CANDIDATES:
        raise ValueError(
            f"exhaustive search is limited to {EXHAUSTIVE_MAX_CANDIDATES} candidates"
        )
    run = _Run(election, mode, tie_policy, distance)
    ids = sorted(election.candidate_ids(), key=lambda c: election.names[c])
    best: int | None = None
    witness: tuple[int, ...] | None = None
    for order in itertools.permutations(ids):
        if order[-1] == run.winner:
            continue
        value = run.solve_distance(order, exact=True)
        run.record(order, value)
        if best is None or value < best:
            best = value
            witness = order
    return run.report("exhaustive", best, witness, capped=False)
