"""Minimum-manipulation programs for a target elimination order.

Given an elimination order ``pi``, these programs compute the smallest number
of ballot manipulations that make the reduced election (candidates outside
``pi`` removed from every ballot) eliminate candidates exactly in that order,
with ties resolved adversarially.  Three manipulation modes exist:

``modify``
    Ballots are rewritten in place; the profile size is unchanged.
``add``
    New ballots are appended; nothing is removed.
``delete``
    Existing ballots are removed; nothing is added.

Variables live on the equivalence classes of ballot signatures: per class the
program tracks how many ballots are changed into it (``q``), changed away
from it (``m``), and how many it holds afterwards (``y``).  The value at a
full order is the exact manipulation count; at a partial order it lower
bounds every completion that ends with that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .election import Election
from .equivalence import class_counts, counts_toward
from .lp import LinearConstraint, LPModel, SolveOutcome, solve_integral, solve_lp

MODES = ("modify", "add", "delete")


class DistanceError(RuntimeError):
    """An infeasible distance program: construction is broken, not the input."""


def _class_label(rep: tuple[int, ...], election: Election) -> str:
    return ",".join(election.names[c] for c in rep)


def build_distance_lp(pi: Sequence[int], election: Election, mode: str) -> LPModel:
    """Assemble the manipulation-distance program for elimination order ``pi``.

    The balance constraint ``y = n + q - m`` and the elimination constraints
    (each round's victim may not out-tally any later-surviving candidate) are
    shared by all modes.  ``modify`` adds the conservation constraint
    ``sum(q) = sum(m)``; ``add`` fixes ``m`` to zero and drops conservation;
    ``delete`` fixes ``q`` to zero, drops conservation, and only signatures
    present in the profile carry removal variables.

    In add mode the profile grows, so the per-class ceiling of the total
    original ballot count is not imposed on ``y`` (it would wrongly forbid
    piling additions onto one signature).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    pi = tuple(pi)
    if len(pi) < 2:
        raise ValueError("distance programs need an order of at least two candidates")
    table = class_counts(election, pi)
    n_total = election.total_ballots

    has_q = mode in ("modify", "add")
    variables: list[str] = []
    objective: dict[str, int] = {}
    constraints: list[LinearConstraint] = []

    q_name: dict[tuple[int, ...], str] = {}
    m_name: dict[tuple[int, ...], str] = {}
    y_name: dict[tuple[int, ...], str] = {}
    for rep in table.classes:
        label = _class_label(rep, election)
        if has_q:
            q_name[rep] = f"q[{label}]"
            variables.append(q_name[rep])
        if mode == "modify" or (mode == "delete" and table.count(rep) > 0):
            m_name[rep] = f"m[{label}]"
            variables.append(m_name[rep])
        y_name[rep] = f"y[{label}]"
        variables.append(y_name[rep])

    for rep in table.classes:
        n_rep = table.count(rep)
        balance = {y_name[rep]: 1}
        if rep in q_name:
            balance[q_name[rep]] = -1
        if rep in m_name:
            balance[m_name[rep]] = 1
        constraints.append(LinearConstraint(balance, "==", n_rep))
        if mode != "add":
            constraints.append(LinearConstraint({y_name[rep]: 1}, "<=", n_total))
        if rep in m_name:
            constraints.append(LinearConstraint({m_name[rep]: 1}, "<=", n_rep))

    if mode == "modify":
        conservation = {name: 1 for name in q_name.values()}
        for name in m_name.values():
            conservation[name] = conservation.get(name, 0) - 1
        constraints.append(LinearConstraint(conservation, "==", 0))

    # elimination constraints: in the round that eliminates pi[i-1], its tally
    # may not exceed the tally of any candidate surviving past it
    k = len(pi)
    feeders: dict[tuple[int, int], list[str]] = {}
    for rep in table.classes:
        for round_no in range(1, k):
            c = counts_toward(rep, pi, round_no)
            if c is not None:
                feeders.setdefault((c, round_no), []).append(y_name[rep])
    for i in range(1, k):
        victim = pi[i - 1]
        lhs = feeders.get((victim, i), [])
        for j in range(i + 1, k + 1):
            survivor = pi[j - 1]
            rhs = feeders.get((survivor, i), [])
            coeffs: dict[str, int] = {name: 1 for name in lhs}
            for name in rhs:
                coeffs[name] = coeffs.get(name, 0) - 1
            constraints.append(LinearConstraint(coeffs, "<=", 0))

    target = q_name if mode != "delete" else m_name
    for name in target.values():
        objective[name] = 1

    # Integrality is declared on the y variables only.  Once the manipulated
    # profile is integral, balance admits integral q and m at the same
    # objective (q = max(0, y - n) and m = max(0, n - y) per class, padded
    # equally on both sides in modify mode), so branching on y alone already
    # yields the exact manipulation count.
    return LPModel(
        variables=tuple(variables),
        objective=objective,
        constraints=tuple(constraints),
        integrality=frozenset(y_name.values()),
        mode=mode,
    )


@dataclass(frozen=True)
class DistanceResult:
    """Outcome of one distance evaluation.

    ``lp_optimum`` is the exact rational optimum of the continuous
    relaxation.  ``value`` is its ceiling when the evaluation is used as a
    bound, or the true integer optimum when exactness was requested.
    ``integral`` records whether the relaxation already produced an integral
    assignment.
    """

    value: int
    lp_optimum: Fraction
    integral: bool


def distance_to(
    pi: Sequence[int],
    election: Election,
    mode: str = "modify",
    exact: bool = False,
) -> DistanceResult:
    """Evaluate the distance program for ``pi``; see :func:`build_distance_lp`."""
    model = build_distance_lp(pi, election, mode)
    return _evaluate(model, exact)


def _evaluate(model: LPModel, exact: bool) -> DistanceResult:
    relaxed = solve_lp(model)
    if not relaxed.is_optimal:
        raise DistanceError(
            f"distance relaxation came back {relaxed.status}; "
            "every mode admits a trivial feasible manipulation"
        )
    integral = all(relaxed.assignment[v].denominator == 1 for v in model.integrality)
    if not exact or integral:
        value = math.ceil(relaxed.objective)
        return DistanceResult(value=value, lp_optimum=relaxed.objective, integral=integral)
    # whenever the profile variables are integral, the minimized objective is
    # a whole number of manipulated ballots, so bound sharpening is sound
    best = solve_integral(model, relaxation=relaxed, integral_objective=True)
    if not best.is_optimal:
        raise DistanceError(f"integral distance search came back {best.status}")
    assert best.objective.denominator == 1
    return DistanceResult(
        value=int(best.objective), lp_optimum=relaxed.objective, integral=False
    )


class DistanceCache:
    """Memoized distance evaluations for one election and mode.

    Search statistics count every *request*; sharing a cache between
    algorithm runs only avoids redundant arithmetic, it does not change any
    reported call count.  ``dump_dir`` writes each newly built model in LP
    text format (one file per order) for debugging.
    """

    def __init__(self, election: Election, mode: str, dump_dir=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.election = election
        self.mode = mode
        self.dump_dir = dump_dir
        self._models: dict[tuple[int, ...], LPModel] = {}
        self._results: dict[tuple[tuple[int, ...], bool], DistanceResult] = {}

    def model(self, pi: Sequence[int]) -> LPModel:
        pi = tuple(pi)
        cached = self._models.get(pi)
        if cached is None:
            cached = build_distance_lp(pi, self.election, self.mode)
            self._models[pi] = cached
            if self.dump_dir is not None:
                self._dump(pi, cached)
        return cached

    def result(self, pi: Sequence[int], exact: bool) -> DistanceResult:
        key = (tuple(pi), exact)
        cached = self._results.get(key)
        if cached is None:
            cached = _evaluate(self.model(key[0]), exact)
            self._results[key] = cached
        return cached

    def value(self, pi: Sequence[int], exact: bool) -> int:
        return self.result(pi, exact).value

    def _dump(self, pi: tuple[int, ...], model: LPModel):
        from pathlib import Path

        from .lp import format_lp

        path = Path(self.dump_dir)
        path.mkdir(parents=True, exist_ok=True)
        order = "-".join(self.election.names[c] for c in pi)
        (path / f"{self.mode}_{order}.lp").write_text(format_lp(model))
