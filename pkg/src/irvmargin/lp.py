"""Self-contained linear-program solver over exact rational arithmetic.

The solver is a bounded-variable two-phase primal simplex.  Tableau rows are
stored as integer numerator vectors with one positive denominator per row
(gcd-normalized after every pivot), so every quantity is an exact rational.
Rows live in ``numpy`` ``int64`` arrays while they fit and are promoted to
Python big-integer lists when a pivot would overflow; both representations
compute identical values, so pivot choices (and therefore results) are
bit-reproducible.

Pivot selection is Dantzig's rule with deterministic index tie-breaking,
switching to Bland's rule after an iteration threshold so cycling cannot
occur.  ``solve_integral`` adds a best-first branch-and-bound layer on
fractional variables for problems whose variables must be integral.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

Number = int | Fraction

# Promote a row to big integers before any product can reach 2**62.
_BIG_THRESHOLD = 1 << 31


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[v] * v) sense rhs`` with sense one of ``<=``, ``>=``, ``==``."""

    coeffs: Mapping[str, Number]
    sense: str
    rhs: Number

    def __post_init__(self):
        if self.sense not in ("<=", ">=", "=="):
            raise ValueError(f"unknown constraint sense {self.sense!r}")


@dataclass(frozen=True)
class LPModel:
    """A minimization program over named nonnegative variables.

    ``variables`` lists every variable (implicitly ``>= 0``); ``objective``
    maps variables to coefficients (missing means 0); ``integrality`` names
    the variables that must be integral under :func:`solve_integral`.
    ``mode`` is a free-form tag for callers (the manipulation-distance layer
    stores ``modify`` / ``add`` / ``delete`` here); the solver ignores it.
    """

    variables: tuple[str, ...]
    objective: Mapping[str, Number]
    constraints: tuple[LinearConstraint, ...]
    integrality: frozenset[str] = frozenset()
    mode: str | None = None

    def __post_init__(self):
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise ValueError("duplicate variable name")
        for v in self.objective:
            if v not in known:
                raise ValueError(f"objective references unknown variable {v!r}")
        for con in self.constraints:
            for v in con.coeffs:
                if v not in known:
                    raise ValueError(f"constraint references unknown variable {v!r}")
        unknown = self.integrality - known
        if unknown:
            raise ValueError(f"integrality references unknown variables {sorted(unknown)}")


@dataclass(frozen=True)
class SolveOutcome:
    """Exact solver result; ``objective``/``assignment`` are None unless optimal."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Fraction | None = None
    assignment: dict[str, Fraction] | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class SolverError(RuntimeError):
    """Internal invariant violation (iteration guard, inconsistent state)."""


# --------------------------------------------------------------------------
# exact row arithmetic: integer numerators plus one positive denominator
# --------------------------------------------------------------------------


class _Row:
    """One tableau row: the exact rational vector ``nums / den`` (den > 0)."""

    __slots__ = ("nums", "den", "big")

    def __init__(self, nums, den=1):
        nums = [int(v) for v in nums]
        self.den = int(den)
        self.big = any(abs(v) >= _BIG_THRESHOLD for v in nums)
        self.nums = nums if self.big else np.array(nums, dtype=np.int64)

    def value(self, j: int) -> Fraction:
        return Fraction(int(self.nums[j]), self.den)

    def sign(self, j: int) -> int:
        v = int(self.nums[j])
        return (v > 0) - (v < 0)

    def _promote(self):
        if not self.big:
            self.nums = [int(v) for v in self.nums]
            self.big = True

    def _max_abs(self) -> int:
        if self.big:
            return max((abs(v) for v in self.nums), default=0)
        return int(np.abs(self.nums).max(initial=0))

    def _negate(self):
        self.nums = [-v for v in self.nums] if self.big else -self.nums

    def _normalize(self):
        if self.big:
            g = self.den
            for v in self.nums:
                if v:
                    g = math.gcd(g, v)
                    if g == 1:
                        break
            if g > 1:
                self.nums = [v // g for v in self.nums]
                self.den //= g
            if self.den < _BIG_THRESHOLD and max(
                (abs(v) for v in self.nums), default=0
            ) < _BIG_THRESHOLD:
                self.nums = np.array(self.nums, dtype=np.int64)
                self.big = False
        else:
            # keep the denominator out of numpy: it may exceed int64 briefly
            g = math.gcd(int(np.gcd.reduce(np.abs(self.nums))), self.den)
            if g > 1:
                self.nums //= g
                self.den //= g

    def scale_to_unit(self, j: int):
        """Divide the row by its own entry at ``j`` (the pivot entry)."""
        p = int(self.nums[j])
        if p == 0:
            raise SolverError("pivot on zero entry")
        if p < 0:
            self._negate()
            p = -p
        self.den = p
        self._normalize()

    def eliminate(self, j: int, pivot_row: "_Row"):
        """Subtract the right multiple of ``pivot_row`` to zero entry ``j``.

        ``pivot_row`` must have a nonzero entry at ``j``.  The row denominator
        stays positive and the result is gcd-normalized.
        """
        a = int(self.nums[j])
        if a == 0:
            return
        p = int(pivot_row.nums[j])
        if p == 0:
            raise SolverError("pivot row has zero pivot entry")
        if not self.big and not pivot_row.big:
            bound = self._max_abs() * abs(p) + abs(a) * pivot_row._max_abs()
            if bound < (1 << 62):
                self.nums = self.nums * np.int64(p) - np.int64(a) * pivot_row.nums
            else:
                self._promote()
        if self.big or pivot_row.big:
            self._promote()
            pn = pivot_row.nums if pivot_row.big else [int(v) for v in pivot_row.nums]
            self.nums = [v * p - a * w for v, w in zip(self.nums, pn)]
        if p > 0:
            self.den *= p
        else:
            self.den *= -p
            self._negate()
        self._normalize()


# --------------------------------------------------------------------------
# standard-form construction
# --------------------------------------------------------------------------


def _as_fraction(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class _Prepared:
    """Equality-form problem with per-variable boxes, ready for the simplex."""

    columns: list[str]  # structural then slack variable names, tableau order
    n_named: int  # how many of the columns are model variables
    lows: list[Fraction]
    uppers: list[Fraction | None]
    rows: list[dict[int, Fraction]]
    rhs: list[Fraction]
    fixed: dict[str, Fraction]
    infeasible: bool = False


_INFEASIBLE_PREP = _Prepared([], 0, [], [], [], [], {}, infeasible=True)


def _prepare(
    model: LPModel,
    extra_bounds: Mapping[str, tuple[Fraction, Fraction | None]] | None,
) -> _Prepared:
    lows = {v: Fraction(0) for v in model.variables}
    uppers: dict[str, Fraction | None] = {v: None for v in model.variables}

    def tighten(v: str, lo: Fraction | None, hi: Fraction | None):
        if lo is not None and lo > lows[v]:
            lows[v] = lo
        if hi is not None and (uppers[v] is None or hi < uppers[v]):
            uppers[v] = hi

    kept: list[tuple[dict[str, Fraction], str, Fraction]] = []
    for con in model.constraints:
        coeffs = {v: _as_fraction(c) for v, c in con.coeffs.items() if c != 0}
        rhs = _as_fraction(con.rhs)
        if len(coeffs) == 1 and con.sense != "==":
            # a single-variable inequality is really a bound
            ((v, a),) = coeffs.items()
            bound = rhs / a
            if (con.sense == "<=") == (a > 0):
                tighten(v, None, bound)
            else:
                tighten(v, bound, None)
            continue
        if not coeffs:
            ok = {"<=": rhs >= 0, ">=": rhs <= 0, "==": rhs == 0}[con.sense]
            if not ok:
                return _INFEASIBLE_PREP
            continue
        kept.append((coeffs, con.sense, rhs))

    if extra_bounds:
        for v, (lo, hi) in extra_bounds.items():
            tighten(v, lo, hi)

    fixed: dict[str, Fraction] = {}
    for v in model.variables:
        hi = uppers[v]
        if hi is not None:
            if hi < lows[v]:
                return _INFEASIBLE_PREP
            if hi == lows[v]:
                fixed[v] = lows[v]

    names = [v for v in model.variables if v not in fixed]
    index = {v: i for i, v in enumerate(names)}
    n_named = len(names)
    col_lows = [lows[v] for v in names]
    col_uppers = [None if uppers[v] is None else uppers[v] - lows[v] for v in names]

    rows: list[dict[int, Fraction]] = []
    rhs_out: list[Fraction] = []
    for coeffs, sense, rhs in kept:
        row: dict[int, Fraction] = {}
        adj = rhs
        for v, a in coeffs.items():
            if v in fixed:
                adj -= a * fixed[v]
            else:
                adj -= a * lows[v]  # shift x = low + x'
                row[index[v]] = a
        if not row:
            ok = {"<=": adj >= 0, ">=": adj <= 0, "==": adj == 0}[sense]
            if not ok:
                return _INFEASIBLE_PREP
            continue
        if sense != "==":
            j = len(names)
            names.append(f"_slack{j}")
            col_lows.append(Fraction(0))
            col_uppers.append(None)
            row[j] = Fraction(1) if sense == "<=" else Fraction(-1)
        rows.append(row)
        rhs_out.append(adj)

    return _Prepared(names, n_named, col_lows, col_uppers, rows, rhs_out, fixed)


# --------------------------------------------------------------------------
# the simplex itself
# --------------------------------------------------------------------------

_LOWER, _UPPER, _BASIC = 0, 1, 2


class _Simplex:
    def __init__(self, prep: _Prepared, objective: Mapping[str, Number]):
        self.prep = prep
        m = len(prep.rows)
        self.n_real = len(prep.columns)
        self.n = self.n_real + m  # one artificial per row
        self.uppers: list[Fraction | None] = list(prep.uppers) + [None] * m

        self.rows: list[_Row] = []
        self.basis: list[int] = []
        self.vals: list[Fraction] = []
        self.status = [_LOWER] * self.n
        self.row_of = [-1] * self.n  # basic variable -> its row

        cost1 = [0] * self.n
        for i, (row, rhs) in enumerate(zip(prep.rows, prep.rhs)):
            den = math.lcm(rhs.denominator, *(a.denominator for a in row.values()))
            nums = [0] * self.n
            for j, a in row.items():
                nums[j] = int(a * den)
            art = self.n_real + i
            nums[art] = den if rhs >= 0 else -den
            r = _Row(nums, den)
            if rhs < 0:
                r._negate()  # the artificial ends up with coefficient +1 either way
            self.rows.append(r)
            self.basis.append(art)
            self.status[art] = _BASIC
            self.row_of[art] = i
            self.vals.append(abs(rhs))
            cost1[art] = 1

        # price the artificial basis out of the phase-1 objective
        self.c1 = _Row(cost1, 1)
        for i, r in enumerate(self.rows):
            self.c1.eliminate(self.basis[i], r)

        self.c2: _Row | None = None
        self.objective = objective
        self.pivots = 0
        self.bland_after = 200 + 40 * (m + self.n)
        self.hard_cap = 500_000 + 1_000 * (m + self.n)

    # -- pivot machinery ----------------------------------------------------

    def _entering(self, cost: _Row) -> int | None:
        bland = self.pivots >= self.bland_after
        limit = self.n_real if self.c2 is not None else self.n
        best, best_mag = None, 0
        for j in range(limit):
            st = self.status[j]
            if st == _BASIC:
                continue
            u = self.uppers[j]
            if u is not None and u == 0:
                continue  # fixed at zero, moving it achieves nothing
            s = cost.sign(j)
            if not ((st == _LOWER and s < 0) or (st == _UPPER and s > 0)):
                continue
            if bland:
                return j
            mag = abs(int(cost.nums[j]))
            if mag > best_mag:
                best, best_mag = j, mag
        return best

    def _ratio_test(self, j: int):
        """Largest step for entering ``j``: (t, blocking kind, blocking row)."""
        d = 1 if self.status[j] == _LOWER else -1
        bland = self.pivots >= self.bland_after
        best_t: Fraction | None = self.uppers[j]
        best_kind = "flip"
        best_row = -1
        for i, r in enumerate(self.rows):
            if r.nums[j] == 0:  # cheap integer test before Fraction math
                continue
            a = r.value(j)
            da = d * a
            if da > 0:
                t = self.vals[i] / da
                kind = "lower"
            else:
                ub = self.uppers[self.basis[i]]
                if ub is None:
                    continue
                t = (ub - self.vals[i]) / (-da)
                kind = "upper"
            if best_t is None or t < best_t:
                best_t, best_kind, best_row = t, kind, i
            elif t == best_t and best_kind != "flip" and bland:
                if self.basis[i] < self.basis[best_row]:
                    best_kind, best_row = kind, i
        if best_t is None:
            return None, "none", -1
        return best_t, best_kind, best_row

    def _apply_move(self, j: int, t: Fraction):
        if t == 0:
            return
        d = 1 if self.status[j] == _LOWER else -1
        for i, r in enumerate(self.rows):
            if r.nums[j] != 0:
                self.vals[i] -= d * r.value(j) * t

    def _pivot(self, j: int, row: int, t: Fraction, leave_kind: str):
        leaving = self.basis[row]
        entering_value = t if self.status[j] == _LOWER else self.uppers[j] - t
        self._apply_move(j, t)
        self.status[leaving] = _LOWER if leave_kind == "lower" else _UPPER
        self.row_of[leaving] = -1
        self.status[j] = _BASIC
        self.basis[row] = j
        self.row_of[j] = row
        self.vals[row] = entering_value
        pivot_row = self.rows[row]
        pivot_row.scale_to_unit(j)
        for i, r in enumerate(self.rows):
            if i != row:
                r.eliminate(j, pivot_row)
        self.c1.eliminate(j, pivot_row)
        if self.c2 is not None:
            self.c2.eliminate(j, pivot_row)
        self.pivots += 1

    def _flip(self, j: int):
        self._apply_move(j, self.uppers[j])
        self.status[j] = _UPPER if self.status[j] == _LOWER else _LOWER
        self.pivots += 1

    def _loop(self, cost: _Row) -> str:
        while True:
            if self.pivots > self.hard_cap:
                raise SolverError("simplex iteration guard tripped")
            j = self._entering(cost)
            if j is None:
                return "optimal"
            t, kind, row = self._ratio_test(j)
            if kind == "none":
                return "unbounded"
            if kind == "flip":
                self._flip(j)
            else:
                self._pivot(j, row, t, kind)

    # -- public driver -------------------------------------------------------

    def solve(self) -> SolveOutcome:
        if self._loop(self.c1) != "optimal":
            raise SolverError("phase 1 is bounded below yet reported unbounded")
        infeasibility = sum(
            (self.vals[i] for i in range(len(self.rows)) if self.basis[i] >= self.n_real),
            Fraction(0),
        )
        if infeasibility > 0:
            return SolveOutcome("infeasible")
        # Artificials are pinned at zero from here on: nonbasic ones may not
        # enter again, and a basic one (degenerate row) blocks any pivot that
        # would lift it, forcing it out at value zero instead.
        for j in range(self.n_real, self.n):
            self.uppers[j] = Fraction(0)

        index = {v: i for i, v in enumerate(self.prep.columns[: self.prep.n_named])}
        coeffs = {
            index[v]: _as_fraction(c)
            for v, c in self.objective.items()
            if v in index and c != 0
        }
        den = math.lcm(*(c.denominator for c in coeffs.values())) if coeffs else 1
        cost2 = [0] * self.n
        for j, c in coeffs.items():
            cost2[j] = int(c * den)
        self.c2 = _Row(cost2, den)
        for i, r in enumerate(self.rows):
            self.c2.eliminate(self.basis[i], r)

        if self._loop(self.c2) == "unbounded":
            return SolveOutcome("unbounded")

        values = dict(self.prep.fixed)
        for j in range(self.prep.n_named):
            if self.status[j] == _UPPER:
                x = self.uppers[j]
            elif self.status[j] == _BASIC:
                x = self.vals[self.row_of[j]]
            else:
                x = Fraction(0)
            values[self.prep.columns[j]] = x + self.prep.lows[j]
        return SolveOutcome("optimal", assignment=values)


def _finish(model: LPModel, outcome: SolveOutcome) -> SolveOutcome:
    if not outcome.is_optimal:
        return outcome
    assignment = {v: outcome.assignment.get(v, Fraction(0)) for v in model.variables}
    obj = sum(
        (_as_fraction(c) * assignment[v] for v, c in model.objective.items()),
        Fraction(0),
    )
    return SolveOutcome("optimal", objective=obj, assignment=assignment)


def solve_lp(
    model: LPModel,
    bounds: Mapping[str, tuple[Fraction, Fraction | None]] | None = None,
) -> SolveOutcome:
    """Exact optimum of the continuous relaxation of ``model``.

    ``bounds`` optionally tightens per-variable boxes (the branch-and-bound
    layer uses this); keys are variable names, values ``(low, high)`` with
    ``high=None`` meaning unbounded above.
    """
    prep = _prepare(model, bounds)
    if prep.infeasible:
        return SolveOutcome("infeasible")
    if not prep.rows:
        # pure box: put each variable at the cheaper end
        values = dict(prep.fixed)
        for j in range(prep.n_named):
            v = prep.columns[j]
            c = _as_fraction(model.objective.get(v, 0))
            if c >= 0:
                values[v] = prep.lows[j]
            elif prep.uppers[j] is not None:
                values[v] = prep.uppers[j] + prep.lows[j]
            else:
                return SolveOutcome("unbounded")
        return _finish(model, SolveOutcome("optimal", assignment=values))
    return _finish(model, _Simplex(prep, model.objective).solve())


def _is_int(x: Fraction) -> bool:
    return x.denominator == 1


_NODE_CAP = 100_000


def solve_integral(
    model: LPModel,
    bounds: Mapping[str, tuple[Fraction, Fraction | None]] | None = None,
    relaxation: SolveOutcome | None = None,
    integral_objective: bool | None = None,
) -> SolveOutcome:
    """Exact optimum with every variable in ``model.integrality`` integral.

    Branch and bound, preceded by a rounding dive that hunts for an early
    incumbent: nodes are ordered by their relaxation bound (depth breaking
    ties) and branching splits the box of a fractional integral variable.
    When the objective is integer-valued at integral points, node bounds are
    rounded up before pruning and the search stops as soon as an incumbent
    meets the rounded root bound.  Callers whose model guarantees an
    integer-valued objective beyond what the declared integrality implies can
    force this with ``integral_objective=True``.  ``relaxation`` may pass in
    an already-solved root relaxation.
    """
    int_vars = sorted(model.integrality)
    if not int_vars:
        return solve_lp(model, bounds)

    if integral_objective is None:
        integral_objective = all(
            v in model.integrality and _as_fraction(c).denominator == 1
            for v, c in model.objective.items()
            if c != 0
        )

    def sharpen(bound: Fraction) -> Fraction:
        return Fraction(math.ceil(bound)) if integral_objective else bound

    def fractional_vars(outcome: SolveOutcome) -> list[str]:
        return [v for v in int_vars if not _is_int(outcome.assignment[v])]

    def dive(start_box: dict, start: SolveOutcome) -> SolveOutcome | None:
        """Greedy incumbent hunt: round the worst variable, refix, repeat."""
        box = dict(start_box)
        outcome = start
        for _ in range(len(int_vars) + 4):
            todo = fractional_vars(outcome)
            if not todo:
                return outcome

            def distance_to_int(u: str) -> Fraction:
                f = outcome.assignment[u] - math.floor(outcome.assignment[u])
                return min(f, 1 - f)

            v = min(todo, key=distance_to_int)  # nearest-to-integer first
            x = outcome.assignment[v]
            near = Fraction(math.floor(x) if x - math.floor(x) < Fraction(1, 2) else math.ceil(x))
            far = Fraction(math.floor(x) + math.ceil(x)) - near
            lo, hi = box.get(v, (Fraction(0), None))
            trial = None
            for candidate in (near, far):
                if candidate < lo or (hi is not None and candidate > hi):
                    continue
                attempt = solve_lp(model, {**box, v: (candidate, candidate)})
                if attempt.is_optimal:
                    trial = attempt
                    box[v] = (candidate, candidate)
                    break
            if trial is None:
                return None
            outcome = trial
        return None

    root = dict(bounds) if bounds else {}
    first = relaxation if relaxation is not None else solve_lp(model, root)
    if not first.is_optimal:
        return first
    floor_bound = sharpen(first.objective)

    best: SolveOutcome | None = None
    if fractional_vars(first):
        incumbent = dive(root, first)
        if incumbent is not None:
            best = incumbent
            if best.objective == floor_bound:
                return best
    heap = [(first.objective, 0, 0, root, first)]
    pushed = 0
    expanded = 0
    while heap:
        bound, _, _, box, relaxed = heapq.heappop(heap)
        if best is not None and sharpen(bound) >= best.objective:
            continue
        expanded += 1
        if expanded > _NODE_CAP:
            raise SolverError("branch-and-bound node guard tripped")
        branch_var = None
        branch_score = Fraction(-1)
        for v in int_vars:
            x = relaxed.assignment[v]
            if not _is_int(x):
                score = min(x - math.floor(x), math.ceil(x) - x)
                if score > branch_score:
                    branch_score, branch_var = score, v
        if branch_var is None:
            if best is None or relaxed.objective < best.objective:
                best = relaxed
                if best.objective == floor_bound:
                    return best  # no integral point can beat the root bound
            continue
        x = relaxed.assignment[branch_var]
        lo, hi = box.get(branch_var, (Fraction(0), None))
        depth = len(box)
        for child_box in (
            {**box, branch_var: (lo, Fraction(math.floor(x)))},
            {**box, branch_var: (Fraction(math.ceil(x)), hi)},
        ):
            child = solve_lp(model, child_box)
            if not child.is_optimal:
                continue
            if best is not None and sharpen(child.objective) >= best.objective:
                continue
            pushed += 1
            heapq.heappush(heap, (child.objective, -depth, pushed, child_box, child))
    if best is None:
        return SolveOutcome("infeasible")
    return best


def format_lp(model: LPModel) -> str:
    """Render the model in CPLEX LP text format (for debugging dumps)."""

    def term(c: Number, v: str) -> str:
        c = _as_fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coeff = "" if mag == 1 else f"{mag} "
        return f"{sign} {coeff}{v}"

    def expr(coeffs: Mapping[str, Number]) -> str:
        parts = [term(c, v) for v, c in coeffs.items() if c != 0]
        if not parts:
            return "0"
        joined = " ".join(parts)
        return joined[2:] if joined.startswith("+ ") else joined

    lines = ["Minimize", f" obj: {expr(model.objective)}", "Subject To"]
    sense_text = {"<=": "<=", ">=": ">=", "==": "="}
    for i, con in enumerate(model.constraints, start=1):
        lines.append(f" c{i}: {expr(con.coeffs)} {sense_text[con.sense]} {_as_fraction(con.rhs)}")
    if model.integrality:
        lines.append("General")
        lines.append(" " + " ".join(sorted(model.integrality)))
    lines.append("End")
    return "\n".join(lines) + "\n"
