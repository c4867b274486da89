"""Exact linear programming over rationals.

A deterministic two-phase primal simplex with Bland's pivot rule, running
entirely on exact rationals in a sparse (dict-of-rows) tableau.  Identical
inputs produce identical pivot sequences and identical solutions; there is
no floating point and no tolerance anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .rational import ONE, Rat, rat

LE = "<="
GE = ">="
EQ = "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """Maximize ``objective . x`` subject to linear constraints.

    Variables are indexed 0..n_vars-1 and nonnegative unless listed in
    ``free``.  Each constraint is (coefficients, sense, rhs) with sense one
    of "<=", ">=", "==".
    """

    n_vars: int
    objective: dict[int, Rat]
    constraints: list[tuple[dict[int, Rat], str, Rat]]
    free: frozenset[int] = frozenset()

    def check(self) -> None:
        for j in self.objective:
            if not 0 <= j < self.n_vars:
                raise InputError(f"objective refers to unknown variable {j}")
        for coeffs, sense, _ in self.constraints:
            if sense not in (LE, GE, EQ):
                raise InputError(f"bad constraint sense {sense!r}")
            for j in coeffs:
                if not 0 <= j < self.n_vars:
                    raise InputError(f"constraint refers to unknown variable {j}")


@dataclass
class LPResult:
    status: str
    value: Rat | None = None
    solution: list[Rat] | None = None


_ZERO = rat(0)


class _Tableau:
    """Sparse simplex tableau: rows as dicts.

    For wide tableaus a column occurrence index avoids scanning every row
    per pivot; for small ones plain scans are cheaper than maintaining it.
    """

    INDEX_THRESHOLD = 400

    def __init__(self, n_cols: int):
        self.n_cols = n_cols
        self.rows: list[dict[int, Rat]] = []
        self.rhs: list[Rat] = []
        self.basis: list[int] = []
        self.cols: dict[int, set[int]] | None = None
        self.z: dict[int, Rat] = {}  # reduced costs of a maximization objective
        self.z_value = _ZERO

    def add_row(self, coeffs: dict[int, Rat], rhs: Rat, basic: int) -> None:
        self.rows.append(coeffs)
        self.rhs.append(rhs)
        self.basis.append(basic)

    def freeze(self) -> None:
        if len(self.rows) > self.INDEX_THRESHOLD:
            cols: dict[int, set[int]] = {}
            for r, row in enumerate(self.rows):
                for j in row:
                    cols.setdefault(j, set()).add(r)
            self.cols = cols

    def _rows_with(self, j: int):
        if self.cols is not None:
            return list(self.cols.get(j, ()))
        rows = self.rows
        return [r for r in range(len(rows)) if j in rows[r]]

    def pivot(self, r: int, j: int) -> None:
        rows = self.rows
        row = rows[r]
        piv = row[j]
        if piv != 1:
            inv = ONE / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        cols = self.cols
        items = list(row.items())
        for i in self._rows_with(j):
            if i == r:
                continue
            other = rows[i]
            f = other[j]
            if not f:
                continue
            for k, v in items:
                nv = other.get(k, _ZERO) - f * v
                if nv:
                    if cols is not None and k not in other:
                        cols.setdefault(k, set()).add(i)
                    other[k] = nv
                elif k in other:
                    del other[k]
                    if cols is not None:
                        cols[k].discard(i)
            self.rhs[i] -= f * self.rhs[r]
        f = self.z.get(j)
        if f:
            z = self.z
            for k, v in items:
                nv = z.get(k, _ZERO) - f * v
                if nv:
                    z[k] = nv
                else:
                    z.pop(k, None)
            # Objective gain of this pivot: reduced cost times step length.
            self.z_value += f * self.rhs[r]
        self.basis[r] = j

    def bland_step(self, allowed) -> str:
        entering = None
        for j, d in self.z.items():
            if d > 0 and allowed(j) and (entering is None or j < entering):
                entering = j
        if entering is None:
            return OPTIMAL
        best = None  # (ratio, basis var, row)
        rhs = self.rhs
        rows = self.rows
        basis = self.basis
        for r in self._rows_with(entering):
            a = rows[r][entering]
            if a > 0:
                key = (rhs[r] / a, basis[r], r)
                if best is None or key < best:
                    best = key
        if best is None:
            return UNBOUNDED
        self.pivot(best[2], entering)
        return "pivoted"

    def run(self, allowed=lambda j: True, stop_above: Rat | None = None) -> str:
        while True:
            if stop_above is not None and self.z_value > stop_above:
                # The maximization objective only grows, so the optimum
                # certainly exceeds the threshold; caller needs no more.
                return OPTIMAL
            outcome = self.bland_step(allowed)
            if outcome != "pivoted":
                return outcome


def lp_solve(lp: LinearProgram) -> LPResult:
    """Exact optimum of ``lp`` (deterministic Bland pivots)."""
    return _solve(lp)


def _solve(
    lp: LinearProgram,
    stop_above: Rat | None = None,
    basis: list[int | None] | None = None,
) -> LPResult:
    """Core solve.  ``basis`` optionally names, per constraint, a variable
    column forming a feasible triangular starting basis (None = the row's
    slack); rows are pivoted in the given order and phase 1 is skipped.
    The caller is responsible for feasibility, which is verified."""
    lp.check()

    # Column layout: positive parts, negative parts of free variables,
    # then slacks/surpluses, then artificials.
    pos = list(range(lp.n_vars))
    neg: dict[int, int] = {}
    next_col = lp.n_vars
    for j in sorted(lp.free):
        neg[j] = next_col
        next_col += 1

    rows: list[dict[int, Rat]] = []
    rhs: list[Rat] = []
    senses: list[str] = []
    for coeffs, sense, b in lp.constraints:
        row: dict[int, Rat] = {}
        for j, v in coeffs.items():
            if not v:
                continue
            row[pos[j]] = row.get(pos[j], _ZERO) + v
            if j in neg:
                row[neg[j]] = row.get(neg[j], _ZERO) - v
        if b < 0:
            row = {k: -v for k, v in row.items()}
            b = -b
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        rows.append({k: v for k, v in row.items() if v})
        rhs.append(b)
        senses.append(sense)

    t = _Tableau(next_col)
    slack_of: dict[int, int] = {}
    for i, sense in enumerate(senses):
        if sense == LE:
            rows[i][next_col] = ONE
            slack_of[i] = next_col
            next_col += 1
        elif sense == GE:
            rows[i][next_col] = -ONE
            next_col += 1

    artificials: set[int] = set()
    if basis is not None:
        if len(basis) != len(rows):
            raise InputError("basis hint must name one column per constraint")
        for i, hint in enumerate(basis):
            if hint is None:
                if i not in slack_of:
                    raise InputError("slack basis hint on a non-<= row")
                basic = slack_of[i]
            else:
                basic = pos[hint]
            t.add_row(rows[i], rhs[i], basic)
        t.n_cols = next_col
        t.freeze()
        slack_cols = set(slack_of.values())
        for r in range(len(t.basis)):
            b = t.basis[r]
            if b in slack_cols:
                continue  # identity by construction: pivot rows carry no slacks
            if not t.rows[r].get(b):
                raise AssertionError("basis hint is not triangular")
            t.pivot(r, b)
        if any(v < 0 for v in t.rhs):
            raise AssertionError("basis hint is not primal feasible")
    else:
        for i, sense in enumerate(senses):
            if sense == LE:
                basic = slack_of[i]
            else:
                rows[i][next_col] = ONE
                basic = next_col
                artificials.add(next_col)
                next_col += 1
            t.add_row(rows[i], rhs[i], basic)
        t.n_cols = next_col
        t.freeze()

    if artificials:
        # Phase 1: maximize -(sum of artificials); price out artificial basics.
        z: dict[int, Rat] = {}
        z_val = _ZERO
        for r, b in enumerate(t.basis):
            if b in artificials:
                for k, v in t.rows[r].items():
                    z[k] = z.get(k, _ZERO) + v
                z_val += t.rhs[r]
        for a in artificials:
            z.pop(a, None)
        t.z = {k: v for k, v in z.items() if v}
        t.z_value = -z_val
        status = t.run(allowed=lambda j: j not in artificials)
        if status == UNBOUNDED:
            raise AssertionError("phase 1 cannot be unbounded")
        if t.z_value != 0:
            return LPResult(status=INFEASIBLE)
        # Drive leftover artificials out of the basis (degenerate rows).
        for r in range(len(t.basis)):
            if t.basis[r] in artificials:
                pivot_col = None
                for k in t.rows[r]:
                    if k not in artificials and (pivot_col is None or k < pivot_col):
                        pivot_col = k
                if pivot_col is not None:
                    t.pivot(r, pivot_col)
        # Remove artificial columns entirely.
        for a in artificials:
            for r in t._rows_with(a):
                del t.rows[r][a]
            if t.cols is not None:
                t.cols.pop(a, None)

    live_rows = [r for r in range(len(t.basis)) if t.basis[r] not in artificials]
    if len(live_rows) != len(t.basis):
        # Redundant equalities: their rows are all-zero; keep but inert.
        for r in range(len(t.basis)):
            if t.basis[r] in artificials and t.rows[r]:
                raise AssertionError("artificial stuck in a nonzero row")

    # Phase 2: real objective, priced out against the current basis.
    z2: dict[int, Rat] = {}
    z2_val = _ZERO
    cost: dict[int, Rat] = {}
    for j, c in lp.objective.items():
        if not c:
            continue
        cost[pos[j]] = cost.get(pos[j], _ZERO) + c
        if j in neg:
            cost[neg[j]] = cost.get(neg[j], _ZERO) - c
    z2.update(cost)
    for r, b in enumerate(t.basis):
        if b in artificials:
            continue
        cb = cost.get(b)
        if cb:
            for k, v in t.rows[r].items():
                nv = z2.get(k, _ZERO) - cb * v
                if nv:
                    z2[k] = nv
                else:
                    z2.pop(k, None)
            z2_val += cb * t.rhs[r]
    for b in t.basis:
        z2.pop(b, None)
    t.z = z2
    t.z_value = z2_val

    status = t.run(allowed=lambda j: j not in artificials, stop_above=stop_above)
    if status == UNBOUNDED:
        return LPResult(status=UNBOUNDED)

    values: dict[int, Rat] = {}
    for r, b in enumerate(t.basis):
        values[b] = t.rhs[r]
    solution = []
    for j in range(lp.n_vars):
        v = values.get(pos[j], _ZERO)
        if j in neg:
            v -= values.get(neg[j], _ZERO)
        solution.append(v)
    return LPResult(status=OPTIMAL, value=t.z_value, solution=solution)
