"""Exact rational simplex for LP relaxations of bounded integer programs.

Two-phase primal simplex over exact rationals; no floating point touches
any feasibility or optimality decision.  Variables carry finite bounds and
may sit nonbasic at either bound, so bound rows never enter the tableau.

Pivot selection is Dantzig's rule, switching to Bland's rule permanently
after a long degenerate streak to guarantee termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a normal install
    from fractions import Fraction as Q

LE, GE, EQ = "<=", ">=", "="

_DEGENERATE_STREAK_LIMIT = 200


class SimplexError(Exception):
    """Internal simplex failure (iteration cap, unexpected unboundedness)."""


def frac_ceil(q) -> int:
    n, d = q.numerator, q.denominator
    return -((-n) // d)


def frac_floor(q) -> int:
    return q.numerator // q.denominator


def is_integral(q) -> bool:
    return q.denominator == 1


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible"
    objective: Optional[object] = None  # exact rational
    x: Optional[List[object]] = None  # exact rationals, one per variable


def solve_lp(
    objective: Sequence[Tuple[int, int]],
    rows: Sequence[Tuple[Sequence[Tuple[int, int]], str, int]],
    bounds: Sequence[Tuple[int, int]],
) -> LpSolution:
    """Minimize ``sum(c_i x_i)`` subject to linear rows and finite bounds.

    ``objective``: (variable index, coefficient) pairs.
    ``rows``: (coeff pairs, sense, rhs) triples.
    ``bounds``: inclusive (lower, upper) per variable, all finite.
    """
    n = len(bounds)
    lo = [b[0] for b in bounds]
    hi = [b[1] for b in bounds]
    if any(l > h for l, h in bounds):
        return LpSolution("infeasible")

    # shift x = lo + z with z in [0, u]; drop fixed (u == 0) variables
    active = [i for i in range(n) if hi[i] > lo[i]]
    col_of = {i: k for k, i in enumerate(active)}
    u = [hi[i] - lo[i] for i in active]

    obj_const = 0
    c = [Q(0)] * len(active)
    for i, coeff in objective:
        obj_const += coeff * lo[i]
        if i in col_of:
            c[col_of[i]] += coeff

    shifted = []
    for coeffs, sense, rhs in rows:
        row = [Q(0)] * len(active)
        shift = 0
        nonzero = False
        for i, coeff in coeffs:
            shift += coeff * lo[i]
            if i in col_of:
                row[col_of[i]] += coeff
                nonzero = nonzero or coeff != 0
        b = rhs - shift
        if not nonzero or all(v == 0 for v in row):
            ok = (
                (sense == LE and b >= 0)
                or (sense == GE and b <= 0)
                or (sense == EQ and b == 0)
            )
            if not ok:
                return LpSolution("infeasible")
            continue
        shifted.append((row, sense, b))

    if not active:
        return LpSolution("optimal", Q(obj_const), [Q(v) for v in lo])
    if not shifted:
        # box problem: each variable sits at the bound its cost favours
        z = [Q(u[k]) if c[k] < 0 else Q(0) for k in range(len(active))]
        return _finish(z, active, lo, n, c, obj_const)

    return _Simplex(shifted, c, u).run(active, lo, n, obj_const)


def _finish(z, active, lo, n, c, obj_const) -> LpSolution:
    x = [Q(v) for v in lo]
    value = Q(obj_const)
    for k, i in enumerate(active):
        x[i] = lo[i] + z[k]
        value += c[k] * z[k]
    return LpSolution("optimal", value, x)


class _Simplex:
    """Bounded-variable two-phase tableau simplex in z-space (lowers at 0)."""

    def __init__(self, shifted_rows, c, u):
        self.n_struct = len(u)
        self.c = c
        rows = []
        for row, sense, b in shifted_rows:
            if sense == GE:
                row, sense, b = [-v for v in row], LE, -b
            if sense == LE and b < 0:
                rows.append((row, "surplus", b))  # flipped during build
            elif sense == LE:
                rows.append((row, "slack", b))
            else:
                rows.append((row, "artificial", b))
        self.m = len(rows)

        ncols = self.n_struct
        for _, kind, _ in rows:
            ncols += 2 if kind == "surplus" else 1
        self.ncols = ncols

        self.ub: List[Optional[object]] = [Q(v) for v in u] + [None] * (
            ncols - self.n_struct
        )
        self.is_art = [False] * ncols
        self.tableau: List[List] = []
        self.basis: List[int] = []
        self.xb: List = []
        col = self.n_struct
        for row, kind, b in rows:
            if kind == "surplus":
                row, b = [-v for v in row], -b
            elif kind == "artificial" and b < 0:
                row, b = [-v for v in row], -b
            aug = [Q(v) for v in row] + [Q(0)] * (ncols - self.n_struct)
            if kind == "slack":
                aug[col] = Q(1)
                self.basis.append(col)
                col += 1
            elif kind == "surplus":
                aug[col] = Q(-1)
                aug[col + 1] = Q(1)
                self.is_art[col + 1] = True
                self.basis.append(col + 1)
                col += 2
            else:
                aug[col] = Q(1)
                self.is_art[col] = True
                self.basis.append(col)
                col += 1
            self.tableau.append(aug)
            self.xb.append(Q(b))
        self.at_upper = [False] * ncols
        self.in_basis = set(self.basis)

    def run(self, active, lo, n, obj_const) -> LpSolution:
        # phase 1: minimize the artificial total
        c1 = [Q(1) if a else Q(0) for a in self.is_art]
        rc = self._reduced_costs(c1)
        self._pivot_loop(rc, banned=None)
        if any(
            self.is_art[self.basis[r]] and self.xb[r] != 0
            for r in range(self.m)
        ):
            return LpSolution("infeasible")

        # pin artificials at zero and try to drive them out of the basis
        for j in range(self.ncols):
            if self.is_art[j]:
                self.ub[j] = Q(0)
        for r in range(self.m):
            if self.is_art[self.basis[r]]:
                pivot_col = next(
                    (
                        j
                        for j in range(self.ncols)
                        if not self.is_art[j] and self.tableau[r][j] != 0
                    ),
                    None,
                )
                if pivot_col is not None:
                    out = self.basis[r]
                    self.in_basis.discard(out)
                    self.at_upper[out] = False
                    # degenerate swap: the point does not move, so the new
                    # basic keeps the value it had while nonbasic
                    enter_val = (
                        self.ub[pivot_col]
                        if self.at_upper[pivot_col]
                        else Q(0)
                    )
                    self._pivot(r, pivot_col)
                    self.xb[r] = enter_val
                    self.in_basis.add(pivot_col)
                    self.at_upper[pivot_col] = False
                # else: redundant row; its entries vanish outside artificials

        # phase 2
        c2 = [Q(0)] * self.ncols
        for k in range(self.n_struct):
            c2[k] = Q(self.c[k])
        rc = self._reduced_costs(c2)
        self._pivot_loop(rc, banned=self.is_art)

        z = [Q(0)] * self.n_struct
        for j in range(self.n_struct):
            if self.at_upper[j]:
                z[j] = self.ub[j]
        for r in range(self.m):
            if self.basis[r] < self.n_struct:
                z[self.basis[r]] = self.xb[r]
        return _finish(z, active, lo, n, self.c, obj_const)

    def _reduced_costs(self, cost):
        rc = list(cost)
        for r, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb != 0:
                row = self.tableau[r]
                for j in range(self.ncols):
                    if row[j] != 0:
                        rc[j] -= cb * row[j]
        return rc

    def _pivot(self, r, j):
        """Row-reduce so column j becomes basic in row r (tableau only)."""
        tableau = self.tableau
        piv = tableau[r][j]
        if piv != 1:
            inv = 1 / Q(piv)
            tableau[r] = [v * inv for v in tableau[r]]
        row_r = tableau[r]
        for rr in range(self.m):
            if rr == r:
                continue
            factor = tableau[rr][j]
            if factor != 0:
                tableau[rr] = [
                    a - factor * b for a, b in zip(tableau[rr], row_r)
                ]
        self.basis[r] = j

    def _pivot_loop(self, rc, banned):
        tableau, basis, xb = self.tableau, self.basis, self.xb
        ub, at_upper, in_basis = self.ub, self.at_upper, self.in_basis
        use_bland = False
        degenerate_streak = 0
        iteration = 0
        max_iterations = 2000 + 200 * (self.m + self.ncols)

        while True:
            iteration += 1
            if iteration > max_iterations:
                raise SimplexError("iteration cap exceeded")

            entering = None
            best = Q(0)
            for j in range(self.ncols):
                if j in in_basis or (banned is not None and banned[j]):
                    continue
                score = rc[j] if at_upper[j] else -rc[j]
                if score > 0:
                    if use_bland:
                        entering = j
                        break
                    if score > best:
                        best = score
                        entering = j
            if entering is None:
                return

            from_upper = at_upper[entering]
            delta = -1 if from_upper else 1
            col = [tableau[r][entering] for r in range(self.m)]

            t = ub[entering]  # step capped by a bound flip; may be None
            leaving_row = None
            leaving_to_upper = False
            for r in range(self.m):
                d = delta * col[r]
                if d > 0:
                    cap = xb[r] / d
                    to_upper = False
                elif d < 0:
                    bound = ub[basis[r]]
                    if bound is None:
                        continue
                    cap = (bound - xb[r]) / (-d)
                    to_upper = True
                else:
                    continue
                better = (
                    t is None
                    or cap < t
                    or (
                        cap == t
                        and leaving_row is not None
                        and basis[r] < basis[leaving_row]
                    )
                )
                if better:
                    t = cap
                    leaving_row = r
                    leaving_to_upper = to_upper
            if t is None:
                raise SimplexError("unbounded direction in a bounded problem")

            if t == 0:
                degenerate_streak += 1
                if degenerate_streak > _DEGENERATE_STREAK_LIMIT:
                    use_bland = True
            else:
                degenerate_streak = 0
                for r in range(self.m):
                    d = delta * col[r]
                    if d != 0:
                        xb[r] = xb[r] - t * d

            flip_cap = ub[entering]
            if leaving_row is None or (
                flip_cap is not None and t == flip_cap
            ):
                # the entering variable reached its other bound: no pivot
                at_upper[entering] = not from_upper
                continue

            out = basis[leaving_row]
            in_basis.discard(out)
            at_upper[out] = leaving_to_upper
            enter_val = (ub[entering] - t) if from_upper else t
            self._pivot(leaving_row, entering)
            xb[leaving_row] = enter_val
            in_basis.add(entering)
            at_upper[entering] = False

            factor = rc[entering]
            if factor != 0:
                row = tableau[leaving_row]
                for j in range(self.ncols):
                    if row[j] != 0:
                        rc[j] = rc[j] - factor * row[j]
