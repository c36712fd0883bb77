"""Exact solving of the stable-configurations integer program.

Phase 1 finds the optimal merge count by depth-first branch-and-bound:
interval propagation over the linear rows plus LP-relaxation bounding in
exact rational arithmetic, branching on the most fractional LP variable.
Phase 2 freezes the objective into an equality and exhaustively enumerates
every integer solution by propagation-driven DFS; the symmetry-breaking
rows leave one representative per polymer ordering, and canonicalization
plus deduplication acts as a safety net.

``brute_force_stable`` is the independent oracle: exhaustive enumeration
of partitions into self-saturated polymers, for desk-scale instances only.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    PartialConfiguration,
    Polymer,
    Tbn,
    TbnError,
    is_self_saturated,
)
from .ipmodel import (
    EQ,
    GE,
    LE,
    BuildOptions,
    IntegerProgram,
    StableConfigsModel,
    build,
    default_bound,
)
from .simplex import frac_ceil, frac_floor, is_integral, solve_lp

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
BUDGET_EXCEEDED = "budget_exceeded"

_BRUTE_FORCE_MAX_INSTANCES = 16


class BruteForceError(TbnError):
    """Instance too large for the exhaustive oracle."""


@dataclass(frozen=True)
class Budget:
    """Search limits; defaults follow the 100 s benchmark timeout."""

    max_nodes: int = 10_000_000
    max_time: float = 100.0


@dataclass
class SolveStats:
    nodes: int = 0
    wall_time: float = 0.0


@dataclass
class SolveResult:
    status: str
    objective: Optional[int] = None
    assignment: Optional[Dict[str, int]] = None
    stats: SolveStats = field(default_factory=SolveStats)


@dataclass
class EnumerationResult:
    optimum: Optional[int]
    solutions: List[PartialConfiguration]
    complete: bool
    stats: SolveStats = field(default_factory=SolveStats)


class _Compiled:
    """Array form of an IntegerProgram for propagation and LP calls."""

    def __init__(self, program: IntegerProgram):
        self.program = program
        self.names = [v.name for v in program.variables]
        self.index = {name: k for k, name in enumerate(self.names)}
        self.lo = [v.lower for v in program.variables]
        self.hi = [v.upper for v in program.variables]
        self.rows: List[Tuple[Tuple[Tuple[int, int], ...], str, int]] = []
        for con in program.constraints:
            coeffs = tuple(
                (self.index[v], c) for v, c in con.coeffs if c != 0
            )
            if coeffs:
                self.rows.append((coeffs, con.sense, con.rhs))
        self.var_rows: List[List[int]] = [[] for _ in self.names]
        for k, (coeffs, _, _) in enumerate(self.rows):
            for i, _ in coeffs:
                self.var_rows[i].append(k)
        self.objective: List[Tuple[int, int]] = []
        if program.objective is not None:
            acc: Dict[int, int] = {}
            for v, c in program.objective.coeffs:
                acc[self.index[v]] = acc.get(self.index[v], 0) + c
            self.objective = sorted(acc.items())
            self.obj_sign = 1 if program.objective.sense == "min" else -1
            self.obj_const = program.objective.constant
        else:
            self.obj_sign = 1
            self.obj_const = 0

    def assignment_from(self, lo: Sequence[int]) -> Dict[str, int]:
        return {name: lo[i] for i, name in enumerate(self.names)}

    def min_objective(self) -> List[Tuple[int, int]]:
        """Objective coefficient list in minimization sense."""
        return [(i, self.obj_sign * c) for i, c in self.objective]


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _floor_div(a: int, b: int) -> int:
    return a // b


def propagate(comp: _Compiled, lo: List[int], hi: List[int]) -> bool:
    """Tighten bounds to a fixpoint; False when a domain empties."""
    pending = set(range(len(comp.rows)))
    while pending:
        k = pending.pop()
        coeffs, sense, rhs = comp.rows[k]
        min_lhs = 0
        max_lhs = 0
        for i, c in coeffs:
            if c > 0:
                min_lhs += c * lo[i]
                max_lhs += c * hi[i]
            else:
                min_lhs += c * hi[i]
                max_lhs += c * lo[i]
        if sense in (LE, EQ):
            if min_lhs > rhs:
                return False
            for i, c in coeffs:
                if c > 0:
                    rest = min_lhs - c * lo[i]
                    new_hi = _floor_div(rhs - rest, c)
                    if new_hi < hi[i]:
                        if new_hi < lo[i]:
                            return False
                        hi[i] = new_hi
                        pending.update(comp.var_rows[i])
                else:
                    rest = min_lhs - c * hi[i]
                    new_lo = _ceil_div(rhs - rest, c)
                    if new_lo > lo[i]:
                        if new_lo > hi[i]:
                            return False
                        lo[i] = new_lo
                        pending.update(comp.var_rows[i])
        if sense in (GE, EQ):
            if max_lhs < rhs:
                return False
            for i, c in coeffs:
                if c > 0:
                    rest = max_lhs - c * hi[i]
                    new_lo = _ceil_div(rhs - rest, c)
                    if new_lo > lo[i]:
                        if new_lo > hi[i]:
                            return False
                        lo[i] = new_lo
                        pending.update(comp.var_rows[i])
                else:
                    rest = max_lhs - c * lo[i]
                    new_hi = _floor_div(rhs - rest, c)
                    if new_hi < hi[i]:
                        if new_hi < lo[i]:
                            return False
                        hi[i] = new_hi
                        pending.update(comp.var_rows[i])
    return True


class _BudgetClock:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.start = time.monotonic()
        self.nodes = 0

    def tick(self) -> bool:
        """Count one node; True while within budget."""
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            return False
        if self.elapsed() > self.budget.max_time:
            return False
        return True

    def elapsed(self) -> float:
        return time.monotonic() - self.start


def solve_min(program: IntegerProgram, budget: Optional[Budget] = None) -> SolveResult:
    """Exact optimum of a bounded integer program via branch-and-bound."""
    if program.objective is None:
        raise TbnError("solve_min needs a program with an objective")
    comp = _Compiled(program)
    clock = _BudgetClock(budget or Budget())
    objective = comp.min_objective()

    incumbent: Optional[Tuple[int, List[int]]] = None
    stack: List[Tuple[List[int], List[int]]] = [(list(comp.lo), list(comp.hi))]
    out_of_budget = False

    while stack:
        lo, hi = stack.pop()
        if not clock.tick():
            out_of_budget = True
            break
        if not propagate(comp, lo, hi):
            continue
        relax = solve_lp(objective, comp.rows, list(zip(lo, hi)))
        if relax.status != "optimal":
            continue
        bound = frac_ceil(relax.objective)
        if incumbent is not None and bound >= incumbent[0]:
            continue
        assert relax.x is not None
        if all(is_integral(v) for v in relax.x):
            value = int(sum(c * relax.x[i] for i, c in objective))
            solution = [int(v) for v in relax.x]
            if incumbent is None or value < incumbent[0]:
                incumbent = (value, solution)
            continue
        # most fractional variable, ties to the lowest index
        branch_i = None
        best_score = None
        for i, v in enumerate(relax.x):
            if is_integral(v):
                continue
            frac = v - frac_floor(v)
            score = min(frac, 1 - frac)
            if best_score is None or score > best_score:
                best_score = score
                branch_i = i
        assert branch_i is not None
        xv = relax.x[branch_i]
        up_lo = list(lo)
        up_lo[branch_i] = frac_ceil(xv)
        down_hi = list(hi)
        down_hi[branch_i] = frac_floor(xv)
        # floor branch explored first (LIFO)
        stack.append((up_lo, hi))
        stack.append((lo, down_hi))

    stats = SolveStats(clock.nodes, clock.elapsed())
    if out_of_budget:
        result = SolveResult(BUDGET_EXCEEDED, stats=stats)
        if incumbent is not None:
            result.objective = comp.obj_sign * incumbent[0] + comp.obj_const
            result.assignment = comp.assignment_from(incumbent[1])
        return result
    if incumbent is None:
        return SolveResult(INFEASIBLE, stats=stats)
    value = comp.obj_sign * incumbent[0] + comp.obj_const
    return SolveResult(
        OPTIMAL, value, comp.assignment_from(incumbent[1]), stats
    )


def enumerate_assignments(
    program: IntegerProgram, budget: Optional[Budget] = None
) -> Tuple[List[Dict[str, int]], bool, SolveStats]:
    """All integer solutions of a (typically objective-free) program.

    Depth-first search with interval propagation; variables are fixed in
    declaration order, values tried in ascending order, so the output
    order is deterministic.
    """
    comp = _Compiled(program)
    clock = _BudgetClock(budget or Budget())
    solutions: List[Dict[str, int]] = []
    complete = True

    stack: List[Tuple[List[int], List[int]]] = [(list(comp.lo), list(comp.hi))]
    while stack:
        lo, hi = stack.pop()
        if not clock.tick():
            complete = False
            break
        if not propagate(comp, lo, hi):
            continue
        branch_i = next(
            (i for i in range(len(lo)) if lo[i] < hi[i]), None
        )
        if branch_i is None:
            solutions.append(comp.assignment_from(lo))
            continue
        for value in range(hi[branch_i], lo[branch_i] - 1, -1):
            child_lo = list(lo)
            child_hi = list(hi)
            child_lo[branch_i] = child_hi[branch_i] = value
            stack.append((child_lo, child_hi))

    return solutions, complete, SolveStats(clock.nodes, clock.elapsed())


def enumerate_optima(
    model: StableConfigsModel,
    optimum: int,
    budget: Optional[Budget] = None,
) -> EnumerationResult:
    """Every optimal partial configuration of a frozen-objective model."""
    if model.options.fixed_objective != optimum:
        raise TbnError(
            "enumeration model must be built with fixed_objective=optimum"
        )
    if not model.options.symmetry_breaking:
        raise TbnError("enumeration model must have symmetry breaking on")
    assignments, complete, stats = enumerate_assignments(
        model.program, budget
    )
    seen = set()
    solutions: List[PartialConfiguration] = []
    for assignment in assignments:
        pc = model.decode(assignment)
        key = tuple(p.counts for p in pc.polymers)
        if key not in seen:
            seen.add(key)
            solutions.append(pc)
    solutions.sort(key=lambda pc: tuple(p.counts for p in pc.polymers),
                   reverse=True)
    return EnumerationResult(optimum, solutions, complete, stats)


@dataclass(frozen=True)
class StableOptions:
    all: bool = False
    bound: Optional[int] = None
    budget: Budget = Budget()


def stable_configs(
    t: Tbn, options: Optional[StableOptions] = None
) -> EnumerationResult:
    """End-to-end pipeline: bound, build, optimize, optionally enumerate."""
    opts = options or StableOptions()
    conservative = default_bound(t)
    if conservative == 0:
        # no limiting monomers: the all-singletons configuration is stable
        empty = PartialConfiguration.from_polymers([], t)
        return EnumerationResult(0, [empty], True)

    bound = opts.bound if opts.bound is not None else conservative
    while True:
        model = build(t, bound)
        result = solve_min(model.program, opts.budget)
        if result.status == BUDGET_EXCEEDED:
            return EnumerationResult(
                result.objective, [], False, result.stats
            )
        if result.status == OPTIMAL:
            break
        if bound < conservative:
            bound = min(bound * 2, conservative)
            continue
        raise TbnError(
            f"no saturated configuration within polymer bound {bound}"
        )

    optimum = result.objective
    assert optimum is not None
    if not opts.all:
        witness = model.decode(result.assignment or {})
        return EnumerationResult(optimum, [witness], True, result.stats)

    enum_model = build(
        t,
        bound,
        BuildOptions(symmetry_breaking=True, fixed_objective=optimum),
    )
    return enumerate_optima(enum_model, optimum, opts.budget)


def load_external_solution(
    model: StableConfigsModel, assignment: Dict[str, int]
) -> Tuple[PartialConfiguration, int]:
    """Validate a solution produced by an external MILP solver.

    Returns the decoded partial configuration and its objective value;
    raises if the assignment violates the model.
    """
    pc = model.decode(assignment)
    value = model.objective_expression().evaluate(assignment)
    return pc, value


def brute_force_stable(t: Tbn, cap: int = 3) -> EnumerationResult:
    """Exhaustive oracle: all merge-minimal saturated configurations.

    Infinite counts are replaced by ``cap`` copies.  Enumerates every
    partition of the monomer instances into self-saturated polymers.
    """
    finite = t.with_counts_capped(cap)
    total = finite.total_monomers()
    if total > _BRUTE_FORCE_MAX_INSTANCES:
        raise BruteForceError(
            f"{total} monomer instances exceed the oracle limit "
            f"{_BRUTE_FORCE_MAX_INSTANCES}"
        )
    n = finite.n_types

    saturated_cache: Dict[Tuple[int, ...], bool] = {}

    def saturated(block: Tuple[int, ...]) -> bool:
        cached = saturated_cache.get(block)
        if cached is None:
            cached = is_self_saturated(Polymer(block), finite)
            saturated_cache[block] = cached
        return cached

    best_cost = None
    best_partitions: List[Tuple[Tuple[int, ...], ...]] = []

    def submultisets_with_anchor(remaining: Tuple[int, ...], anchor: int):
        ranges = []
        for i in range(n):
            if i < anchor:
                ranges.append((0,))
            elif i == anchor:
                ranges.append(tuple(range(1, remaining[i] + 1)))
            else:
                ranges.append(tuple(range(remaining[i] + 1)))
        return itertools.product(*ranges)

    def recurse(remaining: Tuple[int, ...], cost: int, blocks):
        nonlocal best_cost, best_partitions
        if best_cost is not None and cost > best_cost:
            return
        anchor = next((i for i in range(n) if remaining[i] > 0), None)
        if anchor is None:
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_partitions = [tuple(blocks)]
            elif cost == best_cost:
                best_partitions.append(tuple(blocks))
            return
        for block in submultisets_with_anchor(remaining, anchor):
            size = sum(block)
            extra = size - 1
            if best_cost is not None and cost + extra > best_cost:
                continue
            if not saturated(block):
                continue
            rest = tuple(r - b for r, b in zip(remaining, block))
            blocks.append(block)
            recurse(rest, cost + extra, blocks)
            blocks.pop()

    recurse(tuple(finite.counts), 0, [])

    if best_cost is None:
        raise TbnError("no saturated partition exists (broken invariant)")

    seen = set()
    solutions = []
    for partition in best_partitions:
        polymers = [Polymer(b) for b in partition if sum(b) >= 2]
        pc = PartialConfiguration.from_polymers(polymers, finite)
        key = tuple(p.counts for p in pc.polymers)
        if key not in seen:
            seen.add(key)
            solutions.append(pc)
    solutions.sort(key=lambda pc: tuple(p.counts for p in pc.polymers),
                   reverse=True)
    return EnumerationResult(best_cost, solutions, True)
