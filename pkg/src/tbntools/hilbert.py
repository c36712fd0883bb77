"""Polymer basis computation via Hilbert bases of rational cones.

The self-saturated polymers of a TBN are exactly the integer points of
the cone ``{p >= 0 : A p >= 0}``, where row ``s`` of ``A`` holds each
monomer type's net count of site name ``s`` (unstarred minus starred).
The polymer basis is the Hilbert basis of that cone: the finitely many
polymers that cannot be split into two smaller self-saturated ones.
Every saturated configuration is a multiset of basis polymers.

The basis is computed with the Contejean-Devie completion procedure on
the slack-extended equality system ``A x - s = 0``; minimal solutions of
that system project one-to-one onto the cone's Hilbert basis.

``brute_force_hilbert`` is an independent oracle that enumerates cone
points up to a norm cap and keeps the indecomposable ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    PartialConfiguration,
    Polymer,
    SiteType,
    Tbn,
    TbnError,
    is_self_saturated,
)
from .ipmodel import EQ, GE, Constraint, IntegerProgram, Objective, Variable


class BasisError(TbnError):
    """Hilbert basis computation failed or was asked for the impossible."""


@dataclass(frozen=True)
class HilbertBudget:
    """Caps on the completion procedure's frontier."""

    max_nodes: int = 5_000_000
    max_frontier: int = 2_000_000


@dataclass(frozen=True)
class MatrixRepresentation:
    """Net site counts per monomer type: one row per site name."""

    site_names: Tuple[str, ...]
    rows: Tuple[Tuple[int, ...], ...]

    @property
    def n_monomers(self) -> int:
        return len(self.rows[0]) if self.rows else 0


def matrix_representation(t: Tbn) -> MatrixRepresentation:
    names = tuple(t.site_names())
    rows = tuple(
        tuple(
            mon.net_count(SiteType(name, False))
            for mon in t.monomer_types
        )
        for name in names
    )
    return MatrixRepresentation(names, rows)


def _in_cone(rows: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    return all(
        sum(c * v for c, v in zip(row, x)) >= 0 for row in rows
    )


def hilbert_basis(
    rows: Sequence[Sequence[int]],
    n: Optional[int] = None,
    budget: Optional[HilbertBudget] = None,
) -> List[Tuple[int, ...]]:
    """Hilbert basis of ``{x in N^n : rows . x >= 0}``.

    Completion procedure on the slack-extended system: lifted vectors are
    ``(x, s)`` with value ``A x - s``; unit vectors seed the frontier and
    a vector grows along directions that reduce the value's norm.  Each
    exact solution found is minimal; grown vectors dominating a known
    solution are pruned.
    """
    caps = budget or HilbertBudget()
    if n is None:
        if not rows:
            raise BasisError("need explicit dimension for an empty system")
        n = len(rows[0])
    m = len(rows)
    dims = n + m

    # column k of [A | -I]
    columns: List[Tuple[int, ...]] = []
    for k in range(n):
        columns.append(tuple(row[k] for row in rows))
    for r in range(m):
        columns.append(tuple(-int(r == i) for i in range(m)))

    zero_value = (0,) * m
    basis: List[Tuple[int, ...]] = []

    def dominated(y: Tuple[int, ...]) -> bool:
        return any(all(a >= b for a, b in zip(y, b_)) for b_ in basis)

    frontier: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
    for k in range(dims):
        unit = tuple(int(i == k) for i in range(dims))
        if columns[k] == zero_value:
            basis.append(unit)
        else:
            frontier.append((unit, columns[k]))

    nodes = 0
    while frontier:
        nodes += len(frontier)
        if nodes > caps.max_nodes or len(frontier) > caps.max_frontier:
            raise BasisError(
                f"completion exceeded its budget ({nodes} nodes)"
            )
        next_level: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
        for y, value in frontier:
            for k in range(dims):
                if sum(a * b for a, b in zip(value, columns[k])) >= 0:
                    continue
                child = list(y)
                child[k] += 1
                child_t = tuple(child)
                if child_t in next_level or dominated(child_t):
                    continue
                child_value = tuple(
                    a + b for a, b in zip(value, columns[k])
                )
                if child_value == zero_value:
                    basis.append(child_t)
                else:
                    next_level[child_t] = child_value
        # re-filter: solutions found this level prune the next frontier
        frontier = [
            (y, v) for y, v in next_level.items() if not dominated(y)
        ]

    projected = sorted(y[:n] for y in basis)
    return [x for x in projected if any(x)]


def polymer_basis(
    t: Tbn, budget: Optional[HilbertBudget] = None
) -> List[Polymer]:
    """All self-saturated polymers that cannot split into smaller ones."""
    if t.n_types == 0:
        return []
    rep = matrix_representation(t)
    vectors = hilbert_basis(rep.rows, t.n_types, budget)
    return [Polymer(v) for v in sorted(vectors, reverse=True)]


def brute_force_hilbert(
    rows: Sequence[Sequence[int]], n: int, cap: int
) -> List[Tuple[int, ...]]:
    """Oracle: indecomposable cone points with 1-norm up to ``cap``."""
    points: List[Tuple[int, ...]] = []

    def extend(prefix: List[int], remaining: int, k: int) -> None:
        if k == n:
            if any(prefix) and _in_cone(rows, prefix):
                points.append(tuple(prefix))
            return
        for v in range(remaining + 1):
            prefix.append(v)
            extend(prefix, remaining - v, k + 1)
            prefix.pop()

    extend([], cap, 0)
    point_set = set(points)

    def decomposable(x: Tuple[int, ...]) -> bool:
        for u in points:
            if u == x or not all(a <= b for a, b in zip(u, x)):
                continue
            rest = tuple(b - a for a, b in zip(u, x))
            if rest in point_set:
                return True
        return False

    return sorted(x for x in points if not decomposable(x))


def decompose(
    p: Polymer, basis: Sequence[Polymer], t: Tbn
) -> List[Polymer]:
    """Write a self-saturated polymer as a sum of basis polymers.

    Depth-first with backtracking, trying basis elements in order, so the
    result is deterministic.  Raises if no decomposition exists (the
    polymer is not self-saturated or the basis is not one).
    """
    rep = matrix_representation(t)
    zero = (0,) * t.n_types

    def search(remaining: Tuple[int, ...], start: int):
        if remaining == zero:
            return []
        for idx in range(start, len(basis)):
            b = basis[idx].counts
            if not all(a <= r for a, r in zip(b, remaining)):
                continue
            rest = tuple(r - a for r, a in zip(remaining, b))
            if not _in_cone(rep.rows, rest):
                continue
            tail = search(rest, idx)
            if tail is not None:
                return [basis[idx]] + tail
        return None

    result = search(tuple(p.counts), 0)
    if result is None:
        raise BasisError(
            f"polymer {p.counts} has no decomposition over the given basis"
        )
    return result


def _basis_cover_program(
    t: Tbn, basis: Sequence[Polymer]
) -> IntegerProgram:
    """Coefficient IP: pick basis multiplicities using every monomer."""
    variables = []
    for idx, b in enumerate(basis):
        upper = min(
            t.counts[i] // c for i, c in enumerate(b.counts) if c > 0
        )
        variables.append(Variable(f"n_{idx}", 0, upper))
    constraints = []
    for i in range(t.n_types):
        coeffs = tuple(
            (f"n_{idx}", b.counts[i])
            for idx, b in enumerate(basis)
            if b.counts[i] > 0
        )
        if not coeffs:
            raise BasisError(
                f"monomer {t.monomer_types[i]} appears in no basis polymer"
            )
        constraints.append(
            Constraint(coeffs, EQ, t.counts[i], f"cover_m{i}")
        )
    objective = Objective(
        "max", tuple((f"n_{idx}", 1) for idx in range(len(basis)))
    )
    return IntegerProgram(tuple(variables), tuple(constraints), objective)


def stable_via_basis(t: Tbn, basis: Optional[Sequence[Polymer]] = None):
    """Stable configurations of a finite TBN from its polymer basis.

    A saturated full configuration is a multiset of basis polymers using
    every monomer exactly; minimizing merges means maximizing the number
    of polymers.  Solves the coefficient IP, then enumerates every
    maximizer.  Returns the same EnumerationResult as the direct solver.
    """
    from .solver import (
        OPTIMAL,
        EnumerationResult,
        enumerate_assignments,
        solve_min,
    )

    if not t.is_finite:
        raise BasisError("basis counting needs a fully finite TBN")
    if basis is None:
        basis = polymer_basis(t)
    if t.n_types == 0:
        empty = PartialConfiguration.from_polymers([], t)
        return EnumerationResult(0, [empty], True)

    program = _basis_cover_program(t, basis)
    result = solve_min(program)
    if result.status != OPTIMAL:
        raise BasisError(f"basis counting IP ended {result.status}")
    best = result.objective

    fixed = IntegerProgram(
        program.variables,
        program.constraints
        + (
            Constraint(
                tuple((v.name, 1) for v in program.variables),
                EQ,
                best,
                "polymer_total",
            ),
        ),
    )
    assignments, complete, stats = enumerate_assignments(fixed)
    optimum = t.total_monomers() - best
    seen = set()
    solutions = []
    for assignment in assignments:
        polymers = []
        for idx, b in enumerate(basis):
            if b.size >= 2:
                polymers.extend([b] * assignment[f"n_{idx}"])
        pc = PartialConfiguration.from_polymers(polymers, t)
        key = tuple(p.counts for p in pc.polymers)
        if key not in seen:
            seen.add(key)
            solutions.append(pc)
    solutions.sort(
        key=lambda pc: tuple(p.counts for p in pc.polymers), reverse=True
    )
    return EnumerationResult(optimum, solutions, complete, stats)


BASIS_SCHEMA = "tbn-polymer-basis/1"


def basis_to_json(basis: Sequence[Polymer], t: Tbn) -> str:
    payload = {
        "schema": BASIS_SCHEMA,
        "monomers": [
            {
                "label": mon.label,
                "sites": [str(s) for s in mon.sites],
            }
            for mon in t.monomer_types
        ],
        "polymers": [list(p.counts) for p in basis],
    }
    return json.dumps(payload, indent=2) + "\n"


def basis_from_json(text: str) -> List[Polymer]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BasisError(f"invalid basis JSON: {exc}") from exc
    if payload.get("schema") != BASIS_SCHEMA:
        raise BasisError(
            f"unsupported basis schema {payload.get('schema')!r}"
        )
    return [Polymer(tuple(counts)) for counts in payload["polymers"]]


def render_basis_table(basis: Sequence[Polymer], t: Tbn) -> str:
    """Human-readable table: one basis polymer per line."""
    lines = []
    width = len(str(len(basis)))
    for k, p in enumerate(basis, start=1):
        lines.append(f"{k:>{width}}. {p.describe(t)}")
    return "\n".join(lines) + ("\n" if lines else "")
