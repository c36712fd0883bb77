"""Merge/split pathways between saturated configurations.

A full configuration of a finite TBN partitions every monomer instance
into polymers (singletons included).  Kinetics are modeled as a walk on
saturated full configurations: one step either merges two polymers or
splits a polymer into two self-saturated parts.  The cost of interest is
the barrier: the largest excess merge count over the starting
configuration seen anywhere along the walk.

``find_pathway`` searches for a minimum-barrier pathway with a best-first
strategy: states are ordered by the bottleneck barrier reached so far,
then by multiset distance to the goal.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from .core import (
    PartialConfiguration,
    Polymer,
    Tbn,
    TbnError,
    is_self_saturated,
)


class PathwayError(TbnError):
    """Ill-formed pathway request or broken step sequence."""


class PathwaySearchExhausted(TbnError):
    """Search budget ran out before the space was fully explored."""


@dataclass(frozen=True)
class PathwayBudget:
    max_states: int = 2_000_000


@dataclass(frozen=True)
class FullConfiguration:
    """Every monomer instance assigned to a polymer; finite TBNs only.

    Polymers (singletons included) are kept in non-increasing
    lexicographic order of their count vectors.
    """

    polymers: Tuple[Polymer, ...]
    tbn: Tbn = field(compare=False)

    @classmethod
    def from_polymers(
        cls, polymers, tbn: Tbn, validate: bool = True
    ) -> "FullConfiguration":
        polys = tuple(
            sorted(polymers, key=lambda p: p.counts, reverse=True)
        )
        config = cls(polys, tbn)
        if validate:
            config._validate()
        return config

    def _validate(self) -> None:
        if not self.tbn.is_finite:
            raise PathwayError(
                "full configurations require a fully finite TBN"
            )
        usage = [0] * self.tbn.n_types
        for p in self.polymers:
            if p.size == 0:
                raise PathwayError("empty polymer in a configuration")
            for i, c in enumerate(p.counts):
                usage[i] += c
        if tuple(usage) != self.tbn.counts:
            raise PathwayError(
                f"configuration uses monomers {tuple(usage)}, "
                f"TBN supplies {self.tbn.counts}"
            )

    @property
    def n_polymers(self) -> int:
        return len(self.polymers)

    def merge_count(self) -> int:
        return sum(p.size for p in self.polymers) - self.n_polymers

    def is_saturated(self) -> bool:
        return all(is_self_saturated(p, self.tbn) for p in self.polymers)

    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(p.counts for p in self.polymers)

    def describe(self) -> str:
        return " | ".join(p.describe(self.tbn) for p in self.polymers)


def all_singletons(t: Tbn) -> FullConfiguration:
    if not t.is_finite:
        raise PathwayError("full configurations require a fully finite TBN")
    polymers = []
    for i, count in enumerate(t.counts):
        unit = Polymer(tuple(int(j == i) for j in range(t.n_types)))
        polymers.extend([unit] * count)
    return FullConfiguration.from_polymers(polymers, t)


def full_configuration(pc: PartialConfiguration) -> FullConfiguration:
    """Extend a partial configuration with its implied singletons."""
    t = pc.tbn
    if not t.is_finite:
        raise PathwayError("full configurations require a fully finite TBN")
    usage = [0] * t.n_types
    for p in pc.polymers:
        for i, c in enumerate(p.counts):
            usage[i] += c
    polymers = list(pc.polymers)
    for i, (used, count) in enumerate(zip(usage, t.counts)):
        unit = Polymer(tuple(int(j == i) for j in range(t.n_types)))
        polymers.extend([unit] * (count - used))
    return FullConfiguration.from_polymers(polymers, t)


def splits(p: Polymer, t: Tbn) -> List[Tuple[Polymer, Polymer]]:
    """All unordered bipartitions of a polymer into self-saturated parts.

    Empty exactly when the polymer is an element of the polymer basis.
    """
    result = []
    for part in itertools.product(*(range(c + 1) for c in p.counts)):
        other = tuple(c - v for c, v in zip(p.counts, part))
        if part > other or not any(part) or not any(other):
            continue
        p1, p2 = Polymer(part), Polymer(other)
        if is_self_saturated(p1, t) and is_self_saturated(p2, t):
            result.append((p1, p2))
    return result


def is_locally_stable(config: FullConfiguration, basis) -> bool:
    """No polymer of a saturated configuration can split without
    breaking a bond; equivalently, every polymer is a basis element."""
    if not config.is_saturated():
        raise PathwayError(
            "local stability is defined for saturated configurations only"
        )
    basis_counts = {b.counts for b in basis}
    return all(
        p.counts in basis_counts
        for p in config.polymers
        if p.size >= 2
    )


def merge_moves(config: FullConfiguration) -> Iterator[FullConfiguration]:
    """All configurations one pairwise merge away."""
    polys = config.polymers
    seen = set()
    for a, b in itertools.combinations(range(len(polys)), 2):
        merged = polys[a] + polys[b]
        rest = [p for k, p in enumerate(polys) if k not in (a, b)]
        nxt = FullConfiguration.from_polymers(
            rest + [merged], config.tbn, validate=False
        )
        if nxt.key() not in seen:
            seen.add(nxt.key())
            yield nxt


def split_moves(config: FullConfiguration) -> Iterator[FullConfiguration]:
    """All configurations one saturation-preserving binary split away."""
    seen_polymers = set()
    seen = set()
    for k, poly in enumerate(config.polymers):
        if poly.size < 2 or poly.counts in seen_polymers:
            continue
        seen_polymers.add(poly.counts)
        rest = [p for j, p in enumerate(config.polymers) if j != k]
        for p1, p2 in splits(poly, config.tbn):
            nxt = FullConfiguration.from_polymers(
                rest + [p1, p2], config.tbn, validate=False
            )
            if nxt.key() not in seen:
                seen.add(nxt.key())
                yield nxt


@dataclass(frozen=True)
class Pathway:
    """A sequence of configurations, adjacent under merge/split moves."""

    configurations: Tuple[FullConfiguration, ...]

    def __post_init__(self) -> None:
        if not self.configurations:
            raise PathwayError("a pathway needs at least one configuration")

    @property
    def length(self) -> int:
        return len(self.configurations) - 1

    def merge_counts(self) -> List[int]:
        return [c.merge_count() for c in self.configurations]

    def barrier(self) -> int:
        start = self.configurations[0].merge_count()
        return max(c.merge_count() - start for c in self.configurations)

    def validate(self) -> None:
        """Replay the pathway, checking every step is a legal move."""
        for prev, cur in zip(self.configurations, self.configurations[1:]):
            delta = cur.merge_count() - prev.merge_count()
            if delta == 1:
                neighbors = merge_moves(prev)
            elif delta == -1:
                neighbors = split_moves(prev)
            else:
                raise PathwayError(
                    f"merge count jumps by {delta} between steps"
                )
            if cur.key() not in {n.key() for n in neighbors}:
                raise PathwayError(
                    f"{cur.describe()} is not one move from "
                    f"{prev.describe()}"
                )

    def reversed(self) -> "Pathway":
        return Pathway(tuple(reversed(self.configurations)))


def barrier(path: Pathway, start: FullConfiguration) -> int:
    """Replay a pathway from a given start and return its barrier."""
    if path.configurations[0].key() != start.key():
        raise PathwayError("pathway does not begin at the given start")
    path.validate()
    return path.barrier()


def _distance(a: FullConfiguration, b: FullConfiguration) -> int:
    """Polymer multiset symmetric difference; 0 iff equal."""
    from collections import Counter

    ca = Counter(p.counts for p in a.polymers)
    cb = Counter(p.counts for p in b.polymers)
    return sum(((ca - cb) + (cb - ca)).values())


def find_pathway(
    start: FullConfiguration,
    goal: FullConfiguration,
    max_barrier: Optional[int] = None,
    budget: Optional[PathwayBudget] = None,
) -> Optional[Pathway]:
    """Minimum-barrier pathway between two saturated configurations.

    Best-first search ordered by (barrier reached, distance to goal);
    the barrier of a path is the bottleneck, so the first time the goal
    is popped the barrier is optimal.  Returns None when no pathway
    exists within ``max_barrier`` or the state budget.
    """
    if start.tbn.counts != goal.tbn.counts:
        raise PathwayError("start and goal belong to different TBNs")
    for config in (start, goal):
        if not config.is_saturated():
            raise PathwayError(
                f"configuration {config.describe()} is not saturated"
            )
    caps = budget or PathwayBudget()
    base = start.merge_count()

    counter = itertools.count()
    heap = [(0, _distance(start, goal), next(counter), start, [start])]
    best_barrier = {start.key(): 0}
    popped = 0

    while heap:
        reached, _, _, config, path = heapq.heappop(heap)
        popped += 1
        if popped > caps.max_states:
            raise PathwaySearchExhausted(
                f"pathway search stopped after {caps.max_states} states"
            )
        if config.key() == goal.key():
            return Pathway(tuple(path))
        if reached > best_barrier.get(config.key(), reached):
            continue
        for nxt in itertools.chain(merge_moves(config), split_moves(config)):
            nxt_barrier = max(reached, nxt.merge_count() - base)
            if max_barrier is not None and nxt_barrier > max_barrier:
                continue
            known = best_barrier.get(nxt.key())
            if known is not None and known <= nxt_barrier:
                continue
            best_barrier[nxt.key()] = nxt_barrier
            heapq.heappush(
                heap,
                (
                    nxt_barrier,
                    _distance(nxt, goal),
                    next(counter),
                    nxt,
                    path + [nxt],
                ),
            )
    return None
