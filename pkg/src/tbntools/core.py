"""Domain model for thermodynamic binding networks (TBNs).

A TBN is a multiset of monomer types; a monomer is a finite multiset of
binding sites.  Site ``a`` binds only its complement ``a*``.  We follow the
convention that starred sites are limiting: across the whole network the
total count of ``a*`` never exceeds that of ``a``.  Inputs violating the
convention are repaired at parse time by flipping which literal of a name
carries the star (recorded in the parse report).

Counts may be infinite (monomers supplied "in large excess").  Infinite
counts are represented by the ``INF`` sentinel; code only ever compares
against it, never does arithmetic with it.

Conventions used throughout the package:
  - monomer types are kept in a canonical order: descending number of
    starred sites, then lexicographic on the sorted site list.  This puts
    limiting monomers first, which is what the symmetry-breaking
    constraints of the IP model want.
  - a polymer is a count vector over the TBN's monomer-type ordering.
  - a partial configuration stores only non-singleton polymers, in
    non-increasing lexicographic order of their count vectors; the full
    configuration is implied by adding singletons.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union


class TbnError(Exception):
    """Base class for all errors raised by this package."""


class TbnSyntaxError(TbnError):
    """Malformed .tbn input text."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class TbnValidationError(TbnError):
    """Structurally well-formed input that violates a model invariant."""


class _Infinity:
    """Sentinel for an infinite monomer count.  Compares above every int."""

    _instance: Optional["_Infinity"] = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("tbn-infinity")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True


INF = _Infinity()

Count = Union[int, _Infinity]

_FORBIDDEN_NAME_CHARS = set("*,:#")


def is_finite(count: Count) -> bool:
    return count is not INF


@dataclass(frozen=True, order=True)
class SiteType:
    """A named binding site, optionally starred.  ``a*`` complements ``a``."""

    name: str
    starred: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise TbnValidationError("site name must be nonempty")
        if any(c.isspace() or c in _FORBIDDEN_NAME_CHARS for c in self.name):
            raise TbnValidationError(
                f"site name {self.name!r} contains whitespace or one of ',:*#'"
            )

    def complement(self) -> "SiteType":
        return SiteType(self.name, not self.starred)

    def __str__(self) -> str:
        return self.name + ("*" if self.starred else "")

    @classmethod
    def parse(cls, token: str) -> "SiteType":
        if token.endswith("*"):
            return cls(token[:-1], True)
        return cls(token, False)


@dataclass(frozen=True)
class Monomer:
    """A finite multiset of site types.  The label is decoration only."""

    sites: tuple
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.sites:
            raise TbnValidationError("a monomer must contain at least one site")
        object.__setattr__(self, "sites", tuple(sorted(self.sites)))

    def net_count(self, s: SiteType) -> int:
        """Count of ``s`` minus count of its complement in this monomer."""
        plus = sum(1 for x in self.sites if x == s)
        minus = sum(1 for x in self.sites if x == s.complement())
        return plus - minus

    @property
    def starred_site_count(self) -> int:
        return sum(1 for s in self.sites if s.starred)

    @property
    def is_limiting(self) -> bool:
        return self.starred_site_count > 0

    def site_names(self) -> set:
        return {s.name for s in self.sites}

    def canonical_key(self) -> tuple:
        return (-self.starred_site_count, tuple(str(s) for s in self.sites))

    def __str__(self) -> str:
        body = " ".join(str(s) for s in self.sites)
        return f"{self.label}: {body}" if self.label else body


def net_count(mon: Monomer, s: SiteType) -> int:
    return mon.net_count(s)


@dataclass(frozen=True)
class Tbn:
    """A multiset of monomer types with counts in N or infinity.

    ``monomer_types`` is the canonical ordering; ``counts`` is parallel.
    Construct through :meth:`from_monomers`, which sorts, merges duplicate
    types and validates the model invariants.
    """

    monomer_types: tuple
    counts: tuple

    @classmethod
    def from_monomers(cls, pairs: Iterable) -> "Tbn":
        """Build a TBN from (monomer, count) pairs.

        Duplicate monomer types (equal as multisets) are merged; a duplicate
        with infinite count makes the merged count infinite.
        """
        merged: dict = {}
        order: dict = {}
        for mon, count in pairs:
            if count is not INF and (not isinstance(count, int) or count < 1):
                raise TbnValidationError(
                    f"monomer count must be >= 1 or inf, got {count!r}"
                )
            if mon in merged:
                old = merged[mon]
                merged[mon] = INF if (old is INF or count is INF) else old + count
                if order[mon].label is None and mon.label is not None:
                    order[mon] = mon
            else:
                merged[mon] = count
                order[mon] = mon
        monomers = sorted(order.values(), key=Monomer.canonical_key)
        tbn = cls(tuple(monomers), tuple(merged[m] for m in monomers))
        tbn._validate()
        return tbn

    def _validate(self) -> None:
        for mon, count in zip(self.monomer_types, self.counts):
            if mon.is_limiting and count is INF:
                raise TbnValidationError(
                    f"limiting monomer {mon} must have finite count"
                )
        for name in self.site_names():
            starred = self.total_site_count(SiteType(name, True))
            unstarred = self.total_site_count(SiteType(name, False))
            if starred > unstarred:
                raise TbnValidationError(
                    f"starred sites of {name!r} exceed unstarred "
                    f"({starred!r} > {unstarred!r}); starred sites must be limiting"
                )

    @property
    def n_types(self) -> int:
        return len(self.monomer_types)

    def site_names(self) -> list:
        names = set()
        for mon in self.monomer_types:
            names |= mon.site_names()
        return sorted(names)

    def total_site_count(self, s: SiteType) -> Count:
        """Total occurrences of the literal ``s`` across the TBN (with counts)."""
        total = 0
        for mon, count in zip(self.monomer_types, self.counts):
            occ = sum(1 for x in mon.sites if x == s)
            if occ == 0:
                continue
            if count is INF:
                return INF
            total += occ * count
        return total

    @property
    def limiting_indices(self) -> tuple:
        return tuple(
            i for i, m in enumerate(self.monomer_types) if m.is_limiting
        )

    @property
    def is_finite(self) -> bool:
        return all(c is not INF for c in self.counts)

    def total_monomers(self) -> Count:
        if not self.is_finite:
            return INF
        return sum(self.counts)  # type: ignore[arg-type]

    def index_of(self, mon: Monomer) -> int:
        return self.monomer_types.index(mon)

    def with_counts_capped(self, cap: int) -> "Tbn":
        """Replace infinite counts by ``cap`` copies (for brute-force oracles)."""
        counts = tuple(cap if c is INF else c for c in self.counts)
        return Tbn(self.monomer_types, counts)

    def monomer_by_label(self, token: str) -> int:
        """Resolve a label or 1-based index to a monomer-type index."""
        for i, mon in enumerate(self.monomer_types):
            if mon.label == token:
                return i
        if token.isdigit():
            idx = int(token) - 1
            if 0 <= idx < self.n_types:
                return idx
        raise TbnValidationError(f"unknown monomer label or index {token!r}")


@dataclass(frozen=True)
class Polymer:
    """A finite multiset of monomers as a count vector over the TBN ordering."""

    counts: tuple

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts):
            raise TbnValidationError("polymer counts must be nonnegative")

    @property
    def size(self) -> int:
        return sum(self.counts)

    def __add__(self, other: "Polymer") -> "Polymer":
        return Polymer(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __le__(self, other: "Polymer") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    def __sub__(self, other: "Polymer") -> "Polymer":
        return Polymer(tuple(a - b for a, b in zip(self.counts, other.counts)))

    def describe(self, tbn: Tbn) -> str:
        parts = []
        for count, mon in zip(self.counts, tbn.monomer_types):
            name = mon.label or "{" + " ".join(str(s) for s in mon.sites) + "}"
            parts.extend([name] * count)
        return " + ".join(parts)


def polymer_from_monomers(monomers: Sequence[Monomer], tbn: Tbn) -> Polymer:
    counts = [0] * tbn.n_types
    for mon in monomers:
        counts[tbn.index_of(mon)] += 1
    return Polymer(tuple(counts))


@dataclass(frozen=True)
class PartialConfiguration:
    """The non-singleton polymers of a configuration, canonically ordered."""

    polymers: tuple
    tbn: Tbn = field(compare=False)

    @classmethod
    def from_polymers(
        cls, polymers: Iterable[Polymer], tbn: Tbn, validate: bool = True
    ) -> "PartialConfiguration":
        polys = tuple(
            sorted(polymers, key=lambda p: p.counts, reverse=True)
        )
        pc = cls(polys, tbn)
        if validate:
            pc._validate()
        return pc

    def _validate(self) -> None:
        for p in self.polymers:
            if len(p.counts) != self.tbn.n_types:
                raise TbnValidationError("polymer has wrong dimension")
            if p.size < 2:
                raise TbnValidationError(
                    "partial configurations hold non-singleton polymers only"
                )
        usage = [0] * self.tbn.n_types
        for p in self.polymers:
            for i, c in enumerate(p.counts):
                usage[i] += c
        for i, (mon, count) in enumerate(
            zip(self.tbn.monomer_types, self.tbn.counts)
        ):
            if usage[i] > count:
                raise TbnValidationError(
                    f"monomer {mon} used {usage[i]} times, "
                    f"TBN supplies only {count!r}"
                )
            if mon.is_limiting and usage[i] != count:
                # leftovers of a limiting type become implied singletons,
                # which is only coherent if that singleton is self-saturated
                singleton = Polymer(
                    tuple(int(j == i) for j in range(self.tbn.n_types))
                )
                if not is_self_saturated(singleton, self.tbn):
                    raise TbnValidationError(
                        f"limiting monomer {mon} used {usage[i]} times, "
                        f"TBN supplies {count!r}"
                    )

    @property
    def n_polymers(self) -> int:
        return len(self.polymers)


def exposed_sites(p: Polymer, t: Tbn) -> Counter:
    """Leftover sites of a polymer after cancelling complementary pairs.

    Emits ``|net|`` copies of ``s`` (net > 0) or of ``s*`` (net < 0) per name.
    """
    result: Counter = Counter()
    for name in t.site_names():
        s = SiteType(name, False)
        net = sum(
            count * mon.net_count(s)
            for count, mon in zip(p.counts, t.monomer_types)
        )
        if net > 0:
            result[s] = net
        elif net < 0:
            result[s.complement()] = -net
    return result


def is_self_saturated(p: Polymer, t: Tbn) -> bool:
    """True iff the polymer exposes no starred site."""
    return not any(s.starred for s in exposed_sites(p, t))


def merge_count(pc: PartialConfiguration) -> int:
    """Pairwise merges needed to build the configuration from singletons."""
    return sum(p.size for p in pc.polymers) - pc.n_polymers


def canonicalize(pc: PartialConfiguration) -> PartialConfiguration:
    """Sort polymers non-increasing lexicographically.  Idempotent."""
    return PartialConfiguration.from_polymers(pc.polymers, pc.tbn, validate=False)


@dataclass(frozen=True)
class ParseReport:
    """What normalization did to the input during parsing."""

    flipped_names: tuple = ()
    merged_duplicate_lines: int = 0


def _tokenize_tbn(text: str):
    """Yield (label, sites, count, line_no) per monomer line."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label = None
        if ":" in line:
            label_part, _, line = line.partition(":")
            label = label_part.strip()
            if not label:
                raise TbnSyntaxError("empty label before ':'", line_no)
            if any(c.isspace() or c in _FORBIDDEN_NAME_CHARS for c in label):
                raise TbnSyntaxError(f"invalid label {label!r}", line_no)
            line = line.strip()
        count: Count = 1
        if "," in line:
            line, _, count_part = line.rpartition(",")
            count_part = count_part.strip()
            line = line.strip()
            if count_part == "inf":
                count = INF
            elif count_part.isdigit():
                count = int(count_part)
                if count < 1:
                    raise TbnSyntaxError(
                        "count must be >= 1 or 'inf'", line_no
                    )
            else:
                raise TbnSyntaxError(
                    f"count must be a positive integer or 'inf', "
                    f"got {count_part!r}",
                    line_no,
                )
        tokens = line.split()
        if not tokens:
            raise TbnSyntaxError("monomer has no sites", line_no)
        try:
            sites = [SiteType.parse(tok) for tok in tokens]
        except TbnValidationError as exc:
            raise TbnSyntaxError(str(exc), line_no) from exc
        yield label, sites, count, line_no


def parse_tbn_with_report(text: str):
    """Parse .tbn text, returning the TBN and a report of normalizations.

    Grammar, one monomer per line::

        [label :] site [site ...] [, count]

    where a site is a name with optional trailing ``*``, count is a positive
    integer or ``inf``; ``#`` starts a comment, blank lines are ignored.
    """
    entries = list(_tokenize_tbn(text))
    if not entries:
        return Tbn((), ()), ParseReport()

    starred_total: dict = {}
    unstarred_total: dict = {}
    for _, sites, count, _ in entries:
        for s in sites:
            bucket = starred_total if s.starred else unstarred_total
            old = bucket.get(s.name, 0)
            if old is INF or count is INF:
                bucket[s.name] = INF
            else:
                bucket[s.name] = old + count

    flipped = []
    for name in sorted(set(starred_total) | set(unstarred_total)):
        st = starred_total.get(name, 0)
        un = unstarred_total.get(name, 0)
        if st is INF and un is INF:
            raise TbnValidationError(
                f"site {name!r} has infinite count on both starred and "
                f"unstarred sides"
            )
        if st > un:
            flipped.append(name)
    flip_set = set(flipped)

    pairs = []
    seen_keys = set()
    merged_lines = 0
    for label, sites, count, _ in entries:
        if flip_set:
            sites = [
                s.complement() if s.name in flip_set else s for s in sites
            ]
        mon = Monomer(tuple(sites), label=label)
        if mon in seen_keys:
            merged_lines += 1
        seen_keys.add(mon)
        pairs.append((mon, count))

    tbn = Tbn.from_monomers(pairs)
    return tbn, ParseReport(tuple(flipped), merged_lines)


def parse_tbn(text: str) -> Tbn:
    tbn, _ = parse_tbn_with_report(text)
    return tbn


def render_tbn(t: Tbn) -> str:
    """Canonical .tbn text; ``parse_tbn(render_tbn(t)) == t``."""
    lines = []
    for mon, count in zip(t.monomer_types, t.counts):
        line = str(mon)
        if count is INF:
            line += ", inf"
        elif count != 1:
            line += f", {count}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")
