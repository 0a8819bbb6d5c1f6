"""Physical visiting order between items and its agreement with DAG arcs."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping

from .dag import Dag

Visits = Mapping[str, Mapping[str, dt.date]]  # subject -> item -> first visit


class Direction(Enum):
    FORWARD = "i->j"
    BACKWARD = "j->i"
    UNORDERED = "unordered"


@dataclass(frozen=True)
class PrecedenceEntry:
    i: str
    j: str
    n_i_first: int
    n_j_first: int
    n_tied: int
    n_both: int

    def __post_init__(self):
        if self.n_i_first + self.n_j_first + self.n_tied != self.n_both:
            raise ValueError("precedence counts do not add up to n_both")

    def swapped(self) -> "PrecedenceEntry":
        return PrecedenceEntry(self.j, self.i, self.n_j_first, self.n_i_first,
                               self.n_tied, self.n_both)


def precedence_counts(dedup: Visits, i: str, j: str) -> PrecedenceEntry:
    """First-visit precedence over subjects who visited both items."""
    if i == j:
        raise ValueError("need two distinct items")
    a = b = tied = 0
    for visits in dedup.values():
        ti, tj = visits.get(i), visits.get(j)
        if ti is None or tj is None:
            continue
        if ti < tj:
            a += 1
        elif tj < ti:
            b += 1
        else:
            tied += 1
    return PrecedenceEntry(i, j, a, b, tied, a + b + tied)


def precedence_table(dedup: Visits, items: Iterable[str]) -> list[PrecedenceEntry]:
    return [precedence_counts(dedup, i, j) for i, j in combinations(sorted(items), 2)]


def physical_order(entry: PrecedenceEntry) -> Direction:
    """Majority of strict first-visit precedences; ties are ignored."""
    if entry.n_i_first > entry.n_j_first:
        return Direction.FORWARD
    if entry.n_j_first > entry.n_i_first:
        return Direction.BACKWARD
    return Direction.UNORDERED


VERDICTS = ("agree", "disagree", "tie", "insufficient")


@dataclass(frozen=True)
class ArcVerdict:
    parent: str
    child: str
    n_parent_first: int
    n_child_first: int
    n_tied: int
    n_both: int
    verdict: str


@dataclass(frozen=True)
class AgreementReport:
    arcs: tuple[ArcVerdict, ...]

    def count(self, verdict: str) -> int:
        return sum(a.verdict == verdict for a in self.arcs)

    @property
    def counts(self) -> dict[str, int]:
        return {v: self.count(v) for v in VERDICTS}

    @property
    def fractions(self) -> dict[str, float]:
        n = len(self.arcs)
        return {v: (self.count(v) / n if n else 0.0) for v in VERDICTS}

    @property
    def agreement(self) -> float | None:
        """agree / (agree + disagree); None when no arc was decided."""
        decided = self.count("agree") + self.count("disagree")
        return self.count("agree") / decided if decided else None


def conjecture_check(g: Dag, dedup: Visits, min_support: int = 30) -> AgreementReport:
    """Compare every arc's direction with the physical order of its endpoints.

    An arc u->v agrees when more subjects visited u before v than the
    reverse. Arcs backed by fewer than ``min_support`` joint visitors are
    marked insufficient.
    """
    out = []
    for u, v in g.sorted_arcs():
        e = precedence_counts(dedup, u, v)
        if e.n_both < min_support:
            verdict = "insufficient"
        else:
            verdict = {Direction.FORWARD: "agree", Direction.BACKWARD: "disagree",
                       Direction.UNORDERED: "tie"}[physical_order(e)]
        out.append(ArcVerdict(u, v, e.n_i_first, e.n_j_first, e.n_tied, e.n_both, verdict))
    return AgreementReport(tuple(out))
