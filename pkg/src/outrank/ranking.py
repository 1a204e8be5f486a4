"""Exploitation of a credibility matrix into rankings.

Two complete preorders are distilled from the matrix (best-first and
worst-first) with the classic moving-cut procedure, and their intersection
yields a partial preorder whose pairs are preferred, indifferent, or
incomparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Sequence

from .electre import CredibilityMatrix

__all__ = [
    "discrimination_s",
    "CompletePreorder",
    "PartialPreorder",
    "Relation",
    "distill",
    "intersect",
    "relation_counts",
]

# s(lambda) = S_BETA + S_ALPHA * lambda, the classical discrimination ramp.
S_ALPHA = -0.15
S_BETA = 0.30

# Arc rule at the current cut: with the strict rule an arc needs credibility
# strictly above the retained level; the inclusive variant also fires ties at
# the level.  Strict is the default; it reproduces the bundled reference
# tables at every macro-criterion node.
INCLUSIVE_ARC_CUT = False


def discrimination_s(lam: float) -> float:
    """Discrimination threshold at credibility level ``lam``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"level must lie in [0, 1], got {lam!r}")
    return S_BETA + S_ALPHA * lam


@dataclass(frozen=True)
class CompletePreorder:
    """Ordered classes of alternatives, best class first."""

    classes: tuple[frozenset[str], ...]

    def ranks(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for i, cls in enumerate(self.classes):
            for alt in cls:
                out[alt] = i
        return out

    @property
    def alternatives(self) -> frozenset[str]:
        acc: set[str] = set()
        for cls in self.classes:
            acc |= cls
        return frozenset(acc)


class Relation(str, Enum):
    PREFERRED = "P"          # first preferred to second
    PREFERRED_BY = "p"       # second preferred to first
    INDIFFERENT = "I"
    INCOMPARABLE = "R"

    def flip(self) -> "Relation":
        if self is Relation.PREFERRED:
            return Relation.PREFERRED_BY
        if self is Relation.PREFERRED_BY:
            return Relation.PREFERRED
        return self


@dataclass(frozen=True)
class PartialPreorder:
    """One relation per unordered pair, stored under (a, b) with a < b."""

    alternatives: tuple[str, ...]
    relations: Mapping[tuple[str, str], Relation]

    def relation(self, a: str, b: str) -> Relation:
        if a == b:
            return Relation.INDIFFERENT
        if a < b:
            return self.relations[(a, b)]
        return self.relations[(b, a)].flip()

    def outranks(self, a: str, b: str) -> bool:
        """a S b: preferred or indifferent."""
        return self.relation(a, b) in (Relation.PREFERRED, Relation.INDIFFERENT)


def _distillate(
    sigma: Sequence[Sequence[float]],
    members: list[int],
    descending: bool,
    s: Callable[[float], float],
) -> list[int]:
    """One distillate: the extremal-qualification subset of ``members``."""
    if len(members) == 1:
        return list(members)
    lam = max(sigma[x][y] for x in members for y in members if x != y)
    for _ in range(len(members) * 64 + 8):
        cut = lam - s(lam)
        below = [
            sigma[x][y]
            for x in members
            for y in members
            if x != y and sigma[x][y] < cut
        ]
        lam_next = max(below) if below else 0.0
        qual = {x: 0 for x in members}
        for x in members:
            for y in members:
                if x == y:
                    continue
                sxy = sigma[x][y]
                at_cut = sxy >= lam_next if INCLUSIVE_ARC_CUT else sxy > lam_next
                if at_cut and sxy - sigma[y][x] > s(sxy):
                    qual[x] += 1
                    qual[y] -= 1
        best = max(qual.values()) if descending else min(qual.values())
        chosen = [x for x in members if qual[x] == best]
        if len(chosen) == 1 or lam_next <= 0.0:
            return chosen
        members = chosen
        lam = lam_next
    raise RuntimeError("distillation failed to converge")


def distill_indexed(
    sigma: Sequence[Sequence[float]], n: int, direction: str
) -> list[list[int]]:
    """Distill an n x n credibility array; returns classes of indices, best first."""
    if n < 1:
        raise ValueError("empty credibility matrix")
    descending = direction == "descending"
    if not descending and direction != "ascending":
        raise ValueError(f"unknown direction {direction!r}")
    remaining = list(range(n))
    classes: list[list[int]] = []
    while remaining:
        chosen = _distillate(sigma, remaining, descending, discrimination_s)
        classes.append(sorted(chosen))
        remaining = [x for x in remaining if x not in chosen]
    if not descending:
        classes.reverse()
    return classes


def distill(matrix: CredibilityMatrix, direction: str) -> CompletePreorder:
    """Complete preorder from a credibility matrix.

    ``descending`` peels best classes off the top; ``ascending`` peels worst
    classes off the bottom.  Plural distillates are genuine ex-aequo classes.
    """
    alts = matrix.alternatives
    classes = distill_indexed(matrix.values, len(alts), direction)
    return CompletePreorder(
        classes=tuple(frozenset(alts[i] for i in cls) for cls in classes)
    )


def intersect(desc: CompletePreorder, asc: CompletePreorder) -> PartialPreorder:
    """Partial preorder from the two complete preorders.

    a P b when a is strictly better in one and not worse in the other; equal
    ranks in both mean indifference; opposite strict orders mean
    incomparability.
    """
    if desc.alternatives != asc.alternatives:
        raise ValueError("preorders rank different alternative sets")
    alts = tuple(sorted(desc.alternatives))
    rd = desc.ranks()
    ra = asc.ranks()
    relations: dict[tuple[str, str], Relation] = {}
    for i, a in enumerate(alts):
        for b in alts[i + 1:]:
            d_cmp = (rd[a] < rd[b]) - (rd[a] > rd[b])
            a_cmp = (ra[a] < ra[b]) - (ra[a] > ra[b])
            if d_cmp == 0 and a_cmp == 0:
                rel = Relation.INDIFFERENT
            elif d_cmp >= 0 and a_cmp >= 0:
                rel = Relation.PREFERRED
            elif d_cmp <= 0 and a_cmp <= 0:
                rel = Relation.PREFERRED_BY
            else:
                rel = Relation.INCOMPARABLE
            relations[(a, b)] = rel
    return PartialPreorder(alternatives=alts, relations=relations)


def relation_counts(preorder: PartialPreorder) -> dict[str, tuple[int, int]]:
    """Per alternative: (how many others it outranks, how many outrank it)."""
    out: dict[str, tuple[int, int]] = {}
    for a in preorder.alternatives:
        outranked = sum(
            1 for b in preorder.alternatives if b != a and preorder.outranks(a, b)
        )
        outranking = sum(
            1 for b in preorder.alternatives if b != a and preorder.outranks(b, a)
        )
        out[a] = (outranked, outranking)
    return out
