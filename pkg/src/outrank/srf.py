"""Card-deck weight elicitation.

Weights come from a per-node deck: the node's children are ranked into
importance levels (least important first), blank cards widen the gap between
adjacent levels, and the anchor is either the classical top/bottom weight
ratio ``z`` or the number of blank cards ``e0`` between a zero-importance
level and the least important children.  Both the gaps and the anchor may be
imprecise (integer intervals), which spans a finite space of weight vectors.

All deck arithmetic is exact (Fractions); normalization happens per node and
global leaf weights are products of local shares along the root path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

from .model import CriterionTree, ValidationError

__all__ = [
    "CardDeck",
    "srf_weights_from_z",
    "srf2_weights",
    "z_of_e0",
    "normalize_child_weights",
    "local_weight_space",
    "elementary_weights",
]


@dataclass(frozen=True)
class CardDeck:
    """Ranking-with-blank-cards information for one non-elementary node.

    ``levels`` partition the node's children, least important first.  ``gaps``
    holds one integer interval [lo, hi] of blank cards per adjacent level
    pair.  ``zero_gap`` is the integer interval for the blank cards between
    the zero level and the least important level; ``z_range`` is the legacy
    ratio interval.  Exactly one of the two anchors is required once the deck
    has two or more levels.
    """

    node: str
    levels: tuple[tuple[str, ...], ...]
    gaps: tuple[tuple[int, int], ...] = ()
    zero_gap: Optional[tuple[int, int]] = None
    z_range: Optional[tuple[Fraction, Fraction]] = None

    def validate(self, children: Sequence[str]) -> list[str]:
        errors: list[str] = []
        placed = [c for level in self.levels for c in level]
        if sorted(placed) != sorted(children):
            errors.append(
                f"deck for {self.node!r} must place each child exactly once "
                f"(placed {placed}, children {list(children)})"
            )
        if any(not level for level in self.levels):
            errors.append(f"deck for {self.node!r} has an empty level")
        if len(self.gaps) != max(len(self.levels) - 1, 0):
            errors.append(f"deck for {self.node!r} needs one gap interval per adjacent level pair")
        for lo, hi in self.gaps:
            if lo < 0 or hi < lo:
                errors.append(f"deck for {self.node!r}: bad gap interval [{lo}, {hi}]")
        if self.zero_gap is not None:
            lo, hi = self.zero_gap
            if lo < 0 or hi < lo:
                errors.append(f"deck for {self.node!r}: bad zero-level interval [{lo}, {hi}]")
        if self.z_range is not None:
            lo_z, hi_z = self.z_range
            if not (1 < lo_z <= hi_z):
                errors.append(f"deck for {self.node!r}: z interval must satisfy 1 < lo <= hi")
        if len(self.levels) >= 2:
            if (self.zero_gap is None) == (self.z_range is None):
                errors.append(
                    f"deck for {self.node!r} needs exactly one of a zero-level interval or a z interval"
                )
        return errors


def srf_weights_from_z(
    level_count: int, gaps: Sequence[int], z: Fraction | int | float
) -> tuple[Fraction, ...]:
    """Non-normalized per-level weights anchored by the weight ratio z.

    Level s (1-based, increasing importance) gets
    ``1 + (z - 1) * sum_{r<s}(e_r + 1) / sum_{r<q}(e_r + 1)``, so the least
    important level weighs 1 and the most important weighs z.
    """
    z = z if isinstance(z, Fraction) else Fraction(repr(float(z)) if isinstance(z, float) else z)
    if level_count < 2:
        raise ValueError("z-anchored decks need at least two levels")
    if len(gaps) != level_count - 1:
        raise ValueError("need one gap per adjacent level pair")
    if any(g < 0 for g in gaps):
        raise ValueError("negative gap")
    if z <= 1:
        raise ValueError("z must be > 1")
    total = sum(g + 1 for g in gaps)
    weights = []
    cumulative = 0
    for s in range(level_count):
        weights.append(1 + Fraction(cumulative, total) * (z - 1))
        if s < level_count - 1:
            cumulative += gaps[s] + 1
    return tuple(weights)


def srf2_weights(level_count: int, e0: int, gaps: Sequence[int]) -> tuple[Fraction, ...]:
    """Non-normalized per-level weights anchored by e0 zero-level blank cards.

    Level s weighs ``(e0 + 1) + sum_{r<s}(e_r + 1)``: counting cards up from
    the zero level, every blank card and every level step adds one.
    """
    if level_count < 1:
        raise ValueError("need at least one level")
    if e0 < 0:
        raise ValueError("negative zero-level card count")
    if len(gaps) != level_count - 1:
        raise ValueError("need one gap per adjacent level pair")
    if any(g < 0 for g in gaps):
        raise ValueError("negative gap")
    weights = []
    w = Fraction(e0 + 1)
    for s in range(level_count):
        weights.append(w)
        if s < level_count - 1:
            w += gaps[s] + 1
    return tuple(weights)


def z_of_e0(e0: int, gaps: Sequence[int]) -> Fraction:
    """Weight ratio implied by an e0-anchored deck.

    ``z = (sum(e_r + 1) + e0 + 1) / (e0 + 1)``; the inverse map
    ``e0 = (sum(e_r + 1) - (z - 1)) / (z - 1)`` need not be an integer.
    """
    if e0 < 0:
        raise ValueError("negative zero-level card count")
    if any(g < 0 for g in gaps):
        raise ValueError("negative gap")
    return Fraction(sum(g + 1 for g in gaps) + e0 + 1, e0 + 1)


def normalize_child_weights(
    deck: CardDeck, level_weights: Sequence[Fraction]
) -> dict[str, Fraction]:
    """Spread per-level weights over children and normalize to sum 1."""
    raw: dict[str, Fraction] = {}
    for level, w in zip(deck.levels, level_weights):
        for child in level:
            raw[child] = w
    total = sum(raw.values())
    return {child: w / total for child, w in raw.items()}


@dataclass(frozen=True)
class DeckChoice:
    """One concrete resolution of a deck's intervals."""

    e0: Optional[int]
    gaps: tuple[int, ...]
    z: Optional[Fraction] = None

    def describe(self) -> str:
        parts = []
        if self.e0 is not None:
            parts.append(f"e0={self.e0}")
        if self.z is not None:
            parts.append(f"z={self.z}")
        if self.gaps:
            parts.append("gaps=" + ",".join(str(g) for g in self.gaps))
        return " ".join(parts) or "fixed"


def deck_weights(deck: CardDeck, choice: DeckChoice) -> dict[str, Fraction]:
    """Normalized child weights for one interval resolution."""
    q = len(deck.levels)
    if q == 1:
        only = deck.levels[0]
        share = Fraction(1, len(only))
        return {child: share for child in only}
    if choice.z is not None:
        levels = srf_weights_from_z(q, choice.gaps, choice.z)
    else:
        assert choice.e0 is not None
        levels = srf2_weights(q, choice.e0, choice.gaps)
    return normalize_child_weights(deck, levels)


def iter_choices(deck: CardDeck) -> Iterator[DeckChoice]:
    """Enumerate the integer resolutions of a deck's intervals.

    Legacy z-interval decks are continuous; only their endpoints are yielded
    (sampling draws z uniformly between them).
    """
    gap_ranges = [range(lo, hi + 1) for lo, hi in deck.gaps]
    if len(deck.levels) == 1:
        yield DeckChoice(e0=None, gaps=())
        return
    if deck.z_range is not None:
        lo_z, hi_z = deck.z_range
        zs = [lo_z] if lo_z == hi_z else [lo_z, hi_z]
        for gaps in itertools.product(*gap_ranges):
            for z in zs:
                yield DeckChoice(e0=None, gaps=tuple(gaps), z=z)
        return
    assert deck.zero_gap is not None
    lo, hi = deck.zero_gap
    for gaps in itertools.product(*gap_ranges):
        for e0 in range(lo, hi + 1):
            yield DeckChoice(e0=e0, gaps=tuple(gaps))


def local_weight_space(deck: CardDeck) -> list[tuple[DeckChoice, dict[str, Fraction]]]:
    """All normalized local weight vectors the deck admits.

    Exact decks yield a single vector; z-interval decks report their endpoint
    vectors (the space in between is continuous).
    """
    if deck.z_range is not None and any(lo != hi for lo, hi in deck.gaps):
        pass  # endpoints per gap choice are still enumerable
    out = []
    seen: set[tuple[tuple[str, Fraction], ...]] = set()
    for choice in iter_choices(deck):
        weights = deck_weights(deck, choice)
        key = tuple(sorted(weights.items()))
        if key not in seen:
            seen.add(key)
            out.append((choice, weights))
    return out


def elementary_weights(
    tree: CriterionTree,
    decks: Mapping[str, CardDeck],
    choices: Mapping[str, DeckChoice],
) -> dict[str, Fraction]:
    """Global leaf weights from one local choice per non-elementary node.

    A leaf's weight is the product of the normalized local shares along the
    path from the root; the results sum to exactly 1.
    """
    weights: dict[str, Fraction] = {}

    def walk(node_id: str, factor: Fraction) -> None:
        node = tree.node(node_id)
        if node.is_elementary:
            weights[node_id] = factor
            return
        deck = decks.get(node_id)
        if deck is None:
            raise ValidationError([f"missing deck for non-elementary node {node_id!r}"])
        local = deck_weights(deck, choices[node_id])
        for child in node.children:
            walk(child, factor * local[child])

    walk(tree.root, Fraction(1))
    return weights
