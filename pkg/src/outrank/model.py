"""Core problem model: criterion hierarchy, performances, thresholds, interactions.

A decision problem couples a tree of criteria with alternative performances on
the leaves (elementary criteria), per-leaf discrimination thresholds, and
optional interaction declarations between leaves.  Everything is validated up
front; downstream modules treat a :class:`Problem` as immutable and internally
consistent, so it can be shared freely across threads and processes.

Performances and thresholds are kept as exact rationals (`fractions.Fraction`)
so that piecewise threshold comparisons never wobble on float noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Numeric = Union[int, float, str, Fraction]


class Direction(str, Enum):
    GAIN = "gain"
    COST = "cost"


class Scale(str, Enum):
    CARDINAL = "cardinal"
    ORDINAL = "ordinal"
    DICHOTOMOUS = "dichotomous"


class InteractionKind(str, Enum):
    STRENGTHENING = "strengthening"
    WEAKENING = "weakening"
    ANTAGONISM = "antagonism"


def as_fraction(value: Numeric) -> Fraction:
    """Convert a numeric literal to an exact Fraction.

    Floats go through their shortest decimal repr, so a performance written as
    4.1 in a document becomes exactly 41/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric performances")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not a number: {value!r}")


class ValidationError(ValueError):
    """Raised when a problem document violates a structural invariant.

    Carries the full list of violations found, not just the first one.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) or "invalid problem")


@dataclass(frozen=True)
class CriterionNode:
    id: str
    label: str = ""
    parent: Optional[str] = None
    children: tuple[str, ...] = ()
    direction: Optional[Direction] = None   # elementary only
    scale: Optional[Scale] = None           # elementary only
    unit: str = ""
    bounds: Optional[tuple[Fraction, Fraction]] = None  # declared range, ordinal mostly

    @property
    def is_elementary(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class CriterionTree:
    """Rooted tree of criteria; leaves are the elementary criteria."""

    nodes: Mapping[str, CriterionNode]
    root: str

    def node(self, node_id: str) -> CriterionNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise KeyError(f"unknown criterion id: {node_id!r}") from None

    @property
    def elementary_ids(self) -> tuple[str, ...]:
        """All leaf ids, in depth-first document order."""
        out: list[str] = []

        def walk(nid: str) -> None:
            node = self.nodes[nid]
            if node.is_elementary:
                out.append(nid)
            else:
                for child in node.children:
                    walk(child)

        walk(self.root)
        return tuple(out)

    @property
    def non_elementary_ids(self) -> tuple[str, ...]:
        out: list[str] = []

        def walk(nid: str) -> None:
            node = self.nodes[nid]
            if not node.is_elementary:
                out.append(nid)
                for child in node.children:
                    walk(child)

        walk(self.root)
        return tuple(out)

    def path_to_root(self, node_id: str) -> list[str]:
        path = [node_id]
        while self.nodes[path[-1]].parent is not None:
            path.append(self.nodes[path[-1]].parent)  # type: ignore[arg-type]
        return path


def elementary_descendants(tree: CriterionTree, node_id: str) -> frozenset[str]:
    """Leaf set under ``node_id``; a leaf maps to the singleton of itself."""
    node = tree.node(node_id)
    if node.is_elementary:
        return frozenset((node_id,))
    acc: set[str] = set()
    for child in node.children:
        acc |= elementary_descendants(tree, child)
    return frozenset(acc)


@dataclass(frozen=True)
class PerformanceTable:
    """Alternative-by-leaf values in each criterion's native unit."""

    alternatives: tuple[str, ...]
    values: Mapping[tuple[str, str], Fraction]
    labels: Mapping[str, str] = field(default_factory=dict)

    def value(self, alternative: str, criterion: str) -> Fraction:
        try:
            return self.values[(alternative, criterion)]
        except KeyError:
            raise KeyError(f"no performance for ({alternative!r}, {criterion!r})") from None


@dataclass(frozen=True)
class ThresholdBand:
    """Thresholds applying to reference values up to ``up_to`` (inclusive).

    ``up_to=None`` marks the last band (no upper limit).  ``veto`` is optional;
    without it the criterion never opposes an outranking outright.
    """

    q: Fraction
    p: Fraction
    up_to: Optional[Fraction] = None
    veto: Optional[Fraction] = None


@dataclass(frozen=True)
class ThresholdSpec:
    """Per-criterion ordered threshold bands, selected by the reference value."""

    bands: Mapping[str, tuple[ThresholdBand, ...]]

    def band_for(self, criterion: str, reference: Fraction) -> ThresholdBand:
        bands = self.bands.get(criterion)
        if not bands:
            raise KeyError(f"no thresholds declared for {criterion!r}")
        for band in bands:
            if band.up_to is None or reference <= band.up_to:
                return band
        return bands[-1]


# Dichotomous criteria get implicit thresholds: a 0/1 gap is strict preference,
# equality is indifference, and there is no veto.
DICHOTOMOUS_BAND = ThresholdBand(q=Fraction(0), p=Fraction(1))


@dataclass(frozen=True)
class InteractionDeclaration:
    """A pairwise interaction between elementary criteria.

    For strengthening/weakening the pair is unordered.  For antagonism it is
    ordered: ``second`` exercises the effect over ``first``, i.e. the presence
    of ``second`` against an outranking reduces ``first``'s contribution in
    its favour.
    """

    kind: InteractionKind
    first: str
    second: str

    @property
    def key(self) -> tuple[str, ...]:
        if self.kind is InteractionKind.ANTAGONISM:
            return (self.first, self.second)
        return tuple(sorted((self.first, self.second)))


@dataclass(frozen=True)
class Problem:
    """A fully validated decision problem.

    ``decks`` maps non-elementary node ids to card decks (see `outrank.srf`);
    it may be empty for purely deterministic uses of the outranking core.
    """

    tree: CriterionTree
    performance: PerformanceTable
    thresholds: ThresholdSpec
    interactions: tuple[InteractionDeclaration, ...]
    decks: Mapping[str, "object"] = field(default_factory=dict)

    _validated: bool = field(default=False, compare=False, repr=False)

    @property
    def alternatives(self) -> tuple[str, ...]:
        return self.performance.alternatives


def _check_tree(tree: CriterionTree, errors: list[str]) -> None:
    roots = [nid for nid, n in tree.nodes.items() if n.parent is None]
    if len(roots) != 1:
        errors.append(f"hierarchy must have exactly one root, found {len(roots)}")
    if tree.root not in tree.nodes:
        errors.append(f"unknown root id {tree.root!r}")
        return
    if tree.nodes[tree.root].parent is not None:
        errors.append(f"declared root {tree.root!r} has a parent")

    seen: set[str] = set()

    def walk(nid: str) -> None:
        if nid in seen:
            errors.append(f"non-tree hierarchy: {nid!r} reachable twice")
            return
        seen.add(nid)
        node = tree.nodes.get(nid)
        if node is None:
            errors.append(f"unknown identifier {nid!r} referenced as a child")
            return
        for child in node.children:
            child_node = tree.nodes.get(child)
            if child_node is None:
                errors.append(f"unknown identifier {child!r} in children of {nid!r}")
                continue
            if child_node.parent != nid:
                errors.append(f"parent/child mismatch between {nid!r} and {child!r}")
            walk(child)

    walk(tree.root)
    for nid, node in tree.nodes.items():
        if nid not in seen:
            errors.append(f"non-tree hierarchy: {nid!r} not reachable from the root")
        if node.is_elementary:
            if node.direction is None:
                errors.append(f"elementary criterion {nid!r} needs a preference direction")
            if node.scale is None:
                errors.append(f"elementary criterion {nid!r} needs a scale")
        else:
            if node.direction is not None or node.scale is not None:
                errors.append(f"non-elementary criterion {nid!r} must not carry direction/scale")


def _check_performance(tree: CriterionTree, perf: PerformanceTable, errors: list[str]) -> None:
    leaves = tree.elementary_ids
    leaf_set = set(leaves)
    if len(set(perf.alternatives)) != len(perf.alternatives):
        dupes = sorted({a for a in perf.alternatives if perf.alternatives.count(a) > 1})
        errors.append(f"duplicate alternative id: {', '.join(dupes)}")
    for (alt, crit) in perf.values:
        if alt not in perf.alternatives:
            errors.append(f"unknown identifier {alt!r} in performance table")
        if crit not in leaf_set:
            errors.append(f"unknown identifier {crit!r} in performance table")
    for alt in perf.alternatives:
        for crit in leaves:
            if (alt, crit) not in perf.values:
                errors.append(f"missing performance cell ({alt!r}, {crit!r})")
                continue
            value = perf.values[(alt, crit)]
            node = tree.nodes[crit]
            if node.scale is Scale.DICHOTOMOUS and value not in (0, 1):
                errors.append(f"dichotomous cell ({alt!r}, {crit!r}) must be 0 or 1, got {value}")
            if node.bounds is not None:
                lo, hi = node.bounds
                if not (lo <= value <= hi):
                    errors.append(
                        f"performance ({alt!r}, {crit!r})={value} outside declared range [{lo}, {hi}]"
                    )


def _check_thresholds(tree: CriterionTree, thr: ThresholdSpec, errors: list[str]) -> None:
    for crit in tree.elementary_ids:
        node = tree.nodes[crit]
        bands = thr.bands.get(crit)
        if node.scale is Scale.DICHOTOMOUS:
            # implicit thresholds; a declared band is a mistake
            if bands:
                errors.append(f"dichotomous criterion {crit!r} must not declare thresholds")
            continue
        if not bands:
            errors.append(f"no thresholds declared for {crit!r}")
            continue
        last_up_to: Optional[Fraction] = None
        for i, band in enumerate(bands):
            if band.q < 0:
                errors.append(f"{crit!r} band {i}: q must be >= 0")
            if band.p <= band.q:
                errors.append(f"{crit!r} band {i}: p <= q")
            if band.veto is not None and band.veto <= band.p:
                errors.append(f"{crit!r} band {i}: v <= p")
            is_last = i == len(bands) - 1
            if is_last:
                if band.up_to is not None:
                    errors.append(f"{crit!r}: last band must be unbounded (band gap above {band.up_to})")
            else:
                if band.up_to is None:
                    errors.append(f"{crit!r} band {i}: only the last band may be unbounded (overlap)")
                elif last_up_to is not None and band.up_to <= last_up_to:
                    errors.append(f"{crit!r} band {i}: band boundaries must increase (gap/overlap)")
            if band.up_to is not None:
                last_up_to = band.up_to


def _check_interactions(
    tree: CriterionTree, interactions: Sequence[InteractionDeclaration], errors: list[str]
) -> None:
    leaf_set = set(tree.elementary_ids)
    seen_pairs: set[tuple[str, ...]] = set()
    seen_antagonism: set[tuple[str, str]] = set()
    for decl in interactions:
        for cid in (decl.first, decl.second):
            if cid not in tree.nodes:
                errors.append(f"unknown identifier {cid!r} in interaction declaration")
            elif cid not in leaf_set:
                errors.append(f"interaction references non-elementary criterion {cid!r}")
        if decl.first == decl.second:
            errors.append(f"interaction pairs a criterion with itself: {decl.first!r}")
            continue
        if decl.kind is InteractionKind.ANTAGONISM:
            key = (decl.first, decl.second)
            if key in seen_antagonism:
                errors.append(f"duplicate antagonism declaration {key}")
            seen_antagonism.add(key)
        else:
            key = tuple(sorted((decl.first, decl.second)))
            if key in seen_pairs:
                errors.append(f"duplicate strengthening/weakening declaration for pair {key}")
            seen_pairs.add(key)


def validate_problem(
    tree: CriterionTree,
    performance: PerformanceTable,
    thresholds: ThresholdSpec,
    interactions: Iterable[InteractionDeclaration] = (),
    decks: Optional[Mapping[str, "object"]] = None,
) -> Problem:
    """Validate a problem; returns it or raises :class:`ValidationError`.

    Validating an already-validated :class:`Problem` is the identity.
    """
    errors: list[str] = []
    interactions = tuple(interactions)
    _check_tree(tree, errors)
    if not errors:
        _check_performance(tree, performance, errors)
        _check_thresholds(tree, thresholds, errors)
        _check_interactions(tree, interactions, errors)
    if errors:
        raise ValidationError(errors)
    return Problem(
        tree=tree,
        performance=performance,
        thresholds=thresholds,
        interactions=interactions,
        decks=dict(decks or {}),
        _validated=True,
    )


def revalidate(problem: Problem) -> Problem:
    """Idempotent re-validation; a validated problem is returned unchanged."""
    if problem._validated:
        return problem
    return validate_problem(
        problem.tree, problem.performance, problem.thresholds, problem.interactions, problem.decks
    )


def effective_band(problem_thresholds: ThresholdSpec, tree: CriterionTree,
                   criterion: str, reference: Fraction) -> ThresholdBand:
    """Threshold band for ``criterion`` at a reference performance.

    Dichotomous criteria carry the implicit (q=0, p=1, no veto) band.
    """
    node = tree.node(criterion)
    if node.scale is Scale.DICHOTOMOUS:
        return DICHOTOMOUS_BAND
    return problem_thresholds.band_for(criterion, reference)
