"""Valued outranking core: partial indices, node concordance, credibility.

For an ordered pair (a, b), each elementary criterion contributes a partial
concordance (how much it supports "a at least as good as b") and a partial
discordance (how much it opposes it).  At every non-elementary node these
combine into a weighted concordance, adjusted by declared interaction effects
between the node's leaves, and the concordance is then discounted by strongly
opposing leaves into the credibility index.

Partial indices are exact rationals; node-level aggregation mixes in sampled
float coefficients and returns floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .model import (
    Direction,
    InteractionDeclaration,
    InteractionKind,
    Problem,
    ThresholdBand,
    effective_band,
    elementary_descendants,
)

__all__ = [
    "ParameterVector",
    "CredibilityMatrix",
    "advantage",
    "partial_concordance",
    "partial_discordance",
    "concordance",
    "credibility",
    "credibility_matrix",
]

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ParameterVector:
    """One compatible parameter sample: leaf weights plus interaction coefficients.

    ``pair_coefficients`` maps sorted leaf pairs to a strengthening (> 0) or
    weakening (< 0) coefficient; ``antagonism_coefficients`` maps ordered
    (beneficiary, antagonist) pairs to a positive coefficient.
    """

    weights: Mapping[str, float]
    pair_coefficients: Mapping[tuple[str, str], float] = field(default_factory=dict)
    antagonism_coefficients: Mapping[tuple[str, str], float] = field(default_factory=dict)

    def validate(self) -> None:
        total = sum(self.weights.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("every weight must be > 0")
        if any(c <= 0 for c in self.antagonism_coefficients.values()):
            raise ValueError("antagonism coefficients must be > 0")
        for t, balance in self.net_balances().items():
            if balance <= 0:
                raise ValueError(f"net balance of {t!r} is not positive")

    def net_balances(self) -> dict[str, float]:
        """w_t plus its weakening terms minus antagonisms where t benefits."""
        balance = dict(self.weights)
        for (t1, t2), coef in self.pair_coefficients.items():
            if coef < 0:
                balance[t1] += coef
                balance[t2] += coef
        for (beneficiary, _antagonist), coef in self.antagonism_coefficients.items():
            balance[beneficiary] -= coef
        return balance


@dataclass(frozen=True)
class CredibilityMatrix:
    node: str
    alternatives: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def value(self, a: str, b: str) -> float:
        return self.values[self.alternatives.index(a)][self.alternatives.index(b)]


def advantage(problem: Problem, criterion: str, a: str, b: str) -> Fraction:
    """b's advantage over a on one leaf, oriented by the preference direction.

    Positive means b performs better than a on this criterion.
    """
    node = problem.tree.node(criterion)
    ga = problem.performance.value(a, criterion)
    gb = problem.performance.value(b, criterion)
    if node.direction is Direction.COST:
        return ga - gb
    return gb - ga


def _band(problem: Problem, criterion: str, reference_alt: str) -> ThresholdBand:
    reference = problem.performance.value(reference_alt, criterion)
    return effective_band(problem.thresholds, problem.tree, criterion, reference)


def partial_concordance(problem: Problem, criterion: str, a: str, b: str) -> Fraction:
    """Support of one leaf for "a outranks b": 1 inside the indifference zone,
    0 once b is strictly preferred, linear in between.  Thresholds come from
    the band at a's own performance."""
    band = _band(problem, criterion, a)
    adv = advantage(problem, criterion, a, b)
    if adv <= band.q:
        return Fraction(1)
    if adv >= band.p:
        return Fraction(0)
    return (band.p - adv) / (band.p - band.q)


def partial_discordance(problem: Problem, criterion: str, a: str, b: str) -> Fraction:
    """Opposition of one leaf to "a outranks b": 0 up to the preference
    threshold, 1 from the veto on, linear in between; 0 when no veto is set."""
    band = _band(problem, criterion, a)
    if band.veto is None:
        return Fraction(0)
    adv = advantage(problem, criterion, a, b)
    if adv <= band.p:
        return Fraction(0)
    if adv >= band.veto:
        return Fraction(1)
    return (adv - band.p) / (band.veto - band.p)


def _strictly_against(problem: Problem, criterion: str, a: str, b: str) -> bool:
    """True when b is strictly preferred to a on the leaf (reference a)."""
    band = _band(problem, criterion, a)
    return advantage(problem, criterion, a, b) >= band.p


def scoped_interactions(
    problem: Problem, node: str
) -> tuple[InteractionDeclaration, ...]:
    """Declarations whose two criteria both descend from ``node``.

    A cross-branch declaration only activates at ancestors containing both
    of its criteria.
    """
    leaves = elementary_descendants(problem.tree, node)
    return tuple(
        d for d in problem.interactions if d.first in leaves and d.second in leaves
    )


def interaction_z(
    problem: Problem, decl: InteractionDeclaration, a: str, b: str
) -> Fraction:
    """Signed activation of one declaration for the pair (a, b).

    Strengthening/weakening activate by the smaller of the two supports and
    only while neither criterion is strictly against the outranking.
    Antagonism activates by min(support of the beneficiary for a over b,
    support of the antagonist for b over a), and only while the beneficiary
    is not itself strictly against and the antagonist is.  The returned value
    carries the antagonism minus sign.
    """
    if decl.kind is InteractionKind.ANTAGONISM:
        beneficiary, antagonist = decl.first, decl.second
        if _strictly_against(problem, beneficiary, a, b):
            return Fraction(0)
        if not _strictly_against(problem, antagonist, a, b):
            return Fraction(0)
        z = min(
            partial_concordance(problem, beneficiary, a, b),
            partial_concordance(problem, antagonist, b, a),
        )
        return -z
    if _strictly_against(problem, decl.first, a, b) or _strictly_against(problem, decl.second, a, b):
        return Fraction(0)
    return min(
        partial_concordance(problem, decl.first, a, b),
        partial_concordance(problem, decl.second, a, b),
    )


def concordance(
    problem: Problem, node: str, a: str, b: str, params: ParameterVector
) -> float:
    """Node-level concordance of a over b, interaction terms included.

    Numerator: weighted partial concordances plus the signed interaction
    activations times their coefficients.  Denominator: the full leaf weight
    mass under the node plus the same interaction terms.  Clamped to [0, 1].
    """
    leaves = sorted(elementary_descendants(problem.tree, node))
    if a == b:
        return 1.0
    num = 0.0
    den = 0.0
    for t in leaves:
        w = float(params.weights[t])
        num += w * float(partial_concordance(problem, t, a, b))
        den += w
    for decl in scoped_interactions(problem, node):
        coef = (
            params.antagonism_coefficients.get((decl.first, decl.second), 0.0)
            if decl.kind is InteractionKind.ANTAGONISM
            else params.pair_coefficients.get(decl.key, 0.0)  # type: ignore[arg-type]
        )
        if not coef:
            continue
        # pair coefficients carry their own sign (weakening < 0); the
        # antagonism minus sign lives in the activation.
        term = coef * float(interaction_z(problem, decl, a, b))
        num += term
        den += term
    if den <= 0:
        raise ArithmeticError(f"non-positive concordance denominator at node {node!r}")
    return min(1.0, max(0.0, num / den))


def credibility(
    problem: Problem, node: str, a: str, b: str, params: ParameterVector
) -> float:
    """Concordance discounted by every leaf opposing more strongly than the
    concordance itself supports; a fully opposed leaf zeroes the index."""
    c = concordance(problem, node, a, b, params)
    if a == b:
        return 1.0
    sigma = c
    for t in sorted(elementary_descendants(problem.tree, node)):
        d = float(partial_discordance(problem, t, a, b))
        if d > c:
            sigma *= (1.0 - d) / (1.0 - c)
    return sigma


def credibility_matrix(
    problem: Problem, node: str, params: ParameterVector
) -> CredibilityMatrix:
    alts = problem.alternatives
    rows = []
    for a in alts:
        row = []
        for b in alts:
            row.append(1.0 if a == b else credibility(problem, node, a, b, params))
        rows.append(tuple(row))
    return CredibilityMatrix(node=node, alternatives=alts, values=tuple(rows))
