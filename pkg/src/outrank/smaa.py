"""Monte Carlo robustness analysis over compatible parameter vectors.

Each sample resolves the deck intervals, composes global leaf weights, and
draws interaction coefficients under positivity caps, rejecting draws that
break the net-balance condition.  The outranking pipeline then runs per
non-elementary node, and the per-node partial preorders, pairwise relation
frequencies, outranking counts and parameter barycenters are aggregated.

Weight and coefficient sums are accumulated as exact rationals so the report
is bit-identical regardless of chunking or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .electre import ParameterVector, interaction_z, partial_concordance, partial_discordance
from .model import InteractionKind, Problem, elementary_descendants
from .ranking import PartialPreorder, Relation, distill_indexed, intersect, CompletePreorder
from .srf import CardDeck, DeckChoice, elementary_weights

__all__ = [
    "CoefficientCaps",
    "SamplingConfig",
    "IncompatibleElicitation",
    "sample_parameters",
    "run_smaa",
    "canonical_key",
    "barycenter",
    "SmaaReport",
    "NodeReport",
    "CensusEntry",
]

_REJECTION_BUDGET = 1000


class IncompatibleElicitation(RuntimeError):
    """No compatible parameter vector found within the rejection budget."""


@dataclass(frozen=True)
class CoefficientCaps:
    """Scale factors on the interaction coefficient ranges.

    1.0 means the full positivity-preserving range: strengthening up to the
    sum of the two weights, weakening down to minus the smaller weight,
    antagonism up to the beneficiary's weight.  The default weakening cap is
    0.6: it admits every coefficient value observed in practice while keeping
    extreme draws from destabilising rankings that are otherwise invariant
    across the compatible set.
    """

    strengthening: float = 1.0
    weakening: float = 0.6
    antagonism: float = 1.0


@dataclass(frozen=True)
class SamplingConfig:
    sample_count: int = 10_000
    master_seed: int = 0
    caps: CoefficientCaps = field(default_factory=CoefficientCaps)
    workers: int = 1

    def __post_init__(self) -> None:
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")


@dataclass(frozen=True)
class CensusEntry:
    preorder: PartialPreorder
    count: int
    barycenter: ParameterVector


@dataclass(frozen=True)
class NodeReport:
    node: str
    census: tuple[CensusEntry, ...]
    preference_counts: tuple[tuple[int, ...], ...]
    indifference_counts: tuple[tuple[int, ...], ...]
    incomparability_counts: tuple[tuple[int, ...], ...]
    outranked_sums: tuple[int, ...]
    outranking_sums: tuple[int, ...]


@dataclass(frozen=True)
class SmaaReport:
    alternatives: tuple[str, ...]
    elementary_ids: tuple[str, ...]
    sample_count: int
    master_seed: int
    caps: CoefficientCaps
    nodes: Mapping[str, NodeReport]

    def mean_weights(self) -> dict[str, float]:
        """Pooled mean of the sampled leaf weights over all samples."""
        node = next(iter(self.nodes.values()))
        sums = [Fraction(0)] * len(self.elementary_ids)
        for entry in node.census:
            for i, t in enumerate(self.elementary_ids):
                sums[i] += Fraction(entry.barycenter.weights[t]) * entry.count
        return {
            t: float(sums[i] / self.sample_count)
            for i, t in enumerate(self.elementary_ids)
        }


def canonical_key(preorder: PartialPreorder) -> tuple[str, ...]:
    """Opaque census key: equal iff every pairwise relation is identical."""
    return tuple(rel.value for _, rel in sorted(preorder.relations.items()))


def barycenter(vectors: Sequence[ParameterVector]) -> ParameterVector:
    """Componentwise mean of parameter vectors with consistent key sets."""
    if not vectors:
        raise ValueError("barycenter of an empty list")
    n = len(vectors)
    first = vectors[0]
    weights = {
        t: math.fsum(v.weights[t] for v in vectors) / n for t in first.weights
    }
    pairs = {
        k: math.fsum(v.pair_coefficients[k] for v in vectors) / n
        for k in first.pair_coefficients
    }
    antag = {
        k: math.fsum(v.antagonism_coefficients[k] for v in vectors) / n
        for k in first.antagonism_coefficients
    }
    return ParameterVector(weights=weights, pair_coefficients=pairs, antagonism_coefficients=antag)


# ---------------------------------------------------------------------------
# sampling


def _rng_for(master_seed: int, sample_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=master_seed & 0xFFFF_FFFF_FFFF_FFFF,
                                 spawn_key=(sample_index,))
    return np.random.Generator(np.random.PCG64(seq))


def _ordered_decks(problem: Problem) -> list[tuple[str, CardDeck]]:
    return [(nid, problem.decks[nid]) for nid in sorted(problem.decks)]


def _draw_choices(decks: Iterable[tuple[str, CardDeck]], rng: np.random.Generator) -> dict[str, DeckChoice]:
    choices: dict[str, DeckChoice] = {}
    for node_id, deck in decks:
        gaps = tuple(int(rng.integers(lo, hi + 1)) for lo, hi in deck.gaps)
        if len(deck.levels) == 1:
            choices[node_id] = DeckChoice(e0=None, gaps=gaps)
        elif deck.z_range is not None:
            lo_z, hi_z = deck.z_range
            z = Fraction(repr(float(rng.uniform(float(lo_z), float(hi_z)))))
            choices[node_id] = DeckChoice(e0=None, gaps=gaps, z=z)
        else:
            assert deck.zero_gap is not None
            lo, hi = deck.zero_gap
            choices[node_id] = DeckChoice(e0=int(rng.integers(lo, hi + 1)), gaps=gaps)
    return choices


def _draw_coefficients(
    problem: Problem,
    weights: Mapping[str, Fraction],
    caps: CoefficientCaps,
    rng: np.random.Generator,
) -> tuple[dict[tuple[str, str], float], dict[tuple[str, str], float]]:
    """Draw interaction coefficients under caps; reject until net balance holds."""
    wf = {t: float(w) for t, w in weights.items()}
    for _ in range(_REJECTION_BUDGET):
        pair: dict[tuple[str, str], float] = {}
        antag: dict[tuple[str, str], float] = {}
        for decl in problem.interactions:
            w1 = wf[decl.first]
            w2 = wf[decl.second]
            if decl.kind is InteractionKind.STRENGTHENING:
                pair[decl.key] = rng.uniform(0.0, caps.strengthening * (w1 + w2))
            elif decl.kind is InteractionKind.WEAKENING:
                pair[decl.key] = -rng.uniform(0.0, caps.weakening * min(w1, w2))
            else:
                antag[(decl.first, decl.second)] = rng.uniform(0.0, caps.antagonism * w1)
        balance = dict(wf)
        for (t1, t2), coef in pair.items():
            if coef < 0:
                balance[t1] += coef
                balance[t2] += coef
        for (beneficiary, _), coef in antag.items():
            balance[beneficiary] -= coef
        if all(v > 0 for v in balance.values()):
            return pair, antag
    raise IncompatibleElicitation(
        "no compatible interaction coefficients found within the retry budget"
    )


def _draw_sample(
    problem: Problem, sample_index: int, master_seed: int, caps: CoefficientCaps
) -> tuple[dict[str, Fraction], dict[tuple[str, str], float], dict[tuple[str, str], float]]:
    rng = _rng_for(master_seed, sample_index)
    choices = _draw_choices(_ordered_decks(problem), rng)
    weights = elementary_weights(problem.tree, problem.decks, choices)  # type: ignore[arg-type]
    pair, antag = _draw_coefficients(problem, weights, caps, rng)
    return weights, pair, antag


def sample_parameters(
    problem: Problem,
    sample_index: int,
    master_seed: int,
    caps: CoefficientCaps = CoefficientCaps(),
) -> ParameterVector:
    """One compatible parameter vector; deterministic in (index, seed)."""
    weights, pair, antag = _draw_sample(problem, sample_index, master_seed, caps)
    vector = ParameterVector(
        weights={t: float(w) for t, w in weights.items()},
        pair_coefficients=pair,
        antagonism_coefficients=antag,
    )
    vector.validate()
    return vector


# ---------------------------------------------------------------------------
# per-node precomputation


@dataclass
class _NodeStructure:
    node: str
    leaf_indices: list[int]            # into the global elementary order
    pairs: list[tuple[int, int]]       # ordered (i, j), i != j
    phi: np.ndarray                    # (npairs, nt) partial concordances
    disc: np.ndarray                   # (npairs, nt) partial discordances
    z_signed: np.ndarray               # (npairs, K) signed interaction activations
    veto_terms: list[tuple[int, int, float]]  # (pair_row, leaf_col, d) with d > 0


def _node_structures(problem: Problem) -> list[_NodeStructure]:
    elem = list(problem.tree.elementary_ids)
    alts = problem.alternatives
    n = len(alts)
    decls = problem.interactions
    structures = []
    for node in problem.tree.non_elementary_ids:
        leaves = sorted(elementary_descendants(problem.tree, node), key=elem.index)
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        phi = np.zeros((len(pairs), len(leaves)))
        disc = np.zeros_like(phi)
        z_signed = np.zeros((len(pairs), len(decls)))
        veto_terms: list[tuple[int, int, float]] = []
        leaf_set = elementary_descendants(problem.tree, node)
        for row, (i, j) in enumerate(pairs):
            a, b = alts[i], alts[j]
            for col, t in enumerate(leaves):
                phi[row, col] = float(partial_concordance(problem, t, a, b))
                d = float(partial_discordance(problem, t, a, b))
                disc[row, col] = d
                if d > 0.0:
                    veto_terms.append((row, col, d))
            for k, decl in enumerate(decls):
                if decl.first in leaf_set and decl.second in leaf_set:
                    z_signed[row, k] = float(interaction_z(problem, decl, a, b))
        structures.append(
            _NodeStructure(
                node=node,
                leaf_indices=[elem.index(t) for t in leaves],
                pairs=pairs,
                phi=phi,
                disc=disc,
                z_signed=z_signed,
                veto_terms=veto_terms,
            )
        )
    return structures


def _sigma_matrix(
    structure: _NodeStructure, w_full: np.ndarray, coefs: np.ndarray, n: int
) -> list[list[float]]:
    w = w_full[structure.leaf_indices]
    inter = structure.z_signed @ coefs if coefs.size else np.zeros(len(structure.pairs))
    num = structure.phi @ w + inter
    den = w.sum() + inter
    if np.any(den <= 0):
        raise ArithmeticError(f"non-positive concordance denominator at node {structure.node!r}")
    conc = np.clip(num / den, 0.0, 1.0)
    sigma_pairs = conc.copy()
    for row, col, d in structure.veto_terms:
        c = conc[row]
        if d > c:
            sigma_pairs[row] *= (1.0 - d) / (1.0 - c)
    sigma = [[1.0] * n for _ in range(n)]
    for row, (i, j) in enumerate(structure.pairs):
        sigma[i][j] = float(sigma_pairs[row])
    return sigma


# ---------------------------------------------------------------------------
# aggregation


class _NodeAggregate:
    """Associative-commutative per-node accumulator with exact sums."""

    def __init__(self, n_alts: int, n_elem: int, n_decl: int):
        self.census: dict[tuple[str, ...], list] = {}
        self.pref = [[0] * n_alts for _ in range(n_alts)]
        self.ind = [[0] * n_alts for _ in range(n_alts)]
        self.inc = [[0] * n_alts for _ in range(n_alts)]
        self.outranked = [0] * n_alts
        self.outranking = [0] * n_alts
        self.n_elem = n_elem
        self.n_decl = n_decl

    def add(
        self,
        key: tuple[str, ...],
        preorder: PartialPreorder,
        alt_index: Mapping[str, int],
        weights: Sequence[Fraction],
        coefs: Sequence[Fraction],
    ) -> None:
        slot = self.census.get(key)
        if slot is None:
            slot = [0, [Fraction(0)] * self.n_elem, [Fraction(0)] * self.n_decl, preorder]
            self.census[key] = slot
        slot[0] += 1
        slot[1] = [acc + w for acc, w in zip(slot[1], weights)]
        slot[2] = [acc + c for acc, c in zip(slot[2], coefs)]
        for (a, b), rel in preorder.relations.items():
            i, j = alt_index[a], alt_index[b]
            if rel is Relation.PREFERRED:
                self.pref[i][j] += 1
            elif rel is Relation.PREFERRED_BY:
                self.pref[j][i] += 1
            elif rel is Relation.INDIFFERENT:
                self.ind[i][j] += 1
                self.ind[j][i] += 1
            else:
                self.inc[i][j] += 1
                self.inc[j][i] += 1
        for a, (outranked, outranking) in _fast_relation_counts(preorder).items():
            self.outranked[alt_index[a]] += outranked
            self.outranking[alt_index[a]] += outranking

    def merge(self, other: "_NodeAggregate") -> None:
        for key, slot in other.census.items():
            mine = self.census.get(key)
            if mine is None:
                self.census[key] = slot
            else:
                mine[0] += slot[0]
                mine[1] = [a + b for a, b in zip(mine[1], slot[1])]
                mine[2] = [a + b for a, b in zip(mine[2], slot[2])]
        for mat, omat in ((self.pref, other.pref), (self.ind, other.ind), (self.inc, other.inc)):
            for i, row in enumerate(omat):
                for j, v in enumerate(row):
                    mat[i][j] += v
        self.outranked = [a + b for a, b in zip(self.outranked, other.outranked)]
        self.outranking = [a + b for a, b in zip(self.outranking, other.outranking)]


def _fast_relation_counts(preorder: PartialPreorder) -> dict[str, tuple[int, int]]:
    counts = {a: [0, 0] for a in preorder.alternatives}
    for (a, b), rel in preorder.relations.items():
        if rel is Relation.INDIFFERENT:
            counts[a][0] += 1
            counts[a][1] += 1
            counts[b][0] += 1
            counts[b][1] += 1
        elif rel is Relation.PREFERRED:
            counts[a][0] += 1
            counts[b][1] += 1
        elif rel is Relation.PREFERRED_BY:
            counts[b][0] += 1
            counts[a][1] += 1
    return {a: (c[0], c[1]) for a, c in counts.items()}


def _run_chunk(
    problem: Problem, config: SamplingConfig, start: int, stop: int
) -> dict[str, _NodeAggregate]:
    structures = _node_structures(problem)
    alts = problem.alternatives
    alt_index = {a: i for i, a in enumerate(alts)}
    elem = problem.tree.elementary_ids
    n = len(alts)
    n_decl = len(problem.interactions)
    aggs = {s.node: _NodeAggregate(n, len(elem), n_decl) for s in structures}
    distill_cache: dict[tuple[str, bytes], tuple] = {}

    for idx in range(start, stop):
        weights_fr, pair, antag = _draw_sample(problem, idx, config.master_seed, config.caps)
        w_full = np.array([float(weights_fr[t]) for t in elem])
        coef_list: list[float] = []
        for decl in problem.interactions:
            if decl.kind is InteractionKind.ANTAGONISM:
                coef_list.append(antag[(decl.first, decl.second)])
            else:
                coef_list.append(pair[decl.key])  # type: ignore[index]
        coefs = np.array(coef_list) if coef_list else np.zeros(0)
        coefs_fr = [Fraction(c) for c in coef_list]
        weights_list = [weights_fr[t] for t in elem]

        for structure in structures:
            sigma = _sigma_matrix(structure, w_full, coefs, n)
            cache_key = (structure.node, np.asarray(sigma).tobytes())
            hit = distill_cache.get(cache_key)
            if hit is None:
                desc = distill_indexed(sigma, n, "descending")
                asc = distill_indexed(sigma, n, "ascending")
                preorder = intersect(
                    CompletePreorder(tuple(frozenset(alts[i] for i in c) for c in desc)),
                    CompletePreorder(tuple(frozenset(alts[i] for i in c) for c in asc)),
                )
                key = canonical_key(preorder)
                if len(distill_cache) < 50_000:
                    distill_cache[cache_key] = (preorder, key)
            else:
                preorder, key = hit
            aggs[structure.node].add(key, preorder, alt_index, weights_list, coefs_fr)
    return aggs


def _finalize(
    problem: Problem, config: SamplingConfig, aggs: Mapping[str, _NodeAggregate]
) -> SmaaReport:
    elem = problem.tree.elementary_ids
    nodes: dict[str, NodeReport] = {}
    for node_id in problem.tree.non_elementary_ids:
        agg = aggs[node_id]
        entries = []
        for key, (count, wsum, csum, preorder) in sorted(
            agg.census.items(), key=lambda kv: (-kv[1][0], kv[0])
        ):
            weights = {t: float(wsum[i] / count) for i, t in enumerate(elem)}
            pair_coefs: dict[tuple[str, str], float] = {}
            antag_coefs: dict[tuple[str, str], float] = {}
            for k, decl in enumerate(problem.interactions):
                mean = float(csum[k] / count)
                if decl.kind is InteractionKind.ANTAGONISM:
                    antag_coefs[(decl.first, decl.second)] = mean
                else:
                    pair_coefs[decl.key] = mean  # type: ignore[index]
            entries.append(
                CensusEntry(
                    preorder=preorder,
                    count=count,
                    barycenter=ParameterVector(
                        weights=weights,
                        pair_coefficients=pair_coefs,
                        antagonism_coefficients=antag_coefs,
                    ),
                )
            )
        nodes[node_id] = NodeReport(
            node=node_id,
            census=tuple(entries),
            preference_counts=tuple(tuple(r) for r in agg.pref),
            indifference_counts=tuple(tuple(r) for r in agg.ind),
            incomparability_counts=tuple(tuple(r) for r in agg.inc),
            outranked_sums=tuple(agg.outranked),
            outranking_sums=tuple(agg.outranking),
        )
    return SmaaReport(
        alternatives=problem.alternatives,
        elementary_ids=elem,
        sample_count=config.sample_count,
        master_seed=config.master_seed,
        caps=config.caps,
        nodes=nodes,
    )


def run_smaa(problem: Problem, config: SamplingConfig) -> SmaaReport:
    """Full robustness run; a pure function of (problem, config).

    Samples are independent units; with ``workers > 1`` chunks execute in
    separate processes and merge into the same exact aggregates, so the
    report does not depend on the degree of parallelism.
    """
    if not problem.decks:
        raise ValueError("problem carries no card decks; nothing to sample")
    n = config.sample_count
    workers = max(1, config.workers)
    if workers == 1 or n < 2 * workers:
        aggs = _run_chunk(problem, config, 0, n)
    else:
        chunk = -(-n // workers)
        spans = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk_star, [(problem, config, a, b) for a, b in spans]))
        aggs = parts[0]
        for part in parts[1:]:
            for node_id, agg in part.items():
                aggs[node_id].merge(agg)
    return _finalize(problem, config, aggs)


def _run_chunk_star(args: tuple) -> dict[str, _NodeAggregate]:
    return _run_chunk(*args)
