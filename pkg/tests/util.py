"""Random-instance generator shared by property and acceptance suites."""

from __future__ import annotations

import random
from fractions import Fraction

from outrank.model import (
    CriterionNode,
    CriterionTree,
    Direction,
    InteractionDeclaration,
    InteractionKind,
    PerformanceTable,
    Scale,
    ThresholdBand,
    ThresholdSpec,
    validate_problem,
)
from outrank.srf import CardDeck

ALT_NAMES = "abcdefgh"


def _random_deck(rng: random.Random, node: str, children: list[str]) -> CardDeck:
    order = list(children)
    rng.shuffle(order)
    levels: list[list[str]] = []
    for child in order:
        if levels and rng.random() < 0.3:
            levels[-1].append(child)
        else:
            levels.append([child])
    gaps = []
    for _ in range(len(levels) - 1):
        lo = rng.randint(0, 3)
        gaps.append((lo, lo + rng.randint(0, 2)))
    lo0 = rng.randint(0, 4)
    zero_gap = (lo0, lo0 + rng.randint(0, 2)) if len(levels) > 1 else (0, 0)
    return CardDeck(
        node=node,
        levels=tuple(tuple(lv) for lv in levels),
        gaps=tuple(gaps),
        zero_gap=zero_gap,
    )


def random_problem(
    rng: random.Random,
    n_alts: int = 4,
    with_dominated_pair: bool = False,
    with_interactions: bool = True,
):
    """A small random hierarchy with performances, thresholds, and decks.

    With ``with_dominated_pair`` the second alternative weakly dominates the
    first on every leaf (strictly somewhere); returns (problem, (dominator,
    dominated)) in that case, else (problem, None).
    """
    alts = list(ALT_NAMES[:n_alts])
    n_m1 = rng.randint(1, 2)
    n_m2 = rng.randint(1, 2)
    leaves = {"m1": [f"x{i}" for i in range(n_m1)], "m2": [f"y{i}" for i in range(n_m2)]}

    nodes = {
        "root": CriterionNode(id="root", children=("m1", "m2")),
        "m1": CriterionNode(id="m1", parent="root", children=tuple(leaves["m1"])),
        "m2": CriterionNode(id="m2", parent="root", children=tuple(leaves["m2"])),
    }
    all_leaves = leaves["m1"] + leaves["m2"]
    for leaf in all_leaves:
        nodes[leaf] = CriterionNode(
            id=leaf,
            parent="m1" if leaf.startswith("x") else "m2",
            direction=rng.choice([Direction.GAIN, Direction.COST]),
            scale=Scale.CARDINAL,
        )
    tree = CriterionTree(nodes=nodes, root="root")

    values: dict[tuple[str, str], Fraction] = {}
    for alt in alts:
        for leaf in all_leaves:
            values[(alt, leaf)] = Fraction(rng.randint(0, 60))
    dominated = None
    if with_dominated_pair and n_alts >= 2:
        dominator, loser = alts[0], alts[1]
        strict_somewhere = False
        for leaf in all_leaves:
            delta = Fraction(rng.randint(0, 6))
            strict_somewhere = strict_somewhere or delta > 0
            base = values[(dominator, leaf)]
            if nodes[leaf].direction is Direction.GAIN:
                values[(loser, leaf)] = base - delta
            else:
                values[(loser, leaf)] = base + delta
        if not strict_somewhere:
            leaf = all_leaves[0]
            if nodes[leaf].direction is Direction.GAIN:
                values[(loser, leaf)] -= 1
            else:
                values[(loser, leaf)] += 1
        dominated = (dominator, loser)

    perf = PerformanceTable(alternatives=tuple(alts), values=values)

    bands = {}
    for leaf in all_leaves:
        q = Fraction(rng.randint(0, 3))
        p = q + rng.randint(1, 5)
        veto = p + rng.randint(5, 40) if rng.random() < 0.6 else None
        bands[leaf] = (ThresholdBand(q=q, p=p, veto=veto),)
    thresholds = ThresholdSpec(bands=bands)

    interactions = []
    if with_interactions and len(all_leaves) >= 2 and rng.random() < 0.7:
        t1, t2 = rng.sample(all_leaves, 2)
        kind = rng.choice(list(InteractionKind))
        interactions.append(InteractionDeclaration(kind=kind, first=t1, second=t2))

    decks = {
        nid: _random_deck(rng, nid, list(tree.node(nid).children))
        for nid in tree.non_elementary_ids
    }
    problem = validate_problem(tree, perf, thresholds, interactions, decks)
    return problem, dominated
