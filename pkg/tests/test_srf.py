from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outrank.srf import (
    CardDeck,
    DeckChoice,
    deck_weights,
    elementary_weights,
    iter_choices,
    local_weight_space,
    srf2_weights,
    srf_weights_from_z,
    z_of_e0,
)


def test_srf2_worked_examples():
    assert srf2_weights(4, 2, (0, 0, 0)) == (3, 4, 5, 6)
    assert srf2_weights(4, 5, (0, 0, 0)) == (6, 7, 8, 9)
    assert srf2_weights(1, 4, ()) == (5,)


def test_srf_z_worked_examples():
    assert srf_weights_from_z(4, (0, 0, 0), 4) == (1, 2, 3, 4)
    w = srf_weights_from_z(4, (0, 0, 0), 2)
    assert w == (1, Fraction(4, 3), Fraction(5, 3), 2)
    # proportional to (3, 4, 5, 6)
    assert tuple(x / w[0] for x in w) == tuple(Fraction(k, 3) for k in (3, 4, 5, 6))
    assert srf_weights_from_z(2, (0,), 3) == (1, 3)


def test_z_of_e0_worked_examples():
    assert z_of_e0(2, (0, 0, 0)) == 2
    assert z_of_e0(5, (0, 0, 0)) == Fraction(3, 2)
    assert z_of_e0(0, (0,)) == 2


def test_error_cases():
    with pytest.raises(ValueError):
        srf_weights_from_z(4, (0, 0, 0), 1)
    with pytest.raises(ValueError):
        srf_weights_from_z(4, (0, -1, 0), 2)
    with pytest.raises(ValueError):
        srf2_weights(3, -1, (0, 0))
    with pytest.raises(ValueError):
        z_of_e0(-1, (0,))


@given(
    levels=st.integers(min_value=2, max_value=6),
    e0=st.integers(min_value=0, max_value=9),
    data=st.data(),
)
@settings(max_examples=200, deadline=None)
def test_z_and_e0_anchors_agree(levels, e0, data):
    gaps = tuple(
        data.draw(st.integers(min_value=0, max_value=5)) for _ in range(levels - 1)
    )
    z = z_of_e0(e0, gaps)
    via_e0 = srf2_weights(levels, e0, gaps)
    via_z = srf_weights_from_z(levels, gaps, z)
    total_e0 = sum(via_e0)
    total_z = sum(via_z)
    assert [w / total_e0 for w in via_e0] == [w / total_z for w in via_z]
    # the top/bottom ratio of the e0 deck is exactly z
    assert via_e0[-1] / via_e0[0] == z


@given(
    levels=st.integers(min_value=1, max_value=6),
    e0=st.integers(min_value=0, max_value=9),
    data=st.data(),
)
@settings(max_examples=150, deadline=None)
def test_srf2_monotone_structure(levels, e0, data):
    gaps = tuple(
        data.draw(st.integers(min_value=0, max_value=5)) for _ in range(levels - 1)
    )
    weights = srf2_weights(levels, e0, gaps)
    for lower, upper, gap in zip(weights, weights[1:], gaps):
        assert upper - lower == gap + 1
        assert upper - lower >= 1


def test_blank_cards_increase_level_ratio():
    narrow = srf2_weights(2, 1, (0,))
    wide = srf2_weights(2, 1, (3,))
    assert wide[1] / wide[0] > narrow[1] / narrow[0]


def test_local_weight_space_reuse_deck(bundled):
    deck = bundled.decks["GR"]
    space = {tuple(sorted(w.items())) for _, w in local_weight_space(deck)}
    assert space == {
        (("gR1", Fraction(2, 5)), ("gR2", Fraction(3, 5))),
        (("gR1", Fraction(1, 3)), ("gR2", Fraction(2, 3))),
    }


def test_exact_deck_is_singleton():
    deck = CardDeck(node="n", levels=(("a",), ("b",)), gaps=((1, 1),), zero_gap=(2, 2))
    assert len(local_weight_space(deck)) == 1


def test_single_child_node_normalizes_to_one(bundled):
    deck = bundled.decks["GS"]
    space = local_weight_space(deck)
    assert len(space) == 1
    assert space[0][1] == {"gS1": Fraction(1)}


def _lower_bound_choices(problem):
    choices = {}
    for node_id in problem.tree.non_elementary_ids:
        deck = problem.decks[node_id]
        gaps = tuple(lo for lo, _ in deck.gaps)
        e0 = deck.zero_gap[0] if deck.zero_gap else None
        choices[node_id] = DeckChoice(e0=e0, gaps=gaps)
    return choices


def test_elementary_weights_lower_bounds(bundled):
    weights = elementary_weights(bundled.tree, bundled.decks, _lower_bound_choices(bundled))
    assert sum(weights.values()) == 1
    assert weights["gS1"] == Fraction(8, 26)


def test_elementary_weight_range_contains_reported_value(bundled):
    # every deck combination keeps the social leaf inside its analytic range
    import itertools

    spaces = {
        nid: list(iter_choices(bundled.decks[nid]))
        for nid in bundled.tree.non_elementary_ids
    }
    node_ids = list(spaces)
    values = []
    for combo in itertools.product(*(spaces[nid] for nid in node_ids)):
        weights = elementary_weights(bundled.tree, bundled.decks, dict(zip(node_ids, combo)))
        assert sum(weights.values()) == 1
        values.append(weights["gS1"])
    assert min(values) >= Fraction(8, 29)
    assert max(values) <= Fraction(9, 26)


def test_flat_hierarchy_local_weights_are_global():
    from outrank.model import CriterionNode, CriterionTree, Direction, Scale

    nodes = {
        "r": CriterionNode(id="r", children=("t1", "t2")),
        "t1": CriterionNode(id="t1", parent="r", direction=Direction.GAIN, scale=Scale.CARDINAL),
        "t2": CriterionNode(id="t2", parent="r", direction=Direction.GAIN, scale=Scale.CARDINAL),
    }
    tree = CriterionTree(nodes=nodes, root="r")
    deck = CardDeck(node="r", levels=(("t1",), ("t2",)), gaps=((0, 0),), zero_gap=(1, 1))
    choice = next(iter_choices(deck))
    local = deck_weights(deck, choice)
    global_w = elementary_weights(tree, {"r": deck}, {"r": choice})
    assert local == global_w


def test_deck_validation_rejects_misplaced_child(bundled):
    deck = CardDeck(node="GR", levels=(("gR1",), ("gS1",)), gaps=((0, 0),), zero_gap=(1, 1))
    errors = deck.validate(bundled.tree.node("GR").children)
    assert any("exactly once" in e for e in errors)
