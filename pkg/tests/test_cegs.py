import pytest

from respgames.cegs import (
    Cegs,
    cegs_from_dict,
    cegs_to_dict,
    expected_unroll_count,
    per_state_gadget,
    unroll,
    validate_cegs,
)
from respgames.coalition import Coalition
from respgames.errors import CapExceededError, InputError
from respgames.games import check_perfect_recall, validate_game
from respgames.responsibility import property_forward
from respgames.corpus import matching_pennies


def self_loop() -> Cegs:
    return Cegs(
        players=1,
        states=("s",),
        actions=("a",),
        indist={},
        avail={"s": {1: ("a",)}},
        trans={("s", ("a",)): "s"},
    )


def pennies_cegs() -> Cegs:
    trans = {}
    for a1 in "ht":
        for a2 in "ht":
            trans[("s", (a1, a2))] = "match" if a1 == a2 else "clash"
    for st in ("match", "clash"):
        for a1 in "ht":
            for a2 in "ht":
                trans[(st, (a1, a2))] = st
    avail = {st: {1: ("h", "t"), 2: ("h", "t")} for st in ("s", "match", "clash")}
    return Cegs(
        players=2,
        states=("s", "match", "clash"),
        actions=("h", "t"),
        indist={},
        avail=avail,
        trans=trans,
    )


def two_state_model() -> Cegs:
    trans = {}
    for st, flip in (("x", "y"), ("y", "x")):
        trans[(st, ("go", "go"))] = flip
        trans[(st, ("go", "wait"))] = st
        trans[(st, ("wait", "go"))] = st
        trans[(st, ("wait", "wait"))] = flip
    avail = {st: {1: ("go", "wait"), 2: ("go", "wait")} for st in ("x", "y")}
    return Cegs(
        players=2,
        states=("x", "y"),
        actions=("go", "wait"),
        indist={1: (("x", "y"),)},  # player 1 cannot tell the states apart
        avail=avail,
        trans=trans,
    )


class TestValidate:
    def test_self_loop_ok(self):
        assert validate_cegs(self_loop()) == []

    def test_availability_must_match_in_classes(self):
        m = Cegs(
            players=1,
            states=("x", "y"),
            actions=("a", "b"),
            indist={1: (("x", "y"),)},
            avail={"x": {1: ("a",)}, "y": {1: ("a", "b")}},
            trans={("x", ("a",)): "x", ("y", ("a",)): "y", ("y", ("b",)): "x"},
        )
        assert any(v.code == "indist" for v in validate_cegs(m))

    def test_generic_two_player_shape_ok(self):
        assert validate_cegs(pennies_cegs()) == []
        assert validate_cegs(two_state_model()) == []

    def test_missing_transition(self):
        m = Cegs(
            players=1, states=("s",), actions=("a", "b"), indist={},
            avail={"s": {1: ("a", "b")}}, trans={("s", ("a",)): "s"},
        )
        assert any(v.code == "trans" for v in validate_cegs(m))


class TestGadget:
    def test_two_by_two_gadget(self):
        g = per_state_gadget(pennies_cegs(), "s")
        assert len(g.nodes) == 7
        assert validate_game(g).ok

    def test_singleton_actions_make_a_path(self):
        g = per_state_gadget(self_loop(), "s")
        assert len(g.nodes) == 2

    def test_varying_availability_respected(self):
        m = Cegs(
            players=2, states=("s",), actions=("a", "b", "c"), indist={},
            avail={"s": {1: ("a", "b", "c"), 2: ("a",)}},
            trans={("s", (x, "a")): "s" for x in ("a", "b", "c")},
        )
        g = per_state_gadget(m, "s")
        assert len(g.node(g.root).actions) == 3


class TestUnroll:
    def test_single_state_no_bad(self):
        g = unroll(self_loop(), "s", horizon=1)
        assert all(g.node(l).label is False for l in g.leaves)
        assert validate_game(g).ok

    def test_matching_pennies_shape(self):
        g = unroll(pennies_cegs(), "s", horizon=1, bad={"clash"})
        assert validate_game(g).ok
        reference = matching_pennies()
        assert len(g.nodes) == len(reference.nodes)
        # same shape: mismatching joint actions carry the event
        labels = {tuple(g.play_to_leaf(l).actions): g.node(l).label for l in g.leaves}
        assert labels == {
            ("h", "h"): False, ("h", "t"): True, ("t", "h"): True, ("t", "t"): False,
        }
        # player 2 cannot distinguish player 1's same-round pick
        p2_sets = [i for i in g.info_sets if i.owner == 2]
        assert len(p2_sets) == 1 and len(p2_sets[0].nodes) == 2

    def test_two_rounds_lose_recall(self):
        g = unroll(two_state_model(), "x", horizon=2, bad={"y"})
        assert validate_game(g).ok
        ok, _ = check_perfect_recall(g)
        assert not ok  # player 1 forgets its own first-round action

    def test_node_count_matches_recurrence(self):
        for model, start, h in [
            (self_loop(), "s", 3),
            (pennies_cegs(), "s", 2),
            (two_state_model(), "x", 3),
        ]:
            g = unroll(model, start, horizon=h, bad=set())
            assert len(g.nodes) == expected_unroll_count(model, start, h)

    def test_bad_initial_state_marks_everything(self):
        g = unroll(self_loop(), "s", horizon=2, bad={"s"})
        assert all(g.node(l).label for l in g.leaves)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            unroll(pennies_cegs(), "s", horizon=5, cap=100)

    def test_unknown_names(self):
        with pytest.raises(InputError):
            unroll(self_loop(), "zzz", horizon=1)
        with pytest.raises(InputError):
            unroll(self_loop(), "s", horizon=1, bad={"zzz"})

    def test_downstream_refinement_still_works(self):
        # Imperfect-recall unrollings still feed coalition analysis.
        g = unroll(two_state_model(), "x", horizon=2, bad={"y"})
        assert isinstance(property_forward(g, Coalition.of((1, 2))), bool)


class TestJson:
    def test_round_trip(self):
        m = two_state_model()
        again = cegs_from_dict(cegs_to_dict(m))
        assert again == m
