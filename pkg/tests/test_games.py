import random

import pytest

from respgames.corpus import (
    matching_pennies,
    refinement_counterexample,
    three_player_pennies,
)
from respgames.errors import InputError
from respgames.games import (
    CHANCE,
    GameTree,
    InfoSet,
    Node,
    StrategyProfile,
    chance_probability,
    check_perfect_recall,
    coalition_history,
    consistent_plays,
    enumerate_plays,
    history,
    make_game,
    plays_through,
    pure,
    validate_game,
)
from respgames.randgen import random_game, random_profile
from respgames.rational import rat


def entries(h):
    return list(h.entries)


class TestValidate:
    def test_matching_pennies_ok(self):
        assert validate_game(matching_pennies()).ok

    def test_single_event_leaf_ok(self):
        g = make_game(1, [Node("only", label=True)], "only", {})
        assert validate_game(g).ok

    def test_action_set_mismatch_reported(self):
        nodes = [
            Node("r", actions=(("l", "x"), ("r", "y"))),
            Node("x", actions=(("a", "x1"), ("b", "x2"))),
            Node("y", actions=(("a", "y1"), ("c", "y2"))),
            Node("x1", label=True),
            Node("x2", label=False),
            Node("y1", label=True),
            Node("y2", label=False),
        ]
        owners = {"r": 1, "x": 2, "y": 2}
        g = make_game(2, nodes, "r", owners, [
            InfoSet("IR", 1, ("r",)),
            InfoSet("IXY", 2, ("x", "y")),
        ])
        report = validate_game(g)
        assert not report.ok
        assert any(v.code == "infoset" and "action-set mismatch" in v.message
                   for v in report.violations)

    def test_zero_probability_chance_edge_rejected(self):
        nodes = [
            Node("r", actions=(("a", "u"), ("b", "v")),
                 probs={"a": rat(1), "b": rat(0)}),
            Node("u", label=True),
            Node("v", label=False),
        ]
        g = make_game(1, nodes, "r", {"r": CHANCE})
        report = validate_game(g)
        assert any(v.code == "chance" for v in report.violations)

    def test_bad_chance_sum_rejected(self):
        nodes = [
            Node("r", actions=(("a", "u"), ("b", "v")),
                 probs={"a": rat(1, 2), "b": rat(1, 3)}),
            Node("u", label=True),
            Node("v", label=False),
        ]
        g = make_game(1, nodes, "r", {"r": CHANCE})
        assert any(v.code == "chance" for v in validate_game(g).violations)

    def test_unlabeled_leaf_rejected(self):
        g = make_game(1, [Node("only")], "only", {})
        assert any(v.code in ("label", "partition") for v in validate_game(g).violations)


class TestHistory:
    def test_pennies_terminal_history(self):
        g = matching_pennies()
        h = history(g, "s4")
        assert entries(h) == [("I", "I0"), ("a", "h1"), ("I", "I12"), ("a", "t2")]

    def test_root_history(self):
        g = matching_pennies()
        assert entries(history(g, "s0")) == [("I", "I0")]

    def test_running_example_deep_history(self):
        g = three_player_pennies()
        h = history(g, "s12")
        assert entries(h) == [
            ("I", "I0"), ("a", "B"), ("I", "I2"), ("a", "h2'"), ("I", "I5"), ("a", "t3"),
        ]

    def test_unknown_node(self):
        with pytest.raises(InputError):
            history(matching_pennies(), "nope")


class TestCoalitionHistory:
    def test_pennies_player2_of_leaf(self):
        g = matching_pennies()
        h = coalition_history(g, "s4", (2,))
        assert entries(h) == [("I", "I12")]

    def test_empty_coalition(self):
        g = matching_pennies()
        assert entries(coalition_history(g, "s4", ())) == []

    def test_counterexample_pool_distinguishes(self):
        g = refinement_counterexample()
        h3 = coalition_history(g, "s3", (2, 3))
        h4 = coalition_history(g, "s4", (2, 3))
        assert h3 != h4
        assert entries(h3) == [("I", "I1"), ("a", "b"), ("I", "I34")]
        assert entries(h4) == [("I", "I2"), ("a", "c"), ("I", "I34")]

    def test_subsequence_and_chance_omission(self):
        g = three_player_pennies()
        full = history(g, "s5")
        ch = coalition_history(g, "s5", (1, 2, 3))
        assert ch.is_subsequence_of(full)
        # All players together drop exactly the chance entries.
        chance_isets = {i.id for i in g.info_sets if i.owner == CHANCE}
        expected = [
            (k, v) for k, v in full.entries
            if not (k == "I" and v in chance_isets)
            and not (k == "a" and v == "h2'")
        ]
        assert entries(ch) == expected == [("I", "I0"), ("a", "B"), ("I", "I5")]


class TestPerfectRecall:
    def test_corpus_games_have_recall(self):
        for g in (matching_pennies(), three_player_pennies(), refinement_counterexample()):
            ok, witnesses = check_perfect_recall(g)
            assert ok, witnesses

    def test_merged_grandchild_violates(self):
        nodes = [
            Node("a", actions=(("x", "b"), ("y", "z1"))),
            Node("b", actions=(("x", "c"), ("y", "z2"))),
            Node("c", actions=(("x", "z3"), ("y", "z4"))),
            Node("z1", label=True),
            Node("z2", label=False),
            Node("z3", label=True),
            Node("z4", label=False),
        ]
        owners = {"a": 1, "b": 1, "c": 1}
        g = make_game(1, nodes, "a", owners, [InfoSet("I", 1, ("a", "c")), InfoSet("J", 1, ("b",))])
        ok, witnesses = check_perfect_recall(g)
        assert not ok
        assert witnesses[0][0] == 1 and witnesses[0][1] == "I"

    def test_refinement_monotone_under_splitting(self):
        # Splitting an info set never introduces a violation.
        rng = random.Random(11)
        for _ in range(30):
            g = random_game(rng)
            ok, _ = check_perfect_recall(g)
            assert ok
            split = []
            for iset in g.info_sets:
                if len(iset.nodes) > 1 and iset.owner != CHANCE and rng.random() < 0.5:
                    split.append(InfoSet(iset.id + "/a", iset.owner, iset.nodes[:1]))
                    split.append(InfoSet(iset.id + "/b", iset.owner, iset.nodes[1:]))
                else:
                    split.append(iset)
            g2 = GameTree(g.players, g.nodes, g.root, g.owners, tuple(split))
            ok2, witnesses = check_perfect_recall(g2)
            assert ok2, witnesses


class TestPlays:
    def test_pennies_has_four_plays(self):
        assert len(enumerate_plays(matching_pennies())) == 4

    def test_plays_through_revealed_node(self):
        g = three_player_pennies()
        plays = plays_through(g, "s5")
        assert [p.leaf for p in plays] == ["s11", "s12"]

    def test_single_leaf_game(self):
        g = make_game(1, [Node("only", label=False)], "only", {})
        assert len(enumerate_plays(g)) == 1

    def test_plays_through_info_set(self):
        g = three_player_pennies()
        plays = plays_through(g, "I34")
        assert [p.leaf for p in plays] == ["s7", "s8", "s9", "s10"]

    def test_unknown_target(self):
        with pytest.raises(InputError):
            plays_through(matching_pennies(), "missing")


class TestConsistentPlays:
    def test_pure_heads_selects_single_play(self):
        g = matching_pennies()
        profile = StrategyProfile({1: pure(1, {"I0": "h1"}), 2: pure(2, {"I12": "h2"})})
        plays = consistent_plays(g, profile)
        assert [p.leaf for p in plays] == ["s3"]

    def test_running_example_profile_one(self):
        from respgames.corpus import _running_profiles

        g = three_player_pennies()
        sigma1, _ = _running_profiles()
        plays = consistent_plays(g, sigma1)
        assert [p.leaf for p in plays] == ["s12", "s14"]

    def test_full_support_gives_all_plays(self):
        rng = random.Random(3)
        for _ in range(20):
            g = random_game(rng)
            profile = random_profile(rng, g, pure_prob=0.0)
            full = {p.nodes for p in enumerate_plays(g)}
            got = {p.nodes for p in consistent_plays(g, profile)}
            assert got <= full
            if all(
                all(v > 0 for v in dist.values()) and len(dist) == len(g.node(g.info_set(i).nodes[0]).actions)
                for s in profile.strategies.values()
                for i, dist in s.choices.items()
            ):
                assert got == full


class TestChanceProbability:
    def test_chance_free_play_is_one(self):
        g = matching_pennies()
        play = g.play_to_leaf("s3")
        assert chance_probability(g, play) == 1

    def test_single_fair_toss(self):
        g = three_player_pennies()
        play = g.play_to_leaf("s12")
        assert chance_probability(g, play) == rat(1, 2)

    def test_two_independent_tosses(self):
        nodes = [
            Node("r", actions=(("a", "m1"), ("b", "m2")),
                 probs={"a": rat(1, 2), "b": rat(1, 2)}),
            Node("m1", actions=(("a", "l1"), ("b", "l2")),
                 probs={"a": rat(1, 2), "b": rat(1, 2)}),
            Node("m2", actions=(("a", "l3"), ("b", "l4")),
                 probs={"a": rat(1, 2), "b": rat(1, 2)}),
            Node("l1", label=True),
            Node("l2", label=False),
            Node("l3", label=False),
            Node("l4", label=True),
        ]
        g = make_game(1, nodes, "r", {"r": CHANCE, "m1": CHANCE, "m2": CHANCE})
        for leaf in ("l1", "l2", "l3", "l4"):
            assert chance_probability(g, g.play_to_leaf(leaf)) == rat(1, 4)

    def test_total_play_mass_is_one(self):
        rng = random.Random(5)
        for _ in range(25):
            g = random_game(rng)
            profile = random_profile(rng, g)
            iset_of = g.info_set_of
            total = rat(0)
            for play in enumerate_plays(g):
                mass = chance_probability(g, play)
                for nid, action in play.steps():
                    owner = g.owners[nid]
                    if owner != CHANCE:
                        mass *= profile.strategy(owner).prob(iset_of[nid].id, action)
                total += mass
            assert total == 1
