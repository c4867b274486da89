import random

import pytest

from respgames.coalition import C_SIDE, CBAR_SIDE, Coalition, induce, lift_profile, post_states
from respgames.corpus import (
    _running_profiles,
    matching_pennies,
    refinement_counterexample,
    three_player_pennies,
)
from respgames.errors import InputError
from respgames.games import CHANCE, StrategyProfile, check_perfect_recall, pure, validate_game
from respgames.randgen import random_game, random_profile
from respgames.rational import rat


def side_partition(g2, side):
    return {frozenset(i.nodes) for i in g2.info_sets if i.owner == side}


class TestInduce:
    def test_pennies_full_coalition_splits(self):
        ig = induce(matching_pennies(), Coalition.of((1, 2)))
        assert side_partition(ig.game, C_SIDE) == {
            frozenset({"s0"}), frozenset({"s1"}), frozenset({"s2"}),
        }
        assert validate_game(ig.game).ok

    def test_counterexample_pool_splits(self):
        ig = induce(refinement_counterexample(), Coalition.of((2, 3)))
        assert frozenset({"s3"}) in side_partition(ig.game, C_SIDE)
        assert frozenset({"s4"}) in side_partition(ig.game, C_SIDE)

    def test_counterexample_unrefined_keeps_pool(self):
        ig = induce(refinement_counterexample(), Coalition.of((2, 3)), refine=False)
        assert frozenset({"s3", "s4"}) in side_partition(ig.game, C_SIDE)
        ok, _ = check_perfect_recall(ig.game)
        assert not ok  # the whole point of the refinement

    def test_empty_coalition(self):
        g = three_player_pennies()
        ig = induce(g, Coalition.of(()))
        assert all(owner != C_SIDE for owner in ig.game.owners.values())
        assert validate_game(ig.game).ok

    def test_blind_side_stays_pooled(self):
        # Player 2 alone cannot tell the pennies states apart.
        ig = induce(matching_pennies(), Coalition.of((2,)))
        assert frozenset({"s1", "s2"}) in side_partition(ig.game, C_SIDE)

    def test_structure_shared_with_source(self):
        g = three_player_pennies()
        ig = induce(g, Coalition.of((1, 3)))
        assert ig.game.nodes is g.nodes
        assert ig.game.root == g.root
        assert {i.id for i in ig.game.info_sets if i.owner == CHANCE} == {"I2"}

    def test_invalid_member(self):
        with pytest.raises(InputError):
            induce(matching_pennies(), Coalition.of((3,)))

    def test_refinement_is_a_refinement_and_recall_holds(self):
        rng = random.Random(23)
        for _ in range(40):
            g = random_game(rng)
            members = [p for p in range(1, g.players + 1) if rng.random() < 0.5]
            ig = induce(g, Coalition.of(members))
            assert validate_game(ig.game).ok
            ok, witnesses = check_perfect_recall(ig.game)
            assert ok, witnesses
            source_of = {i.id: i for i in g.info_sets}
            for iset in ig.game.info_sets:
                src_id, _ = ig.info_set_origin[iset.id]
                assert set(iset.nodes) <= set(source_of[src_id].nodes)

    def test_monotone_knowledge(self):
        # A larger coalition distinguishes at least as much.
        rng = random.Random(29)
        for _ in range(30):
            g = random_game(rng)
            players = list(range(1, g.players + 1))
            small = [p for p in players if rng.random() < 0.4]
            big = sorted(set(small) | {p for p in players if rng.random() < 0.4})
            ig_small = induce(g, Coalition.of(small))
            ig_big = induce(g, Coalition.of(big))
            small_sets = side_partition(ig_small.game, C_SIDE)
            owned_by_small = {
                nid for nid, p in g.owners.items() if p in set(small)
            }
            for big_set in side_partition(ig_big.game, C_SIDE):
                restricted = frozenset(n for n in big_set if n in owned_by_small)
                if restricted:
                    assert any(restricted <= s for s in small_sets)

    def test_idempotent_up_to_renaming(self):
        rng = random.Random(31)
        for _ in range(20):
            g = random_game(rng)
            members = [p for p in range(1, g.players + 1) if rng.random() < 0.5]
            ig = induce(g, Coalition.of(members))
            again = induce(ig.game, Coalition.of((C_SIDE,)))
            for side in (C_SIDE, CBAR_SIDE):
                assert side_partition(ig.game, side) == side_partition(again.game, side)


class TestPostStates:
    def test_root_info_set_covers_everything(self):
        g = three_player_pennies()
        ig = induce(g, Coalition.of((1,)))
        root_iset = ig.game.info_set_of[g.root]
        assert post_states(ig, root_iset.id) == set(g.nodes)

    def test_leaf_parent_singleton(self):
        g = matching_pennies()
        ig = induce(g, Coalition.of((1,)))
        iset = ig.game.info_set_of["s1"]
        if len(iset.nodes) == 2:
            assert post_states(ig, iset.id) == {"s1", "s2", "s3", "s4", "s5", "s6"}

    def test_running_example_pooled_set(self):
        g = three_player_pennies()
        ig = induce(g, Coalition.of((3,)))
        iset = ig.game.info_set_of["s3"]
        assert set(iset.nodes) == {"s3", "s4"}
        assert post_states(ig, iset.id) == {"s3", "s4", "s7", "s8", "s9", "s10"}


class TestLiftProfile:
    def test_pure_lift_on_pennies(self):
        g = matching_pennies()
        profile = StrategyProfile({1: pure(1, {"I0": "h1"}), 2: pure(2, {"I12": "t2"})})
        ig = induce(g, Coalition.of((1,)))
        sc, sb = lift_profile(g, profile, Coalition.of((1,)), ig)
        assert sc.owner == C_SIDE and sb.owner == CBAR_SIDE
        root_iset = ig.game.info_set_of["s0"].id
        assert sc.choices[root_iset] == {"h1": rat(1)}

    def test_sigma_one_lift_inherits_on_coalition_side(self):
        # {1,3} cannot see player 2's action, so I34 stays whole and inherits.
        g = three_player_pennies()
        sigma1, _ = _running_profiles()
        ig = induce(g, Coalition.of((1, 3)))
        sc, _ = lift_profile(g, sigma1, Coalition.of((1, 3)), ig)
        parts = [i for i in ig.game.info_sets
                 if ig.info_set_origin[i.id][0] == "I34" and i.owner == C_SIDE]
        assert len(parts) == 1
        for part in parts:
            assert sc.choices[part.id] == {"h3": rat(1)}

    def test_complement_side_splits_by_own_actions(self):
        # Against {1}, the pooled opponent {2,3} tells s3 from s4 because
        # player 2's own action differs.
        g = three_player_pennies()
        sigma1, _ = _running_profiles()
        ig = induce(g, Coalition.of((1,)))
        _, sb = lift_profile(g, sigma1, Coalition.of((1,)), ig)
        parts = [i for i in ig.game.info_sets
                 if ig.info_set_origin[i.id][0] == "I34" and i.owner == CBAR_SIDE]
        assert sorted(tuple(p.nodes) for p in parts) == [("s3",), ("s4",)]
        for part in parts:
            assert sb.choices[part.id] == {"h3": rat(1)}

    def test_uniform_lifts_uniform(self):
        rng = random.Random(37)
        g = random_game(rng)
        profile = random_profile(rng, g, pure_prob=0.0)
        members = [p for p in range(1, g.players + 1) if rng.random() < 0.5]
        ig = induce(g, Coalition.of(members))
        sc, sb = lift_profile(g, profile, Coalition.of(members), ig)
        for strat in (sc, sb):
            for iset_id, dist in strat.choices.items():
                src_id, _ = ig.info_set_origin[iset_id]
                src_owner = next(i.owner for i in g.info_sets if i.id == src_id)
                assert dist == profile.strategy(src_owner).choices[src_id]
