"""Randomized cross-theory invariants at desk scale.

The acceptance module runs the same properties at the contractual sample
sizes; these keep the logic exercised on every test run and document the
statements being relied on.
"""

import random

from respgames.coalition import Coalition
from respgames.games import enumerate_plays
from respgames.randgen import (
    consistent_event_play,
    event_plays,
    random_game,
    random_profile,
)
from respgames.responsibility import (
    BackwardContext,
    is_responsible,
    minimal_responsible_coalitions,
    property_fn,
)


def subsets(players):
    for mask in range(1 << len(players)):
        yield tuple(p for i, p in enumerate(players) if mask & (1 << i))


def forward_equals_backward_everywhere(g) -> bool:
    """Forward responsibility coincides with containing a strategic
    witness on every event play, minimally so."""
    players = tuple(range(1, g.players + 1))
    plays = event_plays(g)
    per_play_minimal = [
        [set(c.members) for c in minimal_responsible_coalitions(g, "s", BackwardContext(p))]
        for p in plays
    ]

    def contains_witness_everywhere(members) -> bool:
        ms = set(members)
        return all(any(m <= ms for m in minimal) for minimal in per_play_minimal)

    for members in subsets(players):
        lhs = is_responsible(g, Coalition.of(members), "f")
        holds = contains_witness_everywhere(members)
        minimal = holds and all(
            not contains_witness_everywhere(tuple(m for m in members if m != i))
            for i in members
        )
        if lhs != minimal:
            return False
    return True


def strategic_implies_causal(g, profile, play) -> bool:
    ctx_s = BackwardContext(play)
    ctx_c = BackwardContext(play, profile)
    causal_minimal = [
        set(c.members) for c in minimal_responsible_coalitions(g, "c", ctx_c)
    ]
    players = tuple(range(1, g.players + 1))
    for members in subsets(players):
        if is_responsible(g, Coalition.of(members), "s", ctx_s):
            ms = set(members)
            if not any(m <= ms for m in causal_minimal):
                return False
    return True


class TestForwardBackwardCorrespondence:
    def test_on_random_games(self):
        rng = random.Random(131)
        for _ in range(25):
            g = random_game(rng, max_nodes=14, max_players=3)
            assert forward_equals_backward_everywhere(g), g


class TestStrategicToCausal:
    def test_on_random_triples_with_pure_opponents(self):
        # The implication needs the fixed profile to be pure: only then is
        # every play under a deviation strategy forced through the
        # strategic witness info set.
        rng = random.Random(137)
        done = 0
        while done < 25:
            g = random_game(rng, max_nodes=14, max_players=3)
            profile = random_profile(rng, g, pure_prob=1.0)
            play = consistent_event_play(rng, g, profile)
            if play is None:
                continue
            done += 1
            assert strategic_implies_causal(g, profile, play), (g, play)

    def test_mixed_profiles_break_the_implication(self):
        # Known boundary: an opponent mixing off the play can reach event
        # leaves that bypass the strategic witness set, so a strategically
        # responsible coalition may contain no causally responsible one.
        from respgames.games import BehavioralStrategy, InfoSet, Node, StrategyProfile, make_game
        from respgames.rational import rat

        nodes = [
            Node("r1", actions=(("a0", "r2"),)),
            Node("r2", actions=(("a0", "r3"), ("a1", "r4"), ("a2", "r5"))),
            Node("r3", label=True),
            Node("r4", actions=(("a0", "r6"), ("a1", "r7"))),
            Node("r5", actions=(("a0", "r8"), ("a1", "r9"))),
            Node("r6", label=False),
            Node("r7", label=False),
            Node("r8", label=True),
            Node("r9", label=False),
        ]
        owners = {"r1": 2, "r2": 3, "r4": 2, "r5": 2}
        g = make_game(3, nodes, "r1", owners, [
            InfoSet("I1", 2, ("r1",)),
            InfoSet("I2", 3, ("r2",)),
            InfoSet("I45", 2, ("r4", "r5")),
        ])
        profile = StrategyProfile({
            1: BehavioralStrategy(1, {}),
            2: BehavioralStrategy(2, {"I1": {"a0": rat(1)}, "I45": {"a0": rat(1)}}),
            3: BehavioralStrategy(3, {"I2": {
                "a0": rat(1, 3), "a1": rat(1, 3), "a2": rat(1, 3)}}),
        })
        play = g.play_to_leaf("r8")
        ctx_s = BackwardContext(play)
        ctx_c = BackwardContext(play, profile)
        assert is_responsible(g, Coalition.of((2,)), "s", ctx_s)
        causal_minimal = minimal_responsible_coalitions(g, "c", ctx_c)
        assert all(not set(c.members) <= {2} for c in causal_minimal)


class TestPropertyMonotonicity:
    def test_success_survives_growth(self):
        # All three responsibility properties grow with the coalition.
        rng = random.Random(139)
        done = 0
        while done < 20:
            g = random_game(rng, max_nodes=16, max_players=4)
            profile = random_profile(rng, g)
            play = consistent_event_play(rng, g, profile)
            checks = [("f", None)]
            if play is not None:
                checks += [("s", BackwardContext(play)), ("c", BackwardContext(play, profile))]
            done += 1
            players = tuple(range(1, g.players + 1))
            for kind, ctx in checks:
                prop = property_fn(g, kind, ctx)
                for members in subsets(players):
                    if prop(Coalition.of(members)):
                        for extra in players:
                            grown = tuple(sorted(set(members) | {extra}))
                            assert prop(Coalition.of(grown)), (kind, members, extra)
