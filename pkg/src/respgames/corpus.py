"""Bundled example games with known responsibility values.

Each entry ships a game plus named scenario cases (kind, play, profile and
the expected responsibility vector or minimal coalitions).  The larger
scenarios are generated programmatically from parameter counts; semantics
per generator are documented on the spot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .coalition import Coalition
from .games import (
    CHANCE,
    BehavioralStrategy,
    GameTree,
    InfoSet,
    Node,
    Play,
    StrategyProfile,
    make_game,
    pure,
)
from .rational import ONE, Rat, rat

E = True
NE = False


def _leaf(nid: str, label: bool) -> Node:
    return Node(id=nid, label=label)


def matching_pennies() -> GameTree:
    """Two players pick a coin side without seeing each other; event = mismatch."""
    nodes = [
        Node("s0", actions=(("h1", "s1"), ("t1", "s2"))),
        Node("s1", actions=(("h2", "s3"), ("t2", "s4"))),
        Node("s2", actions=(("h2", "s5"), ("t2", "s6"))),
        _leaf("s3", NE),
        _leaf("s4", E),
        _leaf("s5", E),
        _leaf("s6", NE),
    ]
    owners = {"s0": 1, "s1": 2, "s2": 2}
    info_sets = [
        InfoSet("I0", 1, ("s0",)),
        InfoSet("I12", 2, ("s1", "s2")),
    ]
    return make_game(2, nodes, "s0", owners, info_sets)


def three_player_pennies() -> GameTree:
    """Player 1 picks a mode: either players 2 and 3 mismatch-match coins
    blindly, or a fair coin is tossed openly and player 3 answers it."""
    nodes = [
        Node("s0", actions=(("A", "s1"), ("B", "s2"))),
        Node("s1", actions=(("h2", "s3"), ("t2", "s4"))),
        Node("s2", actions=(("h2'", "s5"), ("t2'", "s6")),
             probs={"h2'": rat(1, 2), "t2'": rat(1, 2)}),
        Node("s3", actions=(("h3", "s7"), ("t3", "s8"))),
        Node("s4", actions=(("h3", "s9"), ("t3", "s10"))),
        Node("s5", actions=(("h3", "s11"), ("t3", "s12"))),
        Node("s6", actions=(("h3", "s13"), ("t3", "s14"))),
        _leaf("s7", NE),
        _leaf("s8", E),
        _leaf("s9", E),
        _leaf("s10", NE),
        _leaf("s11", NE),
        _leaf("s12", E),
        _leaf("s13", E),
        _leaf("s14", NE),
    ]
    owners = {"s0": 1, "s1": 2, "s2": CHANCE, "s3": 3, "s4": 3, "s5": 3, "s6": 3}
    info_sets = [
        InfoSet("I0", 1, ("s0",)),
        InfoSet("I1", 2, ("s1",)),
        InfoSet("I2", CHANCE, ("s2",)),
        InfoSet("I34", 3, ("s3", "s4")),
        InfoSet("I5", 3, ("s5",)),
        InfoSet("I6", 3, ("s6",)),
    ]
    return make_game(3, nodes, "s0", owners, info_sets)


def refinement_counterexample() -> GameTree:
    """Shows why pooled information sets must be refined: player 3 cannot act
    correctly in its merged info set, but the pool including player 2 can."""
    nodes = [
        Node("s0", actions=(("A", "s1"), ("B", "s2"))),
        Node("s1", actions=(("a", "s5"), ("b", "s3"))),
        Node("s2", actions=(("c", "s4"), ("d", "s10"))),
        Node("s3", actions=(("x", "s6"), ("y", "s7"))),
        Node("s4", actions=(("x", "s8"), ("y", "s9"))),
        _leaf("s5", E),
        _leaf("s6", NE),
        _leaf("s7", E),
        _leaf("s8", E),
        _leaf("s9", NE),
        _leaf("s10", E),
    ]
    owners = {"s0": 1, "s1": 2, "s2": 2, "s3": 3, "s4": 3}
    info_sets = [
        InfoSet("I0", 1, ("s0",)),
        InfoSet("I1", 2, ("s1",)),
        InfoSet("I2", 2, ("s2",)),
        InfoSet("I34", 3, ("s3", "s4")),
    ]
    return make_game(3, nodes, "s0", owners, info_sets)


def bystanders(n: int = 4, victims: int = 3) -> GameTree:
    """Bystanders arrive one by one, see what happened before them, and
    choose to help or pass; each helper assists a distinct victim, so the
    event (some victim dies) is avoided iff at least ``victims`` help."""
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    for depth in range(n + 1):
        for word in product("hp", repeat=depth):
            nid = "n" + "".join(word)
            if depth == n:
                helped = word.count("h")
                nodes.append(_leaf(nid, helped < victims))
            else:
                nodes.append(Node(nid, actions=(("help", nid + "h"), ("pass", nid + "p"))))
                owners[nid] = depth + 1
    return make_game(n, nodes, "n", owners, auto_singletons=True)


def voting(n: int = 11) -> GameTree:
    """Secret one-round vote between A and B, absolute majority wins; the
    event is that A loses.  Voter i sees nothing, so each voter has a single
    information set spanning all its nodes."""
    if n % 2 == 0:
        raise ValueError("use an odd voter count")
    majority = (n + 1) // 2
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    layers: list[list[str]] = [[] for _ in range(n)]
    for depth in range(n + 1):
        for word in product("AB", repeat=depth):
            nid = "v" + "".join(word)
            if depth == n:
                a_votes = word.count("A")
                nodes.append(_leaf(nid, a_votes < majority))
            else:
                nodes.append(Node(nid, actions=(("A", nid + "A"), ("B", nid + "B"))))
                owners[nid] = depth + 1
                layers[depth].append(nid)
    info_sets = [
        InfoSet(f"V{i + 1}", i + 1, tuple(layer)) for i, layer in enumerate(layers)
    ]
    return make_game(n, nodes, "v", owners, info_sets)


def marksmen(n: int = 10) -> GameTree:
    """A firing squad where chance secretly gives one marksman the live
    bullet, then everyone decides to fire or hold; the prisoner dies iff the
    live-bullet holder fires.  Nobody observes anything."""
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    layers: list[list[str]] = [[] for _ in range(n)]
    root_actions = tuple((str(i + 1), f"m{i + 1}.") for i in range(n))
    nodes.append(Node("m", actions=root_actions,
                      probs={str(i + 1): rat(1, n) for i in range(n)}))
    owners["m"] = CHANCE
    for star in range(1, n + 1):
        for depth in range(n + 1):
            for word in product("fh", repeat=depth):
                nid = f"m{star}." + "".join(word)
                if depth == n:
                    fired = word[star - 1] == "f"
                    nodes.append(_leaf(nid, fired))
                else:
                    nodes.append(Node(nid, actions=(("f", nid + "f"), ("h", nid + "h"))))
                    owners[nid] = depth + 1
                    layers[depth].append(nid)
    info_sets = [InfoSet("Ichance", CHANCE, ("m",))]
    info_sets += [
        InfoSet(f"M{i + 1}", i + 1, tuple(layer)) for i, layer in enumerate(layers)
    ]
    return make_game(n, nodes, "m", owners, info_sets)


def prisoners_death() -> GameTree:
    """Guard 1 may load the gun, guard 2 fires it blindly, guard 3 sees
    everything and can finish the job with a shot of his own.  The prisoner
    dies iff guard 2 fires a loaded gun or guard 3 shoots."""
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    g2_nodes = []
    g3_nodes = []
    for w1 in "ln":  # load / not
        nid1 = "g" + w1
        for w2 in "fs":  # fire / stand down
            nid2 = nid1 + w2
            for w3 in "fs":
                nid3 = nid2 + w3
                dies = (w1 == "l" and w2 == "f") or w3 == "f"
                nodes.append(_leaf(nid3, dies))
            nodes.append(Node(nid2, actions=(("f", nid2 + "f"), ("s", nid2 + "s"))))
            owners[nid2] = 3
            g3_nodes.append(nid2)
        nodes.append(Node(nid1, actions=(("f", nid1 + "f"), ("s", nid1 + "s"))))
        owners[nid1] = 2
        g2_nodes.append(nid1)
    nodes.append(Node("g", actions=(("l", "gl"), ("n", "gn"))))
    owners["g"] = 1
    info_sets = [
        InfoSet("G1", 1, ("g",)),
        InfoSet("G2", 2, tuple(g2_nodes)),
    ]
    info_sets += [InfoSet(f"G3{nid}", 3, (nid,)) for nid in g3_nodes]
    return make_game(3, nodes, "g", owners, info_sets)


def bogus_prevention() -> GameTree:
    """A bodyguard chooses whether to add an antidote, then an assassin,
    seeing that, chooses whether to poison; the event is survival."""
    nodes = [
        Node("b", actions=(("antidote", "ba"), ("none", "bn"))),
        Node("ba", actions=(("poison", "bap"), ("hold", "bah"))),
        Node("bn", actions=(("poison", "bnp"), ("hold", "bnh"))),
        _leaf("bap", E),   # poison neutralized, survives
        _leaf("bah", E),
        _leaf("bnp", NE),  # poisoned, dies
        _leaf("bnh", E),
    ]
    owners = {"b": 1, "ba": 2, "bn": 2}
    return make_game(2, nodes, "b", owners, auto_singletons=True)


def bogus_prevention_friend() -> GameTree:
    """Variant where the assassin is not an agent: the poisoning reaction
    (poison exactly when the antidote is in) is wired into the scenario, so
    the bodyguard is the only player and survival is unavoidable."""
    nodes = [
        Node("b", actions=(("antidote", "ba"), ("none", "bn"))),
        Node("ba", actions=(("poison", "bap"),), probs={"poison": ONE}),
        Node("bn", actions=(("hold", "bnh"),), probs={"hold": ONE}),
        _leaf("bap", E),
        _leaf("bnh", E),
    ]
    owners = {"b": 1, "ba": CHANCE, "bn": CHANCE}
    return make_game(1, nodes, "b", owners, auto_singletons=True)


# -- scenario bundles ---------------------------------------------------------


@dataclass
class Case:
    """One named responsibility query with its expected outcome."""

    kind: str  # "f" | "s" | "c"
    variant: str
    play_leaf: str | None = None
    profile: StrategyProfile | None = None
    expected_values: tuple[Rat, ...] | None = None
    expected_minimal: tuple[tuple[int, ...], ...] | None = None


@dataclass
class Example:
    name: str
    game: GameTree
    cases: list[Case] = field(default_factory=list)

    def case(self, kind: str, variant: str | None = None) -> Case:
        found = [c for c in self.cases if c.kind == kind and (variant is None or c.variant == variant)]
        if not found:
            raise KeyError(f"no case kind={kind!r} variant={variant!r} in {self.name!r}")
        return found[0]


def _uniform_profile(g: GameTree) -> StrategyProfile:
    strategies = {}
    for player in range(1, g.players + 1):
        choices = {}
        for iset in g.info_sets:
            if iset.owner != player:
                continue
            acts = [a for a, _ in g.node(iset.nodes[0]).actions]
            choices[iset.id] = {a: rat(1, len(acts)) for a in acts}
        strategies[player] = BehavioralStrategy(owner=player, choices=choices)
    return StrategyProfile(strategies=strategies)


def _pure_profile(g: GameTree, table: dict[int, dict[str, str]]) -> StrategyProfile:
    return StrategyProfile(
        strategies={p: pure(p, choices) for p, choices in table.items()}
    )


def _bystanders_profiles() -> tuple[StrategyProfile, StrategyProfile]:
    g = bystanders()
    iset_of_player: dict[int, list[str]] = {p: [] for p in range(1, 5)}
    for iset in g.info_sets:
        iset_of_player[iset.owner].append(iset.id)

    def node_of(iset_id: str) -> str:
        return g.info_set(iset_id).nodes[0]

    # Only bystander 1 helps; everyone else passes unconditionally.
    lone = _pure_profile(
        g,
        {
            1: {i: "help" for i in iset_of_player[1]},
            2: {i: "pass" for i in iset_of_player[2]},
            3: {i: "pass" for i in iset_of_player[3]},
            4: {i: "pass" for i in iset_of_player[4]},
        },
    )
    # Bystander effect: 4 helps exactly if 3 helped; 2 and 3 never help.
    effect = _pure_profile(
        g,
        {
            1: {i: "help" for i in iset_of_player[1]},
            2: {i: "pass" for i in iset_of_player[2]},
            3: {i: "pass" for i in iset_of_player[3]},
            4: {
                i: ("help" if node_of(i)[3] == "h" else "pass")
                for i in iset_of_player[4]
            },
        },
    )
    return lone, effect


def _running_profiles() -> tuple[StrategyProfile, StrategyProfile]:
    g = three_player_pennies()
    one = _pure_profile(
        g, {1: {"I0": "B"}, 2: {"I1": "h2"}, 3: {"I34": "h3", "I5": "t3", "I6": "t3"}}
    )
    two = _pure_profile(
        g, {1: {"I0": "A"}, 2: {"I1": "h2"}, 3: {"I34": "t3", "I5": "h3", "I6": "t3"}}
    )
    return one, two


def _prisoner_profiles() -> tuple[StrategyProfile, StrategyProfile]:
    g = prisoners_death()
    g3 = [i.id for i in g.info_sets if i.owner == 3]
    stubborn = _pure_profile(
        g, {1: {"G1": "l"}, 2: {"G2": "s"}, 3: {i: "f" for i in g3}}
    )
    # Guard 3 holds fire only if nobody else even tried: gun not loaded and
    # guard 2 stood down.
    reactive_choices = {}
    for iset_id in g3:
        nid = g.info_set(iset_id).nodes[0]
        loaded, fired2 = nid[1] == "l", nid[2] == "f"
        reactive_choices[iset_id] = "s" if (not loaded and not fired2) else "f"
    reactive = _pure_profile(g, {1: {"G1": "l"}, 2: {"G2": "s"}, 3: reactive_choices})
    return stubborn, reactive


def _voting_profile() -> StrategyProfile:
    g = voting()
    return _pure_profile(
        g,
        {p: {f"V{p}": ("A" if p <= 4 else "B")} for p in range(1, 12)},
    )


def _marksmen_profile() -> StrategyProfile:
    g = marksmen()
    return _pure_profile(g, {p: {f"M{p}": "f"} for p in range(1, 11)})


def _bogus_profiles() -> StrategyProfile:
    g = bogus_prevention()
    return _pure_profile(g, {1: {"@b": "antidote"}, 2: {"@ba": "poison", "@bn": "poison"}})


def build_corpus() -> dict[str, Example]:
    """All bundled examples, keyed by public name."""
    examples: dict[str, Example] = {}

    g = matching_pennies()
    pennies_played = _pure_profile(g, {1: {"I0": "h1"}, 2: {"I12": "t2"}})
    examples["matching-pennies"] = Example(
        name="matching-pennies",
        game=g,
        cases=[
            Case("f", "default", expected_values=(rat(1, 2), rat(1, 2))),
            Case("c", "as-played", play_leaf="s4", profile=pennies_played,
                 expected_values=(rat(1, 2), rat(1, 2)),
                 expected_minimal=((1,), (2,))),
        ],
    )

    g = three_player_pennies()
    sigma1, sigma2 = _running_profiles()
    examples["running-example"] = Example(
        name="running-example",
        game=g,
        cases=[
            Case("f", "default",
                 expected_values=(rat(1, 6), rat(1, 6), rat(2, 3)),
                 expected_minimal=((1, 3), (2, 3))),
            Case("s", "blind-mode", play_leaf="s8",
                 expected_values=(rat(1, 6), rat(1, 6), rat(2, 3))),
            Case("s", "revealed-coin", play_leaf="s12",
                 expected_values=(rat(0), rat(0), rat(1)),
                 expected_minimal=((3,),)),
            Case("c", "sigma1", play_leaf="s12", profile=sigma1,
                 expected_minimal=((1,), (3,))),
            Case("c", "sigma2", play_leaf="s8", profile=sigma2,
                 expected_values=(rat(1, 3), rat(1, 3), rat(1, 3)),
                 expected_minimal=((1,), (2,), (3,))),
        ],
    )

    examples["refinement-counterexample"] = Example(
        name="refinement-counterexample",
        game=refinement_counterexample(),
        cases=[Case("f", "default", expected_minimal=((2, 3),))],
    )

    g = bystanders()
    lone, effect = _bystanders_profiles()
    examples["bystanders"] = Example(
        name="bystanders",
        game=g,
        cases=[
            Case("f", "default",
                 expected_values=(rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4))),
            Case("s", "one-and-three-help", play_leaf="nhphp",
                 expected_values=(rat(0), rat(1, 6), rat(1, 6), rat(2, 3)),
                 expected_minimal=((4,), (2, 3))),
            Case("c", "lone-helper", play_leaf="nhppp", profile=lone,
                 expected_values=(rat(0), rat(1, 3), rat(1, 3), rat(1, 3))),
            Case("c", "bystander-effect", play_leaf="nhppp", profile=effect,
                 expected_values=(rat(0), rat(1, 6), rat(2, 3), rat(1, 6))),
        ],
    )

    g = voting()
    vote_profile = _voting_profile()
    eleven = tuple(rat(1, 11) for _ in range(11))
    examples["voting"] = Example(
        name="voting",
        game=g,
        cases=[
            Case("f", "default", expected_values=eleven),
            Case("s", "four-seven", play_leaf="v" + "A" * 4 + "B" * 7,
                 expected_values=eleven),
            Case("c", "four-seven", play_leaf="v" + "A" * 4 + "B" * 7,
                 profile=vote_profile,
                 expected_values=tuple(
                     rat(0) if p <= 4 else rat(1, 7) for p in range(1, 12)
                 )),
        ],
    )

    g = marksmen()
    fire_all = _marksmen_profile()
    tenth = tuple(rat(1, 10) for _ in range(10))
    examples["marksmen"] = Example(
        name="marksmen",
        game=g,
        cases=[
            Case("f", "default", expected_values=tenth),
            Case("s", "live-one-fires", play_leaf="m1." + "f" * 10,
                 expected_values=tenth),
            Case("c", "live-one-fires", play_leaf="m1." + "f" * 10,
                 profile=fire_all,
                 expected_values=(rat(1),) + tuple(rat(0) for _ in range(9))),
        ],
    )

    g = prisoners_death()
    stubborn, reactive = _prisoner_profiles()
    examples["prisoners-death"] = Example(
        name="prisoners-death",
        game=g,
        cases=[
            Case("f", "default",
                 expected_values=(rat(1, 6), rat(1, 6), rat(2, 3)),
                 expected_minimal=((1, 3), (2, 3))),
            Case("s", "third-guard-fires", play_leaf="glsf",
                 expected_values=(rat(0), rat(0), rat(1)),
                 expected_minimal=((3,),)),
            Case("c", "stubborn", play_leaf="glsf", profile=stubborn,
                 expected_values=(rat(0), rat(0), rat(1)),
                 expected_minimal=((3,),)),
            Case("c", "reactive", play_leaf="glsf", profile=reactive,
                 expected_values=(rat(1, 2), rat(0), rat(1, 2)),
                 expected_minimal=((1,), (3,))),
        ],
    )

    g = bogus_prevention()
    examples["bogus-prevention"] = Example(
        name="bogus-prevention",
        game=g,
        cases=[
            Case("c", "antidote-vs-poison", play_leaf="bap", profile=_bogus_profiles(),
                 expected_values=(rat(1), rat(0)),
                 expected_minimal=((1,),)),
        ],
    )

    g = bogus_prevention_friend()
    examples["bogus-prevention-friend"] = Example(
        name="bogus-prevention-friend",
        game=g,
        cases=[
            Case("c", "void", play_leaf="bap",
                 profile=_pure_profile(g, {1: {"@b": "antidote"}}),
                 expected_values=(rat(0),),
                 expected_minimal=()),
        ],
    )

    return examples
