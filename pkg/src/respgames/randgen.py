"""Random game and profile generators for randomized suites.

Games are layered: every depth has a single owner (a player or chance) and
information sets are built top-down by partitioning each layer on the
owner's own history.  That construction guarantees perfect recall, and the
depth-uniform ownership keeps every derived game inside the solver's
perfect-recall fragment.
"""

from __future__ import annotations

import random

from .games import CHANCE, BehavioralStrategy, GameTree, InfoSet, Node, Play, StrategyProfile, make_game
from .rational import Rat, rat

_DEFAULT_SEED = 0


def set_default_seed(seed: int) -> None:
    global _DEFAULT_SEED
    _DEFAULT_SEED = seed


def default_rng(offset: int = 0) -> random.Random:
    return random.Random(_DEFAULT_SEED + offset)


def random_game(
    rng: random.Random,
    max_players: int = 4,
    max_depth: int = 5,
    max_actions: int = 3,
    max_nodes: int = 40,
    chance_weight: float = 0.25,
    event_prob: float = 0.45,
    players: int | None = None,
    term_rate: float = 0.25,
) -> GameTree:
    if players is None:
        players = rng.randint(1, max_players)
    depth = rng.randint(1, max_depth)
    layer_owner = []
    for _ in range(depth):
        if rng.random() < chance_weight:
            layer_owner.append(CHANCE)
        else:
            layer_owner.append(rng.randint(1, players))

    nodes: list[Node] = []
    owners: dict[str, int] = {}
    info_sets: list[InfoSet] = []
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"r{counter}"

    # Per-node own-history chains per player (nested tuples, shared tails).
    root_id = fresh()
    current: list[tuple[str, tuple]] = [(root_id, ())]
    hist: dict[str, dict[int, tuple]] = {root_id: {p: () for p in range(1, players + 1)}}
    total = 1
    pending: dict[str, list[tuple[str, str]]] = {}

    for d in range(depth):
        owner = layer_owner[d]
        alive: list[str] = []
        for nid, _ in current:
            over_budget = total >= max_nodes
            if over_budget or rng.random() < term_rate * d:
                nodes.append(Node(nid, label=rng.random() < event_prob))
            else:
                alive.append(nid)
        groups: dict[tuple, list[str]] = {}
        for nid in alive:
            key = hist[nid][owner] if owner != CHANCE else ()
            groups.setdefault(key, []).append(nid)
        next_layer: list[tuple[str, tuple]] = []
        for gi, (key, members) in enumerate(sorted(groups.items(), key=lambda kv: kv[1][0])):
            k = rng.randint(1, max_actions)
            acts = [f"a{j}" for j in range(k)]
            probs = None
            if owner == CHANCE:
                weights = [rng.randint(1, 4) for _ in acts]
                s = sum(weights)
                probs = {a: rat(w, s) for a, w in zip(acts, weights)}
            iset_id = f"L{d}.{gi}"
            info_sets.append(InfoSet(iset_id, owner, tuple(members)))
            for nid in members:
                children = []
                for a in acts:
                    cid = fresh()
                    children.append((a, cid))
                    h = dict(hist[nid])
                    if owner != CHANCE:
                        h[owner] = (h[owner], (iset_id, a))
                    hist[cid] = h
                    next_layer.append((cid, ()))
                    total += 1
                owners[nid] = owner
                nodes.append(Node(nid, actions=tuple(children), probs=probs))
        current = next_layer

    for nid, _ in current:
        nodes.append(Node(nid, label=rng.random() < event_prob))

    return make_game(players, nodes, root_id, owners, info_sets)


def random_two_player_game(rng: random.Random, **kwargs) -> GameTree:
    """Either a direct two-player layered game or a coalition-induced one."""
    from .coalition import Coalition, induce

    if rng.random() < 0.5:
        return random_game(rng, players=2, max_players=2, **kwargs)
    g = random_game(rng, **kwargs)
    members = [p for p in range(1, g.players + 1) if rng.random() < 0.5]
    return induce(g, Coalition.of(members)).game


def random_profile(rng: random.Random, g: GameTree, pure_prob: float = 0.6) -> StrategyProfile:
    strategies = {}
    for player in range(1, g.players + 1):
        choices: dict[str, dict[str, Rat]] = {}
        for iset in g.info_sets:
            if iset.owner != player:
                continue
            acts = [a for a, _ in g.node(iset.nodes[0]).actions]
            if rng.random() < pure_prob:
                choices[iset.id] = {rng.choice(acts): rat(1)}
            else:
                weights = [rng.randint(0, 3) for _ in acts]
                if sum(weights) == 0:
                    weights[rng.randrange(len(acts))] = 1
                s = sum(weights)
                choices[iset.id] = {
                    a: rat(w, s) for a, w in zip(acts, weights) if w
                }
        strategies[player] = BehavioralStrategy(owner=player, choices=choices)
    return StrategyProfile(strategies=strategies)


def event_plays(g: GameTree) -> list[Play]:
    from .games import enumerate_plays

    return [p for p in enumerate_plays(g) if g.node(p.leaf).label]


def consistent_event_play(rng: random.Random, g: GameTree, profile: StrategyProfile) -> Play | None:
    from .games import consistent_plays

    plays = [p for p in consistent_plays(g, profile) if g.node(p.leaf).label]
    if not plays:
        return None
    return rng.choice(plays)
