"""JSON wire formats for games, strategies and plays.

Rationals travel only as ``"a/b"`` strings.  Node owners are ``"chance"``,
``"terminal"`` or ``"p<i>"``; terminal labels are ``"E"`` / ``"notE"``.
Dumps are canonical: dictionary keys sorted, arrays in input order, so a
load/dump round trip is byte-stable.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InputError
from .games import (
    CHANCE,
    LABEL_EVENT,
    LABEL_NO_EVENT,
    BehavioralStrategy,
    GameTree,
    InfoSet,
    Node,
    Play,
    StrategyProfile,
    make_game,
)
from .rational import parse_rat, rat_str

SIDE_NAMES = {1: "C", 2: "Cbar"}
SIDE_IDS = {"C": 1, "Cbar": 2}


def _owner_name(owner: int | None) -> str:
    if owner is None:
        return "terminal"
    if owner == CHANCE:
        return "chance"
    return f"p{owner}"


def _owner_id(name: str, players: int, allow_terminal: bool) -> int | None:
    if name == "chance":
        return CHANCE
    if name == "terminal":
        if not allow_terminal:
            raise InputError("info set owner cannot be 'terminal'")
        return None
    if name.startswith("p"):
        try:
            player = int(name[1:])
        except ValueError:
            raise InputError(f"bad owner {name!r}") from None
        if not 1 <= player <= players:
            raise InputError(f"owner {name!r} out of range for {players} players")
        return player
    raise InputError(f"bad owner {name!r}")


def game_to_dict(g: GameTree) -> dict[str, Any]:
    nodes = []
    for nid, node in g.nodes.items():
        entry: dict[str, Any] = {"id": nid, "owner": _owner_name(g.owners.get(nid))}
        if node.actions:
            entry["actions"] = [{"name": a, "child": c} for a, c in node.actions]
        if node.probs is not None:
            entry["probs"] = {a: rat_str(p) for a, p in node.probs.items()}
        if node.label is not None:
            entry["label"] = LABEL_EVENT if node.label else LABEL_NO_EVENT
        nodes.append(entry)
    info_sets = [
        {"id": iset.id, "owner": _owner_name(iset.owner), "nodes": list(iset.nodes)}
        for iset in g.info_sets
    ]
    return {"players": g.players, "root": g.root, "nodes": nodes, "info_sets": info_sets}


def game_from_dict(data: dict[str, Any]) -> GameTree:
    try:
        players = int(data["players"])
        raw_nodes = data["nodes"]
        root = data["root"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"game JSON missing field: {exc}") from None
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    for raw in raw_nodes:
        nid = raw["id"]
        owner = _owner_id(raw.get("owner", "terminal"), players, allow_terminal=True)
        actions = tuple((a["name"], a["child"]) for a in raw.get("actions", []))
        probs = None
        if "probs" in raw:
            probs = {a: parse_rat(p) for a, p in raw["probs"].items()}
        label = None
        if "label" in raw:
            if raw["label"] not in (LABEL_EVENT, LABEL_NO_EVENT):
                raise InputError(f"bad label {raw['label']!r} at node {nid!r}")
            label = raw["label"] == LABEL_EVENT
        if owner is not None:
            owners[nid] = owner
        nodes.append(Node(id=nid, actions=actions, probs=probs, label=label))
    info_sets = []
    for raw in data.get("info_sets", []):
        owner = _owner_id(raw["owner"], players, allow_terminal=False)
        info_sets.append(InfoSet(id=raw["id"], owner=owner, nodes=tuple(raw["nodes"])))
    # Chance nodes always carry an info set; fill in singletons when omitted.
    return make_game(players, nodes, root, owners, info_sets, auto_singletons=False)


def strategy_to_dict(strategy: BehavioralStrategy, induced: bool = False) -> dict[str, Any]:
    key = "side" if induced else "player"
    ident: Any = SIDE_NAMES[strategy.owner] if induced else strategy.owner
    return {
        key: ident,
        "choices": [
            {"info_set": iset, "dist": {a: rat_str(p) for a, p in dist.items()}}
            for iset, dist in strategy.choices.items()
        ],
    }


def strategy_from_dict(raw: dict[str, Any]) -> BehavioralStrategy:
    if "player" in raw:
        owner = int(raw["player"])
    elif "side" in raw:
        owner = SIDE_IDS.get(raw["side"], 0)
        if owner == 0:
            raise InputError(f"bad side {raw['side']!r}")
    else:
        raise InputError("strategy JSON needs 'player' or 'side'")
    choices: dict[str, dict] = {}
    for choice in raw.get("choices", []):
        choices[choice["info_set"]] = {
            a: parse_rat(p) for a, p in choice["dist"].items()
        }
    return BehavioralStrategy(owner=owner, choices=choices)


def profile_to_dict(profile: StrategyProfile) -> list[dict[str, Any]]:
    return [strategy_to_dict(profile.strategies[p]) for p in sorted(profile.strategies)]


def profile_from_dict(data: Any) -> StrategyProfile:
    if not isinstance(data, list):
        raise InputError("profile JSON must be an array of strategies")
    strategies = {}
    for raw in data:
        strat = strategy_from_dict(raw)
        strategies[strat.owner] = strat
    return StrategyProfile(strategies=strategies)


def play_to_dict(play: Play) -> dict[str, Any]:
    return {"nodes": list(play.nodes), "actions": list(play.actions)}


def play_from_dict(g: GameTree, data: dict[str, Any]) -> Play:
    """A play is named by its leaf, by its action word, or spelled out."""
    if "leaf" in data:
        return g.play_to_leaf(data["leaf"])
    if "actions" in data and "nodes" not in data:
        nid = g.root
        nodes = [nid]
        for action in data["actions"]:
            nid = g.node(nid).child(action)
            nodes.append(nid)
        if not g.node(nid).is_terminal:
            raise InputError("action sequence stops before a terminal node")
        return Play(nodes=tuple(nodes), actions=tuple(data["actions"]))
    if "nodes" in data:
        return Play(nodes=tuple(data["nodes"]), actions=tuple(data["actions"]))
    raise InputError("play JSON needs 'leaf', 'actions' or 'nodes'")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_game_text(text: str) -> GameTree:
    return game_from_dict(json.loads(text))


def dump_game_text(g: GameTree) -> str:
    return dumps(game_to_dict(g))
