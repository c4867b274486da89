"""Concurrent game structures with player indistinguishability, unrolled
into extensive form games.

One round at a state expands into n layers, one player after another,
with the later players blind to the earlier same-round picks; rounds glue
together at the transition targets.  Two nodes share an information set
exactly when they are reached after the same number of moves and their
round states are indistinguishable to the player (so everybody can count,
but nobody learns more than the indistinguishability relation allows).
Unrolled games may well lack perfect recall; downstream coalition
refinement deals with that.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any

from .config import node_cap
from .errors import CapExceededError, InputError
from .games import CHANCE, GameTree, InfoSet, Node, Violation, make_game


@dataclass(frozen=True)
class Cegs:
    players: int
    states: tuple[str, ...]
    actions: tuple[str, ...]
    indist: dict[int, tuple[tuple[str, ...], ...]]  # nontrivial classes per player
    avail: dict[str, dict[int, tuple[str, ...]]]
    trans: dict[tuple[str, tuple[str, ...]], str]

    def class_of(self, player: int, state: str) -> tuple[str, ...]:
        for cls in self.indist.get(player, ()):
            if state in cls:
                return cls
        return (state,)

    def available(self, state: str, player: int) -> tuple[str, ...]:
        try:
            return self.avail[state][player]
        except KeyError:
            raise InputError(f"no actions for player {player} at {state!r}") from None


def validate_cegs(m: Cegs) -> list[Violation]:
    out: list[Violation] = []

    def bad(code: str, subject: str, message: str) -> None:
        out.append(Violation(code, subject, message))

    if m.players < 1:
        bad("players", "model", "need at least one player")
    states = set(m.states)
    if len(states) != len(m.states):
        bad("states", "model", "duplicate state names")
    for player, classes in m.indist.items():
        if not 1 <= player <= m.players:
            bad("indist", str(player), "unknown player")
            continue
        seen: set[str] = set()
        for cls in classes:
            for s in cls:
                if s not in states:
                    bad("indist", s, "unknown state in a class")
                if s in seen:
                    bad("indist", s, f"state in two classes of player {player}")
                seen.add(s)
    for s in m.states:
        for player in range(1, m.players + 1):
            acts = m.avail.get(s, {}).get(player, ())
            if not acts:
                bad("avail", s, f"player {player} has no available actions")
            for a in acts:
                if a not in m.actions:
                    bad("avail", s, f"unknown action {a!r}")
    # Indistinguishable states must offer identical choices.
    for player in range(1, m.players + 1):
        for cls in m.indist.get(player, ()):
            ref = None
            for s in cls:
                if s not in states:
                    continue
                acts = m.avail.get(s, {}).get(player, ())
                if ref is None:
                    ref = acts
                elif tuple(acts) != tuple(ref):
                    bad("indist", s, f"player {player} availability differs inside a class")
    for s in m.states:
        lists = [m.avail.get(s, {}).get(p, ()) for p in range(1, m.players + 1)]
        for joint in product(*lists):
            target = m.trans.get((s, joint))
            if target is None:
                bad("trans", s, f"missing transition for {joint!r}")
            elif target not in states:
                bad("trans", s, f"transition to unknown state {target!r}")
    return out


def require_valid_cegs(m: Cegs) -> None:
    violations = validate_cegs(m)
    if violations:
        raise InputError("; ".join(str(v) for v in violations[:5]))


def per_state_gadget(m: Cegs, state: str) -> GameTree:
    """One round at a state as a standalone game fragment.

    Players pick in index order, blind to the same-round picks before
    them; the leaves stand for the joint actions (labeled as non-events,
    since labels only make sense after unrolling).
    """
    require_valid_cegs(m)
    if state not in m.states:
        raise InputError(f"unknown state {state!r}")
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    layers: dict[int, list[str]] = {p: [] for p in range(1, m.players + 1)}

    def walk(prefix: tuple[str, ...]) -> str:
        nid = "g" + "".join(f".{a}" for a in prefix)
        k = len(prefix)
        if k == m.players:
            nodes.append(Node(nid, label=False))
            return nid
        player = k + 1
        actions = tuple(
            (a, walk(prefix + (a,))) for a in m.available(state, player)
        )
        nodes.append(Node(nid, actions=actions))
        owners[nid] = player
        layers[player].append(nid)
        return nid

    root = walk(())
    info_sets = [
        InfoSet(f"p{p}", p, tuple(layer)) for p, layer in layers.items() if layer
    ]
    return make_game(m.players, nodes, root, owners, info_sets)


def unroll(
    m: Cegs,
    initial: str,
    horizon: int,
    bad: set[str] | frozenset[str] = frozenset(),
    cap: int | None = None,
) -> GameTree:
    """Depth-bounded unrolling with bad-state reachability as the event.

    A leaf is an event leaf exactly when the state trajectory behind it
    (including the initial and the final state) touches a bad state within
    the horizon.
    """
    require_valid_cegs(m)
    if initial not in m.states:
        raise InputError(f"unknown initial state {initial!r}")
    if horizon < 1:
        raise InputError("horizon must be at least 1")
    bad = frozenset(bad)
    for s in bad:
        if s not in m.states:
            raise InputError(f"unknown bad state {s!r}")
    cap = cap if cap is not None else node_cap()

    nodes: list[Node] = []
    owners: dict[str, int] = {}
    iset_members: dict[tuple[int, int, tuple[str, ...]], list[str]] = {}
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        if counter > cap:
            raise CapExceededError(f"unrolled tree exceeds the node cap {cap}")
        return f"c{counter - 1}"

    def expand(state: str, round_no: int, seen_bad: bool, prefix: tuple[str, ...]) -> str:
        k = len(prefix)
        if k == m.players:
            # The completed joint action IS the next round's entry point.
            target = m.trans[(state, prefix)]
            return expand(target, round_no + 1, seen_bad or target in bad, ())
        if k == 0 and round_no == horizon:
            nid = fresh()
            nodes.append(Node(nid, label=seen_bad))
            return nid
        nid = fresh()
        player = k + 1
        actions = tuple(
            (a, expand(state, round_no, seen_bad, prefix + (a,)))
            for a in m.available(state, player)
        )
        nodes.append(Node(nid, actions=actions))
        owners[nid] = player
        key = (player, round_no, m.class_of(player, state))
        iset_members.setdefault(key, []).append(nid)
        return nid

    root = expand(initial, 0, initial in bad, ())
    info_sets = [
        InfoSet(f"p{p}.r{r}.{min(cls)}", p, tuple(members))
        for (p, r, cls), members in iset_members.items()
    ]
    return make_game(m.players, nodes, root, owners, info_sets)


def gadget_node_count(m: Cegs, state: str) -> int:
    """Nodes one round contributes at a state (excluding the glued leaves)."""
    total = 0
    width = 1
    for player in range(1, m.players + 1):
        total += width
        width *= len(m.available(state, player))
    return total


def expected_unroll_count(m: Cegs, initial: str, horizon: int) -> int:
    """Closed-form node count of the unrolled tree, for exact asserts."""
    entries: dict[str, int] = {initial: 1}
    total = 0
    for _ in range(horizon):
        nxt: dict[str, int] = {}
        for state, count in entries.items():
            total += count * gadget_node_count(m, state)
            lists = [m.available(state, p) for p in range(1, m.players + 1)]
            for joint in product(*lists):
                target = m.trans[(state, joint)]
                nxt[target] = nxt.get(target, 0) + count
        entries = nxt
    return total + sum(entries.values())


# -- JSON ----------------------------------------------------------------------


def cegs_from_dict(data: dict[str, Any]) -> Cegs:
    try:
        players = int(data["players"])
        states = tuple(data["states"])
        actions = tuple(data["actions"])
    except KeyError as exc:
        raise InputError(f"cegs JSON missing {exc}") from None
    indist: dict[int, tuple[tuple[str, ...], ...]] = {}
    for player, classes in data.get("indist", {}).items():
        indist[int(player)] = tuple(tuple(cls) for cls in classes)
    avail: dict[str, dict[int, tuple[str, ...]]] = {}
    for state, per_player in data.get("avail", {}).items():
        avail[state] = {int(p): tuple(acts) for p, acts in per_player.items()}
    trans: dict[tuple[str, tuple[str, ...]], str] = {}
    for key, target in data.get("trans", {}).items():
        state, _, joint = key.partition("|")
        trans[(state, tuple(joint.split(",")))] = target
    return Cegs(players=players, states=states, actions=actions,
                indist=indist, avail=avail, trans=trans)


def cegs_to_dict(m: Cegs) -> dict[str, Any]:
    return {
        "players": m.players,
        "states": list(m.states),
        "actions": list(m.actions),
        "indist": {str(p): [list(c) for c in cls] for p, cls in m.indist.items()},
        "avail": {s: {str(p): list(a) for p, a in per.items()} for s, per in m.avail.items()},
        "trans": {f"{s}|{','.join(joint)}": t for (s, joint), t in m.trans.items()},
    }
