"""Finite extensive form games with imperfect information.

A game is a finite rooted tree whose nonterminal states are partitioned
between Nature (owner 0) and players 1..n, carries information sets per
owner, exact rational chance distributions, and a binary event label on
every leaf.  Everything here is immutable after construction and all
operations are pure functions, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import GameValidationError, InputError
from .rational import ONE, Rat, rat

CHANCE = 0

LABEL_EVENT = "E"
LABEL_NO_EVENT = "notE"


@dataclass(frozen=True)
class Node:
    """One state of the game tree.

    ``actions`` holds (action name, child id) pairs in input order; a node
    with no actions is terminal and must carry a label.  Ownership lives on
    the GameTree so that derived games can share Node objects.
    """

    id: str
    actions: tuple[tuple[str, str], ...] = ()
    probs: dict[str, Rat] | None = None
    label: bool | None = None  # terminal only: True = event occurred

    @property
    def is_terminal(self) -> bool:
        return not self.actions

    def child(self, action: str) -> str:
        for name, target in self.actions:
            if name == action:
                return target
        raise InputError(f"node {self.id!r} has no action {action!r}")


@dataclass(frozen=True)
class InfoSet:
    id: str
    owner: int
    nodes: tuple[str, ...]


@dataclass(frozen=True)
class History:
    """Alternating information-set / action entries along a root path.

    Entries are tagged pairs ``("I", info_set_id)`` or ``("a", action)``.
    """

    entries: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def info_sets(self) -> tuple[str, ...]:
        return tuple(v for k, v in self.entries if k == "I")

    def is_subsequence_of(self, other: "History") -> bool:
        it = iter(other.entries)
        return all(entry in it for entry in self.entries)


@dataclass(frozen=True)
class Play:
    """A root-to-leaf path: node ids plus the action taken at each step."""

    nodes: tuple[str, ...]
    actions: tuple[str, ...]

    @property
    def leaf(self) -> str:
        return self.nodes[-1]

    def steps(self) -> Iterator[tuple[str, str]]:
        return zip(self.nodes, self.actions)


@dataclass(frozen=True)
class BehavioralStrategy:
    """Per-information-set distributions over actions for one owner.

    ``owner`` is a player id in a source game or a side (1 = coalition,
    2 = complement) in an induced two-player game.
    """

    owner: int
    choices: dict[str, dict[str, Rat]]

    def prob(self, info_set_id: str, action: str) -> Rat:
        dist = self.choices.get(info_set_id)
        if dist is None:
            raise InputError(f"strategy of {self.owner} lacks info set {info_set_id!r}")
        return dist.get(action, rat(0))


@dataclass(frozen=True)
class StrategyProfile:
    """One behavioral strategy per player, keyed by player id."""

    strategies: dict[int, BehavioralStrategy]

    def strategy(self, player: int) -> BehavioralStrategy:
        try:
            return self.strategies[player]
        except KeyError:
            raise InputError(f"profile has no strategy for player {player}") from None


@dataclass
class FlatGame:
    """Parallel arrays over the preorder node list (owner -1 = terminal)."""

    order: list[str]
    pos: dict[str, int]
    parent: list[int]
    action_in: list[str | None]
    owner: list[int]
    iset: list[str | None]


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def pure(owner: int, choices: dict[str, str]) -> BehavioralStrategy:
    """Dirac strategy: one chosen action per info set."""
    return BehavioralStrategy(owner=owner, choices={i: {a: ONE} for i, a in choices.items()})


class GameTree:
    """Immutable extensive form game; see module docstring."""

    def __init__(
        self,
        players: int,
        nodes: dict[str, Node],
        root: str,
        owners: dict[str, int],
        info_sets: tuple[InfoSet, ...] | list[InfoSet],
    ):
        self.players = players
        self.nodes = nodes
        self.root = root
        self.owners = owners
        self.info_sets = tuple(info_sets)
        self._cache: dict[str, object] = {}

    # -- basic accessors ---------------------------------------------------

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise InputError(f"unknown node id {node_id!r}") from None

    def owner(self, node_id: str) -> int | None:
        """Owner of a nonterminal node; None for terminals."""
        return self.owners.get(node_id)

    @property
    def info_set_of(self) -> dict[str, InfoSet]:
        m = self._cache.get("info_set_of")
        if m is None:
            m = {}
            for iset in self.info_sets:
                for nid in iset.nodes:
                    m[nid] = iset
            self._cache["info_set_of"] = m
        return m

    def info_set(self, info_set_id: str) -> InfoSet:
        m = self._cache.get("iset_by_id")
        if m is None:
            m = {iset.id: iset for iset in self.info_sets}
            self._cache["iset_by_id"] = m
        try:
            return m[info_set_id]
        except KeyError:
            raise InputError(f"unknown info set {info_set_id!r}") from None

    @property
    def parent(self) -> dict[str, tuple[str, str]]:
        """node id -> (parent id, entering action); absent for the root."""
        self._derive()
        return self._cache["parent"]  # type: ignore[return-value]

    @property
    def topo_order(self) -> list[str]:
        """Depth-first preorder following action input order."""
        self._derive()
        return self._cache["topo"]  # type: ignore[return-value]

    @property
    def leaves(self) -> list[str]:
        self._derive()
        return self._cache["leaves"]  # type: ignore[return-value]

    def _derive(self) -> None:
        if "topo" in self._cache:
            return
        parent: dict[str, tuple[str, str]] = {}
        topo: list[str] = []
        leaves: list[str] = []
        stack = [self.root]
        seen = set()
        while stack:
            nid = stack.pop()
            if nid in seen:
                raise GameValidationError(
                    [Violation("tree", nid, "node reached twice (not a tree)")]
                )
            seen.add(nid)
            topo.append(nid)
            node = self.node(nid)
            if node.is_terminal:
                leaves.append(nid)
            for name, child in reversed(node.actions):
                if child in parent:
                    raise GameValidationError(
                        [Violation("tree", child, "multiple parents")]
                    )
                parent[child] = (nid, name)
                stack.append(child)
        self._cache["parent"] = parent
        self._cache["topo"] = topo
        self._cache["leaves"] = leaves

    @property
    def flat(self) -> "FlatGame":
        """Array view of the tree in preorder, for hot walks."""
        f = self._cache.get("flat")
        if f is None:
            order = self.topo_order
            pos = {nid: i for i, nid in enumerate(order)}
            parent = [-1] * len(order)
            action_in: list[str | None] = [None] * len(order)
            owner = [-1] * len(order)
            iset: list[str | None] = [None] * len(order)
            iset_of = self.info_set_of
            for i, nid in enumerate(order):
                p = self.parent.get(nid)
                if p is not None:
                    parent[i] = pos[p[0]]
                    action_in[i] = p[1]
                own = self.owners.get(nid)
                if own is not None:
                    owner[i] = own
                    iset[i] = iset_of[nid].id
            f = FlatGame(order, pos, parent, action_in, owner, iset)
            self._cache["flat"] = f
        return f

    def path_to(self, node_id: str) -> list[str]:
        """Node ids from the root to ``node_id`` inclusive."""
        self.node(node_id)
        parent = self.parent
        path = [node_id]
        while path[-1] != self.root:
            try:
                path.append(parent[path[-1]][0])
            except KeyError:
                raise InputError(f"node {node_id!r} not reachable from root") from None
        path.reverse()
        return path

    def action_prefix(self, node_id: str) -> tuple[str, ...]:
        """Actions taken from the root down to (excluding) ``node_id``."""
        path = self.path_to(node_id)
        return tuple(self.parent[n][1] for n in path[1:])

    def play_to_leaf(self, leaf_id: str) -> Play:
        node = self.node(leaf_id)
        if not node.is_terminal:
            raise InputError(f"node {leaf_id!r} is not terminal")
        nodes = tuple(self.path_to(leaf_id))
        actions = tuple(self.parent[n][1] for n in nodes[1:])
        return Play(nodes=nodes, actions=actions)


def make_game(
    players: int,
    nodes: Iterable[Node],
    root: str,
    owners: dict[str, int],
    info_sets: Iterable[InfoSet] = (),
    auto_singletons: bool = False,
) -> GameTree:
    """Assemble a GameTree, optionally filling in singleton info sets.

    With ``auto_singletons`` every nonterminal node not covered by the given
    info sets gets a fresh singleton set (id ``"@<node>"``); chance nodes are
    always completed this way since every chance node carries an info set.
    """
    node_map = {n.id: n for n in nodes}
    isets = list(info_sets)
    covered = {nid for iset in isets for nid in iset.nodes}
    for nid, node in node_map.items():
        if node.is_terminal or nid in covered:
            continue
        owner = owners.get(nid)
        if owner is None:
            continue
        if auto_singletons or owner == CHANCE:
            isets.append(InfoSet(id=f"@{nid}", owner=owner, nodes=(nid,)))
    return GameTree(players=players, nodes=node_map, root=root, owners=owners, info_sets=tuple(isets))


# -- validation -------------------------------------------------------------


def validate_game(g: GameTree) -> ValidationReport:
    """Check every structural invariant; violations are data, not errors."""
    out: list[Violation] = []

    def bad(code: str, subject: str, message: str) -> None:
        out.append(Violation(code, subject, message))

    if g.players < 1:
        bad("players", "game", f"player count {g.players} < 1")
    if g.root not in g.nodes:
        bad("root", g.root, "root id not among nodes")
        return ValidationReport(tuple(out))

    # Tree shape: unique parents, no cycles, all nodes reachable.
    parent: dict[str, str] = {}
    order: list[str] = []
    stack = [g.root]
    seen: set[str] = set()
    broken = False
    while stack:
        nid = stack.pop()
        if nid in seen:
            bad("tree", nid, "node reachable twice (cycle or shared child)")
            broken = True
            continue
        seen.add(nid)
        order.append(nid)
        node = g.nodes.get(nid)
        if node is None:
            bad("tree", nid, "edge points to unknown node")
            continue
        for name, child in node.actions:
            if child in parent:
                bad("tree", child, "multiple parents")
                broken = True
            else:
                parent[child] = nid
                stack.append(child)
    unreachable = set(g.nodes) - seen
    for nid in sorted(unreachable):
        bad("tree", nid, "not reachable from root")

    for nid, node in g.nodes.items():
        names = [a for a, _ in node.actions]
        if len(names) != len(set(names)):
            bad("actions", nid, "duplicate action names")
        owner = g.owners.get(nid)
        if node.is_terminal:
            if owner is not None:
                bad("partition", nid, "terminal node has an owner")
            if node.label is None:
                bad("label", nid, "terminal node lacks an E/notE label")
        else:
            if node.label is not None:
                bad("label", nid, "internal node carries a label")
            if owner is None:
                bad("partition", nid, "nonterminal node has no owner")
            elif not (owner == CHANCE or 1 <= owner <= g.players):
                bad("partition", nid, f"owner {owner} out of range")
            if owner == CHANCE:
                probs = node.probs or {}
                if set(probs) != set(names):
                    bad("chance", nid, "distribution keys differ from action names")
                else:
                    total = sum(probs.values(), rat(0))
                    if any(p <= 0 for p in probs.values()):
                        bad("chance", nid, "zero or negative chance probability")
                    if total != 1:
                        bad("chance", nid, f"chance probabilities sum to {total}, not 1")
            elif node.probs is not None:
                bad("chance", nid, "non-chance node carries a distribution")

    # Information sets: partition of each owner's nonterminal nodes.
    assigned: dict[str, str] = {}
    iset_ids: set[str] = set()
    for iset in g.info_sets:
        if iset.id in iset_ids:
            bad("infoset", iset.id, "duplicate info set id")
        iset_ids.add(iset.id)
        if not iset.nodes:
            bad("infoset", iset.id, "empty info set")
            continue
        ref_actions: set[str] | None = None
        ref_probs = None
        for nid in iset.nodes:
            node = g.nodes.get(nid)
            if node is None:
                bad("infoset", iset.id, f"unknown member {nid!r}")
                continue
            if node.is_terminal:
                bad("infoset", iset.id, f"terminal member {nid!r}")
                continue
            if g.owners.get(nid) != iset.owner:
                bad("infoset", iset.id, f"member {nid!r} not owned by {iset.owner}")
            if nid in assigned:
                bad("infoset", nid, f"node in two info sets ({assigned[nid]!r}, {iset.id!r})")
            assigned[nid] = iset.id
            acts = {a for a, _ in node.actions}
            if ref_actions is None:
                ref_actions = acts
                ref_probs = node.probs
            else:
                if acts != ref_actions:
                    bad("infoset", iset.id, f"action-set mismatch at {nid!r}")
                if iset.owner == CHANCE and node.probs != ref_probs:
                    bad("infoset", iset.id, f"chance distribution mismatch at {nid!r}")
    for nid, node in g.nodes.items():
        if not node.is_terminal and g.owners.get(nid) is not None and nid not in assigned:
            if not broken and nid in seen:
                bad("infoset", nid, "nonterminal node not covered by any info set")

    return ValidationReport(tuple(out))


def require_valid(g: GameTree) -> None:
    report = validate_game(g)
    if not report.ok:
        raise GameValidationError(report.violations)


# -- histories and recall ----------------------------------------------------


def history(g: GameTree, node_id: str) -> History:
    """Information sets visited and actions taken from the root to a node.

    For a nonterminal node the sequence ends with the node's own info set;
    for a terminal node it ends with the entering action (terminals belong
    to no information set).
    """
    path = g.path_to(node_id)
    iset_of = g.info_set_of
    entries: list[tuple[str, str]] = []
    for v, w in zip(path, path[1:]):
        entries.append(("I", iset_of[v].id))
        entries.append(("a", g.parent[w][1]))
    if not g.node(node_id).is_terminal:
        entries.append(("I", iset_of[node_id].id))
    return History(entries=tuple(entries))


def coalition_history(g: GameTree, node_id: str, coalition: Iterable[int]) -> History:
    """Subsequence of ``history`` owned by coalition members.

    Each (info set, following action) pair survives iff its owner belongs to
    the coalition; the trailing info set of a nonterminal node survives on
    the same condition.  The action entering a terminal node lies beyond the
    last information set of the walk and is never included.
    """
    members = frozenset(coalition)
    path = g.path_to(node_id)
    iset_of = g.info_set_of
    owners = g.owners
    entries: list[tuple[str, str]] = []
    terminal = g.node(node_id).is_terminal
    for i, v in enumerate(path):
        if owners.get(v) not in members:
            continue
        if v == node_id:
            entries.append(("I", iset_of[v].id))
        else:
            entries.append(("I", iset_of[v].id))
            if not (terminal and i == len(path) - 2):
                entries.append(("a", g.parent[path[i + 1]][1]))
    return History(entries=tuple(entries))


def check_perfect_recall(g: GameTree) -> tuple[bool, list[tuple[int, str, tuple[str, str]]]]:
    """Whether every player's own history is constant on each information set.

    Returns (ok, witnesses); each witness is (player, info set id, node pair)
    with one pair reported per violating information set.  One interned
    pass: per node and player, the chain of (info set, action) pairs at
    that player's ancestors; equal chains are exactly equal own histories,
    since the trailing info set coincides within a set by definition.
    """
    flat = g.flat
    n = len(flat.order)
    chain = [0] * n  # chain of the node's own player at its proper ancestors
    intern: dict[tuple, int] = {}
    per_player: list[dict[int, int] | None] = [None] * n  # sparse player->chain
    pos = flat.pos
    for i in range(n):
        p = flat.parent[i]
        if p < 0:
            carried: dict[int, int] = {}
        else:
            carried = per_player[p]  # type: ignore[assignment]
            pown = flat.owner[p]
            if pown > 0:
                key = (carried.get(pown, 0), flat.iset[p], flat.action_in[i])
                r = intern.get(key)
                if r is None:
                    r = len(intern) + 1
                    intern[key] = r
                if carried.get(pown, 0) != r:
                    carried = dict(carried)
                    carried[pown] = r
        per_player[i] = carried
        own = flat.owner[i]
        if own > 0:
            chain[i] = carried.get(own, 0)

    witnesses: list[tuple[int, str, tuple[str, str]]] = []
    for iset in g.info_sets:
        if iset.owner == CHANCE or len(iset.nodes) < 2:
            continue
        ref = chain[pos[iset.nodes[0]]]
        for other in iset.nodes[1:]:
            if chain[pos[other]] != ref:
                witnesses.append((iset.owner, iset.id, (iset.nodes[0], other)))
                break
    return (not witnesses, witnesses)


# -- plays --------------------------------------------------------------------


def enumerate_plays(g: GameTree) -> list[Play]:
    """All root-to-leaf plays in depth-first, action-input order."""
    plays: list[Play] = []
    node_path: list[str] = [g.root]
    act_path: list[str] = []

    def walk(nid: str) -> None:
        node = g.node(nid)
        if node.is_terminal:
            plays.append(Play(nodes=tuple(node_path), actions=tuple(act_path)))
            return
        for name, child in node.actions:
            node_path.append(child)
            act_path.append(name)
            walk(child)
            node_path.pop()
            act_path.pop()

    walk(g.root)
    return plays


def plays_through(g: GameTree, target: str) -> list[Play]:
    """Plays visiting a node (by node id) or any member of an info set id."""
    if target in g.nodes:
        wanted = {target}
    else:
        wanted = set(g.info_set(target).nodes)
    return [p for p in enumerate_plays(g) if wanted.intersection(p.nodes)]


def validate_profile(g: GameTree, profile: StrategyProfile) -> None:
    """Profile must cover exactly the non-chance info sets, with unit sums."""
    needed: dict[int, set[str]] = {p: set() for p in range(1, g.players + 1)}
    actions: dict[str, set[str]] = {}
    for iset in g.info_sets:
        if iset.owner == CHANCE:
            continue
        needed.setdefault(iset.owner, set()).add(iset.id)
        actions[iset.id] = {a for a, _ in g.node(iset.nodes[0]).actions}
    for player, isets in needed.items():
        strat = profile.strategy(player)
        if set(strat.choices) != isets:
            raise InputError(
                f"strategy of player {player} covers {sorted(strat.choices)}, "
                f"expected {sorted(isets)}"
            )
        for iset_id, dist in strat.choices.items():
            if not set(dist) <= actions[iset_id]:
                raise InputError(f"unknown action in distribution at {iset_id!r}")
            if any(p < 0 for p in dist.values()):
                raise InputError(f"negative probability at {iset_id!r}")
            if sum(dist.values(), rat(0)) != 1:
                raise InputError(f"distribution at {iset_id!r} does not sum to 1")


def consistent_plays(g: GameTree, profile: StrategyProfile) -> list[Play]:
    """Plays whose player-owned steps all have positive profile probability."""
    validate_profile(g, profile)
    iset_of = g.info_set_of
    out: list[Play] = []
    for play in enumerate_plays(g):
        ok = True
        for nid, action in play.steps():
            owner = g.owners[nid]
            if owner == CHANCE:
                continue
            if profile.strategy(owner).prob(iset_of[nid].id, action) == 0:
                ok = False
                break
        if ok:
            out.append(play)
    return out


def is_consistent_play(g: GameTree, profile: StrategyProfile, play: Play) -> bool:
    iset_of = g.info_set_of
    for nid, action in play.steps():
        owner = g.owners[nid]
        if owner == CHANCE:
            continue
        if profile.strategy(owner).prob(iset_of[nid].id, action) == 0:
            return False
    return True


def chance_probability(g: GameTree, play: Play) -> Rat:
    """Product of chance-edge probabilities along a play (1 if chance-free)."""
    if play.nodes[0] != g.root or len(play.nodes) != len(play.actions) + 1:
        raise InputError("not a play of this game")
    total = ONE
    for i, (nid, action) in enumerate(play.steps()):
        node = g.node(nid)
        if node.child(action) != play.nodes[i + 1]:
            raise InputError("play edges do not match the tree")
        if g.owners.get(nid) == CHANCE:
            total *= node.probs[action]
    if not g.node(play.leaf).is_terminal:
        raise InputError("play does not end at a terminal node")
    return total
