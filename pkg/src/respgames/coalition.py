"""Coalition-induced two-player games.

A coalition turns an n-player game into a two-player game: side 1 plays
all coalition-owned states, side 2 the remaining player states; chance is
untouched.  Player information sets are refined so that two states stay
indistinguishable for a side only if the side's pooled history cannot tell
them apart; this is exactly the coarsest refinement restoring perfect
recall for both sides, which is re-verified after every construction.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError
from .games import (
    CHANCE,
    BehavioralStrategy,
    GameTree,
    InfoSet,
    StrategyProfile,
    validate_profile,
)

C_SIDE = 1
CBAR_SIDE = 2


@dataclass(frozen=True)
class Coalition:
    """Sorted set of player ids."""

    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    @classmethod
    def of(cls, members: Iterable[int]) -> "Coalition":
        return cls(tuple(members))

    @classmethod
    def parse(cls, text: str) -> "Coalition":
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(x) for x in text.split(",")))

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, player: int) -> bool:
        return player in self.members

    def without(self, player: int) -> "Coalition":
        return Coalition(tuple(m for m in self.members if m != player))

    def check_against(self, g: GameTree) -> None:
        for m in self.members:
            if not 1 <= m <= g.players:
                raise InputError(f"coalition member {m} not a player of the game")


@dataclass
class InducedGame:
    """Two-player game plus the correspondence back to its source.

    ``origin`` maps induced node ids to source node ids (the construction
    keeps ids, so this is the identity here; derived games reuse it).
    ``info_set_origin`` maps each refined info set id to its source info set
    and the serialized refinement key.
    """

    game: GameTree
    source: GameTree
    coalition: Coalition
    origin: dict[str, str]
    info_set_origin: dict[str, tuple[str, tuple]]

    def side_of_player(self, player: int) -> int:
        return C_SIDE if player in self.coalition else CBAR_SIDE


def _key_digest(key: tuple) -> str:
    return hashlib.sha256(repr(key).encode()).hexdigest()[:10]


def induce(g: GameTree, coalition: Coalition, refine: bool = True, verify: bool = True) -> InducedGame:
    """Build the coalition-induced two-player game.

    ``refine=False`` keeps the source information sets as they are (only
    ownership is pooled); this exists to demonstrate why the refinement is
    needed and skips the perfect-recall verification, since unrefined games
    may legitimately lack it.
    """
    coalition.check_against(g)
    members = frozenset(coalition)
    flat = g.flat
    n = len(flat.order)

    owners: dict[str, int] = {}
    for i, nid in enumerate(flat.order):
        own = flat.owner[i]
        if own == -1:
            continue
        if own == CHANCE:
            owners[nid] = CHANCE
        else:
            owners[nid] = C_SIDE if own in members else CBAR_SIDE

    # Pooled histories per side, interned as chain ids.  h[v] covers the
    # proper ancestors of v; the node's own source info set joins the
    # grouping key as the trailing entry of the side history.
    hC = [0] * n
    hB = [0] * n
    internC: dict[tuple, int] = {}
    internB: dict[tuple, int] = {}
    revC: list[tuple] = [()]  # chain id -> (parent chain id, info set, action)
    revB: list[tuple] = [()]
    if refine:
        for i in range(n):
            p = flat.parent[i]
            if p < 0:
                continue
            pown = flat.owner[p]
            if pown > 0:  # player-owned parent extends one side's history
                if pown in members:
                    k = (hC[p], flat.iset[p], flat.action_in[i])
                    r = internC.get(k)
                    if r is None:
                        r = len(revC)
                        internC[k] = r
                        revC.append(k)
                    hC[i] = r
                    hB[i] = hB[p]
                else:
                    k = (hB[p], flat.iset[p], flat.action_in[i])
                    r = internB.get(k)
                    if r is None:
                        r = len(revB)
                        internB[k] = r
                        revB.append(k)
                    hB[i] = r
                    hC[i] = hC[p]
            else:
                hC[i] = hC[p]
                hB[i] = hB[p]

    def expand(rev: list[tuple], chain: int) -> tuple:
        entries = []
        while chain:
            parent, iset_id, action = rev[chain]
            entries.append((iset_id, action))
            chain = parent
        entries.reverse()
        return tuple(entries)

    info_sets: list[InfoSet] = []
    info_set_origin: dict[str, tuple[str, tuple]] = {}
    pos = flat.pos
    for iset in g.info_sets:
        if iset.owner == CHANCE:
            info_sets.append(iset)
            info_set_origin[iset.id] = (iset.id, ())
            continue
        side = C_SIDE if iset.owner in members else CBAR_SIDE
        if not refine:
            new = InfoSet(id=iset.id, owner=side, nodes=iset.nodes)
            info_sets.append(new)
            info_set_origin[iset.id] = (iset.id, ())
            continue
        on_side = iset.owner in members
        chains = hC if on_side else hB
        groups: dict[int, list[str]] = {}
        for nid in iset.nodes:
            groups.setdefault(chains[pos[nid]], []).append(nid)
        for chain, group in groups.items():
            key = expand(revC if on_side else revB, chain) + ((iset.id,),)
            if len(groups) == 1:
                new_id = iset.id
            else:
                new_id = f"{iset.id}#{_key_digest(key)}"
            info_sets.append(InfoSet(id=new_id, owner=side, nodes=tuple(group)))
            info_set_origin[new_id] = (iset.id, key)

    induced = GameTree(
        players=2, nodes=g.nodes, root=g.root, owners=owners, info_sets=tuple(info_sets)
    )
    if refine and verify:
        _verify_recall(induced)
    return InducedGame(
        game=induced,
        source=g,
        coalition=coalition,
        origin={nid: nid for nid in flat.order},
        info_set_origin=info_set_origin,
    )


def _verify_recall(g2: GameTree) -> None:
    """Refined games must have perfect recall; failure is an internal bug."""
    flat = g2.flat
    n = len(flat.order)
    h = {C_SIDE: [0] * n, CBAR_SIDE: [0] * n}
    intern: dict[tuple, int] = {}
    for i in range(n):
        p = flat.parent[i]
        if p < 0:
            continue
        for side in (C_SIDE, CBAR_SIDE):
            if flat.owner[p] == side:
                k = (side, h[side][p], flat.iset[p], flat.action_in[i])
                r = intern.get(k)
                if r is None:
                    r = len(intern) + 1
                    intern[k] = r
                h[side][i] = r
            else:
                h[side][i] = h[side][p]
    pos = flat.pos
    for iset in g2.info_sets:
        if iset.owner == CHANCE:
            continue
        chain = h[iset.owner]
        ref = chain[pos[iset.nodes[0]]]
        for nid in iset.nodes[1:]:
            if chain[pos[nid]] != ref:
                raise RuntimeError(
                    f"internal error: refinement left imperfect recall at "
                    f"{iset.id!r} ({iset.nodes[0]!r} vs {nid!r})"
                )


def post_states(ig: InducedGame, info_set_id: str) -> set[str]:
    """All nodes in subtrees rooted at members of an info set (inclusive)."""
    g = ig.game
    roots = set(g.info_set(info_set_id).nodes)
    out: set[str] = set()
    stack = list(roots)
    while stack:
        nid = stack.pop()
        if nid in out:
            continue
        out.add(nid)
        for _, child in g.node(nid).actions:
            stack.append(child)
    return out


def lift_profile(
    g: GameTree, profile: StrategyProfile, coalition: Coalition, ig: InducedGame | None = None
) -> tuple[BehavioralStrategy, BehavioralStrategy]:
    """Carry a source profile onto the induced game.

    Every refined info set inherits the distribution of the source info set
    it refines; the result is the (coalition side, complement side) pair.
    """
    validate_profile(g, profile)
    if ig is None:
        ig = induce(g, coalition)
    source_dist: dict[str, dict] = {}
    for iset in g.info_sets:
        if iset.owner == CHANCE:
            continue
        source_dist[iset.id] = profile.strategy(iset.owner).choices[iset.id]
    sides: dict[int, dict[str, dict]] = {C_SIDE: {}, CBAR_SIDE: {}}
    for iset in ig.game.info_sets:
        if iset.owner == CHANCE:
            continue
        src_id, _ = ig.info_set_origin[iset.id]
        sides[iset.owner][iset.id] = source_dist[src_id]
    return (
        BehavioralStrategy(owner=C_SIDE, choices=sides[C_SIDE]),
        BehavioralStrategy(owner=CBAR_SIDE, choices=sides[CBAR_SIDE]),
    )
