"""Fused property evaluation: source game + coalition -> LP, in one walk.

In the refined induced game a side's action sequence is in bijection with
its pooled history chain, and the refined information set of a node is
just (source info set, chain).  So the sequence form of the induced game
can be read off the source tree directly, one interned pass, without ever
materializing the induced game.  The reference constructions in
`coalition` and `responsibility` stay the semantic ground truth; these
builders are equivalence-tested against them and used on hot paths.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coalition import Coalition
from .errors import ImperfectRecallError, InputError
from .games import CHANCE, GameTree, Play, StrategyProfile
from .rational import ONE, ZERO, Rat, rat
from .solver import SequenceForm, SideSequences, guarantee_from_sequence_form


class _Side:
    """Sequence interner for one side; mirrors solver._SideBuilder."""

    __slots__ = ("parent", "via", "intern", "iset_index", "iset_parent", "iset_children")

    def __init__(self):
        self.parent = [0]
        self.via = [None]
        self.intern: dict[tuple, int] = {}
        self.iset_index: dict[object, int] = {}
        self.iset_parent: list[int] = []
        self.iset_children: list[list[int]] = []

    def extend(self, seq: int, iset_key, action: str) -> int:
        key = (seq, iset_key, action)
        found = self.intern.get(key)
        if found is not None:
            return found
        new = len(self.parent)
        self.intern[key] = new
        self.parent.append(seq)
        self.via.append((iset_key, action))
        idx = self.iset_index.get(iset_key)
        if idx is None:
            self.iset_index[iset_key] = len(self.iset_parent)
            self.iset_parent.append(seq)
            self.iset_children.append([new])
        else:
            if self.iset_parent[idx] != seq:
                raise ImperfectRecallError(
                    [(0, str(iset_key), ("?", "?"))]
                )
            self.iset_children[idx].append(new)
        return new

    def finish(self) -> SideSequences:
        ids = [None] * len(self.iset_index)
        for key, idx in self.iset_index.items():
            ids[idx] = key
        return SideSequences(
            parent=self.parent,
            via=self.via,
            iset_ids=ids,
            iset_parent=self.iset_parent,
            iset_children=self.iset_children,
        )


def _children_index(g: GameTree):
    """Per-position pre-zipped lists: (child pos, action) and (child, prob)."""
    idx = g._cache.get("children_idx")
    if idx is None:
        flat = g.flat
        nodes = g.nodes
        children: list[list[int]] = [[] for _ in flat.order]
        for i, p in enumerate(flat.parent):
            if p >= 0:
                children[p].append(i)
        by_action: list[list[tuple[int, str]]] = []
        by_prob: list[list[tuple[int, Rat]] | None] = []
        for i, nid in enumerate(flat.order):
            node = nodes[nid]
            pairs = list(zip(children[i], (a for a, _ in node.actions)))
            by_action.append(pairs)
            if node.probs is not None:
                by_prob.append([(k, node.probs[a]) for k, a in pairs])
            else:
                by_prob.append(None)
        idx = (by_action, by_prob)
        g._cache["children_idx"] = idx
    return idx


def coalition_sequence_form(
    g: GameTree,
    coalition: Coalition,
    win_label: str,
    chance_take: dict[str, str] | None = None,
    fixed_dists: dict[int, dict[str, Rat]] | None = None,
) -> SequenceForm:
    """Sequence form of the coalition-induced game, built from the source.

    ``chance_take`` pins visited chance info sets to one action (weight 1);
    ``fixed_dists`` pins opponent nodes (by flat position) to a profile,
    dropping zero-probability actions.  Both mirror the profile-pinned
    game used for causal responsibility.
    """
    members = frozenset(coalition)
    win = win_label == "E"
    flat = g.flat
    by_action, by_prob = _children_index(g)
    owner = flat.owner
    iset = flat.iset
    labels = _labels(g)
    # Coalition-free subtrees collapse to single leaves for the guarantee
    # question, but only when no edges are pinned away inside them.
    collapse = chance_take is None and fixed_dists is None and win is False
    if collapse:
        owners_below, event_below = _below_index(g)
        cmask = _coalition_mask(members)

    side_c = _Side()
    side_b = _Side()
    extend_c = side_c.extend
    extend_b = side_b.extend
    payoff: dict[tuple[int, int], Rat] = {}
    losing = False

    # Stack entries: (pos, seq_c, seq_b, mass).  A side's sequence IS its
    # pooled history chain, so the refined info set key is (iset, seq).
    stack = [(flat.pos[g.root], 0, 0, ONE)]
    push = stack.append
    while stack:
        i, sc, sb, mass = stack.pop()
        own = owner[i]
        if own == -1:
            if labels[i] == win:
                key = (sc, sb)
                payoff[key] = payoff.get(key, ZERO) + mass
            else:
                losing = True
            continue
        if collapse and not owners_below[i] & cmask:
            if event_below[i]:
                losing = True
            else:
                key = (sc, sb)
                payoff[key] = payoff.get(key, ZERO) + mass
            continue
        if own == CHANCE:
            take = chance_take.get(iset[i]) if chance_take else None
            if take is not None:
                for k, action in by_action[i]:
                    if action == take:
                        push((k, sc, sb, mass))
            else:
                for k, p in by_prob[i]:
                    push((k, sc, sb, mass * p))
        elif own in members:
            ikey = (iset[i], sc)
            for k, action in by_action[i]:
                push((k, extend_c(sc, ikey, action), sb, mass))
        else:
            dist = fixed_dists.get(i) if fixed_dists else None
            ikey = (iset[i], sb)
            if dist is None:
                for k, action in by_action[i]:
                    push((k, sc, extend_b(sb, ikey, action), mass))
            else:
                for k, action in by_action[i]:
                    if not dist.get(action):
                        continue
                    push((k, sc, extend_b(sb, ikey, action), mass))
    return SequenceForm(
        maximizer=1,
        win=win,
        max_side=side_c.finish(),
        opp_side=side_b.finish(),
        payoff=payoff,
        has_losing_leaf=losing,
    )


def _sf_key(sf: SequenceForm):
    """Canonical structural key: equal keys imply equal game values."""
    return (
        sf.win,
        sf.has_losing_leaf,
        len(sf.max_side.parent),
        len(sf.opp_side.parent),
        tuple(sf.max_side.iset_parent),
        tuple(map(tuple, sf.max_side.iset_children)),
        tuple(sf.opp_side.iset_parent),
        tuple(map(tuple, sf.opp_side.iset_children)),
        frozenset(sf.payoff.items()),
    )


def _guarantee(sf: SequenceForm, cache: dict | None) -> bool:
    if cache is None:
        return guarantee_from_sequence_form(sf)
    key = _sf_key(sf)
    found = cache.get(key)
    if found is None:
        found = guarantee_from_sequence_form(sf)
        cache[key] = found
    return found


def solve_cache_of(g: GameTree) -> dict:
    """Per-game structural solve cache, shared across kinds and callers.

    Keys are canonical sequence-form structures, so entries stay valid for
    any coalition, drop-in state or pinned profile over this game.
    """
    cache = g._cache.get("sf_verdicts")
    if cache is None:
        cache = {}
        g._cache["sf_verdicts"] = cache
    return cache


def forward_guarantee(g: GameTree, coalition: Coalition, cache: dict | None = None) -> bool:
    """property (forward) via the fused sequence form."""
    sf = coalition_sequence_form(g, coalition, "notE")
    return _guarantee(sf, cache)


def causal_guarantee(
    g: GameTree,
    coalition: Coalition,
    play: Play,
    profile: StrategyProfile,
    cache: dict | None = None,
) -> bool:
    """property (causal) via the fused, profile-pinned sequence form."""
    members = frozenset(coalition)
    flat = g.flat
    iset_of = g.info_set_of
    chance_take: dict[str, str] = {}
    for nid, action in play.steps():
        if g.owners.get(nid) == CHANCE:
            chance_take[iset_of[nid].id] = action
    fixed: dict[int, dict[str, Rat]] = {}
    for i, own in enumerate(flat.owner):
        if own > 0 and own not in members:
            fixed[i] = profile.strategy(own).choices[flat.iset[i]]
    sf = coalition_sequence_form(g, coalition, "notE",
                                 chance_take=chance_take, fixed_dists=fixed)
    return _guarantee(sf, cache)


@dataclass
class _CoalitionChains:
    """Per-node pooled coalition chains and the refined-set grouping.

    Only the coalition side needs chains: the opponent's information
    structure cannot change whether the value is exactly 1 (a guarantee
    wins against every play selection, and any losing play is reachable by
    a measurable opponent), so drop-in games may pool opponents freely.
    """

    hc: list[int]
    groups: dict[tuple, list[int]]
    key_of: list[tuple | None]


def _nonterminals(g: GameTree) -> list[int]:
    lst = g._cache.get("nonterminal_pos")
    if lst is None:
        owner = g.flat.owner
        lst = [i for i in range(len(owner)) if owner[i] != -1]
        g._cache["nonterminal_pos"] = lst
    return lst


def _below_index(g: GameTree):
    """Per position: bitmask of players owning nodes in the subtree, and
    whether the subtree contains an event leaf.

    A subtree without coalition nodes is one opponent/chance blob: for the
    guarantee question it collapses to a single leaf that loses exactly if
    an event leaf hides anywhere inside it.
    """
    idx = g._cache.get("below_idx")
    if idx is None:
        flat = g.flat
        nodes = g.nodes
        n = len(flat.order)
        owners_below = [0] * n
        event_below = [False] * n
        labels = [nodes[nid].label for nid in flat.order]
        g._cache.setdefault("labels", labels)
        parent = flat.parent
        owner = flat.owner
        for i in range(n - 1, -1, -1):
            own = owner[i]
            if own > 0:
                owners_below[i] |= 1 << (own - 1)
            elif own == -1 and labels[i]:
                event_below[i] = True
            p = parent[i]
            if p >= 0:
                owners_below[p] |= owners_below[i]
                if event_below[i]:
                    event_below[p] = True
        idx = (owners_below, event_below)
        g._cache["below_idx"] = idx
    return idx


def _labels(g: GameTree) -> list[bool | None]:
    labels = g._cache.get("labels")
    if labels is None:
        labels = [g.nodes[nid].label for nid in g.flat.order]
        g._cache["labels"] = labels
    return labels


def _coalition_mask(members) -> int:
    m = 0
    for p in members:
        m |= 1 << (p - 1)
    return m


def _subtree_end(g: GameTree) -> list[int]:
    """End of each node's contiguous preorder range (exclusive)."""
    end = g._cache.get("subtree_end")
    if end is None:
        parent = g.flat.parent
        n = len(parent)
        end = [n] * n
        stack: list[int] = []
        for i in range(n):
            p = parent[i]
            while stack and stack[-1] != p:
                end[stack.pop()] = i
            stack.append(i)
        g._cache["subtree_end"] = end
    return end


def _chains(g: GameTree, members: frozenset[int]) -> _CoalitionChains:
    flat = g.flat
    n = len(flat.order)
    parent = flat.parent
    fowner = flat.owner
    fiset = flat.iset
    action_in = flat.action_in
    owners_below, _ = _below_index(g)
    end = _subtree_end(g)
    cmask = _coalition_mask(members)
    hc = [0] * n
    intern_c: dict[tuple, int] = {}
    groups: dict[tuple, list[int]] = {}
    key_of: list[tuple | None] = [None] * n
    i = 0
    while i < n:
        if not owners_below[i] & cmask:
            i = end[i]  # nothing of the coalition below; chains irrelevant
            continue
        p = parent[i]
        if p >= 0:
            if fowner[p] in members:
                k = (hc[p], fiset[p], action_in[i])
                r = intern_c.get(k)
                if r is None:
                    r = len(intern_c) + 1
                    intern_c[k] = r
                hc[i] = r
            else:
                hc[i] = hc[p]
        own = fowner[i]
        if own in members:
            key = (fiset[i], hc[i])
            key_of[i] = key
            lst = groups.get(key)
            if lst is None:
                groups[key] = [i]
            else:
                lst.append(i)
        i += 1
    return _CoalitionChains(hc=hc, groups=groups, key_of=key_of)


def strategic_guarantee(
    g: GameTree, coalition: Coalition, play: Play, cache: dict | None = None
) -> tuple[bool, str | None]:
    """property (strategic): first coalition state on the play whose
    drop-in game the coalition wins.

    Coalition info sets inside a drop-in game carry full-game identity
    restricted to the survivors (the coalition's knowledge is semantic);
    opponents are pooled by entry-relative history, which is value-1
    equivalent and recall-safe whenever depth determines ownership."""
    members = frozenset(coalition)
    flat = g.flat
    owner = flat.owner
    by_action, by_prob = _children_index(g)
    order = flat.order
    labels = _labels(g)
    owners_below, event_below = _below_index(g)
    cmask = _coalition_mask(members)
    chains = _chains(g, members)
    key_of = chains.key_of

    for state in play.nodes:
        pos = flat.pos[state]
        if owner[pos] not in members:
            continue  # only the coalition's own decision points count
        entry = chains.groups[key_of[pos]]
        share = rat(1, len(entry))
        side_c = _Side()
        side_b = _Side()
        extend_c = side_c.extend
        extend_b = side_b.extend
        payoff: dict[tuple[int, int], Rat] = {}
        losing = False
        stack = [(i, 0, 0, share) for i in reversed(entry)]
        push = stack.append
        while stack:
            i, sc, sb, mass = stack.pop()
            own = owner[i]
            if own == -1:
                if labels[i] is False:  # win label is notE
                    key = (sc, sb)
                    payoff[key] = payoff.get(key, ZERO) + mass
                else:
                    losing = True
                continue
            if not owners_below[i] & cmask:
                if event_below[i]:
                    losing = True
                else:
                    key = (sc, sb)
                    payoff[key] = payoff.get(key, ZERO) + mass
                continue
            if own == CHANCE:
                for k, p in by_prob[i]:
                    push((k, sc, sb, mass * p))
            elif own in members:
                ikey = key_of[i]
                try:
                    for k, action in by_action[i]:
                        push((k, extend_c(sc, ikey, action), sb, mass))
                except ImperfectRecallError:
                    raise ImperfectRecallError(
                        [(own, str(ikey), (state, order[i]))]
                    ) from None
            else:
                ikey = (flat.iset[i], sb)
                try:
                    for k, action in by_action[i]:
                        push((k, sc, extend_b(sb, ikey, action), mass))
                except ImperfectRecallError:
                    raise ImperfectRecallError(
                        [(own, str(ikey), (state, order[i]))]
                    ) from None
        sf = SequenceForm(
            maximizer=1,
            win=False,
            max_side=side_c.finish(),
            opp_side=side_b.finish(),
            payoff=payoff,
            has_losing_leaf=losing,
        )
        if _guarantee(sf, cache):
            return True, state
    return False, None
