"""Qualitative coalition responsibility: forward, strategic and causal.

All three notions reduce to exact value-1 questions on derived two-player
games:

* forward: the coalition-induced game itself;
* strategic, per state s on the given play: a fresh adversarial root that
  drops the coalition into any member of s's information set;
* causal: the induced game with the opponents' off-profile edges and the
  off-play chance edges deleted.

A coalition is responsible when the property holds and it fails after
removing any single member; exhaustive-subset minimality is kept alongside
as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .coalition import C_SIDE, CBAR_SIDE, Coalition, InducedGame, induce, lift_profile
from .config import DEFAULT_SUBSET_CAP
from .errors import CapExceededError, InputError
from .games import (
    CHANCE,
    BehavioralStrategy,
    GameTree,
    InfoSet,
    Node,
    Play,
    StrategyProfile,
    enumerate_plays,
    is_consistent_play,
    plays_through,
    validate_profile,
)
from .rational import ONE, rat
from .solver import can_guarantee

HAT_ROOT = "__hat__"

KIND_FORWARD = "f"
KIND_STRATEGIC = "s"
KIND_CAUSAL = "c"
KINDS = (KIND_FORWARD, KIND_STRATEGIC, KIND_CAUSAL)


@dataclass(frozen=True)
class BackwardContext:
    """The play (and for causal responsibility the profile) under scrutiny."""

    play: Play
    profile: StrategyProfile | None = None


def normalize_kind(kind: str) -> str:
    k = kind.strip().lower()
    if k not in KINDS:
        raise InputError(f"kind must be one of f, s, c; got {kind!r}")
    return k


def validate_play(g: GameTree, play: Play) -> None:
    if not play.nodes or play.nodes[0] != g.root:
        raise InputError("play must start at the root")
    if len(play.nodes) != len(play.actions) + 1:
        raise InputError("play must carry one action per inner node")
    for i, (nid, action) in enumerate(play.steps()):
        if g.node(nid).child(action) != play.nodes[i + 1]:
            raise InputError(f"play edge {nid!r} --{action}--> mismatch")
    if not g.node(play.leaf).is_terminal:
        raise InputError("play must end at a terminal node")


def require_event_play(g: GameTree, play: Play) -> None:
    validate_play(g, play)
    if not g.node(play.leaf).label:
        raise InputError(f"play ending in {play.leaf!r} does not realize the event")


# -- forward -------------------------------------------------------------------


def property_forward(g: GameTree, coalition: Coalition, fused: bool = True) -> bool:
    """Can the pooled coalition keep every play event-free?

    ``fused=False`` runs the reference route (materialize the induced game,
    then solve); the default builds the same LP in one pass.
    """
    if fused:
        from .fastpath import forward_guarantee

        return forward_guarantee(g, coalition)
    ig = induce(g, coalition)
    return can_guarantee(ig.game, C_SIDE, "notE")


# -- strategic backward --------------------------------------------------------


def build_hat_game(ig: InducedGame, state: str) -> GameTree:
    """Drop-in game at a state's information set.

    A fresh root selects a member of the state's info set; each subtree
    continues exactly as in the induced game and every info set is
    restricted to the surviving nodes.  The root is a uniform chance node:
    a guarantee against full-support chance is exactly a guarantee from
    every member (the adversarial-picker reading), while ownership by the
    opponent side would leak the pick into the opponent's history and
    wrongly refine its restricted information sets.
    """
    g2 = ig.game
    node = g2.node(state)
    if node.is_terminal:
        members: tuple[str, ...] = (state,)
    else:
        members = g2.info_set_of[state].nodes

    post: set[str] = set()
    order: list[str] = []
    for m in members:
        if m in post:
            raise InputError(
                f"info set members overlap below {m!r}; drop-in game undefined"
            )
        stack = [m]
        while stack:
            nid = stack.pop()
            if nid in post:
                raise InputError(f"info set members overlap below {nid!r}")
            post.add(nid)
            order.append(nid)
            for _, child in g2.nodes[nid].actions:
                stack.append(child)

    share = rat(1, len(members))
    nodes: dict[str, Node] = {
        HAT_ROOT: Node(
            HAT_ROOT,
            actions=tuple((f"pick:{m}", m) for m in members),
            probs={f"pick:{m}": share for m in members},
        )
    }
    owners: dict[str, int] = {HAT_ROOT: CHANCE}
    for nid in order:
        nodes[nid] = g2.nodes[nid]
        own = g2.owners.get(nid)
        if own is not None:
            owners[nid] = own
    info_sets = [InfoSet(HAT_ROOT, CHANCE, (HAT_ROOT,))]
    for iset in g2.info_sets:
        kept = tuple(n for n in iset.nodes if n in post)
        if kept:
            info_sets.append(InfoSet(iset.id, iset.owner, kept))
    return GameTree(players=2, nodes=nodes, root=HAT_ROOT, owners=owners,
                    info_sets=tuple(info_sets))


def property_strategic(
    g: GameTree, coalition: Coalition, ctx: BackwardContext, fused: bool = True
) -> tuple[bool, str | None]:
    """Whether the coalition could have turned the play at one of its own
    decision points, given what it knew there.

    Only coalition-owned states on the play are considered: at a foreign
    state the opponents' pooled refinement would shrink the information set
    and silently hand the coalition knowledge it does not have.  Under the
    forward property every event play visits a coalition state (the global
    strategy must deviate from the play somewhere), so this range keeps the
    forward/backward correspondence intact.

    Returns the verdict and the first qualifying state in root-to-leaf
    order (the witness), or None.
    """
    require_event_play(g, ctx.play)
    if fused:
        from .fastpath import strategic_guarantee

        return strategic_guarantee(g, coalition, ctx.play)
    ig = induce(g, coalition)
    members = frozenset(coalition)
    for state in ctx.play.nodes:
        if g.owners.get(state) not in members:
            continue
        hat = build_hat_game(ig, state)
        if can_guarantee(hat, C_SIDE, "notE"):
            return True, state
    return False, None


# -- causal backward -----------------------------------------------------------


def _play_chance_actions(g: GameTree, play: Play) -> dict[str, str]:
    iset_of = g.info_set_of
    out: dict[str, str] = {}
    for nid, action in play.steps():
        if g.owners.get(nid) == CHANCE:
            out[iset_of[nid].id] = action
    return out


def _prune(
    g: GameTree,
    fixed_dist,
    chance_actions: dict[str, str],
    players: int,
) -> GameTree:
    """Drop zero-probability fixed-player edges and off-play chance edges.

    ``fixed_dist(node_id)`` returns the pinned distribution of a node whose
    owner is held to the profile, or None for free nodes.  Unreachable
    subtrees disappear; surviving chance nodes on visited chance info sets
    keep their single played action with probability 1.
    """
    iset_of = g.info_set_of
    new_nodes: dict[str, Node] = {}
    owners: dict[str, int] = {}
    stack = [g.root]
    seen: list[str] = []
    while stack:
        nid = stack.pop()
        seen.append(nid)
        node = g.nodes[nid]
        own = g.owners.get(nid)
        if own is not None:
            owners[nid] = own
        if node.is_terminal:
            new_nodes[nid] = node
            continue
        if own == CHANCE and iset_of[nid].id in chance_actions:
            act = chance_actions[iset_of[nid].id]
            kept = tuple((a, ch) for a, ch in node.actions if a == act)
            if not kept:
                raise InputError(f"chance node {nid!r} lacks the played action")
            new_nodes[nid] = Node(nid, actions=kept, probs={act: ONE})
        elif own is not None and own != CHANCE and fixed_dist(nid) is not None:
            dist = fixed_dist(nid)
            kept = tuple((a, ch) for a, ch in node.actions if dist.get(a, 0) > 0)
            if len(kept) == len(node.actions):
                new_nodes[nid] = node
            else:
                new_nodes[nid] = Node(nid, actions=kept)
        else:
            new_nodes[nid] = node
        for _, child in reversed(new_nodes[nid].actions):
            stack.append(child)

    info_sets = []
    for iset in g.info_sets:
        kept = tuple(n for n in iset.nodes if n in new_nodes)
        if kept:
            info_sets.append(InfoSet(iset.id, iset.owner, kept))
    ordered = {nid: new_nodes[nid] for nid in seen}
    return GameTree(players=players, nodes=ordered, root=g.root, owners=owners,
                    info_sets=tuple(info_sets))


def build_bar_game(
    ig: InducedGame,
    strategies: tuple[BehavioralStrategy, BehavioralStrategy],
    play: Play,
) -> GameTree:
    """Induced game with the opponent pinned to its profile.

    Deletes opponent-side edges of probability zero and, at chance info
    sets visited by the play, every edge except the played one (the single
    survivor is renormalized to probability 1).
    """
    g2 = ig.game
    sigma_c, sigma_b = strategies
    validate_play(g2, play)
    profile = StrategyProfile({C_SIDE: sigma_c, CBAR_SIDE: sigma_b})
    if not is_consistent_play(g2, profile, play):
        raise InputError("play is not consistent with the fixed profile")
    chance_actions = _play_chance_actions(g2, play)
    iset_of = g2.info_set_of

    def fixed(nid: str):
        if g2.owners.get(nid) == CBAR_SIDE:
            return sigma_b.choices[iset_of[nid].id]
        return None

    return _prune(g2, fixed, chance_actions, players=2)


def property_causal(
    g: GameTree, coalition: Coalition, ctx: BackwardContext, fused: bool = True
) -> bool:
    """Could different coalition behavior have avoided the event, holding
    everyone else (and the dice) to what actually happened?"""
    if ctx.profile is None:
        raise InputError("causal responsibility needs the strategy profile")
    require_event_play(g, ctx.play)
    validate_profile(g, ctx.profile)
    if not is_consistent_play(g, ctx.profile, ctx.play):
        raise InputError("play is not consistent with the profile")

    if fused:
        # Deleting fixed-opponent and off-play chance edges commutes with
        # the coalition refinement (deletion removes whole subtrees and
        # never touches a surviving node's root path), so the pinned game's
        # sequence form is built from the source in one pass.
        from .fastpath import causal_guarantee

        return causal_guarantee(g, coalition, ctx.play, ctx.profile)

    ig = induce(g, coalition)
    lifted = lift_profile(g, ctx.profile, coalition, ig)
    bar = build_bar_game(ig, lifted, ctx.play)
    return can_guarantee(bar, C_SIDE, "notE")


# -- responsibility = property + remove-one minimality --------------------------


def property_fn(g: GameTree, kind: str, ctx: BackwardContext | None = None):
    """Memoized property evaluator for one game/kind/context.

    Evaluations share one structural solve cache: coalitions producing the
    same sequence form get the verdict without a second LP.
    """
    kind = normalize_kind(kind)
    from . import fastpath

    solve_cache = fastpath.solve_cache_of(g)
    if kind == KIND_FORWARD:
        base = lambda c: fastpath.forward_guarantee(g, c, solve_cache)
    elif kind == KIND_STRATEGIC:
        if ctx is None:
            raise InputError("strategic responsibility needs a play")
        require_event_play(g, ctx.play)
        base = lambda c: fastpath.strategic_guarantee(g, c, ctx.play, solve_cache)[0]
    else:
        if ctx is None or ctx.profile is None:
            raise InputError("causal responsibility needs a play and a profile")
        require_event_play(g, ctx.play)
        validate_profile(g, ctx.profile)
        if not is_consistent_play(g, ctx.profile, ctx.play):
            raise InputError("play is not consistent with the profile")
        base = lambda c: fastpath.causal_guarantee(g, c, ctx.play, ctx.profile, solve_cache)
    memo: dict[tuple[int, ...], bool] = {}

    def prop(c: Coalition) -> bool:
        key = c.members
        if key not in memo:
            memo[key] = base(c)
        return memo[key]

    return prop


def is_responsible(
    g: GameTree, coalition: Coalition, kind: str, ctx: BackwardContext | None = None
) -> bool:
    """Property holds and fails after removing any single member."""
    prop = property_fn(g, kind, ctx)
    if not prop(coalition):
        return False
    return all(not prop(coalition.without(i)) for i in coalition)


def is_minimal_exhaustive(
    g: GameTree, coalition: Coalition, kind: str, ctx: BackwardContext | None = None
) -> bool:
    """Oracle: property holds for the coalition and for no proper subset."""
    prop = property_fn(g, kind, ctx)
    if not prop(coalition):
        return False
    members = coalition.members
    for r in range(len(members)):
        for sub in _subsets_of_size(members, r):
            if prop(Coalition.of(sub)):
                return False
    return True


def _subsets_of_size(members: tuple[int, ...], size: int):
    from itertools import combinations

    return combinations(members, size)


def minimal_responsible_coalitions(
    g: GameTree,
    kind: str,
    ctx: BackwardContext | None = None,
    cap: int = DEFAULT_SUBSET_CAP,
) -> list[Coalition]:
    """All inclusion-minimal coalitions satisfying the property.

    Exhaustive over the subset lattice in (size, members) order; any set
    containing an already-found answer is skipped, which is exact: such a
    set is non-minimal no matter how it evaluates.
    """
    n = g.players
    if n > cap:
        raise CapExceededError(f"{n} players exceed the subset cap {cap}")
    prop = property_fn(g, kind, ctx)
    found: list[tuple[int, ...]] = []
    from itertools import combinations

    players = tuple(range(1, n + 1))
    for size in range(0, n + 1):
        for members in combinations(players, size):
            ms = set(members)
            if any(set(f) <= ms for f in found):
                continue
            if prop(Coalition.of(members)):
                found.append(members)
    return [Coalition.of(m) for m in found]


# -- independent brute-force checkers (test oracles) ----------------------------


def property_strategic_brute(
    g: GameTree, coalition: Coalition, play: Play, refine: bool = True
) -> bool:
    """Definition-level check over pure coalition strategies.

    For each state on the play and each pure strategy of the pooled
    coalition, verify directly that the play follows the strategy up to the
    state and that every play through the state's info set consistent with
    the strategy avoids the event.  Exponential; small games only.
    """
    require_event_play(g, play)
    ig = induce(g, coalition, refine=refine, verify=False)
    g2 = ig.game
    members = frozenset(coalition)
    iset_of = g2.info_set_of
    c_isets = [i for i in g2.info_sets if i.owner == C_SIDE]
    action_lists = [[a for a, _ in g2.node(i.nodes[0]).actions] for i in c_isets]
    ids = [i.id for i in c_isets]
    all_plays = enumerate_plays(g2)

    for k, state in enumerate(play.nodes):
        if g.owners.get(state) not in members:
            continue
        target = iset_of[state]
        via_iset = [p for p in all_plays if set(p.nodes) & set(target.nodes)]
        prefix = [
            (iset_of[v].id, a)
            for v, a in zip(play.nodes[:k], play.actions[:k])
            if g2.owners.get(v) == C_SIDE
        ]
        for combo in product(*action_lists):
            sigma = dict(zip(ids, combo))
            if any(sigma[i] != a for i, a in prefix):
                continue
            ok = True
            for p in via_iset:
                consistent = all(
                    sigma[iset_of[v].id] == a
                    for v, a in p.steps()
                    if g2.owners.get(v) == C_SIDE
                )
                if consistent and g2.node(p.leaf).label:
                    ok = False
                    break
            if ok:
                return True
    return False


def property_causal_brute(
    g: GameTree, coalition: Coalition, play: Play, profile: StrategyProfile
) -> bool:
    """Definition-level check over pure coalition strategies.

    Fixes the opponents to the profile and the dice to the play, then looks
    for a pure coalition strategy whose consistent plays all avoid the
    event.  Exponential; small games only.
    """
    require_event_play(g, play)
    validate_profile(g, profile)
    if not is_consistent_play(g, profile, play):
        raise InputError("play is not consistent with the profile")
    ig = induce(g, coalition)
    g2 = ig.game
    iset_of = g2.info_set_of
    chance_actions = _play_chance_actions(g2, play)
    _, sigma_b = lift_profile(g, profile, coalition, ig)
    c_isets = [i for i in g2.info_sets if i.owner == C_SIDE]
    action_lists = [[a for a, _ in g2.node(i.nodes[0]).actions] for i in c_isets]
    ids = [i.id for i in c_isets]
    all_plays = enumerate_plays(g2)

    for combo in product(*action_lists):
        sigma = dict(zip(ids, combo))
        ok = True
        for p in all_plays:
            consistent = True
            for v, a in p.steps():
                owner = g2.owners.get(v)
                iset = iset_of[v].id
                if owner == C_SIDE:
                    if sigma[iset] != a:
                        consistent = False
                elif owner == CBAR_SIDE:
                    if sigma_b.choices[iset].get(a, 0) == 0:
                        consistent = False
                else:
                    if iset in chance_actions and chance_actions[iset] != a:
                        consistent = False
                if not consistent:
                    break
            if consistent and g2.node(p.leaf).label:
                ok = False
                break
        if ok:
            return True
    return False
