"""Exact values of two-player zero-sum games with perfect recall.

Behavioral strategies are encoded as realization weights over action
sequences; the max-min value is the optimum of a linear program over those
weights, solved exactly.  Payoffs are the win indicator of a chosen leaf
label, so the value equals the maximizer's guaranteed winning probability
and the guarantee question is the exact test ``value == 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import CapExceededError, ImperfectRecallError, InputError
from .games import CHANCE, LABEL_EVENT, LABEL_NO_EVENT, BehavioralStrategy, GameTree
from .rational import ONE, ZERO, Rat, rat
from .simplex import EQ, LE, OPTIMAL, UNBOUNDED, LinearProgram, LPResult, _solve, lp_solve

DEFAULT_ORACLE_CAP = 1_000_000


def _win_bool(win_label: str) -> bool:
    if win_label == LABEL_EVENT:
        return True
    if win_label == LABEL_NO_EVENT:
        return False
    raise InputError(f"win label must be 'E' or 'notE', got {win_label!r}")


@dataclass
class SideSequences:
    """Sequence bookkeeping for one side of a two-player game.

    Sequence 0 is the empty sequence; every other sequence is its parent
    sequence extended by one (info set, action) step.  ``iset_parent`` and
    ``iset_children`` give, per info set of this side, the sequence leading
    into it and the sequences its actions produce.
    """

    parent: list[int]
    via: list[tuple[str, str] | None]  # (info set id, action) producing the sequence
    iset_ids: list[str]
    iset_parent: list[int]
    iset_children: list[list[int]]

    def describe(self, seq: int) -> tuple[tuple[str, str], ...]:
        out = []
        while seq:
            out.append(self.via[seq])
            seq = self.parent[seq]
        out.reverse()
        return tuple(out)


@dataclass
class SequenceForm:
    maximizer: int
    win: bool
    max_side: SideSequences
    opp_side: SideSequences
    payoff: dict[tuple[int, int], Rat]  # (maximizer seq, opponent seq) -> weight
    has_losing_leaf: bool = True


@dataclass
class RealizationPlan:
    """Optimal realization weights of the maximizer, by sequence."""

    side: SideSequences
    weights: list[Rat]

    def to_behavioral(self, owner: int) -> BehavioralStrategy:
        """Divide child weights by the parent weight; uniform when unreachable."""
        choices: dict[str, dict[str, Rat]] = {}
        for i, iset_id in enumerate(self.side.iset_ids):
            parent_w = self.weights[self.side.iset_parent[i]]
            children = self.side.iset_children[i]
            dist: dict[str, Rat] = {}
            if parent_w > 0:
                for seq in children:
                    dist[self.side.via[seq][1]] = self.weights[seq] / parent_w
            else:
                share = ONE / len(children)
                for seq in children:
                    dist[self.side.via[seq][1]] = share
            choices[iset_id] = dist
        return BehavioralStrategy(owner=owner, choices=choices)

    def as_json(self) -> list[dict]:
        from .rational import rat_str

        out = []
        for seq, w in enumerate(self.weights):
            out.append(
                {
                    "sequence": [[i, a] for i, a in self.side.describe(seq)],
                    "weight": rat_str(w),
                }
            )
        return out


def check_two_player(g2: GameTree) -> None:
    if g2.players != 2:
        raise InputError(f"need a two-player game, got {g2.players} players")


def build_sequence_form(g2: GameTree, maximizer: int, win_label: str) -> SequenceForm:
    """Sequence-form payoff and constraint data for a perfect-recall game.

    Refuses games without perfect recall, reporting the witness pairs.
    """
    check_two_player(g2)
    if maximizer not in (1, 2):
        raise InputError(f"maximizer side must be 1 or 2, got {maximizer}")
    from .games import check_perfect_recall

    ok, witnesses = check_perfect_recall(g2)
    if not ok:
        raise ImperfectRecallError(witnesses)
    win = _win_bool(win_label)
    opponent = 3 - maximizer

    sides = {maximizer: _SideBuilder(), opponent: _SideBuilder()}
    payoff: dict[tuple[int, int], Rat] = {}
    losing = False

    flat = g2.flat
    n = len(flat.order)
    seq_at = {maximizer: [0] * n, opponent: [0] * n}
    chance_at: list[Rat] = [ONE] * n
    nodes = g2.nodes
    for i in range(n):
        nid = flat.order[i]
        p = flat.parent[i]
        if p >= 0:
            act = flat.action_in[i]
            pown = flat.owner[p]
            for side in (maximizer, opponent):
                if pown == side:
                    seq_at[side][i] = sides[side].extend(
                        seq_at[side][p], flat.iset[p], act
                    )
                else:
                    seq_at[side][i] = seq_at[side][p]
            if pown == CHANCE:
                chance_at[i] = chance_at[p] * nodes[flat.order[p]].probs[act]
            else:
                chance_at[i] = chance_at[p]
        own = flat.owner[i]
        if own == -1:
            if nodes[nid].label == win:
                key = (seq_at[maximizer][i], seq_at[opponent][i])
                payoff[key] = payoff.get(key, ZERO) + chance_at[i]
            else:
                losing = True

    return SequenceForm(
        maximizer=maximizer,
        win=win,
        max_side=sides[maximizer].finish(),
        opp_side=sides[opponent].finish(),
        payoff=payoff,
        has_losing_leaf=losing,
    )


class _SideBuilder:
    def __init__(self):
        self.parent = [0]
        self.via: list[tuple[str, str] | None] = [None]
        self.intern: dict[tuple[int, str, str], int] = {}
        self.iset_index: dict[str, int] = {}
        self.iset_parent: list[int] = []
        self.iset_children: list[list[int]] = []

    def extend(self, seq: int, iset_id: str, action: str) -> int:
        key = (seq, iset_id, action)
        found = self.intern.get(key)
        if found is not None:
            return found
        new = len(self.parent)
        self.intern[key] = new
        self.parent.append(seq)
        self.via.append((iset_id, action))
        idx = self.iset_index.get(iset_id)
        if idx is None:
            idx = len(self.iset_index)
            self.iset_index[iset_id] = idx
            self.iset_parent.append(seq)
            self.iset_children.append([])
        else:
            if self.iset_parent[idx] != seq:
                # Perfect recall guarantees one entering sequence per info set.
                raise AssertionError(f"info set {iset_id!r} has two entering sequences")
        self.iset_children[idx].append(new)
        return new

    def finish(self) -> SideSequences:
        ids = [""] * len(self.iset_index)
        for iset_id, idx in self.iset_index.items():
            ids[idx] = iset_id
        return SideSequences(
            parent=self.parent,
            via=self.via,
            iset_ids=ids,
            iset_parent=self.iset_parent,
            iset_children=self.iset_children,
        )


def _value_lp(sf: SequenceForm) -> LinearProgram:
    """Primal LP over the maximizer's realization weights.

    Variables: one weight per maximizer sequence (nonnegative), then one
    free dual variable per opponent flow constraint (the first of which is
    the game value, the objective).
    """
    m = len(sf.max_side.parent)
    n_opp_rows = 1 + len(sf.opp_side.iset_ids)
    q0 = m  # dual of the opponent's root constraint
    n_vars = m + n_opp_rows

    # holder[tau] = the opponent flow row in which sequence tau has +1.
    holder = [0] * len(sf.opp_side.parent)
    for idx in range(len(sf.opp_side.iset_ids)):
        for seq in sf.opp_side.iset_children[idx]:
            holder[seq] = 1 + idx
    by_tau: dict[int, list[tuple[int, Rat]]] = {}
    for (sigma, tau), w in sf.payoff.items():
        by_tau.setdefault(tau, []).append((sigma, w))

    constraints: list[tuple[dict[int, Rat], str, Rat]] = []
    for tau in range(len(sf.opp_side.parent)):
        coeffs: dict[int, Rat] = {m + holder[tau]: ONE}
        for idx in range(len(sf.opp_side.iset_ids)):
            if sf.opp_side.iset_parent[idx] == tau:
                coeffs[m + 1 + idx] = coeffs.get(m + 1 + idx, ZERO) - ONE
        for sigma, w in by_tau.get(tau, ()):
            coeffs[sigma] = coeffs.get(sigma, ZERO) - w
        constraints.append((coeffs, LE, rat(0)))

    constraints.append(({0: ONE}, EQ, ONE))
    for idx in range(len(sf.max_side.iset_ids)):
        coeffs = {sf.max_side.iset_parent[idx]: rat(-1)}
        for seq in sf.max_side.iset_children[idx]:
            coeffs[seq] = coeffs.get(seq, ZERO) + ONE
        constraints.append((coeffs, EQ, rat(0)))

    return LinearProgram(
        n_vars=n_vars,
        objective={q0: ONE},
        constraints=constraints,
        free=frozenset(range(m, n_vars)),
    )


def _crash_basis(sf: SequenceForm) -> list[int | None]:
    """Feasible triangular starting basis for the maximizer formulation.

    Inequality rows keep their slacks (payoffs are nonnegative, so the
    all-zero dual is feasible there); the realization-flow equalities are
    covered by the pure first-action plan, which is triangular because
    parent info sets are registered before their descendants.
    """
    hints: list[int | None] = [None] * len(sf.opp_side.parent)
    hints.append(0)
    for idx in range(len(sf.max_side.iset_ids)):
        hints.append(sf.max_side.iset_children[idx][0])
    return hints


def value_from_sequence_form(sf: SequenceForm) -> tuple[Rat, RealizationPlan]:
    lp = _value_lp(sf)
    res = _solve(lp, basis=_crash_basis(sf))
    if res.status != OPTIMAL:
        raise AssertionError(f"sequence-form LP cannot be {res.status}")
    m = len(sf.max_side.parent)
    plan = RealizationPlan(side=sf.max_side, weights=res.solution[:m])
    return res.value, plan


def game_value(g2: GameTree, maximizer: int, win_label: str) -> tuple[Rat, RealizationPlan]:
    """Exact max-min probability of reaching ``win_label`` leaves.

    Also returns an optimal realization plan of the maximizer, convertible
    to a behavioral strategy.
    """
    sf = build_sequence_form(g2, maximizer, win_label)
    return value_from_sequence_form(sf)


def _guarantee_lp(sf: SequenceForm) -> LinearProgram:
    """Opponent-side LP: maximize -(value); feasible iterates certify value<1.

    Variables: one weight per opponent sequence, then one free dual per
    maximizer flow constraint; the first dual is the (negated) objective.
    """
    m = len(sf.opp_side.parent)
    n_max_rows = 1 + len(sf.max_side.iset_ids)
    n_vars = m + n_max_rows

    holder = [0] * len(sf.max_side.parent)
    for idx in range(len(sf.max_side.iset_ids)):
        for seq in sf.max_side.iset_children[idx]:
            holder[seq] = 1 + idx
    by_sigma: dict[int, list[tuple[int, Rat]]] = {}
    for (sigma, tau), w in sf.payoff.items():
        by_sigma.setdefault(sigma, []).append((tau, w))

    constraints: list[tuple[dict[int, Rat], str, Rat]] = []
    for sigma in range(len(sf.max_side.parent)):
        coeffs: dict[int, Rat] = {m + holder[sigma]: -ONE}
        for idx in range(len(sf.max_side.iset_ids)):
            if sf.max_side.iset_parent[idx] == sigma:
                coeffs[m + 1 + idx] = coeffs.get(m + 1 + idx, ZERO) + ONE
        for tau, w in by_sigma.get(sigma, ()):
            coeffs[tau] = coeffs.get(tau, ZERO) + w
        constraints.append((coeffs, LE, rat(0)))

    constraints.append(({0: ONE}, EQ, ONE))
    for idx in range(len(sf.opp_side.iset_ids)):
        coeffs = {sf.opp_side.iset_parent[idx]: rat(-1)}
        for seq in sf.opp_side.iset_children[idx]:
            coeffs[seq] = coeffs.get(seq, ZERO) + ONE
        constraints.append((coeffs, EQ, rat(0)))

    return LinearProgram(
        n_vars=n_vars,
        objective={m: rat(-1)},
        constraints=constraints,
        free=frozenset(range(m, n_vars)),
    )


def _pure_plan_sequences(side: SideSequences) -> set[int]:
    """Sequences realized by the first-action pure plan (the crash plan)."""
    chosen = {0}
    for idx in range(len(side.iset_ids)):
        if side.iset_parent[idx] in chosen:
            chosen.add(side.iset_children[idx][0])
    return chosen


def _opp_crash_basis(sf: SequenceForm) -> list[int | None]:
    """Feasible triangular basis for the opponent formulation.

    The opponent plays its pure first-action plan; each maximizer dual is
    set to the best-response value below it, computed backwards, so the
    rows of maximizing actions are tight and carry the duals while all
    other rows keep their slacks.
    """
    m = len(sf.opp_side.parent)
    plan = _pure_plan_sequences(sf.opp_side)
    req: dict[int, Rat] = {}
    for (sigma, tau), w in sf.payoff.items():
        if tau in plan:
            req[sigma] = req.get(sigma, ZERO) + w
    n_seq = len(sf.max_side.parent)
    tight_row_of_dual: dict[int, int] = {}
    # Children before parents: info sets are registered parents-first.
    for idx in range(len(sf.max_side.iset_ids) - 1, -1, -1):
        best_seq = None
        best = None
        for seq in sf.max_side.iset_children[idx]:
            v = req.get(seq, ZERO)
            if best is None or v > best:
                best = v
                best_seq = seq
        parent = sf.max_side.iset_parent[idx]
        req[parent] = req.get(parent, ZERO) + best
        tight_row_of_dual[m + 1 + idx] = best_seq
    tight_row_of_dual[m] = 0  # the objective dual sits on the root row

    hints: list[int | None] = [None] * n_seq
    for var, row in tight_row_of_dual.items():
        hints[row] = var
    hints.append(0)  # the opponent's root sequence carries weight 1
    for idx in range(len(sf.opp_side.iset_ids)):
        hints.append(sf.opp_side.iset_children[idx][0])
    return hints


def guarantee_from_sequence_form(sf: SequenceForm) -> bool:
    """Whether the sequence-form game value equals 1 exactly.

    Fast exact shortcuts first: if no reachable leaf loses, the value is 1;
    if the maximizer has no choices at all, the value is 1 only in that
    case.  Otherwise solve whichever side's formulation is smaller, each
    from an artificial-free crash basis; on the opponent formulation the
    objective is the negated value, so any iterate above -1 certifies a
    value below 1 and stops the solve early.
    """
    if not sf.has_losing_leaf:
        return True  # every reachable play carries the win label
    if len(sf.max_side.parent) == 1:
        # No maximizer choices, and some losing leaf exists; every leaf is
        # reachable under full-support chance and some opponent behavior.
        return False
    if 4 * len(sf.max_side.parent) >= len(sf.opp_side.parent):
        res = _solve(_value_lp(sf), basis=_crash_basis(sf))
        if res.status != OPTIMAL:
            raise AssertionError(f"sequence-form LP cannot be {res.status}")
        return res.value == 1
    res = _solve(_guarantee_lp(sf), basis=_opp_crash_basis(sf), stop_above=rat(-1))
    if res.status != OPTIMAL:
        raise AssertionError(f"sequence-form LP cannot be {res.status}")
    return res.value == -1


def can_guarantee(g2: GameTree, side: int, win_label: str) -> bool:
    """Whether ``game_value(g2, side, win_label)`` equals 1 exactly."""
    return guarantee_from_sequence_form(build_sequence_form(g2, side, win_label))


def brute_force_can_guarantee(
    g2: GameTree, side: int, win_label: str, limit: int = DEFAULT_ORACLE_CAP
) -> bool:
    """Test oracle: search pure strategies of ``side`` directly.

    A behavioral guarantee always admits a pure witness (selecting any
    positive-probability action only shrinks the consistent-play set), so
    exhaustive enumeration decides the same predicate without any LP and
    without needing perfect recall.
    """
    check_two_player(g2)
    win = _win_bool(win_label)
    isets = [i for i in g2.info_sets if i.owner == side]
    counts = [len(g2.node(i.nodes[0]).actions) for i in isets]
    total = 1
    for c in counts:
        total *= c
        if total > limit:
            raise CapExceededError(
                f"{total}+ pure strategies exceed the oracle limit {limit}"
            )
    action_lists = [[a for a, _ in g2.node(i.nodes[0]).actions] for i in isets]
    iset_of = g2.info_set_of
    nodes = g2.nodes
    owners = g2.owners

    def all_plays_win(choice: dict[str, str]) -> bool:
        stack = [g2.root]
        while stack:
            nid = stack.pop()
            node = nodes[nid]
            if node.is_terminal:
                if node.label != win:
                    return False
                continue
            if owners[nid] == side:
                stack.append(node.child(choice[iset_of[nid].id]))
            else:
                for _, child in node.actions:
                    stack.append(child)
        return True

    ids = [i.id for i in isets]
    for combo in product(*action_lists):
        if all_plays_win(dict(zip(ids, combo))):
            return True
    return False
