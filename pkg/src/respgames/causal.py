"""Structural causal models and their compilation into game trees.

A model has exogenous variables, endogenous variables with a total order,
and per-variable lookup tables over declared parents.  Compilation makes
each endogenous variable a player choosing its value with full sight of
the earlier choices; a context induces the table-following pure profile
and its unique play.  But-for causes then coincide with causal backward
responsibility of the variable set in the compiled game, which is the
equivalence the randomized suite drills.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any

from .coalition import Coalition
from .config import node_cap
from .errors import CapExceededError, InputError
from .games import GameTree, Node, Play, StrategyProfile, make_game, pure
from .responsibility import BackwardContext, is_responsible

Value = str


@dataclass(frozen=True)
class CausalModel:
    exogenous: tuple[str, ...]
    endogenous: tuple[str, ...]  # total dependency order
    ranges: dict[str, tuple[Value, ...]]
    parents: dict[str, tuple[str, ...]]
    tables: dict[str, dict[tuple[Value, ...], Value]]

    def check(self) -> None:
        names = set(self.exogenous) | set(self.endogenous)
        if len(names) != len(self.exogenous) + len(self.endogenous):
            raise InputError("variable names must be distinct")
        for v in names:
            rng = self.ranges.get(v)
            if not rng:
                raise InputError(f"variable {v!r} needs a nonempty finite range")
            if len(set(rng)) != len(rng):
                raise InputError(f"range of {v!r} has duplicates")
        earlier: set[str] = set(self.exogenous)
        for v in self.endogenous:
            for p in self.parents.get(v, ()):
                if p not in earlier:
                    raise InputError(
                        f"{v!r} depends on {p!r}, which is not exogenous or earlier"
                    )
            table = self.tables.get(v)
            if table is None:
                raise InputError(f"{v!r} lacks a table")
            domain = [self.ranges[p] for p in self.parents.get(v, ())]
            for combo in product(*domain):
                if combo not in table:
                    raise InputError(f"table of {v!r} misses parents {combo!r}")
                if table[combo] not in self.ranges[v]:
                    raise InputError(f"table of {v!r} maps {combo!r} out of range")
            earlier.add(v)

    def player_of(self, var: str) -> int:
        try:
            return self.endogenous.index(var) + 1
        except ValueError:
            raise InputError(f"{var!r} is not an endogenous variable") from None


@dataclass(frozen=True)
class Prim:
    var: str
    value: Value

    def holds(self, assignment: dict[str, Value]) -> bool:
        return assignment[self.var] == self.value


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def holds(self, assignment) -> bool:
        return not self.arg.holds(assignment)


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def holds(self, assignment) -> bool:
        return all(a.holds(assignment) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def holds(self, assignment) -> bool:
        return any(a.holds(assignment) for a in self.args)


@dataclass(frozen=True)
class Const:
    value: bool

    def holds(self, assignment) -> bool:
        return self.value


Formula = Prim | Not | And | Or | Const


def formula_from_dict(data: Any) -> Formula:
    if not isinstance(data, dict):
        raise InputError("formula must be a JSON object")
    if "eq" in data:
        var, value = data["eq"]
        return Prim(var=var, value=str(value))
    if "not" in data:
        return Not(formula_from_dict(data["not"]))
    if "and" in data:
        return And(tuple(formula_from_dict(a) for a in data["and"]))
    if "or" in data:
        return Or(tuple(formula_from_dict(a) for a in data["or"]))
    if "const" in data:
        return Const(bool(data["const"]))
    raise InputError(f"unknown formula node {sorted(data)!r}")


def check_formula(m: CausalModel, formula: Formula) -> None:
    if isinstance(formula, Prim):
        if formula.var not in m.endogenous:
            raise InputError(f"event refers to unknown variable {formula.var!r}")
        if formula.value not in m.ranges[formula.var]:
            raise InputError(f"event value {formula.value!r} out of range")
    elif isinstance(formula, Not):
        check_formula(m, formula.arg)
    elif isinstance(formula, (And, Or)):
        for a in formula.args:
            check_formula(m, a)


def evaluate(
    m: CausalModel,
    context: dict[str, Value],
    intervention: dict[str, Value] | None = None,
) -> dict[str, Value]:
    """Solve the model: intervened variables are forced, others follow
    their tables in dependency order."""
    iv = intervention or {}
    for u in m.exogenous:
        if u not in context:
            raise InputError(f"context misses exogenous {u!r}")
        if context[u] not in m.ranges[u]:
            raise InputError(f"context value for {u!r} out of range")
    for var, val in iv.items():
        if var not in m.endogenous:
            raise InputError(f"cannot intervene on {var!r}")
        if val not in m.ranges[var]:
            raise InputError(f"intervention value for {var!r} out of range")
    out: dict[str, Value] = dict(context)
    for var in m.endogenous:
        if var in iv:
            out[var] = iv[var]
        else:
            key = tuple(out[p] for p in m.parents.get(var, ()))
            out[var] = m.tables[var][key]
    return out


def holds(
    m: CausalModel,
    context: dict[str, Value],
    formula: Formula,
    intervention: dict[str, Value] | None = None,
) -> bool:
    """Truth of ``[intervention]formula`` in the solved model."""
    return formula.holds(evaluate(m, context, intervention))


def compile_to_game(m: CausalModel, cap: int | None = None) -> GameTree:
    """Layered game: player k chooses the value of the k-th variable with
    every earlier choice visible (all information sets are singletons).
    Leaves start unlabeled as non-event; attach an event with label_event.
    """
    m.check()
    cap = cap if cap is not None else node_cap()
    total = 1
    width = 1
    for var in m.endogenous:
        width *= len(m.ranges[var])
        total += width
        if total > cap:
            raise CapExceededError(f"compiled tree exceeds the node cap {cap}")
    nodes: list[Node] = []
    owners: dict[str, int] = {}
    counter = 0

    def walk(prefix: tuple[Value, ...]) -> str:
        nonlocal counter
        nid = f"n{counter}"
        counter += 1
        depth = len(prefix)
        if depth == len(m.endogenous):
            nodes.append(Node(nid, label=False))
            return nid
        actions = tuple(
            (value, walk(prefix + (value,))) for value in m.ranges[m.endogenous[depth]]
        )
        nodes.append(Node(nid, actions=actions))
        owners[nid] = depth + 1
        return nid

    root = walk(())
    return make_game(len(m.endogenous), nodes, root, owners, auto_singletons=True)


def leaf_assignment(m: CausalModel, g: GameTree, leaf: str) -> dict[str, Value]:
    play = g.play_to_leaf(leaf)
    return dict(zip(m.endogenous, play.actions))


def label_event(m: CausalModel, g: GameTree, formula: Formula) -> GameTree:
    """Relabel every leaf by whether its value tuple satisfies the event."""
    check_formula(m, formula)
    new_nodes: dict[str, Node] = {}
    for nid, node in g.nodes.items():
        if node.is_terminal:
            new_nodes[nid] = Node(
                nid, label=formula.holds(leaf_assignment(m, g, nid))
            )
        else:
            new_nodes[nid] = node
    return GameTree(g.players, new_nodes, g.root, g.owners, g.info_sets)


def induced_profile_and_play(
    m: CausalModel, context: dict[str, Value], g: GameTree | None = None
) -> tuple[StrategyProfile, Play]:
    """The table-following pure profile and its unique consistent play."""
    if g is None:
        g = compile_to_game(m)
    iset_of = g.info_set_of
    strategies = {}
    for player, var in enumerate(m.endogenous, start=1):
        choices = {}
        for iset in g.info_sets:
            if iset.owner != player:
                continue
            nid = iset.nodes[0]
            prefix = dict(zip(m.endogenous, g.action_prefix(nid)))
            merged = dict(context)
            merged.update(prefix)
            key = tuple(merged[p] for p in m.parents.get(var, ()))
            choices[iset.id] = m.tables[var][key]
        strategies[player] = pure(player, choices)
    profile = StrategyProfile(strategies)

    nid = g.root
    nodes = [nid]
    actions = []
    while not g.node(nid).is_terminal:
        iset = iset_of[nid]
        action = next(iter(profile.strategy(g.owners[nid]).choices[iset.id]))
        actions.append(action)
        nid = g.node(nid).child(action)
        nodes.append(nid)
    return profile, Play(nodes=tuple(nodes), actions=tuple(actions))


def but_for_direct(
    m: CausalModel,
    context: dict[str, Value],
    assignment: dict[str, Value],
    formula: Formula,
) -> bool:
    """Counterfactual test without auxiliary interventions.

    The named variables actually take the given values and the event
    actually holds; some alternative setting of exactly these variables
    defeats the event; and no proper subset manages both.
    """
    m.check()
    check_formula(m, formula)
    if not assignment:
        return False
    actual = evaluate(m, context)
    if any(actual[v] != x for v, x in assignment.items()):
        return False
    if not formula.holds(actual):
        return False
    if not _some_setting_defeats(m, context, tuple(assignment), formula):
        return False
    names = tuple(assignment)
    for r in range(1, len(names)):
        from itertools import combinations

        for sub in combinations(names, r):
            if _some_setting_defeats(m, context, sub, formula):
                return False
    return True


def _some_setting_defeats(
    m: CausalModel, context, variables: tuple[str, ...], formula: Formula
) -> bool:
    for values in product(*(m.ranges[v] for v in variables)):
        iv = dict(zip(variables, values))
        if not holds(m, context, formula, iv):
            return True
    return False


def but_for_via_game(
    m: CausalModel,
    context: dict[str, Value],
    variables: tuple[str, ...],
    formula: Formula,
    labeled: GameTree | None = None,
) -> bool:
    """Same predicate through the compiled game.

    The variable set acts as a coalition; causal backward responsibility
    for the event on the induced play under the table profile decides the
    counterfactual.  A play that misses the event fails outright.
    ``labeled`` lets callers reuse an event-labeled compilation.
    """
    m.check()
    check_formula(m, formula)
    if not variables:
        return False
    g = labeled if labeled is not None else label_event(m, compile_to_game(m), formula)
    profile, play = induced_profile_and_play(m, context, g)
    if not g.node(play.leaf).label:
        return False  # the event did not actually occur
    coalition = Coalition.of(m.player_of(v) for v in variables)
    return is_responsible(g, coalition, "c", BackwardContext(play, profile))


def actual_cause(
    m: CausalModel,
    context: dict[str, Value],
    assignment: dict[str, Value],
    formula: Formula,
) -> bool:
    """Full counterfactual test with an auxiliary frozen set.

    Some variables outside the candidate set may be pinned to their actual
    values while the candidates are re-set; minimality is over proper
    subsets of the candidates with the same freedom.
    """
    m.check()
    check_formula(m, formula)
    if not assignment:
        return False
    actual = evaluate(m, context)
    if any(actual[v] != x for v, x in assignment.items()):
        return False
    if not formula.holds(actual):
        return False

    def condition(names: tuple[str, ...]) -> bool:
        rest = [v for v in m.endogenous if v not in names]
        from itertools import combinations

        for r in range(len(rest) + 1):
            for frozen in combinations(rest, r):
                pinned = {w: actual[w] for w in frozen}
                for values in product(*(m.ranges[v] for v in names)):
                    iv = dict(zip(names, values))
                    iv.update(pinned)
                    if not holds(m, context, formula, iv):
                        return True
        return False

    names = tuple(assignment)
    if not condition(names):
        return False
    from itertools import combinations

    for r in range(1, len(names)):
        for sub in combinations(names, r):
            if condition(sub):
                return False
    return True


# -- JSON ----------------------------------------------------------------------


def model_from_dict(data: dict[str, Any]) -> CausalModel:
    try:
        exo = data["exogenous"]
        endo = data["endogenous"]
    except KeyError as exc:
        raise InputError(f"model JSON missing {exc}") from None
    ranges: dict[str, tuple[Value, ...]] = {}
    parents: dict[str, tuple[str, ...]] = {}
    tables: dict[str, dict[tuple[Value, ...], Value]] = {}
    exo_names = []
    for raw in exo:
        name = raw["name"]
        exo_names.append(name)
        ranges[name] = tuple(str(v) for v in raw["range"])
    endo_names = []
    for raw in endo:
        name = raw["name"]
        endo_names.append(name)
        ranges[name] = tuple(str(v) for v in raw["range"])
        parents[name] = tuple(raw.get("parents", ()))
        table = {}
        for key, value in raw.get("table", {}).items():
            combo = tuple(key.split("|")) if key else ()
            table[combo] = str(value)
        tables[name] = table
    order = data.get("order")
    if order is not None:
        if sorted(order) != sorted(endo_names):
            raise InputError("order must be a permutation of the endogenous variables")
        endo_names = list(order)
    model = CausalModel(
        exogenous=tuple(exo_names),
        endogenous=tuple(endo_names),
        ranges=ranges,
        parents=parents,
        tables=tables,
    )
    model.check()
    return model


def model_to_dict(m: CausalModel) -> dict[str, Any]:
    return {
        "exogenous": [{"name": u, "range": list(m.ranges[u])} for u in m.exogenous],
        "endogenous": [
            {
                "name": v,
                "range": list(m.ranges[v]),
                "parents": list(m.parents.get(v, ())),
                "table": {
                    "|".join(k): val for k, val in sorted(m.tables[v].items())
                },
            }
            for v in m.endogenous
        ],
        "order": list(m.endogenous),
    }


def table_from_function(m_parents: tuple[str, ...], ranges: dict[str, tuple[Value, ...]], fn) -> dict:
    """Tabulate a python function over the parents' domains (builder aid)."""
    out = {}
    for combo in product(*(ranges[p] for p in m_parents)):
        out[combo] = fn(dict(zip(m_parents, combo)))
    return out
