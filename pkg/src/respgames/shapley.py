"""Quantitative responsibility: Shapley values of the 0/1 coalition game.

A responsibility notion turns the game into a cooperative 0/1 function on
coalitions (1 where the property holds); a player's responsibility value
is its exact Shapley value there.  Property evaluations across the subset
lattice are memoized and pruned using monotonicity in both directions: a
set containing a known success is 1, a set inside a known failure is 0.
An exhaustive mode evaluates everything and reports any monotonicity
violation instead of assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import factorial

from .coalition import Coalition
from .errors import InputError
from .games import GameTree
from .rational import Rat, rat
from .responsibility import BackwardContext, property_fn

EVAL_PRUNED = "pruned"
EVAL_EXHAUSTIVE = "exhaustive"


@dataclass
class CooperativeGame:
    """0/1 coalition values on all 2^n subsets, as bitmask -> rational."""

    n: int
    values: dict[int, Rat]
    findings: list[str] = field(default_factory=list)
    evaluations: int = 0

    def value(self, coalition: Coalition) -> Rat:
        return self.values[_mask(coalition.members)]


@dataclass
class ResponsibilityVector:
    values: tuple[Rat, ...]

    @property
    def total(self) -> Rat:
        return sum(self.values, rat(0))


def _mask(members) -> int:
    m = 0
    for p in members:
        m |= 1 << (p - 1)
    return m


def _members(mask: int, n: int) -> tuple[int, ...]:
    return tuple(p for p in range(1, n + 1) if mask & (1 << (p - 1)))


def evaluate_lattice(n: int, prop, mode: str = EVAL_PRUNED, batch=None) -> CooperativeGame:
    """Evaluate a monotone-expected 0/1 property on every subset.

    ``prop`` takes a Coalition; ``batch`` optionally evaluates a list of
    masks at once (hook for parallel evaluation), defaulting to sequential
    calls.  Pruning is sound for monotone properties; the randomized suites
    plus the exhaustive mode (which evaluates everything and reports every
    violation as a finding) guard that assumption.
    """
    if mode not in (EVAL_PRUNED, EVAL_EXHAUSTIVE):
        raise InputError(f"bad lattice mode {mode!r}")
    values: dict[int, Rat] = {}
    findings: list[str] = []
    evaluations = 0
    if batch is None:
        batch = lambda masks: [prop(Coalition.of(_members(m, n))) for m in masks]

    if mode == EVAL_EXHAUSTIVE:
        for mask in range(1 << n):
            evaluations += 1
            values[mask] = rat(1) if prop(Coalition.of(_members(mask, n))) else rat(0)
        for mask in range(1 << n):
            if values[mask] == 1:
                for p in range(n):
                    up = mask | (1 << p)
                    if up != mask and values[up] == 0:
                        findings.append(
                            f"monotonicity violation: {_members(mask, n)} holds "
                            f"but {_members(up, n)} fails"
                        )
        return CooperativeGame(n=n, values=values,
                               findings=findings, evaluations=evaluations)

    # Probe a nested chain to locate the success frontier, then sweep the
    # levels below it downward (a level that fails entirely settles all
    # smaller sets at once) and above it upward (known successes settle
    # their supersets).  Both prunings are sound for monotone properties.
    # Levels are batched so the caller may evaluate a batch in parallel.
    successes: list[int] = []
    failures: list[int] = []

    def settle(mask: int) -> bool:
        if mask in values:
            return True
        for s in successes:
            if s & mask == s:
                values[mask] = rat(1)
                return True
        for f in failures:
            if f & mask == mask:
                values[mask] = rat(0)
                return True
        return False

    def record(mask: int, v: bool) -> None:
        nonlocal evaluations
        evaluations += 1
        values[mask] = rat(1) if v else rat(0)
        (successes if v else failures).append(mask)

    full = (1 << n) - 1
    record(full, prop(Coalition.of(_members(full, n))))
    if values[full] == 0:
        for mask in range(full):
            values[mask] = rat(0)
        return CooperativeGame(n=n, values=values,
                               findings=findings, evaluations=evaluations)
    record(0, prop(Coalition.of(())))
    if values[0] == 1:
        for mask in range(1, full):
            values[mask] = rat(1)
        return CooperativeGame(n=n, values=values,
                               findings=findings, evaluations=evaluations)

    flip = n
    for size in range(1, n):
        mask = (1 << size) - 1
        record(mask, prop(Coalition.of(_members(mask, n))))
        if values[mask] == 1:
            flip = size
            break

    players = tuple(range(1, n + 1))

    def run_level(size: int) -> list[int]:
        level = [_mask(members) for members in combinations(players, size)]
        todo = [mask for mask in level if not settle(mask)]
        if todo:
            verdicts = batch(todo)
            for mask, v in zip(todo, verdicts):
                record(mask, v)
        return level

    for size in range(flip - 1, 0, -1):
        level = run_level(size)
        if all(values[mask] == 0 for mask in level):
            for smaller in range(1, full):
                if smaller not in values:
                    values[smaller] = rat(0)
            break
    for size in range(flip, n):
        run_level(size)
    return CooperativeGame(n=n, values=values,
                           findings=findings, evaluations=evaluations)


_worker_prop = None


def _worker_init(g, kind, ctx):
    global _worker_prop
    _worker_prop = property_fn(g, kind, ctx)


def _worker_eval(args):
    n, masks = args
    return [_worker_prop(Coalition.of(_members(m, n))) for m in masks]


def induced_coop_game(
    g: GameTree,
    kind: str,
    ctx: BackwardContext | None = None,
    mode: str = EVAL_PRUNED,
    n_jobs: int = 1,
) -> CooperativeGame:
    """Coalition -> 1 iff the responsibility property holds for it.

    ``n_jobs > 1`` evaluates each lattice level across forked workers; the
    verdicts are merged in mask order, so results stay deterministic.
    """
    prop = property_fn(g, kind, ctx)
    batch = None
    pool = None
    if n_jobs > 1 and g.players >= 6 and mode == EVAL_PRUNED:
        import multiprocessing as mp

        try:
            pool = mp.get_context("fork").Pool(n_jobs, _worker_init, (g, kind, ctx))
        except (ValueError, OSError):
            pool = None
        if pool is not None:
            n = g.players

            def batch(masks: list[int]) -> list[bool]:
                if len(masks) < 4:
                    return [prop(Coalition.of(_members(m, n))) for m in masks]
                chunks = [(n, masks[i::n_jobs]) for i in range(n_jobs)]
                results = pool.map(_worker_eval, chunks)
                merged: dict[int, bool] = {}
                for (_, chunk), verdicts in zip(chunks, results):
                    merged.update(zip(chunk, verdicts))
                return [merged[m] for m in masks]

    try:
        return evaluate_lattice(g.players, prop, mode=mode, batch=batch)
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()


def shapley(cg: CooperativeGame) -> ResponsibilityVector:
    """Exact Shapley values by the subset-weight formula."""
    n = cg.n
    weights = [rat(factorial(s) * factorial(n - s - 1), factorial(n)) for s in range(n)]
    out = []
    for p in range(1, n + 1):
        bit = 1 << (p - 1)
        total = rat(0)
        for mask, v in cg.values.items():
            if mask & bit:
                continue
            gain = cg.values[mask | bit] - v
            if gain:
                total += weights[bin(mask).count("1")] * gain
        out.append(total)
    return ResponsibilityVector(values=tuple(out))


def shapley_by_permutations(cg: CooperativeGame) -> ResponsibilityVector:
    """Oracle: average marginal contribution over all player orderings.

    For an ordering pi, player i joins the set of players ranked at or
    after it; feasible up to 6 or so players.
    """
    n = cg.n
    total = [rat(0)] * n
    count = 0
    for perm in permutations(range(1, n + 1)):
        count += 1
        rank = {p: idx for idx, p in enumerate(perm)}
        for p in range(1, n + 1):
            geq = _mask([q for q in perm if rank[q] >= rank[p]])
            total[p - 1] += cg.values[geq] - cg.values[geq & ~(1 << (p - 1))]
    f = rat(1, count)
    return ResponsibilityVector(values=tuple(t * f for t in total))


def responsibility_values(
    g: GameTree,
    kind: str,
    ctx: BackwardContext | None = None,
    mode: str = EVAL_PRUNED,
    n_jobs: int = 0,
) -> tuple[ResponsibilityVector, CooperativeGame]:
    """Shapley responsibility vector plus the underlying coalition game.

    ``n_jobs=0`` picks two workers automatically for large player counts.
    """
    if n_jobs == 0:
        n_jobs = 2 if g.players >= 8 else 1
    cg = induced_coop_game(g, kind, ctx, mode=mode, n_jobs=n_jobs)
    return shapley(cg), cg


def responsibility_value(
    g: GameTree, kind: str, player: int, ctx: BackwardContext | None = None
) -> Rat:
    if not 1 <= player <= g.players:
        raise InputError(f"player {player} out of range")
    vector, _ = responsibility_values(g, kind, ctx)
    return vector.values[player - 1]
