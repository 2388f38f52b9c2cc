"""Branching solvers on top of the half-integral LP.

The rooted solver branches on half-valued vertices, pinning them to 0 (same
budget) or 1 (budget minus one); pins are realised through vertex costs of 2n
and 1/(3n).  A branch dies when the LP value reaches the remaining budget plus
one half, when a pin is contradicted by the optimum, or when a cardinality
bound proves it cannot strictly improve the incumbent.  The global solver
repeatedly roots a local search in an unbalanced component, growing a maximal
zero region whose boundary is then committed to the solution and carved out of
the residual graph.

All searches are deterministic: branch vertices are the lowest unfixed ids,
the pin-to-one branch runs first, and results are merged preferring earlier
branches unless a strictly smaller solution appears, so parallel exploration
returns exactly the sequential answer.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .bias import BiasOracle, ensure_linear, is_balanced_subgraph
from .graph import Graph, GraphError, components, connected_component
from .locallp import (
    HALF,
    FractionalAssignment,
    InternalConsistencyError,
    LocalLpEngine,
    round_half_integral,
    separate,
    solve_local_lp,
    unit_costs,
)


@dataclass
class SolveStats:
    """Search effort counters: branch nodes, node-level LP solves, cutting rounds."""

    branch_nodes: int = 0
    lp_solves: int = 0
    lp_rounds: int = 0

    def add(self, other: "SolveStats") -> None:
        self.branch_nodes += other.branch_nodes
        self.lp_solves += other.lp_solves
        self.lp_rounds += other.lp_rounds


@dataclass(frozen=True)
class FixState:
    """Vertices pinned by branching, plus the cost scheme realising the pins.

    A pinned-to-zero vertex costs 2n, a pinned-to-one vertex 1/(3n); every
    other vertex keeps its base cost.
    """

    fixed_zero: frozenset[int]
    fixed_one: frozenset[int]
    base_costs: dict[int, Fraction]
    n: int

    def __post_init__(self):
        if self.fixed_zero & self.fixed_one:
            raise ValueError("fixed-zero and fixed-one sets overlap")

    def cost(self, v: int) -> Fraction:
        if v in self.fixed_zero:
            return Fraction(2 * self.n)
        if v in self.fixed_one:
            return Fraction(1, 3 * self.n)
        return self.base_costs[v]

    def with_zero(self, vs: Iterable[int]) -> "FixState":
        return FixState(
            self.fixed_zero | frozenset(vs), self.fixed_one, self.base_costs, self.n
        )

    def with_one(self, vs: Iterable[int]) -> "FixState":
        return FixState(
            self.fixed_zero, self.fixed_one | frozenset(vs), self.base_costs, self.n
        )


@dataclass(frozen=True)
class LocalSolution:
    """A deletion set plus the balanced root component it leaves behind."""

    deleted: frozenset[int]
    region: frozenset[int]


@dataclass(frozen=True)
class GlobalSolution:
    deleted: frozenset[int]


def certify(
    g: Graph, oracle: BiasOracle, deleted: Iterable[int], root: int | None = None
) -> bool:
    """Independent solution check: is the root's component (or everything)
    balanced once ``deleted`` goes away?"""
    x = frozenset(deleted)
    remaining = frozenset(range(g.n)) - x
    if root is None:
        return is_balanced_subgraph(oracle, g, remaining)
    if root in x:
        raise GraphError("the root cannot be deleted")
    comp = connected_component(g, root, remaining)
    return is_balanced_subgraph(oracle, g, comp)


def approximate_local(
    g: Graph,
    oracle: BiasOracle,
    root: int,
    costs: Mapping[int, Fraction] | None = None,
) -> LocalSolution:
    """Factor-2 approximation, weighted instances included.

    Deletes every vertex the half-integral optimum supports, so the cost is at
    most twice the LP value and the LP value never exceeds the optimum.
    """
    ensure_linear(g, oracle)
    x, lam, _ = solve_local_lp(g, oracle, root, costs)
    cert = round_half_integral(g, oracle, x, lam, costs=costs)
    return LocalSolution(deleted=cert.ones | cert.halves, region=cert.region)


def _ceil(value: Fraction) -> int:
    return math.ceil(value)


def _neighborhood(g: Graph, region: frozenset[int], within: frozenset[int]) -> frozenset[int]:
    return frozenset(
        w for v in region for w in g.neighbors(v) if w in within and w not in region
    )


class _LocalSearch:
    """Depth-first branching for the rooted problem over one shared engine."""

    def __init__(self, engine: LocalLpEngine, k: int, stats: SolveStats):
        self.engine = engine
        self.k = k
        self.stats = stats
        self.eps = Fraction(1, 3 * engine.g.n)

    def node(self, fix: FixState, k_rem: int, best: list[LocalSolution | None]) -> None:
        self.stats.branch_nodes += 1
        cert = self.engine.maximize(fix.fixed_zero, fix.fixed_one)
        rounded = cert.rounded
        if any(rounded[v] != 0 for v in fix.fixed_zero):
            return
        if any(rounded[v] == 0 for v in fix.fixed_one):
            return
        if cert.lam >= k_rem + HALF:
            return
        pinned_ones = len(fix.fixed_one)
        bound = pinned_ones + max(0, _ceil(cert.lam - pinned_ones * self.eps))
        if best[0] is not None and bound >= len(best[0].deleted):
            return
        unfixed = sorted(
            v for v in cert.halves if v not in fix.fixed_one and v not in fix.fixed_zero
        )
        if not unfixed:
            deleted = _neighborhood(self.engine.g, cert.region, self.engine.active)
            if len(deleted) <= self.k and (
                best[0] is None or len(deleted) < len(best[0].deleted)
            ):
                best[0] = LocalSolution(deleted=deleted, region=cert.region)
            return
        v = unfixed[0]
        if k_rem >= 1:
            self.node(fix.with_one((v,)), k_rem - 1, best)
        if best[0] is not None and bound >= len(best[0].deleted):
            return
        self.node(fix.with_zero((v,)), k_rem, best)


def _local_subtree(args):
    g, oracle, root, balloons, fix, k_rem, k = args
    stats = SolveStats()
    engine = LocalLpEngine(g, oracle, root, stats=stats)
    engine.preload(balloons)
    best: list[LocalSolution | None] = [None]
    _LocalSearch(engine, k, stats).node(fix, k_rem, best)
    return best[0], stats


def solve_local(
    g: Graph,
    oracle: BiasOracle,
    root: int,
    k: int,
    jobs: int = 1,
    stats: SolveStats | None = None,
) -> LocalSolution | None:
    """Minimum-cardinality rooted deletion set of size at most ``k``, or None.

    Unit costs only.  When ``k >= n`` the instance is accepted immediately
    with the trivial solution that deletes everything but the root.
    """
    if not (0 <= root < g.n):
        raise GraphError(f"root {root} is not a vertex")
    if k < 0:
        return None
    ensure_linear(g, oracle)
    if stats is None:
        stats = SolveStats()
    if k >= g.n:
        others = frozenset(range(g.n)) - {root}
        return LocalSolution(deleted=others, region=frozenset((root,)))
    engine = LocalLpEngine(g, oracle, root, stats=stats)
    fix = FixState(frozenset(), frozenset(), unit_costs(range(g.n)), g.n)
    if jobs <= 1:
        best: list[LocalSolution | None] = [None]
        _LocalSearch(engine, k, stats).node(fix, k, best)
        return best[0]
    return _solve_local_parallel(engine, fix, k, jobs, stats)


def _solve_local_parallel(
    engine: LocalLpEngine, fix: FixState, k: int, jobs: int, stats: SolveStats
) -> LocalSolution | None:
    # Expand the root by hand, then farm the two subtrees out to workers.
    stats.branch_nodes += 1
    cert = engine.maximize(fix.fixed_zero, fix.fixed_one)
    if cert.lam >= k + HALF:
        return None
    unfixed = sorted(cert.halves)
    if not unfixed:
        deleted = _neighborhood(engine.g, cert.region, engine.active)
        if len(deleted) <= k:
            return LocalSolution(deleted=deleted, region=cert.region)
        return None
    v = unfixed[0]
    tasks = []
    if k >= 1:
        tasks.append((engine.g, engine.oracle, engine.root, engine.balloons, fix.with_one((v,)), k - 1, k))
    tasks.append((engine.g, engine.oracle, engine.root, engine.balloons, fix.with_zero((v,)), k, k))
    best: LocalSolution | None = None
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        for result, sub_stats in pool.map(_local_subtree, tasks):
            stats.add(sub_stats)
            if result is not None and (best is None or len(result.deleted) < len(best.deleted)):
                best = result
    return best


class _GlobalSearch:
    """Tile the graph with maximal balanced regions found by rooted searches."""

    def __init__(self, g: Graph, oracle: BiasOracle, k: int, stats: SolveStats):
        self.g = g
        self.oracle = oracle
        self.k = k
        self.stats = stats
        self.eps = Fraction(1, 3 * g.n) if g.n else Fraction(0)
        self.base = unit_costs(range(g.n))

    def unbalanced_components(self, alive: frozenset[int]) -> list[frozenset[int]]:
        out = []
        for comp in components(self.g, within=alive):
            root = min(comp)
            if separate(self.g, self.oracle, FractionalAssignment.zeros(root), comp):
                out.append(comp)
        return out

    def step(
        self,
        alive: frozenset[int],
        committed: frozenset[int],
        best: list[GlobalSolution | None],
    ) -> None:
        self.stats.branch_nodes += 1
        unbalanced = self.unbalanced_components(alive)
        if not unbalanced:
            if len(committed) <= self.k and (
                best[0] is None or len(committed) < len(best[0].deleted)
            ):
                best[0] = GlobalSolution(deleted=committed)
            return
        bound = len(committed) + len(unbalanced)
        if bound > self.k:
            return
        if best[0] is not None and bound >= len(best[0].deleted):
            return
        comp = unbalanced[0]
        v0 = min(comp)
        if len(committed) + 1 <= self.k:
            self.step(alive - {v0}, committed | {v0}, best)
        if best[0] is not None and bound >= len(best[0].deleted):
            return
        engine = LocalLpEngine(self.g, self.oracle, v0, active=comp, stats=self.stats)
        fix = FixState(frozenset(), frozenset(), self.base, self.g.n)
        self.phase(
            engine,
            alive,
            committed,
            fix,
            self.k - len(committed),
            len(unbalanced) - 1,
            best,
        )

    def phase(
        self,
        engine: LocalLpEngine,
        alive: frozenset[int],
        committed: frozenset[int],
        fix: FixState,
        k_rem: int,
        other_components: int,
        best: list[GlobalSolution | None],
    ) -> None:
        self.stats.branch_nodes += 1
        cert = engine.maximize(fix.fixed_zero, fix.fixed_one)
        rounded = cert.rounded
        if any(rounded[v] != 0 for v in fix.fixed_zero):
            return
        if any(rounded[v] == 0 for v in fix.fixed_one):
            return
        if cert.lam >= k_rem + HALF:
            return
        pinned_ones = len(fix.fixed_one)
        bound = (
            len(committed)
            + other_components
            + pinned_ones
            + max(0, _ceil(cert.lam - pinned_ones * self.eps))
        )
        if bound > self.k:
            return
        if best[0] is not None and bound >= len(best[0].deleted):
            return
        # Persistence: the maximal zero region stays, its one-valued border goes.
        fix = fix.with_zero(cert.region - fix.fixed_zero)
        new_ones = cert.ones - fix.fixed_one
        fix = fix.with_one(new_ones)
        k_rem -= len(new_ones)
        boundary = _neighborhood(self.g, cert.region, alive)
        if boundary <= fix.fixed_one:
            if not is_balanced_subgraph(self.oracle, self.g, cert.region):
                raise InternalConsistencyError("closed region is not balanced")
            committed2 = committed | boundary
            if len(committed2) <= self.k:
                self.step(alive - cert.region - boundary, committed2, best)
            return
        unfixed = sorted(
            v for v in cert.halves if v not in fix.fixed_one and v not in fix.fixed_zero
        )
        if not unfixed:
            raise InternalConsistencyError("open region without a branch vertex")
        v = unfixed[0]
        if k_rem >= 1:
            self.phase(
                engine, alive, committed, fix.with_one((v,)), k_rem - 1,
                other_components, best,
            )
        if best[0] is not None and bound >= len(best[0].deleted):
            return
        self.phase(engine, alive, committed, fix.with_zero((v,)), k_rem, other_components, best)


def _global_subtree(args):
    g, oracle, k, kind, alive, committed, comp, v0, others = args
    stats = SolveStats()
    search = _GlobalSearch(g, oracle, k, stats)
    best: list[GlobalSolution | None] = [None]
    if kind == "step":
        search.step(alive, committed, best)
    else:
        engine = LocalLpEngine(g, oracle, v0, active=comp, stats=stats)
        fix = FixState(frozenset(), frozenset(), search.base, g.n)
        search.phase(engine, alive, committed, fix, k - len(committed), others, best)
    return best[0], stats


def solve_global(
    g: Graph,
    oracle: BiasOracle,
    k: int,
    jobs: int = 1,
    stats: SolveStats | None = None,
) -> GlobalSolution | None:
    """Minimum-cardinality deletion set of size at most ``k`` leaving the whole
    graph balanced, or None."""
    if k < 0:
        return None
    ensure_linear(g, oracle)
    if stats is None:
        stats = SolveStats()
    if k >= g.n:
        return GlobalSolution(deleted=frozenset(range(1, g.n)))
    search = _GlobalSearch(g, oracle, k, stats)
    alive = frozenset(range(g.n))
    if jobs <= 1:
        best: list[GlobalSolution | None] = [None]
        search.step(alive, frozenset(), best)
        return best[0]
    return _solve_global_parallel(search, alive, jobs, stats)


def _solve_global_parallel(
    search: _GlobalSearch, alive: frozenset[int], jobs: int, stats: SolveStats
) -> GlobalSolution | None:
    stats.branch_nodes += 1
    unbalanced = search.unbalanced_components(alive)
    if not unbalanced:
        return GlobalSolution(deleted=frozenset())
    if len(unbalanced) > search.k:
        return None
    comp = unbalanced[0]
    v0 = min(comp)
    g, oracle, k = search.g, search.oracle, search.k
    others = len(unbalanced) - 1
    tasks = []
    if k >= 1:
        tasks.append((g, oracle, k, "step", alive - {v0}, frozenset((v0,)), None, None, 0))
    tasks.append((g, oracle, k, "phase", alive, frozenset(), comp, v0, others))
    best: GlobalSolution | None = None
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        for result, sub_stats in pool.map(_global_subtree, tasks):
            stats.add(sub_stats)
            if result is not None and (best is None or len(result.deleted) < len(best.deleted)):
                best = result
    return best
