"""Exponential-time reference implementations used as test oracles.

Everything here favours being obviously correct over being fast: plain
subset enumeration in ascending size, so the first certified answer is the
optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .bias import BiasOracle, is_balanced_subgraph
from .graph import Graph, SimpleCycle, VertexPath, connected_component, iter_simple_cycles
from .locallp import Balloon, FractionalAssignment


@dataclass(frozen=True)
class BruteResult:
    optimum: int
    witness: frozenset[int]


def brute_local(g: Graph, oracle: BiasOracle, root: int, max_n: int = 12) -> BruteResult:
    """Minimum deletion set keeping the root's component balanced, by enumeration."""
    if g.n > max_n:
        raise ValueError(f"graph too large for brute force (n={g.n} > {max_n})")
    everything = set(range(g.n))
    others = sorted(everything - {root})
    for size in range(len(others) + 1):
        for combo in combinations(others, size):
            remaining = everything - set(combo)
            comp = connected_component(g, root, remaining)
            if is_balanced_subgraph(oracle, g, comp):
                return BruteResult(size, frozenset(combo))
    raise AssertionError("unreachable: deleting all non-root vertices always works")


def brute_global(g: Graph, oracle: BiasOracle, max_n: int = 12) -> BruteResult:
    """Minimum deletion set making the whole graph balanced, by enumeration."""
    if g.n > max_n:
        raise ValueError(f"graph too large for brute force (n={g.n} > {max_n})")
    everything = set(range(g.n))
    for size in range(g.n + 1):
        for combo in combinations(sorted(everything), size):
            if is_balanced_subgraph(oracle, g, everything - set(combo)):
                return BruteResult(size, frozenset(combo))
    raise AssertionError("unreachable: deleting every vertex always works")


def _root_cycle_paths(g: Graph, root: int, cycle: SimpleCycle) -> list[VertexPath]:
    """Every simple path from the root ending on the cycle, interior off-cycle."""
    on_cycle = set(cycle.vertices)
    if root in on_cycle:
        return [VertexPath((root,))]
    out = []
    path = [root]
    seen = {root}
    iters = [iter(g.neighbors(root))]
    while iters:
        try:
            w = next(iters[-1])
        except StopIteration:
            iters.pop()
            seen.discard(path.pop())
            continue
        if w in on_cycle:
            out.append(VertexPath(tuple(path) + (w,)))
            continue
        if w in seen:
            continue
        path.append(w)
        seen.add(w)
        iters.append(iter(g.neighbors(w)))
    return out


def brute_min_balloon(
    g: Graph,
    oracle: BiasOracle,
    x: FractionalAssignment,
    max_cycles: int = 1_000_000,
) -> tuple[Balloon, Fraction] | None:
    """Globally minimum-weight balloon by enumerating every cycle and path.

    Ties break on the lexicographic canonical form (cycle first, then path).
    """
    best: Balloon | None = None
    best_key = None
    for cycle in iter_simple_cycles(g, max_cycles):
        if oracle.is_balanced(g, cycle):
            continue
        for path in _root_cycle_paths(g, x.root, cycle):
            balloon = Balloon(path=path, cycle=cycle)
            key = (balloon.weight_under(x), cycle.vertices, path.vertices)
            if best_key is None or key < best_key:
                best_key = key
                best = balloon
    if best is None:
        return None
    return best, best_key[0]
