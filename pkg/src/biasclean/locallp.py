"""The rooted covering LP over balloon constraints and its separation oracle.

A balloon is an unbalanced cycle tied to the root by a (possibly trivial) path
meeting the cycle in a single knot vertex.  Its constraint charges 2 to every
path vertex and 1 to every other cycle vertex, and demands total weight at
least 1.  Separation works on the derived edge metric: an edge uv has length
(x_u + x_v) / 2, so a minimum-weight balloon decomposes into two shortest
paths plus one closing edge.  Lengths are perturbed with the tuple
(length, 2^edge-index), compared lexicographically, which makes all shortest
paths unique and lets the oracle reassemble the minimum balloon by scanning
every edge against the shortest-path tree.

Everything here is exact rational arithmetic; the half-integral structure of
optima is read off by literal equality with 0, 1/2 and 1.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .bias import BiasOracle
from .graph import (
    Graph,
    GraphError,
    SimpleCycle,
    VertexPath,
    close_cycle,
    connected_component,
)
from .lp import minimize_covering

HALF = Fraction(1, 2)
ONE = Fraction(1)
ZERO = Fraction(0)


class InternalConsistencyError(RuntimeError):
    """A post-condition of the LP machinery failed; indicates an LP or oracle bug."""


class CuttingRoundLimit(RuntimeError):
    """The cutting-plane loop exceeded its safety limit on rounds."""


@dataclass(frozen=True)
class PerturbedLength:
    """A length under the perturbed metric: (exact value, sum of 2^edge-index).

    Ordered lexicographically, added componentwise.  The perturbation integer
    encodes the edge set, so distinct edge sets never compare equal.
    """

    value: Fraction
    perturbation: int

    def __add__(self, other: "PerturbedLength") -> "PerturbedLength":
        return PerturbedLength(
            self.value + other.value, self.perturbation + other.perturbation
        )

    def key(self) -> tuple[Fraction, int]:
        return (self.value, self.perturbation)

    def __lt__(self, other: "PerturbedLength") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "PerturbedLength") -> bool:
        return self.key() <= other.key()


class FractionalAssignment:
    """Exact rational vertex weights in [0, 1] with weight 0 at the root.

    Vertices absent from the mapping weigh 0, which keeps restricted (residual)
    instances cheap to express.
    """

    __slots__ = ("values", "root")

    def __init__(self, values: Mapping[int, Fraction], root: int):
        vals = {}
        for v, raw in values.items():
            x = Fraction(raw)
            if not (0 <= x <= 1):
                raise ValueError(f"weight {x} at vertex {v} is outside [0, 1]")
            if x:
                vals[v] = x
        if vals.get(root, ZERO) != 0:
            raise ValueError("the root must carry weight 0")
        self.values = vals
        self.root = root

    @classmethod
    def zeros(cls, root: int) -> "FractionalAssignment":
        return cls({}, root)

    def __getitem__(self, v: int) -> Fraction:
        return self.values.get(v, ZERO)

    def objective(self, costs: Mapping[int, Fraction]) -> Fraction:
        return sum((costs[v] * x for v, x in self.values.items()), ZERO)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FractionalAssignment):
            return NotImplemented
        return self.root == other.root and self.values == other.values

    def __repr__(self) -> str:
        inside = ", ".join(f"{v}: {x}" for v, x in sorted(self.values.items()))
        return f"FractionalAssignment(root={self.root}, {{{inside}}})"


@dataclass(frozen=True)
class Balloon:
    """A root path plus an unbalanced cycle sharing exactly the knot vertex."""

    path: VertexPath
    cycle: SimpleCycle

    @property
    def knot(self) -> int:
        return self.path.end

    def vertices(self) -> frozenset[int]:
        return frozenset(self.path.vertices) | frozenset(self.cycle.vertices)

    def coefficients(self) -> dict[int, int]:
        """Constraint coefficients: 2 on the path (knot included), 1 on the rest
        of the cycle."""
        coeffs = {v: 2 for v in self.path.vertices}
        for v in self.cycle.vertices:
            if v != self.knot:
                coeffs[v] = 1
        return coeffs

    def weight_under(self, x: FractionalAssignment) -> Fraction:
        return sum((coef * x[v] for v, coef in self.coefficients().items()), ZERO)

    def validate(self, g: Graph, oracle: BiasOracle | None = None) -> None:
        self.path.validate(g)
        if self.knot not in self.cycle:
            raise GraphError("the path must end on the cycle")
        overlap = frozenset(self.path.vertices) & frozenset(self.cycle.vertices)
        if overlap != {self.knot}:
            raise GraphError("path and cycle may only share the knot")
        if self.path.start in self.cycle and len(self.path) > 1:
            raise GraphError("a cycle through the root forces the trivial path")
        if oracle is not None and oracle.is_balanced(g, self.cycle):
            raise GraphError("balloon cycle is balanced")


@dataclass(frozen=True)
class BalloonConstraint:
    """The covering row of one balloon: sum of coefficient(v) * x_v >= 1."""

    coefficients: dict[int, int]

    @classmethod
    def from_balloon(cls, balloon: Balloon) -> "BalloonConstraint":
        return cls(balloon.coefficients())

    def value_under(self, x: FractionalAssignment) -> Fraction:
        return sum((coef * x[v] for v, coef in self.coefficients.items()), ZERO)

    def satisfied_by(self, x: FractionalAssignment) -> bool:
        return self.value_under(x) >= 1


@dataclass(frozen=True)
class HalfIntegralCertificate:
    """An LP optimum rounded to {0, 1/2, 1} plus the sets describing it.

    ``region`` is the distance-zero component of the root, ``ones`` the
    vertices at value 1, ``halves`` the rest of the region's neighbourhood.
    """

    lam: Fraction
    region: frozenset[int]
    ones: frozenset[int]
    halves: frozenset[int]
    rounded: FractionalAssignment


def unit_costs(vertices: Iterable[int]) -> dict[int, Fraction]:
    return {v: ONE for v in vertices}


def shortest_path_tree(
    g: Graph, x: FractionalAssignment, active: Iterable[int] | None = None
) -> tuple[dict[int, PerturbedLength | None], dict[int, int | None]]:
    """Single-source shortest paths from the root under the perturbed metric.

    Label-setting works because all edge lengths are non-negative.  Distinct
    paths have distinct perturbations, so the parent map is the unique
    shortest-path tree; unreachable vertices get distance ``None``.
    """
    act = frozenset(range(g.n)) if active is None else frozenset(active)
    root = x.root
    if root not in act:
        raise GraphError("the root is not an active vertex")
    dist: dict[int, PerturbedLength | None] = {v: None for v in act}
    parent: dict[int, int | None] = {root: None}
    dist[root] = PerturbedLength(ZERO, 0)
    heap: list[tuple[Fraction, int, int]] = [(ZERO, 0, root)]
    while heap:
        val, pert, v = heapq.heappop(heap)
        cur = dist[v]
        if cur is None or (val, pert) != (cur.value, cur.perturbation):
            continue
        xv = x[v]
        for w, idx in g.incident(v):
            if w not in act:
                continue
            nval = val + (xv + x[w]) / 2
            npert = pert + (1 << idx)
            old = dist[w]
            if old is None or (nval, npert) < (old.value, old.perturbation):
                dist[w] = PerturbedLength(nval, npert)
                parent[w] = v
                heapq.heappush(heap, (nval, npert, w))
    return dist, parent


def _path_builder(parent: Mapping[int, int | None]):
    cache: dict[int, tuple[int, ...]] = {}

    def build(v: int) -> VertexPath:
        chain = []
        w: int | None = v
        while w is not None and w not in cache:
            chain.append(w)
            w = parent[w]
        suffix = () if w is None else cache[w]
        for u in reversed(chain):
            suffix = suffix + (u,)
            cache[u] = suffix
        return VertexPath(cache[v])

    return build


def separate(
    g: Graph,
    oracle: BiasOracle,
    x: FractionalAssignment,
    active: Iterable[int] | None = None,
) -> tuple[Balloon, Fraction] | None:
    """Find a balloon of weight below 1, or report that none exists.

    Every edge uv is closed against the perturbed shortest-path tree; the
    candidate's weight z(u) + z(v) + length(uv) equals its true balloon weight,
    and the perturbed-minimum balloon always appears among the candidates, so
    the scan returns an exact minimum-weight violated balloon whenever one
    exists.
    """
    act = frozenset(range(g.n)) if active is None else frozenset(active)
    dist, parent = shortest_path_tree(g, x, act)
    path_to = _path_builder(parent)
    best: Balloon | None = None
    best_key: tuple[Fraction, int] | None = None
    for idx, (u, v) in enumerate(g.edges, start=1):
        if u not in act or v not in act:
            continue
        du, dv = dist[u], dist[v]
        if du is None or dv is None:
            continue
        closed = close_cycle(g, path_to(u), path_to(v), (u, v))
        if closed is None:
            continue
        cycle, path = closed
        if oracle.is_balanced(g, cycle):
            continue
        weight = du.value + dv.value + (x[u] + x[v]) / 2
        pert = du.perturbation + dv.perturbation + (1 << idx)
        key = (weight, pert)
        if best_key is None or key < best_key:
            best_key = key
            best = Balloon(path=path, cycle=cycle)
    if best is not None and best_key[0] < 1:
        return best, best_key[0]
    return None


def round_half_integral(
    g: Graph,
    oracle: BiasOracle,
    x_star: FractionalAssignment,
    lam: Fraction,
    costs: Mapping[int, Fraction] | None = None,
    active: Iterable[int] | None = None,
) -> HalfIntegralCertificate:
    """Round an LP optimum of value ``lam`` to the half-integral certificate.

    Fails loudly (``InternalConsistencyError``) if the rounding does not keep
    the objective or feasibility; either failure indicates an LP or oracle
    bug, or a non-linear oracle.
    """
    act = frozenset(range(g.n)) if active is None else frozenset(active)
    root = x_star.root
    zeros = {v for v in act if x_star[v] == 0}
    region = connected_component(g, root, zeros)
    ones = frozenset(v for v in act if x_star[v] == 1)
    boundary = frozenset(
        w for v in region for w in g.neighbors(v) if w in act and w not in region
    )
    halves = boundary - ones
    rounded = FractionalAssignment(
        {**{v: ONE for v in ones}, **{v: HALF for v in halves}}, root
    )
    cost_map = unit_costs(act) if costs is None else costs
    value = rounded.objective(cost_map)
    if value != lam:
        raise InternalConsistencyError(
            f"rounded objective {value} differs from the LP value {lam}"
        )
    if separate(g, oracle, rounded, act) is not None:
        raise InternalConsistencyError("rounded assignment violates a balloon")
    return HalfIntegralCertificate(
        lam=lam, region=region, ones=ones, halves=halves, rounded=rounded
    )


class LocalLpEngine:
    """Cutting-plane solver for one rooted instance.

    The balloon pool depends only on the graph, the active vertex set and the
    oracle, never on the costs, so it is reused across re-solves with changed
    costs (branching, region maximisation).  Each solve returns a basic
    optimal point of the pool LP that is feasible for every balloon.
    """

    def __init__(
        self,
        g: Graph,
        oracle: BiasOracle,
        root: int,
        active: Iterable[int] | None = None,
        max_rounds: int = 10_000,
        stats=None,
    ):
        self.g = g
        self.oracle = oracle
        self.root = root
        self.active = frozenset(range(g.n)) if active is None else frozenset(active)
        if root not in self.active:
            raise GraphError("the root must be an active vertex")
        self.columns = sorted(self.active - {root})
        self._col_of = {v: j for j, v in enumerate(self.columns)}
        self.pool: list[BalloonConstraint] = []
        self.balloons: list[Balloon] = []
        self._rows: list[dict[int, int]] = []
        self.max_rounds = max_rounds
        self.stats = stats

    def _add(self, balloon: Balloon) -> None:
        cons = BalloonConstraint.from_balloon(balloon)
        self.pool.append(cons)
        self.balloons.append(balloon)
        self._rows.append(
            {
                self._col_of[v]: coef
                for v, coef in cons.coefficients.items()
                if v != self.root
            }
        )

    def preload(self, balloons: Iterable[Balloon]) -> None:
        """Seed the pool with balloons found earlier for the same instance."""
        for balloon in balloons:
            self._add(balloon)

    def solve(self, costs: Mapping[int, Fraction]) -> tuple[FractionalAssignment, Fraction]:
        """Optimise over the full balloon polytope by cutting planes.

        Starts from the all-zero point, adds the minimum-weight violated
        balloon each round, and stops when separation finds nothing; the
        result is then optimal for the full LP, not just the pool.
        """
        cost_vec = [Fraction(costs[v]) for v in self.columns]
        if any(c <= 0 for c in cost_vec):
            raise ValueError("costs must be positive")
        rounds = 0
        while True:
            if self._rows:
                value, xs = minimize_covering(cost_vec, self._rows)
                if any(not (0 <= c <= 1) for c in xs):
                    raise InternalConsistencyError("LP point escaped the unit box")
                x = FractionalAssignment(
                    {v: xs[j] for v, j in self._col_of.items()}, self.root
                )
            else:
                value, x = ZERO, FractionalAssignment.zeros(self.root)
            rounds += 1
            if self.stats is not None:
                self.stats.lp_rounds += 1
            hit = separate(self.g, self.oracle, x, self.active)
            if hit is None:
                return x, value
            if rounds >= self.max_rounds:
                raise CuttingRoundLimit(
                    f"no convergence within {self.max_rounds} cutting rounds"
                )
            self._add(hit[0])

    def maximize(
        self,
        fixed_zero: Iterable[int] = (),
        fixed_one: Iterable[int] = (),
        base_costs: Mapping[int, Fraction] | None = None,
    ) -> HalfIntegralCertificate:
        """Solve under fix costs, then grow the zero region as far as it goes.

        Unfixed half vertices are tentatively pinned to zero in ascending
        vertex order; a pin is kept exactly when the LP value stays unchanged.
        Passes repeat until one makes no progress, so afterwards pinning any
        remaining half vertex strictly raises the value.
        """
        fz = frozenset(fixed_zero)
        fo = frozenset(fixed_one)
        if fz & fo:
            raise ValueError("fixed-zero and fixed-one sets overlap")
        n = self.g.n
        high = Fraction(2 * n)
        low = Fraction(1, 3 * n)
        base = unit_costs(self.columns) if base_costs is None else base_costs

        def costs_with(pinned: frozenset[int]) -> dict[int, Fraction]:
            out = {}
            for v in self.columns:
                if v in fz or v in pinned:
                    out[v] = high
                elif v in fo:
                    out[v] = low
                else:
                    out[v] = Fraction(base[v])
            return out

        if self.stats is not None:
            self.stats.lp_solves += 1
        pinned: frozenset[int] = frozenset()
        costs = costs_with(pinned)
        x, lam = self.solve(costs)
        while True:
            cert = round_half_integral(
                self.g, self.oracle, x, lam, costs=costs, active=self.active
            )
            progressed = False
            for v in sorted(cert.halves):
                if v in fz or v in fo or v in pinned:
                    continue
                probe = pinned | {v}
                probe_costs = costs_with(probe)
                x2, lam2 = self.solve(probe_costs)
                if lam2 == lam:
                    pinned, costs, x = probe, probe_costs, x2
                    progressed = True
            if not progressed:
                return cert


def solve_local_lp(
    g: Graph,
    oracle: BiasOracle,
    root: int,
    costs: Mapping[int, Fraction] | None = None,
    max_rounds: int = 10_000,
) -> tuple[FractionalAssignment, Fraction, list[BalloonConstraint]]:
    """Solve the rooted LP from scratch; returns the optimum, its value and the
    generated constraint pool."""
    engine = LocalLpEngine(g, oracle, root, max_rounds=max_rounds)
    base = unit_costs(engine.columns) if costs is None else costs
    x, lam = engine.solve({v: Fraction(base[v]) for v in engine.columns})
    return x, lam, list(engine.pool)


def maximize_reachable_region(
    g: Graph,
    oracle: BiasOracle,
    root: int,
    costs: Mapping[int, Fraction] | None = None,
    fixed_zero: Iterable[int] = (),
    fixed_one: Iterable[int] = (),
    max_rounds: int = 10_000,
) -> HalfIntegralCertificate:
    """Certificate with the largest zero region reachable at the optimal value."""
    engine = LocalLpEngine(g, oracle, root, max_rounds=max_rounds)
    return engine.maximize(fixed_zero, fixed_one, costs)
