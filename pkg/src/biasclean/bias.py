"""Balanced-cycle membership oracles and the problem reductions built on them.

An oracle answers one question: is a given simple cycle balanced?  The induced
cycle class must be linear (no theta subgraph contains exactly two balanced
cycles); every built-in family guarantees this, user-supplied oracles are
checked when the graph is small enough.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .graph import (
    CycleLimitExceeded,
    Graph,
    GraphError,
    SimpleCycle,
    components,
    iter_simple_cycles,
)

Matrix = tuple[tuple[Fraction, ...], ...]

_MISSING = object()


class LinearityError(ValueError):
    """The supplied oracle violates linearity on a concrete theta subgraph."""

    def __init__(self, witness: "ThetaWitness"):
        super().__init__(
            "oracle is not linear: a theta subgraph has exactly two balanced cycles"
        )
        self.witness = witness


class BiasOracle:
    """Base class for balanced-cycle membership oracles.

    Answers are memoised on the canonical cycle form and every query is
    counted; the query count is the complexity currency of the solvers.
    ``fast_balanced_subgraph`` marks families with a polynomial balanced
    subgraph test (the group-labelled ones).  ``trusted_linear`` marks the
    built-in families whose linearity holds by construction; anything else is
    validated before solving when feasible.
    """

    fast_balanced_subgraph = False
    trusted_linear = False

    def __init__(self) -> None:
        self.queries = 0
        self.evaluations = 0
        self._memo: dict[tuple[int, ...], bool] = {}

    def is_balanced(self, g: Graph, cycle: SimpleCycle) -> bool:
        self.queries += 1
        cached = self._memo.get(cycle.vertices, _MISSING)
        if cached is _MISSING:
            cached = self._evaluate(g, cycle)
            self.evaluations += 1
            self._memo[cycle.vertices] = cached
        return cached

    def _evaluate(self, g: Graph, cycle: SimpleCycle) -> bool:
        raise NotImplementedError

    def balanced_subgraph(self, g: Graph, s: Iterable[int]) -> bool:
        raise NotImplementedError("this oracle has no fast balanced-subgraph test")

    def reset_counters(self) -> None:
        self.queries = 0
        self.evaluations = 0


class EmptyBias(BiasOracle):
    """No balanced cycles at all: every cycle is an obstacle (feedback vertex set)."""

    trusted_linear = True

    def _evaluate(self, g: Graph, cycle: SimpleCycle) -> bool:
        return False


class CyclicGroup:
    """Integers modulo ``m`` under addition."""

    def __init__(self, modulus: int):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        self.modulus = modulus
        self.identity = 0

    def op(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def inverse(self, a: int) -> int:
        return (-a) % self.modulus

    def coerce(self, raw: int):
        return raw % self.modulus

    def __eq__(self, other):
        return isinstance(other, CyclicGroup) and other.modulus == self.modulus

    def __repr__(self) -> str:
        return f"CyclicGroup({self.modulus})"


class TableGroup:
    """A finite group given by its multiplication table; element 0 is the identity."""

    def __init__(self, table: Sequence[Sequence[int]], inverse: Sequence[int]):
        q = len(table)
        self.order = q
        self.table = tuple(tuple(row) for row in table)
        self.inverses = tuple(inverse)
        self.identity = 0
        self._validate()

    def _validate(self) -> None:
        q = self.order
        if q < 1:
            raise ValueError("group order must be positive")
        if any(len(row) != q for row in self.table) or len(self.inverses) != q:
            raise ValueError("multiplication or inverse table has the wrong shape")
        for row in self.table:
            if any(not (0 <= x < q) for x in row):
                raise ValueError("multiplication table is not closed")
        for a in range(q):
            if self.table[0][a] != a or self.table[a][0] != a:
                raise ValueError("element 0 does not act as the identity")
            b = self.inverses[a]
            if not (0 <= b < q) or self.table[a][b] != 0 or self.table[b][a] != 0:
                raise ValueError(f"inverse table is wrong for element {a}")
        for a in range(q):
            for b in range(q):
                ab = self.table[a][b]
                for c in range(q):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise ValueError("multiplication table is not associative")

    def op(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        return self.inverses[a]

    def coerce(self, raw: int):
        if not (0 <= raw < self.order):
            raise ValueError(f"element {raw} outside group of order {self.order}")
        return raw

    def __eq__(self, other):
        return (
            isinstance(other, TableGroup)
            and other.table == self.table
            and other.inverses == self.inverses
        )

    def __repr__(self) -> str:
        return f"TableGroup(order={self.order})"


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    d = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d))
        for i in range(d)
    )


def _mat_identity(d: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(d)) for i in range(d)
    )


def _mat_inverse(mat: Matrix) -> Matrix:
    d = len(mat)
    work = [list(row) + list(ident_row) for row, ident_row in zip(mat, _mat_identity(d))]
    for col in range(d):
        pivot = next((r for r in range(col, d) if work[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix label is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv = 1 / Fraction(work[col][col])
        work[col] = [x * inv for x in work[col]]
        for r in range(d):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[d:]) for row in work)


class MatrixGroup:
    """Invertible d x d matrices over the exact rationals under multiplication.

    An infinite group; balancedness is exact equality of the label product
    with the identity matrix, so no numerical tolerance is involved.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("matrix dimension must be positive")
        self.dim = dim
        self.identity = _mat_identity(dim)

    def op(self, a: Matrix, b: Matrix) -> Matrix:
        return _mat_mul(a, b)

    def inverse(self, a: Matrix) -> Matrix:
        return _mat_inverse(a)

    def coerce(self, raw) -> Matrix:
        mat = tuple(tuple(Fraction(x) for x in row) for row in raw)
        if len(mat) != self.dim or any(len(row) != self.dim for row in mat):
            raise ValueError(f"matrix label must be {self.dim}x{self.dim}")
        _mat_inverse(mat)  # raises if singular
        return mat

    def __eq__(self, other):
        return isinstance(other, MatrixGroup) and other.dim == self.dim

    def __repr__(self) -> str:
        return f"MatrixGroup(dim={self.dim})"


class GroupBias(BiasOracle):
    """Group-labelled bias: a cycle is balanced iff its oriented label product
    is the group identity.

    ``labels`` maps oriented edges ``(u, v)`` to group elements; the reverse
    orientation is filled in with the inverse, and explicitly supplied reverse
    labels are checked for consistency.  Correctness does not depend on the
    traversal direction or start vertex, since being the identity is preserved
    under conjugation and inversion.
    """

    fast_balanced_subgraph = True
    trusted_linear = True

    def __init__(self, group, labels: Mapping[tuple[int, int], object]):
        super().__init__()
        self.group = group
        table: dict[tuple[int, int], object] = {}
        for (u, v), raw in labels.items():
            elem = group.coerce(raw)
            if (u, v) in table and table[(u, v)] != elem:
                raise GraphError(f"conflicting labels for oriented edge ({u}, {v})")
            table[(u, v)] = elem
            rev = group.inverse(elem)
            existing = table.get((v, u))
            if existing is not None and existing != rev:
                raise GraphError(
                    f"labels for ({u}, {v}) and ({v}, {u}) are not mutually inverse"
                )
            table[(v, u)] = rev
        self._labels = table

    def label(self, u: int, v: int):
        try:
            return self._labels[(u, v)]
        except KeyError:
            raise GraphError(f"edge ({u}, {v}) carries no group label") from None

    def _evaluate(self, g: Graph, cycle: SimpleCycle) -> bool:
        group = self.group
        acc = group.identity
        vs = cycle.vertices
        for u, v in zip(vs, vs[1:] + vs[:1]):
            acc = group.op(acc, self.label(u, v))
        return acc == group.identity

    def balanced_subgraph(self, g: Graph, s: Iterable[int]) -> bool:
        sset = frozenset(s)
        potential: dict[int, object] = {}
        group = self.group
        for comp in components(g, within=sset):
            root = min(comp)
            potential[root] = group.identity
            stack = [root]
            while stack:
                u = stack.pop()
                for w, _ in g.incident(u):
                    if w in comp and w not in potential:
                        potential[w] = group.op(potential[u], self.label(u, w))
                        stack.append(w)
        for u, v in g.edges:
            if u in sset and v in sset:
                if group.op(potential[u], self.label(u, v)) != potential[v]:
                    return False
        return True


class ColorBias(BiasOracle):
    """Edge-coloured bias: a cycle is balanced iff it is monochromatic."""

    trusted_linear = True

    def __init__(self, colors: Mapping[int, int], g: Graph | None = None):
        super().__init__()
        self.colors = dict(colors)
        if g is not None:
            missing = [i for i in range(1, g.m + 1) if i not in self.colors]
            if missing:
                raise GraphError(f"edges {missing} carry no colour")

    def _evaluate(self, g: Graph, cycle: SimpleCycle) -> bool:
        try:
            seen = {self.colors[i] for i in cycle.edges}
        except KeyError as exc:
            raise GraphError(f"edge index {exc.args[0]} carries no colour") from None
        return len(seen) == 1


class PartitionBias(BiasOracle):
    """Terminal-partition bias around a root vertex.

    A cycle is unbalanced iff it passes through the root and its two cycle
    neighbours are copies of distinct terminals; every other cycle is
    balanced.  This is the cycle class produced by the multiway reduction.
    """

    trusted_linear = True

    def __init__(self, root: int, terminal_class: Mapping[int, int]):
        super().__init__()
        self.root = root
        self.terminal_class = dict(terminal_class)

    def _evaluate(self, g: Graph, cycle: SimpleCycle) -> bool:
        if self.root not in cycle:
            return True
        a, b = cycle.cyclic_neighbors(self.root)
        try:
            return self.terminal_class[a] == self.terminal_class[b]
        except KeyError as exc:
            raise GraphError(
                f"root neighbour {exc.args[0]} has no terminal class"
            ) from None


class TabulatedBias(BiasOracle):
    """A user-supplied bias given as an explicit set of balanced cycles.

    Linearity is the caller's responsibility; the solvers validate it on small
    graphs and warn otherwise.
    """

    def __init__(self, balanced: Iterable[Sequence[int]]):
        super().__init__()
        from .graph import _canonical_cycle

        self.balanced = frozenset(_canonical_cycle(c) for c in balanced)

    def _evaluate(self, g: Graph, cycle: SimpleCycle) -> bool:
        return cycle.vertices in self.balanced


def is_balanced_cycle(oracle: BiasOracle, g: Graph, cycle: SimpleCycle) -> bool:
    """Query the oracle on ``cycle`` after checking it really is a cycle of ``g``."""
    rebuilt = SimpleCycle.from_vertices(g, cycle.vertices)
    if rebuilt != cycle:
        raise GraphError("cycle is not in canonical form for this graph")
    return oracle.is_balanced(g, cycle)


def is_balanced_subgraph(
    oracle: BiasOracle,
    g: Graph,
    s: Iterable[int],
    max_cycles: int = 1_000_000,
) -> bool:
    """True iff no simple cycle of the induced subgraph ``G[s]`` is unbalanced.

    Group-labelled oracles use spanning-tree potentials; the generic path
    enumerates the cycles of ``G[s]`` and may raise the enumeration limit.
    """
    sset = frozenset(s)
    if oracle.fast_balanced_subgraph:
        return oracle.balanced_subgraph(g, sset)
    for cycle in iter_simple_cycles(g, max_cycles, within=sset):
        if not oracle.is_balanced(g, cycle):
            return False
    return True


@dataclass(frozen=True)
class ThetaWitness:
    """Three cycles of one theta subgraph together with their balance flags."""

    cycles: tuple[SimpleCycle, SimpleCycle, SimpleCycle]
    balanced: tuple[bool, bool, bool]


def _simple_paths(g: Graph, a: int, b: int):
    """All simple a-b paths as (vertex tuple, interior set) pairs."""
    out = []
    path = [a]
    on_path = {a}
    iters = [iter(g.neighbors(a))]
    while iters:
        try:
            w = next(iters[-1])
        except StopIteration:
            iters.pop()
            on_path.discard(path.pop())
            continue
        if w == b:
            out.append((tuple(path) + (b,), frozenset(path[1:])))
            continue
        if w in on_path:
            continue
        path.append(w)
        on_path.add(w)
        iters.append(iter(g.neighbors(w)))
    return out


def validate_linearity(
    oracle: BiasOracle, g: Graph, max_work: int = 2_000_000
) -> ThetaWitness | None:
    """Search every theta subgraph for a linearity violation.

    Returns the first theta whose three cycles contain exactly two balanced
    ones, or ``None`` when the class is linear on ``g``.  The enumeration is
    exponential and guarded by ``max_work``.
    """
    work = 0
    for a in range(g.n):
        for b in range(a + 1, g.n):
            paths = _simple_paths(g, a, b)
            work += len(paths)
            if work > max_work:
                raise CycleLimitExceeded(max_work)
            k = len(paths)
            for i in range(k):
                pi, ii = paths[i]
                for j in range(i + 1, k):
                    pj, ij = paths[j]
                    if ii & ij:
                        continue
                    for l in range(j + 1, k):
                        pl, il = paths[l]
                        if il & ii or il & ij:
                            continue
                        work += 1
                        if work > max_work:
                            raise CycleLimitExceeded(max_work)
                        trio = (
                            _theta_cycle(g, pi, pj),
                            _theta_cycle(g, pi, pl),
                            _theta_cycle(g, pj, pl),
                        )
                        flags = tuple(oracle.is_balanced(g, c) for c in trio)
                        if sum(flags) == 2:
                            return ThetaWitness(trio, flags)
    return None


def _theta_cycle(g: Graph, path_one: tuple[int, ...], path_two: tuple[int, ...]) -> SimpleCycle:
    return SimpleCycle.from_vertices(g, path_one + tuple(reversed(path_two[1:-1])))


def ensure_linear(g: Graph, oracle: BiasOracle, max_n: int = 8) -> None:
    """Validate linearity of untrusted oracles before solving.

    Small graphs are checked exhaustively (raising :class:`LinearityError` on a
    violation); larger ones only earn a warning, since solver guarantees hold
    for linear classes only.
    """
    if oracle.trusted_linear:
        return
    if g.n <= max_n:
        witness = validate_linearity(oracle, g)
        if witness is not None:
            raise LinearityError(witness)
    else:
        warnings.warn(
            "linearity of the supplied oracle was not verified; "
            "solver output is only guaranteed for linear cycle classes",
            stacklevel=3,
        )


def build_apex_instance(g: Graph) -> tuple[Graph, int, BiasOracle]:
    """Attach an apex vertex adjacent to everything, with the empty bias.

    The rooted optimum of the result is a minimum vertex cover of ``g``.
    """
    apex = g.n
    edges = list(g.edges) + [(v, apex) for v in range(g.n)]
    return Graph(g.n + 1, edges), apex, EmptyBias()


def build_multiway_instance(
    g: Graph,
    terminals: Sequence[int],
    copies: Mapping[int, int] | None = None,
) -> tuple[Graph, int, PartitionBias]:
    """Split each terminal into copies, add a root adjacent to all copies.

    Each terminal t is replaced by d(t) copies (default: its degree) and its
    incident edges are distributed round-robin over the copies; with the
    default every copy inherits exactly one edge.  The rooted optimum of the
    result equals the minimum multiway cut of ``(g, terminals)``.
    """
    terms = sorted(set(terminals))
    for t in terms:
        if not (0 <= t < g.n):
            raise GraphError(f"terminal {t} is not a vertex")
    counts = {}
    for t in terms:
        d = g.degree(t) if copies is None or t not in copies else copies[t]
        if d < 1:
            raise GraphError(
                f"terminal {t} would get {d} copies; isolated terminals are not supported"
            )
        counts[t] = d

    term_set = set(terms)
    remap: dict[int, int] = {}
    next_id = 0
    for v in range(g.n):
        if v not in term_set:
            remap[v] = next_id
            next_id += 1
    copy_ids: dict[int, list[int]] = {}
    terminal_class: dict[int, int] = {}
    for t in terms:
        ids = list(range(next_id, next_id + counts[t]))
        next_id += counts[t]
        copy_ids[t] = ids
        for c in ids:
            terminal_class[c] = t
    root = next_id
    used = {t: 0 for t in terms}

    def place(v: int) -> int:
        if v not in term_set:
            return remap[v]
        ids = copy_ids[v]
        c = ids[used[v] % len(ids)]
        used[v] += 1
        return c

    edges = [(place(u), place(v)) for u, v in g.edges]
    for t in terms:
        edges.extend((c, root) for c in copy_ids[t])
    return Graph(root + 1, edges), root, PartitionBias(root, terminal_class)


def load_group_table(path: str) -> TableGroup:
    """Load a finite group from a multiplication-table text file.

    Format: a line ``order q``, then q rows of q element ids, then a line
    ``inv: i1 ... iq``.  Element 0 is the identity.  Group axioms are
    validated on load.
    """
    rows: list[list[int]] = []
    order: int | None = None
    inverses: list[int] | None = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                if order is None:
                    head, value = line.split()
                    if head != "order":
                        raise ValueError
                    order = int(value)
                elif line.startswith("inv:"):
                    inverses = [int(x) for x in line[4:].split()]
                else:
                    rows.append([int(x) for x in line.split()])
            except ValueError:
                raise GraphError(f"{path}:{lineno}: malformed group table line") from None
    if order is None or inverses is None or len(rows) != order:
        raise GraphError(f"{path}: incomplete group table")
    try:
        return TableGroup(rows, inverses)
    except ValueError as exc:
        raise GraphError(f"{path}: {exc}") from None
