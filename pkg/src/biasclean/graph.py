"""Undirected simple graphs plus the path and cycle machinery shared by every solver."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphError(ValueError):
    """A structurally invalid graph, path, or cycle was supplied."""


class CycleLimitExceeded(RuntimeError):
    """Generic cycle or theta enumeration exceeded its configured budget."""

    def __init__(self, limit: int):
        super().__init__(
            f"instance too large for generic enumeration (limit {limit} exceeded)"
        )
        self.limit = limit


class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``.

    Edges keep their input order and are indexed ``1 .. m``.  The edge index is
    used as a perturbation id by the shortest-path machinery, so it must stay
    stable for the lifetime of the instance.  Self-loops and parallel edges are
    rejected; multigraph inputs have to be subdivided by the caller.
    """

    __slots__ = ("n", "edges", "_adj", "_index")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = n
        edge_list: list[tuple[int, int]] = []
        index: dict[tuple[int, int], int] = {}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}; subdivide multigraph inputs first")
            key = (u, v) if u < v else (v, u)
            if key in index:
                raise GraphError(f"parallel edge ({u}, {v}); subdivide multigraph inputs first")
            edge_list.append((u, v))
            idx = len(edge_list)
            index[key] = idx
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        self.edges: tuple[tuple[int, int], ...] = tuple(edge_list)
        self._index = index
        self._adj: tuple[tuple[tuple[int, int], ...], ...] = tuple(tuple(a) for a in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(w for w, _ in self._adj[v])

    def incident(self, v: int) -> tuple[tuple[int, int], ...]:
        """Pairs ``(neighbour, edge index)`` around ``v``."""
        return self._adj[v]

    def edge_index(self, u: int, v: int) -> int | None:
        return self._index.get((u, v) if u < v else (v, u))

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def endpoints(self, edge_index: int) -> tuple[int, int]:
        return self.edges[edge_index - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class VertexPath:
    """A simple path given as its vertex sequence (a single vertex is allowed)."""

    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def validate(self, g: Graph) -> None:
        if not self.vertices:
            raise GraphError("a path needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError(f"path {self.vertices} repeats a vertex")
        for u, v in zip(self.vertices, self.vertices[1:]):
            if g.edge_index(u, v) is None:
                raise GraphError(f"path step {u}-{v} is not an edge")


def _canonical_cycle(seq: Iterable[int]) -> tuple[int, ...]:
    """Rotate/flip a cyclic vertex sequence into its unique canonical form.

    The minimum vertex comes first, followed by the lexicographically smaller
    of the two traversal directions.
    """
    vs = tuple(seq)
    pos = vs.index(min(vs))
    forward = vs[pos:] + vs[:pos]
    backward = (forward[0],) + tuple(reversed(forward[1:]))
    return min(forward, backward)


@dataclass(frozen=True)
class SimpleCycle:
    """A simple cycle in canonical form together with its edge-index set."""

    vertices: tuple[int, ...]
    edges: frozenset[int]

    @classmethod
    def from_vertices(cls, g: Graph, seq: Iterable[int]) -> "SimpleCycle":
        vs = _canonical_cycle(seq)
        if len(vs) < 3:
            raise GraphError(f"cycle {vs} is shorter than 3 vertices")
        if len(set(vs)) != len(vs):
            raise GraphError(f"cycle {vs} repeats a vertex")
        idxs = []
        for u, v in zip(vs, vs[1:] + vs[:1]):
            idx = g.edge_index(u, v)
            if idx is None:
                raise GraphError(f"cycle step {u}-{v} is not an edge")
            idxs.append(idx)
        return cls(vs, frozenset(idxs))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: int) -> bool:
        return v in self.vertices

    def cyclic_neighbors(self, v: int) -> tuple[int, int]:
        i = self.vertices.index(v)
        return self.vertices[i - 1], self.vertices[(i + 1) % len(self.vertices)]


def connected_component(g: Graph, v: int, allowed: Iterable[int]) -> frozenset[int]:
    """The maximal connected subset of ``allowed`` containing ``v``.

    Only edges with both endpoints in ``allowed`` are traversed.
    """
    allowed_set = frozenset(allowed)
    if v not in allowed_set:
        raise GraphError(f"vertex {v} is not in the allowed set")
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w in allowed_set and w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def components(g: Graph, within: Iterable[int] | None = None) -> list[frozenset[int]]:
    """All connected components of ``g`` restricted to ``within``, sorted by minimum vertex."""
    remaining = set(range(g.n)) if within is None else set(within)
    out = []
    while remaining:
        v = min(remaining)
        comp = connected_component(g, v, remaining)
        out.append(comp)
        remaining -= comp
    return out


def iter_simple_cycles(
    g: Graph, max_cycles: int = 1_000_000, within: Iterable[int] | None = None
) -> Iterator[SimpleCycle]:
    """Yield every simple cycle of ``g`` exactly once, in canonical form.

    Cycles are grown from their minimum vertex using only larger vertices, and
    the direction with the smaller second vertex is kept, so each cycle appears
    once.  Raises :class:`CycleLimitExceeded` past ``max_cycles``.
    """
    allowed = set(range(g.n)) if within is None else set(within)
    count = 0
    for s in sorted(allowed):
        path = [s]
        on_path = {s}
        iters = [iter(g.neighbors(s))]
        while iters:
            try:
                w = next(iters[-1])
            except StopIteration:
                iters.pop()
                on_path.discard(path.pop())
                continue
            if w not in allowed:
                continue
            if w == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    count += 1
                    if count > max_cycles:
                        raise CycleLimitExceeded(max_cycles)
                    yield SimpleCycle.from_vertices(g, tuple(path))
                continue
            if w < s or w in on_path:
                continue
            path.append(w)
            on_path.add(w)
            iters.append(iter(g.neighbors(w)))


def enumerate_simple_cycles(
    g: Graph, max_cycles: int = 1_000_000, within: Iterable[int] | None = None
) -> list[SimpleCycle]:
    """All simple cycles of ``g`` in canonical form; errors out past ``max_cycles``."""
    return list(iter_simple_cycles(g, max_cycles, within))


def close_cycle(
    g: Graph,
    path_u: VertexPath,
    path_v: VertexPath,
    edge: tuple[int, int],
) -> tuple[SimpleCycle, VertexPath] | None:
    """Close two tree paths sharing a root with the edge joining their endpoints.

    Both paths must come from a common shortest-path tree: they share a prefix
    and are vertex-disjoint after their last common vertex ``w``.  If the edge
    is a tree edge relative to the paths (one endpoint lies on the other path)
    there is no cycle and ``None`` is returned.  Otherwise the result is the
    cycle ``w..u -> uv -> v..w`` plus the root-to-``w`` path; ``w`` is the knot
    where the two meet.
    """
    u, v = edge
    pu, pv = path_u.vertices, path_v.vertices
    if pu[0] != pv[0]:
        raise GraphError("paths do not share a root")
    if pu[-1] != u or pv[-1] != v:
        raise GraphError(f"edge ({u}, {v}) does not join the path endpoints")
    if g.edge_index(u, v) is None:
        raise GraphError(f"({u}, {v}) is not an edge")
    if u in pv or v in pu:
        return None
    shared = 0
    for a, b in zip(pu, pv):
        if a != b:
            break
        shared += 1
    tail_u = pu[shared:]
    tail_v = pv[shared:]
    if set(tail_u) & set(tail_v):
        raise GraphError("paths re-intersect after diverging; not tree paths")
    knot = pu[shared - 1]
    cycle_seq = (knot,) + tail_u + tuple(reversed(tail_v))
    cycle = SimpleCycle.from_vertices(g, cycle_seq)
    return cycle, VertexPath(pu[:shared])
