"""Directed acyclic graphs, their clique complexes and spanning forests."""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CliqueLookupError, DistanceError, OrientationError, ValidationError

Simplex = tuple[int, ...]


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation of ``range(len(perm))`` by cycle counting."""
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Graph:
    """A finite simple graph with every edge directed ``u -> v``.

    The orientation must be acyclic; construction fails with
    :class:`OrientationError` naming one directed cycle otherwise.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = self.num_vertices
        if n < 0:
            raise ValidationError("num_vertices must be nonnegative")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            key = frozenset((u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {{{u}, {v}}}")
            seen.add(key)
        cycle = _find_directed_cycle(n, edges)
        if cycle is not None:
            raise OrientationError(cycle)

    @classmethod
    def natural(cls, num_vertices: int, edges: Iterable[tuple[int, int]]) -> Graph:
        """Orient every edge from the lower to the higher vertex id."""
        return cls(num_vertices, tuple(sorted((min(u, v), max(u, v)) for u, v in edges)))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls.natural(n, itertools.combinations(range(n), 2))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.natural(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.natural(n, [(i, (i + 1) % n) for i in range(n)])

    def reoriented(self, order: Sequence[int]) -> Graph:
        """Same undirected graph, edges directed along the vertex sequence ``order``."""
        pos = {v: i for i, v in enumerate(order)}
        return Graph(self.num_vertices, tuple((u, v) if pos[u] < pos[v] else (v, u) for u, v in self.edges))

    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def topological_rank(self) -> tuple[int, ...]:
        """Position of each vertex in a linear extension of the partial order.

        Ties are broken towards the lowest vertex id, so the natural orientation
        gives ``rank[v] == v``.
        """
        n = self.num_vertices
        indeg = [0] * n
        out: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            out[u].append(v)
            indeg[v] += 1
        heap = [v for v in range(n) if indeg[v] == 0]
        heapq.heapify(heap)
        rank = [0] * n
        r = 0
        while heap:
            u = heapq.heappop(heap)
            rank[u] = r
            r += 1
            for v in out[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(heap, v)
        return tuple(rank)


def _find_directed_cycle(n, edges):
    out: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        out[u].append(v)
    color = [0] * n  # 0 new, 1 on stack, 2 done
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(out[root]))]
        color[root] = 1
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if color[v] == 0:
                    color[v] = 1
                    parent[v] = u
                    stack.append((v, iter(out[v])))
                    advanced = True
                    break
                if color[v] == 1:
                    cyc = [u]
                    while cyc[-1] != v:
                        cyc.append(parent[cyc[-1]])
                    cyc.reverse()
                    return cyc + [v]
            if not advanced:
                color[u] = 2
                stack.pop()
    return None


@dataclass(frozen=True, eq=False)
class CliqueComplex:
    """Clique complex of a directed acyclic graph.

    ``simplices[k]`` lists the k-simplices ((k+1)-cliques), each stored as the
    vertex tuple sorted by the partial order; the list itself is in
    lexicographic order and doubles as the canonical basis of k-forms.
    """

    graph: Graph
    simplices: tuple[tuple[Simplex, ...], ...]
    rank: tuple[int, ...]
    adjacency: tuple[frozenset[int], ...]
    index: dict[Simplex, tuple[int, int]]
    capped: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def omega(self) -> int:
        """Size of the largest stored clique (the clique number unless capped)."""
        return len(self.simplices)

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices

    def cliques(self, size: int) -> tuple[Simplex, ...]:
        """k-cliques for ``size == k``; empty beyond the clique number."""
        if size < 1 or size > len(self.simplices):
            return ()
        return self.simplices[size - 1]

    def count(self, k: int) -> int:
        """Number of k-simplices."""
        return len(self.simplices[k]) if 0 <= k < len(self.simplices) else 0

    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def canonical(self, vertices: Iterable[int]) -> Simplex:
        return tuple(sorted(vertices, key=self.rank.__getitem__))

    def precedes(self, a: int, b: int) -> bool:
        """``a < b`` in the order induced by the orientation (for comparable vertices)."""
        return self.rank[a] < self.rank[b]

    def locate(self, t: Sequence[int]):
        """Return ``(position, sign)`` of an ordered tuple, or None off the complex.

        ``sign`` is the sign of the permutation taking the canonical tuple to ``t``.
        """
        t = tuple(t)
        if len(set(t)) != len(t):
            return None
        key = self.canonical(t)
        hit = self.index.get(key)
        if hit is None:
            return None
        perm = [key.index(v) for v in t]
        return hit[1], permutation_sign(perm)

    def position(self, simplex: Iterable[int]) -> int:
        key = self.canonical(simplex)
        hit = self.index.get(key)
        if hit is None:
            raise CliqueLookupError(f"{tuple(simplex)} is not a simplex of the complex")
        return hit[1]

    def faces(self, k: int) -> np.ndarray:
        """Integer array (N_k, k+1): column j is the position of the face omitting vertex j."""
        key = ("faces", k)
        if key not in self._cache:
            sims = self.simplices[k] if k < len(self.simplices) else ()
            arr = np.zeros((len(sims), k + 1), dtype=np.intp)
            if k > 0:
                lower = self.simplices[k - 1]
                pos = {s: i for i, s in enumerate(lower)}
                for r, s in enumerate(sims):
                    for j in range(k + 1):
                        arr[r, j] = pos[s[:j] + s[j + 1:]]
            self._cache[key] = arr
        return self._cache[key]

    def common_neighbors(self, simplex: Sequence[int]) -> set[int]:
        it = iter(simplex)
        common = set(self.adjacency[next(it)])
        for v in it:
            common &= self.adjacency[v]
        return common

    def cofaces(self, simplex: Sequence[int]) -> list[int]:
        """Vertices ``l`` with ``simplex + {l}`` a stored simplex, in increasing id."""
        k = len(simplex)
        if k >= len(self.simplices):
            return []
        return sorted(l for l in self.common_neighbors(simplex) if self.canonical((*simplex, l)) in self.index)


def build_complex(g: Graph, max_k: int | None = None) -> CliqueComplex:
    """Enumerate all cliques of ``g`` up to ``max_k`` vertices.

    Cliques are grown in rank order: a clique is only extended by vertices
    ranked above its last vertex and adjacent to all of its members, so each
    clique is produced once and already sorted.
    """
    rank = g.topological_rank()
    adj = g.adjacency()
    higher = [frozenset(w for w in adj[v] if rank[w] > rank[v]) for v in range(g.num_vertices)]
    by_rank = sorted(range(g.num_vertices), key=rank.__getitem__)

    levels: list[list[Simplex]] = []
    frontier = [((v,), higher[v]) for v in by_rank]
    capped = False
    while frontier:
        if max_k is not None and len(levels) >= max_k:
            capped = True
            break
        levels.append([c for c, _ in frontier])
        nxt = []
        for clique, cand in frontier:
            for w in sorted(cand, key=rank.__getitem__):
                nxt.append((clique + (w,), cand & higher[w]))
        frontier = nxt

    simplices = tuple(tuple(sorted(level)) for level in levels)
    index = {s: (k, i) for k, level in enumerate(simplices) for i, s in enumerate(level)}
    return CliqueComplex(g, simplices, rank, adj, index, capped)


def _as_stored(cx: CliqueComplex, simplex: Sequence[int]) -> tuple[Simplex, int]:
    key = cx.canonical(simplex)
    if key not in cx.index:
        raise CliqueLookupError(f"{tuple(simplex)} is not a simplex of the complex")
    return key, len(key) - 1


def clique_degree(cx: CliqueComplex, simplex: Sequence[int]) -> int:
    """Number of vertices ``l`` such that ``simplex + {l}`` is a stored clique."""
    key, _ = _as_stored(cx, simplex)
    return len(cx.cofaces(key))


def parallel_neighbors(cx: CliqueComplex, simplex: Sequence[int]) -> list[tuple[Simplex, int]]:
    """Parallel neighbours of a k-simplex with their incidence sign products.

    For k >= 1 these are the k-simplices sharing a (k-1)-face with ``simplex``
    but no (k+1)-simplex; the sign is ``eps(face, alpha) * eps(face, beta)``,
    where ``eps`` is (-1) to the position of the vertex dropped to reach the
    face. For k = 0 there are no (-1)-faces, so the neighbours are the adjacent
    vertices (sharing an edge) and the sign is -1.
    """
    alpha, k = _as_stored(cx, simplex)
    if k == 0:
        return [((l,), -1) for l in sorted(cx.adjacency[alpha[0]])]
    out = []
    aset = set(alpha)
    for j in range(k + 1):
        face = alpha[:j] + alpha[j + 1:]
        for l in cx.cofaces(face):
            if l in aset:
                continue
            if cx.canonical((*alpha, l)) in cx.index:
                continue
            beta = cx.canonical((*face, l))
            out.append((beta, (-1) ** j * (-1) ** beta.index(l)))
    out.sort()
    return out


@dataclass(frozen=True)
class SpanningForest:
    tree_edges: tuple[tuple[int, int], ...]
    roots: tuple[int, ...]
    parent: tuple[int, ...]
    depth: tuple[int, ...]
    component: tuple[int, ...]

    def contains(self, u: int, v: int) -> bool:
        return self.parent[v] == u or self.parent[u] == v


def spanning_forest(g: Graph) -> SpanningForest:
    """BFS forest, one tree per component rooted at its lowest vertex id.

    Neighbours are visited in increasing id. Tree edges are reported in the
    graph's own orientation.
    """
    n = g.num_vertices
    adj = g.adjacency()
    parent = [-1] * n
    depth = [0] * n
    comp = [-1] * n
    roots = []
    tree = set()
    for root in range(n):
        if comp[root] >= 0:
            continue
        cid = len(roots)
        roots.append(root)
        comp[root] = cid
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if comp[v] < 0:
                    comp[v] = cid
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    tree.add(frozenset((u, v)))
                    queue.append(v)
    tree_edges = tuple(e for e in g.edges if frozenset(e) in tree)
    return SpanningForest(tree_edges, tuple(roots), tuple(parent), tuple(depth), tuple(comp))


def tree_distance(forest: SpanningForest, i: int, j: int) -> int:
    """Number of edges on the forest path between ``i`` and ``j``."""
    if forest.component[i] != forest.component[j]:
        raise DistanceError(f"vertices {i} and {j} lie in different components")
    a, b = i, j
    dist = 0
    while forest.depth[a] > forest.depth[b]:
        a = forest.parent[a]
        dist += 1
    while forest.depth[b] > forest.depth[a]:
        b = forest.parent[b]
        dist += 1
    while a != b:
        a = forest.parent[a]
        b = forest.parent[b]
        dist += 2
    return dist


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi G(n, p) with the natural orientation."""
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.natural(n, edges)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.num_vertices
    return Graph(offset, tuple(edges))
