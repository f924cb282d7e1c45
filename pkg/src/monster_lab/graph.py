"""Finite multigraphs in Serre form and their combinatorial invariants.

Every geometric edge ``i`` joining ``u`` and ``v`` is stored as two oriented
edges: ``2*i`` (u -> v) and ``2*i + 1`` (v -> u).  Inversion is therefore
``e ^ 1``, a fixed-point-free involution even for loops.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels

CHEEGER_EXACT_CAP = 20
DENSE_EIG_CAP = 1500


class Graph:
    """Immutable undirected multigraph on vertices ``0..n-1``."""

    __slots__ = ("n", "src", "dst", "indptr", "indices", "adj_edges", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size and pairs.min() < 0:
            raise ValueError("vertex ids must be nonnegative")
        if pairs.size:
            n = max(n, int(pairs.max()) + 1)
        self.n = int(n)
        src = np.empty(2 * len(pairs), dtype=np.int32)
        dst = np.empty(2 * len(pairs), dtype=np.int32)
        src[0::2], dst[0::2] = pairs[:, 0], pairs[:, 1]
        src[1::2], dst[1::2] = pairs[:, 1], pairs[:, 0]
        order = np.lexsort((np.arange(len(src)), src))
        self.src = src
        self.dst = dst
        self.adj_edges = order.astype(np.int32)
        self.indices = dst[order].astype(np.int32)
        counts = np.bincount(src, minlength=self.n)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        for arr in (self.src, self.dst, self.adj_edges, self.indices, self.indptr):
            arr.setflags(write=False)
        self._hash = None

    @property
    def num_edges(self) -> int:
        """Number of geometric edges."""
        return len(self.src) // 2

    @property
    def num_oriented_edges(self) -> int:
        return len(self.src)

    def edge_list(self) -> list[tuple[int, int]]:
        return list(zip(self.src[0::2].tolist(), self.dst[0::2].tolist()))

    def inverse(self, e: int) -> int:
        return e ^ 1

    def source(self, e: int) -> int:
        return int(self.src[e])

    def target(self, e: int) -> int:
        return int(self.dst[e])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def out_edges(self, v: int) -> np.ndarray:
        return self.adj_edges[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def is_regular(self) -> bool:
        deg = self.degrees()
        return self.n > 0 and bool((deg == deg[0]).all())

    def is_simple(self) -> bool:
        u, v = self.src[0::2].astype(np.int64), self.dst[0::2].astype(np.int64)
        if (u == v).any():
            return False
        key = np.minimum(u, v) * self.n + np.maximum(u, v)
        return len(np.unique(key)) == len(key)

    def edge_between(self, u: int, v: int) -> int:
        """Lowest oriented edge id from ``u`` to ``v``."""
        for k in range(self.indptr[u], self.indptr[u + 1]):
            if self.indices[k] == v:
                return int(self.adj_edges[k])
        raise ValueError(f"no edge {u} -> {v}")

    def path_edges(self, vertices: Sequence[int]) -> list[int]:
        return [self.edge_between(a, b) for a, b in zip(vertices, vertices[1:])]

    def is_path(self, vertices: Sequence[int]) -> bool:
        try:
            self.path_edges(vertices)
        except ValueError:
            return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.src.tobytes(), self.dst.tobytes()))
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class GraphStats:
    vertices: int
    edges: int
    max_degree: int
    girth: float
    diameter: float
    cheeger_exact: Fraction | None
    cheeger_lower_bound: float

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices,
            "edges": self.edges,
            "max_degree": self.max_degree,
            "girth": _json_number(self.girth),
            "diameter": _json_number(self.diameter),
            "cheeger_exact": None if self.cheeger_exact is None else float(self.cheeger_exact),
            "cheeger_bound": self.cheeger_lower_bound,
        }


def _json_number(x):
    return None if x == math.inf else int(x)


def build_graph(edge_list: Iterable[tuple[int, int]], n_vertices: int = 0) -> Graph:
    """Build a Serre-form graph; loops and multi-edges are kept."""
    return Graph(n_vertices, edge_list)


def subdivide(g: Graph, j: int) -> Graph:
    """Replace every edge by a path of ``j`` edges.

    New vertices for edge ``i`` are ``n + i*(j-1) .. n + (i+1)*(j-1) - 1``.
    """
    if j < 1:
        raise ValueError("subdivision parameter must be >= 1")
    if j == 1:
        return Graph(g.n, g.edge_list())
    edges = []
    nxt = g.n
    for u, v in g.edge_list():
        chain = [u, *range(nxt, nxt + j - 1), v]
        nxt += j - 1
        edges.extend(zip(chain, chain[1:]))
    return Graph(nxt, edges)


def distances(g: Graph, source: int, blocked: np.ndarray | None = None,
              max_depth: int = -1) -> np.ndarray:
    """BFS distances from ``source`` (-1 = unreachable)."""
    return kernels.bfs(g.indptr, g.indices, source, blocked, max_depth, -1)[0]


def shortest_path(g: Graph, source: int, target: int,
                  blocked: np.ndarray | None = None) -> list[int] | None:
    """Vertex list of a BFS shortest path avoiding ``blocked``, or None."""
    dist, parent = kernels.bfs(g.indptr, g.indices, source, blocked, -1, target)
    if dist[target] < 0:
        return None
    path = [target]
    while path[-1] != source:
        path.append(int(parent[path[-1]]))
    return path[::-1]


def ball(g: Graph, center: int, r: int) -> dict[int, int]:
    """Closed ball as a vertex -> distance map; empty for negative radius."""
    if not 0 <= center < g.n:
        raise ValueError(f"invalid vertex {center}")
    if r < 0:
        return {}
    dist = distances(g, center, max_depth=int(r))
    idx = np.flatnonzero(dist >= 0)
    return dict(zip(idx.tolist(), dist[idx].tolist()))


def ball_mask(g: Graph, center: int, r: int) -> np.ndarray:
    """Boolean membership array of the closed ball (all False if r < 0)."""
    mask = np.zeros(g.n, dtype=np.uint8)
    if r >= 0:
        mask[distances(g, center, max_depth=int(r)) >= 0] = 1
    return mask


def is_connected(g: Graph) -> bool:
    return g.n == 0 or bool((distances(g, 0) >= 0).all())


def girth(g: Graph) -> float:
    """Length of the shortest cycle (loops 1, parallel pairs 2); inf for forests."""
    val = kernels.girth(g.indptr, g.indices, g.adj_edges)
    return math.inf if val < 0 else int(val)


def eccentricities(g: Graph) -> np.ndarray:
    return kernels.eccentricities(g.indptr, g.indices)


def diameter(g: Graph) -> float:
    if g.n == 0:
        return 0
    ecc = eccentricities(g)
    return math.inf if (ecc < 0).any() else int(ecc.max())


def cheeger_exact(g: Graph, cap: int = CHEEGER_EXACT_CAP) -> Fraction:
    """min |dA| / min(|A|, |V-A|) over proper nonempty vertex subsets A."""
    n = g.n
    if n > cap:
        raise ValueError(
            f"exact Cheeger constant refused for {n} > {cap} vertices; "
            "use cheeger_lower_bound instead"
        )
    if n < 2:
        raise ValueError("Cheeger constant needs at least two vertices")
    nbr_mask = np.zeros(n, dtype=np.uint32)
    for u, v in g.edge_list():
        nbr_mask[u] |= np.uint32(1 << v)
        nbr_mask[v] |= np.uint32(1 << u)
    subsets = np.arange(1, (1 << n) - 1, dtype=np.uint32)
    reach = np.zeros_like(subsets)
    for v in range(n):
        hit = (subsets >> np.uint32(v)) & np.uint32(1)
        reach |= hit * nbr_mask[v]
    boundary = np.bitwise_count(reach & ~subsets).astype(np.int64)
    size = np.bitwise_count(subsets).astype(np.int64)
    small = np.minimum(size, n - size)
    best = int(np.argmin(boundary / small))
    return Fraction(int(boundary[best]), int(small[best]))


def laplacian_gap(g: Graph) -> float:
    """Second-smallest eigenvalue of the combinatorial Laplacian D - A."""
    from scipy import sparse
    from scipy.sparse.linalg import eigsh

    if g.n < 2:
        return 0.0
    rows = g.src.astype(np.int64)
    cols = g.dst.astype(np.int64)
    adj = sparse.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n)).tocsr()
    lap = sparse.diags(np.asarray(adj.sum(axis=1)).ravel()) - adj
    if g.n <= DENSE_EIG_CAP:
        vals = np.linalg.eigvalsh(lap.toarray())
    else:
        v0 = np.random.default_rng(0).standard_normal(g.n)  # fixed start: reproducible runs
        vals = eigsh(lap.tocsc(), k=2, sigma=-1e-2, which="LM", tol=1e-12, v0=v0,
                     return_eigenvectors=False)
    return float(np.sort(vals)[1])


def cheeger_lower_bound(g: Graph, rel_tol: float = 1e-9) -> float:
    """Certified lower bound lambda_2(L) / (2 * max_degree) for h(g).

    Edge expansion is at least lambda_2(L)/2 and each outer boundary vertex
    absorbs at most ``max_degree`` crossing edges.  Works for non-regular
    graphs (e.g. subdivisions).
    """
    if g.n < 2:
        return 0.0
    d = g.max_degree()
    gap = laplacian_gap(g) - rel_tol * 2 * d
    return max(0.0, gap) / (2 * d)


def graph_stats(g: Graph, exact_cap: int = CHEEGER_EXACT_CAP,
                with_cheeger: bool = True) -> GraphStats:
    exact = cheeger_exact(g, exact_cap) if with_cheeger and 2 <= g.n <= exact_cap else None
    bound = cheeger_lower_bound(g) if with_cheeger else 0.0
    if exact is not None:
        bound = min(float(exact), bound)
    return GraphStats(
        vertices=g.n,
        edges=g.num_edges,
        max_degree=g.max_degree(),
        girth=girth(g),
        diameter=diameter(g),
        cheeger_exact=exact,
        cheeger_lower_bound=bound,
    )


# -- small families -------------------------------------------------------

def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def torus(n: int, m: int | None = None) -> Graph:
    """Cayley graph of Z/n x Z/m with the standard generators; vertex x*m + y."""
    m = n if m is None else m
    edges = []
    for x in range(n):
        for y in range(m):
            v = x * m + y
            edges.append((v, ((x + 1) % n) * m + y))
            edges.append((v, x * m + (y + 1) % m))
    return Graph(n * m, edges)


def random_connected_graph(n: int, extra_edges: int, rng: np.random.Generator,
                           simple: bool = True) -> Graph:
    """Random spanning tree plus ``extra_edges`` further edges."""
    edges = [(int(rng.integers(i)), i) for i in range(1, n)]
    present = {frozenset(e) for e in edges}
    attempts = 0
    while extra_edges > 0 and attempts < 50 * (extra_edges + 1):
        attempts += 1
        u, v = (int(x) for x in rng.integers(n, size=2))
        if simple and (u == v or frozenset((u, v)) in present):
            continue
        present.add(frozenset((u, v)))
        edges.append((u, v))
        extra_edges -= 1
    perm = rng.permutation(n)
    return Graph(n, [(int(perm[u]), int(perm[v])) for u, v in edges])


# -- serialization --------------------------------------------------------

def to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines += [f"{u} {v}" for u, v in g.edge_list()]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Graph:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    n, m = int(rows[0][0]), int(rows[0][1])
    edges = [(int(a), int(b)) for a, b in rows[1:]]
    if len(edges) != m:
        raise ValueError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, edges)


def to_json_dict(g: Graph, **extra) -> dict:
    return {"vertices": g.n, "edges": [list(e) for e in g.edge_list()], **extra}


def from_json_dict(data: dict) -> Graph:
    return Graph(int(data["vertices"]), [tuple(e) for e in data["edges"]])


def load_graph(path: str | Path) -> Graph:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return from_json_dict(json.loads(text))
    return from_text(text)
