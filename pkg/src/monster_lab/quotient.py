"""Finitely presented quotients of free groups at desk scale.

Relators are read off labelled graphs, the classical C'(1/6) condition is
checked exactly, and Dehn's algorithm drives the word problem and the
construction of balls in the quotient Cayley graph.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .freegroup import Word, cyclic_reduce, free_reduce, inverse
from .graph import Graph, to_json_dict
from .labelling import Labelling, from_geometric
from .seeding import rng

SIXTH = 1 / 6
BALL_CAP = 200_000


def _rotations(w: Word) -> list[Word]:
    return [w[i:] + w[:i] for i in range(len(w))]


def canonical_relator(w: Word) -> Word:
    """Representative of w up to cyclic shift and inversion."""
    return min(_rotations(w) + _rotations(inverse(w)))


@dataclass(frozen=True)
class Presentation:
    k: int
    relators: tuple[Word, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        rels = []
        for r in self.relators:
            r = cyclic_reduce(r)
            if not r:
                raise ValueError("relators must be nontrivial")
            if any(x == 0 or abs(x) > self.k for x in r):
                raise ValueError(f"relator {r} uses letters outside +-1..+-{self.k}")
            rels.append(tuple(int(x) for x in r))
        object.__setattr__(self, "relators", tuple(rels))

    @cached_property
    def symmetrized(self) -> tuple[Word, ...]:
        """All cyclic shifts of all relators and their inverses."""
        out = set()
        for r in self.relators:
            out.update(_rotations(r))
            out.update(_rotations(inverse(r)))
        return tuple(sorted(out))

    @cached_property
    def lam(self) -> float:
        return small_cancellation_lambda(self)

    @property
    def is_c16(self) -> bool:
        return self.lam < SIXTH

    @cached_property
    def _rules(self) -> dict[int, dict[Word, Word]]:
        """length -> {subword more than half of a relator: shorter complement}."""
        rules: dict[int, dict[Word, Word]] = defaultdict(dict)
        for r in self.symmetrized:
            n = len(r)
            for m in range(n // 2 + 1, n + 1):
                rules[m].setdefault(r[:m], inverse(r[m:]))
        return dict(sorted(rules.items(), reverse=True))

    def to_json_dict(self) -> dict:
        return {"k": self.k, "relators": [list(r) for r in self.relators]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Presentation":
        return cls(int(data["k"]), tuple(tuple(r) for r in data["relators"]))

    @classmethod
    def load(cls, path: str | Path) -> "Presentation":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def surface_presentation(genus: int = 2) -> Presentation:
    """<a1, b1, ... | [a1, b1] ... [a_g, b_g]>."""
    word = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        word += [a, b, -a, -b]
    return Presentation(2 * genus, (tuple(word),))


def extract_relators(g: Graph, lab: Labelling) -> Presentation:
    """One relator per non-tree edge of the BFS tree from vertex 0.

    The fundamental-cycle labels normally generate the same normal subgroup
    as all closed-path labels.  Trivial relators are dropped; duplicates up
    to cyclic shift and inversion are merged.
    """
    if g.n == 0:
        return Presentation(lab.k, ())
    dist, parent = kernels.bfs(g.indptr, g.indices, 0)
    if (dist < 0).any():
        raise ValueError("graph must be connected")
    labels = lab.labels
    to_root: list[Word | None] = [None] * g.n  # label of the tree path root -> v
    to_root[0] = ()
    tree_edges = set()
    for v in np.argsort(dist, kind="stable")[1:].tolist():
        e = g.edge_between(int(parent[v]), v)
        tree_edges.add(e >> 1)
        to_root[v] = to_root[int(parent[v])] + (int(labels[e]),)
    found = {}
    for i in range(g.num_edges):
        if i in tree_edges:
            continue
        e = 2 * i
        u, v = int(g.src[e]), int(g.dst[e])
        word = cyclic_reduce(to_root[u] + (int(labels[e]),) + inverse(to_root[v]))
        if word:
            found.setdefault(canonical_relator(word), word)
    return Presentation(lab.k, tuple(found[key] for key in sorted(found)))


def _lcp(x: Word, y: Word) -> int:
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return n


def small_cancellation_lambda(p: Presentation) -> float:
    """max |piece| / |relator| over the symmetrized relators.

    A piece is a common prefix of two distinct symmetrized relators; in
    sorted order the longest one for each word is shared with a neighbour.
    """
    rs = p.symmetrized
    best = 0.0
    for i, r in enumerate(rs):
        longest = max(_lcp(r, rs[i - 1]) if i else 0,
                      _lcp(r, rs[i + 1]) if i + 1 < len(rs) else 0)
        best = max(best, longest / len(r))
    return best


def dehn_reduce(w: Iterable[int], p: Presentation) -> Word:
    """Replace more-than-half relator subwords by their shorter complements
    until none is left.  The result is freely reduced."""
    word = list(free_reduce(w))
    rules = p._rules
    changed = True
    while changed:
        changed = False
        for m, table in rules.items():
            if m > len(word):
                continue
            for i in range(len(word) - m + 1):
                repl = table.get(tuple(word[i:i + m]))
                if repl is not None:
                    word = list(free_reduce(word[:i] + list(repl) + word[i + m:]))
                    changed = True
                    break
            if changed:
                break
    return tuple(word)


def is_trivial(w: Iterable[int], p: Presentation) -> bool | None:
    """Word problem by Dehn's algorithm.

    Exact under C'(1/6).  Otherwise an empty Dehn form still proves
    triviality, and None means undecided.
    """
    reduced = dehn_reduce(w, p)
    if not reduced:
        return True
    return False if p.is_c16 else None


class _AbelianKey:
    """Image in Z^k modulo the relator exponent-sum lattice (echelon form)."""

    def __init__(self, p: Presentation):
        rows = [self.vector(r, p.k) for r in p.relators]
        basis = []
        for col in range(p.k):
            rows = [r for r in rows if any(r)]
            live = [r for r in rows if r[col]]
            while len(live) > 1:
                piv = min(live, key=lambda r: abs(r[col]))
                rows = [r if r is piv or not r[col] else
                        [a - (r[col] // piv[col]) * b for a, b in zip(r, piv)] for r in rows]
                live = [r for r in rows if r[col]]
            if live:
                piv = live[0] if live[0][col] > 0 else [-x for x in live[0]]
                basis.append((col, piv))
                rows = [r for r in rows if not r[col]]
        self.basis = basis
        self.k = p.k

    @staticmethod
    def vector(w: Sequence[int], k: int) -> list[int]:
        v = [0] * k
        for x in w:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v

    def __call__(self, w: Sequence[int]) -> tuple[int, ...]:
        v = self.vector(w, self.k)
        for col, row in self.basis:
            q = v[col] // row[col]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)


@dataclass
class QuotientBall:
    graph: Graph
    labelling: Labelling
    words: list[Word]  # a geodesic word per vertex; vertex 0 is the identity
    radius: int
    trusted_radius: int
    sphere_sizes: list[int] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return to_json_dict(self.graph, k=self.labelling.k,
                            labels=self.labelling.labels[0::2].tolist(),
                            words=[list(w) for w in self.words],
                            radius=self.radius, trusted_radius=self.trusted_radius)


def quotient_ball(p: Presentation, R: int, cap: int = BALL_CAP) -> QuotientBall:
    """Ball of radius R around the identity in Cay(F_k / <<relators>>, S).

    Vertices are found in BFS order.  A candidate word is identified with an
    existing vertex when Dehn's algorithm certifies their quotient trivial;
    only vertices at distance n - 1, n or n + 1 from the identity (n = |u|)
    with the same abelianized image are tried.
    """
    if R < 0:
        raise ValueError("R must be >= 0")
    if not p.is_c16:
        raise ValueError(f"presentation is not C'(1/6) (lambda = {p.lam:.4f}); "
                         "Dehn's algorithm cannot certify equality")
    key = _AbelianKey(p)
    letters = [*range(1, p.k + 1), *range(-1, -p.k - 1, -1)]
    words: list[Word] = [()]
    buckets: dict[tuple[int, ...], list[int]] = defaultdict(list)
    buckets[key(())].append(0)
    exact = {(): 0}
    spheres = [[0]]
    edges: dict[tuple[int, int], int] = {}  # (vertex, positive letter) -> target

    even = all(len(r) % 2 == 0 for r in p.relators)  # then word length has a parity

    def locate(w: Word, du: int) -> int | None:
        hit = exact.get(w)
        if hit is not None:
            return hit
        # u s lies at distance du - 1, du or du + 1 from the identity
        lengths = (du - 1, du + 1) if even else (du - 1, du, du + 1)
        for j in buckets.get(key(w), ()):
            if len(words[j]) in lengths and not dehn_reduce(w + inverse(words[j]), p):
                return j
        return None

    for n in range(R + 1):
        fresh = []
        for u in spheres[n]:
            for s in letters:
                w = free_reduce(words[u] + (s,))
                j = locate(w, n)
                if j is None and n < R:
                    j = len(words)
                    if j >= cap:
                        raise ValueError(f"ball exceeds the cap of {cap} vertices")
                    words.append(w)
                    exact[w] = j
                    buckets[key(w)].append(j)
                    fresh.append(j)
                if j is None:
                    continue
                exact.setdefault(w, j)
                if s > 0:
                    edges[(u, s)] = j
        if n < R:
            spheres.append(fresh)
    order = sorted(edges)
    g = Graph(len(words), [(u, edges[(u, s)]) for u, s in order])
    lab = from_geometric(g, p.k, [s for _, s in order])
    return QuotientBall(g, lab, words, R, R, [len(s) for s in spheres])


@dataclass
class ScaleReport:
    girth_scale: float
    annulus: tuple[int, int]
    forbidden_radius: int
    pairs: int
    found: int
    max_ratio: float | None
    mean_ratio: float | None
    beyond_trusted: bool


def measure_detour_profile(ball: QuotientBall, scales: Sequence[float], eps0: float = 0.125,
                           nu0: float = 0.05, center: int = 0, samples: int = 200,
                           seed: int = 0) -> list[ScaleReport]:
    """For each scale g, sample x1, x2 with eps0 g <= d(m, x_i) <= 2 eps0 g and
    look for an x1-x2 path inside the ball that misses B(m, floor(nu0 g)).

    Lengths are reported as multiples of g.  Purely empirical.
    """
    g = ball.graph
    dm = kernels.bfs(g.indptr, g.indices, center)[0]
    out = []
    for scale in scales:
        lo, hi = math.ceil(eps0 * scale), math.floor(2 * eps0 * scale)
        rho = math.floor(nu0 * scale)
        annulus = np.flatnonzero((dm >= lo) & (dm <= hi))
        beyond = hi > ball.trusted_radius - 1
        blocked = ((dm >= 0) & (dm <= rho)).astype(np.uint8)
        ratios = []
        pairs = 0
        if len(annulus):
            gen = rng(seed, "quotient-detour", int(round(scale * 1000)))
            for _ in range(samples):
                x1, x2 = (int(x) for x in gen.choice(annulus, size=2))
                if dm[x1] > dm[x2]:
                    x1, x2 = x2, x1
                pairs += 1
                d = kernels.bfs(g.indptr, g.indices, x1, blocked, -1, x2)[0][x2]
                if d >= 0:
                    ratios.append(d / scale)
        out.append(ScaleReport(
            girth_scale=scale, annulus=(lo, hi), forbidden_radius=rho, pairs=pairs,
            found=len(ratios), max_ratio=max(ratios) if ratios else None,
            mean_ratio=float(np.mean(ratios)) if ratios else None, beyond_trusted=beyond))
    return out
