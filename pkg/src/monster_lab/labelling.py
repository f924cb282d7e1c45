"""Uniform i.i.d. S-labellings of graphs and word combinatorics on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .freegroup import Word, letters_from_codes
from .graph import Graph, distances
from .seeding import rng


@dataclass(frozen=True)
class Alphabet:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("alphabet needs k >= 1 generators")

    @property
    def letters(self) -> tuple[int, ...]:
        return (*range(1, self.k + 1), *range(-1, -self.k - 1, -1))

    @property
    def size(self) -> int:
        return 2 * self.k

    def code(self, letter: int) -> int:
        """Position of ``letter`` in :attr:`letters`."""
        return letter - 1 if letter > 0 else self.k - 1 - letter

    def codes(self, word: Sequence[int]) -> np.ndarray:
        w = np.asarray(word, dtype=np.int32)
        return np.where(w > 0, w - 1, self.k - 1 - w).astype(np.int32)

    def decode(self, code: int, length: int) -> Word:
        digits = []
        for _ in range(length):
            code, d = divmod(code, self.size)
            digits.append(d)
        return tuple(int(x) for x in letters_from_codes(np.array(digits[::-1]), self.k))


@dataclass(frozen=True, eq=False)
class Labelling:
    graph: Graph
    k: int
    labels: np.ndarray  # per oriented edge
    seed: int | None = None

    def __post_init__(self):
        self.labels.setflags(write=False)

    def label(self, e: int) -> int:
        return int(self.labels[e])

    def check(self) -> None:
        """Raise if the labelling breaks label(e^-1) = label(e)^-1."""
        lab = self.labels.astype(np.int64)
        if len(lab) != self.graph.num_oriented_edges:
            raise ValueError("one label per oriented edge required")
        if (lab[0::2] != -lab[1::2]).any():
            raise ValueError("labelling is not inversion-consistent")
        if (lab == 0).any() or (np.abs(lab) > self.k).any():
            raise ValueError("labels must lie in +-1..+-k")

    def to_json_dict(self) -> dict:
        return {"seed": self.seed, "k": self.k, "labels": self.labels[0::2].tolist()}

    @classmethod
    def from_json_dict(cls, g: Graph, data: dict) -> "Labelling":
        return from_geometric(g, int(data["k"]), data["labels"], data.get("seed"))


def from_geometric(g: Graph, k: int, labels: Sequence[int], seed: int | None = None) -> Labelling:
    """Labelling from one letter per geometric edge (the u->v orientation)."""
    geo = np.asarray(labels, dtype=np.int8)
    if len(geo) != g.num_edges:
        raise ValueError("need one label per geometric edge")
    full = np.empty(2 * len(geo), dtype=np.int8)
    full[0::2] = geo
    full[1::2] = -geo
    lab = Labelling(g, k, full, seed)
    lab.check()
    return lab


def random_labelling(g: Graph, alphabet: Alphabet | int, seed: int) -> Labelling:
    """One uniform letter per geometric edge, inverted on the reverse edge."""
    k = alphabet.k if isinstance(alphabet, Alphabet) else int(alphabet)
    codes = rng(seed, "labelling").integers(0, 2 * k, size=g.num_edges)
    return from_geometric(g, k, letters_from_codes(codes, k), seed)


def read_label(lab: Labelling, path: Sequence[int]) -> Word:
    """Unreduced word read along a sequence of oriented edges."""
    g = lab.graph
    for a, b in zip(path, path[1:]):
        if g.dst[a] != g.src[b]:
            raise ValueError(f"edges {a} and {b} are not consecutive")
    return tuple(int(lab.labels[e]) for e in path)


def read_vertex_path(lab: Labelling, vertices: Sequence[int]) -> Word:
    return read_label(lab, lab.graph.path_edges(vertices))


def longest_simple_path(g: Graph, budget: int = 200_000, seed: int = 0,
                        start: int | None = None) -> list[int]:
    """Long simple path by randomized backtracking DFS.

    Neighbours with fewer unvisited neighbours are tried first (Warnsdorff
    rule).  Restarts from fresh random vertices until ``budget`` vertex
    expansions are used or a Hamiltonian path is found.  No optimality claim.
    """
    if g.n == 0:
        return []
    gen = rng(seed, "simple-path")
    adj = [sorted(set(g.neighbors(v).tolist()) - {v}) for v in range(g.n)]
    starts = [start] if start is not None else gen.permutation(g.n).tolist()
    best: list[int] = [starts[0]]
    used = 0
    for s in starts:
        if used >= budget or len(best) == g.n:
            break
        on_path = np.zeros(g.n, dtype=bool)
        free_deg = np.array([len(a) for a in adj])
        path = [s]
        on_path[s] = True
        for w in adj[s]:
            free_deg[w] -= 1

        def candidates(u):
            opts = [w for w in adj[u] if not on_path[w]]
            keys = gen.random(len(opts))
            return sorted(opts, key=lambda w: (free_deg[w], keys[opts.index(w)]), reverse=True)

        stack = [candidates(s)]
        while stack and used < budget:
            if not stack[-1]:
                stack.pop()
                u = path.pop()
                on_path[u] = False
                for w in adj[u]:
                    free_deg[w] += 1
                continue
            w = stack[-1].pop()
            if on_path[w]:
                continue
            used += 1
            path.append(w)
            on_path[w] = True
            for x in adj[w]:
                free_deg[x] -= 1
            if len(path) > len(best):
                best = list(path)
                if len(best) == g.n:
                    break
            stack.append(candidates(w))
    return best


def window_words(alphabet: Alphabet, word: Sequence[int], ell: int) -> np.ndarray:
    """Presence mask over all (2k)^ell words as length-ell subwords of ``word``."""
    return kernels.window_presence(alphabet.codes(word), ell, alphabet.size)


@dataclass
class Coverage:
    covered: bool
    missing: list[Word]
    present: int
    total: int


def coverage_check(lab: Labelling, ell: int, path: Sequence[int],
                   list_missing: bool = True) -> Coverage:
    """Which length-``ell`` words appear along a simple vertex path (either direction).

    ``covered`` certifies that every word of length ``ell`` labels a simple
    path; ``not covered`` is inconclusive.
    """
    if ell <= 0:
        raise ValueError("word length must be positive")
    if len(set(path)) != len(path):
        raise ValueError("path must be simple")
    alphabet = Alphabet(lab.k)
    word = read_vertex_path(lab, path)
    seen = window_words(alphabet, word, ell)
    back = tuple(-x for x in reversed(word))
    seen |= window_words(alphabet, back, ell)
    absent = np.flatnonzero(seen == 0)
    missing = [alphabet.decode(int(c), ell) for c in absent] if list_missing else []
    return Coverage(covered=len(absent) == 0, missing=missing,
                    present=int(seen.sum()), total=len(seen))


def missing_word_log_bound(n: int, k: int, r: float) -> float:
    """Natural log of (2k)^l (1 - (2k)^-l)^floor(n/l), l = floor(r ln n)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    ell = math.floor(r * math.log(n))
    if ell < 1:
        raise ValueError(f"floor(r ln n) = {ell} < 1")
    q = 2 * k
    return ell * math.log(q) + (n // ell) * math.log1p(-(q ** -ell))


def missing_word_bound(n: int, k: int, r: float) -> float:
    """Union bound on P(some word of length floor(r ln n) is missing), clamped to [0, 1]."""
    return math.exp(min(0.0, missing_word_log_bound(n, k, r)))


def missing_word_frequency(n: int, k: int, r: float, trials: int, seed: int) -> tuple[int, int]:
    """(trials with a missing word, trials) for uniform random words of length n."""
    ell = math.floor(r * math.log(n))
    if ell < 1:
        raise ValueError(f"floor(r ln n) = {ell} < 1")
    misses = 0
    for t in range(trials):
        codes = rng(seed, "missing-word", n, t).integers(0, 2 * k, size=n, dtype=np.int32)
        seen = kernels.window_presence(codes, ell, 2 * k)
        misses += not seen.all()
    return misses, trials


def find_null_labelled_geodesic(g: Graph, lab: Labelling, maxlen: int) -> list[int] | None:
    """A geodesic vertex path of length 1..maxlen whose label is freely trivial.

    Non-backtracking walks are enumerated with the reduced label kept on a
    stack; a walk is abandoned once its stack is longer than the steps left.
    """
    out = [g.out_edges(v).tolist() for v in range(g.n)]
    labels = lab.labels.tolist()
    targets = g.dst.tolist()
    stack: list[int] = []
    path: list[int] = []

    def search(v: int, back: int, depth: int, dist: np.ndarray) -> list[int] | None:
        for e in out[v]:
            if e == back:
                continue
            letter = labels[e]
            cancel = bool(stack) and stack[-1] == -letter
            if len(stack) + (-1 if cancel else 1) > maxlen - depth - 1:
                continue
            w = targets[e]
            if cancel and len(stack) == 1 and dist[w] == depth + 1:
                return path + [w]
            if depth + 1 == maxlen:
                continue
            if cancel:
                stack.pop()
            else:
                stack.append(letter)
            path.append(w)
            found = search(w, e ^ 1, depth + 1, dist)
            path.pop()
            if cancel:
                stack.append(-letter)
            else:
                stack.pop()
            if found:
                return found
        return None

    for s in range(g.n):
        dist = distances(g, s, max_depth=maxlen)
        path[:] = [s]
        found = search(s, -1, 0, dist)
        if found:
            return found
    return None
