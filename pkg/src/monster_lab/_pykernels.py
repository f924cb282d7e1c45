"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built or ``MONSTER_LAB_PURE=1`` is set.
Each function returns exactly what its compiled twin returns.
"""

from collections import deque

import numpy as np


def bfs(indptr, indices, source, blocked=None, max_depth=-1, target=-1):
    n = len(indptr) - 1
    dist = [-1] * n
    parent = [-1] * n
    if blocked is not None and blocked[source]:
        return np.asarray(dist, dtype=np.int32), np.asarray(parent, dtype=np.int32)
    ptr = indptr.tolist()
    nbr = indices.tolist()
    blk = blocked.tolist() if blocked is not None else None
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u == target:
            break
        du = dist[u]
        if 0 <= max_depth <= du:
            continue
        for w in nbr[ptr[u]:ptr[u + 1]]:
            if dist[w] >= 0 or (blk is not None and blk[w]):
                continue
            dist[w] = du + 1
            parent[w] = u
            queue.append(w)
    return np.asarray(dist, dtype=np.int32), np.asarray(parent, dtype=np.int32)


def eccentricities(indptr, indices):
    n = len(indptr) - 1
    ptr = indptr.tolist()
    nbr = indices.tolist()
    adj = [nbr[ptr[u]:ptr[u + 1]] for u in range(n)]
    ecc = np.zeros(n, dtype=np.int32)
    for s in range(n):
        seen = {s}
        frontier = [s]
        depth = 0
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            if nxt:
                depth += 1
            frontier = nxt
        ecc[s] = depth if len(seen) == n else -1
    return ecc


def girth(indptr, indices, adj_edges):
    """Shortest closed non-backtracking cycle length, -1 for forests."""
    n = len(indptr) - 1
    ptr = indptr.tolist()
    nbr = indices.tolist()
    eid = adj_edges.tolist()
    best = -1
    for s in range(n):
        dist = {s: 0}
        pedge = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if best >= 0 and 2 * du >= best:
                break
            back = pedge[u] ^ 1 if pedge[u] >= 0 else -1
            for k in range(ptr[u], ptr[u + 1]):
                e = eid[k]
                if e == back:
                    continue
                w = nbr[k]
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    pedge[w] = e
                    queue.append(w)
                else:
                    cyc = du + dw + 1
                    if best < 0 or cyc < best:
                        best = cyc
    return best


def walk_hits(letters, start, radius):
    """First step at which the reduced length is <= radius, -1 if never."""
    out = np.full(letters.shape[0], -1, dtype=np.int32)
    init = start.tolist()
    for t, row in enumerate(letters.tolist()):
        stack = list(init)
        if len(stack) <= radius:
            out[t] = 0
            continue
        for i, l in enumerate(row):
            if stack and stack[-1] == -l:
                stack.pop()
            else:
                stack.append(l)
            if len(stack) <= radius:
                out[t] = i + 1
                break
    return out


def walk_lengths(letters, start):
    stack = start.tolist()
    lengths = [len(stack)]
    for l in letters.tolist():
        if stack and stack[-1] == -l:
            stack.pop()
        else:
            stack.append(l)
        lengths.append(len(stack))
    return np.asarray(lengths, dtype=np.int32), np.asarray(stack, dtype=np.int8)


def window_presence(codes, ell, base):
    """Mark every base-``base`` integer spelled by a length-``ell`` window."""
    size = base ** ell
    seen = np.zeros(size, dtype=np.uint8)
    n = len(codes)
    if n < ell:
        return seen
    weights = base ** np.arange(ell - 1, -1, -1, dtype=np.int64)
    windows = np.lib.stride_tricks.sliding_window_view(codes.astype(np.int64), ell)
    seen[windows @ weights] = 1
    return seen
