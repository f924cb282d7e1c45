# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.int8_t i8
ctypedef cnp.uint8_t u8


def bfs(const i64[::1] indptr, const i32[::1] indices, Py_ssize_t source,
        const u8[::1] blocked=None, Py_ssize_t max_depth=-1,
        Py_ssize_t target=-1):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    parent_arr = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = dist_arr
    cdef i32[::1] parent = parent_arr
    if blocked is not None and blocked[source]:
        return dist_arr, parent_arr
    cdef i32* queue = <i32*> malloc(n * sizeof(i32))
    cdef Py_ssize_t head = 0, tail = 0, u, w, k
    cdef bint has_block = blocked is not None
    dist[source] = 0
    queue[tail] = <i32> source
    tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            if u == target:
                break
            if max_depth >= 0 and dist[u] >= max_depth:
                continue
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if dist[w] >= 0:
                    continue
                if has_block and blocked[w]:
                    continue
                dist[w] = dist[u] + 1
                parent[w] = <i32> u
                queue[tail] = <i32> w
                tail += 1
    free(queue)
    return dist_arr, parent_arr


def eccentricities(const i64[::1] indptr, const i32[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    ecc_arr = np.zeros(n, dtype=np.int32)
    cdef i32[::1] ecc = ecc_arr
    cdef i32* dist = <i32*> malloc(max(n, 1) * sizeof(i32))
    cdef i32* queue = <i32*> malloc(max(n, 1) * sizeof(i32))
    cdef Py_ssize_t s, i, head, tail, u, w, k
    with nogil:
        for s in range(n):
            for i in range(n):
                dist[i] = -1
            dist[s] = 0
            queue[0] = <i32> s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    w = indices[k]
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        queue[tail] = <i32> w
                        tail += 1
            if tail < n:
                ecc[s] = -1
            else:
                ecc[s] = dist[queue[tail - 1]]
    free(dist)
    free(queue)
    return ecc_arr


def girth(const i64[::1] indptr, const i32[::1] indices, const i32[::1] adj_edges):
    """Shortest closed non-backtracking cycle length, -1 for forests."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i32* dist = <i32*> malloc(max(n, 1) * sizeof(i32))
    cdef i32* pedge = <i32*> malloc(max(n, 1) * sizeof(i32))
    cdef i32* queue = <i32*> malloc(max(n, 1) * sizeof(i32))
    cdef Py_ssize_t s, i, head, tail, u, w, k
    cdef i32 e
    cdef long best = -1, cyc
    for i in range(n):
        dist[i] = -1
    with nogil:
        for s in range(n):
            dist[s] = 0
            pedge[s] = -1
            queue[0] = <i32> s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                if best >= 0 and 2 * dist[u] >= best:
                    break
                for k in range(indptr[u], indptr[u + 1]):
                    e = adj_edges[k]
                    if pedge[u] >= 0 and e == (pedge[u] ^ 1):
                        continue
                    w = indices[k]
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        pedge[w] = e
                        queue[tail] = <i32> w
                        tail += 1
                    else:
                        cyc = dist[u] + dist[w] + 1
                        if best < 0 or cyc < best:
                            best = cyc
            for i in range(tail):
                dist[queue[i]] = -1
    free(dist)
    free(pedge)
    free(queue)
    return best


def walk_hits(const i8[:, ::1] letters, const i8[::1] start, Py_ssize_t radius):
    """First step at which the reduced length is <= radius, -1 if never."""
    cdef Py_ssize_t trials = letters.shape[0], T = letters.shape[1]
    cdef Py_ssize_t s = start.shape[0]
    out_arr = np.full(trials, -1, dtype=np.int32)
    cdef i32[::1] out = out_arr
    cdef i8* stack = <i8*> malloc((s + T + 1) * sizeof(i8))
    cdef Py_ssize_t t, i, top
    cdef i8 l
    with nogil:
        for t in range(trials):
            for i in range(s):
                stack[i] = start[i]
            top = s
            if top <= radius:
                out[t] = 0
                continue
            for i in range(T):
                l = letters[t, i]
                if top > 0 and stack[top - 1] == -l:
                    top -= 1
                else:
                    stack[top] = l
                    top += 1
                if top <= radius:
                    out[t] = <i32> (i + 1)
                    break
    free(stack)
    return out_arr


def walk_lengths(const i8[::1] letters, const i8[::1] start):
    cdef Py_ssize_t T = letters.shape[0], s = start.shape[0]
    lengths_arr = np.zeros(T + 1, dtype=np.int32)
    stack_arr = np.zeros(s + T, dtype=np.int8)
    cdef i32[::1] lengths = lengths_arr
    cdef i8[::1] stack = stack_arr
    cdef Py_ssize_t i, top = s
    cdef i8 l
    for i in range(s):
        stack[i] = start[i]
    lengths[0] = <i32> top
    with nogil:
        for i in range(T):
            l = letters[i]
            if top > 0 and stack[top - 1] == -l:
                top -= 1
            else:
                stack[top] = l
                top += 1
            lengths[i + 1] = <i32> top
    return lengths_arr, stack_arr[:top].copy()


def window_presence(const i32[::1] codes, Py_ssize_t ell, Py_ssize_t base):
    """Mark every base-``base`` integer spelled by a length-``ell`` window."""
    cdef Py_ssize_t n = codes.shape[0], i
    cdef i64 size = 1, code = 0
    for i in range(ell):
        size *= base
    seen_arr = np.zeros(size, dtype=np.uint8)
    cdef u8[::1] seen = seen_arr
    if n < ell:
        return seen_arr
    with nogil:
        for i in range(ell):
            code = code * base + codes[i]
        seen[code] = 1
        for i in range(ell, n):
            code = (code * base + codes[i]) % size
            seen[code] = 1
    return seen_arr
