"""Numba kernels for the enumeration and sampling hot loops.

Everything here is deliberately branch-light and allocation-free: exact
partition sums walk all 2^n spin configurations, and census/Glauber loops
touch 1e8-1e10 states in the larger experiments.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def gray_walk(indptr, indices, spins, n_low, hist, e_offset, energy, m_index):
    """Accumulate configuration counts per (magnetization, energy) level.

    Walks the 2^n_low spin configurations of the low bits in Gray-code
    order, updating the edge-sum energy in O(degree) per step.  `spins`
    holds the starting configuration (high bits preset by the caller);
    `energy` and `m_index` = (m+n)/2 must match it.  Loops contribute a
    constant to the energy and never change.
    """
    hist[m_index, energy + e_offset] += 1
    gray_prev = np.int64(0)
    total = np.int64(1) << n_low
    for it in range(1, total):
        g = it ^ (it >> 1)
        diff = g ^ gray_prev
        gray_prev = g
        v = 0
        while (diff >> v) & 1 == 0:
            v += 1
        s = spins[v]
        acc = 0
        for k in range(indptr[v], indptr[v + 1]):
            acc += spins[indices[k]]
        energy -= 2 * s * acc
        spins[v] = -s
        m_index -= s
        hist[m_index, energy + e_offset] += 1
    return energy, m_index


@njit(cache=True, nogil=True)
def count_cycles_dfs(indptr, indices, n, k_max, counts):
    """Count directed traversals of simple cycles, binned by length.

    Every cycle of length >= 3 is visited exactly twice (once per
    direction) from its minimal vertex; the caller halves the counts.
    Parallel edges appear as repeated CSR entries, so multiplicity
    products come out automatically.  `counts[i]` receives lengths i.
    """
    path = np.empty(k_max + 1, dtype=np.int64)
    eptr = np.empty(k_max + 1, dtype=np.int64)
    visited = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        path[0] = v
        eptr[0] = indptr[v]
        visited[v] = True
        depth = 1
        while depth > 0:
            u = path[depth - 1]
            advanced = False
            while eptr[depth - 1] < indptr[u + 1]:
                w = indices[eptr[depth - 1]]
                eptr[depth - 1] += 1
                if w == v:
                    if depth >= 3:
                        counts[depth] += 1
                    continue
                if w > v and not visited[w] and depth < k_max:
                    path[depth] = w
                    eptr[depth] = indptr[w]
                    visited[w] = True
                    depth += 1
                    advanced = True
                    break
            if not advanced:
                depth -= 1
                if depth > 0:
                    visited[path[depth]] = False
        visited[v] = False


@njit(cache=True, nogil=True)
def count_paths_dfs(indptr, indices, n, ell):
    """Count directed self-avoiding walks with exactly `ell` edges.

    Each undirected path is traversed twice, so the caller halves the
    result.  Parallel edges multiply counts; loops are absent from the CSR.
    """
    path = np.empty(ell + 1, dtype=np.int64)
    eptr = np.empty(ell + 1, dtype=np.int64)
    visited = np.zeros(n, dtype=np.bool_)
    total = np.int64(0)
    for v in range(n):
        path[0] = v
        eptr[0] = indptr[v]
        visited[v] = True
        depth = 1
        while depth > 0:
            u = path[depth - 1]
            advanced = False
            while eptr[depth - 1] < indptr[u + 1]:
                w = indices[eptr[depth - 1]]
                eptr[depth - 1] += 1
                if visited[w]:
                    continue
                if depth == ell:
                    total += 1
                    continue
                path[depth] = w
                eptr[depth] = indptr[w]
                visited[w] = True
                depth += 1
                advanced = True
                break
            if not advanced:
                depth -= 1
                if depth > 0:
                    visited[path[depth]] = False
        visited[v] = False
    return total


@njit(cache=True, nogil=True)
def glauber_advance(spins, indptr, indices, pflip, max_deg, verts, unifs,
                    m, energy, count, snap_counts, snap_pos, out_m, out_e):
    """Advance heat-bath Glauber by len(verts) single-site updates.

    pflip[(s+1)/2, S+max_deg] is the probability of flipping a spin s whose
    neighbor sum is S.  `count` is the global update counter; whenever it
    hits snap_counts[snap_pos], (m, energy) is recorded.  Returns the
    updated (m, energy, count, snap_pos).
    """
    n_snaps = len(snap_counts)
    for t in range(len(verts)):
        v = verts[t]
        s = spins[v]
        acc = 0
        for k in range(indptr[v], indptr[v + 1]):
            acc += spins[indices[k]]
        if unifs[t] < pflip[(s + 1) >> 1, acc + max_deg]:
            spins[v] = -s
            m -= 2 * s
            energy -= 2 * s * acc
        count += 1
        while snap_pos < n_snaps and count == snap_counts[snap_pos]:
            out_m[snap_pos] = m
            out_e[snap_pos] = energy
            snap_pos += 1
    return m, energy, count, snap_pos
