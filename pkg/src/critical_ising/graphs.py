"""Random multigraph models: the d-regular configuration model and G(n, d/n).

A :class:`MultiGraph` is an immutable edge list on ``n`` vertices; loops and
parallel edges are allowed (the configuration model produces both, and they
carry the short-cycle statistics everything downstream conditions on).
Edge lists are canonicalized so that structural equality is list equality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .rng import generator

REGULAR = "regular"
ER = "er"


class MultiGraph:
    """Sparse undirected multigraph stored as a canonical edge list.

    Edges are (u, v) with u <= v, sorted lexicographically; repeats encode
    parallel edges and u == v encodes a loop (contributing 2 to the degree).
    Instances are immutable after construction and safe to share across
    threads.
    """

    def __init__(self, n: int, edges) -> None:
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges) and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range [0, n)")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        order = np.lexsort((hi, lo))
        canon = np.stack([lo[order], hi[order]], axis=1)
        canon.setflags(write=False)
        self.n = int(n)
        self.edges = canon
        self._csr = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def loop_count(self) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    def degrees(self) -> np.ndarray:
        """Per-vertex degree; loops count twice."""
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def is_simple(self) -> bool:
        if self.loop_count:
            return False
        if len(self.edges) < 2:
            return True
        return bool((np.diff(self.edges, axis=0) != 0).any(axis=1).all())

    def adjacency_csr(self):
        """CSR adjacency over non-loop edges, parallel edges repeated.

        Returns (indptr, indices, n_loops); cached, read-only.
        """
        if self._csr is None:
            e = self.edges
            nonloop = e[e[:, 0] != e[:, 1]]
            n_loops = len(e) - len(nonloop)
            src = np.concatenate([nonloop[:, 0], nonloop[:, 1]])
            dst = np.concatenate([nonloop[:, 1], nonloop[:, 0]])
            order = np.argsort(src, kind="stable")
            indices = dst[order].astype(np.int64)
            counts = np.bincount(src, minlength=self.n)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            indices.setflags(write=False)
            indptr.setflags(write=False)
            self._csr = (indptr, indices, n_loops)
        return self._csr

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiGraph)
            and self.n == other.n
            and np.array_equal(self.edges, other.edges)
        )

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, edges={self.edge_count})"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": self.edges.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "MultiGraph":
        doc = json.loads(text)
        return cls(doc["n"], doc["edges"])

    def to_edgelist(self) -> str:
        """Plain-text interop format: one "u v" pair per line."""
        return "".join(f"{u} {v}\n" for u, v in self.edges.tolist())

    @classmethod
    def from_edgelist(cls, text: str, n: int | None = None) -> "MultiGraph":
        pairs = [tuple(map(int, line.split())) for line in text.splitlines() if line.strip()]
        if n is None:
            n = 1 + max((max(p) for p in pairs), default=-1)
        return cls(n, pairs)


@dataclass(frozen=True)
class ModelSpec:
    """Which random graph model, and its parameters."""

    kind: str
    n: int
    d: float

    def __post_init__(self):
        if self.kind not in (REGULAR, ER):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.kind == REGULAR:
            if self.d != int(self.d) or self.d < 3:
                raise ValueError("regular model requires integer d >= 3")
            if (self.n * int(self.d)) % 2 != 0:
                raise ValueError("regular model requires n*d even")
        else:
            if not 1.0 < self.d < self.n:
                raise ValueError("ER model requires 1 < d < n")

    def sample(self, seed: int) -> MultiGraph:
        if self.kind == REGULAR:
            return gen_config_model(self.n, int(self.d), seed)
        return gen_er(self.n, self.d, seed)


def gen_config_model(n: int, d: int, seed: int) -> MultiGraph:
    """d-regular configuration model: uniform perfect matching of n*d half-edges.

    Loops and parallel edges are retained.  Deterministic given the seed.
    """
    if d != int(d) or d < 3:
        raise ValueError("configuration model requires integer d >= 3")
    d = int(d)
    if n < 2:
        raise ValueError("need n >= 2")
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d = {n * d} is odd; no perfect matching of half-edges exists")
    rng = generator(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    rng.shuffle(stubs)
    return MultiGraph(n, stubs.reshape(-1, 2))


def _pair_index_decode(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the ranking of pairs (i, j), i < j, ordered lexicographically.

    Rank of (i, j) is i*(2n - i - 1)/2 + (j - i - 1).  Float solve plus an
    integer fix-up keeps the decode exact for n up to ~1e9.
    """
    k = k.astype(np.int64)
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * k)) / 2.0).astype(np.int64)
    # fix-up against float rounding at row boundaries
    for _ in range(2):
        row_start = i * (2 * n - i - 1) // 2
        i = np.where(row_start > k, i - 1, i)
        row_next = (i + 1) * (2 * n - i - 2) // 2
        i = np.where(k >= row_next, i + 1, i)
    row_start = i * (2 * n - i - 1) // 2
    j = k - row_start + i + 1
    return i, j


def gen_er(n: int, d: float, seed: int) -> MultiGraph:
    """Erdos-Renyi G(n, d/n): each pair independently present with probability d/n.

    Sampled sparsely (edge count then uniform distinct pairs), so n = 1e5 is cheap.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < d < n:
        raise ValueError(f"need 0 < d < n, got d={d}, n={n}")
    rng = generator(seed)
    p = d / n
    n_pairs = n * (n - 1) // 2
    m = rng.binomial(n_pairs, p)
    # uniform m distinct pair ranks; duplicates are rare at sparse density
    ranks = np.unique(rng.integers(0, n_pairs, size=m, dtype=np.int64))
    while len(ranks) < m:
        extra = rng.integers(0, n_pairs, size=m - len(ranks), dtype=np.int64)
        ranks = np.unique(np.concatenate([ranks, extra]))
    i, j = _pair_index_decode(ranks, n)
    return MultiGraph(n, np.stack([i, j], axis=1))


def census_basic(g: MultiGraph):
    """(edge_count, is_simple, degree_histogram) of a multigraph."""
    degs = g.degrees()
    hist = {int(k): int(v) for k, v in enumerate(np.bincount(degs)) if v > 0}
    return g.edge_count, g.is_simple(), hist
