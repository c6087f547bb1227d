"""Cycle and self-avoiding-path censuses, and the conditioning functionals.

Cycle counts Y_i (i=1 loops, i=2 parallel pairs, i>=3 simple cycles) and
path counts X_ell are the graph observables whose joint law drives the
partition-function fluctuations; W is the truncated log-weight built from
them, and theta the coupling between magnetization and the path count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .graphs import ER, REGULAR, MultiGraph


@dataclass(frozen=True)
class CycleCensus:
    """Map length -> number of cycles of that length (as subgraphs)."""

    counts: dict

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def csv_rows(self, graph_id) -> list[tuple]:
        return [(graph_id, i, self.counts[i]) for i in sorted(self.counts)]


def count_cycles_upto(g: MultiGraph, k_max: int) -> CycleCensus:
    """Exact census of cycle subgraphs of length 1..k_max.

    Loops are 1-cycles; a class of mu parallel edges contributes C(mu, 2)
    two-cycles; longer cycles visit distinct vertices, with parallel edges
    counted by multiplicity.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    counts = {i: 0 for i in range(1, k_max + 1)}
    counts[1] = g.loop_count
    if k_max >= 2 and g.edge_count:
        nonloop = g.edges[g.edges[:, 0] != g.edges[:, 1]]
        if len(nonloop):
            _, mult = np.unique(nonloop, axis=0, return_counts=True)
            counts[2] = int((mult * (mult - 1) // 2).sum())
    if k_max >= 3:
        indptr, indices, _ = g.adjacency_csr()
        raw = np.zeros(k_max + 1, dtype=np.int64)
        _kernels.count_cycles_dfs(indptr, indices, g.n, k_max, raw)
        for i in range(3, k_max + 1):
            assert raw[i] % 2 == 0
            counts[i] = int(raw[i]) // 2
    return CycleCensus(counts)


def count_paths(g: MultiGraph, ell: int) -> int:
    """Number of self-avoiding paths with exactly `ell` edges.

    Paths are unordered: directed traversals are identified under reversal.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    indptr, indices, _ = g.adjacency_csr()
    directed = _kernels.count_paths_dfs(indptr, indices, g.n, ell)
    assert directed % 2 == 0
    return int(directed) // 2


class PathNormalization(NamedTuple):
    xhat: float
    gamma1: float
    gamma2: float


def path_gamma1(d: float, ell: int) -> float:
    """(d-1)/ell * sum_k (ell-k+1) d^-k  -  1."""
    s = sum((ell - k + 1) * d ** (-k) for k in range(1, ell + 1))
    return (d - 1) / ell * s - 1.0


def path_gamma2(d: float, ell: int) -> float:
    """(d-1)/ell^2 * sum_k (ell-k+1)^2 d^-k  -  1."""
    s = sum((ell - k + 1) ** 2 * d ** (-k) for k in range(1, ell + 1))
    return (d - 1) / ell**2 * s - 1.0


def normalize_path_count(x: float, n: int, d: float, ell: int) -> PathNormalization:
    """Center and scale a raw path count: (x - n d^ell / 2) / sd.

    The variance scale is n d^(2 ell) ell^2 / (2(d-1)); the gammas are the
    finite-ell corrections to the mean shift (gamma1) and variance (gamma2).
    """
    if d <= 1:
        raise ValueError("need d > 1")
    if ell < 1 or n < 1:
        raise ValueError("need ell >= 1 and n >= 1")
    mean = 0.5 * n * d**ell
    sd = math.sqrt(0.5 * n * d ** (2 * ell) * ell**2 / (d - 1))
    return PathNormalization((x - mean) / sd, path_gamma1(d, ell), path_gamma2(d, ell))


@dataclass(frozen=True)
class SscParams:
    """Truncation order k and clamp level R for the cycle-weight sum W.

    Regular graphs weight cycles from length 1 with delta_i = (d-1)^-i and
    lambda_i = (d-1)^i / 2i; ER starts at length 3 with delta_i = d^-i and
    lambda_i = d^i / 2i.
    """

    model: str
    d: float
    k: int
    R: float

    def __post_init__(self):
        if self.model not in (REGULAR, ER):
            raise ValueError(f"unknown model kind {self.model!r}")
        if self.k < 0:
            raise ValueError("truncation order k must be >= 0")
        if self.R <= 0:
            raise ValueError("clamp level R must be positive")

    @property
    def i_min(self) -> int:
        return 1 if self.model == REGULAR else 3

    def delta(self, i: int) -> float:
        base = self.d - 1 if self.model == REGULAR else self.d
        return base ** (-i)

    def lam(self, i: int) -> float:
        base = self.d - 1 if self.model == REGULAR else self.d
        return base**i / (2 * i)


def ssc_functional(census: CycleCensus, params: SscParams) -> tuple[float, float]:
    """W = sum_i (Y_i log(1+delta_i) - lambda_i delta_i), plus its clamp.

    The clamp is sign(W) * min(|W|, R).  Raises if the census is missing a
    length the truncation needs.
    """
    w = 0.0
    for i in range(params.i_min, params.k + 1):
        if i not in census.counts:
            raise ValueError(f"census is missing cycle length {i} required by k={params.k}")
        delta = params.delta(i)
        w += census.counts[i] * math.log1p(delta) - params.lam(i) * delta
    clamped = math.copysign(min(abs(w), params.R), w) if w != 0.0 else 0.0
    return w, clamped


def theta(m: float, n: int, d: float) -> float:
    """(m n^{-3/4})^2 / sqrt(2(d-1)): the path-count coupling of magnetization m."""
    if d <= 1 or n < 1:
        raise ValueError("need d > 1 and n >= 1")
    return (m * n ** (-0.75)) ** 2 / math.sqrt(2 * (d - 1))


def census_csv(rows, header=("graph_id", "i", "Y_i")) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def path_csv_rows(graph_id, ell: int, x: int, xhat: float) -> tuple:
    return (graph_id, ell, x, xhat)
