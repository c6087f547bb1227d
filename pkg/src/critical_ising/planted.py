"""The planted measure: graph laws reweighted by a restricted partition sum.

Sampling is by exact importance reweighting of iid null graphs: at small n
the normalized partition sum at the target magnetization is computable
exactly, so the weights are exact and expectations under them are
consistent for the planted measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import MagnetizationTable
from .graphs import ER, REGULAR


@dataclass
class WeightedSample:
    """Normalized importance weights over a list of graphs."""

    graph_ids: list
    weights: np.ndarray
    target_m: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        self.weights = w

    @property
    def ess(self) -> float:
        """Effective sample size 1 / sum(w^2)."""
        return float(1.0 / np.sum(self.weights**2))

    def mean(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def mean_stderr(self, values) -> tuple[float, float]:
        """Weighted mean and its importance-sampling standard error."""
        v = np.asarray(values, dtype=float)
        mu = self.mean(v)
        se = math.sqrt(float(np.sum(self.weights**2 * (v - mu) ** 2)))
        return mu, se

    def to_csv(self) -> str:
        lines = ["graph_id,weight"]
        lines += [f"{g},{w!r}" for g, w in zip(self.graph_ids, self.weights)]
        return "\n".join(lines) + "\n"


def planted_reweight(tables: list[MagnetizationTable], m: int) -> WeightedSample:
    """Weight graph j proportionally to its partition sum at magnetization m.

    All tables must share (n, beta, normalized); expectations under the
    weights estimate planted-measure expectations.
    """
    if not tables:
        raise ValueError("need at least one table")
    first = tables[0]
    for t in tables[1:]:
        if (t.n, t.beta, t.normalized) != (first.n, first.beta, first.normalized):
            raise ValueError("tables must share n, beta and the normalization flag")
    if (m + first.n) % 2 or abs(m) > first.n:
        raise ValueError(f"m={m} is not a reachable magnetization for n={first.n}")
    log_w = np.array([t.log_value(m) for t in tables])
    w = np.exp(log_w - log_w.max())
    w /= w.sum()
    return WeightedSample(list(range(len(tables))), w, m)


def planted_cycle_mean(kind: str, d: float, i: int) -> float:
    """Limiting planted mean of the cycle count: ((base^i) + 1) / 2i."""
    if i < 1:
        raise ValueError("cycle length must be >= 1")
    if kind == REGULAR:
        return ((d - 1.0) ** i + 1.0) / (2.0 * i)
    if kind == ER:
        if i < 3:
            raise ValueError("ER cycle statistics start at length 3")
        return (d**i + 1.0) / (2.0 * i)
    raise ValueError(f"unknown model kind {kind!r}")


def null_cycle_mean(kind: str, d: float, i: int) -> float:
    """Limiting null mean of the cycle count: base^i / 2i."""
    if i < 1:
        raise ValueError("cycle length must be >= 1")
    if kind == REGULAR:
        return (d - 1.0) ** i / (2.0 * i)
    if kind == ER:
        if i < 3:
            raise ValueError("ER cycle statistics start at length 3")
        return d**i / (2.0 * i)
    raise ValueError(f"unknown model kind {kind!r}")


def planted_path_mean(d: float, ell: int, m: float, n: int) -> float:
    """Leading-order planted mean of the path count.

    (n d^ell / 2) (1 + m^2 n^-2 * ell/(d-1) * (1 + gamma1)).
    """
    from .census import path_gamma1

    if d <= 1:
        raise ValueError("need d > 1")
    shift = m**2 / n**2 * ell / (d - 1.0) * (1.0 + path_gamma1(d, ell))
    return 0.5 * n * d**ell * (1.0 + shift)


def planted_cycle_probability(d: float, n: int, i: int) -> float:
    """Leading-order planted probability that a given i-cycle is present."""
    if i < 3:
        raise ValueError("need cycle length >= 3")
    return (d / n) ** i * (1.0 + d ** (-i))
