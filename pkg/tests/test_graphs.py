import math
from collections import Counter

import numpy as np
import pytest

import critical_ising as ci
from critical_ising.rng import generator


def test_config_model_degree_bookkeeping():
    g = ci.gen_config_model(4, 3, seed=11)
    assert g.edge_count == 6
    assert (g.degrees() == 3).all()


def test_config_model_rejects_odd_nd():
    with pytest.raises(ValueError):
        ci.gen_config_model(5, 3, seed=0)


def test_config_model_rejects_small_degree():
    with pytest.raises(ValueError):
        ci.gen_config_model(6, 2, seed=0)


def test_config_model_determinism():
    a = ci.gen_config_model(100, 3, seed=42)
    b = ci.gen_config_model(100, 3, seed=42)
    assert a.edges.tobytes() == b.edges.tobytes()
    c = ci.gen_config_model(100, 3, seed=43)
    assert a.edges.tobytes() != c.edges.tobytes()


def test_er_determinism():
    a = ci.gen_er(500, 2.0, seed=7)
    b = ci.gen_er(500, 2.0, seed=7)
    assert a.edges.tobytes() == b.edges.tobytes()


def test_er_rejects_bad_degree():
    with pytest.raises(ValueError):
        ci.gen_er(10, 10.0, seed=0)


def test_er_is_simple():
    g = ci.gen_er(2000, 3.0, seed=1)
    assert g.is_simple()


def test_er_two_vertices_edge_probability():
    hits = sum(ci.gen_er(2, 1.0, seed=s).edge_count for s in range(4000))
    # Binomial(4000, 1/2): 3 sigma ~ 95
    assert abs(hits - 2000) <= 3 * math.sqrt(4000 * 0.25)


def test_er_edge_count_moments():
    n, d, trials = 1000, 2.0, 10_000
    counts = np.array([ci.gen_er(n, d, seed=s).edge_count for s in range(trials)])
    n_pairs = n * (n - 1) // 2
    p = d / n
    mean, var = n_pairs * p, n_pairs * p * (1 - p)
    assert abs(counts.mean() - mean) <= 3 * math.sqrt(var / trials)
    # variance of the sample variance of a binomial, normal approximation
    assert abs(counts.var(ddof=1) - var) <= 4 * var * math.sqrt(2.0 / trials)


def test_config_model_matching_uniformity():
    """All 11!! = 10395 pairings of 12 half-edges appear uniformly."""
    draws = 1_000_000
    counts = Counter(
        ci.gen_config_model(4, 3, seed=s).edges.tobytes() for s in range(draws)
    )
    assert len(counts) <= 10395
    # multigraphs collapse many matchings; compare against exact multiplicities
    from itertools import permutations

    exact = Counter()
    slots = [(v, k) for v in range(4) for k in range(3)]

    def matchings(items):
        if not items:
            yield []
            return
        first = items[0]
        for i in range(1, len(items)):
            for rest in matchings(items[1:i] + items[i + 1:]):
                yield [(first, items[i])] + rest

    for mt in matchings(slots):
        edges = sorted(tuple(sorted((u[0], v[0]))) for u, v in mt)
        exact[tuple(edges)] += 1
    assert sum(exact.values()) == 10395

    keyed = {}
    for edges, mult in exact.items():
        g = ci.MultiGraph(4, np.array(edges))
        keyed[g.edges.tobytes()] = mult
    assert set(counts) <= set(keyed)

    # chi-square over distinct canonical graphs
    chi2 = 0.0
    z_max = 0.0
    for key, mult in keyed.items():
        expect = draws * mult / 10395
        observed = counts.get(key, 0)
        chi2 += (observed - expect) ** 2 / expect
        z_max = max(z_max, abs(observed - expect) / math.sqrt(expect))
    dof = len(keyed) - 1
    assert abs(chi2 - dof) <= 5 * math.sqrt(2 * dof)
    assert z_max < 5.5


def test_census_basic_triangle():
    g = ci.MultiGraph(3, [(0, 1), (1, 2), (0, 2)])
    assert ci.census_basic(g) == (3, True, {2: 3})


def test_census_basic_double_edge():
    g = ci.MultiGraph(2, [(0, 1), (0, 1)])
    assert ci.census_basic(g) == (2, False, {2: 2})


def test_census_basic_empty():
    g = ci.MultiGraph(5, np.empty((0, 2), dtype=int))
    assert ci.census_basic(g) == (0, True, {0: 5})


def test_loop_degree_counts_twice():
    g = ci.MultiGraph(2, [(0, 0), (0, 1)])
    assert list(g.degrees()) == [3, 1]
    assert not g.is_simple()


def test_json_roundtrip():
    g = ci.gen_config_model(20, 3, seed=3)
    assert ci.MultiGraph.from_json(g.to_json()) == g


def test_edgelist_roundtrip():
    g = ci.gen_er(50, 2.0, seed=9)
    assert ci.MultiGraph.from_edgelist(g.to_edgelist(), n=50) == g


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ci.ModelSpec(ci.REGULAR, 5, 3)
    with pytest.raises(ValueError):
        ci.ModelSpec(ci.ER, 10, 1.0)
    with pytest.raises(ValueError):
        ci.ModelSpec("foo", 10, 3)
    spec = ci.ModelSpec(ci.REGULAR, 10, 3)
    assert spec.sample(1).n == 10


def test_endpoint_range_validation():
    with pytest.raises(ValueError):
        ci.MultiGraph(3, [(0, 5)])


def test_pair_decode_exhaustive():
    from critical_ising.graphs import _pair_index_decode

    for n in (2, 3, 7, 50):
        ranks = np.arange(n * (n - 1) // 2, dtype=np.int64)
        i, j = _pair_index_decode(ranks, n)
        pairs = list(zip(i.tolist(), j.tolist()))
        expect = [(a, b) for a in range(n) for b in range(a + 1, n)]
        assert pairs == expect


def test_substream_independent_of_order():
    from critical_ising.rng import substream

    a = substream(99, 5).integers(0, 1000, 4).tolist()
    _ = substream(99, 4).integers(0, 1000, 4)
    b = substream(99, 5).integers(0, 1000, 4).tolist()
    assert a == b
