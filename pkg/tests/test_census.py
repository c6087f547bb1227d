import itertools
import math

import numpy as np
import pytest

import critical_ising as ci
from critical_ising.census import SscParams, path_gamma1, path_gamma2
from critical_ising.graphs import ER, REGULAR


def brute_cycles(g, k_max):
    A = np.zeros((g.n, g.n), dtype=int)
    loops = 0
    for u, v in g.edges:
        if u == v:
            loops += 1
        else:
            A[u, v] += 1
            A[v, u] += 1
    counts = {1: loops}
    counts[2] = int(sum(A[u, v] * (A[u, v] - 1) // 2
                        for u in range(g.n) for v in range(u + 1, g.n)))
    for L in range(3, k_max + 1):
        total = 0
        for combo in itertools.permutations(range(g.n), L):
            if combo[0] != min(combo) or combo[1] > combo[-1]:
                continue
            mult = 1
            for a, b in zip(combo, combo[1:] + (combo[0],)):
                mult *= A[a, b]
                if mult == 0:
                    break
            total += mult
        counts[L] = total
    return counts


def brute_paths(g, ell):
    A = np.zeros((g.n, g.n), dtype=int)
    for u, v in g.edges:
        if u != v:
            A[u, v] += 1
            A[v, u] += 1
    total = 0
    for combo in itertools.permutations(range(g.n), ell + 1):
        if combo[0] > combo[-1]:
            continue
        mult = 1
        for a, b in zip(combo, combo[1:]):
            mult *= A[a, b]
            if mult == 0:
                break
        total += mult
    return total


def test_counts_match_brute_force_on_small_multigraphs():
    rng = np.random.default_rng(7)
    for _ in range(40):
        n = int(rng.integers(3, 9))
        m = int(rng.integers(1, 14))
        g = ci.MultiGraph(n, rng.integers(0, n, size=(m, 2)))
        kc = ci.count_cycles_upto(g, 6)
        bc = brute_cycles(g, 6)
        assert all(kc[i] == bc[i] for i in range(1, 7))
        for ell in (1, 2, 3, 4):
            assert ci.count_paths(g, ell) == brute_paths(g, ell)


def test_cycle_examples():
    c5 = ci.MultiGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    counts = ci.count_cycles_upto(c5, 5)
    assert counts[3] == 0 and counts[4] == 0 and counts[5] == 1

    k4 = ci.MultiGraph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    counts = ci.count_cycles_upto(k4, 4)
    assert counts[3] == 4 and counts[4] == 3

    dbl = ci.MultiGraph(2, [(0, 1), (0, 1)])
    assert ci.count_cycles_upto(dbl, 2)[2] == 1


def test_parallel_multiplicity_in_two_cycles():
    g = ci.MultiGraph(2, [(0, 1)] * 4)
    assert ci.count_cycles_upto(g, 2)[2] == 6  # C(4, 2)


def test_path_examples():
    p3 = ci.MultiGraph(3, [(0, 1), (1, 2)])
    assert ci.count_paths(p3, 2) == 1
    c5 = ci.MultiGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    assert ci.count_paths(c5, 4) == 5
    k4 = ci.MultiGraph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert ci.count_paths(k4, 3) == 12


def test_path_count_validation():
    g = ci.MultiGraph(3, [(0, 1)])
    with pytest.raises(ValueError):
        ci.count_paths(g, 0)
    with pytest.raises(ValueError):
        ci.count_cycles_upto(g, 0)


def test_normalize_path_count_center():
    norm = ci.normalize_path_count(0.5 * 100 * 2**3, 100, 2.0, 3)
    assert norm.xhat == 0.0


def test_normalize_path_count_example():
    norm = ci.normalize_path_count(4500, 1000, 2.0, 3)
    assert abs(norm.xhat - 500 / math.sqrt(288000)) < 1e-12
    assert abs(norm.xhat - 0.93169) < 1e-4


def test_gamma_values():
    assert abs(path_gamma2(2.0, 2) - (-0.4375)) < 1e-15
    # gammas vanish as ell grows
    assert abs(path_gamma1(2.0, 40)) < 1e-2
    assert abs(path_gamma2(2.0, 60)) < 1e-2


def test_normalize_rejects_bad_degree():
    with pytest.raises(ValueError):
        ci.normalize_path_count(10, 10, 1.0, 2)


def test_ssc_functional_empty():
    params = SscParams(REGULAR, 3, 0, 10.0)
    census = ci.count_cycles_upto(ci.MultiGraph(3, [(0, 1)]), 1)
    w, wc = ci.ssc_functional(census, params)
    assert w == 0.0 and wc == 0.0


def test_ssc_functional_frozen_value():
    # d=3 regular, Y_i = round(lambda_i) for i <= 4: independent re-summation
    params = SscParams(REGULAR, 3, 4, 10.0)
    counts = {i: round(params.lam(i)) for i in range(1, 5)}
    census = ci.CycleCensus(counts)
    w, wc = ci.ssc_functional(census, params)
    expected = sum(
        counts[i] * math.log(1 + 2.0 ** (-i)) - (2.0**i / (2 * i)) * 2.0 ** (-i)
        for i in range(1, 5)
    )
    assert abs(w - expected) < 1e-14
    assert abs(w - (-0.17402572795503937)) < 1e-12
    assert wc == w


def test_ssc_clamp():
    params = SscParams(REGULAR, 3, 1, 2.0)
    census = ci.CycleCensus({1: 50})
    w, wc = ci.ssc_functional(census, params)
    assert w > 2.0 and wc == 2.0


def test_ssc_missing_counts():
    params = SscParams(REGULAR, 3, 4, 1.0)
    with pytest.raises(ValueError):
        ci.ssc_functional(ci.CycleCensus({1: 0, 2: 0}), params)


def test_ssc_er_starts_at_three():
    params = SscParams(ER, 2.0, 3, 5.0)
    assert params.i_min == 3
    census = ci.CycleCensus({3: 2})
    w, _ = ci.ssc_functional(census, params)
    assert abs(w - (2 * math.log(1 + 0.125) - (8 / 6) * 0.125)) < 1e-14


def test_theta_values():
    assert ci.theta(0, 1000, 3.0) == 0.0
    n = 4096  # n^(3/4) = 512
    assert abs(ci.theta(512, n, 3.0) - 0.5) < 1e-12
    assert abs(ci.theta(1024, n, 2.0) - 4 / math.sqrt(2)) < 1e-12
    assert abs(ci.theta(1024, n, 2.0) - 2.8284) < 1e-4


def test_config_model_loop_count_mean():
    # loops are 1-cycles with limiting mean (d-1)/2 = 1 at d=3
    trials, n = 10_000, 1000
    loops = np.array([ci.gen_config_model(n, 3, seed=s).loop_count for s in range(trials)])
    se = loops.std(ddof=1) / math.sqrt(trials)
    assert abs(loops.mean() - 1.0) <= 3 * se


def test_census_csv_format():
    from critical_ising.census import census_csv

    g = ci.MultiGraph(3, [(0, 1), (1, 2), (0, 2)])
    rows = ci.count_cycles_upto(g, 3).csv_rows("g7")
    text = census_csv(rows)
    assert text.startswith("graph_id,i,Y_i\n")
    assert text.endswith("\n")
    assert "g7,3,1" in text
