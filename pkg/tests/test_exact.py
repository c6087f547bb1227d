import math
from math import comb

import numpy as np
import pytest

import critical_ising as ci
from critical_ising import exact


def brute_log_z_by_m(g, beta):
    n = g.n
    configs = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1) * 2 - 1
    u, v = g.edges[:, 0], g.edges[:, 1]
    if len(g.edges):
        energy = (configs[:, u] * configs[:, v]).sum(axis=1)
    else:
        energy = np.zeros(2**n, dtype=int)
    mags = configs.sum(axis=1)
    return {
        m: math.log(np.exp(beta * energy[mags == m]).sum())
        for m in range(-n, n + 1, 2)
    }


def test_critical_beta_values():
    assert abs(ci.critical_beta(ci.REGULAR, 3) - math.atanh(0.5)) < 1e-15
    assert abs(ci.critical_beta(ci.ER, 2.0) - math.atanh(0.5)) < 1e-15
    assert abs(ci.critical_beta(ci.REGULAR, 3) - 0.5493061) < 1e-7


def test_critical_beta_rejects_out_of_range():
    with pytest.raises(ValueError):
        ci.critical_beta(ci.REGULAR, 2)
    with pytest.raises(ValueError):
        ci.critical_beta(ci.ER, 1.0)
    spec = ci.ModelSpec(ci.REGULAR, 10, 3)
    assert ci.critical_beta(spec) == ci.critical_beta(ci.REGULAR, 3)


def test_exact_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(6):
        n = int(rng.integers(2, 13))
        m = int(rng.integers(0, 2 * n))
        g = ci.MultiGraph(n, rng.integers(0, n, size=(m, 2)))
        beta = float(rng.random())
        table = ci.exact_partition_by_magnetization(g, beta)
        brute = brute_log_z_by_m(g, beta)
        for mm, lv in brute.items():
            assert abs(table.log_value(mm) - lv) < 1e-10


def test_sum_over_m_equals_direct_total():
    g = ci.gen_config_model(20, 3, seed=4)
    beta = 0.55
    table = ci.exact_partition_by_magnetization(g, beta)
    brute = brute_log_z_by_m(g, beta)
    direct = math.log(sum(math.exp(v) for v in brute.values()))
    assert abs(table.log_total() - direct) / abs(direct) < 1e-10


def test_single_edge_partition():
    g = ci.MultiGraph(2, [(0, 1)])
    for beta in (0.2, 0.7, 1.0):
        t = ci.exact_partition_by_magnetization(g, beta)
        assert abs(math.exp(t.log_value(2)) - math.exp(beta)) < 1e-12
        assert abs(math.exp(t.log_value(-2)) - math.exp(beta)) < 1e-12
        assert abs(math.exp(t.log_value(0)) - 2 * math.exp(-beta)) < 1e-12
        assert abs(math.exp(t.log_total()) - 4 * math.cosh(beta)) < 1e-10


def test_empty_graph_binomial():
    g = ci.MultiGraph(6, np.empty((0, 2), dtype=int))
    t = ci.exact_partition_by_magnetization(g, 0.9)
    for m in range(-6, 7, 2):
        assert abs(math.exp(t.log_value(m)) - comb(6, (6 + m) // 2)) < 1e-9
    tn = ci.exact_partition_by_magnetization(g, 0.9, normalized=True)
    assert abs(math.exp(tn.log_total()) - 1.0) < 1e-12


def test_beta_zero_collapse_any_graph():
    g = ci.gen_config_model(10, 3, seed=1)
    t = ci.exact_partition_by_magnetization(g, 0.0)
    for m in range(-10, 11, 2):
        assert math.exp(t.log_value(m)) == comb(10, (10 + m) // 2)
    tn = ci.exact_partition_by_magnetization(g, 0.0, normalized=True)
    assert abs(math.exp(tn.log_total()) - 1.0) < 1e-12


def test_spin_flip_symmetry_exact():
    g = ci.gen_er(12, 2.0, seed=5)
    t = ci.exact_partition_by_magnetization(g, 0.61)
    assert np.array_equal(t.log_values, t.log_values[::-1])


def test_histogram_blocks_merge():
    g = ci.gen_config_model(14, 3, seed=9)
    h1 = exact.spin_histogram(g, blocks=1)
    h8 = exact.spin_histogram(g, blocks=8)
    assert np.array_equal(h1.table, h8.table)


def test_enumeration_cap():
    g = ci.MultiGraph(30, [(0, 1)])
    with pytest.raises(ValueError, match="cap"):
        exact.spin_histogram(g)


def test_log_domain_stays_finite_at_cap_scale():
    g = ci.gen_config_model(24, 3, seed=2)
    t = ci.exact_partition_by_magnetization(g, 1.0)
    assert np.isfinite(t.log_values).all()
    assert np.isfinite(t.log_total())


def test_magnetization_law_single_vertex():
    g = ci.MultiGraph(1, np.empty((0, 2), dtype=int))
    law = ci.exact_partition_by_magnetization(g, 0.4).law()
    assert abs(law.prob(1) - 0.5) < 1e-15
    assert abs(law.prob(-1) - 0.5) < 1e-15


def test_magnetization_law_sums_to_one_and_symmetric():
    g = ci.gen_config_model(12, 3, seed=8)
    law = ci.exact_partition_by_magnetization(g, 0.5).law()
    assert abs(law.probs.sum() - 1.0) < 1e-12
    assert np.allclose(law.probs, law.probs[::-1], atol=1e-14)


def test_magnetization_law_single_edge_critical():
    beta = math.atanh(0.5)
    g = ci.MultiGraph(2, [(0, 1)])
    law = ci.exact_partition_by_magnetization(g, beta).law()
    assert abs(law.prob(0) - 0.25) < 1e-12


def test_law_scaled_support_and_cdf():
    g = ci.gen_config_model(8, 3, seed=2)
    law = ci.exact_partition_by_magnetization(g, 0.3).law()
    scaled = law.scaled_support()
    assert np.allclose(scaled, law.support * 8 ** (-0.75))
    c = law.cdf([-10.0, 0.0, 10.0])
    assert c[0] == 0.0 and abs(c[-1] - 1.0) < 1e-12
    # cdf at 0 includes the m=0 atom for even n
    assert abs(c[1] - (0.5 + law.prob(0) / 2)) < 1e-12


def test_delta_n_values():
    # empty graph: log Z = n log 2
    n = 7
    value = ci.delta_n(n * math.log(2), n, 0, 0.8)
    assert abs(value - (-math.log(n**0.25 / math.sqrt(2 * math.pi)) + 0.75)) < 1e-14
    # cancel everything by hand
    beta = 0.6
    log_z = 2 * math.log(2) + 3 * math.log(math.cosh(beta)) + math.log(
        2**0.25 / math.sqrt(2 * math.pi)) - 0.75
    assert abs(ci.delta_n(log_z, 2, 3, beta)) < 1e-14
    # single edge
    g = ci.MultiGraph(2, [(0, 1)])
    t = ci.exact_partition_by_magnetization(g, beta)
    expected = (math.log(4 * math.cosh(beta)) - 2 * math.log(2)
                - math.log(math.cosh(beta))
                - math.log(2**0.25 / math.sqrt(2 * math.pi)) + 0.75)
    assert abs(ci.delta_n(t.log_total(), 2, 1, beta) - expected) < 1e-12


def test_table_csv_format():
    g = ci.MultiGraph(2, [(0, 1)])
    t = ci.exact_partition_by_magnetization(g, 0.5)
    text = t.to_csv()
    assert text.startswith("m,log_value\n") and text.endswith("\n")
    law_text = t.law().to_csv()
    assert law_text.startswith("m_scaled,probability\n")


def test_rejects_negative_beta():
    g = ci.MultiGraph(2, [(0, 1)])
    with pytest.raises(ValueError):
        ci.exact_partition_by_magnetization(g, -0.1)


def test_histogram_reuse_across_betas():
    g = ci.gen_er(10, 2.0, seed=3)
    hist = exact.spin_histogram(g)
    t1 = ci.exact_partition_by_magnetization(g, 0.3, histogram=hist)
    t2 = ci.exact_partition_by_magnetization(g, 0.3)
    assert np.allclose(t1.log_values, t2.log_values, atol=0)
