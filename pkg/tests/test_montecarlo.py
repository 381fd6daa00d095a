import math

import numpy as np
import pytest

from mmhetnet import montecarlo as mc
from mmhetnet.model import LinkState


def test_poisson_count_and_void_probability(table1):
    n = 100_000
    radius = 120.0
    expected = [t.density * math.pi * radius**2 for t in table1.tiers]
    counts = np.empty((n, 2))
    for seed in range(n):
        r = mc.sample_realization(table1, radius, seed)
        counts[seed] = np.bincount(r.tier, minlength=2)
    for k in range(2):
        lam = expected[k]
        assert abs(counts[:, k].mean() - lam) <= 3 * math.sqrt(lam / n)
        void = math.exp(-lam)
        assert abs((counts[:, k] == 0).mean() - void) <= 3 * math.sqrt(void * (1 - void) / n)


def test_points_fill_the_disc_uniformly(table1):
    r = mc.sample_realization(table1, 3000.0, 1)
    d = r.distance
    assert d.max() <= 3000.0
    # radial CDF of a uniform disc is (d/R)^2
    assert abs(np.mean(d < 1500.0) - 0.25) < 0.05


def _lonely_link(table1, d, noise):
    cfg = table1.with_channel(m_los=1).replace(noise_power=noise)
    pl = cfg.channel.kappa_los * d**cfg.channel.alpha_los
    real = mc.Realization(np.array([d]), np.array([0]), np.array([True]), np.array([pl]),
                          np.array([True]), 0, 0)
    return cfg, real, pl


@pytest.mark.parametrize("d, theta_db", [(500, 10), (1000, 10), (2000, 0), (3000, 0), (1500, 5)])
def test_noise_only_rayleigh(table1, d, theta_db):
    theta = 10 ** (theta_db / 10)
    cfg, real, pl = _lonely_link(table1, d, table1.noise_power)
    n = 20_000
    p = math.exp(-theta * cfg.noise_power * pl / (cfg.tiers[0].tx_power * cfg.serving_gain))
    assert 0.05 < p < 0.95
    est = mc.conditional_success(real, cfg, theta, n, seed=5)
    assert abs(est - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_region_radius_captures_interference(table1):
    r = mc.region_radius(table1)
    assert 500 < r < 5000
    assert mc._mean_interference_beyond(table1, r) <= 1.001e-4 * mc._mean_interference_beyond(
        table1, 0.5 / math.sqrt(sum(t.density for t in table1.tiers)))


def test_sweep_matches_single_threshold(table1):
    sweep = mc.run_meta_sweep(table1, [0.5, 2.0], 50, 100, 9)
    single = mc.run_meta(table1, 2.0, 50, 100, 9)
    np.testing.assert_array_equal(sweep[1].cond_probs, single.cond_probs)
    assert np.all(sweep[0].cond_probs >= sweep[1].cond_probs)


def test_threads_do_not_change_results(table1):
    a = mc.run_meta(table1, 1.0, 40, 50, 2, threads=1)
    b = mc.run_meta(table1, 1.0, 40, 50, 2, threads=2)
    np.testing.assert_array_equal(a.cond_probs, b.cond_probs)


def test_empirical_summaries():
    em = mc.EmpiricalMeta(1.0, np.array([0.2, 0.6, 1.0, 0.0]), np.array([0, 0, 1, 1]),
                          np.array([True, False, True, False]), 10)
    assert em.mean == pytest.approx(0.45)
    assert em.variance == pytest.approx(np.var([0.2, 0.6, 1.0, 0.0]))
    np.testing.assert_allclose(em.ccdf([0.1, 0.5]), [0.75, 0.5])
    assert em.subset(0).n_geometry == 2
    assert em.subset(1, LinkState.LOS).mean == 1.0
    assert em.inverse_moment(1, p_floor=0.1) == pytest.approx(np.mean([5, 1 / 0.6, 1, 10]))


def test_to_csv(tmp_path):
    em = mc.EmpiricalMeta(1.0, np.array([0.25]), np.array([1]), np.array([False]), 10)
    path = tmp_path / "m.csv"
    em.to_csv(path)
    assert path.read_text().splitlines() == ["realization_index,serving_tier,serving_state,cond_prob",
                                             "0,2,nlos,0.25"]


def test_rejects_empty_run(table1):
    with pytest.raises(ValueError):
        mc.run_meta(table1, 1.0, 0)
