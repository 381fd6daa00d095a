import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from mmhetnet import association
from mmhetnet import montecarlo as mc
from mmhetnet.laplace import build_grid
from mmhetnet.model import LINK_STATES, default_config


def test_table_sums_to_one(table1):
    table = association.association_table(table1)
    assert sum(table.values()) == pytest.approx(1.0, abs=1e-6)


def test_grid_mass_agrees_with_quadrature(table1):
    table = association.association_table(table1)
    for (k, s), a in table.items():
        assert build_grid(table1, k, s).association == pytest.approx(a, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 50), st.floats(0.001, 0.05), st.floats(1, 30))
@example(46.0, 0.03125, 30.0)
def test_sum_to_one_property(ratio, beta2, bias2):
    cfg = default_config()
    cfg = cfg.with_tier(1, density=cfg.tiers[0].density * ratio, blockage=beta2, bias=bias2)
    table = association.association_table(cfg)
    assert sum(table.values()) == pytest.approx(1.0, abs=1e-8)


def test_bias_offloads_to_pico(table1):
    base = association.tier_association(association.association_table(table1), 1)
    biased = association.tier_association(association.association_table(table1.with_tier(1, bias=10.0)), 1)
    assert biased > base


@pytest.mark.parametrize("r1, r2", [(100, 50), (50, 200), (80, 80), (150, 20)])
def test_step_blockage_closed_form(table1, r1, r2):
    for k in (0, 1):
        closed = association.association_prob_step(table1, r1, r2, k)
        numeric = association.association_prob_step_numeric(table1, r1, r2, k)
        assert closed == pytest.approx(numeric, abs=1e-8)


def test_matches_simulated_frequencies(table1):
    radius = mc.region_radius(table1)
    n = 4000
    counts = {}
    for i in range(n):
        r = mc._draw(table1, radius, mc._rng(17, i), i)
        key = (r.serving_tier, r.serving_state)
        counts[key] = counts.get(key, 0) + 1
    table = association.association_table(table1)
    for k in range(2):
        for s in LINK_STATES:
            p = table[(k, s)]
            freq = counts.get((k, s), 0) / n
            assert abs(freq - p) <= 4 * np.sqrt(p * (1 - p) / n)
