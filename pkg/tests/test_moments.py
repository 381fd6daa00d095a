import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmhetnet import coverage, moments
from mmhetnet.coverage import UndefinedConditionalError
from mmhetnet.model import LINK_STATES, LinkState


@pytest.mark.parametrize("theta", [0.1, 1.0, 10.0])
def test_first_moment_with_unit_shape_is_success(table1, theta):
    cfg = table1.with_channel(m_los=1, m_nlos=1)
    for k in range(2):
        for s in LINK_STATES:
            assert moments.moment(cfg, k, s, theta, 1) == pytest.approx(
                coverage.success_prob(cfg, k, s, theta), abs=1e-6)


def test_moments_decrease_in_order(table1):
    vals = [moments.moment_total(table1, 1.0, b) for b in range(1, 6)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[1] >= vals[0] ** 2


def test_moment_set_totals(table1):
    ms = moments.moment_set(table1, 1.0)
    assert ms.totals[1] == pytest.approx(moments.moment_total(table1, 1.0, 1))
    assert ms.variance() == pytest.approx(moments.variance(table1, 1.0))
    assert 0.0 < ms.variance() < 0.25


def test_large_order_uses_law_route(table1):
    m = table1.channel.m_los
    b = moments.MAX_BINOMIAL_ORDER // m + 1
    val = moments.moment(table1, 0, LinkState.LOS, 1.0, b)
    assert 0.0 < val < moments.moment(table1, 0, LinkState.LOS, 1.0, b - 1)


def test_integer_moments_agree_with_law(table1):
    from mmhetnet.laplace import build_grid
    g = build_grid(table1, 1, LinkState.NLOS)
    law = moments.interference_law(g)
    for b in (1, 2):
        binom = g.expect(moments.moment_curve(g, 1.0, b))
        via_law = g.expect(law.expect(1.0, lambda v: moments._pa(v, g.m) ** b,
                                      lambda v: b * moments._pa(v, g.m) ** (b - 1) * moments._pa_deriv(v, g.m)))
        assert via_law == pytest.approx(binom, abs=1e-6)


@pytest.mark.parametrize("t", [0.5, 2.0, 8.0])
def test_complex_moment_conjugate_symmetry(table1, t):
    a = moments.moment_complex(table1, 0, LinkState.LOS, 1.0, t)
    b = moments.moment_complex(table1, 0, LinkState.LOS, 1.0, -t)
    assert a == pytest.approx(b.conjugate(), abs=1e-12)
    assert abs(a) <= 1.0 + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(1e-4, 0.2))
def test_beta_ccdf_is_a_ccdf(m1, spread):
    m2 = m1 * m1 + spread * m1 * (1 - m1)
    y = np.linspace(0, 1, 41)
    c = moments.beta_ccdf(m1, m2, y)
    assert np.all(np.diff(c) <= 1e-12)
    assert c[0] == pytest.approx(1.0) and c[-1] == pytest.approx(0.0, abs=1e-12)


def test_beta_ccdf_degenerate_is_step():
    np.testing.assert_array_equal(moments.beta_ccdf(0.4, 0.16, [0.3, 0.5]), [1.0, 0.0])


def test_exact_meta_is_monotone_and_close_to_beta(table1):
    y = np.linspace(0.05, 0.95, 19)
    exact = moments.meta_distribution_exact(table1, 1.0, y)
    beta = moments.meta_distribution_beta(table1, 1.0, y)
    assert np.all(np.diff(exact) <= 1e-9)
    assert np.max(np.abs(exact - beta)) < 0.03


def test_exact_meta_mean_matches_first_moment(table1):
    y = np.linspace(0.0, 1.0, 2001)
    ccdf = moments.meta_distribution_exact(table1, 1.0, y)
    mean = np.trapezoid(ccdf, y)
    assert mean == pytest.approx(moments.moment_total(table1, 1.0, 1), abs=2e-3)


def test_undefined_conditional():
    from types import SimpleNamespace
    with pytest.raises(UndefinedConditionalError):
        moments._require_mass(SimpleNamespace(association=0.0, tier=1, state=LinkState.NLOS))
