import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmhetnet.model import (DISC_500M, ConfigError, LinkState, antenna_from_elements, check, dbm_to_watts,
                            default_config, kappa_from_carrier, thermal_noise, validate, watts_to_dbm)


def test_default_matches_reference_parameters(table1):
    assert table1.n_tiers == 2
    assert watts_to_dbm(table1.tiers[0].tx_power) == pytest.approx(43.0)
    assert watts_to_dbm(table1.tiers[1].tx_power) == pytest.approx(33.0)
    assert table1.tiers[0].density * DISC_500M == pytest.approx(5.0)
    assert table1.tiers[1].density * DISC_500M == pytest.approx(10.0)
    assert (table1.tiers[0].blockage, table1.tiers[1].blockage) == (0.006, 0.024)
    assert (table1.channel.m_los, table1.channel.m_nlos) == (3, 2)
    assert validate(table1) == []


def test_kappa_at_28ghz_is_about_61_db():
    assert 10 * math.log10(kappa_from_carrier(28e9)) == pytest.approx(61.4, abs=0.05)


def test_thermal_noise_one_ghz():
    assert watts_to_dbm(thermal_noise(1e9, 0.0)) == pytest.approx(-84.0, abs=0.1)
    assert watts_to_dbm(thermal_noise(1e9, 10.0)) == pytest.approx(-74.0, abs=0.1)


@given(st.floats(-50, 80))
def test_dbm_round_trip(x):
    assert watts_to_dbm(dbm_to_watts(x)) == pytest.approx(x, abs=1e-9)


@pytest.mark.parametrize("n", [4, 16, 64, 256])
def test_antenna_from_elements(n):
    a = antenna_from_elements(n)
    assert a.main_gain == n
    assert a.beamwidth == pytest.approx(math.sqrt(3.0 / n))
    assert a.p_main + a.p_side == pytest.approx(1.0)
    assert a.side_gain < a.main_gain


def test_exclusion_ratio_is_biased_power_ratio(table1):
    cfg = table1.with_tier(1, bias=10.0)
    assert cfg.exclusion_ratio(1, 0) == pytest.approx(10 ** 0.0)
    assert cfg.exclusion_ratio(0, 1) * cfg.exclusion_ratio(1, 0) == pytest.approx(1.0)


def test_channel_accessors(table1):
    ch = table1.channel
    assert ch.alpha(LinkState.LOS) == 2.0 and ch.alpha(LinkState.NLOS) == 4.0
    assert ch.m(LinkState.LOS) == 3 and ch.m(LinkState.NLOS) == 2


@pytest.mark.parametrize("change, needle", [
    (dict(tier=(0, dict(density=0.0))), "density"),
    (dict(tier=(1, dict(bias=-1.0))), "bias"),
    (dict(channel=dict(alpha_nlos=2.0, alpha_los=2.0)), "alpha_nlos"),
    (dict(channel=dict(m_los=0)), "m_los"),
    (dict(noise_power=-1.0), "noise_power"),
])
def test_validate_reports_violations(table1, change, needle):
    cfg = table1
    if "tier" in change:
        k, kw = change["tier"]
        cfg = cfg.with_tier(k, **kw)
    if "channel" in change:
        cfg = cfg.with_channel(**change["channel"])
    if "noise_power" in change:
        cfg = cfg.replace(noise_power=change["noise_power"])
    problems = validate(cfg)
    assert any(needle in p for p in problems)
    with pytest.raises(ConfigError):
        check(cfg)


def test_default_config_is_fresh():
    assert default_config() == default_config()
