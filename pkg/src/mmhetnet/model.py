"""Network configuration types and the physical quantities derived from them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

SPEED_OF_LIGHT = 299_792_458.0

#: Density unit used by the reference scenario: BSs per disc of radius 500 m.
DISC_500M = 500.0**2 * math.pi


class LinkState(enum.Enum):
    LOS = "L"
    NLOS = "N"

    def __str__(self) -> str:
        return self.value


LINK_STATES = (LinkState.LOS, LinkState.NLOS)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def kappa_from_carrier(carrier_hz: float) -> float:
    """Free-space path loss at 1 m, (4 pi f / c)^2, as a linear attenuation."""
    return (4.0 * math.pi * carrier_hz / SPEED_OF_LIGHT) ** 2


def thermal_noise(bandwidth: float, noise_figure_db: float = 0.0) -> float:
    """Thermal noise power in watts for a receiver of the given bandwidth (Hz)."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    dbm = -174.0 + 10.0 * math.log10(bandwidth) + noise_figure_db
    return dbm_to_watts(dbm)


@dataclass(frozen=True)
class ChannelModel:
    alpha_los: float = 2.0
    alpha_nlos: float = 4.0
    kappa_los: float = kappa_from_carrier(28e9)
    kappa_nlos: float = kappa_from_carrier(28e9)
    m_los: int = 3
    m_nlos: int = 2

    def alpha(self, state: LinkState) -> float:
        return self.alpha_los if state is LinkState.LOS else self.alpha_nlos

    def kappa(self, state: LinkState) -> float:
        return self.kappa_los if state is LinkState.LOS else self.kappa_nlos

    def m(self, state: LinkState) -> int:
        return self.m_los if state is LinkState.LOS else self.m_nlos


@dataclass(frozen=True)
class AntennaPattern:
    """Two-lobe sector pattern: gain ``main_gain`` inside ``beamwidth``, ``side_gain`` elsewhere."""

    main_gain: float
    side_gain: float
    beamwidth: float

    @property
    def p_main(self) -> float:
        return self.beamwidth / (2.0 * math.pi)

    @property
    def p_side(self) -> float:
        return 1.0 - self.p_main

    def gain_marks(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """(gain, probability) pairs seen by the typical user from an interferer."""
        return ((self.main_gain, self.p_main), (self.side_gain, self.p_side))


def antenna_from_elements(n_elements: int) -> AntennaPattern:
    """Sectored approximation of an ``n_elements`` uniform array.

    main lobe N, side lobe 1/sin^2(3 pi / (2 sqrt N)), half-power beamwidth sqrt(3/N).
    This is a convention, not something fixed by the model; any AntennaPattern
    can be supplied instead. Note that N = 2, 3 give a side lobe above the main
    lobe, which ``validate`` reports.
    """
    if n_elements < 1 or int(n_elements) != n_elements:
        raise ValueError("n_elements must be a positive integer")
    n = int(n_elements)
    root = math.sqrt(n)
    side = 1.0 / math.sin(3.0 * math.pi / (2.0 * root)) ** 2
    return AntennaPattern(main_gain=float(n), side_gain=side, beamwidth=math.sqrt(3.0) / root)


@dataclass(frozen=True)
class TierParams:
    tx_power: float  # W
    density: float  # BS / m^2
    bias: float = 1.0
    blockage: float = 0.006  # 1/m

    @classmethod
    def from_dbm(cls, tx_power_dbm: float, density: float, bias: float = 1.0,
                 blockage: float = 0.006) -> "TierParams":
        return cls(dbm_to_watts(tx_power_dbm), density, bias, blockage)


DEFAULT_N_ELEMENTS = 64
DEFAULT_NOISE_FIGURE_DB = 10.0


@dataclass(frozen=True)
class NetworkConfig:
    tiers: tuple[TierParams, ...]
    channel: ChannelModel = field(default_factory=ChannelModel)
    antenna: AntennaPattern = field(default_factory=lambda: antenna_from_elements(DEFAULT_N_ELEMENTS))
    noise_power: float = thermal_noise(1e9, DEFAULT_NOISE_FIGURE_DB)
    bandwidth: float = 1e9
    user_density: float = 100.0 / DISC_500M

    def __post_init__(self) -> None:
        object.__setattr__(self, "tiers", tuple(self.tiers))

    @property
    def n_tiers(self) -> int:
        return len(self.tiers)

    @property
    def serving_gain(self) -> float:
        return self.antenna.main_gain

    def biased_power(self, k: int) -> float:
        t = self.tiers[k]
        return t.tx_power * t.bias

    def exclusion_ratio(self, j: int, k: int) -> float:
        """P_j B_j / (P_k B_k): tier-j interferers lie beyond this multiple of the serving path loss."""
        return self.biased_power(j) / self.biased_power(k)

    def with_tier(self, k: int, **changes) -> "NetworkConfig":
        tiers = list(self.tiers)
        tiers[k] = replace(tiers[k], **changes)
        return replace(self, tiers=tuple(tiers))

    def with_channel(self, **changes) -> "NetworkConfig":
        return replace(self, channel=replace(self.channel, **changes))

    def replace(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)

    def interference_limited(self) -> "NetworkConfig":
        return replace(self, noise_power=0.0)


def default_config() -> NetworkConfig:
    """Two-tier reference scenario (micro tier 1, pico tier 2) at 28 GHz."""
    return NetworkConfig(
        tiers=(
            TierParams.from_dbm(43.0, 5.0 / DISC_500M, bias=1.0, blockage=0.006),
            TierParams.from_dbm(33.0, 10.0 / DISC_500M, bias=1.0, blockage=0.024),
        ),
    )


def validate(config: NetworkConfig) -> list[str]:
    """Return the violated invariants of ``config``; an empty list means usable."""
    problems: list[str] = []
    if len(config.tiers) < 1:
        problems.append("at least one tier is required")
    for k, t in enumerate(config.tiers, start=1):
        if not t.tx_power > 0:
            problems.append(f"tier {k}: tx_power must be positive")
        if not t.density > 0:
            problems.append(f"tier {k}: density must be positive")
        if not t.bias > 0:
            problems.append(f"tier {k}: bias must be positive")
        if not t.blockage > 0:
            problems.append(f"tier {k}: blockage must be positive")
    ch = config.channel
    if not ch.alpha_los >= 2:
        problems.append("alpha_los must be >= 2")
    if not ch.alpha_nlos >= ch.alpha_los:
        problems.append("alpha_nlos must be >= alpha_los")
    if not ch.alpha_nlos > 2:
        problems.append("alpha_nlos must exceed 2 (NLOS interference is unbounded otherwise)")
    if not (ch.kappa_los > 0 and ch.kappa_nlos > 0):
        problems.append("path-loss intercepts must be positive")
    for name, m in (("m_los", ch.m_los), ("m_nlos", ch.m_nlos)):
        if int(m) != m:
            problems.append(f"Nakagami shape {name} must be an integer")
        elif m < 1:
            problems.append(f"Nakagami shape {name} must be >= 1")
    a = config.antenna
    if not a.side_gain > 0:
        problems.append("side_gain must be positive")
    if not a.main_gain >= a.side_gain:
        problems.append("main_gain must be >= side_gain")
    if not 0 < a.beamwidth < 2 * math.pi:
        problems.append("beamwidth must lie in (0, 2*pi)")
    if not config.noise_power >= 0:
        problems.append("noise_power must be >= 0")
    if not config.bandwidth > 0:
        problems.append("bandwidth must be positive")
    if not config.user_density >= 0:
        problems.append("user_density must be >= 0")
    return problems


class ConfigError(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def check(config: NetworkConfig) -> NetworkConfig:
    problems = validate(config)
    if problems:
        raise ConfigError(problems)
    return config
