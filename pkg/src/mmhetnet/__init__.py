"""Analytical and simulated performance of K-tier mmWave heterogeneous networks."""

from mmhetnet.model import (
    AntennaPattern,
    ChannelModel,
    LinkState,
    NetworkConfig,
    TierParams,
    antenna_from_elements,
    default_config,
    thermal_noise,
    validate,
)

__all__ = [
    "AntennaPattern",
    "ChannelModel",
    "LinkState",
    "NetworkConfig",
    "TierParams",
    "antenna_from_elements",
    "default_config",
    "thermal_noise",
    "validate",
]

__version__ = "0.1.0"
