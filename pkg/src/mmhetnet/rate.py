"""Cell load and moments of the conditional rate coverage.

A user sharing its BS with v - 1 others in round-robin gets rate W/v log2(1 + SINR),
so rate coverage at threshold eps is success at theta(v) = 2^(eps v / W) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from mmhetnet.laplace import DEFAULT_ORDER, GridOrder, build_grid
from mmhetnet.model import LINK_STATES, LinkState, NetworkConfig
from mmhetnet.moments import _require_mass, moment_curve

TAIL_MASS = 1e-6
MAX_LOAD = 100_000
# shape of the gamma approximation to the normalized Poisson-Voronoi cell area
CELL_SHAPE = 3.5


@dataclass(frozen=True)
class LoadPmf:
    tier: int
    probabilities: np.ndarray  # probabilities[v - 1] = P(load = v)
    truncation: int

    def __call__(self, upsilon: int) -> float:
        if upsilon < 1 or upsilon > self.truncation:
            return 0.0
        return float(self.probabilities[upsilon - 1])

    @property
    def mean(self) -> float:
        return float(np.arange(1, self.truncation + 1) @ self.probabilities)


def _tier_association(config: NetworkConfig, k: int, order: GridOrder) -> float:
    return sum(build_grid(config, k, s, order).association for s in LINK_STATES)


def _log_pmf(v: np.ndarray, y: float, shape: float) -> np.ndarray:
    # P(load = v) with v - 1 other users ~ NegBin(shape, y / (1 + y))
    n = v - 1.0
    if y == 0:
        return np.where(n == 0, 0.0, -np.inf)
    return (special.gammaln(shape + n) - special.gammaln(n + 1) - special.gammaln(shape)
            + n * math.log(y) - (shape + n) * math.log1p(y))


def load_distribution(config: NetworkConfig, k: int, *, model: str = "printed",
                      order: GridOrder = DEFAULT_ORDER) -> LoadPmf:
    """Number of users served by the typical user's BS, truncated and renormalized.

    ``model="printed"``: (1/Gamma(v)) y^(v-1) Gamma(3.5+v)/Gamma(4.5) (1+y)^(-3.5-v) with
    y = lambda_u A_k / (3.5 lambda_k), the load seen from a user inside the cell.
    ``model="typical_cell"``: the load of a cell picked at random instead (others
    negative binomial with shape 3.5), kept for sensitivity checks.
    """
    if model == "printed":
        shape = CELL_SHAPE + 1.0
    elif model == "typical_cell":
        shape = CELL_SHAPE
    else:
        raise ValueError(f"unknown load model {model!r}")
    a_k = _tier_association(config, k, order)
    y = config.user_density * a_k / (CELL_SHAPE * config.tiers[k].density)
    mean = 1.0 + shape * y
    v_max = int(max(8, math.ceil(mean * 4)))
    while True:
        v = np.arange(1, v_max + 1, dtype=float)
        p = np.exp(_log_pmf(v, y, shape))
        tail = 1.0 - p.sum()
        if tail < TAIL_MASS or v_max >= MAX_LOAD:
            break
        v_max *= 2
    # smallest support whose neglected tail is below TAIL_MASS
    cum = np.cumsum(p)
    cut = int(np.searchsorted(cum, 1.0 - TAIL_MASS)) + 1
    cut = min(max(cut, 1), v_max)
    p = p[:cut] / p[:cut].sum()
    return LoadPmf(k, p, cut)


def load_pmf(config: NetworkConfig, k: int, upsilon: int, *, model: str = "printed") -> float:
    """P(load = upsilon) for the serving BS of a tier-k user."""
    if upsilon < 1 or int(upsilon) != upsilon:
        raise ValueError("upsilon must be a positive integer")
    return load_distribution(config, k, model=model)(int(upsilon))


def rate_threshold_sinr(rate_threshold: float, load, bandwidth: float):
    return np.exp2(rate_threshold * np.asarray(load, dtype=float) / bandwidth) - 1.0


def rate_moment(config: NetworkConfig, k: int, state: LinkState, b: int, rate_threshold: float, *,
                pmf: LoadPmf | None = None, model: str = "printed", order: GridOrder = DEFAULT_ORDER) -> float:
    """b-th moment of the conditional rate coverage for users served by (k, state)."""
    if rate_threshold < 0:
        raise ValueError("rate_threshold must be nonnegative")
    if config.bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    pmf = load_distribution(config, k, model=model, order=order) if pmf is None else pmf
    grid = build_grid(config, k, state, order)
    _require_mass(grid)
    total = 0.0
    for v, p in enumerate(pmf.probabilities, start=1):
        if p == 0:
            continue
        theta = float(rate_threshold_sinr(rate_threshold, v, config.bandwidth))
        total += p * float(grid.expect(moment_curve(grid, theta, b)))
    return min(1.0, max(0.0, total))


def rate_moment_total(config: NetworkConfig, b: int, rate_threshold: float, *, model: str = "printed",
                      order: GridOrder = DEFAULT_ORDER) -> float:
    total = 0.0
    for k in range(config.n_tiers):
        pmf = load_distribution(config, k, model=model, order=order)
        for state in LINK_STATES:
            grid = build_grid(config, k, state, order)
            if grid.association > 0:
                total += grid.association * rate_moment(config, k, state, b, rate_threshold, pmf=pmf, order=order)
    return total
