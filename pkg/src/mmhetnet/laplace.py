"""Serving-link quadrature grids and Laplace functionals of the interference.

Conditioned on the typical user being served by a tier-k BS in state rho at
path loss l, the tier-j interferers of state nu form a Poisson process on
path losses (c_j l, inf), c_j = P_j B_j / (P_k B_k). Every analytic quantity in
the package is an average over l of some functional

    int F(t) Lambda_{j,nu}(dx),   t = theta * M_rho * P_j G / (P_k Psi M_nu) * l / x,

so the grid below is built once per (config, k, rho) and reused for any
threshold.

Outer variable: u = sum_j Lambda_j([0, c_j l)), the void exponent. The joint
density of "served by (k, rho) at l" becomes R(l(u)) e^{-u} du with
R = Lambda'_{k,rho} / U' in [0, 1], integrated by composite Gauss-Legendre on
panels graded towards u = 0.

Inner variable: w = log(d / d_min) along the interferer distance, so that
Lambda_{j,nu}(dx) = 2 pi lambda_j d^2 p_nu(d) dw and t = t_edge e^{-alpha_nu w}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from mmhetnet import intensity
from mmhetnet.model import LINK_STATES, LinkState, NetworkConfig
from mmhetnet.specialfn import composite_gauss_legendre

OUTER_BREAKS = (0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.03, 0.1, 0.25, 0.5, 1.0, 1.5,
                2.0, 3.0, 4.0, 5.5, 7.5, 10.0, 13.0, 17.0, 22.0, 28.0, 36.0, 46.0)
# relative size of the neglected interference tail
INNER_TAIL = 1e-13
INNER_W_CAP = 80.0


@dataclass(frozen=True)
class GridOrder:
    outer: int = 10
    inner: int = 12
    inner_panel: float = 1.0
    outer_log_width: float = 1.0


DEFAULT_ORDER = GridOrder()


@dataclass
class InterfererComponent:
    tier: int
    state: LinkState
    m: int  # Nakagami shape of this interferer class
    # (t_unit, weight) per gain mark; t = theta * t_unit * decay at the inner nodes
    marks: tuple[tuple[float, float], ...]
    decay: np.ndarray  # (n_inner,) e^{-alpha w}
    mass: np.ndarray  # (n_outer, n_inner) quadrature weight x 2 pi lambda d^2 p(d)


@dataclass
class ServingGrid:
    config: NetworkConfig
    tier: int
    state: LinkState
    m: int
    l: np.ndarray  # serving path loss at outer nodes
    weight: np.ndarray  # joint density weight; sums to A_{k,rho}
    s_unit: np.ndarray  # s / theta = M_rho l / (P_k Psi)
    components: list[InterfererComponent]

    @property
    def association(self) -> float:
        return float(self.weight.sum())

    def noise(self, theta: float) -> np.ndarray:
        """s * sigma^2 at every outer node."""
        return theta * self.s_unit * self.config.noise_power

    def functional(self, theta: float, fn) -> np.ndarray:
        """sum over interferer classes and marks of int fn(t, m) Lambda(dx), per outer node.

        ``fn`` must be vectorised over t and may return complex values.
        """
        out = None
        for comp in self.components:
            for t_unit, wg in comp.marks:
                t = (theta * t_unit) * comp.decay
                vals = fn(t, comp.m)
                contrib = wg * (comp.mass @ vals)
                out = contrib if out is None else out + contrib
        return out

    def log_laplace(self, theta: float, mult=1.0) -> np.ndarray:
        """log E[exp(-mult * s (sigma^2 + I)) | l] for (possibly complex) ``mult``."""
        def fn(t, m):
            return -np.expm1(-m * np.log1p(mult * t)) if np.isrealobj(mult) else 1.0 - (1.0 + mult * t) ** (-m)

        return -mult * self.noise(theta) - self.functional(theta, fn)

    def expect(self, values: np.ndarray) -> complex | float:
        """Average of per-node ``values`` under the conditional serving density."""
        return (self.weight @ values) / self.weight.sum()


def _inner_breaks(w_max: float, panel: float) -> np.ndarray:
    head = [0.0, 0.125, 0.25, 0.5]
    body = np.arange(1.0, w_max + panel, panel)
    return np.unique(np.concatenate([head, [b for b in body if b > 0.5]]))


def _void_exponent(config: NetworkConfig, k: int, l: np.ndarray) -> np.ndarray:
    total = np.zeros_like(l)
    for j in range(config.n_tiers):
        total = total + intensity.lambda_total(config, j, config.exclusion_ratio(j, k) * l)
    return total


def _void_exponent_deriv(config: NetworkConfig, k: int, l: np.ndarray) -> np.ndarray:
    total = np.zeros_like(l)
    for j in range(config.n_tiers):
        c = config.exclusion_ratio(j, k)
        total = total + c * intensity.lambda_deriv(config, j, intensity.TOTAL, c * l)
    return total


def invert_void_exponent(config: NetworkConfig, k: int, u: np.ndarray) -> np.ndarray:
    """Path loss l with sum_j Lambda_j([0, c_j l)) = u, by bisection in log l."""
    u = np.asarray(u, dtype=float)
    lo = np.full_like(u, math.log(1e-30))
    hi = np.full_like(u, math.log(1e30))
    while np.any(_void_exponent(config, k, np.exp(hi)) < u):
        hi = hi + 20.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        below = _void_exponent(config, k, np.exp(mid)) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.exp(0.5 * (lo + hi))


def _inner_extent(config: NetworkConfig, j: int, state: LinkState, d_min_smallest: float) -> float:
    alpha = config.channel.alpha(state)
    bounds = []
    if alpha > 2.0:
        bounds.append(math.log(1.0 / ((alpha - 2.0) * INNER_TAIL)) / (alpha - 2.0))
    if state is LinkState.LOS:
        beta = config.tiers[j].blockage
        bounds.append(math.log(max(math.e, 40.0 / (beta * max(d_min_smallest, 1e-300)))))
    return min(min(bounds) if bounds else INNER_W_CAP, INNER_W_CAP)


def build_grid(config: NetworkConfig, k: int, state: LinkState, order: GridOrder = DEFAULT_ORDER) -> ServingGrid:
    """Quadrature grid for a user served by tier ``k`` in ``state``."""
    return _build_grid_cached(config, k, state, order)


@lru_cache(maxsize=48)
def _build_grid_cached(config: NetworkConfig, k: int, state: LinkState, order: GridOrder) -> ServingGrid:
    r, wr = composite_gauss_legendre(outer_log_breaks(config, k, order.outer_log_width), order.outer)
    l = np.exp(r)
    density = intensity.lambda_deriv(config, k, state, l) * np.exp(-_void_exponent(config, k, l))
    return grid_at(config, k, state, l, wr * l * density, order)


def outer_log_breaks(config: NetworkConfig, k: int, max_width: float) -> np.ndarray:
    """Panel edges in log l: images of the graded void-exponent breaks, split to ``max_width``.

    The void exponent is nearly flat over the decades of l where the finite LOS
    processes have saturated and NLOS BSs have not yet appeared, so panels are
    laid out in log l rather than in u.
    """
    edges = np.log(invert_void_exponent(config, k, np.asarray(OUTER_BREAKS[1:])))
    out = [edges[0]]
    for b in edges[1:]:
        n = max(1, int(math.ceil((b - out[-1]) / max_width)))
        out.extend(np.linspace(out[-1], b, n + 1)[1:])
    return np.asarray(out)


def grid_at(config: NetworkConfig, k: int, state: LinkState, l, weight=None,
            order: GridOrder = DEFAULT_ORDER) -> ServingGrid:
    """Grid whose outer nodes are the given serving path losses ``l``."""
    ch = config.channel
    l = np.atleast_1d(np.asarray(l, dtype=float))
    if weight is None:
        weight = np.ones_like(l)
    m_rho = ch.m(state)
    psi = config.serving_gain
    tier = config.tiers[k]
    s_unit = m_rho * l / (tier.tx_power * psi)

    comps = []
    for j, tj in enumerate(config.tiers):
        c = config.exclusion_ratio(j, k)
        for nu in LINK_STATES:
            alpha, kappa, m_nu = ch.alpha(nu), ch.kappa(nu), ch.m(nu)
            d_min = (c * l / kappa) ** (1.0 / alpha)
            w_max = _inner_extent(config, j, nu, float(d_min.min()))
            wn, ww = composite_gauss_legendre(_inner_breaks(w_max, order.inner_panel), order.inner)
            d = d_min[:, None] * np.exp(wn)[None, :]
            if nu is LinkState.LOS:
                p = np.exp(-tj.blockage * d)
            else:
                p = -np.expm1(-tj.blockage * d)
            mass = ww[None, :] * 2.0 * math.pi * tj.density * d * d * p
            marks = tuple(
                (m_rho * gain * tier.bias / (psi * m_nu * tj.bias), prob)
                for gain, prob in config.antenna.gain_marks()
                if prob > 0
            )
            comps.append(InterfererComponent(j, nu, m_nu, marks, np.exp(-alpha * wn), mass))
    return ServingGrid(config, k, state, m_rho, l, np.asarray(weight, dtype=float), s_unit, comps)


def binom(n, k):
    return special.comb(n, k, exact=False)
