"""Success probability per tier and link state.

With Nakagami-M serving fading, P(SINR > theta | I, l) = Gamma(M, s(sigma^2+I))/Gamma(M)
with s = theta M l / (P_k Psi). Averaging over I turns this into
sum_{m<M} (-s)^m/m! L^(m)(s), where L = exp(eta) is the Laplace transform of
noise plus interference. Writing q_n = (-s)^n/n! eta^(n)(s), the terms
x_m = (-s)^m/m! L^(m)(s) satisfy x_0 = e^{q_0} and

    x_m = sum_{n<m} (m-n)/m q_{m-n} x_n,

i.e. they are the power-series coefficients of exp(Q(z)), equivalently the first
column of the matrix exponential of the lower-triangular Toeplitz matrix built
from q. That is what ``success_prob_given_pathloss`` evaluates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from mmhetnet.laplace import DEFAULT_ORDER, GridOrder, ServingGrid, build_grid, grid_at
from mmhetnet.model import LINK_STATES, LinkState, NetworkConfig
from mmhetnet.specialfn import gauss_2f1, pochhammer

log = logging.getLogger(__name__)

CLAMP_WARN = 1e-9


class UndefinedConditionalError(ValueError):
    """Conditioning on an association event of probability zero."""


@dataclass(frozen=True)
class ToeplitzCoeffs:
    q: np.ndarray
    m: int

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=float)
        object.__setattr__(self, "q", q)
        if q.shape[-1] != self.m:
            raise ValueError("need exactly m coefficients")

    def matrix(self) -> np.ndarray:
        """Dense lower-triangular Toeplitz matrix (single coefficient vector only)."""
        q = self.q
        mat = np.zeros((self.m, self.m))
        for i in range(self.m):
            for j in range(i + 1):
                mat[i, j] = q[i - j]
        return mat


def q_from_grid(grid: ServingGrid, theta: float) -> np.ndarray:
    """Coefficients q_0..q_{M-1} at every outer node of ``grid``; shape (n_nodes, M)."""
    m = grid.m
    noise = grid.noise(theta)
    out = np.empty((grid.l.size, m))
    out[:, 0] = grid.log_laplace(theta)
    for n in range(1, m):
        def fn(t, mnu, n=n):
            # (M_nu)_n t^n (1+t)^{-M_nu-n} / n!, in log form to stay finite for large t
            return np.exp(math.log(pochhammer(mnu, n) / math.factorial(n))
                          + n * np.log(t) - (mnu + n) * np.log1p(t))

        out[:, n] = grid.functional(theta, fn)
        if n == 1:
            out[:, n] += noise
    return out


def q_coeffs(config: NetworkConfig, k: int, state: LinkState, pathloss: float, theta: float,
             order: GridOrder = DEFAULT_ORDER) -> ToeplitzCoeffs:
    """Toeplitz coefficients for a user served by (k, state) at the given path loss."""
    if not pathloss > 0 or not theta > 0:
        raise ValueError("pathloss and theta must be positive")
    grid = grid_at(config, k, state, [pathloss], order=order)
    return ToeplitzCoeffs(q_from_grid(grid, theta)[0], grid.m)


def toeplitz_series(q: np.ndarray) -> np.ndarray:
    """Power-series coefficients x_0..x_{M-1} of exp(sum_n q_n z^n); works on stacked rows."""
    q = np.asarray(q, dtype=float)
    m = q.shape[-1]
    x = np.empty_like(q)
    x[..., 0] = np.exp(q[..., 0])
    for i in range(1, m):
        acc = np.zeros(q.shape[:-1])
        for n in range(i):
            acc = acc + (i - n) / i * q[..., i - n] * x[..., n]
        x[..., i] = acc
    return x


def success_prob_given_pathloss(coeffs: ToeplitzCoeffs | np.ndarray):
    """l1 norm of the first column of exp(Q): the success probability at fixed path loss."""
    q = coeffs.q if isinstance(coeffs, ToeplitzCoeffs) else np.asarray(coeffs, dtype=float)
    p = toeplitz_series(q).sum(axis=-1)
    drift = np.maximum(p - 1.0, -p).max(initial=0.0)
    if drift > CLAMP_WARN:
        log.warning("success probability left [0, 1] by %.3g; clamped", drift)
    p = np.clip(p, 0.0, 1.0)
    return p if p.ndim else float(p)


def conditional_success_curve(grid: ServingGrid, theta: float) -> np.ndarray:
    """P(SINR > theta | l) at every outer node of ``grid``."""
    if theta <= 0:
        return np.ones_like(grid.l)
    return success_prob_given_pathloss(q_from_grid(grid, theta))


def success_prob(config: NetworkConfig, k: int, state: LinkState, theta: float,
                 order: GridOrder = DEFAULT_ORDER) -> float:
    """P(SINR > theta | served by tier k in ``state``)."""
    grid = build_grid(config, k, state, order)
    if grid.association <= 0:
        raise UndefinedConditionalError(f"association probability of tier {k + 1} {state} is zero")
    return float(grid.expect(conditional_success_curve(grid, theta)))


def success_prob_total(config: NetworkConfig, theta: float, order: GridOrder = DEFAULT_ORDER) -> float:
    total = 0.0
    for k in range(config.n_tiers):
        for state in LINK_STATES:
            grid = build_grid(config, k, state, order)
            if grid.association > 0:
                total += grid.weight @ conditional_success_curve(grid, theta)
    return float(total)


def success_table(config: NetworkConfig, theta: float, order: GridOrder = DEFAULT_ORDER) -> dict:
    """{(k, state): success probability} plus ``"total"``."""
    out = {}
    total = 0.0
    for k in range(config.n_tiers):
        for state in LINK_STATES:
            grid = build_grid(config, k, state, order)
            curve = conditional_success_curve(grid, theta)
            out[(k, state)] = float(grid.expect(curve))
            total += grid.weight @ curve
    out["total"] = float(total)
    return out


def tier_success(config: NetworkConfig, k: int, theta: float, order: GridOrder = DEFAULT_ORDER) -> float:
    """P(SINR > theta | served by tier k), either link state."""
    num = 0.0
    den = 0.0
    for state in LINK_STATES:
        grid = build_grid(config, k, state, order)
        num += grid.weight @ conditional_success_curve(grid, theta)
        den += grid.association
    return float(num / den)


# --- dense-LOS, interference-limited closed form -------------------------------------------

def _f_coeffs(delta: float, m: int, a: float, n_terms: int) -> np.ndarray:
    """Taylor coefficients in z of 2F1(-delta, m; 1-delta; -a(1-z))."""
    out = np.empty(n_terms)
    for n in range(n_terms):
        lead = a**n * pochhammer(-delta, n) * pochhammer(m, n) / (pochhammer(1 - delta, n) * math.factorial(n))
        out[n] = lead * gauss_2f1(-delta + n, m + n, 1 - delta + n, -a)
    return out


def reciprocal_series(c: np.ndarray) -> np.ndarray:
    """Coefficients of 1 / sum_n c_n z^n."""
    out = np.zeros_like(c)
    out[0] = 1.0 / c[0]
    for n in range(1, c.size):
        out[n] = -sum(c[i] * out[n - i] for i in range(1, n + 1)) / c[0]
    return out


def success_prob_dense_los(config: NetworkConfig, k: int, theta: float) -> float:
    """Success probability of a tier-k user when every link is LOS and noise is ignored.

    With no blockage the serving path loss integrates out in closed form:
    P = sum_{m < M_L} [z^m] V / T(z), where V = sum_j lambda_j c_j^delta,
    T(z) = sum_j lambda_j c_j^delta sum_G w_G 2F1(-delta, M_L; 1-delta; -a_jG (1-z)),
    delta = 2/alpha_L and a_jG = theta G B_k / (Psi B_j).
    Requires alpha_L > 2; at alpha_L = 2 the LOS interference is unbounded.
    """
    ch = config.channel
    delta = 2.0 / ch.alpha_los
    if delta >= 1.0:
        raise ValueError("dense-LOS closed form needs alpha_los > 2")
    m = ch.m_los
    if theta <= 0:
        return 1.0
    psi = config.serving_gain
    v = 0.0
    t = np.zeros(m)
    for j, tj in enumerate(config.tiers):
        wj = tj.density * config.exclusion_ratio(j, k) ** delta
        v += wj
        for gain, prob in config.antenna.gain_marks():
            if prob <= 0:
                continue
            a = theta * gain * config.tiers[k].bias / (psi * tj.bias)
            t += wj * prob * _f_coeffs(delta, m, a, m)
    return float(min(1.0, max(0.0, v * reciprocal_series(t).sum())))


def laplace_exponent_mc(config: NetworkConfig, k: int, state: LinkState, pathloss: float, theta: float,
                        n_fields: int, rng: np.random.Generator, radius: float) -> float:
    """Monte Carlo estimate of log E[exp(-s (sigma^2 + I))] at fixed serving path loss.

    Independent check of ``q_0``: interferer fields are drawn directly (PPP beyond
    the biased exclusion, LOS marks, gain marks, Nakagami fading).
    """
    ch = config.channel
    s = theta * ch.m(state) * pathloss / (config.tiers[k].tx_power * config.serving_gain)
    vals = np.empty(n_fields)
    for i in range(n_fields):
        total = 0.0
        for j, tj in enumerate(config.tiers):
            n = rng.poisson(tj.density * math.pi * radius**2)
            d = radius * np.sqrt(rng.random(n))
            los = rng.random(n) < np.exp(-tj.blockage * d)
            pl = np.where(los, ch.kappa_los * d**ch.alpha_los, ch.kappa_nlos * d**ch.alpha_nlos)
            keep = pl > config.exclusion_ratio(j, k) * pathloss
            main = rng.random(n) < config.antenna.p_main
            gain = np.where(main, config.antenna.main_gain, config.antenna.side_gain)
            mnu = np.where(los, ch.m_los, ch.m_nlos)
            h = rng.gamma(mnu, 1.0 / mnu)
            total += float(np.sum((tj.tx_power * gain * h / pl)[keep]))
        vals[i] = math.exp(-s * (config.noise_power + total))
    return math.log(vals.mean())
