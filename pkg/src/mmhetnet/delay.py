"""Negative moments of the conditional success probability: local delay and jitter.

With Z = 1 - P_A(V) in [0, 1), 1/P_A = sum_t Z^t and 1/P_A^2 = sum_t (t+1) Z^t,
so both negative moments are series in a_t = E[Z^t]. The terms decay like a
power t^(-kappa) set by the exponential tail of V; the series is summed
directly and its remainder estimated from the local decay rate. kappa <= 1
(<= 2 for the second moment) means the moment is infinite.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from mmhetnet.laplace import DEFAULT_ORDER, GridOrder, ServingGrid, build_grid
from mmhetnet.model import LINK_STATES, LinkState, NetworkConfig
from mmhetnet.moments import _require_mass, interference_law
from mmhetnet.specialfn import alzer_zeta

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Divergent:
    """Marker for an infinite negative moment; ``partial`` is the last partial sum."""

    partial: float = math.inf
    terms: int = 0

    def __bool__(self) -> bool:
        return False


def is_divergent(x) -> bool:
    return isinstance(x, Divergent)


@dataclass(frozen=True)
class SeriesPolicy:
    rel_tol: float = 1e-6
    consecutive: int = 3
    max_terms: int = 500


DEFAULT_POLICY = SeriesPolicy()


@dataclass
class DelayResult:
    mean_local_delay: float | Divergent
    second_neg_moment: float | Divergent
    jitter: float | Divergent
    terms_used: dict = field(default_factory=dict)


_TERM_CACHE: dict = {}


def term_curve(grid: ServingGrid, theta: float, n_terms: int) -> np.ndarray:
    """E[Z^t | l] for t = 0 .. n_terms-1 at every outer node; shape (n_nodes, n_terms).

    By parts against the tabulated law of J: E[Z^t] = int d/dv (1 - e^{-zeta v})^{Mt} (1 - F) dv,
    with Z^t -> 1 far out and Z^t = 0 at v = 0.
    """
    key = (id(grid), float(theta))
    hit = _TERM_CACHE.get(key)
    if hit is not None and hit[0] is grid and hit[1].shape[1] >= n_terms:
        return hit[1][:, :n_terms]
    m = grid.m
    zeta = alzer_zeta(m)
    out = np.zeros((grid.l.size, n_terms))
    out[:, 0] = 1.0
    if theta <= 0 or n_terms == 1:
        return out
    law = interference_law(grid)
    c = grid.noise(theta)
    lx = np.log(law.x)
    v = c[:, None] + theta * law.x[None, :]
    log_base = np.log(-np.expm1(-zeta * v))
    log_base_c = np.log(-np.expm1(-zeta * np.maximum(c, 1e-300)))
    log_dz = math.log(m * zeta) - zeta * v + np.log(theta * law.x)[None, :]  # (M zeta e^{-zeta v}) * dv/dlog x
    surv = 1.0 - law.cdf
    x0 = theta * law.x[0]
    log_base_0 = np.log(-np.expm1(-zeta * (c + x0)))
    chunk = 64
    for start in range(1, n_terms, chunk):
        tau = np.arange(start, min(n_terms, start + chunk), dtype=float)
        # d/dv Z^t = M t zeta e^{-zeta v} (1 - e^{-zeta v})^{Mt - 1}
        integrand = tau[None, None, :] * np.exp(log_dz[..., None] + (m * tau[None, None, :] - 1.0) * log_base[..., None])
        body = np.trapezoid(integrand * surv[..., None], lx, axis=1)
        zc = np.exp(m * tau[None, :] * log_base_c[:, None])
        head = np.exp(m * tau[None, :] * log_base_0[:, None]) - zc
        tail = (1.0 - np.exp(m * tau[None, :] * log_base[:, -1:])) * surv[:, -1:]
        out[:, start:start + tau.size] = zc + head + body + tail
    out = np.clip(out, 0.0, 1.0)
    if len(_TERM_CACHE) > 64:
        _TERM_CACHE.clear()
    _TERM_CACHE[key] = (grid, out)
    return out


def series_terms(config: NetworkConfig, k: int, state: LinkState, theta: float,
                 n_terms: int = DEFAULT_POLICY.max_terms, order: GridOrder = DEFAULT_ORDER) -> np.ndarray:
    """a_t = E[Z^t] averaged over users served by (k, state)."""
    grid = build_grid(config, k, state, order)
    _require_mass(grid)
    return grid.expect(term_curve(grid, theta, n_terms))


def _tail(a: np.ndarray, t: int, power: int) -> tuple[float, float]:
    """Remainder sum_{s>t} (s+1)^(power-1) a_s from the decay rate at t; returns (tail, kappa)."""
    half = max(1, t // 2)
    if a[t] <= 0:
        return 0.0, math.inf
    if a[half] <= a[t]:
        return math.inf, 0.0
    kappa = math.log(a[half] / a[t]) / math.log(t / half)
    expo = kappa - (power - 1)
    if expo <= 1:
        return math.inf, kappa
    # integral of a_t (s/t)^(-kappa) s^(power-1) over s > t + 1/2
    tail = a[t] * t**kappa * (t + 0.5) ** (1 - expo) / (expo - 1)
    return tail, kappa


def sum_series(a: np.ndarray, power: int, policy: SeriesPolicy = DEFAULT_POLICY) -> tuple[float | Divergent, int]:
    """sum_t (t+1)^(power-1) a_t with remainder estimate; (value or Divergent, terms used)."""
    weights = np.arange(1, a.size + 1, dtype=float) ** (power - 1)
    partial = np.cumsum(weights * a)
    prev = None
    calm = 0
    for t in range(4, a.size):
        tail, _ = _tail(a, t, power)
        est = partial[t] + tail
        if prev is not None and math.isfinite(est) and math.isfinite(prev):
            if abs(est - prev) < policy.rel_tol * est:
                calm += 1
                if calm >= policy.consecutive:
                    return float(est), t + 1
            else:
                calm = 0
        else:
            calm = 0
        prev = est
    return Divergent(float(partial[-1]), int(a.size)), int(a.size)


def _link_moment(config, k, state, theta, power, policy, order):
    grid = build_grid(config, k, state, order)
    _require_mass(grid)
    if theta <= 0:
        return 1.0, 1
    first = min(100, policy.max_terms)
    val, n = sum_series(grid.expect(term_curve(grid, theta, first)), power, policy)
    if is_divergent(val) and first < policy.max_terms:
        val, n = sum_series(grid.expect(term_curve(grid, theta, policy.max_terms)), power, policy)
    return val, n


def mean_local_delay(config: NetworkConfig, k: int, state: LinkState, theta: float,
                     policy: SeriesPolicy = DEFAULT_POLICY, order: GridOrder = DEFAULT_ORDER) -> float | Divergent:
    """Expected number of transmissions until success for users served by (k, state)."""
    return _link_moment(config, k, state, theta, 1, policy, order)[0]


def second_negative_moment(config: NetworkConfig, k: int, state: LinkState, theta: float,
                           policy: SeriesPolicy = DEFAULT_POLICY, order: GridOrder = DEFAULT_ORDER) -> float | Divergent:
    return _link_moment(config, k, state, theta, 2, policy, order)[0]


def _weighted(config, theta, power, policy, order, tiers=None):
    total = 0.0
    mass = 0.0
    used = {}
    for k in range(config.n_tiers) if tiers is None else tiers:
        for state in LINK_STATES:
            grid = build_grid(config, k, state, order)
            if grid.association <= 0:
                continue
            val, n = _link_moment(config, k, state, theta, power, policy, order)
            used[(k, state)] = n
            if is_divergent(val):
                return Divergent(val.partial, n), used
            total += grid.association * val
            mass += grid.association
    return total / mass, used


def tier_mean_local_delay(config: NetworkConfig, k: int, theta: float, policy: SeriesPolicy = DEFAULT_POLICY,
                          order: GridOrder = DEFAULT_ORDER) -> float | Divergent:
    return _weighted(config, theta, 1, policy, order, tiers=[k])[0]


def delay_result(config: NetworkConfig, theta: float, policy: SeriesPolicy = DEFAULT_POLICY,
                 order: GridOrder = DEFAULT_ORDER) -> DelayResult:
    d1, used1 = _weighted(config, theta, 1, policy, order)
    d2, used2 = _weighted(config, theta, 2, policy, order)
    used = {key: max(used1.get(key, 0), used2.get(key, 0)) for key in set(used1) | set(used2)}
    if is_divergent(d1) or is_divergent(d2):
        jit = d2 if is_divergent(d2) else d1
        return DelayResult(d1, d2, jit, used)
    return DelayResult(d1, d2, max(0.0, d2 - d1 * d1), used)


def network_jitter(config: NetworkConfig, theta: float, policy: SeriesPolicy = DEFAULT_POLICY,
                   order: GridOrder = DEFAULT_ORDER) -> float | Divergent:
    """sum A xi_{-2} - (sum A xi_{-1})^2, floored at 0."""
    return delay_result(config, theta, policy, order).jitter
