"""Intensity measures of the path-loss point processes seen from the typical user.

For tier k with LOS probability exp(-beta d), the BSs with path loss below x
number, in expectation,

    Lambda_{k,L}([0,x)) = 2 pi lambda int_0^u v exp(-beta v) dv,   u = (x/kappa_L)^(1/alpha_L)
    Lambda_{k,N}([0,x)) = 2 pi lambda int_0^v t (1 - exp(-beta t)) dt, v = (x/kappa_N)^(1/alpha_N)

Both closed forms are evaluated through the dimensionless helpers below, which
switch to power series where the exponential forms cancel catastrophically
(small beta times distance).
"""

from __future__ import annotations

import math

import numpy as np

from mmhetnet.model import LinkState, NetworkConfig

TOTAL = "total"

# Series cutoff: beyond this the closed forms lose < ~1e-14 relative accuracy.
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 16


def _series(y, start: int, sign0: float):
    # sum_{n>=start} sign0 * (-1)^(n-start) (n-1) y^n / n!
    out = np.zeros_like(y)
    for n in range(start + _SERIES_TERMS - 1, start - 1, -1):
        coef = sign0 * (-1.0) ** (n - start) * (n - 1) / math.factorial(n)
        out = out * y + coef
    return out * y**start


def los_mass_unit(y):
    """int_0^y v e^{-v} dv = 1 - e^{-y}(1+y)."""
    y = np.asarray(y, dtype=float)
    small = y < _SERIES_CUTOFF
    out = np.empty_like(y)
    ys = y[small]
    out[small] = _series(ys, 2, 1.0)
    yl = y[~small]
    out[~small] = -np.expm1(-yl) - yl * np.exp(-yl)
    return out


def nlos_mass_unit(y):
    """int_0^y v (1 - e^{-v}) dv = y^2/2 - 1 + e^{-y}(1+y)."""
    y = np.asarray(y, dtype=float)
    small = y < _SERIES_CUTOFF
    out = np.empty_like(y)
    ys = y[small]
    out[small] = _series(ys, 3, 1.0)
    yl = y[~small]
    out[~small] = 0.5 * yl * yl - (-np.expm1(-yl) - yl * np.exp(-yl))
    return out


def _radius(config: NetworkConfig, state: LinkState, x):
    ch = config.channel
    return (np.asarray(x, dtype=float) / ch.kappa(state)) ** (1.0 / ch.alpha(state))


def _wrap(out, x):
    return out if np.ndim(x) else float(out)


def los_count_within(lam: float, beta: float, d):
    """Expected number of LOS BSs closer than distance ``d``."""
    d = np.asarray(d, dtype=float)
    return 2.0 * math.pi * lam * d * d * _ratio(los_mass_unit, beta * d)


def nlos_count_within(lam: float, beta: float, d):
    d = np.asarray(d, dtype=float)
    return 2.0 * math.pi * lam * d * d * _ratio(nlos_mass_unit, beta * d)


def _ratio(unit, y):
    # unit(y) / y^2 without dividing by zero at y = 0
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    nz = y > 0
    out[nz] = unit(y[nz]) / (y[nz] ** 2)
    if unit is los_mass_unit:
        out[~nz] = 0.5
    return out


def lambda_los(config: NetworkConfig, k: int, x):
    t = config.tiers[k]
    return _wrap(los_count_within(t.density, t.blockage, _radius(config, LinkState.LOS, x)), x)


def lambda_nlos(config: NetworkConfig, k: int, x):
    t = config.tiers[k]
    return _wrap(nlos_count_within(t.density, t.blockage, _radius(config, LinkState.NLOS, x)), x)


def lambda_total(config: NetworkConfig, k: int, x):
    return _wrap(np.asarray(lambda_los(config, k, x)) + np.asarray(lambda_nlos(config, k, x)), x)


def lambda_state(config: NetworkConfig, k: int, state, x):
    if state is LinkState.LOS:
        return lambda_los(config, k, x)
    if state is LinkState.NLOS:
        return lambda_nlos(config, k, x)
    if state == TOTAL:
        return lambda_total(config, k, x)
    raise ValueError(f"unknown state {state!r}")


def lambda_deriv(config: NetworkConfig, k: int, state, x):
    """Density d/dx Lambda_{k,state}([0,x)) for x > 0."""
    if state == TOTAL:
        return _wrap(np.asarray(lambda_deriv(config, k, LinkState.LOS, x))
                     + np.asarray(lambda_deriv(config, k, LinkState.NLOS, x)), x)
    t = config.tiers[k]
    ch = config.channel
    xa = np.asarray(x, dtype=float)
    alpha, kappa = ch.alpha(state), ch.kappa(state)
    r = (xa / kappa) ** (1.0 / alpha)
    base = 2.0 * math.pi * t.density / alpha * kappa ** (-2.0 / alpha) * xa ** (2.0 / alpha - 1.0)
    if state is LinkState.LOS:
        out = base * np.exp(-t.blockage * r)
    else:
        out = base * -np.expm1(-t.blockage * r)
    return _wrap(out, x)


def pathloss_ccdf(config: NetworkConfig, k: int, state, x):
    """P(no tier-k BS of the given state has path loss below x)."""
    return _wrap(np.exp(-np.asarray(lambda_state(config, k, state, x))), x)


def pathloss_pdf(config: NetworkConfig, k: int, state, x):
    return _wrap(np.asarray(lambda_deriv(config, k, state, x))
                 * np.exp(-np.asarray(lambda_state(config, k, state, x))), x)


def los_total_mass(config: NetworkConfig, k: int) -> float:
    """Lambda_{k,L}([0, inf)) = 2 pi lambda / beta^2: the LOS process is finite."""
    t = config.tiers[k]
    return 2.0 * math.pi * t.density / t.blockage**2


def lambda_total_closed_form(config: NetworkConfig, k: int, x):
    """Three-term expression for Lambda_k, written out as in the derivation.

    Kept for cross-checking; ``lambda_total`` is the numerically stable path.
    """
    t = config.tiers[k]
    ch = config.channel
    xa = np.asarray(x, dtype=float)
    u = (xa / ch.kappa_los) ** (1.0 / ch.alpha_los)
    v = (xa / ch.kappa_nlos) ** (1.0 / ch.alpha_nlos)
    lam, b = t.density, t.blockage
    out = (math.pi * lam * v**2
           + 2 * math.pi * lam / b**2 * (1 - np.exp(-b * u) * (1 + b * u))
           - 2 * math.pi * lam / b**2 * (1 - np.exp(-b * v) * (1 + b * v)))
    return _wrap(out, x)
