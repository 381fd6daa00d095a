"""Probability that the typical user is served by a LOS/NLOS BS of each tier."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from mmhetnet import intensity
from mmhetnet.model import LINK_STATES, LinkState, NetworkConfig
from mmhetnet.specialfn import DEFAULT_QUAD, QuadratureSpec


def _void_exponent(config: NetworkConfig, k: int, l: float) -> float:
    return sum(
        float(intensity.lambda_total(config, j, config.exclusion_ratio(j, k) * l))
        for j in range(config.n_tiers)
    )


def _log_scale_where(config: NetworkConfig, k: int, level: float) -> float:
    # log path loss at which the void exponent crosses ``level`` (it is nondecreasing in l)
    lo, hi = -60.0, 120.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _void_exponent(config, k, math.exp(mid)) < level:
            lo = mid
        else:
            hi = mid
    return lo


def _start_scale(config: NetworkConfig, k: int) -> float:
    # path loss at which about 1e-9 BSs are expected to beat the serving candidate
    return math.exp(_log_scale_where(config, k, 1e-9))


def association_prob(config: NetworkConfig, k: int, state: LinkState,
                     spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """A_{k,state} = int Lambda'_{k,state}(l) exp(-sum_j Lambda_j([0, c_j l))) dl."""

    def integrand(u: float) -> float:
        l = math.exp(u)
        return float(intensity.lambda_deriv(config, k, state, l)) * l * math.exp(-_void_exponent(config, k, l))

    # unit panels in log l: the mass of a rare class can sit far beyond a long near-zero stretch
    lo = _log_scale_where(config, k, 1e-15)
    hi = _log_scale_where(config, k, 745.0)
    edges = np.linspace(lo, hi, max(2, int(math.ceil(hi - lo)) + 1))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(integrand, a, b, epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol * 1e-2, limit=200)[0]
    return total


def association_table(config: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUAD) -> dict[tuple[int, LinkState], float]:
    return {(k, s): association_prob(config, k, s, spec) for k in range(config.n_tiers) for s in LINK_STATES}


def tier_association(table: dict[tuple[int, LinkState], float], k: int) -> float:
    return sum(v for (kk, _), v in table.items() if kk == k)


def association_prob_step(config: NetworkConfig, r1: float, r2: float, k: int) -> float:
    """LOS association probability of tier ``k`` (0 or 1) with step-function blockage.

    Links shorter than R_k are LOS, longer ones NLOS. NLOS BSs are assumed never
    to beat a LOS candidate, which holds whenever kappa_N R_j^alpha_N exceeds the
    biased LOS path losses involved (any realistic R_j of metres or more).
    Integrating the serving LOS distance gives, with weights
    W_j = lambda_j (P_j B_j)^delta, delta = 2/alpha_L and
    rho_j = (P_j B_j)^delta, a saturating first branch and, once the other tier's
    LOS range is exhausted, a second branch whose extra term accounts for the
    distances where only this tier can still have a closer LOS BS.
    """
    if config.n_tiers != 2:
        raise ValueError("step-function association is defined for two tiers")
    if not (r1 > 0 and r2 > 0):
        raise ValueError("LOS ranges must be positive")
    delta = 2.0 / config.channel.alpha_los
    radii = (r1, r2)
    rho = [config.biased_power(j) ** delta for j in range(2)]
    lam = [t.density for t in config.tiers]
    o = 1 - k
    total_w = lam[0] * rho[0] + lam[1] * rho[1]
    share = lam[k] * rho[k] / total_w
    # the other tier saturates at serving distance r* = R_o sqrt(rho_k / rho_o)
    r_star = radii[o] * math.sqrt(rho[k] / rho[o])
    if r_star > radii[k]:
        return share * -math.expm1(-math.pi * radii[k] ** 2 * total_w / rho[k])
    first = share * -math.expm1(-math.pi * radii[o] ** 2 * total_w / rho[o])
    tail = math.exp(-math.pi * radii[o] ** 2 * total_w / rho[o]) - math.exp(-math.pi * sum(
        lam[j] * radii[j] ** 2 for j in range(2)))
    return first + tail


def association_prob_step_numeric(config: NetworkConfig, r1: float, r2: float, k: int,
                                  spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Quadrature of the association integral under step-function LOS intensities.

    Lambda_{j,L}([0,x)) = pi lambda_j min((x/kappa_L)^(2/alpha_L), R_j^2), NLOS BSs
    beyond R_j with the NLOS law. Serves as an oracle for ``association_prob_step``.
    """
    ch = config.channel
    radii = (r1, r2)

    def lam_total(j: int, x: float) -> float:
        t = config.tiers[j]
        r_los = (x / ch.kappa_los) ** (1.0 / ch.alpha_los)
        r_nlos = (x / ch.kappa_nlos) ** (1.0 / ch.alpha_nlos)
        los = math.pi * t.density * min(r_los, radii[j]) ** 2
        nlos = math.pi * t.density * max(0.0, r_nlos**2 - radii[j] ** 2)
        return los + nlos

    x_edge = ch.kappa_los * radii[k] ** ch.alpha_los
    dens = 2.0 * math.pi * config.tiers[k].density / (ch.alpha_los * ch.kappa_los ** (2.0 / ch.alpha_los))

    def integrand(x: float) -> float:
        if x <= 0 or x >= x_edge:
            return 0.0
        expo = sum(lam_total(j, config.exclusion_ratio(j, k) * x) for j in range(2))
        return dens * x ** (2.0 / ch.alpha_los - 1.0) * math.exp(-expo)

    from scipy import integrate

    breaks = sorted({x_edge * f for f in (1e-6, 1e-4, 1e-2, 0.1, 0.5)}
                    | {ch.kappa_los * (radii[j] ** ch.alpha_los) / config.exclusion_ratio(j, k)
                       for j in range(2) if ch.kappa_los * radii[j] ** ch.alpha_los / config.exclusion_ratio(j, k) < x_edge})
    pts = [0.0] + breaks + [x_edge]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(integrand, a, b, epsabs=0.0, epsrel=spec.rel_tol * 1e-2, limit=400)[0]
    return total
