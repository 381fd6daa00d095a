"""Moments of the conditional success probability and the meta distribution.

Serving fading is handled with the Gamma-CDF bound: given the serving path loss
and V = s (sigma^2 + I), the success probability is taken as

    P_A(V) = 1 - (1 - exp(-zeta V))^M,   zeta = (M!)^(-1/M),

which is exact for M = 1. Integer moments E[P_A^b] expand binomially into
Laplace transforms of V. Everything beyond integer moments goes through the
distribution of V itself:
V = s sigma^2 + theta J with J = s I / theta, and the per-node CDF of J is
obtained once per serving grid by numerical Laplace inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator

from mmhetnet.laplace import DEFAULT_ORDER, GridOrder, ServingGrid, build_grid
from mmhetnet.model import LINK_STATES, LinkState, NetworkConfig
from mmhetnet.specialfn import DEFAULT_INVERSION, InversionSpec, alzer_zeta, cdf_inversion_nodes

# the binomial expansion loses about log10(C(Mb, Mb/2)) digits
MAX_BINOMIAL_ORDER = 40


@dataclass(frozen=True)
class LawGrid:
    """Abscissae (in units of J) on which per-node CDFs are tabulated."""

    x_min: float = 1e-10
    x_max: float = 1e6
    per_decade: int = 12

    def points(self) -> np.ndarray:
        n = int(round(math.log10(self.x_max / self.x_min) * self.per_decade)) + 1
        return np.logspace(math.log10(self.x_min), math.log10(self.x_max), n)


DEFAULT_LAW_GRID = LawGrid()


@dataclass
class MomentSet:
    theta: float
    per_link: dict = field(default_factory=dict)  # (k, state) -> {b: xi_b}
    totals: dict = field(default_factory=dict)  # b -> xi_b

    def variance(self) -> float:
        return max(0.0, self.totals[2] - self.totals[1] ** 2)


def _pa(v, m: int):
    zeta = alzer_zeta(m)
    return -np.expm1(m * np.log(-np.expm1(-zeta * v)))


def _pa_deriv(v, m: int):
    zeta = alzer_zeta(m)
    e = np.exp(-zeta * v)
    return -m * zeta * e * (-np.expm1(-zeta * v)) ** (m - 1)


def _pa_ratio(v, m: int):
    """P_A / (m e^{-zeta v}), which tends to 1 far out where both factors underflow."""
    u = np.exp(-alzer_zeta(m) * np.asarray(v, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        q = -np.expm1(m * np.log1p(-u)) / (m * u)
    return np.where(u > 0, q, 1.0)


def _log_pa(v, m: int):
    zeta = alzer_zeta(m)
    return math.log(m) - zeta * np.asarray(v, dtype=float) + np.log(_pa_ratio(v, m))


def _dlog_pa(v, m: int):
    """d/dv log P_A."""
    zeta = alzer_zeta(m)
    u = np.exp(-zeta * np.asarray(v, dtype=float))
    return -zeta * (1.0 - u) ** (m - 1) / _pa_ratio(v, m)


# --- integer moments ----------------------------------------------------------------------------

def _binomial_weights(m: int, b: int) -> np.ndarray:
    """c[t2] with E[P_A^b] = sum_t2 c[t2] E[exp(-zeta t2 V)]."""
    c = np.zeros(m * b + 1)
    for t1 in range(b + 1):
        for t2 in range(m * t1 + 1):
            c[t2] += special.comb(b, t1, exact=True) * special.comb(m * t1, t2, exact=True) * (-1) ** (t1 + t2)
    return c


def moment_curve(grid: ServingGrid, theta: float, b: int) -> np.ndarray:
    """E[P_A^b | l] at every outer node of ``grid``."""
    if b < 0 or int(b) != b:
        raise ValueError("b must be a nonnegative integer")
    if b == 0 or theta <= 0:
        return np.ones_like(grid.l)
    m = grid.m
    if m * b > MAX_BINOMIAL_ORDER:
        law = interference_law(grid)
        return law.expect(theta, lambda v: _pa(v, m) ** b, lambda v: b * _pa(v, m) ** (b - 1) * _pa_deriv(v, m))
    zeta = alzer_zeta(m)
    out = np.zeros_like(grid.l)
    for t2, c in enumerate(_binomial_weights(m, b)):
        if c:
            out += c * (np.exp(grid.log_laplace(theta, zeta * t2)) if t2 else 1.0)
    return np.clip(out, 0.0, 1.0)


def moment(config: NetworkConfig, k: int, state: LinkState, theta: float, b: int,
           order: GridOrder = DEFAULT_ORDER) -> float:
    """xi_b of the conditional success probability for users served by (k, state)."""
    if b < 1:
        raise ValueError("b must be >= 1")
    grid = build_grid(config, k, state, order)
    _require_mass(grid)
    return float(grid.expect(moment_curve(grid, theta, b)))


def moment_total(config: NetworkConfig, theta: float, b: int, order: GridOrder = DEFAULT_ORDER) -> float:
    total = 0.0
    for k in range(config.n_tiers):
        for state in LINK_STATES:
            grid = build_grid(config, k, state, order)
            total += grid.weight @ moment_curve(grid, theta, b)
    return float(total)


def moment_set(config: NetworkConfig, theta: float, orders=(1, 2), order: GridOrder = DEFAULT_ORDER) -> MomentSet:
    out = MomentSet(theta)
    totals = {b: 0.0 for b in orders}
    for k in range(config.n_tiers):
        for state in LINK_STATES:
            grid = build_grid(config, k, state, order)
            row = {0: 1.0}
            for b in orders:
                curve = moment_curve(grid, theta, b)
                totals[b] += grid.weight @ curve
                row[b] = float(grid.expect(curve)) if grid.association > 0 else float("nan")
            out.per_link[(k, state)] = row
    out.totals = {0: 1.0, **{b: float(v) for b, v in totals.items()}}
    return out


def variance(config: NetworkConfig, theta: float, order: GridOrder = DEFAULT_ORDER) -> float:
    """Network-wide xi_2 - xi_1^2, floored at 0."""
    ms = moment_set(config, theta, (1, 2), order)
    return ms.variance()


def tier_variance(config: NetworkConfig, k: int, theta: float, order: GridOrder = DEFAULT_ORDER) -> float:
    """Variance of the conditional success probability among users of tier ``k``."""
    m1 = m2 = a = 0.0
    for state in LINK_STATES:
        grid = build_grid(config, k, state, order)
        m1 += grid.weight @ moment_curve(grid, theta, 1)
        m2 += grid.weight @ moment_curve(grid, theta, 2)
        a += grid.association
    return max(0.0, m2 / a - (m1 / a) ** 2)


def _require_mass(grid: ServingGrid) -> None:
    if grid.association <= 0:
        from mmhetnet.coverage import UndefinedConditionalError

        raise UndefinedConditionalError(f"association probability of tier {grid.tier + 1} {grid.state} is zero")


# --- beta approximation ---------------------------------------------------------------------------

def beta_parameters(m1: float, m2: float) -> tuple[float, float] | None:
    """Shape parameters matching mean ``m1`` and second moment ``m2``; None if degenerate."""
    var = m2 - m1 * m1
    if not (0.0 < m1 < 1.0) or var <= 0.0:
        return None
    b = (m1 - m2) * (1.0 - m1) / var
    if b <= 0:
        return None
    return m1 * b / (1.0 - m1), b


def beta_ccdf(m1: float, m2: float, y):
    """1 - I_y(a, b) with moment-matched shapes; a step at ``m1`` when the variance vanishes."""
    y = np.asarray(y, dtype=float)
    params = beta_parameters(m1, m2)
    if params is None:
        out = (y < m1).astype(float)
    else:
        out = special.betaincc(params[0], params[1], np.clip(y, 0.0, 1.0))
    return out if out.ndim else float(out)


def meta_distribution_beta(config: NetworkConfig, theta: float, y, order: GridOrder = DEFAULT_ORDER):
    """Fraction of users whose conditional success probability exceeds ``y`` (beta fit)."""
    ms = moment_set(config, theta, (1, 2), order)
    return beta_ccdf(ms.totals[1], ms.totals[2], y)


# --- distribution of V ----------------------------------------------------------------------------

@dataclass
class InterferenceLaw:
    """Per-node CDF of J = s I / theta for the users of one serving grid."""

    grid: ServingGrid
    x: np.ndarray  # (n_x,)
    cdf: np.ndarray  # (n_nodes, n_x)

    def _interp(self):
        if not hasattr(self, "_pchip"):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                self._pchip = PchipInterpolator(np.log(self.x), self.cdf, axis=1, extrapolate=False)
        return self._pchip

    def cdf_of_v(self, theta: float, v) -> np.ndarray:
        """P(V <= v | l) per node, V = s (sigma^2 + I); shape (n_nodes, len(v))."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        shift = self.grid.noise(theta)[:, None]
        xj = (v[None, :] - shift) / theta
        out = np.zeros(xj.shape)
        pos = xj > 0
        lx = np.log(np.where(pos, xj, 1.0))
        above = xj >= self.x[-1]
        out[above] = 1.0
        mid = pos & ~above & (xj > self.x[0])
        if np.any(mid):
            pch = self._interp()
            rows = np.nonzero(mid)
            # evaluate node by node to keep the interpolant aligned with its row
            for i in np.unique(rows[0]):
                cols = mid[i]
                with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                    vals = pch(lx[i, cols])[i]
                out[i, cols] = vals
        low = pos & (xj <= self.x[0])
        out[low] = self.cdf[np.nonzero(low)[0], 0]
        return np.clip(out, 0.0, 1.0)

    def expect(self, theta: float, g, dg, g_inf: float = 0.0) -> np.ndarray:
        """E[g(V) | l] per node by parts: g(c) + int g'(c + theta x) theta (1 - F(x)) dx.

        ``g`` and ``dg`` are vectorised; they may return complex values or carry a
        trailing axis (broadcast over the abscissae as the first axis).
        """
        c = self.grid.noise(theta)
        x = self.x
        surv = 1.0 - self.cdf  # (n, n_x)
        v = c[:, None] + theta * x[None, :]
        dgv = dg(v)
        extra = dgv.ndim - 2
        surv_e = surv.reshape(surv.shape + (1,) * extra)
        xe = x.reshape((1, -1) + (1,) * extra)
        integrand = dgv * surv_e * theta * xe
        lx = np.log(x)
        body = np.trapezoid(integrand, lx, axis=1)
        head = g(c[:, None] + theta * x[None, :1])[:, 0] - g(c[:, None])[:, 0]
        tail = (g_inf - g(v[:, -1:])[:, 0]) * surv_e[:, -1, ...]
        return g(c[:, None])[:, 0] + head + body + tail


_LAW_CACHE: dict = {}


def interference_law(grid: ServingGrid, law_grid: LawGrid = DEFAULT_LAW_GRID,
                     spec: InversionSpec = DEFAULT_INVERSION) -> InterferenceLaw:
    """Invert the Laplace transform of J = sI/theta at every node of ``grid``."""
    key = (id(grid), law_grid, spec)
    hit = _LAW_CACHE.get(key)
    if hit is not None and hit.grid is grid:
        return hit
    x = law_grid.points()
    p, eta = cdf_inversion_nodes(x, spec)
    pf = p.ravel()
    expo = np.zeros((grid.l.size, pf.size), dtype=complex)
    for comp in grid.components:
        fn = np.zeros((comp.decay.size, pf.size), dtype=complex)
        for t_unit, wg in comp.marks:
            t = (t_unit * comp.decay)[:, None]
            fn += wg * (1.0 - (1.0 + pf[None, :] * t) ** (-comp.m))
        expo -= comp.mass @ fn
    lap = np.exp(expo) / pf[None, :]
    cdf = (lap.real.reshape(grid.l.size, *p.shape) * eta[None, :, :]).sum(axis=2)
    cdf = np.maximum.accumulate(np.clip(cdf, 0.0, 1.0), axis=1)
    law = InterferenceLaw(grid, x, cdf)
    if len(_LAW_CACHE) > 32:
        _LAW_CACHE.clear()
    _LAW_CACHE[key] = law
    return law


def moment_complex_curve(grid: ServingGrid, theta: float, t: float) -> np.ndarray:
    m = grid.m

    def g(v):
        return np.exp(1j * t * _log_pa(v, m))

    def dg(v):
        return 1j * t * g(v) * _dlog_pa(v, m)

    law = interference_law(grid)
    # P_A -> 0 far out, where P_A^{it} has no limit; its average against the
    # vanishing survival mass is what the tail term needs, and the survival at
    # x_max is below the inversion error anyway
    return law.expect(theta, g, dg, g_inf=0.0)


def moment_complex(config: NetworkConfig, k: int, state: LinkState, theta: float, t: float,
                   order: GridOrder = DEFAULT_ORDER) -> complex:
    """E[P_A^{i t}] for users served by (k, state)."""
    if t == 0:
        return 1.0 + 0.0j
    grid = build_grid(config, k, state, order)
    _require_mass(grid)
    if theta <= 0:
        return 1.0 + 0.0j
    return complex(grid.expect(moment_complex_curve(grid, theta, t)))


def meta_curve(grid: ServingGrid, theta: float, y) -> np.ndarray:
    """P(P_A > y | l) per node and per y; shape (n_nodes, len(y))."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    m = grid.m
    zeta = alzer_zeta(m)
    if theta <= 0:
        return (y[None, :] < 1.0) * np.ones((grid.l.size, 1))
    with np.errstate(divide="ignore"):
        inner = -np.expm1(np.log1p(-np.clip(y, 0.0, 1.0)) / m)  # 1 - (1 - y)^(1/M)
        v_y = -np.log(inner) / zeta
    out = np.zeros((grid.l.size, y.size))
    finite = np.isfinite(v_y) & (v_y > 0)
    if np.any(finite):
        out[:, finite] = interference_law(grid).cdf_of_v(theta, v_y[finite])
    out[:, y <= 0.0] = 1.0
    return out


def meta_distribution_exact(config: NetworkConfig, theta: float, y, order: GridOrder = DEFAULT_ORDER,
                            link: tuple[int, LinkState] | None = None):
    """Fraction of users (optionally of one serving class) with P_A above ``y``.

    Uses the exact law of V at each serving path loss; the only approximation
    beyond quadrature is the Gamma-CDF bound inside P_A.
    """
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    links = [link] if link is not None else [(k, s) for k in range(config.n_tiers) for s in LINK_STATES]
    num = np.zeros(y_arr.size)
    den = 0.0
    for k, s in links:
        grid = build_grid(config, k, s, order)
        if grid.association <= 0:
            continue
        num += grid.weight @ meta_curve(grid, theta, y_arr)
        den += grid.association
    out = np.clip(num / den if link is not None else num, 0.0, 1.0)
    return out if np.ndim(y) else float(out[0])
