"""Monte Carlo oracle: PPP realizations and their fading-averaged conditional success.

Nothing here calls the analytic modules except ``rate.load_distribution`` for sampling
cell loads, so the simulator can be used to check them.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from mmhetnet.model import LinkState, NetworkConfig

DEFAULT_N_FADING = 500
NO_SERVER = -1


@dataclass
class Realization:
    """One draw of all tiers inside a disc around the typical user.

    BS records are stored column-wise; ``tier[i]`` tells which tier BS ``i``
    belongs to. ``main_lobe`` is the gain mark the BS presents to the user when
    it interferes.
    """

    distance: np.ndarray
    tier: np.ndarray
    los: np.ndarray
    path_loss: np.ndarray
    main_lobe: np.ndarray
    serving: int
    seed: int

    @property
    def n_bs(self) -> int:
        return int(self.distance.size)

    @property
    def serving_tier(self) -> int:
        return int(self.tier[self.serving]) if self.serving != NO_SERVER else NO_SERVER

    @property
    def serving_state(self) -> LinkState | None:
        if self.serving == NO_SERVER:
            return None
        return LinkState.LOS if self.los[self.serving] else LinkState.NLOS

    def records(self, k: int) -> dict[str, np.ndarray]:
        sel = self.tier == k
        return {"distance": self.distance[sel], "los": self.los[sel],
                "path_loss": self.path_loss[sel], "main_lobe": self.main_lobe[sel]}


@dataclass
class EmpiricalMeta:
    theta: float
    cond_probs: np.ndarray
    serving_tier: np.ndarray
    serving_los: np.ndarray
    n_fading: int

    @property
    def n_geometry(self) -> int:
        return int(self.cond_probs.size)

    @property
    def mean(self) -> float:
        return float(self.cond_probs.mean())

    @property
    def second_moment(self) -> float:
        return float(np.mean(self.cond_probs**2))

    @property
    def variance(self) -> float:
        return float(self.cond_probs.var())

    def ccdf(self, y) -> np.ndarray:
        """Fraction of realizations with conditional success above each ``y``."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return (self.cond_probs[:, None] > y[None, :]).mean(axis=0)

    def inverse_moment(self, order: int = 1, p_floor: float | None = None) -> float:
        floor = p_floor if p_floor is not None else 1.0 / (10.0 * self.n_fading)
        return float(np.mean(np.maximum(self.cond_probs, floor) ** -order))

    def subset(self, k: int, state: LinkState | None = None) -> "EmpiricalMeta":
        sel = self.serving_tier == k
        if state is not None:
            sel &= self.serving_los == (state is LinkState.LOS)
        return EmpiricalMeta(self.theta, self.cond_probs[sel], self.serving_tier[sel],
                             self.serving_los[sel], self.n_fading)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["realization_index", "serving_tier", "serving_state", "cond_prob"])
            for i, (k, los, p) in enumerate(zip(self.serving_tier, self.serving_los, self.cond_probs)):
                state = "" if k == NO_SERVER else ("los" if los else "nlos")
                w.writerow([i, int(k) + 1 if k != NO_SERVER else "", state, repr(float(p))])


@dataclass
class DelayEstimate:
    mean_delay: float
    second_moment: float
    jitter: float
    divergent: bool
    p_floor: float


# --- geometry ------------------------------------------------------------------------------------

def _mean_interference_beyond(config: NetworkConfig, r: float) -> float:
    ch = config.channel
    a = config.antenna
    g = a.p_main * a.main_gain + a.p_side * a.side_gain
    total = 0.0
    for t in config.tiers:
        def f(x, t=t):
            p = math.exp(-t.blockage * x)
            return x * (p / (ch.kappa_los * x**ch.alpha_los) + (1 - p) / (ch.kappa_nlos * x**ch.alpha_nlos))

        total += t.tx_power * g * 2 * math.pi * t.density * integrate.quad(f, r, np.inf, limit=400)[0]
    return total


def region_radius(config: NetworkConfig, rel: float = 1e-4) -> float:
    """Disc radius beyond which BSs add less than ``rel`` of the mean interference.

    Interference is measured from the mean nearest-BS distance outwards, so the
    reference does not depend on the unbounded near-field of the mean.
    """
    r_ref = 0.5 / math.sqrt(sum(t.density for t in config.tiers))
    ref = _mean_interference_beyond(config, r_ref)
    lo, hi = r_ref, 2.0 * r_ref
    while _mean_interference_beyond(config, hi) > rel * ref:
        lo, hi = hi, 2.0 * hi
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if _mean_interference_beyond(config, mid) > rel * ref:
            lo = mid
        else:
            hi = mid
    return hi


def _rng(base_seed: int, index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([base_seed, index, stream]))


def _draw(config: NetworkConfig, radius: float, rng: np.random.Generator, seed: int) -> Realization:
    ch = config.channel
    dist, tier, los = [], [], []
    for k, t in enumerate(config.tiers):
        n = rng.poisson(t.density * math.pi * radius**2)
        d = radius * np.sqrt(rng.random(n))
        dist.append(d)
        tier.append(np.full(n, k))
        los.append(rng.random(n) < np.exp(-t.blockage * d))
    d = np.concatenate(dist)
    tier = np.concatenate(tier).astype(int)
    los = np.concatenate(los)
    main = rng.random(d.size) < config.antenna.p_main
    pl = np.where(los, ch.kappa_los * d**ch.alpha_los, ch.kappa_nlos * d**ch.alpha_nlos)
    serving = NO_SERVER
    if d.size:
        biased = np.array([config.biased_power(k) for k in range(config.n_tiers)])[tier]
        serving = int(np.argmax(biased / pl))
    return Realization(d, tier, los, pl, main, serving, seed)


def sample_realization(config: NetworkConfig, region_radius: float, seed: int) -> Realization:
    """PPP realization of every tier in a disc of ``region_radius`` metres around the origin."""
    return _draw(config, region_radius, np.random.default_rng(seed), seed)


# --- fading ----------------------------------------------------------------------------------------

def _success_fraction(real: Realization, config: NetworkConfig, thetas: np.ndarray, n_fading: int,
                      rng: np.random.Generator) -> np.ndarray:
    if real.serving == NO_SERVER:
        return np.zeros(thetas.size)
    ch = config.channel
    shape = np.where(real.los, ch.m_los, ch.m_nlos).astype(float)
    h = rng.standard_gamma(shape, size=(n_fading, real.n_bs)) / shape
    power = np.array([t.tx_power for t in config.tiers])[real.tier]
    gain = np.where(real.main_lobe, config.antenna.main_gain, config.antenna.side_gain)
    gain[real.serving] = config.serving_gain
    rx = h * (power * gain / real.path_loss)
    signal = rx[:, real.serving]
    interference = rx.sum(axis=1) - signal
    denom = config.noise_power + interference
    with np.errstate(divide="ignore"):
        sinr = np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.inf)
    return (sinr[:, None] > thetas[None, :]).mean(axis=0)


def conditional_success(realization: Realization, config: NetworkConfig, theta, n_fading: int = DEFAULT_N_FADING,
                        seed: int = 0):
    """Fraction of ``n_fading`` fading draws with SINR above ``theta`` (scalar or array)."""
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    out = _success_fraction(realization, config, thetas, n_fading, np.random.default_rng(seed))
    return out if np.ndim(theta) else float(out[0])


# --- batches ---------------------------------------------------------------------------------------

@dataclass
class _Job:
    config: NetworkConfig
    thetas: np.ndarray
    n_fading: int
    base_seed: int
    radius: float
    theta_of_load: Callable | None = None
    load_tables: Sequence[np.ndarray] | None = None


def _run_chunk(job: _Job, start: int, stop: int):
    n = stop - start
    probs = np.empty((n, job.thetas.size))
    tiers = np.empty(n, dtype=int)
    los = np.zeros(n, dtype=bool)
    for i in range(start, stop):
        rng = _rng(job.base_seed, i)
        real = _draw(job.config, job.radius, rng, i)
        thetas = job.thetas
        if job.load_tables is not None and real.serving != NO_SERVER:
            cdf = job.load_tables[real.serving_tier]
            load = 1 + int(np.searchsorted(cdf, _rng(job.base_seed, i, 1).random(), side="right"))
            load = min(load, cdf.size)
            thetas = job.theta_of_load(load)
        probs[i - start] = _success_fraction(real, job.config, thetas, job.n_fading, rng)
        tiers[i - start] = real.serving_tier
        los[i - start] = bool(real.serving != NO_SERVER and real.los[real.serving])
    return probs, tiers, los


def _run(job: _Job, n_geometry: int, threads: int):
    if n_geometry < 1:
        raise ValueError("n_geometry must be >= 1")
    threads = max(1, int(threads))
    n_chunks = min(n_geometry, threads * 4) if threads > 1 else 1
    edges = np.linspace(0, n_geometry, n_chunks + 1).astype(int)
    spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if threads == 1:
        parts = [_run_chunk(job, a, b) for a, b in spans]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, [job] * len(spans), [a for a, _ in spans], [b for _, b in spans]))
    probs = np.concatenate([p[0] for p in parts])
    tiers = np.concatenate([p[1] for p in parts])
    los = np.concatenate([p[2] for p in parts])
    return probs, tiers, los


def run_meta_sweep(config: NetworkConfig, thetas: Sequence[float], n_geometry: int,
                   n_fading: int = DEFAULT_N_FADING, base_seed: int = 0, *, threads: int = 1,
                   radius: float | None = None) -> list[EmpiricalMeta]:
    """Empirical meta distributions at several thresholds from the same realizations and fading draws."""
    thetas = np.asarray(thetas, dtype=float)
    radius = region_radius(config) if radius is None else radius
    probs, tiers, los = _run(_Job(config, thetas, n_fading, base_seed, radius), n_geometry, threads)
    return [EmpiricalMeta(float(th), probs[:, i].copy(), tiers, los, n_fading) for i, th in enumerate(thetas)]


def run_meta(config: NetworkConfig, theta: float, n_geometry: int, n_fading: int = DEFAULT_N_FADING,
             base_seed: int = 0, *, threads: int = 1, radius: float | None = None) -> EmpiricalMeta:
    return run_meta_sweep(config, [theta], n_geometry, n_fading, base_seed, threads=threads, radius=radius)[0]


def delay_from_meta(meta: EmpiricalMeta, p_floor: float | None = None, tol: float = 0.05) -> DelayEstimate:
    floor = p_floor if p_floor is not None else 1.0 / (10.0 * meta.n_fading)
    d1 = meta.inverse_moment(1, floor)
    d2 = meta.inverse_moment(2, floor)
    coarse = meta.inverse_moment(1, 2.0 * floor)
    divergent = abs(coarse - d1) > tol * d1
    return DelayEstimate(d1, d2, max(0.0, d2 - d1 * d1), divergent, floor)


def run_delay(config: NetworkConfig, theta: float, n_geometry: int, base_seed: int = 0, *,
              n_fading: int = DEFAULT_N_FADING, p_floor: float | None = None, threads: int = 1,
              radius: float | None = None) -> DelayEstimate:
    """Mean local delay and jitter from floored 1/p estimates.

    ``divergent`` is set when doubling the floor moves the mean delay by more
    than 5%, i.e. the estimate is driven by realizations the inner fading loop
    cannot resolve.
    """
    meta = run_meta(config, theta, n_geometry, n_fading, base_seed, threads=threads, radius=radius)
    return delay_from_meta(meta, p_floor)


def run_rate(config: NetworkConfig, rate_threshold: float, n_geometry: int, base_seed: int = 0, *,
             n_fading: int = DEFAULT_N_FADING, load_pmfs: Sequence[np.ndarray] | None = None,
             threads: int = 1, radius: float | None = None) -> EmpiricalMeta:
    """Empirical rate coverage: each realization draws its serving cell load and tests
    SINR > 2^(rate * load / W) - 1. ``load_pmfs[k][v-1]`` is P(load = v) in tier k;
    by default the analytic load model of ``rate`` is used."""
    if rate_threshold < 0:
        raise ValueError("rate_threshold must be nonnegative")
    if load_pmfs is None:
        from mmhetnet import rate

        load_pmfs = [rate.load_distribution(config, k).probabilities for k in range(config.n_tiers)]
    tables = [np.cumsum(np.asarray(p, dtype=float)) / np.sum(p) for p in load_pmfs]
    w = config.bandwidth

    def theta_of_load(v: int) -> np.ndarray:
        return np.array([2.0 ** (rate_threshold * v / w) - 1.0])

    radius = region_radius(config) if radius is None else radius
    job = _Job(config, theta_of_load(1), n_fading, base_seed, radius, theta_of_load, tables)
    probs, tiers, los = _run(job, n_geometry, threads)
    return EmpiricalMeta(float(theta_of_load(1)[0]), probs[:, 0].copy(), tiers, los, n_fading)
