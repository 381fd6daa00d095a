"""Special functions and quadrature primitives (no network semantics)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special


class NonConvergenceError(RuntimeError):
    """A numerical procedure ran out of budget; ``partial`` holds the last estimate."""

    def __init__(self, message: str, partial: float | complex = float("nan"), context: dict | None = None):
        super().__init__(message)
        self.partial = partial
        self.context = dict(context or {})


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureSpec()


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


def _is_nonpositive_int(c: float) -> bool:
    return c <= 0 and float(c).is_integer()


def _series_2f1(a: float, b: float, c: float, z: float, max_terms: int = 5000) -> float:
    term = 1.0
    total = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
        if term == 0.0:
            return total
    raise NonConvergenceError("2F1 series did not converge", total, {"a": a, "b": b, "c": c, "z": z})


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 1.

    |z| <= 1/2 is summed directly. Negative z is mapped to z/(z-1) in [0, 1) by
    the Pfaff transformation; beyond z = -9 the 1/z connection formula is used
    unless b - a is an integer, where the formula degenerates and we defer to
    mpmath.
    """
    if _is_nonpositive_int(c):
        raise ValueError("2F1 undefined for nonpositive integer c")
    if z == 0.0:
        return 1.0
    if z > 1.0:
        raise ValueError("gauss_2f1 supports z <= 1 only")
    if abs(z) <= 0.5:
        return _series_2f1(a, b, c, z)
    if z > 0:
        return float(special.hyp2f1(a, b, c, z))
    if z >= -9.0:
        w = z / (z - 1.0)
        # pick the Pfaff variant whose series terminates or converges fastest
        return (1.0 - z) ** (-a) * _series_2f1(a, c - b, c, w)
    if float(b - a).is_integer() or any(_is_nonpositive_int(v) for v in (a, b, c - a, c - b)):
        import mpmath

        return float(mpmath.hyp2f1(a, b, c, z))
    g = special.gamma
    x = 1.0 / z
    t1 = g(c) * g(b - a) / (g(b) * g(c - a)) * (-z) ** (-a) * _series_2f1(a, a - c + 1.0, a - b + 1.0, x)
    t2 = g(c) * g(a - b) / (g(a) * g(c - b)) * (-z) ** (-b) * _series_2f1(b, b - c + 1.0, b - a + 1.0, x)
    return float(t1 + t2)


def regularized_incomplete_beta(y: float, a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    return float(special.betainc(a, b, y))


def gamma_ccdf(shape: int, x):
    """Upper regularized incomplete gamma Gamma(shape, x)/Gamma(shape) for integer shape."""
    if int(shape) != shape or shape < 1:
        raise ValueError("shape must be a positive integer")
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for m in range(1, int(shape)):
        term = term * x / m
        total = total + term
    out = np.exp(-x) * total
    return out if out.ndim else float(out)


def integrate_semi_infinite(f: Callable[[float], float], lower: float,
                            spec: QuadratureSpec = DEFAULT_QUAD, *, scale: float = 1.0,
                            method: str = "panels") -> float:
    """Integrate ``f`` over [lower, inf).

    ``method="panels"`` integrates adaptively over panels of doubling width
    starting at ``scale``; it stops once a panel adds less than ``rel_tol`` of
    the running total and closes with a geometric tail estimate from the last
    two panels. ``method="rational"`` maps x = lower + t/(1-t) onto (0, 1),
    which suits integrands with polynomial decay.
    """
    if method == "rational":
        def g(t):
            if t >= 1.0:
                return 0.0
            one_minus = 1.0 - t
            return f(lower + scale * t / one_minus) * scale / one_minus**2

        val, err, info = integrate.quad(g, 0.0, 1.0, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                        limit=spec.max_subdivisions, full_output=True)[:3]
        if info.get("ier", 0) not in (0,) and err > max(spec.abs_tol, spec.rel_tol * abs(val)) * 100:
            raise NonConvergenceError("rational-map quadrature did not converge", val)
        return float(val)
    if method != "panels":
        raise ValueError(f"unknown method {method!r}")

    total = 0.0
    a = lower
    width = scale
    used = 0
    prev = None
    calm = 0
    while used < spec.max_subdivisions:
        b = a + width
        piece, _, info = integrate.quad(f, a, b, epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol * 1e-2,
                                        limit=200, full_output=True)[:3]
        used += int(info["last"])
        total += piece
        if abs(piece) <= spec.rel_tol * abs(total) + spec.abs_tol:
            calm += 1
            if calm >= 2:
                if prev is not None and prev != 0.0:
                    ratio = piece / prev
                    if 0.0 < ratio < 1.0:
                        total += piece * ratio / (1.0 - ratio)
                return float(total)
        else:
            calm = 0
        prev = piece
        a = b
        width *= 2.0
    raise NonConvergenceError("semi-infinite quadrature exceeded max_subdivisions", total)


# Gauss-Legendre rules are reused everywhere; cache by order.
_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def composite_gauss_legendre(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an ``order``-point Gauss-Legendre rule on each panel of ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def log_binom(n, k):
    return special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)


def alzer_zeta(m: int) -> float:
    """(m!)^(-1/m): rate constant of the Gamma-CDF bound (1 - e^(-zeta x))^m."""
    return math.factorial(m) ** (-1.0 / m)


@dataclass(frozen=True)
class InversionSpec:
    """Parameters of the Fourier-series (Euler-summed) Laplace inversion.

    ``a`` sets the discretization error to about exp(-a); ``n`` terms are summed
    directly and ``m`` more are Euler-averaged.
    """

    a: float = 18.4
    n: int = 15
    m: int = 11

    def __post_init__(self) -> None:
        if not self.a > 0 or self.n < 1 or self.m < 0:
            raise ValueError("invalid inversion parameters")


DEFAULT_INVERSION = InversionSpec()


def cdf_inversion_nodes(t, spec: InversionSpec = DEFAULT_INVERSION) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``p`` (complex, shape (len(t), K)) and real weights ``eta`` such that
    F(t) ~ sum_k eta[:, k] * Re(L(p[:, k]) / p[:, k]) for a nonnegative random
    variable with Laplace transform L and CDF F.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ValueError("inversion points must be positive")
    k = np.arange(spec.n + spec.m + 1)
    tail = np.array([special.comb(spec.m, j, exact=False) for j in range(spec.m + 1)]) / 2.0**spec.m
    # weight of term k after Euler averaging of the partial sums s_n .. s_{n+m}
    cum = np.cumsum(tail[::-1])[::-1]
    c = np.ones(k.size)
    c[spec.n + 1:] = cum[1:]
    c[0] = 0.5
    c *= (-1.0) ** k
    p = (spec.a + 2j * math.pi * k[None, :]) / (2.0 * t[:, None])
    eta = math.exp(spec.a / 2.0) / t[:, None] * c[None, :]
    return p, eta
