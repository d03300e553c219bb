"""Slow independent oracles used to cross-check the library.

Built from primitives deliberately different from the implementation:
adaptive Simpson quadrature over the normal density instead of erfc-based
closed forms, and plain nested loops with math.fsum instead of the
vectorized generator kernel.  Tests freeze specific values computed here
(cross-checked against 50-digit mpmath integration) and also call these
routines directly for randomized dual-route comparisons.
"""

from __future__ import annotations

import itertools
import math


def normal_pdf(x: float, mean: float, variance: float) -> float:
    d = x - mean
    return math.exp(-d * d / (2.0 * variance)) / math.sqrt(2.0 * math.pi * variance)


def _simpson(f, a, b, fa, fm, fb):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, m, fa, flm, fm)
    right = _simpson(f, m, b, fm, frm, fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + _adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1))


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-14,
                     max_depth: int = 60) -> float:
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = _simpson(f, a, b, fa, fm, fb)
    return _adaptive(f, a, b, fa, fm, fb, whole, tol, max_depth)


def normal_mass_oracle(a: float, b: float, mean: float, variance: float,
                       tol: float = 1e-15) -> float:
    """Integral of the normal density over [a, b] by adaptive quadrature.

    Splits at the mean so the peak always sits on a panel edge.
    """
    if b <= a:
        return 0.0
    f = lambda x: normal_pdf(x, mean, variance)
    if a < mean < b:
        return adaptive_simpson(f, a, mean, tol) + adaptive_simpson(f, mean, b, tol)
    return adaptive_simpson(f, a, b, tol)


def tnorm_mass_oracle(a: float, b: float, mean: float, variance: float) -> float:
    """Mass of the [0, 1]-truncated normal on [a, b] via two quadratures."""
    denom = normal_mass_oracle(0.0, 1.0, mean, variance)
    if denom < 1e-300:
        point = min(max(mean, 0.0), 1.0)
        return 1.0 if a <= point <= b else 0.0
    return normal_mass_oracle(a, b, mean, variance) / denom


def sample_points_oracle(k: int, m: int, s: int) -> list[float]:
    """s equidistant points spanning state interval [(k-1)/m, k/m], endpoints in."""
    lo, hi = (k - 1) / m, k / m
    return [lo + (hi - lo) * t / (s - 1) for t in range(s)]


def mu_oracle(kind: str, weights, z) -> float:
    """Weight-expression value by direct formula, fsum everywhere."""
    n = len(z)
    if kind == "wmean":
        return math.fsum(w * x for w, x in zip(weights, z))
    if kind == "wmin" or kind == "wmax":
        total = math.fsum(z)
        vals = [((weights[j] - 1.0) * z[j] + total) / (weights[j] + n - 1.0)
                for j in range(n)]
        return min(vals) if kind == "wmin" else max(vals)
    if kind == "mixminmax":
        w_min, w_max = weights
        return w_min * min(z) + w_max * max(z)
    raise ValueError(kind)


def distribution_oracle(kind: str, weights, parent_state_counts, child_m: int,
                        config, variance: float, s: int) -> list[float]:
    """Child distribution by brute-force enumeration of all s**n combinations."""
    grids = [sample_points_oracle(k, m, s)
             for k, m in zip(config, parent_state_counts)]
    masses = [[] for _ in range(child_m)]
    for z in itertools.product(*grids):
        mu = mu_oracle(kind, weights, z)
        for k in range(1, child_m + 1):
            masses[k - 1].append(
                tnorm_mass_oracle((k - 1) / child_m, k / child_m, mu, variance))
    count = s ** len(config)
    return [math.fsum(col) / count for col in masses]
