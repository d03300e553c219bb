"""The four weight expressions mapping parent sample values to a mean.

Scalar evaluation (evaluate_mu) uses math.fsum and is the reference path;
mu_grid is the vectorized batch path used by the generator.  The wmin and
wmax quotients are computed from one shared parent sum in both paths so that
equal weights give bitwise-equal quotient values, which keeps argmin
positions exact under ties.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .model import (MIXMINMAX, WMAX, WMEAN, WMIN, RankedFragment,
                    WeightExpressionSpec, validate_config)


def sample_points(k: int, m: int, sample_size: int) -> np.ndarray:
    """sample_size equidistant points over state interval k of m, endpoints in."""
    if sample_size < 2:
        raise ValidationError(f"sample_size must be >= 2, got {sample_size}")
    if m < 2 or not 1 <= k <= m:
        raise ValidationError(f"state {k} of {m} is not a valid state")
    return np.linspace((k - 1) / m, k / m, sample_size)


def _check_arity(spec: WeightExpressionSpec, n: int) -> None:
    if spec.kind == MIXMINMAX:
        if len(spec.weights) != 2:
            raise ValidationError(
                f"mixminmax takes exactly two weights, got {len(spec.weights)}")
    elif len(spec.weights) != n:
        raise ValidationError(
            f"{spec.kind} needs one weight per parent: expected {n}, "
            f"got {len(spec.weights)}")


def _quotients(weights, z, total: float, n: int) -> list[float]:
    # ((w_j - 1) z_j + sum z) / (w_j + n - 1); shared total keeps equal-weight
    # components bitwise identical
    return [((weights[j] - 1.0) * z[j] + total) / (weights[j] + n - 1.0)
            for j in range(n)]


def evaluate_mu(spec: WeightExpressionSpec, z) -> float:
    """Value of the weight expression at one vector of parent sample values."""
    z = [float(x) for x in z]
    n = len(z)
    if n < 1:
        raise ValidationError("need at least one parent sample value")
    _check_arity(spec, n)
    w = spec.weights
    if spec.kind == WMEAN:
        return math.fsum(wi * zi for wi, zi in zip(w, z))
    if spec.kind in (WMIN, WMAX):
        vals = _quotients(w, z, math.fsum(z), n)
        return min(vals) if spec.kind == WMIN else max(vals)
    return w[0] * min(z) + w[1] * max(z)


def wmin_min_attained_at(spec: WeightExpressionSpec, z) -> int:
    """1-based index of the wmin quotient attaining the minimum (ties: lowest)."""
    if spec.kind != WMIN:
        raise ValidationError(f"expected a wmin expression, got {spec.kind}")
    z = [float(x) for x in z]
    n = len(z)
    _check_arity(spec, n)
    vals = _quotients(spec.weights, z, math.fsum(z), n)
    return min(range(n), key=vals.__getitem__) + 1


def mu_bounds(spec: WeightExpressionSpec, fragment: RankedFragment,
              config) -> tuple[float, float]:
    """Smallest and largest expression value over the sample region of config.

    Every expression is nondecreasing in each coordinate, so the extremes sit
    at the all-lower-endpoint and all-upper-endpoint corners.
    """
    config = validate_config(config, fragment)
    counts = fragment.parent_state_counts
    z_lo = [(k - 1) / m for k, m in zip(config, counts)]
    z_hi = [k / m for k, m in zip(config, counts)]
    return evaluate_mu(spec, z_lo), evaluate_mu(spec, z_hi)


def mu_grid(spec: WeightExpressionSpec, fragment: RankedFragment, config,
            sample_size: int) -> np.ndarray:
    """Expression values over the full sample-point product, length s**n.

    Order is lexicographic in the per-parent sample grids with the first
    parent's point index varying slowest.
    """
    config = validate_config(config, fragment)
    _check_arity(spec, fragment.n_parents)
    grids = [sample_points(k, m, sample_size)
             for k, m in zip(config, fragment.parent_state_counts)]
    if spec.kind == WMEAN:
        # cascaded outer sums: left-to-right accumulation per combination,
        # without materializing the full (s**n, n) sample matrix
        mus = spec.weights[0] * grids[0]
        for wi, g in zip(spec.weights[1:], grids[1:]):
            mus = (mus[:, None] + wi * g).reshape(-1)
        return mus
    mesh = np.meshgrid(*grids, indexing="ij")
    z_rows = np.stack([g.reshape(-1) for g in mesh], axis=1)
    return mu_of_rows(spec, z_rows)


def mu_of_rows(spec: WeightExpressionSpec, z_rows: np.ndarray) -> np.ndarray:
    """Vectorized expression values for an (R, n) matrix of sample vectors."""
    z_rows = np.asarray(z_rows, dtype=float)
    n = z_rows.shape[1]
    _check_arity(spec, n)
    w = np.asarray(spec.weights, dtype=float)
    if spec.kind == WMEAN:
        return z_rows @ w
    if spec.kind in (WMIN, WMAX):
        total = z_rows.sum(axis=1)
        quot = ((w - 1.0) * z_rows + total[:, None]) / (w + n - 1.0)
        return quot.min(axis=1) if spec.kind == WMIN else quot.max(axis=1)
    return w[0] * z_rows.min(axis=1) + w[1] * z_rows.max(axis=1)


def wmin_equivalent_wmean(weight: float, i: int, n: int) -> WeightExpressionSpec:
    """Weighted-mean expression matching one wmin quotient component.

    Component i of a wmin expression whose i-th weight is `weight` equals the
    weighted mean with weight/(weight+n-1) on parent i and 1/(weight+n-1) on
    each other parent.
    """
    weight = float(weight)
    if not weight >= 1.0:
        raise ValidationError(f"wmin weights must be >= 1, got {weight}")
    if not 1 <= i <= n:
        raise ValidationError(f"parent index {i} outside 1..{n}")
    denom = weight + n - 1.0
    betas = tuple(weight / denom if j == i else 1.0 / denom
                  for j in range(1, n + 1))
    return WeightExpressionSpec(WMEAN, betas)
