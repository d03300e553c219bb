"""Child-distribution and CPT generation for ranked-node fragments.

generate_distribution enumerates all sample_size**n combinations of
per-interval sample points, evaluates the weight expression on each, and
averages the truncated-normal state masses.  Parents are first brought into
a canonical internal order (by weight, state count, state index) so that a
simultaneous permutation of parents and weights reproduces the exact same
value stream and therefore a bitwise-identical distribution.

A combination cap guards against runaway enumeration; it can be overridden
per call or through the RNM_MAX_COMBINATIONS environment variable.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .model import (MIXMINMAX, Cpt, GenerationParams, RankedFragment,
                    WeightExpressionSpec, require_valid_spec, validate_config)
from .truncnorm import state_masses
from .weight_expressions import mu_grid, mu_of_rows

MAX_COMBINATIONS_ENV = "RNM_MAX_COMBINATIONS"
DEFAULT_MAX_COMBINATIONS = 2_000_000


def resolve_max_combinations(override: int | None = None) -> int:
    """Active combination cap: explicit override, else env var, else default."""
    if override is not None:
        cap = int(override)
    else:
        raw = os.environ.get(MAX_COMBINATIONS_ENV)
        if raw is None:
            return DEFAULT_MAX_COMBINATIONS
        try:
            cap = int(raw)
        except ValueError:
            raise ValidationError(
                f"{MAX_COMBINATIONS_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError(f"combination cap must be >= 1, got {cap}")
    return cap


def combination_count(fragment: RankedFragment, sample_size: int) -> int:
    """Sample combinations enumerated for one parent configuration."""
    return sample_size ** fragment.n_parents


def _check_budget(required: int, max_combinations: int | None) -> None:
    cap = resolve_max_combinations(max_combinations)
    if required > cap:
        raise ResourceLimitError(
            f"enumeration needs {required} combinations, cap is {cap}",
            required=required, cap=cap)


def _canonical_order(spec: WeightExpressionSpec,
                     fragment: RankedFragment, config) -> list[int]:
    # mixminmax weights are not per-parent; order on state counts alone then
    if spec.kind == MIXMINMAX:
        keys = [(0.0, m, k) for m, k in zip(fragment.parent_state_counts, config)]
    else:
        keys = [(w, m, k) for w, m, k in
                zip(spec.weights, fragment.parent_state_counts, config)]
    return sorted(range(len(keys)), key=keys.__getitem__)


def _canonicalized(spec: WeightExpressionSpec, fragment: RankedFragment,
                   config) -> tuple[WeightExpressionSpec, RankedFragment, tuple]:
    order = _canonical_order(spec, fragment, config)
    if order == list(range(len(order))):
        return spec, fragment, tuple(config)
    counts = tuple(fragment.parent_state_counts[j] for j in order)
    cfg = tuple(config[j] for j in order)
    if spec.kind == MIXMINMAX:
        cspec = spec
    else:
        cspec = WeightExpressionSpec(spec.kind,
                                     tuple(spec.weights[j] for j in order))
    return cspec, RankedFragment(counts, fragment.child_state_count), cfg


def generate_distribution(spec: WeightExpressionSpec, fragment: RankedFragment,
                          config, params: GenerationParams, *,
                          max_combinations: int | None = None) -> np.ndarray:
    """Child distribution for one parent configuration.

    Returns an array of child_state_count probabilities summing to 1 within
    accumulated rounding (well under 1e-9); no renormalization is applied.
    """
    require_valid_spec(spec, fragment)
    config = validate_config(config, fragment)
    _check_budget(combination_count(fragment, params.sample_size), max_combinations)
    spec, fragment, config = _canonicalized(spec, fragment, config)
    mus = mu_grid(spec, fragment, config, params.sample_size)
    masses = state_masses(mus, fragment.child_state_count, params.variance)
    return masses.sum(axis=0) / mus.shape[0]


def generate_cpt(spec: WeightExpressionSpec, fragment: RankedFragment,
                 params: GenerationParams, *,
                 max_combinations: int | None = None) -> Cpt:
    """Full table over every parent configuration, lexicographic order.

    The first parent's state index varies slowest.  The combination cap
    applies to the total work (configurations times combinations each).
    """
    require_valid_spec(spec, fragment)
    counts = fragment.parent_state_counts
    n_configs = math.prod(counts)
    per_config = combination_count(fragment, params.sample_size)
    _check_budget(n_configs * per_config, max_combinations)
    configurations = tuple(itertools.product(*[range(1, m + 1) for m in counts]))
    table = np.empty((n_configs, fragment.child_state_count))
    for r, cfg in enumerate(configurations):
        cspec, cfrag, ccfg = _canonicalized(spec, fragment, cfg)
        mus = mu_grid(cspec, cfrag, ccfg, params.sample_size)
        masses = state_masses(mus, fragment.child_state_count, params.variance)
        table[r] = masses.sum(axis=0) / mus.shape[0]
    return Cpt(fragment, configurations, table)


@dataclass(frozen=True)
class LimitOracleParams:
    """Monte Carlo settings for the infinite-sample-size reference."""

    mc_samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if int(self.mc_samples) < 1:
            raise ValidationError(f"mc_samples must be >= 1, got {self.mc_samples}")
        object.__setattr__(self, "mc_samples", int(self.mc_samples))
        object.__setattr__(self, "seed", int(self.seed))


def limit_distribution(spec: WeightExpressionSpec, fragment: RankedFragment,
                       config, variance: float,
                       oracle: LimitOracleParams = LimitOracleParams(),
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of the distribution in the dense-sampling limit.

    Draws parent values uniformly over each parent's state interval with a
    counter-based generator keyed by the seed, so results are reproducible
    regardless of call order.  Returns (estimate, standard_errors); the
    errors are zero when mc_samples == 1.
    """
    require_valid_spec(spec, fragment)
    config = validate_config(config, fragment)
    if not (variance > 0 and math.isfinite(variance)):
        raise ValidationError(f"variance must be finite and > 0, got {variance}")
    rng = np.random.Generator(np.random.Philox(key=oracle.seed))
    u = rng.random((oracle.mc_samples, fragment.n_parents))
    lows = np.array([(k - 1) / m
                     for k, m in zip(config, fragment.parent_state_counts)])
    widths = np.array([1 / m for m in fragment.parent_state_counts])
    mus = mu_of_rows(spec, lows + u * widths)
    masses = state_masses(mus, fragment.child_state_count, variance)
    estimate = masses.mean(axis=0)
    if oracle.mc_samples > 1:
        se = masses.std(axis=0, ddof=1) / math.sqrt(oracle.mc_samples)
    else:
        se = np.zeros(fragment.child_state_count)
    return estimate, se
