"""Domain types for ranked-node fragments and weight-expression feasibility.

A ranked node has m ordinal states identified with the equal-width
subintervals [(k-1)/m, k/m] of [0, 1] ("state intervals").  A fragment is one
child node with n parent nodes; the child's conditional distribution for a
given parent-state configuration is produced by the generator from a weight
expression, a variance parameter, and a per-interval sample count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

WMEAN = "wmean"
WMIN = "wmin"
WMAX = "wmax"
MIXMINMAX = "mixminmax"
EXPRESSION_KINDS = (WMEAN, WMIN, WMAX, MIXMINMAX)

# Absolute tolerance on weight-sum constraints.  Far below any probability
# difference the analysis module works with (>= 0.01).
WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class WeightExpressionSpec:
    """A weight expression tag plus its weight vector.

    kind is one of "wmean", "wmin", "wmax", "mixminmax".  For mixminmax the
    weights are exactly (w_min, w_max) regardless of the parent count.
    Feasibility against a fragment is checked by validate_spec, not here.
    """

    kind: str
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in EXPRESSION_KINDS:
            raise ValidationError(
                f"unknown weight expression {self.kind!r}; expected one of {EXPRESSION_KINDS}")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @classmethod
    def wmean(cls, *weights: float) -> "WeightExpressionSpec":
        return cls(WMEAN, tuple(weights))

    @classmethod
    def wmin(cls, *weights: float) -> "WeightExpressionSpec":
        return cls(WMIN, tuple(weights))

    @classmethod
    def wmax(cls, *weights: float) -> "WeightExpressionSpec":
        return cls(WMAX, tuple(weights))

    @classmethod
    def mixminmax(cls, w_min: float, w_max: float) -> "WeightExpressionSpec":
        return cls(MIXMINMAX, (w_min, w_max))


@dataclass(frozen=True)
class RankedFragment:
    """State counts of one child node and its n parent nodes."""

    parent_state_counts: tuple[int, ...]
    child_state_count: int

    def __post_init__(self):
        counts = tuple(int(m) for m in self.parent_state_counts)
        object.__setattr__(self, "parent_state_counts", counts)
        object.__setattr__(self, "child_state_count", int(self.child_state_count))
        if len(counts) < 1:
            raise ValidationError("a fragment needs at least one parent node")
        if any(m < 2 for m in counts):
            raise ValidationError(f"every parent state count must be >= 2, got {counts}")
        if self.child_state_count < 2:
            raise ValidationError(
                f"child state count must be >= 2, got {self.child_state_count}")

    @property
    def n_parents(self) -> int:
        return len(self.parent_state_counts)

    @property
    def equal_m(self) -> int | None:
        """Common state count m when all nodes share one, else None."""
        m = self.child_state_count
        if all(mi == m for mi in self.parent_state_counts):
            return m
        return None

    @classmethod
    def uniform(cls, n_parents: int, m: int) -> "RankedFragment":
        """Equal-m fragment: n parents and the child all with m states."""
        return cls((m,) * n_parents, m)


@dataclass(frozen=True)
class GenerationParams:
    """Variance of the truncated normal and sample count per state interval.

    sample_size >= 2 is accepted (the two interval endpoints); the structural
    guarantees verified by the property suites assume sample_size >= 3.
    """

    variance: float
    sample_size: int

    def __post_init__(self):
        object.__setattr__(self, "variance", float(self.variance))
        object.__setattr__(self, "sample_size", int(self.sample_size))
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValidationError(f"variance must be finite and > 0, got {self.variance}")
        if self.sample_size < 2:
            raise ValidationError(f"sample_size must be >= 2, got {self.sample_size}")


@dataclass(frozen=True)
class Violation:
    """One failed feasibility constraint; index is the offending weight (1-based)."""

    constraint: str
    index: int | None = None

    def __str__(self) -> str:
        if self.index is None:
            return self.constraint
        return f"{self.constraint} (weight index {self.index})"


def validate_spec(spec: WeightExpressionSpec,
                  fragment: RankedFragment) -> tuple[Violation, ...]:
    """Check spec feasibility for the fragment; empty tuple means valid.

    wmean: each weight in [0, 1], weights sum to 1 within WEIGHT_SUM_TOL.
    wmin/wmax: each weight >= 1.
    mixminmax: exactly two weights (w_min, w_max), each in [0, 1],
    w_max = 1 - w_min within WEIGHT_SUM_TOL.
    """
    n = fragment.n_parents
    w = spec.weights
    out: list[Violation] = []
    if spec.kind == MIXMINMAX:
        if len(w) != 2:
            return (Violation(
                f"mixminmax takes exactly two weights (w_min, w_max), got {len(w)}"),)
    elif len(w) != n:
        return (Violation(
            f"{spec.kind} needs one weight per parent: expected {n}, got {len(w)}"),)

    if spec.kind == WMEAN:
        for i, wi in enumerate(w, start=1):
            if not 0.0 <= wi <= 1.0:
                out.append(Violation(
                    f"wmean weights must lie in [0, 1], got {wi!r}", i))
        total = math.fsum(w)
        if not abs(total - 1.0) <= WEIGHT_SUM_TOL:
            out.append(Violation(
                f"wmean weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total!r}"))
    elif spec.kind in (WMIN, WMAX):
        for i, wi in enumerate(w, start=1):
            if not wi >= 1.0:
                out.append(Violation(
                    f"{spec.kind} weights must be >= 1, got {wi!r}", i))
    else:
        w_min, w_max = w
        if not 0.0 <= w_min <= 1.0:
            out.append(Violation(f"mixminmax w_min must lie in [0, 1], got {w_min!r}", 1))
        if not 0.0 <= w_max <= 1.0:
            out.append(Violation(f"mixminmax w_max must lie in [0, 1], got {w_max!r}", 2))
        if not abs((w_min + w_max) - 1.0) <= WEIGHT_SUM_TOL:
            out.append(Violation(
                f"mixminmax requires w_max = 1 - w_min within {WEIGHT_SUM_TOL}, "
                f"got w_min + w_max = {w_min + w_max!r}"))
    return tuple(out)


def require_valid_spec(spec: WeightExpressionSpec, fragment: RankedFragment) -> None:
    """Raise ValidationError listing every violated constraint."""
    violations = validate_spec(spec, fragment)
    if violations:
        raise ValidationError(
            "; ".join(str(v) for v in violations), violations=violations)


def validate_config(config, fragment: RankedFragment) -> tuple[int, ...]:
    """Check a parent-state configuration (1-based indices) and return it as a tuple."""
    config = tuple(int(k) for k in config)
    if len(config) != fragment.n_parents:
        raise ValidationError(
            f"configuration length {len(config)} != parent count {fragment.n_parents}")
    for i, (k, m) in enumerate(zip(config, fragment.parent_state_counts), start=1):
        if not 1 <= k <= m:
            raise ValidationError(
                f"state index {k} of parent {i} outside 1..{m}")
    return config


def state_interval(k: int, m: int) -> tuple[float, float]:
    """State interval [(k-1)/m, k/m] of the k-th of m states (1-based)."""
    if m < 2:
        raise ValidationError(f"state count must be >= 2, got {m}")
    if not 1 <= k <= m:
        raise ValidationError(f"state index {k} outside 1..{m}")
    return ((k - 1) / m, k / m)


def require_equal_m(fragment: RankedFragment) -> int:
    """Common state count m, or a validation error for heterogeneous fragments."""
    m = fragment.equal_m
    if m is None:
        raise ValidationError(
            "operation requires an equal-m fragment; got parent state counts "
            f"{fragment.parent_state_counts} with child {fragment.child_state_count}")
    return m


def lone_low_scenario(i: int, fragment: RankedFragment) -> tuple[int, ...]:
    """Configuration with parent i at its lowest state and every other parent highest.

    Defined for equal-m fragments; this is the scenario under which the
    analysis module studies mode pairs and weight intervals.
    """
    m = require_equal_m(fragment)
    n = fragment.n_parents
    if not 1 <= i <= n:
        raise ValidationError(f"parent index {i} outside 1..{n}")
    return tuple(1 if j == i else m for j in range(1, n + 1))


@dataclass(frozen=True, eq=False)
class Cpt:
    """Full conditional probability table over every parent configuration.

    configurations are lexicographic with the first parent's index slowest;
    table row r is the child distribution for configurations[r].
    """

    fragment: RankedFragment
    configurations: tuple[tuple[int, ...], ...]
    table: np.ndarray

    def index_of(self, config) -> int:
        config = validate_config(config, self.fragment)
        idx = 0
        for k, m in zip(config, self.fragment.parent_state_counts):
            idx = idx * m + (k - 1)
        return idx

    def distribution(self, config) -> np.ndarray:
        return self.table[self.index_of(config)]
