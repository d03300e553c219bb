"""Structural analysis of generated distributions under lone-low scenarios.

The scenario fixes one parent at its lowest state and all others at their
highest.  Around that scenario this module locates mode pairs, the critical
weighted-mean weights at which neighbouring states tie, bounds on the
probability gap at those ties, the condition under which a wmin expression
reduces to a weighted mean, and min-max mixture gaps with a bisection search
for the balancing weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .cpt_generator import generate_distribution
from .errors import BracketingError, ValidationError
from .model import (WMEAN, GenerationParams, RankedFragment,
                    WeightExpressionSpec, lone_low_scenario)
from .truncnorm import normal_mass


@dataclass(frozen=True)
class ModePair:
    """Largest-probability state and the runner-up (1-based; ties to lower)."""

    mode: int
    runner_up: int

    def as_set(self) -> frozenset[int]:
        return frozenset((self.mode, self.runner_up))


@dataclass(frozen=True)
class WeightInterval:
    """Closed weight interval [lower, upper], optionally tagged with the
    mode pair it is meant to produce."""

    lower: float
    upper: float
    target_pair: ModePair | None = None

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValidationError(
                f"interval is reversed: [{self.lower}, {self.upper}]")

    def contains(self, w: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= w <= self.upper + slack

    @property
    def width(self) -> float:
        return self.upper - self.lower


def mode_pair(distribution) -> ModePair:
    """Mode and runner-up state of a distribution; ties go to the lower state."""
    p = np.asarray(distribution, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError("need a 1-d distribution over at least two states")
    mode = int(np.argmax(p))
    rest = p.copy()
    rest[mode] = -np.inf
    runner = int(np.argmax(rest))
    return ModePair(mode + 1, runner + 1)


def check_consecutive_top2(distribution, tol: float = 1e-12) -> bool:
    """Whether some admissible runner-up state is adjacent to the mode.

    Admissible runner-ups are all states within tol of the second-largest
    probability, so exact ties broken either way cannot flip the verdict.
    """
    p = np.asarray(distribution, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError("need a 1-d distribution over at least two states")
    mode = int(np.argmax(p))
    rest = np.delete(p, mode)
    second = rest.max()
    admissible = [j for j in range(p.size)
                  if j != mode and p[j] >= second - tol]
    return any(abs(j - mode) == 1 for j in admissible)


def wmean_equal_pair_weight(m: int, k: int) -> float:
    """Scenario-parent weight at which states k-1 and k are expected to tie."""
    if m < 2 or not 2 <= k <= m:
        raise ValidationError(f"need 2 <= k <= m with m >= 2, got k={k}, m={m}")
    return (m - k + 0.5) / (m - 1)


def wmean_flank_pair_weight(m: int, k: int) -> float:
    """Scenario-parent weight at which states k-1 and k+1 are expected to tie."""
    if m < 3 or not 2 <= k <= m - 1:
        raise ValidationError(f"need 2 <= k <= m-1 with m >= 3, got k={k}, m={m}")
    return (m - k) / (m - 1)


def _as_adjacent_pair(target_pair, m: int) -> ModePair:
    if isinstance(target_pair, ModePair):
        pair = target_pair
    else:
        states = [int(s) for s in target_pair]
        if len(states) != 2:
            raise ValidationError(
                f"target pair must hold two states, got {target_pair}")
        pair = ModePair(*states)
    a, b = pair.mode, pair.runner_up
    if not (1 <= a <= m and 1 <= b <= m and abs(a - b) == 1):
        raise ValidationError(
            f"target pair must be two adjacent states in 1..{m}, "
            f"got {{{a}, {b}}}")
    return pair


def wmean_weight_interval(m: int, target_pair) -> WeightInterval:
    """Scenario-parent weights whose mode pair is expected to be target_pair.

    With k the larger state of the pair, the interval for {k-1, k} runs from
    the weight at which {k, k+1} takes over up to the weight at which
    {k-2, k-1} does; these intervals tile [0, 1] as k drops from m to 2,
    with the equal-pair tie weight at each midpoint.
    """
    if m < 2:
        raise ValidationError(f"state count must be >= 2, got {m}")
    pair = _as_adjacent_pair(target_pair, m)
    k = max(pair.mode, pair.runner_up)
    return WeightInterval((m - k) / (m - 1), (m - k + 1) / (m - 1), pair)


def gap_integrand(y: float, m: int, k: int, variance: float) -> float:
    """Integrand whose integral over [0, 1/(2m)] bounds the tie-point gap.

    Pairs the mean at distance y above the shared state edge with the mean
    reflected the same distance below it; the two truncations differ only
    through the [0, 1] mass, so the factor vanishes identically when the
    edge sits at 1/2.
    """
    if m < 2 or not 2 <= k <= m:
        raise ValidationError(f"need 2 <= k <= m with m >= 2, got k={k}, m={m}")
    if not 0.0 <= y <= 1.0 / (2 * m):
        raise ValidationError(f"y must lie in [0, 1/(2m)], got {y}")
    edge = (k - 1) / m
    mean = edge + y
    p_above = normal_mass(edge, k / m, mean, variance)
    p_below = normal_mass((k - 2) / m, edge, mean, variance)
    mass_at = lambda u: normal_mass(0.0, 1.0, u, variance)
    return (p_above - p_below) * (1.0 / mass_at(edge - y) - 1.0 / mass_at(edge + y))


def gap_upper_bound(m: int, k: int, variance: float) -> float:
    """Bound on |P(k-1) - P(k)| at the equal-pair critical weight.

    Averages the integrand over the dense-sampling limit of means, which is
    uniform over a half-state-width band on each side of the shared edge.
    """
    if m < 2 or not 2 <= k <= m:
        raise ValidationError(f"need 2 <= k <= m with m >= 2, got k={k}, m={m}")
    val, _ = quad(gap_integrand, 0.0, 1.0 / (2 * m), args=(m, k, variance),
                  epsabs=1e-12, epsrel=1e-9, limit=200)
    return abs(m * val)


def _scenario_wmean_distribution(m: int, n: int, variance: float,
                                 sample_size: int, parent_index: int,
                                 scenario_weight: float) -> np.ndarray:
    if n < 2:
        raise ValidationError(
            "gap evaluation needs n >= 2 so the remaining weight has a parent")
    if sample_size < 3:
        raise ValidationError(f"sample_size must be >= 3, got {sample_size}")
    fragment = RankedFragment.uniform(n, m)
    if not 1 <= parent_index <= n:
        raise ValidationError(f"parent index {parent_index} outside 1..{n}")
    share = (1.0 - scenario_weight) / (n - 1)
    weights = tuple(scenario_weight if j == parent_index else share
                    for j in range(1, n + 1))
    spec = WeightExpressionSpec(WMEAN, weights)
    config = lone_low_scenario(parent_index, fragment)
    return generate_distribution(spec, fragment, config,
                                 GenerationParams(variance, sample_size))


def equal_pair_gap(m: int, k: int, n: int, variance: float, sample_size: int,
                   parent_index: int = 1) -> float:
    """|P(k-1) - P(k)| at the equal-pair critical weight of the scenario parent.

    Remaining weight is split evenly over the other parents.
    """
    w = wmean_equal_pair_weight(m, k)
    dist = _scenario_wmean_distribution(m, n, variance, sample_size,
                                        parent_index, w)
    return abs(float(dist[k - 2] - dist[k - 1]))


def flank_pair_gap(m: int, k: int, n: int, variance: float, sample_size: int,
                   parent_index: int = 1) -> float:
    """|P(k-1) - P(k+1)| at the flank-pair critical weight of the scenario parent."""
    w = wmean_flank_pair_weight(m, k)
    dist = _scenario_wmean_distribution(m, n, variance, sample_size,
                                        parent_index, w)
    return abs(float(dist[k - 2] - dist[k]))


def wmin_reduces(n: int, m: int, w_i: float) -> bool:
    """Whether a wmin scenario parent with weight w_i pins the minimum quotient.

    True means the scenario parent attains the minimum for every sample
    combination regardless of the other parents' weights, so the scenario
    distribution reduces to the equivalent weighted mean.  Always true for
    n <= m; for n > m it needs w_i >= (n-2)/(m-2), which no weight satisfies
    when m == 2 (rejected as out of domain).
    """
    if n < 1 or m < 2:
        raise ValidationError(f"need n >= 1 and m >= 2, got n={n}, m={m}")
    if not w_i >= 1.0:
        raise ValidationError(f"wmin weights must be >= 1, got {w_i}")
    if n <= m:
        return True
    if m == 2:
        raise ValidationError(
            f"no weight pins the minimum for n={n} parents with m=2 states")
    return w_i >= (n - 2) / (m - 2)


def mixminmax_difference(which: int, m: int, k: int, n: int, w_max: float,
                         variance: float, sample_size: int) -> float:
    """Signed probability difference of a min-max mixture under the scenario.

    which=1 compares states k and k+1; which=2 compares states k-1 and k+1.
    Parent 1 is the scenario parent and the tuned weight fills the first
    slot of the mixture pair, (w_max, 1 - w_max): the complement rides on
    the max of the sample values, so with the scenario parent low the
    top-state ties fall near w_max = 0.2 rather than its mirror image.
    """
    if which not in (1, 2):
        raise ValidationError(f"which must be 1 or 2, got {which}")
    if which == 1:
        if not 1 <= k <= m - 1:
            raise ValidationError(f"need 1 <= k <= m-1, got k={k}, m={m}")
    elif not 2 <= k <= m - 1:
        raise ValidationError(f"need 2 <= k <= m-1, got k={k}, m={m}")
    if not 0.0 <= w_max <= 1.0:
        raise ValidationError(f"w_max must lie in [0, 1], got {w_max}")
    fragment = RankedFragment.uniform(n, m)
    spec = WeightExpressionSpec.mixminmax(w_max, 1.0 - w_max)
    config = lone_low_scenario(1, fragment)
    dist = generate_distribution(spec, fragment, config,
                                 GenerationParams(variance, sample_size))
    first = k if which == 1 else k - 1
    return float(dist[first - 1] - dist[k])


def mixminmax_gap(which: int, m: int, k: int, n: int, w_max: float,
                  variance: float, sample_size: int) -> float:
    """Absolute value of mixminmax_difference."""
    return abs(mixminmax_difference(which, m, k, n, w_max, variance, sample_size))


_SCAN_POINTS = 101
_WEIGHT_TOL = 1e-6


def bisect_wmax(which: int, m: int, k: int, n: int, variance: float,
                sample_size: int) -> float:
    """w_max at which the signed difference crosses zero.

    Scans 101 equidistant weights over [0, 1], takes the first sign change,
    and bisects the bracket down to a width of 1e-6.  Raises BracketingError
    carrying the scan profile when no sign change exists.
    """
    f = lambda w: mixminmax_difference(which, m, k, n, w, variance, sample_size)
    grid = np.linspace(0.0, 1.0, _SCAN_POINTS)
    values = [f(w) for w in grid]
    lo = hi = None
    for i in range(_SCAN_POINTS - 1):
        if values[i] == 0.0:
            return float(grid[i])
        if (values[i] > 0) != (values[i + 1] > 0):
            lo, hi = float(grid[i]), float(grid[i + 1])
            f_lo = values[i]
            break
    else:
        if values[-1] == 0.0:
            return float(grid[-1])
        raise BracketingError(
            f"no sign change over [0, 1] for which={which}, m={m}, k={k}, "
            f"n={n}, variance={variance}, sample_size={sample_size}",
            profile=tuple(zip(map(float, grid), values)))
    while hi - lo > _WEIGHT_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mixminmax_weight_interval(target_pair, m: int, n: int, variance: float,
                              sample_size: int) -> WeightInterval:
    """w_max interval over which the scenario mode pair equals target_pair.

    Uses the same (w_max, 1 - w_max) pairing as mixminmax_difference.
    Scans a 0.01 grid, takes the longest run of matches, and sharpens both
    run boundaries to 1e-6 by boolean bisection.  Raises BracketingError if
    no scanned weight attains the pair.
    """
    pair = _as_adjacent_pair(target_pair, m)
    target = pair.as_set()
    fragment = RankedFragment.uniform(n, m)
    config = lone_low_scenario(1, fragment)
    params = GenerationParams(variance, sample_size)

    def matches(w: float) -> bool:
        spec = WeightExpressionSpec.mixminmax(w, 1.0 - w)
        dist = generate_distribution(spec, fragment, config, params)
        return mode_pair(dist).as_set() == target

    grid = np.linspace(0.0, 1.0, _SCAN_POINTS)
    hits = [matches(w) for w in grid]
    best_start = best_len = 0
    run_start = None
    for i, hit in enumerate(hits + [False]):
        if hit and run_start is None:
            run_start = i
        elif not hit and run_start is not None:
            if i - run_start > best_len:
                best_start, best_len = run_start, i - run_start
            run_start = None
    if best_len == 0:
        raise BracketingError(
            f"no weight in the scan attains mode pair {set(target)} for m={m}, "
            f"n={n}, variance={variance}, sample_size={sample_size}",
            profile=tuple(zip(map(float, grid), map(float, hits))))

    lower = float(grid[best_start])
    if best_start > 0:
        out, inside = float(grid[best_start - 1]), lower
        while inside - out > _WEIGHT_TOL:
            mid = 0.5 * (out + inside)
            if matches(mid):
                inside = mid
            else:
                out = mid
        lower = inside
    upper = float(grid[best_start + best_len - 1])
    if best_start + best_len < len(grid):
        inside, out = upper, float(grid[best_start + best_len])
        while out - inside > _WEIGHT_TOL:
            mid = 0.5 * (inside + out)
            if matches(mid):
                inside = mid
            else:
                out = mid
        upper = inside
    return WeightInterval(lower, upper, pair)
