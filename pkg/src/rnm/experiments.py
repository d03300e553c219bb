"""Numerical campaigns built on the generator.

Three studies: tie-gap curves as a function of the variance parameter, a
randomized robustness study of stepwise weight updates constrained to
elicitation intervals, and min-max mixture gap profiles at bisected tie
weights.  A fourth runner executes the randomized structural property
suites used by the command-line checker.

Every campaign is a deterministic function of its parameters and seed:
replication r of a run seeded with c draws from a counter-based stream
keyed by (c, r), so results do not depend on execution order.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (ModePair, WeightInterval, bisect_wmax,
                       check_consecutive_top2, equal_pair_gap,
                       gap_upper_bound, mixminmax_gap, mode_pair,
                       wmean_equal_pair_weight, wmean_flank_pair_weight,
                       wmin_reduces)
from .cpt_generator import generate_distribution
from .errors import ValidationError
from .model import (MIXMINMAX, WMAX, WMEAN, WMIN, GenerationParams,
                    RankedFragment, WeightExpressionSpec, lone_low_scenario)
from .weight_expressions import (mu_bounds, sample_points,
                                 wmin_equivalent_wmean, wmin_min_attained_at)

# sample size used by the weight-update study and the bisection defaults
UPDATE_SAMPLE_SIZE = 5


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValidationError(f"seed must be >= 0, got {seed}")
    return seed


def _stream(*key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(tuple(key))
    return np.random.Generator(np.random.Philox(seq))


# ---------------------------------------------------------------------------
# tie-gap curves across the variance grid (two parents, pair {1, 2})


@dataclass(frozen=True)
class Fig2Row:
    m: int
    sigma2: float
    gap_bound: float  # analytic bound on the tie-point probability gap
    gap_s5: float     # generated gap at the tie weight, sample size 5
    gap_s10: float    # sample size 10


@dataclass(frozen=True)
class Fig2Report:
    m_values: tuple[int, ...]
    sigma2_grid: tuple[float, ...]
    rows: tuple[Fig2Row, ...]


def run_fig2(m_values, sigma2_grid) -> Fig2Report:
    """Tie-gap bound and generated gaps over a variance grid.

    Two parents with the scenario parent at the weight tying child states
    1 and 2; one row per (state count, variance) pair.
    """
    m_values = tuple(int(m) for m in m_values)
    sigma2_grid = tuple(float(v) for v in sigma2_grid)
    if not m_values or not sigma2_grid:
        raise ValidationError("need at least one state count and one variance")
    for m in m_values:
        if m < 3:
            raise ValidationError(f"state counts must be >= 3, got {m}")
    for v in sigma2_grid:
        if not 0.0 < v <= 0.5:
            raise ValidationError(f"variances must lie in (0, 0.5], got {v}")
    rows = []
    for m in m_values:
        for sigma2 in sigma2_grid:
            rows.append(Fig2Row(
                m, sigma2,
                gap_upper_bound(m, 2, sigma2),
                equal_pair_gap(m, 2, 2, sigma2, 5),
                equal_pair_gap(m, 2, 2, sigma2, 10)))
    return Fig2Report(m_values, sigma2_grid, tuple(rows))


# ---------------------------------------------------------------------------
# randomized weight-update robustness study


def update_weight_interval(m: int, pair: ModePair) -> WeightInterval:
    """Weight interval keeping the scenario parent's ordered mode pair.

    One endpoint is the weight at which the mode and runner-up tie, the
    other the weight at which the two states flanking the mode tie (where
    the runner-up switches sides).  These half-width intervals tile [0, 1]
    as the ordered pair steps through its sequence, so an observed pair's
    interval contains the weight that produced it.
    """
    if m < 3:
        raise ValidationError(f"state count must be >= 3, got {m}")
    a, b = pair.mode, pair.runner_up
    if not (1 <= a <= m and 1 <= b <= m and abs(a - b) == 1):
        raise ValidationError(
            f"mode pair must be two adjacent states in 1..{m}, got ({a}, {b})")
    flank = 1.0 if a == 1 else wmean_flank_pair_weight(m, a) if a < m else 0.0
    if b == a - 1:
        return WeightInterval(flank, wmean_equal_pair_weight(m, a), pair)
    return WeightInterval(wmean_equal_pair_weight(m, a + 1), flank, pair)


@dataclass(frozen=True)
class WeightUpdateReplication:
    replication: int  # 1-based
    m: int
    n: int
    avg_diff: float   # worst step: mean absolute probability difference
    max_diff: float   # worst step: largest absolute probability difference


@dataclass(frozen=True)
class WeightUpdateReport:
    n_replications: int
    seed: int
    sigma2_upper_coeff: float
    replications: tuple[WeightUpdateReplication, ...]
    mean_avg_diff: float
    mean_max_diff: float
    peak_avg_diff: float
    peak_max_diff: float
    resampled: int    # replications redrawn due to degenerate redistribution


def _update_walk(rng: np.random.Generator, m: int, n: int, sigma2: float,
                 trace: list | None = None):
    """One replication body; None signals a degenerate redistribution.

    Draws the initial weights, builds per-parent weight intervals from the
    initial mode pairs, then walks the parents from last to second.  Each
    step nudges that parent's weight a random fraction toward a random side
    of its interval, clamped so it stays inside, and redistributes the
    opposite amount over the earlier parents proportionally to their
    remaining slack, keeping the total at one and every touched weight
    inside its interval.  Returns the per-step worst mean and worst single
    absolute differences against the final distributions.

    When `trace` is a list it receives (initial, lows, highs) followed by a
    copy of the weight vector after every update step, for invariant checks.
    """
    fragment = RankedFragment.uniform(n, m)
    params = GenerationParams(sigma2, UPDATE_SAMPLE_SIZE)

    w = rng.random(n)
    w = np.sort(w / w.sum())

    def scenario_dist(weights: np.ndarray, i: int) -> np.ndarray:
        spec = WeightExpressionSpec(WMEAN, tuple(float(x) for x in weights))
        config = lone_low_scenario(i, fragment)
        return generate_distribution(spec, fragment, config, params)

    lows = np.empty(n)
    highs = np.empty(n)
    for i in range(1, n + 1):
        pair = mode_pair(scenario_dist(w, i))
        interval = update_weight_interval(m, pair)
        lows[i - 1] = interval.lower
        highs[i - 1] = interval.upper

    cur = w.copy()
    if trace is not None:
        trace.append((w.copy(), lows.copy(), highs.copy()))
    intermediate = {}
    for i in range(n, 1, -1):
        u = rng.random()
        y = rng.random()
        ii = i - 1
        if u < 0.5:
            delta = max(y * float(np.sum(cur[:ii] - highs[:ii])),
                        lows[ii] - cur[ii])
        else:
            delta = min(y * float(np.sum(cur[:ii] - lows[:ii])),
                        highs[ii] - cur[ii])
        cur[ii] += delta
        if delta < 0.0:
            denom = float(np.sum(highs[:ii] - cur[:ii]))
            if denom <= 0.0:
                return None
            cur[:ii] += (-delta / denom) * (highs[:ii] - cur[:ii])
        elif delta > 0.0:
            denom = float(np.sum(cur[:ii] - lows[:ii]))
            if denom <= 0.0:
                return None
            cur[:ii] += (-delta / denom) * (cur[:ii] - lows[:ii])
        if trace is not None:
            trace.append(cur.copy())
        if i >= 3:
            intermediate[i] = scenario_dist(cur, i)

    avg_diff = 0.0
    max_diff = 0.0
    for i in range(3, n + 1):
        diff = np.abs(intermediate[i] - scenario_dist(cur, i))
        avg_diff = max(avg_diff, float(diff.mean()))
        max_diff = max(max_diff, float(diff.max()))
    return avg_diff, max_diff


def _run_replication(seed: int, index: int,
                     sigma2_upper_coeff: float) -> tuple[WeightUpdateReplication, int]:
    """Replication `index` of the weight-update study; retries on degeneracy."""
    for attempt in itertools.count():
        rng = _stream(seed, index, attempt)
        m = int(rng.integers(3, 8))
        n = int(rng.integers(3, 9))
        sigma2 = float(rng.uniform(5e-4, sigma2_upper_coeff / (m * m)))
        result = _update_walk(rng, m, n, sigma2)
        if result is not None:
            avg_diff, max_diff = result
            return (WeightUpdateReplication(index + 1, m, n, avg_diff, max_diff),
                    attempt)


def _run_replication_args(args) -> tuple[WeightUpdateReplication, int]:
    return _run_replication(*args)


def run_weight_update(n_replications: int, seed: int, *,
                      sigma2_upper_coeff: float = 1.0,
                      threads: int = 1) -> WeightUpdateReport:
    """Randomized study of stepwise weight updates under interval constraints.

    Each replication draws a fragment (3..7 states, 3..8 parents), initial
    weights normalized and sorted ascending, and a variance below
    sigma2_upper_coeff/m^2; the per-parent intervals come from the initial
    scenario mode pairs.  Reported per replication: the worst mean and worst
    single absolute differences between the distributions after each update
    step and the final ones, taken over the steps with at least two earlier
    parents.  Aggregates are the means and maxima over replications.
    """
    n_replications = int(n_replications)
    if n_replications < 1:
        raise ValidationError(
            f"need at least one replication, got {n_replications}")
    seed = _check_seed(seed)
    sigma2_upper_coeff = float(sigma2_upper_coeff)
    if not 0.0 < sigma2_upper_coeff <= 1.0:
        raise ValidationError(
            f"sigma2_upper_coeff must lie in (0, 1], got {sigma2_upper_coeff}")
    threads = int(threads)

    tasks = [(seed, r, sigma2_upper_coeff) for r in range(n_replications)]
    if threads > 1:
        chunk = max(1, n_replications // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_run_replication_args, tasks,
                                     chunksize=chunk))
    else:
        outcomes = [_run_replication_args(t) for t in tasks]

    replications = tuple(rep for rep, _ in outcomes)
    resampled = sum(attempts for _, attempts in outcomes)
    avg = np.array([rep.avg_diff for rep in replications])
    mx = np.array([rep.max_diff for rep in replications])
    return WeightUpdateReport(
        n_replications=n_replications,
        seed=seed,
        sigma2_upper_coeff=sigma2_upper_coeff,
        replications=replications,
        mean_avg_diff=float(avg.mean()),
        mean_max_diff=float(mx.mean()),
        peak_avg_diff=float(avg.max()),
        peak_max_diff=float(mx.max()),
        resampled=resampled)


# ---------------------------------------------------------------------------
# min-max mixture gap profiles at bisected tie weights


@dataclass(frozen=True)
class Fig3Root:
    m: int
    s: int
    sigma2_ref: float  # variance at which the tie weight was solved
    tie_weight: float  # weight tying states m-1 and m in the scenario


@dataclass(frozen=True)
class Fig3Row:
    m: int
    s: int
    sigma2: float
    gap: float  # |P(m-1) - P(m)| at the tie weight


@dataclass(frozen=True)
class Fig3Report:
    m_values: tuple[int, ...]
    s_values: tuple[int, ...]
    sigma2_grid: tuple[float, ...]
    roots: tuple[Fig3Root, ...]
    rows: tuple[Fig3Row, ...]


FIG3_PARENTS = 4


def run_fig3(m_values, s_values, sigma2_grid) -> Fig3Report:
    """Min-max mixture gap profiles across the variance grid.

    Four parents; for each state count m the compared pair is {m-1, m}.
    Per (m, s) the tie weight is solved by bisection at the reference
    variance 1/(4 m^2) and then held fixed while the gap is evaluated over
    the grid.  A failed bisection propagates with its scan profile.
    """
    m_values = tuple(int(m) for m in m_values)
    s_values = tuple(int(s) for s in s_values)
    sigma2_grid = tuple(float(v) for v in sigma2_grid)
    if not m_values or not s_values or not sigma2_grid:
        raise ValidationError(
            "need at least one state count, sample size, and variance")
    for m in m_values:
        if m < 3:
            raise ValidationError(f"state counts must be >= 3, got {m}")
    for s in s_values:
        if s < 2:
            raise ValidationError(f"sample sizes must be >= 2, got {s}")
    for v in sigma2_grid:
        if not 0.0 < v <= 0.5:
            raise ValidationError(f"variances must lie in (0, 0.5], got {v}")

    roots = []
    rows = []
    for m in m_values:
        k = m - 1
        sigma2_ref = 1.0 / (4 * m * m)
        for s in s_values:
            tie = bisect_wmax(1, m, k, FIG3_PARENTS, sigma2_ref, s)
            roots.append(Fig3Root(m, s, sigma2_ref, tie))
            for sigma2 in sigma2_grid:
                rows.append(Fig3Row(
                    m, s, sigma2,
                    mixminmax_gap(1, m, k, FIG3_PARENTS, tie, sigma2, s)))
    return Fig3Report(m_values, s_values, sigma2_grid, tuple(roots), tuple(rows))


# ---------------------------------------------------------------------------
# randomized structural property suites


@dataclass(frozen=True)
class Counterexample:
    suite: str
    params: str
    detail: str


@dataclass(frozen=True)
class PropertyReport:
    trials: int
    seed: int
    counterexamples: tuple[Counterexample, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


_KINDS = (WMEAN, WMIN, WMAX, MIXMINMAX)


def _random_spec(rng: np.random.Generator, kind: str,
                 n: int) -> WeightExpressionSpec:
    if kind == WMEAN:
        w = rng.random(n) + 1e-3
        w = w / w.sum()
        return WeightExpressionSpec(WMEAN, tuple(float(x) for x in w))
    if kind in (WMIN, WMAX):
        w = 1.0 + 9.0 * rng.random(n)
        return WeightExpressionSpec(kind, tuple(float(x) for x in w))
    a = float(rng.random())
    return WeightExpressionSpec.mixminmax(a, 1.0 - a)


def _generation_trial(seed: int, t: int, out: list[Counterexample]) -> None:
    """Normalization, adjacent-top-two, and value-span checks on one draw."""
    rng = _stream(seed, t)
    m = int(rng.integers(3, 8))
    n = int(rng.integers(2, 5))
    s = (3, 5)[int(rng.integers(0, 2))]
    sigma2 = float(rng.uniform(5e-4, 0.25))
    kind = _KINDS[int(rng.integers(0, 4))]
    spec = _random_spec(rng, kind, n)
    fragment = RankedFragment.uniform(n, m)
    config = tuple(int(x) for x in rng.integers(1, m + 1, size=n))
    params = GenerationParams(sigma2, s)

    label = (f"kind={kind} m={m} n={n} s={s} variance={sigma2:.9g} "
             f"weights={tuple(round(x, 9) for x in spec.weights)} "
             f"config={config}")
    dist = generate_distribution(spec, fragment, config, params)

    total_err = abs(float(dist.sum()) - 1.0)
    if total_err > 1e-9:
        out.append(Counterexample(
            "normalization", label, f"|sum - 1| = {total_err:.3e}"))
    if not check_consecutive_top2(dist):
        pair = mode_pair(dist)
        out.append(Counterexample(
            "consecutive-top2", label,
            f"mode={pair.mode} runner_up={pair.runner_up}"))

    lo, hi = mu_bounds(spec, fragment, config)
    span_err = abs((hi - lo) - 1.0 / m)
    if span_err > 1e-12:
        out.append(Counterexample(
            "value-span", label,
            f"span={hi - lo!r} deviates from 1/m by {span_err:.3e}"))


def _min_reduction_trial(seed: int, t: int, out: list[Counterexample]) -> None:
    """Soft-min reduction when parents do not outnumber states.

    Checks that the scenario parent attains the minimum for every sample
    combination and that the generated distribution matches the equivalent
    weighted mean to 1e-12.
    """
    rng = _stream(seed, 1_000_000 + t)
    m = int(rng.integers(3, 8))
    n = int(rng.integers(2, m + 1))
    i = int(rng.integers(1, n + 1))
    weights = tuple(float(x) for x in 1.02 + 6.98 * rng.random(n))
    sigma2 = float(rng.uniform(5e-4, 0.25))
    fragment = RankedFragment.uniform(n, m)
    spec = WeightExpressionSpec(WMIN, weights)
    config = lone_low_scenario(i, fragment)
    label = (f"m={m} n={n} i={i} variance={sigma2:.9g} "
             f"weights={tuple(round(x, 9) for x in weights)}")

    if not wmin_reduces(n, m, weights[i - 1]):
        out.append(Counterexample(
            "min-reduction", label, "reduction predicate false for n <= m"))
        return
    grids = [sample_points(k, mm, 3)
             for k, mm in zip(config, fragment.parent_state_counts)]
    for z in itertools.product(*grids):
        at = wmin_min_attained_at(spec, z)
        if at != i:
            out.append(Counterexample(
                "min-reduction", label,
                f"minimum attained at parent {at}, not {i}, at z={z}"))
            return
    params = GenerationParams(sigma2, 3)
    direct = generate_distribution(spec, fragment, config, params)
    reduced = generate_distribution(
        wmin_equivalent_wmean(weights[i - 1], i, n), fragment, config, params)
    err = float(np.max(np.abs(direct - reduced)))
    if err > 1e-12:
        out.append(Counterexample(
            "min-reduction", label,
            f"distribution mismatch {err:.3e} vs the equivalent weighted mean"))


def _min_threshold_trial(seed: int, t: int, out: list[Counterexample]) -> None:
    """Reduction threshold when parents outnumber states.

    Above the threshold the scenario parent keeps the minimum even against
    an adversarially heavy competitor; below it, the corner with the
    scenario parent at its upper edge and one competitor at its lower edge
    is a failure witness.
    """
    rng = _stream(seed, 2_000_000 + t)
    m = int(rng.integers(3, 6))
    n = int(rng.integers(m + 1, 10))
    i = int(rng.integers(1, n + 1))
    threshold = (n - 2) / (m - 2)
    margin = float(rng.uniform(0.05, 0.5)) * (threshold - 1.0)
    w_above = threshold + margin
    w_below = threshold - margin
    heavy = 1e9
    label = f"m={m} n={n} i={i} threshold={threshold:.9g} margin={margin:.9g}"

    if not wmin_reduces(n, m, w_above):
        out.append(Counterexample(
            "min-threshold", label, f"predicate false at weight {w_above!r}"))
    if wmin_reduces(n, m, w_below):
        out.append(Counterexample(
            "min-threshold", label, f"predicate true at weight {w_below!r}"))

    r = i % n + 1  # any competitor index distinct from i
    witness = [1.0] * n
    witness[i - 1] = 1.0 / m
    witness[r - 1] = (m - 1) / m

    def build(w_i: float) -> WeightExpressionSpec:
        weights = [1.0] * n
        weights[i - 1] = w_i
        weights[r - 1] = heavy
        return WeightExpressionSpec(WMIN, tuple(weights))

    if wmin_min_attained_at(build(w_above), witness) != i:
        out.append(Counterexample(
            "min-threshold", label,
            f"minimum left parent {i} at weight {w_above!r}"))
    if wmin_min_attained_at(build(w_below), witness) == i:
        out.append(Counterexample(
            "min-threshold", label,
            f"witness failed to dethrone parent {i} at weight {w_below!r}"))

    # above threshold the pin must also hold at random interior samples
    fragment = RankedFragment.uniform(n, m)
    config = lone_low_scenario(i, fragment)
    lows = np.array([(k - 1) / mm for k, mm in
                     zip(config, fragment.parent_state_counts)])
    widths = np.array([1.0 / mm for mm in fragment.parent_state_counts])
    for _ in range(3):
        z = lows + rng.random(n) * widths
        if wmin_min_attained_at(build(w_above), z) != i:
            out.append(Counterexample(
                "min-threshold", label,
                f"minimum left parent {i} at interior sample z={tuple(z)}"))
            break


def _mutation_probe(out: list[Counterexample]) -> None:
    """Deliberately corrupt a distribution to prove the checks can fail."""
    fragment = RankedFragment.uniform(1, 5)
    spec = WeightExpressionSpec.wmean(1.0)
    dist = generate_distribution(spec, fragment, (1,),
                                 GenerationParams(0.01, 5)).copy()
    dist[1], dist[4] = dist[4], dist[1]
    if not check_consecutive_top2(dist):
        pair = mode_pair(dist)
        out.append(Counterexample(
            "consecutive-top2",
            "mutation probe: swapped probabilities of states 2 and 5",
            f"mode={pair.mode} runner_up={pair.runner_up}"))


def run_property_checks(trials: int = 1000, seed: int = 0, *,
                        mutate_for_test: bool = False) -> PropertyReport:
    """Randomized structural property campaign; empty report means all pass.

    Runs `trials` generation checks (normalization, adjacent top two, value
    span) plus trials/5 soft-min reduction and trials/5 threshold-separation
    checks.  With mutate_for_test set, one corrupted distribution is checked
    as a self-test and must produce a counterexample.
    """
    trials = int(trials)
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    seed = _check_seed(seed)
    out: list[Counterexample] = []
    for t in range(trials):
        _generation_trial(seed, t, out)
    for t in range(max(1, trials // 5)):
        _min_reduction_trial(seed, t, out)
    for t in range(max(1, trials // 5)):
        _min_threshold_trial(seed, t, out)
    if mutate_for_test:
        _mutation_probe(out)
    return PropertyReport(trials, seed, tuple(out))
