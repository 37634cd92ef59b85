"""Monte Carlo ensembles over independent games, alpha sweeps, and the
1/N -> 0 extrapolation behind the error-vs-alpha and error-vs-1/N figures.

Every ensemble member gets its own seed from a stateless 64-bit mix of
(master_seed, sample_index), and reduction always runs in ascending sample
order with compensated summation, so results are byte-identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .errors import ConfigError, FitError
from .game import GameConfig, run_game
from .measures import accuracy_report, optimal_error
from .occupancy import asymptotic_error
from .rng import GameRng, derive_seed


@dataclass(frozen=True)
class SampleOutcome:
    error: float           # agent I's error; nan when the game did not freeze
    episodes: int
    frozen: bool
    consensus: bool


@dataclass(frozen=True)
class EnsembleStats:
    """Aggregates over an ensemble; error statistics cover frozen samples
    only (the measure is undefined before freezing), with non-freezing
    games surfaced through freeze_rate.  mean_error/std_error are nan when
    nothing froze."""
    config: GameConfig
    n_samples: int
    mean_error: float
    std_error: float
    freeze_rate: float
    consensus_rate: float
    mean_episodes: float


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    stats: EnsembleStats
    eps_random: float      # infinite-size random-assignment error at alpha
    eps_optimal: float


@dataclass(frozen=True)
class FitResult:
    intercept: float
    intercept_err: float
    slope: float
    slope_err: float
    points: tuple[tuple[float, float, float], ...]  # (1/N, eps, se)


# ----------------------------------------------------------------- sampling

def run_sample(config: GameConfig, seed: int) -> SampleOutcome:
    """One independent game under its derived seed."""
    result = run_game(config, rng=GameRng(seed))
    error = float(accuracy_report(result.matrix_i).error) if result.frozen else math.nan
    return SampleOutcome(error=error, episodes=result.episodes,
                         frozen=result.frozen, consensus=result.consensus)


def _run_chunk(args):
    config, master_seed, start, stop = args
    return start, [run_sample(config, derive_seed(master_seed, i))
                   for i in range(start, stop)]


def _neumaier_sum(values) -> float:
    total = 0.0
    compensation = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            compensation += (total - t) + v
        else:
            compensation += (v - t) + total
        total = t
    return total + compensation


def mean_and_se(values) -> tuple[float, float]:
    """Sample mean and standard error of the mean, compensated summation.

    Empty input gives (nan, nan); a single value gives SE 0.
    """
    values = list(values)
    n = len(values)
    if n == 0:
        return math.nan, math.nan
    mean = _neumaier_sum(values) / n
    if n == 1:
        return mean, 0.0
    var = _neumaier_sum([(v - mean) ** 2 for v in values]) / (n - 1)
    return mean, math.sqrt(var / n)


def run_ensemble(config: GameConfig, n_samples: int, master_seed: int,
                 workers: int = 1) -> EnsembleStats:
    """n_samples independent games; statistics reduced in sample order."""
    if n_samples < 1:
        raise ConfigError(f"need n_samples >= 1, got {n_samples}")
    if workers < 1:
        raise ConfigError(f"need workers >= 1, got {workers}")

    outcomes: list[SampleOutcome | None] = [None] * n_samples
    if workers == 1 or n_samples == 1:
        for i in range(n_samples):
            outcomes[i] = run_sample(config, derive_seed(master_seed, i))
    else:
        chunk = max(1, -(-n_samples // (workers * 4)))
        tasks = [(config, master_seed, start, min(start + chunk, n_samples))
                 for start in range(0, n_samples, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for start, results in pool.map(_run_chunk, tasks):
                outcomes[start:start + len(results)] = results

    frozen = [o for o in outcomes if o.frozen]
    mean_error, std_error = mean_and_se([o.error for o in frozen])
    mean_episodes = (_neumaier_sum([float(o.episodes) for o in frozen]) / len(frozen)
                     if frozen else math.nan)
    consensus_rate = (sum(1 for o in frozen if o.consensus) / len(frozen)
                      if frozen else 0.0)
    return EnsembleStats(
        config=config, n_samples=n_samples,
        mean_error=mean_error, std_error=std_error,
        freeze_rate=len(frozen) / n_samples,
        consensus_rate=consensus_rate,
        mean_episodes=mean_episodes)


# -------------------------------------------------------------- alpha sweep

def words_for_alpha(alpha: float, n_objects: int) -> int:
    """H = round(alpha * N); must land at >= 1 word."""
    n_words = round(alpha * n_objects)
    if n_words < 1:
        raise ConfigError(
            f"alpha={alpha} with N={n_objects} yields H={n_words} < 1")
    return n_words


def sweep_alpha(base: GameConfig, alphas, n_samples: int, master_seed: int,
                workers: int = 1) -> list[SweepRow]:
    """One ensemble per alpha at the base config's N, with the analytic
    random-assignment and optimal-error columns alongside."""
    rows = []
    for index, alpha in enumerate(alphas):
        config = replace(base, n_words=words_for_alpha(alpha, base.n_objects))
        stats = run_ensemble(config, n_samples, derive_seed(master_seed, index),
                             workers=workers)
        rows.append(SweepRow(alpha=alpha, stats=stats,
                             eps_random=asymptotic_error(alpha),
                             eps_optimal=optimal_error(alpha)))
    return rows


# ------------------------------------------------------------ extrapolation

def extrapolate_to_infinite_N(points) -> FitResult:
    """Weighted linear fit of error against 1/N.

    ``points`` holds (N, mean error, standard error) triples.  Weights are
    1/SE^2; if any SE is zero the fit falls back to unit weights, with
    parameter errors then scaled by the residual variance (zero when the
    fit is exact or has no spare degrees of freedom).
    """
    points = [(int(n), float(e), float(se)) for n, e, se in points]
    if len(points) < 2:
        raise FitError(f"need >= 2 points, got {len(points)}")
    if len({n for n, _, _ in points}) != len(points):
        raise FitError("duplicate N values in fit input")

    xs = [1.0 / n for n, _, _ in points]
    ys = [e for _, e, _ in points]
    ses = [se for _, _, se in points]
    unit = any(se == 0.0 for se in ses)
    ws = [1.0] * len(points) if unit else [1.0 / se ** 2 for se in ses]

    s_w = _neumaier_sum(ws)
    s_x = _neumaier_sum([w * x for w, x in zip(ws, xs)])
    s_y = _neumaier_sum([w * y for w, y in zip(ws, ys)])
    s_xx = _neumaier_sum([w * x * x for w, x in zip(ws, xs)])
    s_xy = _neumaier_sum([w * x * y for w, x, y in zip(ws, xs, ys)])
    delta = s_w * s_xx - s_x * s_x
    if delta == 0.0:
        raise FitError("degenerate abscissae: cannot fit a line")
    intercept = (s_xx * s_y - s_x * s_xy) / delta
    slope = (s_w * s_xy - s_x * s_y) / delta
    var_intercept = s_xx / delta
    var_slope = s_w / delta
    if unit:
        dof = len(points) - 2
        if dof > 0:
            chi2 = _neumaier_sum(
                [w * (y - intercept - slope * x) ** 2
                 for w, x, y in zip(ws, xs, ys)])
            scale = chi2 / dof
        else:
            scale = 0.0
        var_intercept *= scale
        var_slope *= scale
    return FitResult(
        intercept=intercept, intercept_err=math.sqrt(var_intercept),
        slope=slope, slope_err=math.sqrt(var_slope),
        points=tuple((x, y, se) for x, y, se in zip(xs, ys, ses)))
