"""Analytic baselines from the classical occupancy problem.

Randomly assigning N objects to H words leaves m words unused with
probability P_m = C(H, m) * surj(N, H - m) / H^N, where surj counts the
surjections from the objects onto the used words.  That is algebraically
the textbook alternating sum, but evaluated with exact integers via the
surjection recurrence it is immune to the catastrophic cancellation the
alternating form suffers at large H.  In the joint large-N, large-H limit
the unused count becomes Poisson with lambda = H exp(-N/H), which gives the
random-assignment error 1 - alpha + alpha * exp(-1/alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .lexicon import VerbalizationMatrix
from .measures import accuracy_report
from .rng import GameRng

EXACT_LIMIT = 200  # big-integer work stays well under a second up to here


@lru_cache(maxsize=None)
def surjection_count(n: int, k: int) -> int:
    """Number of surjections from n labeled objects onto k labeled words."""
    if k < 0 or k > n:
        return 0
    if k == 0:
        return 1 if n == 0 else 0
    return k * (surjection_count(n - 1, k) + surjection_count(n - 1, k - 1))


@dataclass(frozen=True)
class OccupancyDistribution:
    """Distribution of the number of unused words, m = 0..H."""
    n_objects: int
    n_words: int
    probabilities: tuple[float, ...]
    exact: tuple[Fraction, ...]

    def exact_mean(self) -> Fraction:
        return sum((m * p for m, p in enumerate(self.exact)), Fraction(0))

    def mean(self) -> float:
        return float(self.exact_mean())


def exact_unused_distribution(n_objects: int, n_words: int) -> OccupancyDistribution:
    """Exact P_m for all m; supported for N, H <= EXACT_LIMIT."""
    if n_objects < 1 or n_words < 1:
        raise ConfigError(f"need N >= 1 and H >= 1, got N={n_objects} H={n_words}")
    if n_objects > EXACT_LIMIT or n_words > EXACT_LIMIT:
        raise ConfigError(
            f"exact mode supports N, H <= {EXACT_LIMIT} "
            f"(got N={n_objects}, H={n_words}); use the Poisson limit instead")
    total = n_words ** n_objects
    exact = tuple(
        Fraction(math.comb(n_words, m) * surjection_count(n_objects, n_words - m), total)
        for m in range(n_words + 1))
    return OccupancyDistribution(
        n_objects=n_objects, n_words=n_words,
        probabilities=tuple(float(p) for p in exact), exact=exact)


def poisson_lambda(n_objects: float, n_words: float) -> float:
    """Limit parameter lambda = H exp(-N/H)."""
    if n_words <= 0:
        raise ValueError(f"need H > 0, got {n_words}")
    return n_words * math.exp(-n_objects / n_words)


@dataclass(frozen=True)
class PoissonLimit:
    lam: float

    def pmf(self, m: int) -> float:
        if m < 0:
            return 0.0
        if self.lam == 0.0:
            return 1.0 if m == 0 else 0.0
        # log-space keeps large lambda / large m finite
        return math.exp(-self.lam + m * math.log(self.lam) - math.lgamma(m + 1))


def poisson_limit(m: int, n_objects: float, n_words: float) -> float:
    """Limiting probability of m unused words."""
    return PoissonLimit(poisson_lambda(n_objects, n_words)).pmf(m)


def asymptotic_error(alpha: float) -> float:
    """Random-assignment communication error in the infinite-size limit."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        return 1.0  # continuity: alpha * exp(-1/alpha) -> 0
    return (1.0 - alpha) + alpha * math.exp(-1.0 / alpha)


def exact_expected_error(n_objects: int, n_words: int) -> float:
    """Finite-size expected error of a random assignment: the expected
    unused-word count is H (1 - 1/H)^N by linearity, and the accuracy is
    (H - E[m]) / N."""
    if n_objects < 1 or n_words < 1:
        raise ValueError(f"need N >= 1 and H >= 1, got N={n_objects} H={n_words}")
    expected_unused = n_words * ((n_words - 1) / n_words) ** n_objects
    return 1.0 - (n_words - expected_unused) / n_objects


def random_assignment_sample(n_objects: int, n_words: int, rng: GameRng) -> float:
    """One Monte Carlo draw: assign each object a uniform word, build the
    binary matrix, and score it with the standard accuracy report."""
    if n_objects < 1 or n_words < 1:
        raise ValueError(f"need N >= 1 and H >= 1, got N={n_objects} H={n_words}")
    words = rng.generator.integers(0, n_words, size=n_objects)
    matrix = VerbalizationMatrix.from_assignment(words, n_words)
    return float(accuracy_report(matrix).error)


def unused_distribution_mean(n_objects: int, n_words: int) -> float:
    """E[m] in closed form (matches the exact distribution's mean)."""
    if n_objects < 1 or n_words < 1:
        raise ValueError(f"need N >= 1 and H >= 1, got N={n_objects} H={n_words}")
    return n_words * ((n_words - 1) / n_words) ** n_objects
