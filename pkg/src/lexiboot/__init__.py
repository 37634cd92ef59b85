"""Two-agent naming-game simulator with exact baselines.

Two agents take turns naming objects drawn into small contexts, nudging
integer count matrices until every row pins all its mass on one word.  The
package pairs the simulator (compiled kernel with a pure-Python twin) with
the exact combinatorics needed to benchmark the frozen lexicons: the
unused-word occupancy distribution, its Poisson limit, and the optimal
and random-assignment error baselines.
"""

__version__ = "0.1.0"

from .errors import ConfigError, FitError, NotFrozenError
from .experiment import (
    EnsembleStats,
    FitResult,
    SweepRow,
    extrapolate_to_infinite_N,
    run_ensemble,
    run_sample,
    sweep_alpha,
    words_for_alpha,
)
from .game import (
    DEFAULT_MAX_EPISODES,
    GameConfig,
    GameResult,
    run_game,
    sample_context,
    supervised_episode,
    unsupervised_episode,
)
from .lexicon import (
    VerbalizationMatrix,
    apply_transfer,
    init_matrix,
    interpret,
    is_frozen,
    speak,
)
from .measures import (
    CommunicationReport,
    accuracy_report,
    consensus_distance,
    optimal_error,
)
from .occupancy import (
    EXACT_LIMIT,
    OccupancyDistribution,
    PoissonLimit,
    asymptotic_error,
    exact_expected_error,
    exact_unused_distribution,
    poisson_lambda,
    poisson_limit,
    random_assignment_sample,
    unused_distribution_mean,
)
from .rng import GameRng, derive_seed, mix64

__all__ = [
    "CommunicationReport",
    "ConfigError",
    "DEFAULT_MAX_EPISODES",
    "EXACT_LIMIT",
    "EnsembleStats",
    "FitError",
    "FitResult",
    "GameConfig",
    "GameResult",
    "GameRng",
    "NotFrozenError",
    "OccupancyDistribution",
    "PoissonLimit",
    "SweepRow",
    "VerbalizationMatrix",
    "accuracy_report",
    "apply_transfer",
    "asymptotic_error",
    "consensus_distance",
    "derive_seed",
    "exact_expected_error",
    "exact_unused_distribution",
    "extrapolate_to_infinite_N",
    "init_matrix",
    "interpret",
    "is_frozen",
    "mix64",
    "optimal_error",
    "poisson_lambda",
    "poisson_limit",
    "random_assignment_sample",
    "run_ensemble",
    "run_game",
    "run_sample",
    "sample_context",
    "speak",
    "supervised_episode",
    "sweep_alpha",
    "unsupervised_episode",
    "unused_distribution_mean",
    "words_for_alpha",
]
