"""Context sampling, the two learning rules, and full games run to freeze.

Draw-order contract (one stream per game, shared by both agents; the
compiled kernel consumes identically, so games are bit-reproducible across
backends):

  init:     agent I's rows, then agent J's (multinomial rows, numpy stream).
  episode:  1. context: for slot i in 0..C-1, v = below(N), redrawn while v
               collides with an earlier slot;
            2. topic = context[below(C)];
            3. speak: below(#maximal entries) only when the speaker row ties;
            4a. unsupervised: for each context object in slot order, one
                decrement word below(#positive words of the hearer row);
            4b. supervised: interpret tie-break as in 3, then the speaker-row
                draw, then the hearer-row draw (update row: topic on success,
                the guess on failure).

``below(1)`` consumes nothing, so frozen rows never advance the stream.
Agents strictly alternate roles, I speaking first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .errors import ConfigError
from .lexicon import (VerbalizationMatrix, apply_transfer, init_matrix,
                      interpret, is_frozen, speak)
from .rng import GameRng

Mode = Literal["unsupervised", "supervised"]

DEFAULT_MAX_EPISODES = 2_000_000_000


@dataclass(frozen=True)
class GameConfig:
    """All parameters of one game."""
    n_objects: int
    n_words: int
    context_size: int
    resolution: int
    mode: Mode = "unsupervised"
    max_episodes: int = DEFAULT_MAX_EPISODES
    seed: int = 0

    def __post_init__(self):
        if self.n_objects < 1 or self.n_words < 1:
            raise ConfigError(
                f"need N >= 1 and H >= 1, got N={self.n_objects} H={self.n_words}")
        if not 1 <= self.context_size <= self.n_objects:
            raise ConfigError(
                f"need 1 <= C <= N, got C={self.context_size} N={self.n_objects}")
        if self.resolution < 1:
            raise ConfigError(f"need M >= 1, got M={self.resolution}")
        if self.max_episodes < 1:
            raise ConfigError(f"need max_episodes >= 1, got {self.max_episodes}")
        if self.mode not in ("unsupervised", "supervised"):
            raise ConfigError(f"unknown mode {self.mode!r}")

    def alpha(self) -> float:
        """Word-to-object ratio H/N."""
        return self.n_words / self.n_objects


@dataclass(frozen=True)
class EpisodeRecord:
    """What happened in one communication episode."""
    speaker: str                     # "I" or "J"
    topic: int
    word: int
    hearer_guess: int | None = None  # supervised only
    success: bool | None = None      # supervised only


@dataclass(frozen=True)
class GameResult:
    matrix_i: VerbalizationMatrix
    matrix_j: VerbalizationMatrix
    episodes: int
    frozen: bool
    consensus: bool


def sample_context(n_objects: int, context_size: int, rng: GameRng) -> tuple[int, ...]:
    """C distinct objects, uniform over C-subsets (slot-wise rejection)."""
    if not 1 <= context_size <= n_objects:
        raise ConfigError(
            f"need 1 <= C <= N, got C={context_size} N={n_objects}")
    context: list[int] = []
    for _ in range(context_size):
        v = rng.below(n_objects)
        while v in context:
            v = rng.below(n_objects)
        context.append(v)
    return tuple(context)


def _draw_positive_word(matrix: VerbalizationMatrix, obj: int, rng: GameRng) -> int:
    """Uniform word among those with positive count in row ``obj``; a frozen
    row has exactly one and the draw consumes nothing."""
    return int(matrix.pos_words[obj, rng.below(int(matrix.pos_count[obj]))])


def unsupervised_episode(speaker: VerbalizationMatrix, hearer: VerbalizationMatrix,
                         config: GameConfig, rng: GameRng,
                         speaker_tag: str = "I") -> EpisodeRecord:
    """Cross-situational episode: the speaker names a topic from a fresh
    context and only the hearer learns.  Every context row of the hearer
    gains one unit on the spoken word and loses one on a random positive
    word of that row (possibly the spoken word itself: a silent no-op).
    Transfers with an absorbed endpoint are skipped, so frozen rows are
    inert and the speaker's matrix is untouched by construction."""
    context = sample_context(config.n_objects, config.context_size, rng)
    topic = context[rng.below(len(context))]
    word = speak(speaker, topic, rng)
    for obj in context:
        dec = _draw_positive_word(hearer, obj, rng)
        apply_transfer(hearer, obj, word, dec)
    return EpisodeRecord(speaker=speaker_tag, topic=topic, word=word)


def supervised_episode(speaker: VerbalizationMatrix, hearer: VerbalizationMatrix,
                       config: GameConfig, rng: GameRng,
                       speaker_tag: str = "I") -> EpisodeRecord:
    """Operant-conditioning episode: the hearer guesses the topic among the
    context and both agents update one row on the outcome.

    Success reinforces the spoken word in both topic rows (random positive
    word decremented for normalization); failure drains the spoken word from
    the speaker's topic row and from the hearer's guessed row (random
    not-yet-absorbed word incremented).  A frozen row has no valid random
    word, so its update is skipped."""
    context = sample_context(config.n_objects, config.context_size, rng)
    topic = context[rng.below(len(context))]
    word = speak(speaker, topic, rng)
    guess = interpret(hearer, word, context, rng)
    success = guess == topic
    word_s = _draw_positive_word(speaker, topic, rng)
    if success:
        apply_transfer(speaker, topic, word, word_s)
        word_h = _draw_positive_word(hearer, topic, rng)
        apply_transfer(hearer, topic, word, word_h)
    else:
        apply_transfer(speaker, topic, word_s, word)
        word_h = _draw_positive_word(hearer, guess, rng)
        apply_transfer(hearer, guess, word_h, word)
    return EpisodeRecord(speaker=speaker_tag, topic=topic, word=word,
                         hearer_guess=guess, success=success)


def _run_loop_pure(matrix_i: VerbalizationMatrix, matrix_j: VerbalizationMatrix,
                   config: GameConfig, rng: GameRng) -> int:
    """Reference episode loop; the compiled kernel mirrors it draw for draw."""
    episode_fn = (unsupervised_episode if config.mode == "unsupervised"
                  else supervised_episode)
    episodes = 0
    while episodes < config.max_episodes:
        if is_frozen(matrix_i) and is_frozen(matrix_j):
            break
        if episodes % 2 == 0:
            episode_fn(matrix_i, matrix_j, config, rng, speaker_tag="I")
        else:
            episode_fn(matrix_j, matrix_i, config, rng, speaker_tag="J")
        episodes += 1
    return episodes


def run_game(config: GameConfig, rng: GameRng | None = None,
             backend: str | None = None) -> GameResult:
    """Play episodes until both matrices freeze or the episode cap is hit.

    Hitting the cap is reported via ``frozen=False``, not an exception (the
    supervised rule can fail to freeze when H is on the order of C).

    At coarse resolution the pair can also wedge itself into a mutually
    blocked state: every word either agent still produces has already been
    absorbed at zero in the other's corresponding row, so no transfer can
    fire again and unfrozen rows stay unfrozen forever.  Zeroed entries are
    common right after initialization when M is small relative to H, which
    makes small-M exploratory runs the place to expect this; keep
    ``max_episodes`` modest there instead of relying on the default cap.
    """
    from . import backend as _backend  # deferred: avoids import cycle at build time
    from .measures import consensus_distance

    if rng is None:
        rng = GameRng(config.seed)
    matrix_i = init_matrix(config.n_objects, config.n_words, config.resolution, rng)
    matrix_j = init_matrix(config.n_objects, config.n_words, config.resolution, rng)
    episodes = _backend.run_loop(matrix_i, matrix_j, config, rng, backend=backend)
    frozen = is_frozen(matrix_i) and is_frozen(matrix_j)
    consensus = consensus_distance(matrix_i, matrix_j) == 0.0
    return GameResult(matrix_i=matrix_i, matrix_j=matrix_j, episodes=episodes,
                      frozen=frozen, consensus=consensus)
