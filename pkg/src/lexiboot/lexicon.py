"""Integer-count verbalization matrices and their elementary operations.

Each agent holds an N x H table of non-negative integer counts; row n sums
to the resolution M, and counts[n, h] / M is the strength of the object-n /
word-h association.  Entries stuck at 0 or M are absorbing: a transfer whose
increment or decrement endpoint is absorbed is skipped entirely, which keeps
every row sum at M forever.  A row with a single positive entry (necessarily
M) is binary; once every row is binary the matrix is frozen and the game
dynamics can no longer change it.

Alongside ``counts`` the matrix keeps, per row, the list of words with
positive count (``pos_words``/``pos_slot``/``pos_count``).  Counts never
return from 0, so these lists only shrink; they give O(1) uniform draws over
positive words and an O(1) frozen check via the ``frozen_rows`` counter.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import ConfigError
from .rng import GameRng


class VerbalizationMatrix:
    """Mutable object/word association table for one agent."""

    __slots__ = ("n_objects", "n_words", "resolution", "counts",
                 "pos_words", "pos_slot", "pos_count", "frozen_rows")

    def __init__(self, counts: np.ndarray, resolution: int):
        counts = np.ascontiguousarray(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 1:
            raise ConfigError(f"counts must be a non-empty 2-D table, got shape {counts.shape}")
        if resolution < 1:
            raise ConfigError(f"resolution must be >= 1, got {resolution}")
        if (counts < 0).any() or (counts > resolution).any():
            raise ConfigError("counts must lie in [0, resolution]")
        if (counts.sum(axis=1) != resolution).any():
            raise ConfigError("every row must sum to the resolution")
        self.counts = counts
        self.n_objects, self.n_words = counts.shape
        self.resolution = resolution
        self._rebuild_pos()

    def _rebuild_pos(self):
        n, h = self.counts.shape
        positive = self.counts > 0
        # stable argsort of the negated mask lists each row's positive words
        # first, in ascending order (the order draws are defined against)
        order = np.argsort(~positive, axis=1, kind="stable").astype(np.int32)
        self.pos_words = np.ascontiguousarray(order)
        self.pos_count = positive.sum(axis=1).astype(np.int32)
        self.pos_slot = np.full((n, h), -1, dtype=np.int32)
        valid = np.arange(h)[None, :] < self.pos_count[:, None]
        rows, slots = np.nonzero(valid)
        self.pos_slot[rows, order[rows, slots]] = slots.astype(np.int32)
        self.frozen_rows = int((self.pos_count == 1).sum())

    @classmethod
    def from_counts(cls, counts, resolution: int) -> "VerbalizationMatrix":
        return cls(np.asarray(counts), resolution)

    @classmethod
    def from_assignment(cls, words: Sequence[int], n_words: int,
                        resolution: int = 1) -> "VerbalizationMatrix":
        """Binary matrix mapping object n to words[n]."""
        words = np.asarray(words, dtype=np.int64)
        counts = np.zeros((words.size, n_words), dtype=np.int64)
        counts[np.arange(words.size), words] = resolution
        return cls(counts, resolution)

    def row_frozen(self, obj: int) -> bool:
        return int(self.pos_count[obj]) == 1

    def positive_words(self, obj: int) -> list[int]:
        return sorted(int(w) for w in self.pos_words[obj, :self.pos_count[obj]])

    def copy(self) -> "VerbalizationMatrix":
        return VerbalizationMatrix(self.counts.copy(), self.resolution)

    def __repr__(self):
        return (f"VerbalizationMatrix(N={self.n_objects}, H={self.n_words}, "
                f"M={self.resolution}, frozen_rows={self.frozen_rows})")


def init_matrix(n_objects: int, n_words: int, resolution: int,
                rng: GameRng) -> VerbalizationMatrix:
    """Random initial matrix: each row distributes M balls uniformly over the
    H word slots (independent multinomial rows)."""
    if n_objects < 1 or n_words < 1 or resolution < 1:
        raise ConfigError(
            f"dimensions must be positive, got N={n_objects} H={n_words} M={resolution}")
    pvals = np.full(n_words, 1.0 / n_words)
    counts = rng.generator.multinomial(resolution, pvals, size=n_objects)
    return VerbalizationMatrix(counts.astype(np.int64), resolution)


def speak(matrix: VerbalizationMatrix, obj: int, rng: GameRng) -> int:
    """Word produced for ``obj``: the largest entry of its row, ties broken
    uniformly at random (one draw, consumed only when there are ties)."""
    if not 0 <= obj < matrix.n_objects:
        raise ValueError(f"object {obj} out of range [0, {matrix.n_objects})")
    row = matrix.counts[obj]
    ties = np.flatnonzero(row == row.max())
    if ties.size == 1:
        return int(ties[0])
    return int(ties[rng.below(ties.size)])


def interpret(matrix: VerbalizationMatrix, word: int,
              candidates: Sequence[int], rng: GameRng) -> int:
    """Introspective-obverter guess: among ``candidates``, the object this
    matrix associates most strongly with ``word``; ties uniform at random."""
    if len(candidates) == 0:
        raise ValueError("interpret() needs at least one candidate")
    if not 0 <= word < matrix.n_words:
        raise ValueError(f"word {word} out of range [0, {matrix.n_words})")
    values = matrix.counts[np.asarray(candidates), word]
    ties = np.flatnonzero(values == values.max())
    if ties.size == 1:
        return int(candidates[int(ties[0])])
    return int(candidates[int(ties[rng.below(ties.size)])])


def apply_transfer(matrix: VerbalizationMatrix, obj: int,
                   inc_word: int, dec_word: int) -> bool:
    """Move one count unit from dec_word to inc_word in row ``obj``.

    Returns False (row untouched) for a self-transfer or when either endpoint
    is absorbed at 0.  A frozen row is always caught by those checks, since
    its only positive entry is the full M.  Row sums are preserved in every
    case.
    """
    if not 0 <= obj < matrix.n_objects:
        raise ValueError(f"object {obj} out of range [0, {matrix.n_objects})")
    if not (0 <= inc_word < matrix.n_words and 0 <= dec_word < matrix.n_words):
        raise ValueError("word index out of range")
    if inc_word == dec_word:
        return False
    row = matrix.counts[obj]
    if row[inc_word] == 0 or row[dec_word] == 0:
        return False
    row[inc_word] += 1
    row[dec_word] -= 1
    if row[dec_word] == 0:
        # dec_word absorbed: swap-remove it from the positive-word list
        slot = matrix.pos_slot[obj, dec_word]
        last = matrix.pos_count[obj] - 1
        moved = matrix.pos_words[obj, last]
        matrix.pos_words[obj, slot] = moved
        matrix.pos_slot[obj, moved] = slot
        matrix.pos_slot[obj, dec_word] = -1
        matrix.pos_count[obj] = last
        if last == 1:
            matrix.frozen_rows += 1
    return True


def is_frozen(matrix: VerbalizationMatrix) -> bool:
    """True iff every row is binary; O(1) via the frozen-row counter."""
    return matrix.frozen_rows == matrix.n_objects
