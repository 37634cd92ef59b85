"""Communication accuracy of frozen lexicons, and consensus diagnostics.

After freezing, every object has a unique word; a hearer resolves that word
correctly with probability 1/(number of objects sharing it).  The per-object
accuracies, their mean, the error, and the used-word count are accumulated
in exact rational arithmetic (the used-word identity H_u = sum_n phi_n then
holds exactly, not just to float precision).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotFrozenError
from .lexicon import VerbalizationMatrix, is_frozen


@dataclass(frozen=True)
class CommunicationReport:
    per_object_accuracy: tuple[Fraction, ...]
    mean_accuracy: Fraction
    error: Fraction
    used_words: Fraction

    @property
    def error_float(self) -> float:
        return float(self.error)

    @property
    def mean_accuracy_float(self) -> float:
        return float(self.mean_accuracy)

    @property
    def used_words_float(self) -> float:
        return float(self.used_words)


def accuracy_report(matrix: VerbalizationMatrix) -> CommunicationReport:
    """Exact communication measures of a frozen matrix."""
    if not is_frozen(matrix):
        raise NotFrozenError(
            f"communication measures need a frozen matrix "
            f"({matrix.n_objects - matrix.frozen_rows} rows still non-binary)")
    # frozen: the single positive word of row n names object n
    word_of = matrix.pos_words[:, 0].astype(np.int64)
    objects_per_word = np.bincount(word_of, minlength=matrix.n_words)
    per_object = tuple(Fraction(1, int(objects_per_word[w])) for w in word_of)
    used_words = sum(per_object, Fraction(0))
    mean_accuracy = used_words / matrix.n_objects
    return CommunicationReport(
        per_object_accuracy=per_object,
        mean_accuracy=mean_accuracy,
        error=1 - mean_accuracy,
        used_words=used_words,
    )


def optimal_error(alpha: float) -> float:
    """Best achievable error at word-to-object ratio alpha: 1 - alpha, and 0
    once words outnumber objects."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return max(0.0, 1.0 - alpha)


def _argmax_masks(matrix: VerbalizationMatrix) -> np.ndarray:
    row_max = matrix.counts.max(axis=1, keepdims=True)
    return matrix.counts == row_max


def consensus_distance(a: VerbalizationMatrix, b: VerbalizationMatrix) -> float:
    """Fraction of rows on which the two matrices' preferred words differ
    (ties compared as sets); 0.0 means lexicon consensus."""
    if (a.n_objects, a.n_words) != (b.n_objects, b.n_words):
        raise ValueError(
            f"dimension mismatch: {a.n_objects}x{a.n_words} vs {b.n_objects}x{b.n_words}")
    differing = (_argmax_masks(a) != _argmax_masks(b)).any(axis=1)
    return float(differing.sum()) / a.n_objects
