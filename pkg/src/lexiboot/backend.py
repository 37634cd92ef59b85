"""Episode-loop backend selection: compiled kernel when available, pure
Python otherwise.  LEXIBOOT_BACKEND=pure|compiled overrides the default;
both produce bit-identical games (enforced by the equivalence tests)."""

from __future__ import annotations

import os

try:
    from . import _kernel
except ImportError:  # extension not built; the pure loop is the contract
    _kernel = None

HAVE_COMPILED = _kernel is not None


def default_backend() -> str:
    env = os.environ.get("LEXIBOOT_BACKEND")
    if env:
        if env not in ("pure", "compiled"):
            raise ValueError(f"LEXIBOOT_BACKEND must be 'pure' or 'compiled', got {env!r}")
        return env
    return "compiled" if HAVE_COMPILED else "pure"


def run_loop(matrix_i, matrix_j, config, rng, backend: str | None = None) -> int:
    """Run the game's episode loop in the selected backend; returns the
    number of episodes executed."""
    from .game import _run_loop_pure

    name = backend or default_backend()
    if name == "pure":
        return _run_loop_pure(matrix_i, matrix_j, config, rng)
    if name != "compiled":
        raise ValueError(f"unknown backend {name!r}")
    if not HAVE_COMPILED:
        raise RuntimeError("compiled backend requested but lexiboot._kernel is not built")
    episodes, frozen_i, frozen_j = _kernel.run_to_freeze(
        matrix_i.counts, matrix_i.pos_words, matrix_i.pos_slot,
        matrix_i.pos_count, matrix_i.frozen_rows,
        matrix_j.counts, matrix_j.pos_words, matrix_j.pos_slot,
        matrix_j.pos_count, matrix_j.frozen_rows,
        config.context_size, config.mode == "supervised",
        config.max_episodes, rng.bit_generator)
    matrix_i.frozen_rows = frozen_i
    matrix_j.frozen_rows = frozen_j
    return episodes
