"""Deterministic randomness: seed derivation and the per-game draw stream.

A game owns exactly one stream (a PCG64 bit generator).  Everything the
episode loop needs is the bounded draw ``below(k)``, implemented as Lemire's
nearly-divisionless reduction over raw 64-bit outputs.  The compiled kernel
applies the identical reduction to the same bit generator, so a game is
bit-reproducible across backends.  ``below(1)`` consumes nothing from the
stream; this is load-bearing for reproducibility (frozen rows draw nothing).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def mix64(a: int, b: int) -> int:
    """Stateless 64-bit mix of two integers (golden-ratio fold + splitmix64
    finalizer).  For fixed ``a`` the map ``b -> mix64(a, b)`` is a bijection
    on 64-bit integers, so derived per-sample seeds never collide."""
    x = (a * 0x9E3779B97F4A7C15 + b) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def derive_seed(master_seed: int, index: int) -> int:
    """Per-sample seed for ensemble member ``index``."""
    return mix64(master_seed & _MASK64, index & _MASK64)


class GameRng:
    """One seeded draw stream, shared by both agents of a game.

    ``generator`` wraps the same bit generator, so numpy distributions
    (multinomial initialization, the random-assignment oracle) advance the
    identical stream as ``below``/``raw``.
    """

    __slots__ = ("bit_generator", "generator")

    def __init__(self, seed: int):
        self.bit_generator = np.random.PCG64(seed)
        self.generator = np.random.Generator(self.bit_generator)

    def raw(self) -> int:
        """Next raw 64-bit output of the bit generator."""
        return int(self.bit_generator.random_raw())

    def below(self, k: int) -> int:
        """Uniform integer in [0, k) via Lemire reduction; k == 1 is free."""
        if k < 1:
            raise ValueError(f"below() needs k >= 1, got {k}")
        if k == 1:
            return 0
        x = self.raw()
        m = x * k
        low = m & _MASK64
        if low < k:
            threshold = ((1 << 64) - k) % k  # 2^64 mod k
            while low < threshold:
                x = self.raw()
                m = x * k
                low = m & _MASK64
        return m >> 64
