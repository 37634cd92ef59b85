"""Throughput comparison of the pure-Python and compiled episode loops.

Both loops draw from the same RNG contract, so each (config, seed) pair
must finish at the same episode count with the same final matrices; the
benchmark asserts that while timing.  Run as:

    python3 benchmarks/bench_backends.py [--games 20]
"""

import argparse
import time

import numpy as np

from lexiboot.backend import HAVE_COMPILED
from lexiboot.game import GameConfig, run_game
from lexiboot.rng import GameRng, derive_seed

CASES = [
    ("unsup N=16", GameConfig(n_objects=16, n_words=8, context_size=2,
                              resolution=1000, mode="unsupervised")),
    ("unsup N=48", GameConfig(n_objects=48, n_words=24, context_size=2,
                              resolution=1000, mode="unsupervised")),
    ("sup   N=16", GameConfig(n_objects=16, n_words=8, context_size=2,
                              resolution=1000, mode="supervised")),
]


def bench(config: GameConfig, backend: str, games: int, master_seed: int):
    episodes = 0
    checksum = 0
    start = time.perf_counter()
    for i in range(games):
        result = run_game(config, rng=GameRng(derive_seed(master_seed, i)),
                          backend=backend)
        episodes += result.episodes
        checksum ^= int(np.bitwise_xor.reduce(result.matrix_i.counts, axis=None))
    elapsed = time.perf_counter() - start
    return episodes, elapsed, checksum


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--games", type=int, default=20,
                        help="games per case per backend (default 20)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = ["pure", "compiled"] if HAVE_COMPILED else ["pure"]
    if not HAVE_COMPILED:
        print("compiled kernel not available; timing the pure loop only\n")

    print(f"{'case':<12} {'backend':<9} {'episodes':>12} {'seconds':>9} "
          f"{'episodes/s':>12}")
    for label, config in CASES:
        rates = {}
        reference = None
        for backend in backends:
            episodes, elapsed, checksum = bench(
                config, backend, args.games, args.seed)
            if reference is None:
                reference = (episodes, checksum)
            elif (episodes, checksum) != reference:
                raise AssertionError(
                    f"{label}: backends disagree, {reference} vs "
                    f"{(episodes, checksum)}")
            rates[backend] = episodes / elapsed
            print(f"{label:<12} {backend:<9} {episodes:>12,} {elapsed:>9.2f} "
                  f"{rates[backend]:>12,.0f}")
        if len(rates) == 2:
            print(f"{label:<12} speedup x{rates['compiled'] / rates['pure']:.1f}")
        print()


if __name__ == "__main__":
    main()
