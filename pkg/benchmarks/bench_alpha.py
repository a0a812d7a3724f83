"""Benchmark: compiled vs pure-Python bootstrap-alpha kernel.

The bootstrap (B resamples of N units, alpha per resample) is the hot loop
of the agreement tooling; the compiled kernel exists for exactly this.

    python benchmarks/bench_alpha.py [B] [N]
"""

import random
import sys
import time

from defquest.evalkit import _alpha_py
from defquest.rng import SplitMix64, derive_seed

try:
    from defquest import _alpha_fast
except ImportError:
    _alpha_fast = None


def synthetic_units(n_questions=150, n_raters=3, n_categories=4, seed=5):
    rng = random.Random(seed)
    values, starts, lengths = [], [], []
    for _ in range(n_questions):
        starts.append(len(values))
        lengths.append(n_raters)
        values.extend(rng.randrange(n_categories) for _ in range(n_raters))
    return values, starts, lengths, n_categories


def run(kernel, values, starts, lengths, n_cat, rows):
    started = time.perf_counter()
    alphas = kernel.alpha_batch(values, starts, lengths, n_cat, rows)
    return time.perf_counter() - started, list(alphas)


def main():
    B = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    N = int(sys.argv[2]) if len(sys.argv) > 2 else 1000
    values, starts, lengths, n_cat = synthetic_units()
    rows = []
    for b in range(B):
        rng = SplitMix64(derive_seed(0, b))
        rows.append(rng.sample_with_replacement(len(starts), N))

    pure_time, pure_alphas = run(_alpha_py, values, starts, lengths, n_cat, rows)
    print(f"pure python : {pure_time:8.3f} s  (B={B}, N={N})")
    if _alpha_fast is None:
        print("compiled    : not built (pip install -e . with Cython available)")
        return
    fast_time, fast_alphas = run(_alpha_fast, values, starts, lengths, n_cat, rows)
    print(f"compiled    : {fast_time:8.3f} s")
    identical = all(a == b for a, b in zip(pure_alphas, fast_alphas))
    print(f"speedup     : {pure_time / fast_time:8.1f} x   bit-identical: {identical}")


if __name__ == "__main__":
    main()
