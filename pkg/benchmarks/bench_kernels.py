"""Time the numba and numpy kernel backends side by side.

    python benchmarks/bench_kernels.py [--repeat N]

The numba timings exclude the first (compiling) call. Setting
CEDRF_DISABLE_NUMBA=1 leaves only the numpy column.
"""
import argparse
import time

import numpy as np

from cedrf import _kernels
from cedrf.binary import BinaryObservationModel, sign_weights


def best_of(fn, repeat):
    fn()  # warm-up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    spec = sign_weights(BinaryObservationModel(0.5, (0.1,) * 20), [0.25] * 20)
    xi, w, winf, tol = spec.kernel_args()
    T = float(spec.threshold)
    rng = np.random.default_rng(0)
    yh = rng.random((1_000_000, 5)) < 0.3
    spec5 = sign_weights(BinaryObservationModel(0.3, (0.1, 0.2, 0.15, 0.1, 0.3)), [0.4] * 5)
    _, w5, winf5, tol5 = spec5.kernel_args()
    coin = rng.random(1_000_000)
    cb = _kernels.pack_bits(rng.random((1 << 16, 32)) < 0.5)
    word = _kernels.pack_bits(rng.random(32) < 0.5)
    return {
        "sign_enumeration L=20": lambda k: k.sign_enumeration(xi, w, winf, T, tol, 0.5),
        "map_decisions 1e6 x 5": lambda k: k.map_decisions(yh, w5, winf5, float(spec5.threshold),
                                                          tol5, coin),
        "verbatim_terms 1e6 x 5": lambda k: k.verbatim_terms(yh, w5, winf5, float(spec5.threshold),
                                                            tol5, 0.3),
        "nearest_codeword 2^16 x 32b": lambda k: k.nearest_codeword(cb, word),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"{'kernel':<30}" + "".join(f"{b:>12}" for b in backends)
          + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases().items():
        ts = [best_of(lambda: fn(_kernels.get_kernels(b)), args.repeat) for b in backends]
        row = f"{name:<30}" + "".join(f"{t * 1e3:>10.2f}ms" for t in ts)
        if len(ts) == 2:
            row += f"  {ts[0] / ts[1]:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
