"""Benchmark: compiled training kernels vs the pure-Python fallback.

Times the four kernel entry points on training-shaped arrays and a full
joint training epoch under each backend. Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np


def _timeit(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_kernels(repeats):
    from airfoilgen.kernels import _pyops

    try:
        from airfoilgen.kernels import _ops
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return

    rng = np.random.default_rng(0)
    x = rng.standard_normal((16, 200))
    w = rng.standard_normal((256, 200))
    b = rng.standard_normal(256)
    gz = rng.standard_normal((16, 256))
    z = rng.standard_normal((16, 256))
    p = rng.standard_normal((256, 200))
    g = rng.standard_normal((256, 200))
    m = np.zeros_like(p)
    v = np.zeros_like(p)

    cases = [
        ("dense_forward (16x200 @ 256)", lambda ops: ops.dense_forward(x, w, b)),
        ("dense_backward", lambda ops: ops.dense_backward(x, w, gz)),
        ("act_forward leaky_relu", lambda ops: ops.act_forward(z, 1)),
        ("act_backward tanh", lambda ops: ops.act_backward(z, gz, 2)),
        (
            "adam_update (256x200)",
            lambda ops: ops.adam_update(p, g, m, v, 1, 1e-3, 0.9, 0.999, 1e-8),
        ),
    ]

    print(f"{'kernel':35s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for name, fn in cases:
        t_py = _timeit(lambda: fn(_pyops), repeats)
        t_c = _timeit(lambda: fn(_ops), repeats)
        print(f"{name:35s} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us "
              f"{t_py / t_c:7.2f}x")


def bench_training_epoch():
    import os
    import subprocess
    import sys

    script = (
        "import time, numpy as np\n"
        "from airfoilgen import vaegan, kernels\n"
        "rng = np.random.default_rng(0)\n"
        "data = np.tanh(rng.standard_normal((256, 200)))\n"
        "cfg = vaegan.TrainConfig(epochs=5, seed=0)\n"
        "t0 = time.perf_counter()\n"
        "vaegan.train_vaegan(data, cfg)\n"
        "dt = (time.perf_counter() - t0) / 5\n"
        "print(f'{kernels.BACKEND}: {dt * 1e3:.1f} ms/epoch (256 airfoils)')\n"
    )
    print("\nfull training epoch:", flush=True)
    for backend in ("python", "compiled"):
        env = dict(os.environ, AIRFOILGEN_BACKEND=backend)
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--skip-epoch", action="store_true",
                        help="only run the kernel microbenchmarks")
    args = parser.parse_args()
    bench_kernels(args.repeats)
    if not args.skip_epoch:
        bench_training_epoch()


if __name__ == "__main__":
    main()
