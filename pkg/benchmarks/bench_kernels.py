"""Compare the compiled residual kernels with the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--n 500 5000] [--p 1 2 5] [--repeat 200]
"""

import argparse
import timeit

import numpy as np

from allpass import _kernels_py
from allpass.residuals import pacf_to_phi

try:
    from allpass import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None


def time_call(func, repeat):
    timer = timeit.Timer(func)
    loops, _ = timer.autorange()
    best = min(timer.repeat(repeat=max(3, repeat // max(loops, 1)), number=loops))
    return best / loops


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[500, 5000])
    ap.add_argument("--p", type=int, nargs="+", default=[1, 2, 5])
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not available; only the fallback can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<10}{'n':>7}{'p':>4}{'python us':>13}{'cython us':>13}{'speedup':>9}")
    for n in args.n:
        x = rng.standard_normal(n)
        for p in args.p:
            phi = pacf_to_phi(rng.uniform(-0.8, 0.8, p))
            phis = np.array([pacf_to_phi(rng.uniform(-0.8, 0.8, p)) for _ in range(args.batch)])
            z = _kernels_py.allpass_residuals(phi, x)
            cases = {
                "residuals": lambda m: m.allpass_residuals(phi, x),
                "gradient": lambda m: m.allpass_gradient(phi, x, z),
                "batch": lambda m: m.batch_residuals(phis, x),
            }
            for name, call in cases.items():
                t_py = time_call(lambda: call(_kernels_py), args.repeat) * 1e6
                if _compiled is None:
                    print(f"{name:<10}{n:>7}{p:>4}{t_py:>13.1f}{'-':>13}{'-':>9}")
                    continue
                t_c = time_call(lambda: call(_compiled), args.repeat) * 1e6
                print(f"{name:<10}{n:>7}{p:>4}{t_py:>13.1f}{t_c:>13.1f}{t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
