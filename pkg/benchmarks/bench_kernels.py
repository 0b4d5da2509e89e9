"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--n 64 64 8] [--repeat 20]
"""

import argparse
import time

import numpy as np

from llgspm import kernels
from llgspm.experiments.manufactured import CASE_1D
from llgspm.schemes import Stepper, run


def _time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs=3, default=(64, 64, 8), metavar=("NX", "NY", "NZ"))
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    nx, ny, nz = args.n
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, nz, ny, nx))
    b = rng.standard_normal((3, nz, ny, nx))
    cases = {
        "gs_row": lambda: kernels.gs_row(1, *a, *b, 0.1, True),
        "normalize": lambda: kernels.normalize(a),
        "laplacian": lambda: kernels.laplacian(a[0], 0.1, 0.1, 0.1),
    }
    mesh = CASE_1D.mesh((2000,))
    m0 = CASE_1D.exact_field(mesh, 0.0)

    def stepping():
        run(Stepper("b", CASE_1D.context(mesh), m0, CASE_1D.T / 1250), 50)

    cases["scheme_b_1d_50_steps"] = stepping
    backends = ["python"] + (["cython"] if kernels.compiled is not None else [])
    print(f"grid {nx}x{ny}x{nz}, best of {args.repeat}")
    print(f"{'kernel':24s}" + "".join(f"{b:>14s}" for b in backends) + "      speedup")
    for name, fn in cases.items():
        row = []
        for backend in backends:
            kernels.use_backend(backend)
            row.append(_time(fn, args.repeat))
        speed = f"{row[0] / row[-1]:10.2f}x" if len(row) > 1 else ""
        print(f"{name:24s}" + "".join(f"{t * 1e3:12.3f}ms" for t in row) + speed)
    kernels.use_backend(backends[-1])


if __name__ == "__main__":
    main()
