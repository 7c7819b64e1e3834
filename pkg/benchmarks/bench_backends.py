"""Compare the numba and numpy backends on the hot kernels.

    python3 benchmarks/bench_backends.py [--n 400] [--lines 400] [--repeat 5]

Both backends are imported in one process (the env flag only picks the
default), so each kernel is called with an explicit backend.  The first
numba call is reported separately since it includes JIT compilation (or
loading from the on-disk cache).
"""
import argparse
import time

import numpy as np

from musclnu import kernels
from musclnu.euler import prim_to_cons
from musclnu.limiters import VANALBADA, VANLEER, _phi_array_nb, _phi_array_np, family_k_array
from musclnu.mesh import make_grid, params_from_padded_sizes


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400, help="cells per line")
    ap.add_argument("--lines", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n, L = args.n, args.lines
    q = np.empty((4, n + 4, L))
    # rough but physical data; strong noise drives reconstructions negative,
    # and the flux of a failed line is undefined
    q[0] = 1.0 + 0.2 * rng.random((n + 4, L))
    q[1:3] = 0.3 * rng.normal(size=(2, n + 4, L))
    q[3] = 1.0 + 0.2 * rng.random((n + 4, L))
    W = np.ascontiguousarray(prim_to_cons(q))
    dx = make_grid(0.0, 1.0, n + 4, 0.3, 1).sizes
    A, B = params_from_padded_sizes(dx)

    rows = []
    for kind, name in ((VANALBADA, "van_albada"), (VANLEER, "van_leer")):
        k = family_k_array(kind, A, B)
        call = {
            b: (lambda b=b: kernels.muscl_roe_lines(W, A, B, k, kind, 1, 1.4, 0.1, False, backend=b))
            for b in ("numba", "numpy")
        }
        t0 = time.perf_counter()
        Fa, sa, _ = call["numba"]()
        first = time.perf_counter() - t0
        Fb, sb, _ = call["numpy"]()
        ok = (sa == 0) & (sb == 0)
        if not ok.all():
            print(f"{name}: {int((~ok).sum())} of {L} lines non-physical, compared on the rest")
        diff = float(np.max(np.abs(Fa[..., ok] - Fb[..., ok])))
        t_nb = best_of(call["numba"], args.repeat)
        t_np = best_of(call["numpy"], args.repeat)
        rows.append((f"muscl+roe {name}", first, t_nb, t_np, diff))

        theta = rng.normal(size=n * L) * 3.0
        Af = np.resize(A, theta.size)
        Bf = np.resize(B, theta.size)
        kf = np.resize(k, theta.size)
        t0 = time.perf_counter()
        pa = _phi_array_nb(kind, theta, Af, Bf, kf)
        first = time.perf_counter() - t0
        pb = _phi_array_np(kind, theta, Af, Bf, kf)
        rows.append((f"phi {name}", first, best_of(lambda: _phi_array_nb(kind, theta, Af, Bf, kf), args.repeat),
                     best_of(lambda: _phi_array_np(kind, theta, Af, Bf, kf), args.repeat),
                     float(np.max(np.abs(pa - pb)))))

    faces = n * L
    print(f"{n} cells x {L} lines ({faces} faces), best of {args.repeat}")
    print(f"{'kernel':<22}{'first nb [s]':>13}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>9}{'max diff':>11}")
    for name, first, t_nb, t_np, diff in rows:
        print(f"{name:<22}{first:>13.3f}{1e3 * t_nb:>12.2f}{1e3 * t_np:>12.2f}{t_np / t_nb:>9.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
