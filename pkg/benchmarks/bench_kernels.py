"""Benchmark the numba kernels against the pure-numpy fallback path.

Run directly:  python benchmarks/bench_kernels.py
The fallback path is what you get with SPHGROW_PURE_NUMPY=1; here both
implementations are called explicitly so one process can time the pair.
"""

import timeit

import numpy as np

from sphgrow import kernels

N_POINTS = 200_000
N_ITER = 30
REPEAT = 5


def main():
    rng = np.random.default_rng(0)
    xs = rng.uniform(-2.0, 4.0, N_POINTS)
    ys = rng.uniform(-3.0, 3.0, N_POINTS)
    coeffs = np.array([0.0, 0.0, 1.0], dtype=np.complex128)
    cre = np.ascontiguousarray(coeffs.real)
    cim = np.ascontiguousarray(coeffs.imag)

    cases = []
    if kernels.USING_NUMBA:
        def numba_exp():
            m = xs.shape[0]
            out = (np.empty(m), np.empty(m), np.empty(m),
                   np.empty(m, dtype=np.int64))
            kernels._expaffine_logphi_jit(xs, ys, N_ITER, 0.0, 0.0, *out)
            return out[0]

        def numba_poly():
            m = xs.shape[0]
            out = (np.empty(m), np.empty(m), np.empty(m),
                   np.empty(m, dtype=np.int64))
            kernels._poly_logphi_jit(xs, ys, N_ITER, cre, cim, *out)
            return out[0]

        numba_exp()   # trigger compilation outside the timed region
        numba_poly()
        cases.append(("exp orbit kernel (numba)", numba_exp))
        cases.append(("poly orbit kernel (numba)", numba_poly))
    else:
        print("numba unavailable; timing the numpy path only")

    def numpy_exp():
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return kernels._expaffine_logphi_numpy(xs, ys, N_ITER, 0.0, 0.0)[0]

    def numpy_poly():
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return kernels._poly_logphi_numpy(xs, ys, N_ITER, cre, cim)[0]

    cases.append(("exp orbit kernel (numpy)", numpy_exp))
    cases.append(("poly orbit kernel (numpy)", numpy_poly))

    print(f"{N_POINTS} points, {N_ITER} iterations, best of {REPEAT}")
    baseline = {}
    for name, fn in cases:
        t = min(timeit.repeat(fn, number=1, repeat=REPEAT))
        rate = N_POINTS * N_ITER / t / 1e6
        kind = name.split("(")[0].strip()
        line = f"{name:32s} {t * 1e3:9.2f} ms   {rate:8.1f} M orbit-steps/s"
        if kind in baseline:
            line += f"   (numba {t / baseline[kind]:.1f}x faster)"
        else:
            baseline[kind] = t
        print(line)

    # confirm the two paths agree where both are finite
    if kernels.USING_NUMBA:
        a = numba_exp()
        b = numpy_exp()
        both = np.isfinite(a) & np.isfinite(b)
        rel = np.max(np.abs(a[both] - b[both]) / np.maximum(np.abs(b[both]), 1.0))
        print(f"path agreement (exp, relative): {rel:.2e}")


if __name__ == "__main__":
    main()
