"""Vectorized orbit kernels: numba and numpy paths agree, and both agree
with the scalar orbit code."""

import math

import numpy as np
import pytest

from sphgrow import dynamics as dy
from sphgrow import functions as fx
from sphgrow import kernels


def _grid(seed, m=500, lo=-2.0, hi=2.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, m), rng.uniform(lo, hi, m)


needs_numba = pytest.mark.skipif(not kernels.USING_NUMBA,
                                 reason="numba path not active")


@needs_numba
def test_exp_paths_agree():
    xs, ys = _grid(0)
    jit = kernels.expaffine_logphi(xs, ys, 12, 0.0, 0.0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ref = kernels._expaffine_logphi_numpy(xs, ys, 12, 0.0, 0.0)
    np.testing.assert_array_equal(jit[3], ref[3])
    for a, b in zip(jit[:3], ref[:3]):
        both = np.isfinite(a) & np.isfinite(b)
        np.testing.assert_allclose(a[both], b[both], rtol=1e-10, atol=1e-9)


@needs_numba
def test_poly_paths_agree():
    xs, ys = _grid(1)
    coeffs = np.array([0.1 + 0.2j, -1.0, 0.0, 0.5], dtype=np.complex128)
    jit = kernels.poly_logphi(xs, ys, 10, coeffs)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ref = kernels._poly_logphi_numpy(xs, ys, 10,
                                         np.ascontiguousarray(coeffs.real),
                                         np.ascontiguousarray(coeffs.imag))
    np.testing.assert_array_equal(jit[3], ref[3])
    for a, b in zip(jit[:3], ref[:3]):
        both = np.isfinite(a) & np.isfinite(b)
        np.testing.assert_allclose(a[both], b[both], rtol=1e-10, atol=1e-9)


@needs_numba
def test_logmags_paths_agree():
    xs, ys = _grid(2, lo=-1.0, hi=3.0)
    jit_t, jit_e = kernels.expaffine_logmags(xs, ys, 0.0, 0.0, 20, math.log(5.0))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ref_t, ref_e = kernels._expaffine_logmags_numpy(xs, ys, 0.0, 0.0, 20,
                                                        math.log(5.0))
    np.testing.assert_array_equal(jit_e, ref_e)
    both = np.isfinite(jit_t) & np.isfinite(ref_t)
    np.testing.assert_array_equal(np.isnan(jit_t), np.isnan(ref_t))
    # one ulp at step k is amplified by exp at every later step, so the
    # late entries of a deep orbit only agree to a few digits short of full
    np.testing.assert_allclose(jit_t[both], ref_t[both], rtol=1e-8, atol=1e-9)


def test_exp_kernel_vs_scalar_orbit():
    f = fx.ExpAffine(0.8 + 0.1j)
    xs = np.array([0.2, -1.0, 0.5])
    ys = np.array([0.3, 0.4, -0.7])
    n = 4
    logphi, logderiv, loglast, status = kernels.expaffine_logphi(
        xs, ys, n, math.log(abs(f.lam)), math.atan2(f.lam.imag, f.lam.real))
    for i in range(xs.size):
        orbit = dy.iterate_orbit(f, complex(xs[i], ys[i]), n)
        assert status[i] == kernels.STATUS_OK
        assert math.isclose(loglast[i], orbit.log_mag(n), rel_tol=0, abs_tol=1e-10)
        want = dy.log_spherical_derivative(orbit, n)
        assert math.isclose(logphi[i], want, rel_tol=0, abs_tol=1e-9)


def test_poly_kernel_vs_scalar_orbit():
    f = fx.Polynomial((0.1, 0.0, 1.0))
    xs = np.array([0.3, -0.2, 1.1])
    ys = np.array([0.1, 0.6, -0.4])
    n = 5
    logphi, _, loglast, status = kernels.poly_logphi(xs, ys, n, f.coefficients)
    for i in range(xs.size):
        orbit = dy.iterate_orbit(f, complex(xs[i], ys[i]), n)
        assert status[i] == kernels.STATUS_OK
        assert math.isclose(loglast[i], orbit.log_mag(n), rel_tol=0, abs_tol=1e-9)
        want = dy.log_spherical_derivative(orbit, n)
        assert math.isclose(logphi[i], want, rel_tol=0, abs_tol=1e-8)


def test_overflow_status():
    xs = np.array([740.0])
    ys = np.array([0.0])
    _, _, _, status = kernels.expaffine_logphi(xs, ys, 3, 0.0, 0.0)
    assert status[0] == kernels.STATUS_OVERFLOW


def test_logmags_escape_index():
    xs = np.array([10.0, 0.0])
    ys = np.array([0.0, 0.0])
    table, escape = kernels.expaffine_logmags(xs, ys, 0.0, 0.0, 10, math.log(5.0))
    assert escape[0] == 1          # |z_1| = e^10 > 5
    assert math.isclose(table[0, 1], 10.0, rel_tol=1e-12)   # log|e^10|
    assert escape[1] == 3          # 0 -> 1 -> e -> e^e, first |z_k| > 5

