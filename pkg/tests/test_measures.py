"""Spherical sup/area measures and characteristic functions against
closed forms and dense-grid oracles."""

import cmath
import math

import numpy as np
import pytest

from sphgrow import functions as fx
from sphgrow import measures as ms

EXP = fx.ExpAffine(1.0)
SQUARE = fx.Polynomial((0, 0, 1))
GRID = ms.GridSpec()


def _dense_mu_oracle(f, U, n, pts=400):
    """Brute-force sup of log (f^n)^# over a dense rectangle grid."""
    xs = np.linspace(U.center.real - U.half_width, U.center.real + U.half_width, pts)
    ys = np.linspace(U.center.imag - U.half_height, U.center.imag + U.half_height, pts)
    X, Y = np.meshgrid(xs, ys)
    logphi, status = ms.logphi_batch(f, X.ravel(), Y.ravel(), n)
    good = status == 0
    return float(np.max(logphi[good]))


def test_mu_sup_vs_dense_oracle():
    U = ms.Region.rectangle(1.0 + 0.5j, 0.4, 0.3)
    for n in (1, 2, 3):
        res = ms.mu_sup(SQUARE, U, n, GRID)
        want = _dense_mu_oracle(SQUARE, U, n)
        # both sample the same continuum sup; neither sees the exact argmax
        assert abs(res.log_mu - want) <= 1e-4


def test_mu_sup_exp_small_disk():
    U = ms.Region.disk(complex(0.318, 1.337), 0.5)
    res = ms.mu_sup(EXP, U, 1, GRID)
    want = _dense_mu_oracle(EXP, ms.Region.rectangle(U.center, 0.5, 0.5), 1)
    assert res.log_mu >= want - 0.05 or res.log_mu >= want - abs(want) * 0.01


def test_mu_sup_chordal_at_least_spherical():
    U = ms.Region.rectangle(2.0 + 0j, 0.3, 0.3)
    res = ms.mu_sup(SQUARE, U, 2, GRID)
    assert res.log_mu_chordal >= res.log_mu


def test_area_law_whole_plane_square():
    # S(D(0, R), z^2) -> deg = 2 as R -> infinity
    res = ms.spherical_area(SQUARE, ms.Region.disk(0j, 1e6), 1, GRID)
    assert abs(res.value - 2.0) <= 1e-2
    assert not res.unconverged


def test_area_riemann_sum_oracle():
    # small square where a plain Riemann sum converges: compare directly
    U = ms.Region.rectangle(0.7 + 0.2j, 0.35, 0.25)
    res = ms.spherical_area(SQUARE, U, 1, GRID)
    pts = 600
    xs = np.linspace(U.center.real - U.half_width, U.center.real + U.half_width, pts)
    ys = np.linspace(U.center.imag - U.half_height, U.center.imag + U.half_height, pts)
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    phi2 = (2.0 * np.abs(Z) / (1.0 + np.abs(Z * Z) ** 2)) ** 2
    want = phi2.mean() * U.area() / math.pi
    assert math.isclose(res.value, want, rel_tol=5e-3)


def test_area_iterate_growth():
    # S(U, f^(n+1)) ~ 2 S(U, f^n) for z^2 once the image covers the sphere
    U = ms.Region.rectangle(1.0 + 0j, 0.25, 0.25)
    prev = None
    for n in (6, 7, 8):
        res = ms.spherical_area(SQUARE, U, n, GRID)
        if prev is not None:
            inc = res.log_value - prev
            assert abs(inc - math.log(2.0)) <= 0.1
        prev = res.log_value


def test_nevanlinna_T_exp_classical():
    # T(r, e^z) = r / pi
    for r in (math.pi, math.e, 10.0):
        got = ms.nevanlinna_T(EXP, r)
        assert abs(got - r / math.pi) <= 1e-4 * (r / math.pi)


def test_nevanlinna_T_poly():
    # T(r, z^2) = 2 log r + o(1)
    got = ms.nevanlinna_T(SQUARE, 1e4)
    assert abs(got - 2.0 * math.log(1e4)) < 0.01


def test_sandwich_exp():
    out = ms.characteristic_sandwich_check(EXP, math.e, GRID)
    assert out["passed"]
    assert abs(out["T"] - math.e / math.pi) < 1e-3


def test_region_validation():
    with pytest.raises(ValueError):
        ms.Region.rectangle(0j, -1.0, 1.0)
    with pytest.raises(ValueError):
        ms.GridSpec(base_resolution=8)
    with pytest.raises(ValueError):
        ms.GridSpec(rel_tol=0.5)


def test_region_area():
    assert math.isclose(ms.Region.disk(0j, 2.0).area(), 4 * math.pi, rel_tol=1e-12)
    assert math.isclose(ms.Region.rectangle(0j, 2.0, 0.5).area(), 4.0, rel_tol=1e-12)
