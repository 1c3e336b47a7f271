"""Mittag-Leffler evaluation against closed forms and an extended-precision
series oracle.

The oracle keeps alpha as an mpf and forms alpha*n as an mpf product: the
series suffers catastrophic cancellation off the positive axis, and rounding
alpha*n in doubles perturbs the peak gamma term enough to wreck the result.
The oracle also always runs a fixed term count -- stopping early on a small
term mid-cancellation gives the wrong sum.
"""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from sphgrow import mittag


def _ml_oracle(alpha, z, terms=400, dps=60):
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        zz = mp.mpc(z)
        s = mp.mpc(0)
        p = mp.mpc(1)
        for n in range(terms):
            s += p / mp.gamma(a * n + 1)
            p *= zz
        return complex(s)


def test_alpha1_is_exp():
    assert abs(mittag.ml_eval(1.0, 1.0 + 0j) - math.e) <= 1e-12 * math.e
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        got = mittag.ml_eval(1.0, z)
        want = cmath.exp(z)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_alpha2_is_cosh_sqrt():
    rng = np.random.default_rng(1)
    for _ in range(100):
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        got = mittag.ml_eval(2.0, z)
        want = cmath.cosh(cmath.sqrt(z))
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_series_region_vs_oracle():
    alpha = 0.75
    r = 0.8 * mittag.switch_radius(alpha)
    rng = np.random.default_rng(2)
    for _ in range(50):
        z = r * rng.uniform(0.1, 1.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        got = mittag.ml_eval(alpha, z)
        want = _ml_oracle(alpha, z)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_asymptotic_vs_oracle_growth_sector():
    alpha = 0.75
    half_sector = alpha * math.pi / 2.0
    for theta in np.linspace(-half_sector + 0.12, half_sector - 0.12, 21):
        z = 20.0 * cmath.exp(1j * theta)
        got = mittag.ml_asymptotic(alpha, z)
        want = _ml_oracle(alpha, z)
        assert abs(got - want) <= 1e-4 * abs(want)


def test_decay_sector_bound():
    for x in [50.0, 100.0, 500.0, 1e4]:
        assert abs(mittag.ml_eval(0.75, -x)) <= 10.0 / x


def test_derivative_finite_difference():
    alpha = 0.75
    h = 1e-6
    rng = np.random.default_rng(3)
    for _ in range(30):
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        got = mittag.ml_derivative(alpha, z)
        fd = (mittag.ml_eval(alpha, z + h) - mittag.ml_eval(alpha, z - h)) / (2 * h)
        assert abs(got - fd) <= 1e-6 * max(1.0, abs(got))


def test_vectorized_matches_scalar():
    alpha = 0.75
    rng = np.random.default_rng(4)
    z = rng.uniform(-8, 8, 64) + 1j * rng.uniform(-8, 8, 64)
    vec = mittag.ml_eval_vec(alpha, z)
    for i in range(z.size):
        s = mittag.ml_eval(alpha, complex(z[i]))
        assert abs(vec[i] - s) <= 1e-11 * max(1.0, abs(s))


def test_switch_radius_sane():
    r = mittag.switch_radius(0.75)
    assert 2.0 < r < 20.0
    # at the switch radius both branches agree on the positive axis
    got_s = mittag.ml_series(0.75, complex(r, 0.0))
    got_a = mittag.ml_asymptotic(0.75, complex(r, 0.0))
    assert abs(got_s - got_a) <= 1e-6 * abs(got_s)


def test_log_abs_positive_axis():
    # log E_alpha(x) ~ x^(1/alpha) on the positive axis
    alpha = 0.75
    x = 1e6
    got = mittag.ml_log_abs(alpha, x)
    assert math.isclose(got, x ** (1.0 / alpha), rel_tol=0.05)


def test_alpha_validation():
    with pytest.raises(ValueError):
        mittag.ml_eval(0.0, 1.0)
    with pytest.raises(ValueError):
        mittag.ml_eval(2.5, 1.0)
