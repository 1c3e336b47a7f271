"""Function descriptors: evaluation, derivatives, max modulus, serialization."""

import cmath
import math

import numpy as np
import pytest

from sphgrow import functions as fx
from sphgrow.towers import TowerReal, tower_compare

ALL_VARIANTS = [
    fx.Polynomial((0.0, 0.0, 1.0)),
    fx.Polynomial((1.0 + 0.5j, -2.0, 0.0, 0.25)),
    fx.ExpAffine(1.0),
    fx.ExpAffine(0.3 - 0.2j),
    fx.CoshSqrt(),
    fx.MittagLeffler(0.75),
    fx.ScaledMittagLeffler(1.0, 0.1),
]


@pytest.mark.parametrize("f", ALL_VARIANTS, ids=lambda f: type(f).__name__)
def test_derivative_vs_central_difference(f):
    rng = np.random.default_rng(5)
    h = 1e-6
    for _ in range(100):
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        d = fx.derivative_f(f, z)
        fd = (fx.eval_f(f, z + h) - fx.eval_f(f, z - h)) / (2 * h)
        assert abs(d - fd) <= 1e-6 * max(1.0, abs(d))


def test_eval_known_values():
    assert abs(fx.eval_f(fx.ExpAffine(2.0), 1.0 + 0j) - 2.0 * math.e) < 1e-14
    assert abs(fx.eval_f(fx.Polynomial((0, 0, 1)), 3.0 + 4.0j) - (3 + 4j) ** 2) < 1e-12
    z = 2.0 + 1.0j
    assert abs(fx.eval_f(fx.CoshSqrt(), z) - cmath.cosh(cmath.sqrt(z))) < 1e-12


def test_log_eval_matches_direct():
    for f in ALL_VARIANTS:
        z = 1.3 + 0.7j
        lm, arg = fx.log_eval(f, (math.log(abs(z)), cmath.phase(z)))
        w = fx.eval_f(f, z)
        assert math.isclose(lm, math.log(abs(w)), rel_tol=0, abs_tol=1e-10)
        assert abs(cmath.exp(1j * arg) - w / abs(w)) < 1e-9


def test_log_eval_large_argument():
    # f = e^z at z = e^300 on the positive axis: output log-mag is e^300
    f = fx.ExpAffine(1.0)
    lm, arg = fx.log_eval(f, (300.0, 0.0))
    assert math.isclose(lm, math.exp(300.0), rel_tol=1e-12)
    assert arg == 0.0
    # beyond double magnitude the rectangular part of z is unrecoverable
    with pytest.raises(fx.OrbitOverflow):
        fx.log_eval(f, (800.0, 0.0))


def test_log_max_modulus_exp():
    for r in [1.0, 10.0, 500.0]:
        assert math.isclose(fx.log_max_modulus(fx.ExpAffine(2.0), r),
                            r + math.log(2.0), rel_tol=1e-12)


def test_log_max_modulus_poly():
    f = fx.Polynomial((0, 0, 1))
    for r in [2.0, 100.0]:
        assert math.isclose(fx.log_max_modulus(f, r), 2 * math.log(r), rel_tol=1e-10)


def test_iterated_max_modulus_exp():
    table = fx.iterated_max_modulus(fx.ExpAffine(1.0), 5.0, 3)
    # M(5) = e^5; M^2(5) = e^(e^5); log levels nest exactly
    assert math.isclose(table.log_levels[1].log().value(), 5.0, rel_tol=1e-12)
    lvl2_log = table.log_levels[2].log()
    assert math.isclose(lvl2_log.value(), math.exp(5.0), rel_tol=1e-12)
    assert tower_compare(table.log_levels[3],
                         table.log_levels[2]) == 1


def test_iterated_max_modulus_poly():
    table = fx.iterated_max_modulus(fx.Polynomial((0, 0, 1)), 10.0, 4)
    # M^n(10) = 10^(2^n)
    for n in range(5):
        assert math.isclose(table.log_levels[n].log().value(),
                            (2 ** n) * math.log(10.0), rel_tol=1e-10)


def test_non_escalating_rejected():
    with pytest.raises(fx.NonEscalatingError):
        fx.iterated_max_modulus(fx.Polynomial((0, 0, 1)), 0.5, 3)


def test_growth_constant():
    c = fx.growth_constant(1.0)
    assert math.isclose(c, 1.05, rel_tol=1e-9)
    assert fx.growth_constant(0.75) >= 1.05


def test_choose_eta():
    eta = fx.choose_eta(1.0)
    assert 0.0 < eta < 1.0
    # admissibility: eta * max(|E|, |E'|) < 0.99 on the unit circle
    worst = 0.0
    for theta in np.linspace(0, 2 * math.pi, 256, endpoint=False):
        z = cmath.exp(1j * theta)
        worst = max(worst, abs(fx.eval_f(fx.MittagLeffler(1.0), z)))
    assert eta * worst < 0.99


def test_descriptor_json_roundtrip():
    for f in ALL_VARIANTS:
        g = fx.descriptor_from_json(fx.descriptor_to_json(f))
        assert type(g) is type(f)
        assert fx.descriptor_to_json(g) == fx.descriptor_to_json(f)


def test_hadamard_convexity():
    assert fx.hadamard_convexity_check(fx.ExpAffine(1.0), 10.0, 2.0)
    assert fx.hadamard_convexity_check(fx.Polynomial((0, 0, 1)), 10.0, 2.0)


def test_lower_order_estimate():
    r_grid = np.geomspace(10.0, 1e8, 14)
    est = fx.lower_order_estimate(fx.ExpAffine(1.0), r_grid)
    assert math.isclose(est, 1.0, abs_tol=0.1)
