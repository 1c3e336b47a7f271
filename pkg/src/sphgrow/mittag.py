"""Mittag-Leffler function E_a(z) = sum z^n / Gamma(a n + 1), 0 < a <= 2.

Evaluation strategy: the power series in the zone where double-precision
summation keeps full accuracy, and the sector expansion outside it.  With
p = 1/a the expansion is

    E_a(z) ~ p * exp(z^p) - sum_{k>=1} z^(-k) / Gamma(1 - a k)

where the exponential term carries the growth sector |arg z| <= a*pi/2
and decays (relatively) elsewhere; the algebraic tail gives the O(1/|z|)
behaviour on the remaining sector.  a = 2 is handled through the identity
E_2(z) = cosh(sqrt(z)), whose algebraic tail vanishes identically.

The series/asymptotics switch radius is set by cancellation: the largest
series term is ~exp(|z|^p) while the summed value can be O(1), so double
summation is trusted only while eps * max_term stays below 1e-12.  The
radius is found once per alpha by scanning.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

MAX_SERIES_TERMS = 2000
_SERIES_STOP = 1e-18

# growth sector half-angle is alpha*pi/2 + SECTOR_DELTA; inputs within
# BOUNDARY_LAYER of that edge go back to the (extended) series, since the
# expansion degrades near the sector boundary
SECTOR_DELTA = 0.05 * math.pi
BOUNDARY_LAYER = 0.02 * math.pi

# eps * max_term must stay below this for the series to be trusted
_SERIES_TRUST = 1e-12
_EPS = 2.2e-16

_switch_cache: dict[float, float] = {}


def _log_max_term(alpha: float, r: float) -> float:
    """log of the largest series term magnitude at |z| = r."""
    lr = math.log(r)
    best = 0.0
    prev = 0.0
    for n in range(1, 100000):
        cur = n * lr - math.lgamma(alpha * n + 1.0)
        if cur > best:
            best = cur
        if cur < prev and cur < best - 5.0:
            break
        prev = cur
    return best


def switch_radius(alpha: float) -> float:
    """Smallest |z| beyond which eval uses the sector expansion.

    Scanned per alpha: the first radius where the double-precision
    cancellation bound eps * max_term crosses _SERIES_TRUST.
    """
    _check_alpha(alpha)
    cached = _switch_cache.get(alpha)
    if cached is not None:
        return cached
    threshold = math.log(_SERIES_TRUST / _EPS)
    r = 1.0
    while _log_max_term(alpha, r) <= threshold:
        r *= 1.05
        if r > 1e6:  # pragma: no cover - unreachable for alpha <= 2
            break
    _switch_cache[alpha] = r
    return r


def _check_alpha(alpha: float):
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must be in (0, 2], got {alpha}")


def ml_series(alpha: float, z: complex, max_terms: int = MAX_SERIES_TERMS) -> complex:
    """Truncated power series; accurate while |z|**(1/alpha) is moderate."""
    _check_alpha(alpha)
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    biggest = 1.0
    for n in range(1, max_terms):
        term *= z * math.exp(math.lgamma(alpha * (n - 1) + 1.0) - math.lgamma(alpha * n + 1.0))
        total += term
        mag = abs(term)
        biggest = max(biggest, mag)
        if mag < _SERIES_STOP * biggest and n > 3:
            break
    return total


def ml_series_derivative(alpha: float, z: complex, max_terms: int = MAX_SERIES_TERMS) -> complex:
    """Term-wise derivative sum n z^(n-1) / Gamma(alpha n + 1)."""
    _check_alpha(alpha)
    # term_n = n z^(n-1) / Gamma(alpha n + 1)
    total = 1.0 / math.gamma(alpha + 1.0) + 0.0j
    term = total
    biggest = abs(total)
    for n in range(2, max_terms):
        term *= z * (n / (n - 1)) * math.exp(
            math.lgamma(alpha * (n - 1) + 1.0) - math.lgamma(alpha * n + 1.0)
        )
        total += term
        mag = abs(term)
        biggest = max(biggest, mag)
        if mag < _SERIES_STOP * biggest and n > 3:
            break
    return total


def _algebraic_tail(alpha: float, z: complex, derivative: bool) -> complex:
    """-sum_k z^(-k)/Gamma(1-a k), truncated at its smallest term.

    The tail is an asymptotic (divergent) series; optimal truncation stops
    once terms start growing again.
    """
    inv = 1.0 / z
    total = 0.0 + 0.0j
    prev_mag = math.inf
    zk = inv
    for k in range(1, 121):
        g = 1.0 - alpha * k
        # 1/Gamma at the poles of Gamma (g a nonpositive integer) is zero
        if g <= 0.0 and abs(g - round(g)) < 1e-12:
            coeff = 0.0
        else:
            coeff = 1.0 / math.gamma(g)
        if derivative:
            term = k * coeff * zk * inv
        else:
            term = -coeff * zk
        mag = abs(term)
        if mag > prev_mag:
            break
        total += term
        prev_mag = mag
        zk *= inv
        if mag < 1e-300:
            break
    return total


def _sector(alpha: float, z: complex) -> str:
    """'growth', 'decay', or 'boundary' position of arg z."""
    edge = alpha * math.pi / 2.0 + SECTOR_DELTA
    a = abs(cmath.phase(z))
    if abs(a - edge) < BOUNDARY_LAYER and abs(z) ** (1.0 / alpha) < 690.0:
        # near the sector edge the expansion is unreliable; the extended
        # series is usable as long as its terms fit doubles
        return "boundary"
    return "growth" if a <= edge else "decay"


def ml_asymptotic(alpha: float, z: complex) -> complex:
    """Sector expansion, valid for |z| beyond the switch radius."""
    _check_alpha(alpha)
    if alpha == 2.0:
        return cmath.cosh(cmath.sqrt(z))
    if alpha == 1.0:
        if z.real > 700.0:
            raise OverflowError("E_alpha overflows double range")
        return cmath.exp(z)
    sector = _sector(alpha, z)
    if sector == "boundary":
        return ml_series(alpha, z)
    tail = _algebraic_tail(alpha, z, derivative=False)
    if sector == "decay":
        return tail
    p = 1.0 / alpha
    zp = cmath.exp(p * cmath.log(z))
    if zp.real > 700.0:
        raise OverflowError("E_alpha overflows double range")
    return p * cmath.exp(zp) + tail


def ml_asymptotic_derivative(alpha: float, z: complex) -> complex:
    _check_alpha(alpha)
    if alpha == 2.0:
        s = cmath.sqrt(z)
        if abs(s) < 1e-8:
            return 0.5 + z / 12.0
        return cmath.sinh(s) / (2.0 * s)
    if alpha == 1.0:
        if z.real > 700.0:
            raise OverflowError("E_alpha' overflows double range")
        return cmath.exp(z)
    sector = _sector(alpha, z)
    if sector == "boundary":
        return ml_series_derivative(alpha, z)
    tail = _algebraic_tail(alpha, z, derivative=True)
    if sector == "decay":
        return tail
    p = 1.0 / alpha
    zp = cmath.exp(p * cmath.log(z))
    if zp.real > 700.0:
        raise OverflowError("E_alpha' overflows double range")
    return p * p * cmath.exp((p - 1.0) * cmath.log(z)) * cmath.exp(zp) + tail


def ml_eval(alpha: float, z: complex) -> complex:
    _check_alpha(alpha)
    z = complex(z)
    if abs(z) <= switch_radius(alpha):
        return ml_series(alpha, z)
    return ml_asymptotic(alpha, z)


def ml_derivative(alpha: float, z: complex) -> complex:
    _check_alpha(alpha)
    z = complex(z)
    if abs(z) <= switch_radius(alpha):
        return ml_series_derivative(alpha, z)
    return ml_asymptotic_derivative(alpha, z)


def ml_log_abs(alpha: float, x: float) -> float:
    """log E_alpha(x) on the positive axis, overflow-free (x >= 0)."""
    _check_alpha(alpha)
    if x < 0.0:
        raise ValueError("positive axis only")
    if x <= switch_radius(alpha):
        return math.log(abs(ml_series(alpha, x)))
    p = 1.0 / alpha
    xp = p * math.log(x)
    if alpha == 2.0:
        # cosh(sqrt x) = e^{sqrt x} (1 + e^{-2 sqrt x})/2
        s = math.sqrt(x)
        return s - math.log(2.0) + math.log1p(math.exp(-2.0 * s))
    # p e^{x^p} dominates; fold in the O(1/x) tail while it is visible
    lead = math.exp(xp)
    if lead < 600.0:
        tail = _algebraic_tail(alpha, complex(x), derivative=False)
        return lead + math.log(p) + math.log1p(tail.real * math.exp(-lead) / p)
    return lead + math.log(p)


def ml_eval_vec(alpha: float, z: np.ndarray) -> np.ndarray:
    """Vectorized eval; nan+inf markers where the value overflows."""
    _check_alpha(alpha)
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(z.shape, dtype=np.complex128)
    flat = z.ravel()
    res = out.ravel()
    for i in range(flat.size):
        try:
            res[i] = ml_eval(alpha, flat[i])
        except OverflowError:
            res[i] = complex(np.inf, 0.0)
    return out


def ml_derivative_vec(alpha: float, z: np.ndarray) -> np.ndarray:
    _check_alpha(alpha)
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(z.shape, dtype=np.complex128)
    flat = z.ravel()
    res = out.ravel()
    for i in range(flat.size):
        try:
            res[i] = ml_derivative(alpha, flat[i])
        except OverflowError:
            res[i] = complex(np.inf, 0.0)
    return out
