"""Forward orbits, Lyapunov estimators, periodic points, fast escape.

Orbits run in rectangular coordinates while representable, then escalate
to log-polar continuation (exact for the exponential family, leading-term
for polynomials).  The chain rule is tracked as a running sum of
log|f'(z_j)| so that log (f^n)^# stays finite far past double overflow.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

from . import functions as fx
from .towers import TowerReal

ESCALATION_THRESHOLD = 1e100

COMPLETE = "complete"
ESCALATED = "escalated"
OVERFLOW = "overflow"


class NoConvergence(Exception):
    pass


class DerivativeSingular(Exception):
    pass


@dataclass
class OrbitRecord:
    start: complex
    points: list  # rectangular z_0..z_m while representable
    log_points: list  # (log_mag, arg) continuation entries after escalation
    log_deriv_prefix: list  # entry n: sum_{j<n} log|f'(z_j)| = log|(f^n)'(z_0)|
    status: str
    escalated_at: int = -1
    overflow_at: int = -1

    def length(self) -> int:
        """Number of orbit points with known magnitude (steps + 1)."""
        return len(self.points) + len(self.log_points)

    def log_mag(self, n: int) -> float:
        """log|z_n|; defined for n < length()."""
        if n < len(self.points):
            z = self.points[n]
            return math.log(abs(z)) if z != 0 else -math.inf
        return self.log_points[n - len(self.points)][0]


def _log_abs_derivative(f, z: complex) -> float:
    try:
        d = fx.derivative_f(f, z)
    except fx.EvalOverflow as e:
        return e.log_mag
    if d == 0:
        return -math.inf
    return math.log(abs(d))


def _log_abs_derivative_polar(f, lp: tuple) -> float:
    """log|f'| at a log-polar point, for variants with log continuation."""
    log_mag, arg = lp
    if isinstance(f, fx.ExpAffine):
        if log_mag > 709.0:
            raise fx.OrbitOverflow("Re z not recoverable")
        return math.exp(log_mag) * math.cos(arg) + math.log(abs(f.lam))
    if isinstance(f, fx.Polynomial):
        d = f.degree
        return math.log(float(d)) + math.log(abs(f.coefficients[-1])) + (d - 1.0) * log_mag
    raise fx.OrbitOverflow(f"{type(f).__name__} has no log continuation")


def iterate_orbit(f, z0: complex, n_max: int) -> OrbitRecord:
    """Orbit of z0 under f for n_max steps with log-polar escalation."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    z0 = complex(z0)
    points = [z0]
    log_points = []
    prefix = [0.0]
    status = COMPLETE
    escalated_at = -1
    overflow_at = -1
    mode_rect = True
    cur = z0
    cur_lp = None
    for n in range(n_max):
        if mode_rect:
            logd = _log_abs_derivative(f, cur)
            try:
                nxt = fx.eval_f(f, cur)
            except fx.EvalOverflow as e:
                nxt = None
                nxt_lp = (e.log_mag, e.arg)
            if nxt is not None and abs(nxt) <= ESCALATION_THRESHOLD:
                prefix.append(prefix[-1] + logd)
                points.append(nxt)
                cur = nxt
                continue
            # escalate to log-polar continuation
            if nxt is not None:
                nxt_lp = (math.log(abs(nxt)), cmath.phase(nxt))
            if not isinstance(f, (fx.ExpAffine, fx.Polynomial)):
                # next point recorded, but no way to iterate further
                prefix.append(prefix[-1] + logd)
                log_points.append(nxt_lp)
                if n + 1 < n_max:
                    status = OVERFLOW
                    overflow_at = n + 1
                else:
                    status = ESCALATED
                escalated_at = n + 1
                break
            mode_rect = False
            escalated_at = n + 1
            status = ESCALATED
            prefix.append(prefix[-1] + logd)
            log_points.append(nxt_lp)
            cur_lp = nxt_lp
            continue
        try:
            logd = _log_abs_derivative_polar(f, cur_lp)
            nxt_lp = fx.log_eval(f, cur_lp)
        except fx.OrbitOverflow:
            status = OVERFLOW
            overflow_at = n
            break
        prefix.append(prefix[-1] + logd)
        log_points.append(nxt_lp)
        cur_lp = nxt_lp
    return OrbitRecord(start=z0, points=points, log_points=log_points,
                       log_deriv_prefix=prefix, status=status,
                       escalated_at=escalated_at, overflow_at=overflow_at)


def log_spherical_derivative(orbit: OrbitRecord, n: int, chordal: bool = False) -> float:
    """log (f^n)^#(z_0) = log|(f^n)'| - log(1 + |z_n|^2).

    With chordal=True adds log(1 + |z_0|^2), giving the derivative in the
    spherical metric on both source and target.
    """
    if n >= len(orbit.log_deriv_prefix) or n >= orbit.length():
        raise IndexError(f"orbit data ends before n={n}")
    lm = orbit.log_mag(n)
    if lm > 350.0:
        den = 2.0 * lm
    elif lm == -math.inf:
        den = 0.0
    else:
        den = math.log1p(math.exp(2.0 * lm))
    out = orbit.log_deriv_prefix[n] - den
    if chordal:
        a0 = abs(orbit.start)
        out += math.log1p(a0 * a0)
    return out


@dataclass
class LyapunovEstimate:
    horizon: int
    upper: float
    lower: float
    per_n: list
    truncated: bool = False


def lyapunov_estimate(f, z0: complex, N: int, chordal: bool = False) -> LyapunovEstimate:
    """Finite-horizon Lyapunov surrogates from (1/n) log (f^n)^#.

    Only n >= N/2 enter the max/min, damping transients.
    """
    if N < 4:
        raise ValueError("N must be >= 4")
    orbit = iterate_orbit(f, z0, N)
    avail = min(N, orbit.length() - 1, len(orbit.log_deriv_prefix) - 1)
    if avail < 2:
        raise ValueError("orbit dies before step 2; no estimate")
    per_n = []
    for n in range(1, avail + 1):
        per_n.append(log_spherical_derivative(orbit, n, chordal=chordal) / n)
    window = [v for n, v in enumerate(per_n, start=1) if n >= N / 2.0]
    if not window:
        window = per_n
    return LyapunovEstimate(horizon=N, upper=max(window), lower=min(window),
                            per_n=per_n, truncated=avail < N)


@dataclass
class PeriodicPoint:
    location: complex
    period: int
    multiplier: complex
    lyapunov: float  # log|multiplier| / period


def _cycle_data(f, z: complex, p: int) -> tuple:
    """(f^p(z), (f^p)'(z)) by the chain rule; None on overflow."""
    w = z
    deriv = 1.0 + 0.0j
    for _ in range(p):
        try:
            deriv *= fx.derivative_f(f, w)
            w = fx.eval_f(f, w)
        except fx.EvalOverflow:
            return None, None
    return w, deriv


def find_periodic_point(f, p: int, seed: complex) -> PeriodicPoint:
    """Newton's method on f^p(z) - z from seed (plus perturbed restarts)."""
    if not 1 <= p <= 8:
        raise ValueError("period must be in [1, 8]")
    seeds = [complex(seed)]
    for k in range(20):
        ang = 2.0 * math.pi * k / 20.0
        seeds.append(complex(seed) + 0.3 * cmath.exp(1j * ang))
    for s in seeds:
        z = s
        for _ in range(200):
            w, dw = _cycle_data(f, z, p)
            if w is None:
                break
            g = w - z
            if abs(g) <= 1e-10 * (1.0 + abs(z)):
                return _finish_periodic(f, z, p)
            denom = dw - 1.0
            if abs(denom) < 1e-300:
                raise DerivativeSingular(f"Newton denominator ~0 at {z}")
            z = z - g / denom
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                break
    raise NoConvergence(f"no period-{p} point found from seed {seed}")


def _finish_periodic(f, z: complex, p: int) -> PeriodicPoint:
    """Polish, detect the true period, and package the cycle data."""
    # detect proper divisors of p that already close the cycle
    true_p = p
    for q in range(1, p):
        if p % q == 0:
            w, _ = _cycle_data(f, z, q)
            if w is not None and abs(w - z) <= 1e-8 * (1.0 + abs(z)):
                true_p = q
                break
    _, mult = _cycle_data(f, z, true_p)
    chi = math.log(abs(mult)) / true_p if mult != 0 else -math.inf
    return PeriodicPoint(location=z, period=true_p, multiplier=mult, lyapunov=chi)


def fast_escaping_test(f, z0: complex, R: float, l_max: int, n_max: int,
                       table: "fx.MaxModulusTable" = None):
    """Smallest l with |f^n(z0)| > M^(n-l)(R,f) strictly for all l <= n <= n_max.

    Returns (member, l, failures) where failures maps each tried l to the
    first violating n.  Comparisons are TowerReal, so they remain exact far
    beyond double range.  Real nonnegative orbits of a positive-lambda
    exponential iterate exactly in tower form; other orbits contribute as
    far as their log-polar continuation reaches, and undeterminable steps
    count as failures.
    """
    if table is None:
        table = fx.iterated_max_modulus(f, R, n_max)
    mags = _orbit_towers(f, z0, n_max)
    failures = {}
    for l in range(0, l_max + 1):
        ok = True
        for n in range(l, n_max + 1):
            if n >= len(mags) or mags[n] is None or not mags[n] > table.log_levels[n - l]:
                failures[l] = n
                ok = False
                break
        if ok:
            return True, l, failures
    return False, None, failures


def _orbit_towers(f, z0: complex, n_max: int) -> list:
    """|z_n| as TowerReal for n = 0..n_max (None where undeterminable)."""
    z0 = complex(z0)
    if isinstance(f, fx.ExpAffine) and f.lam.real > 0 and f.lam.imag == 0 \
            and z0.imag == 0 and z0.real >= 0:
        # real nonnegative orbit: z_{n+1} = lam e^{z_n} exactly, tower-safe
        out = [TowerReal.from_value(z0.real)]
        loglam = math.log(f.lam.real)
        for _ in range(n_max):
            out.append(out[-1].add_const(loglam).exp())
        return out
    orbit = iterate_orbit(f, z0, n_max)
    out = []
    for n in range(n_max + 1):
        if n < orbit.length():
            lm = orbit.log_mag(n)
            out.append(None if lm == -math.inf else TowerReal.from_log(lm))
        else:
            out.append(None)
    return out


# ---------------------------------------------------------------------------
# batch CSV interface


def batch_lyapunov_csv(f, src_path: str, dst_path: str, N: int):
    """Read start points (columns re, im) and write Lyapunov scan results."""
    rows = []
    with open(src_path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(complex(float(rec["re"]), float(rec["im"])))
    with open(dst_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["start", "status", "horizon", "chi_upper", "chi_lower"])
        for z0 in rows:
            try:
                est = lyapunov_estimate(f, z0, N)
                orbit_status = "truncated" if est.truncated else "complete"
                w.writerow([f"{z0.real:.17g}{z0.imag:+.17g}j", orbit_status,
                            est.horizon, f"{est.upper:.17g}", f"{est.lower:.17g}"])
            except ValueError as e:
                w.writerow([f"{z0.real:.17g}{z0.imag:+.17g}j", f"error:{e}", N, "", ""])
