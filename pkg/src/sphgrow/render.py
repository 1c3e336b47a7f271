"""Escape-time rendering with fast-escaping overlay, written as binary PPM.

Pixels are colored by first-escape index; on top of that each escaping
pixel is classified with the exact tower-arithmetic fast-escape test.
A vectorized double-precision prefilter rules out most pixels cheaply;
only the undecided ones pay for the per-pixel tower comparison.
"""

from __future__ import annotations

import math

import numpy as np

from . import dynamics as dy
from . import functions as fx
from . import kernels
from . import measures as ms

MAX_RESOLUTION = 8192


def render_escape(f, window: ms.Region, resolution, R: float,
                  l_max: int, n_max: int, out_path: str) -> dict:
    """Render the window to a P6 PPM file; returns classification stats."""
    if window.kind != "rectangle":
        raise ValueError("window must be a rectangle region")
    if isinstance(resolution, int):
        width = height = resolution
    else:
        width, height = resolution
    if not (1 <= width <= MAX_RESOLUTION and 1 <= height <= MAX_RESOLUTION):
        raise ValueError(f"resolution must be within 1..{MAX_RESOLUTION}")

    x0, x1 = window.center.real - window.half_width, window.center.real + window.half_width
    y0, y1 = window.center.imag - window.half_height, window.center.imag + window.half_height
    xs = np.linspace(x0, x1, width) if width > 1 else np.array([window.center.real])
    ys = np.linspace(y1, y0, height) if height > 1 else np.array([window.center.imag])
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    flat_x = X.ravel()
    flat_y = Y.ravel()

    log_escape = math.log(max(R, 10.0))
    logmags, escape_step = _orbit_logmags(f, flat_x, flat_y, n_max, log_escape)

    table = fx.iterated_max_modulus(f, R, n_max)
    fast = _classify_fast(f, flat_x, flat_y, logmags, table, R, l_max, n_max)

    rgb = _colorize(escape_step, fast, n_max).reshape(height, width, 3)
    with open(out_path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(rgb.astype(np.uint8).tobytes())

    total = flat_x.size
    escaped = int((escape_step >= 0).sum())
    members = int(fast.sum())
    return {"path": out_path, "pixels": total,
            "escaped": escaped, "fast_members": members,
            "bounded": total - escaped,
            "fast_fraction": members / total}


def _orbit_logmags(f, xs, ys, n_max, log_escape):
    if isinstance(f, fx.ExpAffine):
        return kernels.expaffine_logmags(
            xs, ys, math.log(abs(f.lam)), math.atan2(f.lam.imag, f.lam.real),
            n_max, log_escape)
    # generic scalar fallback
    m = xs.size
    table = np.full((m, n_max + 1), np.nan)
    esc = np.full(m, -1, dtype=np.int64)
    for i in range(m):
        orbit = dy.iterate_orbit(f, complex(xs[i], ys[i]), n_max)
        for k in range(orbit.length()):
            table[i, k] = orbit.log_mag(k)
            if esc[i] < 0 and table[i, k] > log_escape:
                esc[i] = k
    return table, esc


def _classify_fast(f, xs, ys, logmags, table, R, l_max, n_max):
    """Fast-escape membership for the overlay.

    Comparisons are exact tower arithmetic while the orbit is trackable.
    Orbits truncated by sheer growth (beyond log-polar double range,
    i.e. past e^(e^709)) are treated as keeping pace for the remaining
    steps; that optimistic continuation is what makes off-axis pixels
    classifiable at all, and it only upgrades orbits that already beat
    every decidable comparison.
    """
    m = xs.size
    # float view of the tower table: log M^k where it fits, else +inf
    log_M = np.empty(n_max + 1)
    for k, t in enumerate(table.log_levels):
        v = t.log().value()
        log_M[k] = v if math.isfinite(v) else math.inf

    candidate = np.zeros(m, dtype=bool)
    for l in range(l_max + 1):
        ok_l = np.ones(m, dtype=bool)
        for n in range(l, n_max + 1):
            col = logmags[:, n]
            decided = np.isfinite(col) & math.isfinite(log_M[n - l])
            # a decidable comparison that fails disqualifies this l
            ok_l &= ~(decided & (col <= log_M[n - l]))
        candidate |= ok_l
    fast = np.zeros(m, dtype=bool)
    for i in np.nonzero(candidate)[0]:
        fast[i] = _member_optimistic(
            f, complex(xs[i], ys[i]), table, l_max, n_max)
    return fast


def _member_optimistic(f, z0, table, l_max, n_max) -> bool:
    from .towers import TowerReal
    orbit = dy.iterate_orbit(f, z0, n_max)
    avail = orbit.length()
    grew_out = orbit.status == dy.OVERFLOW and avail <= n_max
    mags = []
    for k in range(avail):
        lm = orbit.log_mag(k)
        mags.append(None if lm == -math.inf else TowerReal.from_log(lm))
    for l in range(l_max + 1):
        ok = True
        for n in range(l, n_max + 1):
            if n < avail:
                if mags[n] is None or not mags[n] > table.log_levels[n - l]:
                    ok = False
                    break
            else:
                ok = grew_out
                break
        if ok:
            return True
    return False


def _colorize(escape_step, fast, n_max):
    """Bounded: near-black blue; escaping: orbit-index gradient; A(f): white-hot."""
    m = escape_step.size
    rgb = np.zeros((m, 3), dtype=np.float64)
    bounded = escape_step < 0
    rgb[bounded] = (10.0, 10.0, 40.0)
    esc = ~bounded
    t = np.clip(escape_step[esc] / max(n_max, 1), 0.0, 1.0)
    rgb[esc, 0] = 60.0 + 170.0 * (1.0 - t)
    rgb[esc, 1] = 30.0 + 120.0 * (1.0 - t) ** 2
    rgb[esc, 2] = 90.0 * t
    rgb[fast] = (255.0, 244.0, 214.0)
    return np.clip(rgb, 0.0, 255.0)
