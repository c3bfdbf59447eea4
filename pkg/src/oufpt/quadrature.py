"""Deterministic panel quadratures used by the residual and transform checks.

All integrators work with vectorized integrands (f maps an ndarray of
abscissae to an ndarray of values) and use *relative* convergence
criteria, so integrals whose natural scale is 1e-160 are resolved as
well as O(1) ones.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exceptions import QuadratureError


@lru_cache(maxsize=32)
def gauss_rule(n: int):
    x, w = leggauss(n)
    return x, w


def fixed_gauss(f, a, b, n=24):
    """Gauss-Legendre on [a, b] with n nodes."""
    x, w = gauss_rule(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.dot(w, f(mid + half * x))


def adaptive_gauss(f, a, b, rtol=1e-12, atol=0.0, max_depth=48):
    """Adaptive bisection with a G12/G24 error estimate per panel.

    Returns (value, err_estimate). Raises QuadratureError if the
    panel stack bottoms out before the tolerance is met.
    """
    total = 0.0
    err_total = 0.0
    stack = [(float(a), float(b), 0)]
    # first pass to get a scale for the relative test
    scale = abs(fixed_gauss(f, a, b, 24)) + atol
    while stack:
        lo, hi, depth = stack.pop()
        coarse = fixed_gauss(f, lo, hi, 12)
        fine = fixed_gauss(f, lo, hi, 24)
        err = abs(fine - coarse)
        if err <= rtol * max(scale, abs(fine)) + atol or depth >= max_depth:
            if depth >= max_depth and err > 1e3 * (rtol * max(scale, abs(fine)) + atol):
                raise QuadratureError(
                    f"adaptive_gauss: panel [{lo}, {hi}] stalled at depth {depth} "
                    f"with error {err:.3e}")
            total += fine
            err_total += err
            scale = max(scale, abs(total))
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total, err_total


def graded_toward_zero(f, delta, levels=70, n=16):
    """Integrate f over (0, delta] with dyadic panels refining toward 0.

    Handles integrable endpoint behaviour s**(-p), p < 1 (and anything
    milder). The mass below the deepest panel is recovered by geometric
    extrapolation of the panel sums, which is exact for a pure power.

    Returns (value, err_estimate).
    """
    hi = float(delta)
    sums = np.empty(levels)
    for k in range(levels):
        lo = 0.5 * hi
        sums[k] = fixed_gauss(f, lo, hi, n)
        hi = lo
    total = float(np.sum(sums))
    # geometric tail below the deepest panel
    tail = 0.0
    s_last, s_prev = sums[-1], sums[-2]
    if s_last != 0.0 and s_prev != 0.0:
        r = s_last / s_prev
        if 0.0 < r < 0.75:
            tail = s_last * r / (1.0 - r)
    total += tail
    # error: extrapolation uncertainty dominates
    err = abs(tail) * 2.0 ** (-0.5 * levels) + abs(s_last) * 1e-12 + abs(total) * 1e-14
    return total, err


def semi_infinite_decay(f, rate, t_scale=1.0, rtol=1e-10, levels=70, n=16,
                        grow=1.6, max_panels=400):
    """Integrate f over (0, inf) when f decays at least like exp(-rate*t).

    The interval is split at t0 = min(t_scale, 1/rate): dyadic panels
    refine into 0 (weak endpoint singularities allowed, with geometric
    tail extrapolation), geometrically growing panels march right until
    their contribution underflows relative to the running total.

    Returns (value, err_estimate).
    """
    if rate <= 0:
        raise QuadratureError("semi_infinite_decay needs a positive decay rate")
    t0 = min(float(t_scale), 1.0 / rate)
    left, err_left = graded_toward_zero(f, t0, levels=levels, n=n)
    total = left
    err = err_left
    lo = t0
    width = t0
    dead = 0
    for _ in range(max_panels):
        hi = lo + width
        part = fixed_gauss(f, lo, hi, 2 * n)
        total += part
        if abs(part) <= rtol * 1e-4 * abs(total) + 5e-324:
            dead += 1
            if dead >= 3:
                break
        else:
            dead = 0
        lo = hi
        width *= grow
    else:
        raise QuadratureError("semi_infinite_decay: right tail did not die off")
    return total, err + abs(total) * 1e-14
