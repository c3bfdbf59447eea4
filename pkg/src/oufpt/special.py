"""Parabolic cylinder function D_nu(z) for real order and argument.

The evaluator switches between four regimes, each one free of
catastrophic cancellation on its patch:

* integer nu >= 0          -- exact Hermite-polynomial form, any z;
* z <= 0 (and small z > 0) -- Maclaurin/Kummer two-series form
                              (the two confluent series reinforce for
                              z <= 0, so it is stable arbitrarily far
                              into the negative axis until overflow);
* nu < 0, 0 < z < z_asym   -- Laplace-type integral with an everywhere
                              positive integrand, dyadic-graded
                              Gauss-Legendre nodes;
* nu >= 0 noninteger,
  4 < z < z_asym           -- upward recurrence in the order, seeded
                              from the integral at orders in [-2, 0)
                              (upward is the growing, hence stable,
                              direction);
* z >= z_asym = max(10, 2|nu|) -- Poincare asymptotic series with a
                              stop-at-smallest-term rule.

Each evaluation carries a heuristic absolute-error estimate
(last/smallest term for the series, a fixed small multiple of the value
for the quadrature, a propagated bound plus seed error for the
recurrence). Target accuracy is 1e-10 relative for |nu| <= 10,
|z| <= 30; measured accuracy on that box is better than 1e-13.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import erfcx, eval_hermite, gammaln, kv, rgamma

from .exceptions import DomainError, PoleError

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_2 = math.sqrt(2.0)
LOG_TINY = -745.0  # below this, exp() underflows to 0

_EPS = np.finfo(float).eps

# regime boundaries
_Z_KUMMER_POS = 4.0     # Kummer is safe up to here for nu >= 0
_Z_NEG_ASYM = -36.0     # below this the Kummer intermediates overflow


def _z_asym(nu: float) -> float:
    return max(10.0, 2.0 * abs(nu))


@dataclass(frozen=True)
class PcfEval:
    """One evaluation of D_nu(z) with its internal error estimate."""
    order: float
    argument: float
    value: float
    est_abs_error: float


# ---------------------------------------------------------------------------
# regime implementations;  all take a scalar order and an ndarray argument
# and return (value, log|value|, sign, est_abs_error) arrays
# ---------------------------------------------------------------------------

def _pack(value):
    value = np.asarray(value, dtype=float)
    sign = np.sign(value)
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(value))
    return value, logabs, sign


def _eval_hermite_form(n: int, z: np.ndarray):
    """Exact finite form for integer n >= 0: 2^{-n/2} e^{-z^2/4} H_n(z/sqrt(2))."""
    h = eval_hermite(n, z / SQRT_2)
    logabs = np.where(h == 0.0, -np.inf,
                      -0.25 * z * z - 0.5 * n * math.log(2.0)
                      + np.log(np.abs(np.where(h == 0.0, 1.0, h))))
    sign = np.sign(h)
    with np.errstate(over="ignore"):
        value = sign * np.exp(logabs)
    est = (n + 4.0) * _EPS * np.abs(value)
    return value, logabs, sign, est


def _eval_kummer(nu: float, z: np.ndarray, max_terms=1100):
    """Two-series Maclaurin form; stable for z <= 0 and small positive z."""
    x = 0.5 * z * z
    a1, b1 = -0.5 * nu, 0.5
    a2, b2 = 0.5 * (1.0 - nu), 1.5
    t1 = np.ones_like(x)
    t2 = np.ones_like(x)
    m1 = np.ones_like(x)
    m2 = np.ones_like(x)
    p1 = np.ones_like(x)
    p2 = np.ones_like(x)
    for k in range(max_terms):
        t1 = t1 * ((a1 + k) / ((b1 + k) * (k + 1.0))) * x
        t2 = t2 * ((a2 + k) / ((b2 + k) * (k + 1.0))) * x
        m1 += t1
        m2 += t2
        np.maximum(p1, np.abs(m1), out=p1)
        np.maximum(p2, np.abs(m2), out=p2)
        if k % 8 == 7:
            if (np.abs(t1) <= 1e-18 * np.abs(m1)).all() and \
               (np.abs(t2) <= 1e-18 * np.abs(m2)).all():
                break
    c1 = SQRT_PI * rgamma(0.5 * (1.0 - nu))
    c2 = SQRT_2PI * rgamma(-0.5 * nu)
    pref = 2.0 ** (0.5 * nu) * np.exp(-0.25 * z * z)
    value = pref * (c1 * m1 - c2 * z * m2)
    # cancellation-aware estimate: eps times the largest intermediate
    est = _EPS * pref * (abs(c1) * p1 + abs(c2) * np.abs(z) * p2) * 8.0
    v, logabs, sign = _pack(value)
    return v, logabs, sign, est


@lru_cache(maxsize=4)
def _integral_nodes(T=42.0, levels=64, m=24):
    xg, wg = leggauss(m)
    ts, ws = [], []
    hi = T
    for _ in range(levels):
        lo = 0.5 * hi
        ts.append(0.5 * (hi - lo) * xg + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * wg)
        hi = lo
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    return t, np.log(t), w, hi  # hi == deepest panel floor t_min


def _eval_integral(nu: float, z: np.ndarray, chunk=512):
    """nu < 0, z >= 0:
    D_nu(z) = e^{-z^2/4} / Gamma(-nu) * int_0^inf t^{-nu-1} e^{-t^2/2 - z t} dt.
    The integrand is positive, so no cancellation occurs.
    """
    alpha = -nu - 1.0
    t, logt, w, t_min = _integral_nodes()
    base = alpha * logt - 0.5 * t * t
    lg = gammaln(-nu)
    out_log = np.empty_like(z)
    # analytic mass below the deepest panel: ~ t_min^{alpha+1}/(alpha+1)
    log_tail = (alpha + 1.0) * math.log(t_min) - math.log(alpha + 1.0)
    for i0 in range(0, z.size, chunk):
        zz = z[i0:i0 + chunk]
        lf = base[:, None] - t[:, None] * zz[None, :]
        c = lf.max(axis=0)
        s = np.einsum("i,ij->j", w, np.exp(lf - c[None, :]))
        s += np.exp(log_tail - c)
        out_log[i0:i0 + chunk] = -0.25 * zz * zz - lg + c + np.log(s)
    with np.errstate(over="ignore"):
        value = np.exp(out_log)
    sign = np.ones_like(value)
    est = np.abs(value) * 5e-13
    return value, out_log, sign, est


def _eval_recurrence(nu: float, z: np.ndarray):
    """nu >= 0 noninteger, moderate z: seeds at orders nu0-1, nu0 in [-2, 0),
    then D_{m+1}(z) = z D_m(z) - m D_{m-1}(z) upward (the stable direction)."""
    steps = int(math.floor(nu)) + 1
    nu0 = nu - steps
    dm1, _, _, e_m1 = _eval_integral(nu0 - 1.0, z)
    d0, _, _, e_0 = _eval_integral(nu0, z)
    mu = nu0
    for _ in range(steps):
        dm1, d0 = d0, z * d0 - mu * dm1
        e_m1, e_0 = e_0, np.abs(z) * e_0 + abs(mu) * e_m1 + _EPS * np.abs(d0)
        mu += 1.0
    v, logabs, sign = _pack(d0)
    return v, logabs, sign, e_0


def _asym_sum(nu: float, z: np.ndarray, kind: str, max_terms=220):
    """Stop-at-smallest-term Poincare sum. kind 'pos': coefficients
    (-1)^k (-nu)_{2k}; kind 'neg': (nu+1)_{2k}. Argument enters as 1/z^2."""
    inv2 = 1.0 / (z * z)
    s = np.ones_like(z)
    term = np.ones_like(z)
    best = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, max_terms):
        if kind == "pos":
            coef = -(nu - 2 * k + 2) * (nu - 2 * k + 1) / (2.0 * k)
        else:
            coef = (nu + 2 * k - 1) * (nu + 2 * k) / (2.0 * k)
        term = term * coef * inv2
        tmag = np.abs(term)
        grow = active & (tmag >= best)
        active &= ~grow
        s = np.where(active, s + term, s)
        best = np.where(active, tmag, best)
        done = active & (tmag <= 1e-17 * np.abs(s))
        active &= ~done
        if not active.any():
            break
    return s, best


def _eval_asym_pos(nu: float, z: np.ndarray):
    """z >= max(10, 2|nu|): D_nu(z) ~ e^{-z^2/4} z^nu [1 - nu(nu-1)/(2z^2) + ...]."""
    s, best = _asym_sum(nu, z, "pos")
    logabs = -0.25 * z * z + nu * np.log(z) + np.log(np.abs(s))
    sign = np.sign(s)
    with np.errstate(over="ignore"):
        value = sign * np.exp(logabs)
    est = np.exp(-0.25 * z * z + nu * np.log(z)) * best + _EPS * np.abs(value)
    return value, logabs, sign, est


def _eval_asym_neg(nu: float, z: np.ndarray):
    """z <= -36: two-branch expansion at x = -z; the e^{+x^2/4} branch dominates
    unless 1/Gamma(-nu) vanishes (integer nu >= 0 never reaches this path)."""
    x = -z
    s1, b1 = _asym_sum(nu, x, "pos")
    s2, b2 = _asym_sum(nu, x, "neg")
    cpn = math.cos(math.pi * nu)
    coef2 = SQRT_2PI * rgamma(-nu)
    log1 = -0.25 * x * x + nu * np.log(x) + np.log(np.abs(cpn * s1) + 5e-324)
    sgn1 = np.sign(cpn * s1)
    log2 = 0.25 * x * x + (-nu - 1.0) * np.log(x) + np.log(np.abs(coef2 * s2) + 5e-324)
    sgn2 = np.sign(coef2 * s2)
    # |branch2| exceeds |branch1| by ~ e^{x^2/2}; fold branch1 in as a correction
    hi_is_2 = log2 >= log1
    log_hi = np.where(hi_is_2, log2, log1)
    log_lo = np.where(hi_is_2, log1, log2)
    sgn_hi = np.where(hi_is_2, sgn2, sgn1)
    sgn_lo = np.where(hi_is_2, sgn1, sgn2)
    r = np.exp(np.clip(log_lo - log_hi, -745.0, 0.0)) * sgn_lo * sgn_hi
    logabs = log_hi + np.log1p(r)
    sign = sgn_hi
    with np.errstate(over="ignore"):
        value = sign * np.exp(logabs)
    est = np.exp(0.25 * x * x + (-nu - 1.0) * np.log(x)) * abs(coef2) * b2 \
        + _EPS * np.abs(value)
    return value, logabs, sign, est


def _eval_all(nu: float, z: np.ndarray):
    """Regime dispatch; returns (value, log|value|, sign, est) arrays."""
    z = np.asarray(z, dtype=float)
    if not np.isfinite(nu) or not np.isfinite(z).all():
        raise DomainError("pcf: order and argument must be finite")
    scalar_in = z.ndim == 0
    z = np.atleast_1d(z)
    if nu >= 0 and float(nu).is_integer():
        out = _eval_hermite_form(int(nu), z)
    else:
        za = _z_asym(nu)
        value = np.empty_like(z)
        logabs = np.empty_like(z)
        sign = np.empty_like(z)
        est = np.empty_like(z)
        m_pos_asym = z >= za
        m_neg_asym = z < _Z_NEG_ASYM
        m_kummer = ~m_pos_asym & ~m_neg_asym & ((z <= 0.0) | ((nu >= 0) & (z <= _Z_KUMMER_POS)))
        m_integral = ~m_pos_asym & ~m_neg_asym & ~m_kummer & (nu < 0)
        m_recur = ~m_pos_asym & ~m_neg_asym & ~m_kummer & ~m_integral
        for mask, fn in ((m_pos_asym, _eval_asym_pos),
                         (m_neg_asym, _eval_asym_neg),
                         (m_kummer, _eval_kummer),
                         (m_integral, _eval_integral),
                         (m_recur, _eval_recurrence)):
            if mask.any():
                v, la, sg, e = fn(nu, z[mask])
                value[mask] = v
                logabs[mask] = la
                sign[mask] = sg
                est[mask] = e
        out = value, logabs, sign, est
    if scalar_in:
        return tuple(a[0] for a in out)
    return out


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------

def pcf(nu: float, z: float) -> PcfEval:
    """Evaluate D_nu(z) for real order and argument."""
    nu = float(nu)
    z = float(z)
    if not (math.isfinite(nu) and math.isfinite(z)):
        raise DomainError("pcf: order and argument must be finite")
    value, _, _, est = _eval_all(nu, np.float64(z))
    return PcfEval(order=nu, argument=z, value=float(value),
                   est_abs_error=float(est))


def pcf_values(nu: float, z) -> np.ndarray:
    """Vectorized D_nu over an array of arguments (fixed order)."""
    value, _, _, _ = _eval_all(float(nu), np.asarray(z, dtype=float))
    return value


def pcf_log_values(nu: float, z):
    """(sign, log|D_nu|) over an array of arguments; survives underflow of
    the plain value, which the kernel assembly needs."""
    _, logabs, sign, _ = _eval_all(float(nu), np.asarray(z, dtype=float))
    return sign, logabs


def pcf_at_zero(q: float) -> float:
    """D_q(0) = 2^{q/2} sqrt(pi) / Gamma((1-q)/2).

    Finite for every real q except q = 1, 3, 5, ... where the expression
    crosses the poles of the gamma function's reciprocal argument.
    """
    q = float(q)
    if not math.isfinite(q):
        raise DomainError("pcf_at_zero: order must be finite")
    if q > 0 and q % 2 == 1:
        raise PoleError(f"D_q(0) has a pole at q = {q} (odd positive integers)")
    return 2.0 ** (0.5 * q) * SQRT_PI * rgamma(0.5 * (1.0 - q))


def _erfc_chain(n: int, z: float) -> float:
    """D_{-n-1}(z) via the n-th derivative of e^{z^2/2} erfc(z/sqrt 2).

    d^n/dz^n [W] = P_n(z) W + Q_n(z) with W' = z W - sqrt(2/pi); W is
    evaluated as erfcx(z/sqrt 2), which is stable for large positive z.
    """
    from numpy.polynomial import polynomial as P
    p = np.array([1.0])
    qq = np.array([0.0])
    for _ in range(n):
        p_new = P.polyadd(P.polyder(p), P.polymulx(p))
        q_new = P.polyadd(P.polyder(qq), -math.sqrt(2.0 / math.pi) * p)
        p, qq = p_new, q_new
    w = erfcx(z / SQRT_2)
    deriv = P.polyval(z, p) * w + P.polyval(z, qq)
    return (2.0 ** -0.5) * SQRT_PI * ((-1.0) ** n / math.factorial(n)) \
        * math.exp(-0.25 * z * z) * deriv


def pcf_reduction(q: float, z: float):
    """Closed reductions of D_q(z) used as an independent cross-check.

    Integer q >= 0 -> Hermite polynomials; integer q < 0 -> derivatives
    of the scaled complementary error function; q = -1/2 with z > 0 ->
    modified Bessel K_{1/4}. Returns None when no reduction applies.
    """
    q = float(q)
    z = float(z)
    if float(q).is_integer():
        n = int(q)
        if n >= 0:
            return 2.0 ** (-0.5 * n) * math.exp(-0.25 * z * z) \
                * eval_hermite(n, z / SQRT_2)
        return _erfc_chain(-n - 1, z)
    if q == -0.5 and z > 0.0:
        return math.sqrt(z / (2.0 * math.pi)) * kv(0.25, 0.25 * z * z)
    return None


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma: argument must be positive and finite, got {x}")
    return float(gammaln(x))
