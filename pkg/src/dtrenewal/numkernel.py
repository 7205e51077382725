"""Scalar special functions: Pochhammer symbols, real-index binomials and
three-parameter Mittag-Leffler (Prabhakar) series with error control.

All series sums go through :func:`math.fsum`, which is exactly rounded and
therefore at least as good as Kahan summation. When the ratio between the
largest term and the sum is so large that double precision cannot deliver the
requested tolerance, the sum is recomputed with :mod:`mpmath` at a working
precision chosen from that ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import InvalidParamsError, NonConvergedError

DEFAULT_TOL = 1e-14
DEFAULT_MAX_TERMS = 10_000
DEFAULT_RADIUS = 50.0

_EPS = np.finfo(float).eps
_CHUNK = 128


@dataclass(frozen=True)
class SeriesValue:
    value: float
    abs_error_estimate: float
    terms_used: int
    converged: bool

    def __float__(self) -> float:
        return float(self.value)


def _is_nonpos_int(c: float) -> bool:
    return c <= 0 and float(c).is_integer()


def pochhammer(c: float, m: int) -> float:
    """Rising factorial (c)_m = c(c+1)...(c+m-1), with (c)_0 = 1."""
    if m < 0:
        raise InvalidParamsError("pochhammer needs m >= 0")
    out = 1.0
    for j in range(m):
        out *= c + j
    return out


def log_pochhammer(c: float, m: int) -> tuple[float, int]:
    """Return (log|(c)_m|, sign). The sign is 0 when the symbol vanishes."""
    lg, sg = log_pochhammer_vec(c, np.array([m]))
    return float(lg[0]), int(sg[0])


def log_pochhammer_vec(c: float, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(m, dtype=float)
    if _is_nonpos_int(c):
        k = -int(c)
        lg = np.where(m <= k, gammaln(1.0 + k) - gammaln(np.maximum(1.0 + k - m, 1.0)), -np.inf)
        sg = np.where(m <= k, np.where(m % 2 == 0, 1, -1), 0)
        return lg, sg.astype(int)
    if c > 0:
        # (c)_m = c (c+1)_{m-1} keeps tiny c away from the pole of gammaln
        lg = np.where(m > 0, math.log(c) + gammaln(c + m) - gammaln(c + 1.0), 0.0)
        return lg, np.ones(m.shape, dtype=int)
    # negative non-integer c: (c+m) may sit on a pole only if c is an integer
    lg = gammaln(c + m) - gammaln(c)
    sg = (gammasgn(c + m) * gammasgn(c)).astype(int)
    return lg, sg


def gen_binomial(a: float, k: int) -> float:
    """Binomial coefficient with real upper index, C(a, k)."""
    if k < 0:
        raise InvalidParamsError("gen_binomial needs k >= 0")
    out = 1.0
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


def log_gamma_ratio(x: float, y: float) -> tuple[float, int]:
    """log|Gamma(x)/Gamma(y)| and its sign, for x, y off the poles."""
    return float(gammaln(x) - gammaln(y)), int(gammasgn(x) * gammasgn(y))


def _term_logs(a, b, c, z, m):
    lp, sp = log_pochhammer_vec(c, m)
    with np.errstate(divide="ignore"):
        logs = lp + m * math.log(abs(z)) - gammaln(m + 1.0) - gammaln(a * m + b)
    zsign = np.where((m % 2 == 1) & (z < 0), -1, 1)
    return logs, sp * zsign


class _MpTerms:
    """High-precision series terms, cached across stopping checks."""

    def __init__(self, a, b, c, z):
        self.params = (a, b, c, z)
        self.dps = 0
        self.terms: list = []

    def total(self, n_terms: int, dps: int) -> float:
        if dps > self.dps:
            self.dps, self.terms = dps, []
        a, b, c, z = self.params
        with mpmath.workdps(self.dps):
            a_, b_, c_, z_ = (mpmath.mpf(v) for v in (a, b, c, z))
            for m in range(len(self.terms), n_terms):
                self.terms.append(
                    mpmath.rf(c_, m) * z_**m * mpmath.rgamma(a_ * m + b_) / mpmath.factorial(m)
                )
            return float(mpmath.fsum(self.terms[:n_terms]))


def prabhakar_E(
    a: float,
    b: float,
    c: float,
    z: float,
    *,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
    radius: float = DEFAULT_RADIUS,
) -> SeriesValue:
    """Three-parameter Mittag-Leffler function E^c_{a,b}(z) by its power series.

    Parameters
    ----------
    a, b : float
        Shape parameters, a > 0 and b >= 0. With b = 0 the m = 0 term
        vanishes (1/Gamma(0) = 0).
    c : float
        Pochhammer parameter (any real).
    z : float
        Real argument with ``|z| <= radius``.

    Returns
    -------
    SeriesValue
        ``converged`` is False when ``max_terms`` is reached before the
        truncation and rounding error fall below ``tol * |value|``.

    Raises
    ------
    NonConvergedError
        If ``|z|`` exceeds the practical radius.
    """
    if not (a > 0 and b >= 0):
        raise InvalidParamsError("prabhakar_E needs a > 0 and b >= 0")
    if abs(z) > radius:
        raise NonConvergedError(f"|z|={abs(z):g} exceeds the series radius {radius:g}")
    if z == 0 or c == 0:
        return SeriesValue(_rgamma(b), 0.0, 1, True)

    terminating = _is_nonpos_int(c)
    n_cap = min(max_terms, -int(c) + 1) if terminating else max_terms

    logs = np.empty(0)
    signs = np.empty(0, dtype=int)
    tail = math.inf
    mp_terms = _MpTerms(a, b, c, z)
    while len(logs) < n_cap:
        n = len(logs)
        m = np.arange(n, min(n + _CHUNK, n_cap), dtype=float)
        lg, sg = _term_logs(a, b, c, z, m)
        logs = np.concatenate([logs, lg])
        signs = np.concatenate([signs, sg])
        if terminating and len(logs) >= n_cap:
            tail = 0.0
            break
        # past the peak with shrinking ratios the remainder is geometric-bounded
        d1, d2 = logs[-1] - logs[-2], logs[-2] - logs[-3]
        if d1 < 0 and d1 <= d2 + 1e-12:
            log_tail = logs[-1] + d1 - math.log1p(-math.exp(d1))
            value, rounding = _sum_terms(mp_terms, logs, signs, tol)
            if not math.isfinite(value):
                # the function itself exceeds the double range
                return SeriesValue(value, math.inf, int(len(logs)), False)
            if value != 0 and log_tail <= math.log(0.1 * tol * abs(value)):
                tail = math.exp(log_tail)
                break
    if not math.isfinite(tail):
        # term cap reached: report the float partial sum without refinement
        value, _ = _sum_terms(mp_terms, logs, signs, tol, refine=False)
        return SeriesValue(float(value), math.inf, int(len(logs)), False)
    value, rounding = _sum_terms(mp_terms, logs, signs, tol)
    err = tail + rounding
    converged = bool(err <= tol * abs(value)) and math.isfinite(value)
    return SeriesValue(float(value), float(err), int(len(logs)), converged)


def _sum_terms(mp_terms, logs, signs, tol, refine=True):
    """Sum the series terms; returns (value, rounding error estimate)."""
    finite = np.isfinite(logs)
    top = float(np.max(logs[finite])) if finite.any() else 0.0
    if top > 700.0 and np.all(signs[finite] >= 0):
        return math.inf, math.inf
    scaled = signs * np.exp(logs - top)
    s = math.fsum(scaled)
    # each term carries about (|log term| + few) ulps from exp/gammaln
    rounding = float(np.sum(np.abs(scaled) * (np.abs(np.where(finite, logs, 0.0)) + 4.0))) * _EPS
    if not refine or (top <= 700.0 and rounding <= 0.1 * tol * abs(s)):
        return _rescale(s, top), _rescale(rounding, top)
    # cancellation: raise the working precision until it covers the lost digits
    dps = 30 + _digits(top)
    while True:
        v = mp_terms.total(len(logs), dps)
        lost = top - math.log(max(abs(v), 1e-300))
        need = 17 + _digits(lost) + _digits(-math.log(tol)) - 14 + 5
        if need <= dps:
            return v, math.exp(top - (dps - 2) * math.log(10.0))
        dps = need + 10


def _rescale(x: float, log_scale: float) -> float:
    """x * exp(log_scale) without spurious overflow."""
    if x == 0:
        return 0.0
    log_abs = math.log(abs(x)) + log_scale
    if log_abs > 709.78:
        return math.copysign(math.inf, x)
    return math.copysign(math.exp(log_abs), x)


def _rgamma(b: float) -> float:
    return 0.0 if b == 0 else float(math.exp(-gammaln(b)) * gammasgn(b))


def _digits(log_e: float) -> int:
    return int(math.ceil(max(log_e, 0.0) / math.log(10.0)))


def mittag_leffler(alpha: float, z: float, **kw) -> SeriesValue:
    """One-parameter Mittag-Leffler function E_alpha(z)."""
    return prabhakar_E(alpha, 1.0, 1.0, z, **kw)


def mittag_leffler2(a: float, b: float, z: float, **kw) -> SeriesValue:
    """Two-parameter Mittag-Leffler function E_{a,b}(z)."""
    return prabhakar_E(a, b, 1.0, z, **kw)
