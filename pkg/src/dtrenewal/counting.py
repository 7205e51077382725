"""Discrete-time counting processes built on the waiting-time generating
function

    theta(u) = u * phi(u),   phi(u) = (1 + (1 - u)**alpha / xi) ** (-nu),

together with its special cases: nu = 1 (fractional Bernoulli), alpha = nu = 1
(Bernoulli) and the Sibuya process.

Every distribution is produced by exact power-series arithmetic on a finite
horizon T; the only approximation is floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np
from scipy.special import gammaln

from . import gfcalc
from .errors import (
    BranchDomainError,
    DimMismatchError,
    FNotStrictError,
    InvalidParamsError,
    NonConvergedError,
    NonPositiveSampleError,
)
from .gfcalc import CausalSeq


@dataclass(frozen=True)
class PdtpParams:
    """Process parameters.

    Give ``xi`` directly, or ``xi0`` together with the grid spacing ``h`` so
    that ``xi = xi0 * h**alpha``. If all three are given they must agree.
    """

    alpha: float
    nu: float
    xi: Optional[float] = None
    xi0: Optional[float] = None
    h: float = 1.0

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise InvalidParamsError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.nu > 0:
            raise InvalidParamsError(f"nu must be positive, got {self.nu}")
        if not self.h > 0:
            raise InvalidParamsError(f"h must be positive, got {self.h}")
        if self.xi0 is not None and not self.xi0 > 0:
            raise InvalidParamsError(f"xi0 must be positive, got {self.xi0}")
        if self.xi is None:
            if self.xi0 is None:
                raise InvalidParamsError("either xi or xi0 is required")
            object.__setattr__(self, "xi", self.xi0 * self.h**self.alpha)
        elif self.xi0 is not None:
            scaled = self.xi0 * self.h**self.alpha
            if abs(scaled - self.xi) > 1e-12 * max(1.0, abs(self.xi)):
                raise InvalidParamsError(f"xi={self.xi} disagrees with xi0*h**alpha={scaled}")
        if not self.xi > 0:
            raise InvalidParamsError(f"xi must be positive, got {self.xi}")

    @property
    def p(self) -> float:
        return self.xi / (1.0 + self.xi)

    @property
    def q(self) -> float:
        return 1.0 / (1.0 + self.xi)


@dataclass(frozen=True)
class StatePanel:
    """phi[n, t] = probability of exactly n arrivals up to time t."""

    phi: np.ndarray
    params: Optional[PdtpParams] = None

    def __post_init__(self):
        arr = np.array(self.phi, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "phi", arr)

    @property
    def n_max(self) -> int:
        return self.phi.shape[0] - 1

    @property
    def horizon(self) -> int:
        return self.phi.shape[1] - 1

    def row(self, n: int) -> CausalSeq:
        return CausalSeq(self.phi[n], 1.0 if self.params is None else self.params.h, "pmf")


@dataclass(frozen=True)
class MemoryKernels:
    M: CausalSeq
    K0: CausalSeq
    B: CausalSeq
    D: CausalSeq

    @property
    def horizon(self) -> int:
        return self.D.horizon


def _check_T(T: int, least: int = 0) -> int:
    T = int(T)
    if T < least:
        raise InvalidParamsError(f"horizon must be >= {least}, got {T}")
    return T


def _ceil_int(x: float) -> int:
    # guard against 0.6 * 5 = 3.0000000000000004
    return int(math.ceil(x - 1e-12))


def _base_series(params: PdtpParams, length: int) -> np.ndarray:
    """Coefficients of 1 + (1 - u)**alpha / xi."""
    a = gfcalc.frac_diff_coeffs(params.alpha, length).coeffs / params.xi
    a[0] += 1.0
    return a


def phi_coeffs(params: PdtpParams, T: int) -> np.ndarray:
    """phi(k), k = 0..T: the waiting pmf before its one-step shift."""
    return gfcalc.power_table(_base_series(params, T + 1), [-params.nu])[0]


def pdtp_waiting_pmf(params: PdtpParams, T: int) -> CausalSeq:
    """Waiting-time pmf theta(t), t = 0..T, with theta(0) = 0."""
    T = _check_T(T, 1)
    theta = np.zeros(T + 1)
    theta[1:] = phi_coeffs(params, T - 1)
    return CausalSeq(theta, params.h, "pmf")


# -- closed-form m-series, evaluated in extended precision -------------------

def _mp_binomial_series(weights, bases, T: int, *, max_terms: int = 20_000, dps: int = 40) -> np.ndarray:
    """sum_m weights(m) * (bases(m))_t / t!  for t = 0..T, in mpmath.

    The sums alternate with intermediate terms far larger than the result, so
    the working precision is raised until it covers the digits lost.
    """
    while True:
        with mpmath.workdps(dps):
            total = [mpmath.mpf(0)] * (T + 1)
            peak = [mpmath.mpf(0)] * (T + 1)
            prev = None
            small = mpmath.mpf(10) ** (-(dps - 8))
            for m in range(max_terms):
                w = weights(m)
                if w == 0:
                    if m > 0 and prev is not None and all(x == 0 for x in prev):
                        break
                    prev = [mpmath.mpf(0)] * (T + 1)
                    continue
                beta = bases(m)
                r = mpmath.mpf(1)
                cur = []
                for t in range(T + 1):
                    if t:
                        r = r * (beta + t - 1) / t
                    term = w * r
                    cur.append(term)
                    total[t] += term
                    if abs(term) > peak[t]:
                        peak[t] = abs(term)
                if prev is not None and m > 4:
                    done = all(
                        abs(c) <= small * pk and abs(c) <= abs(p)
                        for c, p, pk in zip(cur, prev, peak)
                    )
                    if done:
                        break
                prev = cur
            else:
                raise NonConvergedError("closed-form m-series hit the term cap")
            lost = max(
                (float(mpmath.log10(pk / abs(tt))) if tt != 0 and pk != 0 else 0.0)
                for pk, tt in zip(peak, total)
            )
            if lost + 22 <= dps:
                return np.array([float(x) for x in total])
        dps = int(lost) + 30


def pdtp_waiting_pmf_branch(params: PdtpParams, T: int, branch: str) -> CausalSeq:
    """Waiting pmf from the closed-form expansions in powers of xi or 1/xi.

    ``small_xi`` expands in xi and needs 0 < xi < 1; ``large_xi`` expands in
    1/xi and needs xi > 1. Meant as an independent check on
    :func:`pdtp_waiting_pmf`.
    """
    T = _check_T(T, 1)
    a, nu, xi = params.alpha, params.nu, params.xi
    with mpmath.workdps(60):
        mxi = mpmath.mpf(xi)
    if branch == "small_xi":
        if not 0 < xi < 1:
            raise BranchDomainError(f"small_xi branch needs 0 < xi < 1, got xi={xi}")

        def weights(m):
            return mpmath.mpf(mxi) ** nu * (-1) ** m * mpmath.rf(nu, m) * mpmath.mpf(mxi) ** m / mpmath.factorial(m)

        def bases(m):
            return mpmath.mpf(a) * (m + mpmath.mpf(nu))

    elif branch == "large_xi":
        if not xi > 1:
            raise BranchDomainError(f"large_xi branch needs xi > 1, got xi={xi}")

        def weights(m):
            return (-1) ** m * mpmath.rf(nu, m) / (mpmath.mpf(mxi) ** m * mpmath.factorial(m))

        def bases(m):
            # (-1)^t C(a m, t) = (-a m)_t / t!
            return -mpmath.mpf(a) * m

    else:
        raise InvalidParamsError(f"unknown branch {branch!r}")
    phi = _mp_binomial_series(weights, bases, T - 1)
    theta = np.zeros(T + 1)
    theta[1:] = phi
    return CausalSeq(theta, params.h, "pmf")


# -- state probabilities -----------------------------------------------------

def _prefix_power_table(params: PdtpParams, n_rows: int, T: int) -> np.ndarray:
    """P[n, k] = sum_{j<=k} [u^j] phi(u)**n, rows n = 0..n_rows-1."""
    gam = -params.nu * np.arange(n_rows)
    table = gfcalc.power_table(_base_series(params, T + 1), gam)
    return np.cumsum(table, axis=1)


def pdtp_state_panel(params: PdtpParams, N: int, T: int) -> StatePanel:
    """State probabilities phi[n, t] for n = 0..min(N, T), t = 0..T.

    Uses phi_n(t) = P_n(t - n) - P_{n+1}(t - n - 1), where P_n holds prefix
    sums of the coefficients of phi(u)**n.
    """
    T = _check_T(T)
    N = min(_check_T(N), T)
    P = _prefix_power_table(params, N + 2, T)
    out = np.zeros((N + 1, T + 1))
    for n in range(N + 1):
        out[n, n:] = P[n, : T + 1 - n]
        out[n, n + 1 :] -= P[n + 1, : T - n]
    return StatePanel(out, params)


def pdtp_survival(params: PdtpParams, T: int) -> CausalSeq:
    """Probability of no arrival up to t, t = 0..T."""
    T = _check_T(T)
    surv = np.ones(T + 1)
    if T >= 1:
        surv[1:] = 1.0 - np.cumsum(phi_coeffs(params, T - 1))
    return CausalSeq(surv, params.h, "cumulative")


# -- memory function and kernels ---------------------------------------------

def memory_kernels(params: PdtpParams, T: int) -> MemoryKernels:
    """Memory function M and kernels K0, B, D on t = 0..T.

    D holds the coefficients of (1 + (1-u)**alpha / xi)**nu, K0 those of
    D(u) / (1 - u), and B those of xi**nu (1-u)**(-ceil(alpha nu)) D(u), so
    that K0 = (1-u)**(ceil(alpha nu) - 1) B / xi**nu. M(t) = K0(t) - Theta(t-1)
    with Theta(0) = 1.
    """
    T = _check_T(T)
    size = T + 1
    h = params.h
    D = gfcalc.power_table(_base_series(params, size), [params.nu])[0]
    K0 = np.cumsum(D)
    M = K0.copy()
    M[1:] -= 1.0
    order = _ceil_int(params.alpha * params.nu)
    lift = gfcalc.frac_diff_coeffs(-order, size).coeffs
    B = params.xi**params.nu * np.convolve(lift, D)[:size]
    return MemoryKernels(
        M=CausalSeq(M, h, "kernel"),
        K0=CausalSeq(K0, h, "kernel"),
        B=CausalSeq(B, h, "kernel"),
        D=CausalSeq(D, h, "kernel"),
    )


def memory_kernel_B_series(params: PdtpParams, T: int) -> CausalSeq:
    """Kernel B from its expansion in powers of xi.

    B(t) = sum_m C(nu, m) xi^m (alpha m + c)_t / t!, c = ceil(alpha nu) - alpha nu.
    The sum converges for xi < 1 and terminates for integer nu; otherwise
    BRANCH_DOMAIN is raised.
    """
    T = _check_T(T)
    a, nu, xi = params.alpha, params.nu, params.xi
    integer_nu = float(nu).is_integer()
    if not (xi < 1 or integer_nu):
        raise BranchDomainError("the xi-expansion of B needs xi < 1 or integer nu")
    c = _ceil_int(a * nu) - a * nu

    def weights(m):
        return mpmath.binomial(nu, m) * mpmath.mpf(xi) ** m

    def bases(m):
        return mpmath.mpf(a) * m + mpmath.mpf(c)

    return CausalSeq(_mp_binomial_series(weights, bases, T), params.h, "kernel")


def kf_residual(params: PdtpParams, panel: StatePanel, kernels: Optional[MemoryKernels] = None) -> np.ndarray:
    """Residual of the difference equations
    (D * phi_n)(t) - phi_{n-1}(t-1) - delta_{n0} M(t), for every (n, t).
    """
    T = panel.horizon
    if kernels is None:
        kernels = memory_kernels(params, T)
    if kernels.horizon < T:
        raise DimMismatchError(f"kernel horizon {kernels.horizon} < panel horizon {T}")
    D = kernels.D.coeffs[: T + 1]
    phi = panel.phi
    res = np.empty_like(phi)
    for n in range(phi.shape[0]):
        res[n] = np.convolve(D, phi[n])[: T + 1]
        if n == 0:
            res[n] -= kernels.M.coeffs[: T + 1]
        else:
            res[n, 1:] -= phi[n - 1, :T]
    return res


# -- expected number of arrivals ---------------------------------------------

def expected_arrivals(params: PdtpParams, T: int, method: str = "renewal") -> CausalSeq:
    """Mean number of arrivals in [0, t], t = 0..T.

    ``renewal`` (default) solves the renewal equation r = delta + theta * r
    and accumulates r; cost O(T^2) with one power series. ``sum`` adds the
    probabilities of at least n arrivals, sum_{n=1..t} P_n(t - n), which needs
    every power of phi and is meant for moderate T.
    """
    T = _check_T(T)
    if method == "renewal":
        if T == 0:
            return CausalSeq(np.zeros(1), params.h, "cumulative")
        theta = pdtp_waiting_pmf(params, T).coeffs
        r = gfcalc.resolvent(theta).coeffs
        out = np.cumsum(r) - 1.0
    elif method == "sum":
        P = _prefix_power_table(params, T + 1, T)
        out = np.zeros(T + 1)
        for n in range(1, T + 1):
            out[n:] += P[n, : T + 1 - n]
    else:
        raise InvalidParamsError(f"unknown method {method!r}")
    return CausalSeq(out, params.h, "cumulative")


def tail_exponent(seq, t_min: int, t_max: int) -> float:
    """Least-squares slope of log seq(t) against log t over [t_min, t_max]."""
    arr = seq.coeffs if isinstance(seq, CausalSeq) else np.asarray(seq, dtype=float)
    if not (1 <= t_min < t_max <= arr.size - 1):
        raise InvalidParamsError(f"window [{t_min}, {t_max}] outside the sequence")
    window = arr[t_min : t_max + 1]
    if np.any(window <= 0):
        raise NonPositiveSampleError("tail window contains non-positive samples")
    t = np.arange(t_min, t_max + 1, dtype=float)
    slope, _ = np.polyfit(np.log(t), np.log(window), 1)
    return float(slope)


# -- Sibuya process -----------------------------------------------------------

def _check_sibuya_alpha(alpha: float, allow_one: bool = True) -> None:
    hi_ok = alpha <= 1 if allow_one else alpha < 1
    if not (alpha > 0 and hi_ok):
        raise InvalidParamsError(f"Sibuya alpha out of range: {alpha}")


def sibuya_pmf(alpha: float, T: int) -> CausalSeq:
    """w(t) = (-1)^(t-1) C(alpha, t), the coefficients of 1 - (1-u)**alpha."""
    _check_sibuya_alpha(alpha)
    T = _check_T(T, 1)
    w = -gfcalc.frac_diff_coeffs(alpha, T + 1).coeffs
    w[0] = 0.0
    return CausalSeq(w, 1.0, "pmf")


def sibuya_survival(alpha: float, T: int) -> CausalSeq:
    """Probability of no Sibuya step up to t: coefficients of (1-u)**(alpha-1)."""
    _check_sibuya_alpha(alpha)
    T = _check_T(T)
    return CausalSeq(gfcalc.frac_diff_coeffs(alpha - 1.0, T + 1).coeffs, 1.0, "cumulative")


def sibuya_state_panel(alpha: float, N: int, T: int) -> StatePanel:
    """Coefficients of (1-u)**(alpha-1) (1 - (1-u)**alpha)**n."""
    T = _check_T(T)
    N = min(_check_T(N), T)
    w = sibuya_pmf(alpha, max(T, 1)).coeffs[: T + 1]
    out = np.zeros((N + 1, T + 1))
    out[0] = sibuya_survival(alpha, T).coeffs
    for n in range(1, N + 1):
        out[n] = np.convolve(out[n - 1], w)[: T + 1]
    return StatePanel(out, None)


def sibuya_hitting(alpha: float, R: int) -> np.ndarray:
    """Expected number of visits tau(r) = (alpha)_r / r!, r = 0..R."""
    _check_sibuya_alpha(alpha)
    out = np.ones(R + 1)
    out[1:] = np.cumprod(1.0 + (alpha - 1.0) / np.arange(1, R + 1))
    return out


# -- generalized waiting times -------------------------------------------------

def generalized_waiting_pmf(f, params: PdtpParams, T: int) -> CausalSeq:
    """Waiting pmf with generating function f(u) phi(u) for a strictly
    positive pmf f (f(0) = 0)."""
    T = _check_T(T, 1)
    fc = f.coeffs if isinstance(f, CausalSeq) else np.asarray(f, dtype=float)
    if fc[0] != 0:
        raise FNotStrictError("f must vanish at t = 0")
    fpad = np.zeros(T + 1)
    k = min(fc.size, T + 1)
    fpad[:k] = fc[:k]
    out = np.convolve(fpad, phi_coeffs(params, T))[: T + 1]
    return CausalSeq(out, params.h, "pmf")


def negative_binomial_steps(nu: float, xi: float, K: int) -> CausalSeq:
    """Count distribution P(n) = (nu)_{n-1}/(n-1)! p^nu q^(n-1), n >= 1.

    Its generating function is u p^nu / (1 - q u)^nu; composing it with the
    Sibuya step law yields the (1 - (1-u)**alpha) phi(u) waiting time.
    """
    p, q = xi / (1 + xi), 1 / (1 + xi)
    n = np.arange(K + 1, dtype=float)
    out = np.zeros(K + 1)
    k = n[1:] - 1.0
    out[1:] = np.exp(gammaln(nu + k) - gammaln(nu) - gammaln(k + 1.0) + nu * math.log(p) + k * math.log(q))
    return CausalSeq(out, 1.0, "pmf")
