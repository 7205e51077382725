"""Continuous-time reference formulas and the h -> 0 convergence check.

The continuous-time process has waiting-time density
xi0^nu t^(alpha nu - 1) E^nu_{alpha, alpha nu}(-xi0 t^alpha). The discrete
process with xi = xi0 h^alpha approaches it as the grid spacing h shrinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import counting
from .errors import GridMismatchError, InvalidParamsError, NonConvergedError
from .numkernel import SeriesValue, prabhakar_E


@dataclass(frozen=True)
class CtParams:
    alpha: float
    nu: float
    xi0: float

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise InvalidParamsError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.nu > 0:
            raise InvalidParamsError(f"nu must be positive, got {self.nu}")
        if not self.xi0 > 0:
            raise InvalidParamsError(f"xi0 must be positive, got {self.xi0}")

    def discretize(self, h: float) -> counting.PdtpParams:
        return counting.PdtpParams(self.alpha, self.nu, xi0=self.xi0, h=h)


def _E(a, b, c, z) -> float:
    val = prabhakar_E(a, b, c, z)
    if not val.converged:
        raise NonConvergedError(f"E^{c}_{{{a},{b}}}({z}) did not converge")
    return val.value


def prabhakar_density(p: CtParams, t: float) -> float:
    """Waiting-time density at t > 0."""
    if not t > 0:
        raise InvalidParamsError("density needs t > 0")
    a, nu = p.alpha, p.nu
    return p.xi0**nu * t ** (a * nu - 1) * _E(a, a * nu, nu, -p.xi0 * t**a)


def gfpp_state_prob(p: CtParams, n: int, t: float) -> float:
    """Probability of exactly n arrivals in [0, t]."""
    if n < 0 or t < 0:
        raise InvalidParamsError("need n >= 0 and t >= 0")
    a, nu = p.alpha, p.nu
    x = p.xi0 * t**a
    if x == 0:
        return 1.0 if n == 0 else 0.0
    first = _E(a, a * n * nu + 1, n * nu, -x)
    second = _E(a, a * (n + 1) * nu + 1, (n + 1) * nu, -x)
    return x ** (n * nu) * (first - x**nu * second)


def fractional_poisson_pmf(alpha: float, xi0: float, n: int, t: float, *, tol: float = 1e-14) -> float:
    """State probabilities for nu = 1, summed directly as
    (x^n/n!) sum_m ((n+m)!/m!) (-x)^m / Gamma(alpha(m+n)+1), x = xi0 t^alpha.
    """
    if n < 0 or t < 0:
        raise InvalidParamsError("need n >= 0 and t >= 0")
    x = xi0 * t**alpha
    if x == 0:
        return 1.0 if n == 0 else 0.0
    # (n+m)!/(n! m!) (-x)^m / Gamma(alpha(m+n)+1) is E^{n+1}_{alpha, alpha n + 1}(-x)
    val = prabhakar_E(alpha, alpha * n + 1, n + 1, -x, tol=tol)
    if not val.converged:
        raise NonConvergedError("fractional Poisson series did not converge")
    return math.exp(n * math.log(x)) * val.value


@dataclass(frozen=True)
class KernelValue:
    """Regular part of the kernel; ``has_delta`` marks an extra delta(tau)."""

    regular: float
    has_delta: bool


def ct_kernel_B(p: CtParams, tau: float) -> KernelValue:
    """Continuous-time limit of the kernel B at tau > 0."""
    if not tau > 0:
        raise InvalidParamsError("kernel needs tau > 0")
    a, nu, xi0 = p.alpha, p.nu, p.xi0
    an = a * nu
    integer_order = abs(an - round(an)) <= 1e-12
    c = 0.0 if integer_order else math.ceil(an) - an
    # for integer alpha*nu, c = 0 removes the m = 0 term, which is the delta part
    return KernelValue(tau ** (c - 1) * _E(a, c, -nu, -xi0 * tau**a), integer_order)


def expected_arrivals_ct(p: CtParams, t: float, n_max: int = 200) -> SeriesValue:
    """Mean number of arrivals in [0, t]:
    sum_{n>=1} x^(nu n) E^{nu n}_{alpha, alpha nu n + 1}(-x), x = xi0 t^alpha,
    truncated at n_max. The error estimate is the size of the last term."""
    if t < 0:
        raise InvalidParamsError("need t >= 0")
    a, nu = p.alpha, p.nu
    x = p.xi0 * t**a
    if x == 0:
        return SeriesValue(0.0, 0.0, 0, True)
    terms = []
    for n in range(1, n_max + 1):
        term = x ** (nu * n) * _E(a, a * nu * n + 1, nu * n, -x)
        terms.append(term)
        if abs(term) < 1e-16 * abs(math.fsum(terms)) and n > 2:
            break
    last = abs(terms[-1])
    value = math.fsum(terms)
    return SeriesValue(value, last, len(terms), last <= 1e-12 * max(abs(value), 1e-300))


@dataclass(frozen=True)
class ConvergenceRow:
    t: float
    h: float
    xi: float
    state_error: float
    density_error: float


def convergence_study(p: CtParams, t_targets: Iterable[float], h_list: Iterable[float], n: int = 0) -> list[ConvergenceRow]:
    """Compare the discrete process on grid h with its continuous limit.

    For each (t, h) the discrete state probability at step t/h with
    xi = xi0 h^alpha is compared with the continuous-time value, and
    phi(t/h)/h with the waiting-time density. Every t must be an integer
    multiple of every h.
    """
    t_targets = list(t_targets)
    h_list = list(h_list)
    rows = []
    for t in t_targets:
        ref_state = gfpp_state_prob(p, n, t)
        ref_density = prabhakar_density(p, t)
        for h in h_list:
            k = t / h
            if abs(k - round(k)) > 1e-9 * max(1.0, k):
                raise GridMismatchError(f"t={t} is not a multiple of h={h}")
            k = int(round(k))
            dp = p.discretize(h)
            if n == 0:
                state = counting.pdtp_survival(dp, k).coeffs[k]
            else:
                state = counting.pdtp_state_panel(dp, n, k).phi[n, k] if n <= k else 0.0
            dens = counting.phi_coeffs(dp, k)[k] / h
            rows.append(ConvergenceRow(t, h, dp.xi, float(abs(state - ref_state)), float(abs(dens - ref_density))))
    return rows


def is_monotone_nonincreasing(errors, rtol: float = 0.0) -> bool:
    errors = np.asarray(errors, dtype=float)
    return bool(np.all(np.diff(errors) <= rtol * errors[:-1]))
