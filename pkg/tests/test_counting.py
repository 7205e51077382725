from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import comb, gammaln

from dtrenewal import counting, gfcalc
from dtrenewal.counting import PdtpParams
from dtrenewal.errors import BranchDomainError, FNotStrictError, InvalidParamsError, NonPositiveSampleError

ALPHAS = [0.3, 0.6, 0.9, 1.0]
NUS = [0.5, 1.0, 1.742, 2.5]
XIS = [0.5, 1.0, 2.0]

params_st = st.builds(
    PdtpParams,
    alpha=st.floats(0.2, 1.0),
    nu=st.floats(0.3, 3.0),
    xi=st.floats(0.2, 5.0),
)


def test_params_validation():
    with pytest.raises(InvalidParamsError):
        PdtpParams(0.0, 1.0, 1.0)
    with pytest.raises(InvalidParamsError):
        PdtpParams(0.5, -1.0, 1.0)
    with pytest.raises(InvalidParamsError):
        PdtpParams(0.5, 1.0)
    with pytest.raises(InvalidParamsError):
        PdtpParams(0.5, 1.0, xi=1.0, xi0=2.0, h=0.5)
    p = PdtpParams(0.5, 1.0, xi0=2.0, h=0.25)
    assert p.xi == pytest.approx(1.0, abs=1e-15)
    PdtpParams(0.5, 1.0, xi=1.0, xi0=2.0, h=0.25)


@given(params_st)
def test_waiting_pmf_basics(p):
    theta = counting.pdtp_waiting_pmf(p, 40).coeffs
    assert theta[0] == 0
    assert theta[1] == pytest.approx((p.xi / (1 + p.xi)) ** p.nu, rel=1e-12)
    assert np.all(theta >= -1e-15)
    assert theta.sum() <= 1 + 1e-12


def test_geometric_oracle():
    theta = counting.pdtp_waiting_pmf(PdtpParams(1, 1, 1), 20).coeffs
    t = np.arange(1, 21)
    assert np.allclose(theta[1:], 0.5**t, atol=1e-16)


@pytest.mark.parametrize("xi", [0.3, 0.5, 0.7, 1.5, 2.0, 3.0])
def test_branch_series_agree(xi):
    p = PdtpParams(0.6, 1.2, xi)
    branch = "small_xi" if xi < 1 else "large_xi"
    direct = counting.pdtp_waiting_pmf(p, 32).coeffs
    got = counting.pdtp_waiting_pmf_branch(p, 32, branch).coeffs
    assert np.abs(got - direct).max() <= 1e-9


def test_branch_domain():
    p = PdtpParams(0.6, 1.2, 1.0)
    for branch in ("small_xi", "large_xi"):
        with pytest.raises(BranchDomainError):
            counting.pdtp_waiting_pmf_branch(p, 5, branch)


def test_state_panel_initial_conditions():
    p = PdtpParams(0.6, 1.742, 0.7)
    phi = counting.pdtp_state_panel(p, 20, 20).phi
    assert phi[0, 0] == 1 and np.all(phi[1:, 0] == 0)
    for n in range(1, 21):
        assert np.all(phi[n, :n] == 0)
        assert phi[n, n] == pytest.approx((p.xi / (1 + p.xi)) ** (n * p.nu), rel=1e-10)


@pytest.mark.parametrize("xi", [0.5, 1.0, 3.0])
def test_bernoulli_binomial(xi):
    p = PdtpParams(1, 1, xi)
    T = 64
    phi = counting.pdtp_state_panel(p, T, T).phi
    t = np.arange(T + 1)
    for n in range(T + 1):
        want = comb(t, n) * p.p**n * p.q ** (t - n)
        assert np.abs(phi[n] - want).max() <= 1e-12


def test_panel_clamps_N():
    phi = counting.pdtp_state_panel(PdtpParams(0.5, 1, 1), 100, 10).phi
    assert phi.shape == (11, 11)


def test_normalization_example():
    phi = counting.pdtp_state_panel(PdtpParams(0.5, 0.5, 1.0), 4, 4).phi
    assert phi[:, 4].sum() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("nu", NUS)
def test_normalization_and_kf_grid(alpha, nu):
    for xi in XIS:
        p = PdtpParams(alpha, nu, xi)
        panel = counting.pdtp_state_panel(p, 128, 128)
        assert np.abs(panel.phi.sum(axis=0) - 1).max() <= 1e-10
        assert np.abs(counting.kf_residual(p, panel)).max() <= 1e-8


@given(params_st)
def test_survival_properties(p):
    T = 40
    surv = counting.pdtp_survival(p, T).coeffs
    theta = counting.pdtp_waiting_pmf(p, T).coeffs
    assert surv[0] == 1
    assert np.all(np.diff(surv) <= 1e-15)
    assert np.allclose(theta[1:], surv[:-1] - surv[1:], atol=1e-14)
    row0 = counting.pdtp_state_panel(p, 0, T).phi[0]
    assert np.abs(row0 - surv).max() <= 1e-12


def test_survival_bernoulli():
    p = PdtpParams(1, 1, 2.0)
    assert np.allclose(counting.pdtp_survival(p, 30).coeffs, p.q ** np.arange(31), atol=1e-15)


@given(params_st, st.integers(1, 5))
def test_state_n_is_theta_power_times_survival(p, n):
    T = 30
    theta = counting.pdtp_waiting_pmf(p, T)
    want = gfcalc.convolve(gfcalc.conv_power(theta, n), counting.pdtp_survival(p, T)).coeffs
    got = counting.pdtp_state_panel(p, n, T).phi[n]
    assert np.abs(got - want).max() <= 1e-10


def _fractional_bernoulli_oracle(alpha, xi, n, t):
    """Explicit nu = 1 state probability as a power series in xi (xi < 1)."""
    if t < n:
        return 0.0
    with mpmath.workdps(50):
        a, x = mpmath.mpf(alpha), mpmath.mpf(xi)

        def poch_ratio(c, k):
            return mpmath.rf(c, k) / mpmath.factorial(k)

        total = x**n * poch_ratio(a * n + 1, t - n)
        m = 1
        while True:
            term = poch_ratio(n, m) * poch_ratio(a * (n + m) + 1, t - n)
            if t - n - 1 >= 0:
                term += poch_ratio(n + 1, m - 1) * poch_ratio(a * (n + m) + 1, t - n - 1)
            term *= (-1) ** m * x ** (m + n)
            total += term
            if m > 20 and abs(term) < mpmath.mpf(10) ** -40:
                break
            m += 1
        return float(total)


@pytest.mark.parametrize("alpha, xi", [(0.6, 0.5), (0.35, 0.8), (1.0, 0.3)])
def test_fractional_bernoulli_explicit(alpha, xi):
    T = 12
    phi = counting.pdtp_state_panel(PdtpParams(alpha, 1.0, xi), T, T).phi
    for n in range(0, 6):
        for t in range(T + 1):
            assert abs(phi[n, t] - _fractional_bernoulli_oracle(alpha, xi, n, t)) <= 1e-9


@given(params_st)
def test_memory_initial_value(p):
    k = counting.memory_kernels(p, 20)
    assert k.M[0] == pytest.approx((1 + p.xi) ** p.nu / p.xi**p.nu, rel=1e-12)
    assert np.allclose(k.M.coeffs[1:], k.K0.coeffs[1:] - 1, atol=1e-15)


def test_memory_bernoulli_is_delta():
    xi = 1.7
    M = counting.memory_kernels(PdtpParams(1, 1, xi), 30).M.coeffs
    assert M[0] == pytest.approx((xi + 1) / xi, rel=1e-15)
    assert np.abs(M[1:]).max() <= 1e-15


@pytest.mark.parametrize("alpha, xi", [(0.3, 0.5), (0.6, 2.0), (0.9, 1.0)])
def test_memory_fractional_bernoulli(alpha, xi):
    T = 60
    M = counting.memory_kernels(PdtpParams(alpha, 1, xi), T).M.coeffs
    want = gfcalc.frac_diff_coeffs(alpha - 1, T + 1).coeffs / xi
    want[0] += 1.0
    assert np.allclose(M, want, atol=1e-13)


def test_memory_kernel_relations():
    p = PdtpParams(0.6, 1.742, 0.8)
    T = 50
    k = counting.memory_kernels(p, T)
    order = math.ceil(p.alpha * p.nu)
    K0_from_B = gfcalc.convolve(gfcalc.frac_diff_coeffs(order - 1, T + 1), k.B).coeffs / p.xi**p.nu
    assert np.allclose(K0_from_B, k.K0.coeffs, atol=1e-12)


@pytest.mark.parametrize("alpha, nu, xi", [(0.6, 1.5, 0.5), (0.3, 2.5, 0.9), (0.6, 2.0, 3.0), (1.0, 1.0, 0.4)])
def test_B_series_matches_series_arithmetic(alpha, nu, xi):
    p = PdtpParams(alpha, nu, xi)
    T = 40
    assert np.allclose(counting.memory_kernel_B_series(p, T).coeffs, counting.memory_kernels(p, T).B.coeffs, atol=1e-10)


def test_B_series_domain():
    with pytest.raises(BranchDomainError):
        counting.memory_kernel_B_series(PdtpParams(0.6, 1.5, 2.0), 10)


@pytest.mark.parametrize("alpha, nu", [(0.6, 5.0), (0.5, 2.0), (1.0, 3.0)])
def test_integer_alpha_nu_uses_exact_ceiling(alpha, nu):
    # alpha*nu is an integer (0.6*5 = 3.0000000000000004 in floats): the lift
    # order must be that integer, so B = xi^nu (1-u)^-order D and B's series
    # has no fractional shift
    p = PdtpParams(alpha, nu, 0.5)
    order = round(alpha * nu)
    assert counting._ceil_int(alpha * nu) == order
    T = 20
    k = counting.memory_kernels(p, T)
    want = p.xi**nu * gfcalc.convolve(gfcalc.frac_diff_coeffs(-order, T + 1), k.D).coeffs
    assert np.allclose(k.B.coeffs, want, atol=1e-12)
    assert np.allclose(counting.memory_kernel_B_series(p, T).coeffs, k.B.coeffs, atol=1e-9)


def test_kf_bernoulli_recursion():
    xi = 0.8
    p = PdtpParams(1, 1, xi)
    phi = counting.pdtp_state_panel(p, 30, 30).phi
    for n in range(1, 31):
        lhs = phi[n, 1:]
        rhs = (phi[n, :-1] + xi * phi[n - 1, :-1]) / (xi + 1)
        assert np.allclose(lhs, rhs, atol=1e-15)


def test_kf_fractional_bernoulli_form():
    # nu = 1: ((1-u)^alpha phi_n)(t) = xi (phi_{n-1}(t-1) - phi_n(t))
    #   + delta_n0 (xi delta_t0 + (1-u)^(alpha-1)(t))
    alpha, xi, T = 0.45, 1.3, 60
    phi = counting.pdtp_state_panel(PdtpParams(alpha, 1, xi), T, T).phi
    fd = gfcalc.frac_diff_coeffs(alpha, T + 1).coeffs
    for n in range(0, 8):
        lhs = np.convolve(fd, phi[n])[: T + 1]
        rhs = -xi * phi[n]
        if n:
            rhs[1:] += xi * phi[n - 1, :-1]
        else:
            rhs += gfcalc.frac_diff_coeffs(alpha - 1, T + 1).coeffs
            rhs[0] += xi
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_expected_arrivals_examples():
    for xi in (0.5, 1.0, 3.0):
        p = PdtpParams(1, 1, xi)
        for method in ("renewal", "sum"):
            got = counting.expected_arrivals(p, 64, method).coeffs
            assert np.abs(got - p.p * np.arange(65)).max() <= 1e-12
    p = PdtpParams(0.6, 1.5, 0.8)
    T = 50
    got = counting.expected_arrivals(p, T).coeffs
    phi = counting.pdtp_state_panel(p, T, T).phi
    assert got[0] == 0
    assert got[T] == pytest.approx((np.arange(T + 1) * phi[:, T]).sum(), abs=1e-9)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("nu", NUS)
def test_expected_arrivals_grid(alpha, nu):
    for xi in XIS:
        p = PdtpParams(alpha, nu, xi)
        T = 64
        phi = counting.pdtp_state_panel(p, T, T).phi
        want = np.arange(T + 1) @ phi
        assert np.abs(counting.expected_arrivals(p, T).coeffs - want).max() <= 1e-9
        assert np.abs(counting.expected_arrivals(p, T, "sum").coeffs - want).max() <= 1e-9


def test_tail_exponent():
    t = np.arange(10_001, dtype=float)
    seq = np.zeros_like(t)
    seq[1:] = t[1:] ** -1.6
    assert counting.tail_exponent(seq, 100, 10_000) == pytest.approx(-1.6, abs=1e-6)
    seq[500] = 0.0
    with pytest.raises(NonPositiveSampleError):
        counting.tail_exponent(seq, 100, 10_000)


def test_sibuya_examples():
    w = counting.sibuya_pmf(0.5, 10).coeffs
    assert w[1] == 0.5 and w[2] == 0.125
    for a in (0.2, 0.7):
        want = -gfcalc.frac_diff_coeffs(a, 30).coeffs
        want[0] = 0
        assert np.allclose(counting.sibuya_pmf(a, 29).coeffs, want, atol=0)
    s = counting.sibuya_survival(0.5, 10).coeffs
    assert s[0] == 1 and s[1] == 0.5


@given(st.floats(0.05, 0.99))
def test_sibuya_survival_gamma_ratio(alpha):
    T = 300
    t = np.arange(T + 1, dtype=float)
    want = np.exp(gammaln(t + 1 - alpha) - gammaln(t + 1) - gammaln(1 - alpha))
    got = counting.sibuya_survival(alpha, T).coeffs
    assert np.allclose(got, want, rtol=1e-11, atol=0)
    w = counting.sibuya_pmf(alpha, T).coeffs
    assert np.allclose(w[1:], got[:-1] - got[1:], atol=1e-15)


def test_sibuya_state_panel():
    a = 0.5
    panel = counting.sibuya_state_panel(a, 10, 30).phi
    assert np.array_equal(panel[0], counting.sibuya_survival(a, 30).coeffs)
    for n in range(1, 11):
        assert np.all(panel[n, :n] == 0)
    assert panel[1, 1] == pytest.approx(0.5, abs=1e-16)
    full = counting.sibuya_state_panel(a, 30, 30).phi
    assert np.abs(full.sum(axis=0) - 1).max() <= 1e-12


def test_sibuya_hitting():
    a = 0.37
    tau = counting.sibuya_hitting(a, 100)
    assert tau[0] == 1
    assert counting.sibuya_hitting(0.5, 1)[1] == pytest.approx(0.5, abs=1e-15)
    with mpmath.workdps(40):
        want = np.array([float(mpmath.rf(a, r) / mpmath.factorial(r)) for r in range(101)])
    assert np.allclose(tau, want, rtol=1e-12, atol=0)


@pytest.mark.parametrize("alpha", [0.6, 0.8])
def test_sibuya_tails(alpha):
    T = 10_000
    assert counting.tail_exponent(counting.sibuya_survival(alpha, T), 100, T) == pytest.approx(-alpha, abs=0.05)


def test_generalized_waiting():
    p = PdtpParams(0.6, 1.3, 0.9)
    T = 40
    one = np.zeros(T + 1)
    one[1] = 1
    assert np.allclose(counting.generalized_waiting_pmf(one, p, T).coeffs, counting.pdtp_waiting_pmf(p, T).coeffs, atol=0)
    f = counting.sibuya_pmf(0.3, T)
    got = counting.generalized_waiting_pmf(f, p, T).coeffs
    assert got[0] == 0
    with pytest.raises(FNotStrictError):
        counting.generalized_waiting_pmf([0.5, 0.5], p, T)


def test_generalized_two_routes():
    # f = Sibuya(alpha): the compound route and the direct product agree
    alpha, nu, xi, T = 0.55, 1.4, 1.2, 80
    p = PdtpParams(alpha, nu, xi)
    direct = counting.generalized_waiting_pmf(counting.sibuya_pmf(alpha, T), p, T).coeffs
    composed = gfcalc.compose_counts(counting.negative_binomial_steps(nu, xi, T), counting.sibuya_pmf(alpha, T)).coeffs
    assert np.allclose(direct, composed, atol=1e-13)
