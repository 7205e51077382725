"""Waiting times of the discrete-time renewal process: pmf, survival and tails."""

from __future__ import annotations

import numpy as np

from dtrenewal import counting
from dtrenewal.counting import PdtpParams

# memoryless case first: alpha = nu = 1 gives a geometric waiting time
p = PdtpParams(alpha=1.0, nu=1.0, xi=1.0)
print("geometric pmf:", counting.pdtp_waiting_pmf(p, 6).coeffs)

# a fat-tailed case
p = PdtpParams(alpha=0.6, nu=1.5, xi=1.0)
T = 10_000
theta = counting.pdtp_waiting_pmf(p, T)
surv = counting.pdtp_survival(p, T)
print("theta(1..5):", theta.coeffs[1:6])
print("mass captured up to T:", theta.coeffs.sum(), " survival at T:", surv.coeffs[-1])

# log-log slopes over [100, T]: about -(alpha + 1) and -alpha
print("pmf slope:", counting.tail_exponent(theta, 100, T))
print("survival slope:", counting.tail_exponent(surv, 100, T))

# the closed-form expansions in xi and 1/xi reproduce the same numbers
for xi, branch in [(0.4, "small_xi"), (2.5, "large_xi")]:
    q = PdtpParams(0.6, 1.5, xi)
    diff = np.abs(counting.pdtp_waiting_pmf_branch(q, 32, branch).coeffs - counting.pdtp_waiting_pmf(q, 32).coeffs)
    print(f"xi={xi}: {branch} vs series arithmetic, max diff {diff.max():.1e}")

# Sibuya steps: w(1) = alpha, heavy tail with exponent -alpha for the survival
w = counting.sibuya_pmf(0.5, 8).coeffs
print("Sibuya(0.5) pmf:", w)
print("expected visits per node on the increasing line:", counting.sibuya_hitting(0.5, 5))
