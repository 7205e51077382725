"""State probabilities, memory kernels and the continuous-time limit."""

from __future__ import annotations

import numpy as np
from scipy.special import comb

from dtrenewal import counting, ctlimit
from dtrenewal.counting import PdtpParams
from dtrenewal.ctlimit import CtParams
from dtrenewal.numkernel import mittag_leffler

# Bernoulli sanity check against the binomial law
p = PdtpParams(1.0, 1.0, xi=3.0)
phi = counting.pdtp_state_panel(p, 10, 10).phi
t = np.arange(11)
print("binomial max error:", max(np.abs(phi[n] - comb(t, n) * p.p**n * p.q ** (t - n)).max() for n in range(11)))

# a general process: columns sum to one, and the difference equation holds
p = PdtpParams(0.6, 1.742, xi=0.8)
panel = counting.pdtp_state_panel(p, 128, 128)
print("normalization error:", np.abs(panel.phi.sum(axis=0) - 1).max())
print("KF residual:", np.abs(counting.kf_residual(p, panel)).max())

k = counting.memory_kernels(p, 6)
print("memory function M(0..6):", k.M.coeffs)

mean = counting.expected_arrivals(p, 10_000)
print("mean arrivals at t = 10^4:", mean.coeffs[-1], " slope:", counting.tail_exponent(mean, 100, 10_000))

# shrinking the grid spacing with xi = xi0 h^alpha approaches the
# continuous-time survival E_alpha(-xi0 t^alpha)
ct = CtParams(0.6, 1.0, 1.0)
print("E_0.6(-1) =", mittag_leffler(0.6, -1.0).value)
for row in ctlimit.convergence_study(ct, [1.0], [2.0**-k for k in range(7)]):
    print(f"h={row.h:<10g} xi={row.xi:.5f} state err={row.state_error:.2e} density err={row.density_error:.2e}")
