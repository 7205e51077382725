"""Random walks on graphs stepped by the renewal process."""

from __future__ import annotations

import numpy as np

from dtrenewal import counting, dtrw, graph
from dtrenewal.counting import PdtpParams

g = graph.erdos_renyi(30, 0.2, seed=7)
H, _ = graph.transition_matrix(g)
spec = graph.spectral_decompose(H, g.degrees)
print("second largest |eigenvalue|:", np.abs(spec.eigenvalues[1:]).max())

p = PdtpParams(0.6, 1.5, 1.0)
T = 128

# the same transition matrices two ways: powers of H, and one scalar
# series per eigenvalue
cox = dtrw.cox_transition(counting.pdtp_state_panel(p, T, T), spec, T, H)
spc = dtrw.spectral_transition(p, spec, T)
print("Cox vs spectral:", np.abs(cox.matrices - spc.matrices).max())
print("row sums:", np.abs(cox.matrices.sum(axis=2) - 1).max())
print("KF residual:", dtrw.kf_walk_residual(cox, counting.memory_kernels(p, T), H).max())

# slow power-law approach to the stationary distribution
long = dtrw.spectral_transition(p, spec, 10_000)
res = dtrw.stationary_approach(long, spec, 100, 10_000)
print("distance slope:", res.slope, " distance / predicted at T:", res.distance[-1] / res.predicted[-1])

# a start that is not a single node: eps = 1 is the identity,
# small eps is already close to stationary
k5 = graph.complete_graph(5)
H5, _ = graph.transition_matrix(k5)
spec5 = graph.spectral_decompose(H5, k5.degrees)
for eps in (1.0, 0.1, 1e-3):
    P0 = dtrw.initial_defect(spec5, eps)
    print(f"eps={eps:g}: distance to stationary {np.abs(P0 - spec5.projector).max():.2e}")
