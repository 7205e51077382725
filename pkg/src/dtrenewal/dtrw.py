"""Random walks on graphs whose steps are triggered by a discrete-time
renewal process.

The transition matrix after t time steps is the Cox series

    P(t) = sum_{n=0..t} H^n phi_n(t),

with H the one-step matrix of the graph and phi_n(t) the state probabilities
of the counting process. In the eigenbasis of H this becomes
P(t) = sum_m G(t, lambda_m) |v_m><vbar_m|.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gamma as gamma_fn

from . import counting, gfcalc
from .counting import MemoryKernels, PdtpParams, StatePanel
from .ctlimit import CtParams
from .errors import DimMismatchError, HorizonShortError, InvalidParamsError, UnsupportedParamsError
from .gfcalc import CausalSeq
from .graph import SpectralDecomposition
from .numkernel import mittag_leffler


@dataclass(frozen=True)
class WalkPanel:
    """matrices[t] is the N x N transition matrix after t steps."""

    matrices: np.ndarray
    params: Union[PdtpParams, float, None] = None

    def __post_init__(self):
        arr = np.array(self.matrices, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise InvalidParamsError("walk matrices must have shape (T+1, N, N)")
        arr.setflags(write=False)
        object.__setattr__(self, "matrices", arr)

    @property
    def horizon(self) -> int:
        return self.matrices.shape[0] - 1

    @property
    def n_nodes(self) -> int:
        return self.matrices.shape[1]


def _H_of(spec: SpectralDecomposition, H: Optional[np.ndarray]) -> np.ndarray:
    return spec.rebuild(spec.eigenvalues) if H is None else np.asarray(H, dtype=float)


def _matrix_powers(H: np.ndarray, n_max: int) -> np.ndarray:
    out = np.empty((n_max + 1,) + H.shape)
    out[0] = np.eye(H.shape[0])
    for n in range(1, n_max + 1):
        out[n] = out[n - 1] @ H
    return out


def cox_transition(
    panel: StatePanel,
    spec: SpectralDecomposition,
    T: int,
    H: Optional[np.ndarray] = None,
) -> WalkPanel:
    """Cox series sum_n H^n phi_n(t) for t = 0..T, using explicit powers of H."""
    if panel.horizon < T or panel.n_max < T:
        raise HorizonShortError(f"panel covers n<={panel.n_max}, t<={panel.horizon}; need {T}")
    Hm = _H_of(spec, H)
    powers = _matrix_powers(Hm, T)
    P = np.einsum("nt,nij->tij", panel.phi[: T + 1, : T + 1], powers)
    return WalkPanel(P, panel.params)


def scalar_G(params: PdtpParams, lam: float, T: int) -> CausalSeq:
    """Coefficients of M(u) / (D(u) - lam u) for one eigenvalue lam.

    Since D(u) phi(u) = 1 this equals S(u) / (1 - lam u phi(u)) with S the
    survival generating function, and that form is what gets evaluated: the
    recurrence for 1 / (1 - lam theta) has bounded terms for |lam| <= 1.
    """
    if not -1.0 <= lam <= 1.0:
        raise InvalidParamsError("eigenvalue must lie in [-1, 1]")
    return _scalar_G_many(params, [lam], T)[0]


def _scalar_G_many(params: PdtpParams, lams, T: int) -> list[CausalSeq]:
    T = int(T)
    theta = counting.pdtp_waiting_pmf(params, max(T, 1)).coeffs[: T + 1]
    surv = 1.0 - np.cumsum(theta)
    out = []
    for lam in lams:
        r = gfcalc.resolvent(theta, float(lam)).coeffs
        out.append(CausalSeq(np.convolve(surv, r)[: T + 1], params.h, "signed"))
    return out


def spectral_transition(params: PdtpParams, spec: SpectralDecomposition, T: int) -> WalkPanel:
    """P(t) = sum_m G(t, lambda_m) |v_m><vbar_m|, t = 0..T."""
    lam = spec.eigenvalues
    # equal eigenvalues share one scalar series
    keys = np.round(lam, 12)
    uniq, inverse = np.unique(keys, return_inverse=True)
    series = _scalar_G_many(params, [lam[np.argmax(keys == u)] for u in uniq], T)
    weights = np.stack([series[k].coeffs for k in inverse], axis=1)  # (T+1, N)
    return WalkPanel(spec.rebuild(weights), params)


def _time_convolve(kernel: np.ndarray, P: np.ndarray) -> np.ndarray:
    """(kernel * P)(t) along the time axis for a stack of matrices."""
    T = P.shape[0] - 1
    idx = np.arange(T + 1)
    lag = idx[:, None] - idx[None, :]
    toeplitz = np.where(lag >= 0, kernel[np.clip(lag, 0, None)], 0.0)
    return np.tensordot(toeplitz, P, axes=1)


def kf_walk_residual(walk: WalkPanel, kernels: MemoryKernels, H: np.ndarray) -> np.ndarray:
    """Max-norm of (D * P)(t) - M(t) I - H P(t-1) for every t."""
    T = walk.horizon
    if kernels.horizon < T:
        raise DimMismatchError(f"kernel horizon {kernels.horizon} < walk horizon {T}")
    P = walk.matrices
    I = np.eye(walk.n_nodes)
    R = _time_convolve(kernels.D.coeffs[: T + 1], P)
    R -= kernels.M.coeffs[: T + 1, None, None] * I
    R[1:] -= np.einsum("ij,tjk->tik", H, P[:-1])
    return np.abs(R).max(axis=(1, 2))


@dataclass(frozen=True)
class StationaryApproach:
    distance: np.ndarray
    slope: Optional[float]
    predicted: Optional[np.ndarray]


def stationary_approach(
    walk: WalkPanel,
    spec: SpectralDecomposition,
    t_min: int = 100,
    t_max: Optional[int] = None,
) -> StationaryApproach:
    """Distance max|P(t) - |v_1><vbar_1|| and its log-log slope.

    For alpha < 1 the predicted leading term
    (nu/xi) t^-alpha / Gamma(1-alpha) * sum_{m>=2} |v_m><vbar_m| / (1-lambda_m)
    is returned in max-norm for comparison.
    """
    P = walk.matrices
    dist = np.abs(P - spec.projector).max(axis=(1, 2))
    T = walk.horizon
    t_max = T if t_max is None else t_max
    slope = None
    if t_min < t_max <= T and np.all(dist[t_min : t_max + 1] > 0):
        slope = counting.tail_exponent(dist, t_min, t_max)
    predicted = None
    params = walk.params
    if isinstance(params, PdtpParams) and params.alpha < 1:
        w = np.zeros(spec.n)
        w[1:] = 1.0 / (1.0 - spec.eigenvalues[1:])
        amp = np.abs(spec.rebuild(w)).max() * params.nu / params.xi / gamma_fn(1 - params.alpha)
        t = np.arange(T + 1, dtype=float)
        with np.errstate(divide="ignore"):
            predicted = amp * t ** (-params.alpha)
    return StationaryApproach(dist, slope, predicted)


def bernoulli_walk(H: np.ndarray, xi: float, T: int) -> WalkPanel:
    """(p H + q I)^t for the memoryless case alpha = nu = 1."""
    p, q = xi / (1 + xi), 1 / (1 + xi)
    step = p * np.asarray(H, dtype=float) + q * np.eye(H.shape[0])
    return WalkPanel(_matrix_powers(step, T), PdtpParams(1.0, 1.0, xi))


# -- Sibuya walks ---------------------------------------------------------------

def sibuya_walk(alpha: float, spec: SpectralDecomposition, T: int, H: Optional[np.ndarray] = None) -> WalkPanel:
    """Cox series with Sibuya(alpha) waiting times."""
    if not 0 < alpha < 1:
        raise InvalidParamsError("Sibuya walk needs 0 < alpha < 1")
    panel = counting.sibuya_state_panel(alpha, T, T)
    walk = cox_transition(panel, spec, T, H)
    return WalkPanel(walk.matrices, alpha)


def sibuya_kf_residual(walk: WalkPanel, H: np.ndarray, alpha: float) -> np.ndarray:
    """Max-norm over t of
    ((1-u)^alpha * H P)(t) - (H - I) P(t) - I (-1)^t C(alpha-1, t)."""
    T = walk.horizon
    P = walk.matrices
    I = np.eye(walk.n_nodes)
    HP = np.einsum("ij,tjk->tik", H, P)
    R = _time_convolve(gfcalc.frac_diff_coeffs(alpha, T + 1).coeffs, HP)
    R -= np.einsum("ij,tjk->tik", H - I, P)
    R -= gfcalc.frac_diff_coeffs(alpha - 1.0, T + 1).coeffs[:, None, None] * I
    return np.abs(R).max(axis=(1, 2))


def sibuya_line_walk(alpha: float, L: int, T: int) -> WalkPanel:
    """Strictly increasing walk on nodes 0..L-1 with H_ij = delta_{i+1,j}:
    P_ij(t) is the probability of exactly j - i Sibuya steps by time t."""
    panel = counting.sibuya_state_panel(alpha, min(L - 1, T), T).phi
    P = np.zeros((T + 1, L, L))
    for i in range(L):
        for j in range(i, min(L, i + panel.shape[0])):
            P[:, i, j] = panel[j - i]
    return WalkPanel(P, alpha)


def sibuya_line_residual(walk: WalkPanel, alpha: float) -> np.ndarray:
    """Max-norm over t of
    ((1-u)^alpha P_{i+1,j})(t) - (-1)^t C(alpha-1,t) delta_ij - (P_{i+1,j} - P_ij)(t),
    taken over rows i = 0..L-2."""
    T = walk.horizon
    P = walk.matrices
    lower = P[:, 1:, :]  # P_{i+1, j}
    upper = P[:, :-1, :]  # P_{i, j}
    R = _time_convolve(gfcalc.frac_diff_coeffs(alpha, T + 1).coeffs, lower)
    delta = np.eye(walk.n_nodes)[:-1, :]
    R -= gfcalc.frac_diff_coeffs(alpha - 1.0, T + 1).coeffs[:, None, None] * delta
    R -= lower - upper
    return np.abs(R).max(axis=(1, 2))


# -- continuous-time limit and initial-condition defect ---------------------------

def ct_walk_limit(p: CtParams, spec: SpectralDecomposition, t_grid) -> np.ndarray:
    """Continuous-time transition matrices at the times in ``t_grid``.

    nu = 1 gives sum_m E_alpha(-xi0 (1 - lambda_m) t^alpha) |v_m><vbar_m|;
    for alpha = 1 this is exp(-xi0 t (I - H)). Other nu are not available in
    closed form.
    """
    if p.nu != 1:
        raise UnsupportedParamsError("closed-form continuous-time walk needs nu = 1")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    lam = spec.eigenvalues
    W = np.empty((t_grid.size, lam.size))
    for k, t in enumerate(t_grid):
        arg = -p.xi0 * (1.0 - lam) * t**p.alpha
        if p.alpha == 1:
            W[k] = np.exp(arg)
        else:
            W[k] = [1.0 if z == 0 else mittag_leffler(p.alpha, z).value for z in arg]
    return spec.rebuild(W)


def initial_defect(spec: SpectralDecomposition, eps: float) -> np.ndarray:
    """P(0) = |v_1><vbar_1| + eps sum_{m>=2} |v_m><vbar_m| / (1 - lambda_m (1 - eps)),
    i.e. sum_n eps (1-eps)^n H^n."""
    if not 0 < eps <= 1:
        raise InvalidParamsError("eps must lie in (0, 1]")
    lam = spec.eigenvalues
    w = eps / (1.0 - lam * (1.0 - eps))
    w[0] = 1.0
    return spec.rebuild(w)
