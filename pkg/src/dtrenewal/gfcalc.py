"""Truncated power series on a time grid.

A :class:`CausalSeq` holds the coefficients c_0..c_T of a generating function
sum_t c_t u^t. Multiplying generating functions is causal convolution, and a
factor of ``u`` is a shift by one step, so the usual operator calculus on
sequences reduces to array arithmetic here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InnerNotStrictError, InvalidParamsError, StepMismatchError, ZeroConstantTermError

KINDS = ("pmf", "cumulative", "kernel", "signed")


@dataclass(frozen=True)
class CausalSeq:
    coeffs: np.ndarray
    step_h: float = 1.0
    kind: str = "signed"

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidParamsError("coeffs must be a non-empty 1-d array")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        if not self.step_h > 0:
            raise InvalidParamsError("step_h must be positive")
        if self.kind not in KINDS:
            raise InvalidParamsError(f"unknown kind {self.kind!r}")
        if self.kind == "pmf":
            if np.any(arr < -1e-12):
                raise InvalidParamsError("pmf has negative entries")
            if np.sum(arr) > 1 + 1e-10:
                raise InvalidParamsError("pmf mass exceeds one")

    @property
    def horizon(self) -> int:
        """Largest stored index T."""
        return self.coeffs.size - 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, t):
        return self.coeffs[t]

    def with_kind(self, kind: str) -> "CausalSeq":
        return CausalSeq(self.coeffs, self.step_h, kind)


def _as_seq(a) -> CausalSeq:
    return a if isinstance(a, CausalSeq) else CausalSeq(np.asarray(a, dtype=float))


def delta(length: int, step_h: float = 1.0) -> CausalSeq:
    """Unit sequence (1, 0, 0, ...)."""
    out = np.zeros(length)
    out[0] = 1.0
    return CausalSeq(out, step_h, "pmf")


def shift(a, k: int = 1) -> CausalSeq:
    """Multiply by u^k, keeping the length."""
    a = _as_seq(a)
    out = np.zeros_like(a.coeffs)
    if k < len(a):
        out[k:] = a.coeffs[: len(a) - k]
    return CausalSeq(out, a.step_h, a.kind)


def _conv(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(x[:n], y[:n])[:n]


def convolve(a, b) -> CausalSeq:
    """Causal convolution, truncated to the shorter length."""
    a, b = _as_seq(a), _as_seq(b)
    if a.step_h != b.step_h:
        raise StepMismatchError(f"step {a.step_h} vs {b.step_h}")
    n = min(len(a), len(b))
    kind = "pmf" if a.kind == b.kind == "pmf" else "signed"
    return CausalSeq(_conv(a.coeffs, b.coeffs, n), a.step_h, kind)


def conv_power(a, n: int) -> CausalSeq:
    """n-th convolution power by repeated squaring; n = 0 gives delta."""
    a = _as_seq(a)
    if n < 0:
        raise InvalidParamsError("conv_power needs n >= 0")
    size = len(a)
    result = np.zeros(size)
    result[0] = 1.0
    base = a.coeffs.copy()
    while n:
        if n & 1:
            result = _conv(result, base, size)
        n >>= 1
        if n:
            base = _conv(base, base, size)
    return CausalSeq(result, a.step_h, a.kind if a.kind == "pmf" else "signed")


def compose_counts(count_pmf, inner) -> CausalSeq:
    """Waiting-time pmf of a compound step: sum_n count(n) (inner*)^n.

    ``count_pmf[n]`` is the probability of n inner steps (index 0 ignored).
    Because ``inner[0] == 0`` the n-th power vanishes below t = n, so the
    sum stops at n = T without approximation.
    """
    count_pmf, inner = _as_seq(count_pmf), _as_seq(inner)
    if inner.coeffs[0] != 0:
        raise InnerNotStrictError("inner sequence must vanish at t = 0")
    size = len(inner)
    c = np.zeros(size)
    k = min(len(count_pmf), size)
    c[:k] = count_pmf.coeffs[:k]
    c[0] = 0.0
    # Horner in the inner generating function
    acc = np.zeros(size)
    for n in range(size - 1, 0, -1):
        acc = _conv(acc, inner.coeffs, size)
        acc[0] += c[n]
    acc = _conv(acc, inner.coeffs, size)
    return CausalSeq(acc, inner.step_h, "pmf")


def power_table(a: np.ndarray, gammas) -> np.ndarray:
    """Coefficients of A(u)**gamma for every gamma at once.

    Uses the J.C.P. Miller recurrence
    b_k = (1 / (k a_0)) sum_{j=1..k} (gamma j - (k - j)) a_j b_{k-j},
    vectorized across the gamma axis. Returns shape (len(gammas), len(a)).
    """
    a = np.asarray(a, dtype=float)
    g = np.atleast_1d(np.asarray(gammas, dtype=float))
    a0 = a[0]
    if a0 == 0:
        raise ZeroConstantTermError("series_pow needs a nonzero constant term")
    if a0 < 0 and np.any(g != np.round(g)):
        raise InvalidParamsError("non-integer power of a series with negative constant term")
    size = a.size
    b = np.zeros((g.size, size))
    b[:, 0] = a0**g
    for k in range(1, size):
        j = np.arange(1, k + 1)
        w = a[j]  # a_j
        prev = b[:, k - j]  # b_{k-j}
        b[:, k] = ((g[:, None] * j - (k - j)) * w * prev).sum(axis=1) / (k * a0)
    return b


def series_pow(a, gamma: float) -> CausalSeq:
    """Coefficients of A(u)**gamma, exact to truncation order."""
    a = _as_seq(a)
    if a.coeffs[0] == 0:
        raise ZeroConstantTermError("series_pow needs a nonzero constant term")
    return CausalSeq(power_table(a.coeffs, [gamma])[0], a.step_h, "signed")


def reciprocal(a) -> CausalSeq:
    """Coefficients of 1/A(u) by forward substitution."""
    a = _as_seq(a)
    x = a.coeffs
    if x[0] == 0:
        raise ZeroConstantTermError("reciprocal needs a nonzero constant term")
    out = np.zeros_like(x)
    out[0] = 1.0 / x[0]
    for k in range(1, x.size):
        out[k] = -np.dot(x[1 : k + 1], out[k - 1 :: -1]) / x[0]
    return CausalSeq(out, a.step_h, "signed")


def frac_diff_coeffs(mu: float, length: int) -> CausalSeq:
    """Coefficients (-1)^k C(mu, k) of (1 - u)^mu.

    Negative ``mu`` gives fractional-sum weights; mu = -1 is the running sum.
    """
    if length < 1:
        raise InvalidParamsError("length must be >= 1")
    k = np.arange(1, length)
    out = np.empty(length)
    out[0] = 1.0
    out[1:] = np.cumprod((k - 1 - mu) / k)
    return CausalSeq(out, 1.0, "kernel")


def cumulate(a) -> CausalSeq:
    """Running sums G(t) = sum_{k<=t} a(k)."""
    a = _as_seq(a)
    return CausalSeq(np.cumsum(a.coeffs), a.step_h, "cumulative")


def resolvent(a, lam: float = 1.0) -> CausalSeq:
    """Coefficients of 1 / (1 - lam * A(u)).

    With A a waiting-time pmf and lam = 1 this is the renewal density; every
    term of the recurrence is non-negative then, so it is free of cancellation.
    """
    a = _as_seq(a)
    x = a.coeffs
    denom = 1.0 - lam * x[0]
    if denom == 0:
        raise ZeroConstantTermError("1 - lam * a(0) vanishes")
    out = np.zeros_like(x)
    out[0] = 1.0 / denom
    for k in range(1, x.size):
        out[k] = lam * np.dot(x[1 : k + 1], out[k - 1 :: -1]) / denom
    return CausalSeq(out, a.step_h, "signed")
