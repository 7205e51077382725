"""Seeded Monte Carlo for the counting processes and graph walks.

Random numbers come from numpy's Philox4x32-10 counter-based generator.
Paths are processed in fixed-size chunks; chunk k draws from the stream
seeded by SeedSequence([seed, k]), so results do not depend on how chunks are
scheduled and are identical across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import counting, graph
from .counting import PdtpParams
from .errors import InvalidParamsError, TailCapExceededError
from .gfcalc import CausalSeq

CHUNK_PATHS = 10_000
# PDTP tables cost O(T^2) to build, so growth stops at 2**14 entries by default
DEFAULT_TABLE_CAP = 1 << 14


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n_paths: int
    T: int
    table_cap: int = DEFAULT_TABLE_CAP

    def __post_init__(self):
        if self.n_paths < 1:
            raise InvalidParamsError("n_paths must be >= 1")
        if self.T < 1:
            raise InvalidParamsError("horizon T must be >= 1")
        if self.table_cap < self.T:
            raise InvalidParamsError("table_cap must be >= T")


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def _chunks(n_paths: int):
    start = 0
    k = 0
    while start < n_paths:
        size = min(CHUNK_PATHS, n_paths - start)
        yield k, start, size
        start += size
        k += 1


class WaitingSampler:
    """Inverse-CDF sampler over a tabulated waiting-time pmf.

    If a uniform draw lands beyond the tabulated mass the table is rebuilt at
    twice the length via ``extend(new_length)``, up to ``table_cap`` entries.
    Without ``extend`` the table is fixed and overflowing draws raise.
    """

    def __init__(
        self,
        pmf: CausalSeq,
        extend: Optional[Callable[[int], CausalSeq]] = None,
        table_cap: int = DEFAULT_TABLE_CAP,
    ):
        coeffs = pmf.coeffs if isinstance(pmf, CausalSeq) else np.asarray(pmf, dtype=float)
        if coeffs[0] != 0:
            raise InvalidParamsError("waiting-time pmf must vanish at 0")
        self._extend = extend
        self.table_cap = table_cap
        self._set_table(coeffs)

    def _set_table(self, coeffs: np.ndarray) -> None:
        self.pmf = np.clip(coeffs, 0.0, None)
        self.cdf = np.cumsum(self.pmf)

    def _grow(self, needed: float) -> None:
        while self.cdf[-1] <= needed:
            if self._extend is None or self.pmf.size >= self.table_cap:
                raise TailCapExceededError(
                    f"draw {needed:.17g} exceeds tabulated mass {self.cdf[-1]:.17g} at length {self.pmf.size}"
                )
            size = min(2 * self.pmf.size, self.table_cap)
            self._set_table(self._extend(size - 1).coeffs)

    def lookup(self, u: np.ndarray, censor: Optional[int] = None) -> np.ndarray:
        """Map uniforms to waiting times. With ``censor`` set, any wait longer
        than ``censor`` is returned as censor + 1 and the table is never grown."""
        u = np.asarray(u, dtype=float)
        if censor is not None:
            cdf = self.cdf[: censor + 1]
            k = np.searchsorted(cdf, u, side="right")
            return np.minimum(k, censor + 1)
        if u.size and u.max() >= self.cdf[-1]:
            self._grow(float(u.max()))
        return np.searchsorted(self.cdf, u, side="right")

    def sample(self, rng: np.random.Generator, size=None, censor: Optional[int] = None):
        u = rng.random(size)
        out = self.lookup(np.atleast_1d(u), censor=censor)
        return int(out[0]) if size is None else out


def sample_waiting(
    pmf: CausalSeq,
    rng: np.random.Generator,
    size=None,
    extend=None,
    table_cap: int = DEFAULT_TABLE_CAP,
    censor: Optional[int] = None,
):
    """Draw waiting times (integers >= 1) from ``pmf`` by inverse CDF.

    ``censor`` reports every wait longer than ``censor`` as censor + 1, which
    suffices whenever only a finite horizon matters.
    """
    return WaitingSampler(pmf, extend, table_cap).sample(rng, size, censor)


def pdtp_sampler(params: PdtpParams, T: int, table_cap: int = DEFAULT_TABLE_CAP) -> WaitingSampler:
    return WaitingSampler(
        counting.pdtp_waiting_pmf(params, T),
        extend=lambda n: counting.pdtp_waiting_pmf(params, n),
        table_cap=table_cap,
    )


def _arrival_counts(sampler: WaitingSampler, rng: np.random.Generator, n_paths: int, T: int) -> np.ndarray:
    """counts[path, t] = number of arrivals in [0, t].

    Arrival times past the horizon are irrelevant, so waits are censored at
    the remaining time and the table only needs to reach T.
    """
    counts = np.zeros((n_paths, T + 1), dtype=np.int32)
    clock = np.zeros(n_paths, dtype=np.int64)
    alive = np.ones(n_paths, dtype=bool)
    while alive.any():
        idx = np.nonzero(alive)[0]
        wait = sampler.lookup(rng.random(idx.size), censor=T)
        clock[idx] += wait
        landed = clock[idx] <= T
        hit = idx[landed]
        # an arrival at time s raises the count for every t >= s
        np.add.at(counts, (hit, clock[hit]), 1)
        alive[idx[~landed]] = False
    return np.cumsum(counts, axis=1, dtype=np.int32)


@dataclass(frozen=True)
class EmpiricalPanel:
    """Empirical frequencies with binomial standard errors."""

    freq: np.ndarray
    stderr: np.ndarray
    n_paths: int
    mean: Optional[np.ndarray] = None
    mean_stderr: Optional[np.ndarray] = None


def _binomial(freq: np.ndarray, n: int) -> np.ndarray:
    return np.sqrt(np.clip(freq * (1 - freq), 0.0, None) / n)


def simulate_states(params: PdtpParams, cfg: SimConfig, N: Optional[int] = None) -> EmpiricalPanel:
    """Empirical probabilities of n arrivals by time t, n = 0..N, t = 0..T."""
    T = cfg.T
    N = T if N is None else min(N, T)
    sampler = pdtp_sampler(params, T, cfg.table_cap)
    hist = np.zeros((N + 1, T + 1))
    s1 = np.zeros(T + 1)
    s2 = np.zeros(T + 1)
    for k, _, size in _chunks(cfg.n_paths):
        rng = make_rng(cfg.seed, k)
        counts = _arrival_counts(sampler, rng, size, T)
        for n in range(N + 1):
            hist[n] += (counts == n).sum(axis=0)
        s1 += counts.sum(axis=0)
        s2 += (counts.astype(float) ** 2).sum(axis=0)
    freq = hist / cfg.n_paths
    mean = s1 / cfg.n_paths
    var = np.clip(s2 / cfg.n_paths - mean**2, 0.0, None)
    return EmpiricalPanel(freq, _binomial(freq, cfg.n_paths), cfg.n_paths, mean, np.sqrt(var / cfg.n_paths))


def simulate_walk(params: PdtpParams, g: graph.Graph, cfg: SimConfig, start: int = 0) -> EmpiricalPanel:
    """Empirical occupation freq[t, j] of a walker started at node ``start``.

    Each arrival of the counting process moves the walker to a uniformly
    chosen neighbour (a draw from row i of H).
    """
    T = cfg.T
    graph.transition_matrix(g)  # connectivity check
    A = g.adjacency
    deg = A.sum(axis=1).astype(int)
    nbr = np.full((g.n_nodes, deg.max()), -1, dtype=np.int64)
    for i in range(g.n_nodes):
        js = np.nonzero(A[i])[0]
        nbr[i, : js.size] = js
    sampler = pdtp_sampler(params, T, cfg.table_cap)
    occ = np.zeros((T + 1, g.n_nodes))
    for k, _, size in _chunks(cfg.n_paths):
        rng = make_rng(cfg.seed, k)
        counts = _arrival_counts(sampler, rng, size, T)
        n_steps = int(counts[:, -1].max())
        chain = np.empty((size, n_steps + 1), dtype=np.int64)
        chain[:, 0] = start
        for s in range(1, n_steps + 1):
            here = chain[:, s - 1]
            pick = (rng.random(size) * deg[here]).astype(np.int64)
            chain[:, s] = nbr[here, pick]
        pos = np.take_along_axis(chain, counts.astype(np.int64), axis=1)  # (size, T+1)
        for j in range(g.n_nodes):
            occ[:, j] += (pos == j).sum(axis=0)
    freq = occ / cfg.n_paths
    return EmpiricalPanel(freq, _binomial(freq, cfg.n_paths), cfg.n_paths)


def band_pass_fraction(empirical: np.ndarray, analytic: np.ndarray, n_paths: int, k_sigma: float = 4.0) -> float:
    """Fraction of cells with |empirical - analytic| <= k sigma, sigma from
    the analytic probability. Cells with zero analytic probability pass only
    if nothing was observed."""
    analytic = np.asarray(analytic, dtype=float)
    sigma = np.sqrt(np.clip(analytic * (1 - analytic), 0.0, None) / n_paths)
    ok = np.abs(np.asarray(empirical) - analytic) <= k_sigma * sigma + 1e-15
    return float(ok.mean())
