"""Undirected graphs, their random-walk transition matrix and its spectrum."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import BipartiteSpectrumError, DisconnectedError, InvalidParamsError

BIPARTITE_TOL = 1e-10


@dataclass(frozen=True)
class Graph:
    adjacency: np.ndarray

    def __post_init__(self):
        A = np.array(self.adjacency, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
            raise InvalidParamsError("adjacency must be a square matrix with at least 2 nodes")
        if not np.array_equal(A, A.T):
            raise InvalidParamsError("adjacency must be symmetric")
        if np.any(np.diag(A) != 0):
            raise InvalidParamsError("self-loops are not allowed")
        if not np.all((A == 0) | (A == 1)):
            raise InvalidParamsError("adjacency entries must be 0 or 1")
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def is_connected(self) -> bool:
        n_comp, _ = connected_components(self.adjacency, directed=False)
        return n_comp == 1

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n_nodes: int | None = None) -> "Graph":
        edges = [(int(i), int(j)) for i, j in edges]
        seen = set()
        for i, j in edges:
            if i == j:
                raise InvalidParamsError(f"self-loop at node {i}")
            if i < 0 or j < 0:
                raise InvalidParamsError("node indices must be non-negative")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidParamsError(f"duplicate edge {i} {j}")
            seen.add(key)
        n = n_nodes if n_nodes is not None else 1 + max(max(e) for e in edges)
        A = np.zeros((n, n))
        for i, j in edges:
            A[i, j] = A[j, i] = 1.0
        return cls(A)


def read_edge_list(path) -> Graph:
    """Parse a whitespace-separated "i j" edge list with 0-based nodes.
    Blank lines and lines starting with '#' are skipped."""
    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidParamsError(f"line {lineno}: expected two node indices")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise InvalidParamsError(f"line {lineno}: node indices must be integers") from exc
    if not edges:
        raise InvalidParamsError("edge list is empty")
    return Graph.from_edges(edges)


def complete_graph(n: int) -> Graph:
    return Graph(np.ones((n, n)) - np.eye(n))


def star_graph(n: int) -> Graph:
    """Hub 0 joined to leaves 1..n-1."""
    return Graph.from_edges([(0, j) for j in range(1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges([(j, (j + 1) % n) for j in range(n)])


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    A = (upper | upper.T).astype(float)
    return Graph(A)


def transition_matrix(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Return (H, L): H_ij = A_ij / K_i and the Laplacian L = diag(K) - A."""
    if not g.is_connected():
        raise DisconnectedError("graph is not connected")
    A = g.adjacency
    K = g.degrees
    H = A / K[:, None]
    return H, np.diag(K) - A


@dataclass(frozen=True)
class SpectralDecomposition:
    """H = sum_m lambda_m |v_m><vbar_m| with <vbar_n|v_m> = delta_nm.

    ``right[:, m]`` is |v_m> and ``left[m, :]`` is <vbar_m|. Index 0 is the
    Perron pair: |v_1> is all ones and <vbar_1| the stationary distribution.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def stationary(self) -> np.ndarray:
        return self.left[0]

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.right[:, 0], self.left[0])

    def projectors(self) -> np.ndarray:
        """Array of shape (N, N, N): entry m is |v_m><vbar_m|."""
        return np.einsum("im,mj->mij", self.right, self.left)

    def rebuild(self, weights) -> np.ndarray:
        """sum_m weights[m] |v_m><vbar_m|; weights may carry a leading time axis."""
        w = np.asarray(weights, dtype=float)
        return np.einsum("...m,im,mj->...ij", w, self.right, self.left)


def spectral_decompose(
    H: np.ndarray,
    degrees: np.ndarray | None = None,
    *,
    allow_bipartite: bool = False,
) -> SpectralDecomposition:
    """Eigen-decomposition of a random-walk matrix H = D^-1 A.

    The symmetric matrix S = D^(1/2) H D^(-1/2) is diagonalized with a
    symmetric solver; eigenvectors map back as |v> = D^(-1/2) s and
    <vbar| = s^T D^(1/2), which are biorthonormal by construction.

    A bipartite graph has eigenvalue -1 and its walk never settles, so it is
    refused unless ``allow_bipartite`` is set. The decomposition itself stays
    valid and finite-time identities may still use it.
    """
    H = np.asarray(H, dtype=float)
    if degrees is None:
        # stationary weights of a reversible walk are proportional to degrees;
        # recover them from H_ij K_i = H_ji K_j using the first row
        degrees = _degrees_from_H(H)
    d = np.asarray(degrees, dtype=float)
    sq = np.sqrt(d)
    S = sq[:, None] * H / sq[None, :]
    S = 0.5 * (S + S.T)
    lam, vecs = np.linalg.eigh(S)
    order = np.argsort(-lam, kind="stable")
    lam, vecs = lam[order], vecs[:, order]
    if not allow_bipartite and np.any(np.abs(lam + 1.0) < BIPARTITE_TOL):
        raise BipartiteSpectrumError("eigenvalue -1 present: the graph is bipartite")
    right = vecs / sq[:, None]
    left = (vecs * sq[:, None]).T
    # fix the Perron pair exactly: right = ones, left = degrees / sum
    lam[0] = 1.0
    right[:, 0] = 1.0
    left[0] = d / d.sum()
    return SpectralDecomposition(lam, right, left)


def _degrees_from_H(H: np.ndarray) -> np.ndarray:
    n = H.shape[0]
    K = np.zeros(n)
    K[0] = 1.0
    # breadth-first propagation along nonzero entries
    frontier = [0]
    done = {0}
    while frontier:
        i = frontier.pop()
        for j in np.nonzero(H[i])[0]:
            if j not in done:
                K[j] = K[i] * H[i, j] / H[j, i]
                done.add(j)
                frontier.append(j)
    if len(done) < n:
        raise DisconnectedError("transition matrix is reducible")
    return K
