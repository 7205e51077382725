from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtrenewal import graph
from dtrenewal.errors import BipartiteSpectrumError, DisconnectedError, InvalidParamsError


def test_complete_graph_k3():
    g = graph.complete_graph(3)
    H, L = graph.transition_matrix(g)
    assert np.array_equal(H, 0.5 * (np.ones((3, 3)) - np.eye(3)))
    spec = graph.spectral_decompose(H, g.degrees)
    assert np.allclose(np.sort(spec.eigenvalues), [-0.5, -0.5, 1.0], atol=1e-14)
    assert np.allclose(spec.stationary, [1 / 3] * 3, atol=0)
    assert np.array_equal(L, 2 * np.eye(3) - g.adjacency)


def test_star_hub_row():
    g = graph.star_graph(4)
    H, _ = graph.transition_matrix(g)
    assert np.allclose(H[0], [0, 1 / 3, 1 / 3, 1 / 3], atol=0)
    assert np.array_equal(H.sum(axis=1), np.ones(4))


def test_path_is_bipartite():
    g = graph.Graph.from_edges([(0, 1)], 2)
    H, _ = graph.transition_matrix(g)
    with pytest.raises(BipartiteSpectrumError):
        graph.spectral_decompose(H, g.degrees)
    spec = graph.spectral_decompose(H, g.degrees, allow_bipartite=True)
    assert np.allclose(spec.eigenvalues, [1, -1], atol=1e-15)


def test_disconnected():
    g = graph.Graph.from_edges([(0, 1), (2, 3)], 4)
    with pytest.raises(DisconnectedError):
        graph.transition_matrix(g)


def test_edge_list_validation(tmp_path):
    f = tmp_path / "g.edges"
    f.write_text("# triangle\n0 1\n\n1 2\n2 0\n")
    g = graph.read_edge_list(f)
    assert g.n_nodes == 3 and np.array_equal(g.degrees, [2, 2, 2])
    f.write_text("0 1\n1 0\n")
    with pytest.raises(InvalidParamsError):
        graph.read_edge_list(f)
    f.write_text("0 0\n0 1\n")
    with pytest.raises(InvalidParamsError):
        graph.read_edge_list(f)


def test_er_seed_is_connected_and_not_bipartite():
    g = graph.erdos_renyi(30, 0.2, seed=7)
    H, _ = graph.transition_matrix(g)
    graph.spectral_decompose(H, g.degrees)
    assert np.array_equal(graph.erdos_renyi(30, 0.2, seed=7).adjacency, g.adjacency)


def _graphs():
    return [
        graph.complete_graph(5),
        graph.cycle_graph(7),
        graph.erdos_renyi(30, 0.2, seed=7),
        graph.Graph.from_edges([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 5),
    ]


@pytest.mark.parametrize("g", _graphs(), ids=["K5", "C7", "ER30", "lollipop"])
def test_spectral_identities(g):
    H, _ = graph.transition_matrix(g)
    spec = graph.spectral_decompose(H, g.degrees)
    n = g.n_nodes
    assert np.allclose(spec.left @ spec.right, np.eye(n), atol=1e-10)
    assert np.allclose(spec.projectors().sum(axis=0), np.eye(n), atol=1e-10)
    assert np.allclose(spec.rebuild(spec.eigenvalues), H, atol=1e-10)
    assert np.allclose(spec.stationary @ H, spec.stationary, atol=1e-10)
    assert spec.eigenvalues[0] == 1.0
    assert np.all(np.abs(spec.eigenvalues[1:]) < 1 - 1e-10)
    # powers stay row-stochastic and approach the projector
    P = np.eye(n)
    for _ in range(64):
        P = P @ H
        assert np.allclose(P.sum(axis=1), 1, atol=1e-10)
    lam2 = np.abs(spec.eigenvalues[1:]).max()
    C = np.abs(spec.right[:, 1:]).max(axis=0) @ np.abs(spec.left[1:]).max(axis=1)
    assert np.abs(P - spec.projector).max() <= lam2**64 * C + 1e-13


def test_degrees_recovered_from_H():
    g = graph.Graph.from_edges([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 5)
    H, _ = graph.transition_matrix(g)
    a = graph.spectral_decompose(H)
    b = graph.spectral_decompose(H, g.degrees)
    assert np.allclose(a.stationary, b.stationary, atol=1e-15)


@given(st.integers(3, 25), st.floats(0.2, 0.9), st.integers(0, 10_000))
def test_random_graph_reconstruction(n, p, seed):
    g = graph.erdos_renyi(n, p, seed)
    if not g.is_connected():
        return
    H, _ = graph.transition_matrix(g)
    spec = graph.spectral_decompose(H, g.degrees, allow_bipartite=True)
    assert np.allclose(spec.rebuild(spec.eigenvalues), H, atol=1e-10)
    assert np.allclose(spec.left @ spec.right, np.eye(n), atol=1e-10)
