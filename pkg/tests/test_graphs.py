import numpy as np
import pytest

from fraclap.errors import GraphFormatError
from fraclap.generators import (cycle_graph, grid_graph, path_graph,
                                random_connected_graph, star_graph)
from fraclap.graphs import (Graph, LaplacianKind, build_incidence,
                            build_laplacian, degree_vectors,
                            largest_connected_component, load_edge_list)


def test_graph_rejects_self_loop():
    with pytest.raises(GraphFormatError):
        Graph(n=2, directed=True, edges=((0, 0, 1.0),))


def test_graph_rejects_duplicate_arc():
    with pytest.raises(GraphFormatError):
        Graph(n=2, directed=True, edges=((0, 1, 1.0), (0, 1, 2.0)))


def test_graph_rejects_asymmetric_undirected():
    with pytest.raises(GraphFormatError):
        Graph(n=2, directed=False, edges=((0, 1, 1.0),))


def test_load_edge_list_roundtrip(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# comment\n0 1\n1 2\n2 0\n")
    g = load_edge_list(p)
    assert g.directed and g.n == 3 and g.arc_count == 3


def test_load_edge_list_force_undirected(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n")
    g = load_edge_list(p, force_undirected=True)
    assert not g.directed
    assert {(u, v) for u, v, _ in g.edges} == {(0, 1), (1, 0), (1, 2), (2, 1)}


def test_load_edge_list_one_based(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("1 2\n2 3\n")
    g = load_edge_list(p, one_based=True)
    assert {(u, v) for u, v, _ in g.edges} == {(0, 1), (1, 2)}


def test_combinatorial_laplacian_row_sums():
    g = random_connected_graph(40, seed=3)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL).matrix
    assert np.allclose(L, L.T)
    assert np.abs(L.sum(axis=1)).max() < 1e-12
    assert (np.diag(L) > 0).all()


def test_directed_out_laplacian_row_sums():
    g = cycle_graph(7, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT).matrix
    assert np.abs(L.sum(axis=1)).max() == 0.0
    assert np.allclose(np.diag(L), 1.0)


def test_symmetric_normalized_spectrum_bounded():
    g = star_graph(9)
    L = build_laplacian(g, LaplacianKind.SYMMETRIC_NORMALIZED).matrix
    w = np.linalg.eigvalsh(L)
    assert w.min() > -1e-12 and w.max() <= 2.0 + 1e-12


def test_dangling_fixup_pagerank_rows():
    g = path_graph(4, directed=True)                  # node 3 dangles
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT_NORMALIZED,
                        dangling_fixup=True)
    assert L.fixup
    row = L.matrix[3]
    # uniform jump row: L = I - W/d with W_3j = 1/n
    expect = np.full(4, -0.25)
    expect[3] = 0.75
    assert np.allclose(row, expect)


def test_largest_component_weak_vs_strong():
    # two directed triangles joined by a one-way bridge
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0),
             (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0), (2, 3, 1.0)]
    g = Graph(n=6, directed=True, edges=tuple(edges))
    weak = largest_connected_component(g)
    assert weak.n == 6
    strong = largest_connected_component(g, strong=True)
    assert strong.n == 3


def test_incidence_gives_laplacian():
    g = random_connected_graph(25, seed=11)
    B = build_incidence(g).matrix
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL).matrix
    assert np.allclose(B @ B.T, L, atol=1e-12)


def test_degree_vectors_directed():
    g = Graph(n=3, directed=True,
              edges=((0, 1, 2.0), (1, 2, 3.0), (2, 0, 4.0), (2, 1, 5.0)))
    d, d_in, d_out = degree_vectors(g)
    assert np.allclose(d_out, [2.0, 3.0, 9.0])
    assert np.allclose(d_in, [4.0, 7.0, 3.0])
    assert np.allclose(d, d_in + d_out)


def test_grid_graph_shape():
    g = grid_graph(4, 5)
    assert g.n == 20
    d, _, _ = degree_vectors(g)
    assert d.min() == 2 and d.max() == 4


def test_generators_connected():
    for seed in range(4):
        g = random_connected_graph(30, seed=seed)
        assert largest_connected_component(g).n == 30
