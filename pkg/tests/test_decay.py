import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap.decay import (ExpFractionalModulus, HoelderModulus,
                           distance_decay_slope, graph_distances,
                           numerical_range_profile, pattern_distances,
                           verify_decay_bounds, verify_p_alpha_bound)
from fraclap.generators import (cycle_graph, grid_graph,
                                random_geometric_graph)
from fraclap.graphs import (Graph, LaplacianKind, build_laplacian)
from fraclap.matfun import fractional_power_symmetric
from fraclap.walks import transition_kernel


def three_node_digraph():
    return Graph(n=3, directed=True,
                 edges=((0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 1, 1.0)))


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(0.01, 1.0),
       x=st.floats(0.0, 100.0), y=st.floats(0.0, 100.0))
def test_hoelder_modulus_properties(alpha, x, y):
    w = HoelderModulus(alpha)
    assert w(0.0) == 0.0
    if x <= y:
        assert w(x) <= w(y)
    assert abs(w(x) * w(y) - w(x * y)) <= 1e-9 * (1.0 + w(x * y))


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(0.01, 1.0), t=st.floats(0.0, 50.0),
       x=st.floats(0.0, 50.0))
def test_exp_modulus_properties(alpha, t, x):
    w = ExpFractionalModulus(t, alpha)
    assert w(0.0) == 0.0
    assert 0.0 <= w(x) <= 1.0
    assert w(x) <= t * x**alpha + 1e-12         # 1 - exp(-u) <= u
    assert w(x) <= w(x + 1.0) + 1e-12


def test_power_bounds_on_cycle():
    L = build_laplacian(cycle_graph(64), LaplacianKind.COMBINATORIAL)
    for alpha in (0.25, 0.5, 0.75):
        rep = verify_decay_bounds(L.matrix, alpha, mode="power")
        assert rep.all_satisfied and rep.violations == 0
        assert rep.n_pairs > 0
        assert rep.max_ratio <= 1.0
        assert abs(rep.c - (1 + np.pi**2 / 2)) < 1e-14


def test_exponential_bounds_on_geometric_graph():
    g = random_geometric_graph(120, 0.16, seed=4)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    for t in (0.1, 1.0, 10.0):
        rep = verify_decay_bounds(L.matrix, 0.5, mode="exponential", t=t)
        assert rep.all_satisfied
        assert rep.t == t and rep.mode == "exponential"
        # the linearized envelope c*t*x^alpha dominates the sharp bound
        assert (rep.bounds <= rep.secondary_bounds + 1e-15).all()


def test_exponential_mode_requires_t():
    L = build_laplacian(cycle_graph(8), LaplacianKind.COMBINATORIAL)
    with pytest.raises(ValueError):
        verify_decay_bounds(L.matrix, 0.5, mode="exponential")


def test_nonsymmetric_input_rejected():
    L = build_laplacian(three_node_digraph(), LaplacianKind.DIRECTED_OUT)
    with pytest.raises(ValueError):
        verify_decay_bounds(L.matrix, 0.5)


def test_sampling_keeps_summary_exact():
    L = build_laplacian(cycle_graph(64), LaplacianKind.COMBINATORIAL)
    full = verify_decay_bounds(L.matrix, 0.5)
    sub = verify_decay_bounds(L.matrix, 0.5, sample=40, seed=1)
    assert sub.n_pairs == full.n_pairs
    assert sub.max_ratio == full.max_ratio
    assert len(sub.pairs) == 40 and len(full.pairs) == full.n_pairs


def test_kernel_bounds_on_cycle():
    L = build_laplacian(cycle_graph(64), LaplacianKind.COMBINATORIAL)
    k = transition_kernel(fractional_power_symmetric(L, 0.5))
    rep = verify_p_alpha_bound(k, L.matrix, 0.5)
    assert rep.all_satisfied
    assert rep.mode == "kernel"
    assert rep.diagonal_ok and rep.diagonal_margin > 0


def test_numerical_range_dips_negative_on_defective_digraph():
    L = build_laplacian(three_node_digraph(), LaplacianKind.DIRECTED_OUT)
    prof = numerical_range_profile(L.matrix)
    assert abs(prof.min_real - (-0.06631874678992)) < 1e-12
    assert prof.eigenvector_condition > 1e6
    w = np.linalg.eigvals(L.matrix)
    assert w.real.min() > -1e-12        # spectrum stays in the closed RHP


def test_numerical_range_nonnegative_for_symmetric_psd():
    for n, seed in [(20, 0), (35, 1)]:
        g = random_geometric_graph(n, 0.45, seed=seed)
        L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
        prof = numerical_range_profile(L.matrix)
        assert prof.min_real >= -1e-10
    Lc = build_laplacian(cycle_graph(16), LaplacianKind.SYMMETRIC_NORMALIZED)
    assert numerical_range_profile(Lc.matrix).min_real >= -1e-10


def test_distance_decay_slope_on_grid():
    g = grid_graph(12, 12)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    dist = graph_distances(g)
    for alpha in (0.25, 0.5, 0.75):
        A = fractional_power_symmetric(L, alpha).operator.matrix
        prof = distance_decay_slope(np.abs(A), dist)
        assert prof.slope <= -alpha + 0.15


def test_pattern_and_graph_distances_agree():
    g = random_geometric_graph(40, 0.3, seed=2)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    dp = pattern_distances(L.matrix, directed=False)
    dg = graph_distances(g)
    assert np.array_equal(dp, dg)
    assert (np.diag(dg) == 0).all()
