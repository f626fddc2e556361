import numpy as np
import pytest
from scipy.linalg import expm

from fraclap.generators import (cycle_graph, path_graph,
                                random_connected_graph)
from fraclap.graphs import DenseOperator, LaplacianKind, build_laplacian
from fraclap.matfun import (fractional_power_general,
                            fractional_power_symmetric)
from fraclap.walks import (absorption_time_samples, cycle_entry_limit,
                           cycle_fractional_entries,
                           expected_absorption_steps,
                           evolve_continuous, path_fractional_entries,
                           path_transition_asymptotic, return_probability,
                           simulate_discrete, stationary_distribution,
                           transition_kernel)


def kernel_for(n, seed, alpha):
    g = random_connected_graph(n, seed=seed)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    return transition_kernel(fractional_power_symmetric(L, alpha))


def test_kernel_rows_stochastic():
    for seed, alpha in [(0, 0.25), (1, 0.5), (2, 0.75), (3, 1.0)]:
        k = kernel_for(30, seed, alpha)
        assert np.abs(k.P.sum(axis=1) - 1.0).max() < 1e-12
        assert k.P.min() >= 0.0
        assert np.abs(np.diag(k.P)).max() < 1e-12


def test_kernel_requires_alpha_metadata():
    g = random_connected_graph(10, seed=0)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    with pytest.raises(ValueError):
        transition_kernel(L)


def test_stationary_distribution_fractional_degrees():
    k = kernel_for(25, 4, 0.5)
    pi, residual = stationary_distribution(k)
    assert residual < 1e-10
    assert abs(pi.sum() - 1.0) < 1e-12
    assert np.abs(pi @ k.P - pi).max() < 1e-10
    want = k.d_alpha / k.d_alpha.sum()
    assert np.abs(pi - want).max() < 1e-12


def test_stationary_uniform_on_cycle():
    g = cycle_graph(12)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    k = transition_kernel(fractional_power_symmetric(L, 0.5))
    pi, _ = stationary_distribution(k)
    assert np.abs(pi - 1.0 / 12).max() < 1e-12


def test_simulate_discrete_reproducible():
    k = kernel_for(20, 1, 0.5)
    a = simulate_discrete(k, 3, 200, seed=42)
    b = simulate_discrete(k, 3, 200, seed=42)
    c = simulate_discrete(k, 3, 200, seed=43)
    assert np.array_equal(a.states, b.states)
    assert not np.array_equal(a.states, c.states)
    assert a.states.shape == (201,)
    assert a.states[0] == 3
    assert ((a.states >= 0) & (a.states < 20)).all()


def test_long_range_jumps_present_for_small_alpha():
    # fractional kernel on the path jumps past nearest neighbours
    g = path_graph(40, directed=False)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    k = transition_kernel(fractional_power_symmetric(L, 0.4))
    traj = simulate_discrete(k, 20, 500, seed=7)
    hops = np.abs(np.diff(traj.states))
    assert hops.max() > 1


def test_expected_absorption_closed_form():
    res = expected_absorption_steps(20, 0.5)
    assert res.n_step == 5
    assert abs(res.expectation - 4.886242184147704) < 1e-12
    assert abs(res.expectation - res.fundamental_expectation) < 1e-10


def test_absorption_faster_for_smaller_alpha():
    e = [expected_absorption_steps(30, a).expectation
         for a in (0.3, 0.6, 1.0)]
    assert e[0] < e[1] < e[2]
    assert expected_absorption_steps(30, 1.0).expectation == 29.0


def test_absorption_monte_carlo_matches():
    g = path_graph(20, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT)
    M = fractional_power_general(L.matrix, 0.5)
    op = DenseOperator(matrix=M.operator.matrix.real,
                       kind=LaplacianKind.DIRECTED_OUT, alpha=0.5)
    k = transition_kernel(op)
    assert k.absorbing == (19,)
    samples = absorption_time_samples(k, 0, 4000, seed=11)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - 4.886242184147704) < 3 * se


def test_evolve_conserves_mass_and_matches_expm():
    k = kernel_for(15, 5, 0.5)
    u0 = np.zeros(15)
    u0[2] = 1.0
    times = [0.0, 0.5, 2.0, 10.0]
    traj = evolve_continuous(k, u0, times)
    assert traj.conservation_drift < 1e-12
    G = np.eye(15) - k.P
    for row, t in zip(traj.states, times):
        ref = expm(-t * G.T) @ u0
        assert np.abs(row - ref).max() < 1e-10
    # long-time limit is the stationary distribution
    pi, _ = stationary_distribution(k)
    tail = evolve_continuous(k, u0, [200.0]).states[0]
    assert np.abs(tail - pi).max() < 1e-8


def test_path_closed_form_matches_engine():
    g = path_graph(10, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT).matrix
    for alpha in (0.3, 0.5, 0.9):
        got = path_fractional_entries(10, alpha).matrix
        ref = fractional_power_general(L, alpha).operator.matrix
        assert np.abs(got - ref).max() < 1e-10


def test_cycle_closed_form_matches_engine():
    g = cycle_graph(16, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT).matrix
    for alpha in (0.3, 0.5, 0.9):
        got = cycle_fractional_entries(16, alpha).matrix
        ref = fractional_power_general(L, alpha).operator.matrix
        assert np.abs(got - ref).max() < 1e-10


def test_cycle_entries_approach_infinite_limit():
    gap, alpha = 3, 0.5
    lim = cycle_entry_limit(alpha, gap)
    errs = []
    for n in (16, 64, 256, 1024):
        entry = cycle_fractional_entries(n, alpha).matrix[0, gap]
        errs.append(abs(entry - lim))
    assert errs[0] > errs[1] > errs[2] > errs[3]
    # wrap-around correction vanishes like n^-(1+alpha)
    order = np.log(errs[1] / errs[3]) / np.log(1024 / 64)
    assert abs(order - (1 + alpha)) < 0.2
    assert errs[-1] < 1e-4


def test_path_jump_probability_power_law():
    # kernel entries follow gap^(-1-alpha) far from the boundary
    alpha = 0.5
    g = path_graph(400, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT)
    M = fractional_power_general(L.matrix, alpha)
    op = DenseOperator(matrix=M.operator.matrix.real,
                       kind=LaplacianKind.DIRECTED_OUT, alpha=alpha)
    k = transition_kernel(op)
    for gap in (50, 100, 200):
        approx = path_transition_asymptotic(alpha, gap)
        assert abs(k.P[0, gap] / approx - 1.0) < 0.02


def test_return_probability_basics():
    g = cycle_graph(20, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT)
    la = fractional_power_general(L.matrix, 0.5).operator.matrix.real
    times = np.array([0.0, 0.1, 1.0, 10.0, 1e6])
    curve = return_probability(la, times)
    assert curve.values[0] == 1.0
    ref = np.array([np.trace(expm(-t * la)).real / 20 for t in times])
    assert np.abs(curve.values - ref).max() < 1e-8
    assert curve.zero_multiplicity == 1
    assert abs(curve.values[-1] - 1 / 20) < 1e-6


def test_return_probability_monotone_when_symmetric():
    g = random_connected_graph(30, seed=9)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    la = fractional_power_symmetric(L, 0.5).operator.matrix
    times = np.linspace(0.0, 20.0, 40)
    curve = return_probability(la, times)
    assert (np.diff(curve.values) <= 1e-12).all()
    assert curve.values[0] == 1.0
    assert curve.spectral_gap > 0
