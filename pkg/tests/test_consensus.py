import numpy as np
import pytest
from scipy.linalg import expm

from fraclap.consensus import (ConsensusConfig, GammaBound, TargetTrajectory,
                               circle_relocation_config, circular_orbit,
                               consensus_error_curve, gamma_lower_bound,
                               simulate_consensus, static_formation,
                               target_from_position)
from fraclap.errors import NumericalError
from fraclap.generators import cycle_graph, random_connected_graph
from fraclap.graphs import LaplacianKind, build_laplacian
from fraclap.matfun import fractional_power_general

# damping bounds on the directed 120-cycle with beta = 0.5, frozen from an
# independent eigenvalue-by-eigenvalue evaluation
BOUND_ORACLE = {
    0.1: 1.1634933452578224,
    0.5: 1.3004953337690166,
    0.8: 1.4288283425624368,
    1.0: 1.5420483841423216,
}

# final position errors of the circle relocation run at gamma = bound + 1,
# frozen from a matrix-exponential propagation of the error system
FINAL_ORACLE = {
    0.1: 0.874801339648,
    0.5: 2.157743088605,
    0.8: 3.330359015166,
    1.0: 4.262023109944,
}


def cycle_lalpha(alpha, n=120):
    g = cycle_graph(n, directed=True)
    L = build_laplacian(g, LaplacianKind.DIRECTED_OUT)
    return fractional_power_general(L.matrix, alpha).operator.matrix.real


def test_gamma_bound_frozen_oracles():
    for alpha, want in BOUND_ORACLE.items():
        got = gamma_lower_bound(cycle_lalpha(alpha), 0.5)
        assert abs(got.bound - want) < 1e-8
        assert float(got) == got.bound


def test_gamma_bound_alpha_one_analytic():
    # continuum bound sqrt(2 / atan(sqrt(5)/2)); the 120-point grid sits
    # just below the supremum over the full circle
    continuum = np.sqrt(2.0 / np.arctan(np.sqrt(5.0) / 2.0))
    got = gamma_lower_bound(cycle_lalpha(1.0), 0.5).bound
    assert got <= continuum + 1e-12
    assert abs(got - continuum) < 2e-3


def test_gamma_bound_excludes_real_spectrum():
    # zero eigenvalue gives a purely real nu = -beta, always excluded
    rep = gamma_lower_bound(cycle_lalpha(0.5), 0.5)
    assert len(rep.excluded_real) >= 1
    assert rep.valid.sum() + len(rep.excluded_real) \
        + len(rep.excluded_nonpositive) == 120


def test_gamma_bound_undefined_for_symmetric_coupling():
    g = random_connected_graph(20, seed=0)
    L = build_laplacian(g, LaplacianKind.COMBINATORIAL)
    from fraclap.matfun import fractional_power_symmetric
    la = fractional_power_symmetric(L, 0.5).operator.matrix
    with pytest.raises(ValueError):
        gamma_lower_bound(la, 0.5)


def test_equilibrium_stays_put():
    cfg = circle_relocation_config(n=24, horizon=1.0)
    target = cfg.target
    eq = ConsensusConfig(graph=cfg.graph, alpha=cfg.alpha, beta=cfg.beta,
                         target=target, x0=target.position(0.0),
                         v0=target.velocity(0.0), horizon=1.0, gamma=2.0)
    states = simulate_consensus(eq)
    assert states[-1].error < 1e-8


def test_translation_invariance():
    shift = np.array([17.0, -4.0])
    a = circle_relocation_config(n=16, horizon=2.0, gamma=2.0)
    pts = a.target.position(0.0)
    b = ConsensusConfig(graph=a.graph, alpha=a.alpha, beta=a.beta,
                        target=static_formation(pts + shift),
                        x0=a.x0 + shift, v0=a.v0, horizon=2.0, gamma=2.0)
    sa = simulate_consensus(a)
    sb = simulate_consensus(b)
    for u, v in zip(sa, sb):
        assert abs(u.error - v.error) < 1e-10
        assert np.abs(u.positions + shift - v.positions).max() < 1e-9


def test_rk4_step_halving_converges():
    base = circle_relocation_config(n=20, horizon=2.0, gamma=2.5)
    coarse = ConsensusConfig(**{**base.__dict__, "step": 2.0 / 500})
    fine = ConsensusConfig(**{**base.__dict__, "step": 2.0 / 1000})
    e1 = simulate_consensus(coarse)[-1].error
    e2 = simulate_consensus(fine)[-1].error
    assert abs(e1 - e2) < 1e-6


def test_simulation_matches_matrix_exponential():
    # the deviation system is linear and time invariant; expm is exact
    n, alpha, beta, gamma, T = 12, 0.5, 0.5, 2.0, 3.0
    cfg = circle_relocation_config(n=n, alpha=alpha, beta=beta,
                                   horizon=T, gamma=gamma)
    states = simulate_consensus(cfg)
    K = cycle_lalpha(alpha, n) + beta * np.eye(n)
    A = np.block([[np.zeros((n, n)), np.eye(n)],
                  [-K, -gamma * K]])
    tgt = cfg.target.position(0.0)
    err0 = np.concatenate([cfg.x0 - tgt, cfg.v0], axis=0)
    final = expm(T * np.kron(A, np.eye(2))) @ err0.reshape(-1)
    want = np.hypot(np.linalg.norm(final[:2 * n]), np.linalg.norm(final[2 * n:]))
    assert abs(states[-1].error - want) < 1e-9


def test_circle_relocation_frozen_finals():
    for alpha, want in FINAL_ORACLE.items():
        cfg = circle_relocation_config(alpha=alpha)
        states = simulate_consensus(cfg)
        assert abs(states[0].error - np.sqrt(2280.0)) < 1e-9
        assert abs(states[0].position_error - np.sqrt(2160.0)) < 1e-9
        assert abs(states[-1].position_error - want) < 1e-6 * want


def test_error_curve_layout():
    cfg = circle_relocation_config(n=16, horizon=1.0, gamma=2.0,
                                   output_stride=10, step=1.0 / 100)
    states = simulate_consensus(cfg)
    curve = consensus_error_curve(states)
    assert curve.shape == (11, 3)
    assert curve[0, 0] == 0.0 and curve[-1, 0] == 1.0
    assert (curve[:, 2] <= curve[:, 1] + 1e-15).all()


def test_inconsistent_target_rejected():
    n = 8
    pos = lambda t: np.tile([np.sin(t), 0.0], (n, 1))
    bad = TargetTrajectory(position=pos,
                           velocity=lambda t: np.zeros((n, 2)),
                           acceleration=lambda t: np.zeros((n, 2)))
    cfg = ConsensusConfig(graph=cycle_graph(n, directed=True), alpha=0.5,
                          beta=0.5, target=bad, x0=pos(0.0),
                          v0=np.zeros((n, 2)), horizon=1.0, gamma=2.0)
    with pytest.raises(ValueError):
        simulate_consensus(cfg)


def test_instability_guard_raises():
    cfg = circle_relocation_config(n=24, horizon=5.0, gamma=100.0, step=0.5)
    with pytest.raises(NumericalError):
        simulate_consensus(cfg)


def test_circular_orbit_derivatives_consistent():
    orb = circular_orbit((1.0, -2.0), 3.0, 0.7, 10)
    h = 1e-6
    for t in (0.0, 0.4, 1.3):
        num_v = (orb.position(t + h) - orb.position(t - h)) / (2 * h)
        num_a = (orb.velocity(t + h) - orb.velocity(t - h)) / (2 * h)
        assert np.abs(num_v - orb.velocity(t)).max() < 1e-7
        assert np.abs(num_a - orb.acceleration(t)).max() < 1e-7
    r = np.linalg.norm(orb.position(0.0) - np.array([1.0, -2.0]), axis=1)
    assert np.abs(r - 3.0).max() < 1e-12


def test_target_from_position_matches_analytic():
    n = 6
    pos = lambda t: np.stack([np.full(n, np.sin(t)),
                              np.full(n, np.cos(2 * t))], axis=1)
    tgt = target_from_position(pos, horizon=2.0)
    for t in (0.3, 1.1):
        v = np.stack([np.full(n, np.cos(t)),
                      np.full(n, -2 * np.sin(2 * t))], axis=1)
        a = np.stack([np.full(n, -np.sin(t)),
                      np.full(n, -4 * np.cos(2 * t))], axis=1)
        assert np.abs(tgt.velocity(t) - v).max() < 1e-6
        assert np.abs(tgt.acceleration(t) - a).max() < 1e-4


def test_smaller_alpha_settles_faster():
    finals = [simulate_consensus(circle_relocation_config(alpha=a))[-1]
              .position_error for a in (0.1, 0.5, 0.8, 1.0)]
    assert finals[0] < finals[1] < finals[2] < finals[3]
