"""Second-order multi-agent consensus driven by fractional coupling.

Vehicles with positions ``x`` and velocities ``v`` track a target
trajectory ``(x*, v*)`` under the linear protocol

    ``dv/dt = d2x*/dt2 + K (x* - x) + gamma K (v* - v)``

with coupling ``K = beta I + L^alpha`` built from the communication
graph Laplacian.  The deviation ``(x* - x, v* - v)`` then obeys the
block system ``[[0, I], [-K, -gamma K]]``, and a damping threshold on
``gamma`` computed from the spectrum of ``-K`` guarantees convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError
from .generators import cycle_graph
from .graphs import Graph, LaplacianKind, build_laplacian
from .matfun import fractional_power_general, fractional_power_symmetric


def _as_matrix(op) -> np.ndarray:
    A = np.asarray(getattr(op, "matrix", op))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    return A


@dataclass(frozen=True)
class TargetTrajectory:
    """Reference trajectory with consistent derivatives.

    Attributes
    ----------
    position, velocity, acceleration : callable
        Maps from time to an ``(n, m)`` array.  ``velocity`` must be the
        time derivative of ``position``; this is spot-checked by finite
        differences before a simulation runs.
    """

    position: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    acceleration: Callable[[float], np.ndarray]


def static_formation(points) -> TargetTrajectory:
    """Constant target positions with zero velocity and acceleration."""
    pts = np.array(points, dtype=float)
    zero = np.zeros_like(pts)
    return TargetTrajectory(position=lambda t: pts,
                            velocity=lambda t: zero,
                            acceleration=lambda t: zero)


def circular_orbit(center, radius: float, omega: float, n: int, *,
                   phases=None) -> TargetTrajectory:
    """Agents rotating uniformly on a circle, analytic derivatives.

    Parameters
    ----------
    center : array_like
        Circle center, length-m.
    radius : float
        Circle radius.
    omega : float
        Angular velocity.
    n : int
        Agent count.
    phases : array_like, optional
        Initial angles, default uniformly spread.
    """
    ctr = np.asarray(center, dtype=float)
    if ctr.shape != (2,):
        raise ValueError("circular orbits are planar; center must be 2-d")
    ph = (2.0 * math.pi * np.arange(n) / n if phases is None
          else np.asarray(phases, dtype=float))
    if ph.shape != (n,):
        raise ValueError("need one phase per agent")

    def pos(t: float) -> np.ndarray:
        a = omega * t + ph
        return ctr + radius * np.column_stack([np.cos(a), np.sin(a)])

    def vel(t: float) -> np.ndarray:
        a = omega * t + ph
        return radius * omega * np.column_stack([-np.sin(a), np.cos(a)])

    def acc(t: float) -> np.ndarray:
        a = omega * t + ph
        return -radius * omega ** 2 * np.column_stack([np.cos(a), np.sin(a)])

    return TargetTrajectory(position=pos, velocity=vel, acceleration=acc)


def target_from_position(position: Callable[[float], np.ndarray],
                         horizon: float) -> TargetTrajectory:
    """Build a trajectory from a position map by central differences.

    The step is ``1e-4 * horizon``; the position map must accept
    arguments slightly outside ``[0, horizon]``.
    """
    h = 1e-4 * float(horizon)
    if h <= 0:
        raise ValueError("horizon must be positive")

    def vel(t: float) -> np.ndarray:
        return (np.asarray(position(t + h)) - np.asarray(position(t - h))) \
            / (2.0 * h)

    def acc(t: float) -> np.ndarray:
        return (np.asarray(position(t + h)) - 2.0 * np.asarray(position(t))
                + np.asarray(position(t - h))) / (h * h)

    return TargetTrajectory(position=lambda t: np.asarray(position(t),
                                                          dtype=float),
                            velocity=vel, acceleration=acc)


@dataclass(frozen=True)
class GammaBound:
    """Damping threshold report.

    The threshold evaluates, for every eigenvalue ``lam`` of the
    coupling spectrum shifted as ``nu = -beta - lam``, the radicand
    ``arctan(Re(nu) / Im(nu))`` and keeps ``sqrt(2) / sqrt(radicand)``
    over the indices where it is defined and positive.  Real ``nu``
    (the arctan limit is taken as 0) and nonpositive radicands are
    excluded and reported.

    Attributes
    ----------
    bound : float
        Max over valid indices; damping must exceed this.
    nu : numpy.ndarray
        Shifted spectrum.
    radicands : numpy.ndarray
        Radicand per index, NaN where ``nu`` is real.
    valid : numpy.ndarray
        Boolean mask of indices entering the max.
    excluded_real : tuple of int
        Indices dropped because ``Im(nu) = 0``.
    excluded_nonpositive : tuple of int
        Indices dropped because the radicand is nonpositive.
    """

    bound: float
    nu: np.ndarray
    radicands: np.ndarray
    valid: np.ndarray
    excluded_real: tuple
    excluded_nonpositive: tuple

    def __float__(self) -> float:
        return self.bound


def gamma_lower_bound(lalpha, beta: float) -> GammaBound:
    """Damping threshold from the spectrum of the coupling operator.

    Parameters
    ----------
    lalpha : array_like
        Fractional Laplacian power (matrix or result object).
    beta : float
        Positive position-coupling gain.

    Returns
    -------
    GammaBound

    Raises
    ------
    ValueError
        Every index excluded (real spectra leave the bound undefined;
        pick the damping explicitly in that case).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    lam = np.linalg.eigvals(_as_matrix(lalpha).astype(float))
    nu = -beta - lam
    scale = np.maximum(1.0, np.abs(nu))
    real_mask = np.abs(nu.imag) <= 1e-12 * scale
    radicands = np.full(nu.shape[0], np.nan)
    nonzero = ~real_mask
    radicands[nonzero] = np.arctan(nu.real[nonzero] / nu.imag[nonzero])
    valid = nonzero & (radicands > 0.0)
    excluded_real = tuple(np.flatnonzero(real_mask).tolist())
    excluded_nonpos = tuple(np.flatnonzero(nonzero
                                           & ~(radicands > 0.0)).tolist())
    if not valid.any():
        raise ValueError("damping bound undefined: every index excluded")
    bound = float(np.sqrt(2.0 / radicands[valid]).max())
    return GammaBound(bound=bound, nu=nu, radicands=radicands, valid=valid,
                      excluded_real=excluded_real,
                      excluded_nonpositive=excluded_nonpos)


@dataclass(frozen=True)
class ConsensusConfig:
    """Configuration of one consensus run.

    Attributes
    ----------
    graph : Graph
        Communication topology.
    alpha : float
        Fractional exponent of the Laplacian coupling.
    beta : float
        Positive position gain; the coupling is ``beta I + L^alpha``.
    target : TargetTrajectory
        Reference trajectory.
    x0, v0 : numpy.ndarray
        Initial ``(n, m)`` positions and velocities.
    horizon : float
        Final time.
    gamma : float or None
        Explicit damping; when None it is the spectral threshold plus
        ``gamma_margin``.
    gamma_margin : float
        Margin added to the computed threshold.
    step : float or None
        Integrator step, default ``horizon / 5000``.
    output_stride : int or None
        Record every this many steps, default about 500 snapshots.
    kind : LaplacianKind
        Laplacian flavor built from the graph.
    lalpha : array_like or None
        Precomputed fractional power, overriding the graph build.
    """

    graph: Graph
    alpha: float
    beta: float
    target: TargetTrajectory
    x0: np.ndarray
    v0: np.ndarray
    horizon: float
    gamma: float | None = None
    gamma_margin: float = 1.0
    step: float | None = None
    output_stride: int | None = None
    kind: LaplacianKind = LaplacianKind.DIRECTED_OUT
    lalpha: object = None

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        v0 = np.asarray(self.v0, dtype=float)
        if x0.ndim != 2 or x0.shape[0] != self.graph.n:
            raise ValueError("x0 must be (n, m) with one row per node")
        if v0.shape != x0.shape:
            raise ValueError("v0 must match the shape of x0")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "v0", v0)
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")


@dataclass(frozen=True)
class ConsensusState:
    """Snapshot of a consensus simulation.

    ``error`` is the Frobenius distance of the stacked deviation
    ``sqrt(|x - x*|^2 + |v - v*|^2)``; ``position_error`` keeps the
    position part only.
    """

    time: float
    positions: np.ndarray
    velocities: np.ndarray
    error: float
    position_error: float


def _errors(x, v, xs, vs) -> tuple[float, float]:
    pe = float(np.linalg.norm(x - xs))
    ve = float(np.linalg.norm(v - vs))
    return math.hypot(pe, ve), pe


def _coupling_matrix(cfg: ConsensusConfig) -> np.ndarray:
    if cfg.lalpha is not None:
        F = _as_matrix(cfg.lalpha)
    else:
        L = build_laplacian(cfg.graph, cfg.kind)
        A = L.matrix
        sym = float(np.abs(A - A.T).max()) <= 1e-12 * max(1.0,
                                                          float(np.abs(A).max()))
        F = (fractional_power_symmetric(A, cfg.alpha) if sym
             else fractional_power_general(A, cfg.alpha)).matrix
    if np.iscomplexobj(F):
        resid = float(np.abs(F.imag).max())
        if resid > 1e-10 * max(1.0, float(np.abs(F.real).max())):
            raise NumericalError(f"imaginary residue {resid:.3e} in coupling")
        F = F.real.copy()
    return F


def _check_target(cfg: ConsensusConfig):
    h = 1e-4 * cfg.horizon
    vscale = 1.0
    worst = 0.0
    for t in np.linspace(h, cfg.horizon - h, 7):
        fd = (np.asarray(cfg.target.position(t + h))
              - np.asarray(cfg.target.position(t - h))) / (2.0 * h)
        v = np.asarray(cfg.target.velocity(t))
        worst = max(worst, float(np.abs(fd - v).max()))
        vscale = max(vscale, float(np.abs(v).max()))
    if worst > 1e-6 * vscale:
        raise ValueError(
            f"target velocity disagrees with d(position)/dt by {worst:.3e}")


def simulate_consensus(cfg: ConsensusConfig) -> list[ConsensusState]:
    """Integrate the consensus dynamics with fixed-step classical RK4.

    Parameters
    ----------
    cfg : ConsensusConfig
        Run configuration.

    Returns
    -------
    list of ConsensusState
        Snapshots every ``output_stride`` steps plus the final time.

    Raises
    ------
    NumericalError
        Deviation growth beyond 1e6 times the initial one (step too
        large for the spectrum).
    """
    _check_target(cfg)
    lalpha = _coupling_matrix(cfg)
    K = cfg.beta * np.eye(cfg.graph.n) + lalpha
    gamma = cfg.gamma if cfg.gamma is not None \
        else gamma_lower_bound(lalpha, cfg.beta).bound + cfg.gamma_margin
    step_request = cfg.step if cfg.step is not None else cfg.horizon / 5000.0
    nsteps = max(1, int(math.ceil(cfg.horizon / step_request - 1e-9)))
    dt = cfg.horizon / nsteps
    stride = cfg.output_stride if cfg.output_stride is not None \
        else max(1, nsteps // 500)

    target = cfg.target

    def accel(t: float, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (np.asarray(target.acceleration(t))
                + K @ (np.asarray(target.position(t)) - x)
                + gamma * (K @ (np.asarray(target.velocity(t)) - v)))

    x = cfg.x0.copy()
    v = cfg.v0.copy()
    err0, pe0 = _errors(x, v, target.position(0.0), target.velocity(0.0))
    states = [ConsensusState(time=0.0, positions=x.copy(),
                             velocities=v.copy(), error=err0,
                             position_error=pe0)]
    guard = 1e6 * (err0 + 1.0)
    for k in range(nsteps):
        t = k * dt
        k1x, k1v = v, accel(t, x, v)
        k2x = v + 0.5 * dt * k1v
        k2v = accel(t + 0.5 * dt, x + 0.5 * dt * k1x, k2x)
        k3x = v + 0.5 * dt * k2v
        k3v = accel(t + 0.5 * dt, x + 0.5 * dt * k2x, k3x)
        k4x = v + dt * k3v
        k4v = accel(t + dt, x + dt * k3x, k4x)
        x = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        tn = (k + 1) * dt
        err, pe = _errors(x, v, target.position(tn), target.velocity(tn))
        if not math.isfinite(err) or err > guard:
            raise NumericalError(
                f"deviation blew up to {err:.3e} at t={tn:.6f}; "
                "reduce the integrator step")
        if (k + 1) % stride == 0 or k + 1 == nsteps:
            states.append(ConsensusState(time=tn, positions=x.copy(),
                                         velocities=v.copy(), error=err,
                                         position_error=pe))
    return states


def consensus_error_curve(states) -> np.ndarray:
    """Stack states into rows of (time, error, position error)."""
    if not states:
        raise ValueError("empty state list")
    return np.array([[s.time, s.error, s.position_error] for s in states])


def circle_relocation_config(n: int = 120, alpha: float = 0.5,
                             beta: float = 0.5, center=(3.0, 3.0),
                             horizon: float = 5.0, *,
                             gamma: float | None = None,
                             gamma_margin: float = 1.0,
                             step: float | None = None,
                             output_stride: int | None = None
                             ) -> ConsensusConfig:
    """Benchmark run: a rotating ring relocates to a shifted circle.

    Agents start uniformly on the unit circle moving tangentially at
    unit speed; the target is the same circle translated by `center`,
    static with zero terminal velocity.  Communication is a directed
    cycle.  The initial position error is ``sqrt(n * |center|^2)``.
    """
    angles = 2.0 * math.pi * np.arange(n) / n
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    x0 = ring.copy()
    v0 = np.column_stack([-np.sin(angles), np.cos(angles)])
    ctr = np.asarray(center, dtype=float)
    target = static_formation(ctr + ring)
    return ConsensusConfig(graph=cycle_graph(n, directed=True), alpha=alpha,
                           beta=beta, target=target, x0=x0, v0=v0,
                           horizon=horizon, gamma=gamma,
                           gamma_margin=gamma_margin, step=step,
                           output_stride=output_stride)
