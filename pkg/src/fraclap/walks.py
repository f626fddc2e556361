"""Random walks driven by fractional Laplacians.

Transition kernels P = I - diag(L^alpha)^-1 L^alpha, their stationary
distributions, discrete and continuous simulation, the closed forms on
directed paths and cycles, absorption statistics, and return-probability
curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import ConvergenceError, NumericalError
from .graphs import DenseOperator, LaplacianKind
from .matfun import binomial_coefficients, matrix_exponential

__all__ = [
    "TransitionKernel",
    "TrajectoryResult",
    "AbsorptionResult",
    "ReturnProbabilityCurve",
    "transition_kernel",
    "stationary_distribution",
    "simulate_discrete",
    "absorption_time_samples",
    "evolve_continuous",
    "path_fractional_entries",
    "cycle_fractional_entries",
    "cycle_entry_limit",
    "expected_absorption_steps",
    "path_transition_asymptotic",
    "return_probability",
]


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic jump matrix with the fractional degrees behind it.

    ``absorbing`` lists nodes whose L^alpha row vanishes; their kernel row
    is the corresponding identity row.
    """

    P: np.ndarray
    d_alpha: np.ndarray
    alpha: float
    kind: LaplacianKind | None
    absorbing: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class TrajectoryResult:
    """Discrete node sequence or continuous distribution snapshots."""

    times: np.ndarray
    states: np.ndarray
    kind: str
    conservation_drift: float | None = None


@dataclass(frozen=True)
class AbsorptionResult:
    expectation: float
    n_step: int
    fundamental_expectation: float


@dataclass(frozen=True)
class ReturnProbabilityCurve:
    times: np.ndarray
    values: np.ndarray
    spectral_gap: float
    zero_multiplicity: int
    eigenvalues: np.ndarray


def _operator_matrix(op):
    if hasattr(op, "operator"):          # FractionalPowerResult
        return op.operator.matrix, op.alpha, op.operator.kind
    if isinstance(op, DenseOperator):
        return op.matrix, op.alpha, op.kind
    A = np.asarray(op, dtype=float)
    return A, None, None


def transition_kernel(lalpha, *, clamp_tol=1e-12) -> TransitionKernel:
    """Jump kernel P = I - diag(L^alpha)^-1 L^alpha.

    Rows of L^alpha that vanish entirely (absorbing nodes, e.g. the sink
    of a directed path) become identity rows.  A nonpositive diagonal on a
    structurally nonzero row raises.  Entries in [-clamp_tol, 0) are
    clamped to 0 and rows renormalized; more negative entries raise.
    """
    A, alpha, kind = _operator_matrix(lalpha)
    n = A.shape[0]
    if alpha is None:
        raise ValueError("input carries no alpha; build it from a fractional power")
    scale = max(1.0, float(np.abs(A).max()))
    diag = np.diag(A).copy()
    row_mag = np.abs(A).max(axis=1)
    absorbing = row_mag <= 1e-14 * scale
    bad = (~absorbing) & (diag <= 0)
    if np.any(bad):
        node = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"node {node} has nonpositive fractional degree {diag[node]:.3e}"
        )

    P = np.zeros_like(A)
    act = ~absorbing
    P[act, :] = -A[act, :] / diag[act, None]
    P[act, np.flatnonzero(act)] = 0.0
    worst = float(P.min())
    if worst < -clamp_tol:
        i, j = np.unravel_index(int(np.argmin(P)), P.shape)
        raise NumericalError(
            f"kernel entry ({i}, {j}) = {worst:.3e} below clamp tolerance"
        )
    np.clip(P, 0.0, None, out=P)
    sums = P.sum(axis=1)
    P[act, :] /= sums[act, None]
    for i in np.flatnonzero(absorbing):
        P[i, i] = 1.0

    d_alpha = diag.copy()
    d_alpha[absorbing] = 0.0
    return TransitionKernel(P=P, d_alpha=d_alpha, alpha=float(alpha), kind=kind,
                            absorbing=tuple(int(i) for i in np.flatnonzero(absorbing)))


def stationary_distribution(kernel: TransitionKernel, *, tol=1e-10):
    """pi proportional to the fractional degrees, with its residual.

    Valid for kernels built from symmetric L^alpha; a residual above
    ``tol`` (directed or absorbing input) raises.
    """
    total = kernel.d_alpha.sum()
    if total <= 0:
        raise ValueError("fractional degrees do not sum to a positive value")
    pi = kernel.d_alpha / total
    residual = float(np.abs(pi @ kernel.P - pi).max())
    if residual > tol:
        raise NumericalError(
            f"stationarity residual {residual:.3e} above {tol:.1e}; "
            "kernel is not reversible (directed or absorbing input?)"
        )
    return pi, residual


def _check_start(kernel, start):
    start = int(start)
    if not (0 <= start < kernel.n):
        raise ValueError(f"start node {start} out of range")
    return start


def simulate_discrete(kernel: TransitionKernel, start: int, steps: int,
                      seed: int) -> TrajectoryResult:
    """Sample one walk by inverse-CDF draws from a PCG64 stream.

    Absorbing states freeze the walk for the remaining steps.
    """
    start = _check_start(kernel, start)
    steps = int(steps)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    cum = np.cumsum(kernel.P, axis=1)
    absorbing = set(kernel.absorbing)
    states = np.empty(steps + 1, dtype=int)
    states[0] = start
    node = start
    for k in range(1, steps + 1):
        if node in absorbing:
            states[k:] = node
            break
        u = rng.random()
        node = min(int(np.searchsorted(cum[node], u, side="right")), kernel.n - 1)
        states[k] = node
    return TrajectoryResult(times=np.arange(steps + 1), states=states,
                            kind="node-sequence")


def absorption_time_samples(kernel: TransitionKernel, start: int, runs: int,
                            seed: int, *, max_steps=1_000_000) -> np.ndarray:
    """Steps until absorption for ``runs`` independent walks (lockstep).

    Raises :class:`ConvergenceError` if any replica survives ``max_steps``.
    """
    start = _check_start(kernel, start)
    if not kernel.absorbing:
        raise ValueError("kernel has no absorbing state")
    rng = np.random.Generator(np.random.PCG64(seed))
    cum = np.cumsum(kernel.P, axis=1)
    is_abs = np.zeros(kernel.n, dtype=bool)
    is_abs[list(kernel.absorbing)] = True

    state = np.full(runs, start, dtype=int)
    steps = np.zeros(runs, dtype=int)
    alive = ~is_abs[state]
    t = 0
    while np.any(alive):
        t += 1
        if t > max_steps:
            raise ConvergenceError(f"{int(alive.sum())} walks not absorbed "
                                   f"after {max_steps} steps")
        u = rng.random(int(alive.sum()))
        rows = cum[state[alive]]
        nxt = np.minimum((rows < u[:, None]).sum(axis=1), kernel.n - 1)
        state[alive] = nxt
        steps[alive] = t
        alive[alive] = ~is_abs[nxt]
    return steps


def evolve_continuous(kernel: TransitionKernel, u0, times, *,
                      transpose=True) -> TrajectoryResult:
    """Heat-semigroup evolution of a probability vector.

    The generator is I - P (the normalized fractional Laplacian); with
    ``transpose`` (default) its adjoint drives the evolution, which
    conserves mass exactly for every graph.  ``transpose=False`` exposes
    the non-conserving orientation; the 1e-8 drift check then does not
    apply.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and ascending")
    if np.isscalar(u0) or np.ndim(u0) == 0:
        vec = np.zeros(kernel.n)
        vec[_check_start(kernel, u0)] = 1.0
    else:
        vec = np.asarray(u0, dtype=float)
        if vec.shape != (kernel.n,):
            raise ValueError("u0 has the wrong length")
        if vec.min() < -1e-12 or abs(vec.sum() - 1.0) > 1e-8:
            raise ValueError("u0 is not a probability vector")

    G = np.eye(kernel.n) - kernel.P
    M = G.T if transpose else G
    out = np.empty((times.shape[0], kernel.n))
    for k, t in enumerate(times):
        u = matrix_exponential(M, t).matrix @ vec
        if u.min() < -1e-10:
            raise NumericalError(f"negative mass {u.min():.3e} at t={t}")
        np.clip(u, 0.0, None, out=u)
        out[k] = u
    drift = float(np.abs(1.0 - out.sum(axis=1)).max())
    if transpose and drift > 1e-8:
        raise NumericalError(f"conservation drift {drift:.3e} above 1e-8")
    return TrajectoryResult(times=times, states=out, kind="probability",
                            conservation_drift=drift)


def path_fractional_entries(n: int, alpha: float) -> DenseOperator:
    """Closed-form (L_out^alpha) of the directed path on n nodes.

    Row h carries (-1)^g binom(alpha, g) at column h+g up to column n-2;
    the last column closes the zero row sum; the sink row is zero.
    """
    if n < 2:
        raise ValueError("path needs n >= 2")
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    b = binomial_coefficients(alpha, n)
    signed = ((-1.0) ** np.arange(n)) * b
    F = np.zeros((n, n))
    for h in range(n - 1):
        width = (n - 1) - h
        F[h, h:n - 1] = signed[:width]
        F[h, n - 1] = -F[h, h:n - 1].sum()
    return DenseOperator(F, kind=LaplacianKind.DIRECTED_OUT, alpha=alpha,
                         method="closed-form-path")


def cycle_fractional_entries(n: int, alpha: float) -> DenseOperator:
    """Closed-form (L_out^alpha) of the directed cycle on n nodes.

    Circulant with symbol (1 - exp(-2 pi i l / n))^alpha (zero mode mapped
    to 0); entry (h, k) depends on the gap (k - h) mod n.
    """
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    l = np.arange(n)
    symbol = (1.0 - np.exp(-2j * np.pi * l / n)) ** alpha
    symbol[0] = 0.0
    row = np.fft.ifft(symbol)
    resid = float(np.abs(row.imag).max())
    if resid > 1e-10 * max(1.0, float(np.abs(row.real).max())):
        raise NumericalError(f"circulant imaginary residue {resid:.3e}")
    first = row.real
    F = np.empty((n, n))
    for h in range(n):
        F[h] = np.roll(first, h)
    return DenseOperator(F, kind=LaplacianKind.DIRECTED_OUT, alpha=alpha,
                         method="closed-form-cycle")


def cycle_entry_limit(alpha: float, gap: int) -> float:
    """n -> infinity limit of a directed-cycle entry at the given gap:
    Gamma(gap - alpha) / (gap! * Gamma(-alpha))."""
    gap = int(gap)
    if gap < 0:
        raise ValueError("gap must be >= 0")
    if gap == 0:
        return 1.0
    sign = gammasgn(gap - alpha) * gammasgn(-alpha)
    mag = math.exp(gammaln(gap - alpha) - gammaln(gap + 1) - gammaln(-alpha))
    return float(sign * mag)


def expected_absorption_steps(n: int, alpha: float) -> AbsorptionResult:
    """Expected steps to absorption from the first node of the directed
    path, summed in closed form and cross-checked (1e-10) against the
    fundamental-matrix solve; ``n_step`` is the ceiling.
    """
    if n < 2:
        raise ValueError("path needs n >= 2")
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    term = 1.0                        # (-1)^(l-1) binom(-alpha, l-1), l = 1
    total = term
    for l in range(1, n - 1):
        term *= (alpha + l - 1) / l
        total += term

    A = path_fractional_entries(n, alpha).matrix
    block = A[:n - 1, :n - 1]         # I - Q of the absorbing chain
    x = np.linalg.solve(block, np.ones(n - 1))
    fm = float(x[0])
    if abs(total - fm) > 1e-10 * max(1.0, abs(total)):
        raise NumericalError(
            f"absorption cross-check mismatch: series {total!r} vs "
            f"fundamental matrix {fm!r}"
        )
    return AbsorptionResult(expectation=float(total),
                            n_step=int(math.ceil(total)),
                            fundamental_expectation=fm)


def path_transition_asymptotic(alpha: float, gap: int) -> float:
    """Large-gap approximation of the path jump probability:
    Gamma(alpha + 1) sin(pi alpha) / pi * gap^(-alpha-1)."""
    if gap < 1:
        raise ValueError("gap must be >= 1")
    return float(math.gamma(alpha + 1.0) * math.sin(math.pi * alpha) / math.pi
                 * float(gap) ** (-alpha - 1.0))


def return_probability(lbar, times, *, cluster_tol=None) -> ReturnProbabilityCurve:
    """Average return probability (1/n) sum_i exp(-lambda_i t) of the
    normalized generator, with the relative spectral gap
    |lambda|_max / |lambda|_min-nonzero and the zero multiplicity."""
    A, _, _ = _operator_matrix(lbar)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    lam = np.linalg.eigvals(A)
    n = A.shape[0]
    rho = float(np.abs(lam).max(initial=0.0))
    ztol = float(cluster_tol) if cluster_tol is not None else n * np.finfo(float).eps * rho
    zero_mult = int(np.sum(np.abs(lam) <= ztol))
    nonzero = lam[np.abs(lam) > ztol]
    gap = float(np.abs(nonzero).max() / np.abs(nonzero).min()) if nonzero.size else float("nan")

    vals = np.empty(times.shape[0])
    for k, t in enumerate(times):
        z = np.exp(-lam * t).mean()
        if abs(z.imag) > 1e-10 * max(1.0, abs(z.real)):
            raise NumericalError(f"return probability not real at t={t}: {z!r}")
        vals[k] = z.real
    return ReturnProbabilityCurve(times=times, values=vals, spectral_gap=gap,
                                  zero_multiplicity=zero_mult,
                                  eigenvalues=lam)
