"""Entry decay bounds and numerical range profiles.

Off-diagonal entries of matrix functions of a banded or sparse symmetric
matrix decay in the hop distance between nodes.  This module instantiates
Jackson-type polynomial approximation bounds for ``L^alpha`` and
``exp(-t L^alpha)`` on every node pair, and computes numerical range
boundaries, whose excursion into the left half-plane is the obstruction
to extending such bounds to nonsymmetric operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import shortest_path

from .errors import NumericalError
from .graphs import Graph
from .matfun import (
    SpectralData,
    exp_fractional_symmetric,
    fractional_power_symmetric,
    symmetric_spectral_data,
)

#: Jackson inequality constant for best uniform polynomial approximation
#: of Hoelder-continuous functions on an interval.
JACKSON_CONSTANT = 1.0 + np.pi ** 2 / 2.0


def _as_matrix(op) -> np.ndarray:
    A = np.asarray(getattr(op, "matrix", op))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    return A


@dataclass(frozen=True)
class HoelderModulus:
    """Modulus of continuity ``w(x) = x**alpha`` of ``x -> x**alpha``.

    Parameters
    ----------
    alpha : float
        Hoelder exponent in (0, 1].
    """

    alpha: float

    def __call__(self, x):
        return np.power(x, self.alpha)


@dataclass(frozen=True)
class ExpFractionalModulus:
    """Modulus of continuity ``w(x) = 1 - exp(-t * x**alpha)``.

    This is the modulus of ``x -> exp(-t * x**alpha)`` on the positive
    half-line, used for heat-kernel style decay bounds.

    Parameters
    ----------
    t : float
        Nonnegative time.
    alpha : float
        Hoelder exponent in (0, 1].
    """

    t: float
    alpha: float

    def __call__(self, x):
        return -np.expm1(-self.t * np.power(x, self.alpha))


def pattern_distances(A, *, directed: bool = True, source: int | None = None,
                      tol: float = 0.0) -> np.ndarray:
    """Unweighted hop distances on the off-diagonal sparsity pattern.

    Parameters
    ----------
    A : array_like
        Square matrix; an arc ``i -> j`` exists wherever
        ``abs(A[i, j]) > tol`` for ``i != j``.
    directed : bool, optional
        Respect arc orientation.  With ``False`` the pattern is
        symmetrized.
    source : int, optional
        Return distances from this node only; all pairs otherwise.
    tol : float, optional
        Magnitude below which entries count as structural zeros.

    Returns
    -------
    numpy.ndarray
        Hop counts, ``numpy.inf`` for unreachable pairs.  Shape ``(n,)``
        for a single source, ``(n, n)`` otherwise.
    """
    M = np.abs(np.asarray(_as_matrix(A)))
    pattern = (M > tol).astype(np.int8)
    np.fill_diagonal(pattern, 0)
    sparse = csr_array(pattern)
    if source is None:
        return shortest_path(sparse, method="D", directed=directed,
                             unweighted=True)
    n = M.shape[0]
    source = int(source)
    if not 0 <= source < n:
        raise ValueError(f"source {source} out of range for {n} nodes")
    rows = shortest_path(sparse, method="D", directed=directed,
                         unweighted=True, indices=[source])
    return rows[0]


def graph_distances(g: Graph, source: int | None = None, *,
                    undirected: bool = False) -> np.ndarray:
    """Hop distances in a graph, ignoring edge weights.

    Parameters
    ----------
    g : Graph
        Input graph.
    source : int, optional
        Single-source distances if given, all pairs otherwise.
    undirected : bool, optional
        For directed graphs, also traverse arcs backwards.

    Returns
    -------
    numpy.ndarray
        Hop counts with ``numpy.inf`` for unreachable pairs.

    Examples
    --------
    >>> from fraclap.generators import path_graph
    >>> graph_distances(path_graph(5), 0)
    array([0., 1., 2., 3., 4.])
    """
    return pattern_distances(g.weight_matrix,
                             directed=g.directed and not undirected,
                             source=source)


@dataclass(frozen=True)
class DecayReport:
    """Per-pair comparison of observed entries against a decay bound.

    Attributes
    ----------
    mode : str
        ``"power"``, ``"exponential"`` or ``"kernel"``.
    alpha : float
        Fractional exponent of the bound.
    c : float
        Jackson constant ``1 + pi**2/2``.
    rho : float
        Spectral radius of the base operator.
    t : float or None
        Time, exponential mode only.
    n_pairs : int
        Number of checked pairs (hop distance at least 2, finite).
    all_satisfied : bool
        True when every checked pair obeys its bound.
    violations : int
        Number of violating pairs.
    max_ratio : float
        Largest observed/bound ratio over all checked pairs.
    pairs, distances, observed, bounds, satisfied : numpy.ndarray
        Per-pair records; the full pair set, or a seeded subsample when
        one was requested.
    secondary_bounds : numpy.ndarray or None
        Exponential mode also evaluates the weaker linear-in-t bound,
        which dominates the primary one for every pair.
    diagonal_ok : bool or None
        Kernel mode: whether every fractional diagonal entry meets its
        lower bound ``rho**(alpha-1) * L[i, i] - 1e-10``.
    diagonal_margin : float or None
        Kernel mode: worst slack in that lower bound.
    """

    mode: str
    alpha: float
    c: float
    rho: float
    t: float | None
    n_pairs: int
    all_satisfied: bool
    violations: int
    max_ratio: float
    pairs: np.ndarray
    distances: np.ndarray
    observed: np.ndarray
    bounds: np.ndarray
    satisfied: np.ndarray
    secondary_bounds: np.ndarray | None = None
    diagonal_ok: bool | None = None
    diagonal_margin: float | None = None


def _pair_records(mask, observed, bounds, secondary, sample, seed):
    idx = np.argwhere(mask)
    if sample is not None and sample < idx.shape[0]:
        rng = np.random.Generator(np.random.PCG64(seed))
        keep = np.sort(rng.choice(idx.shape[0], size=int(sample),
                                  replace=False))
        idx = idx[keep]
    rows, cols = idx[:, 0], idx[:, 1]
    sec = None if secondary is None else secondary[rows, cols]
    return (idx.astype(np.int64), observed[rows, cols], bounds[rows, cols],
            sec)


def _summarize(mask, observed, bounds):
    obs = observed[mask]
    bnd = bounds[mask]
    with np.errstate(invalid="ignore"):
        ratio = obs / bnd
    ok = obs <= bnd
    return int(mask.sum()), bool(ok.all()), int((~ok).sum()), \
        float(ratio.max()) if obs.size else 0.0


def verify_decay_bounds(L, alpha: float, *, lalpha=None, mode: str = "power",
                        t: float | None = None,
                        data: SpectralData | None = None,
                        sample: int | None = None,
                        seed: int = 0) -> DecayReport:
    """Check power-law decay bounds on a symmetric Laplacian power.

    For every node pair with hop distance ``d >= 2`` in the pattern of
    ``L``, compares the observed entry magnitude against
    ``c * w(rho / (2 * (d - 1)))`` where ``c = 1 + pi**2/2``, ``rho`` is
    the spectral radius of ``L`` and ``w`` is the modulus of continuity
    of the applied function: ``w(x) = x**alpha`` for ``L**alpha``
    (power mode) and ``w(x) = 1 - exp(-t * x**alpha)`` for
    ``exp(-t * L**alpha)`` (exponential mode).  Pairs at distance 0, 1
    or infinity carry no information and are excluded.

    Parameters
    ----------
    L : array_like
        Symmetric (within 1e-12) positive semidefinite matrix.
    alpha : float
        Exponent in (0, 1].
    lalpha : array_like, optional
        Precomputed ``L**alpha`` (power mode); recomputed if omitted.
    mode : {'power', 'exponential'}
        Which matrix function to check.
    t : float, optional
        Time, required in exponential mode.
    data : SpectralData, optional
        Reused eigendecomposition of ``L``.
    sample : int, optional
        Keep only this many per-pair records, subsampled with `seed`.
        Summary statistics always cover every pair.
    seed : int, optional
        Subsampling seed.

    Returns
    -------
    DecayReport

    Raises
    ------
    ValueError
        Nonsymmetric input, bad mode, or missing ``t``.
    """
    A = _as_matrix(L)
    if data is None:
        data = symmetric_spectral_data(A)
    rho = float(np.abs(data.eigenvalues).max())
    D = pattern_distances(A, directed=False)
    mask = (D >= 2) & np.isfinite(D)
    # d >= 2 keeps the base argument rho/(2(d-1)) inside the spectrum window
    arg = np.where(mask, rho / (2.0 * np.where(mask, D - 1.0, 1.0)), 1.0)
    secondary = None
    if mode == "power":
        F = fractional_power_symmetric(A, alpha, data=data) \
            if lalpha is None else lalpha
        observed = np.abs(_as_matrix(F))
        bounds = JACKSON_CONSTANT * HoelderModulus(alpha)(arg)
        t_used = None
    elif mode == "exponential":
        if t is None or t <= 0:
            raise ValueError("exponential mode requires t > 0")
        t_used = float(t)
        E = exp_fractional_symmetric(A, alpha, t_used, data=data)
        observed = np.abs(E.matrix)
        bounds = JACKSON_CONSTANT * ExpFractionalModulus(t_used, alpha)(arg)
        secondary = JACKSON_CONSTANT * t_used * HoelderModulus(alpha)(arg)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bounds = np.where(mask, bounds, np.inf)
    n_pairs, all_ok, violations, max_ratio = _summarize(mask, observed,
                                                        bounds)
    pairs, obs_r, bnd_r, sec_r = _pair_records(mask, observed, bounds,
                                               secondary, sample, seed)
    return DecayReport(
        mode=mode, alpha=float(alpha), c=JACKSON_CONSTANT, rho=rho,
        t=t_used, n_pairs=n_pairs, all_satisfied=all_ok,
        violations=violations, max_ratio=max_ratio, pairs=pairs,
        distances=D[pairs[:, 0], pairs[:, 1]], observed=obs_r,
        bounds=bnd_r, satisfied=obs_r <= bnd_r, secondary_bounds=sec_r)


def verify_p_alpha_bound(kernel, L, alpha: float | None = None, *,
                         data: SpectralData | None = None,
                         sample: int | None = None,
                         seed: int = 0) -> DecayReport:
    """Check decay bounds on fractional transition probabilities.

    Transition probabilities divide ``L**alpha`` rows by the fractional
    diagonal, so combining the entry bound with the diagonal lower bound
    ``(L**alpha)[i, i] >= rho**(alpha-1) * L[i, i]`` gives, per pair at
    hop distance ``d >= 2``,

        ``P[i, j] <= c * rho / (2**alpha * L[i, i]) * (d - 1)**(-alpha)``.

    The diagonal lower bound itself is asserted with slack ``1e-10`` and
    reported through ``diagonal_ok`` and ``diagonal_margin``.

    Parameters
    ----------
    kernel : TransitionKernel
        Kernel built from ``L**alpha`` of a symmetric Laplacian.
    L : array_like
        The symmetric base Laplacian.
    alpha : float, optional
        Defaults to the kernel's exponent.
    data, sample, seed :
        As in `verify_decay_bounds`.

    Returns
    -------
    DecayReport
    """
    A = _as_matrix(L)
    if alpha is None:
        alpha = kernel.alpha
    if alpha is None:
        raise ValueError("alpha not stored on the kernel; pass it explicitly")
    if data is None:
        data = symmetric_spectral_data(A)
    rho = float(np.abs(data.eigenvalues).max())
    D = pattern_distances(A, directed=False)
    mask = (D >= 2) & np.isfinite(D)
    diag = np.diag(A).astype(float)
    observed = np.abs(kernel.P)
    safe_gap = np.where(mask, D - 1.0, 1.0)
    with np.errstate(divide="ignore"):
        bounds = (JACKSON_CONSTANT * rho / (2.0 ** alpha * diag[:, None])
                  * np.power(safe_gap, -alpha))
    bounds = np.where(mask, bounds, np.inf)
    floor = rho ** (alpha - 1.0) * diag
    margin = float((kernel.d_alpha - floor).min())
    n_pairs, all_ok, violations, max_ratio = _summarize(mask, observed,
                                                        bounds)
    pairs, obs_r, bnd_r, _ = _pair_records(mask, observed, bounds, None,
                                           sample, seed)
    return DecayReport(
        mode="kernel", alpha=float(alpha), c=JACKSON_CONSTANT, rho=rho,
        t=None, n_pairs=n_pairs, all_satisfied=all_ok,
        violations=violations, max_ratio=max_ratio, pairs=pairs,
        distances=D[pairs[:, 0], pairs[:, 1]], observed=obs_r,
        bounds=bnd_r, satisfied=obs_r <= bnd_r,
        diagonal_ok=bool(margin >= -1e-10), diagonal_margin=margin)


@dataclass(frozen=True)
class NumericalRangeProfile:
    """Boundary discretization of a numerical range.

    Attributes
    ----------
    angles : numpy.ndarray
        Rotation angles of the supporting hyperplanes.
    boundary : numpy.ndarray
        Complex supporting points ``x* M x``, one per angle.
    support : numpy.ndarray
        Support function values, the top eigenvalue of the rotated
        Hermitian part at each angle.
    min_real : float
        Leftmost point of the range on the real axis, the negated
        support value at angle pi.
    eigenvector_condition : float
        Spectral condition number of an eigenvector matrix; large values
        flag nonnormality (reported, never asserted).
    """

    angles: np.ndarray
    boundary: np.ndarray
    support: np.ndarray
    min_real: float
    eigenvector_condition: float


def numerical_range_profile(M, angles: int = 360) -> NumericalRangeProfile:
    """Boundary points of the numerical range ``{x* M x : |x| = 1}``.

    For each rotation angle ``theta`` the largest eigenvalue and top
    eigenvector of the Hermitian part of ``exp(1j*theta) * M`` give a
    supporting hyperplane and the boundary point it touches.  The range
    of a normal matrix is the convex hull of its eigenvalues; for
    nonnormal operators it can spill into the left half-plane even when
    every eigenvalue has nonnegative real part, which is what this
    profile detects.

    Parameters
    ----------
    M : array_like
        Square matrix, real or complex.
    angles : int, optional
        Grid resolution, at least 8.

    Returns
    -------
    NumericalRangeProfile

    Raises
    ------
    ValueError
        Fewer than 8 angles.
    """
    if angles < 8:
        raise ValueError("need at least 8 angles")
    A = _as_matrix(M).astype(complex)
    thetas = np.linspace(0.0, 2.0 * np.pi, int(angles), endpoint=False)
    boundary = np.empty(thetas.shape[0], dtype=complex)
    support = np.empty(thetas.shape[0])
    for k, theta in enumerate(thetas):
        R = np.exp(1j * theta) * A
        w, V = np.linalg.eigh((R + R.conj().T) / 2.0)
        support[k] = w[-1]
        x = V[:, -1]
        boundary[k] = x.conj() @ A @ x
    H = -(A + A.conj().T) / 2.0
    mu_pi = float(np.linalg.eigvalsh(H)[-1])
    eigvals, vecs = np.linalg.eig(A)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        cond = float(np.linalg.cond(vecs))
    return NumericalRangeProfile(angles=thetas, boundary=boundary,
                                 support=support, min_real=-mu_pi,
                                 eigenvector_condition=cond)


@dataclass(frozen=True)
class DistanceProfile:
    """Log-log fit of largest entry magnitude against hop distance.

    Attributes
    ----------
    distances : numpy.ndarray
        Hop distance classes ``d >= 2`` with a nonzero largest entry.
    max_entries : numpy.ndarray
        Largest entry magnitude per class.
    slope : float
        Fitted slope of ``log(max entry)`` against ``log(d - 1)``.
    intercept : float
        Fitted intercept.
    """

    distances: np.ndarray
    max_entries: np.ndarray
    slope: float
    intercept: float


def distance_decay_slope(values, distances, *,
                         min_distance: int = 2) -> DistanceProfile:
    """Fit the observed decay rate of entries against hop distance.

    Parameters
    ----------
    values : array_like
        Matrix whose entry magnitudes are profiled.
    distances : numpy.ndarray
        Matching all-pairs hop distance matrix.
    min_distance : int, optional
        Smallest distance class included.

    Returns
    -------
    DistanceProfile

    Raises
    ------
    NumericalError
        Fewer than three usable distance classes.
    """
    A = np.abs(_as_matrix(values))
    D = np.asarray(distances)
    finite = np.isfinite(D) & (D >= min_distance)
    classes = np.unique(D[finite])
    ds, peaks = [], []
    for d in classes:
        peak = float(A[D == d].max())
        if peak > 0.0:
            ds.append(float(d))
            peaks.append(peak)
    if len(ds) < 3:
        raise NumericalError("need at least 3 distance classes for a fit")
    ds = np.asarray(ds)
    peaks = np.asarray(peaks)
    slope, intercept = np.polyfit(np.log(ds - 1.0), np.log(peaks), 1)
    return DistanceProfile(distances=ds, max_entries=peaks,
                           slope=float(slope), intercept=float(intercept))
