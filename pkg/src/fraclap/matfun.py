"""Matrix functions of graph Laplacians.

Fractional powers L^alpha for alpha in (0, 1] via a symmetric
eigendecomposition or, for nonsymmetric input, a complex Schur form with
eigenvalue clustering and a blocked Parlett recurrence.  The zero
eigenvalue cluster of a singular Laplacian is mapped exactly to 0.  A
truncated binomial series provides an independent cross-check, and
``verify_m_matrix`` reports the structural invariants the result must
satisfy (nonpositive off-diagonal, zero row sums, spectrum in the closed
right half-plane).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import ConvergenceError, NumericalError
from .graphs import DenseOperator

__all__ = [
    "SpectralData",
    "FractionalPowerResult",
    "SeriesApproximation",
    "MMatrixReport",
    "symmetric_spectral_data",
    "schur_spectral_data",
    "fractional_power_symmetric",
    "fractional_power_general",
    "fractional_power_series",
    "exp_fractional_symmetric",
    "matrix_exponential",
    "verify_m_matrix",
    "binomial_coefficients",
]

_EPS = np.finfo(float).eps


def _as_matrix(M, *, square=True) -> np.ndarray:
    A = M.matrix if isinstance(M, DenseOperator) else np.asarray(M, dtype=float)
    if A.ndim != 2 or (square and A.shape[0] != A.shape[1]):
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def _meta_kind(M):
    return M.kind if isinstance(M, DenseOperator) else None


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition (symmetric) or complex Schur form (general).

    ``basis`` columns are orthonormal; ``triangular`` is the Schur factor
    on the general path and None on the symmetric one.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    triangular: np.ndarray | None
    symmetric: bool


@dataclass(frozen=True)
class FractionalPowerResult:
    """Fractional power plus the spectral bookkeeping behind it.

    ``zero_cluster`` indexes the entries of ``eigenvalues`` that were
    mapped exactly to 0.
    """

    operator: DenseOperator
    alpha: float
    zero_cluster: tuple[int, ...]
    method: str
    eigenvalues: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix


@dataclass(frozen=True)
class SeriesApproximation:
    """Truncated binomial series for L^alpha with its remainder estimate.

    The estimate rho^alpha * |sum_{k>terms} (-1)^k binom(alpha, k)| bounds
    the max-norm truncation error because the powers of B/rho are
    row-stochastic.
    """

    operator: DenseOperator
    remainder: float
    terms: int


@dataclass(frozen=True)
class MMatrixReport:
    is_sign_pattern: bool
    max_positive_offdiag: float
    min_diag: float
    spectrum_ok: bool
    max_abs_row_sum: float
    min_real_eigenvalue: float


def symmetric_spectral_data(L) -> SpectralData:
    """Eigendecomposition of a symmetric matrix (checked to 1e-12)."""
    A = _as_matrix(L)
    scale = max(1.0, float(np.abs(A).max()))
    if float(np.abs(A - A.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric within 1e-12")
    w, U = np.linalg.eigh((A + A.T) / 2.0)
    ortho = float(np.abs(U.T @ U - np.eye(A.shape[0])).max())
    if ortho > 1e-10:
        raise NumericalError(f"eigenvector orthonormality residue {ortho:.3e}")
    return SpectralData(eigenvalues=w, basis=U, triangular=None, symmetric=True)


def schur_spectral_data(M) -> SpectralData:
    """Complex Schur form of a real square matrix."""
    A = _as_matrix(M)
    T, Q = scipy.linalg.schur(A.astype(complex), output="complex")
    return SpectralData(eigenvalues=np.diag(T).copy(), basis=Q,
                        triangular=T, symmetric=False)


def _clamped_powers(w, alpha, cluster_tol, n):
    rho = float(np.abs(w).max(initial=0.0))
    ztol = float(cluster_tol) if cluster_tol is not None else n * _EPS * rho
    floor = -10.0 * max(ztol, n * _EPS * rho)
    if np.any(w < floor):
        bad = float(w.min())
        raise NumericalError(
            f"eigenvalue {bad:.6e} below the negative-roundoff floor {floor:.3e}"
        )
    zero = (np.abs(w) <= ztol) | (w < 0)
    powers = np.zeros_like(w)
    powers[~zero] = w[~zero] ** alpha
    return powers, np.flatnonzero(zero)


def fractional_power_symmetric(L, alpha, *, data: SpectralData | None = None,
                               cluster_tol=None) -> FractionalPowerResult:
    """L^alpha of a symmetric positive semidefinite matrix.

    Eigenvalues with magnitude at most ``cluster_tol`` (default
    n * eps * rho(L)) map to 0; small negative roundoff eigenvalues are
    clamped to 0, anything below -10x the tolerance raises.  Pass a
    precomputed ``data`` to reuse one factorization across alpha values.
    """
    alpha = _check_alpha(alpha)
    if data is None:
        data = symmetric_spectral_data(L)
    elif not data.symmetric:
        raise ValueError("spectral data is not from the symmetric path")
    w, U = data.eigenvalues, data.basis
    powers, zero_idx = _clamped_powers(w, alpha, cluster_tol, w.shape[0])
    F = (U * powers) @ U.T
    F = (F + F.T) / 2.0
    op = DenseOperator(F, kind=_meta_kind(L), alpha=alpha, method="symmetric-eig")
    return FractionalPowerResult(operator=op, alpha=alpha,
                                 zero_cluster=tuple(int(i) for i in zero_idx),
                                 method="symmetric-eig", eigenvalues=w.copy())


def exp_fractional_symmetric(L, alpha, t, *, data: SpectralData | None = None,
                             cluster_tol=None) -> DenseOperator:
    """exp(-t L^alpha) through the same symmetric eigendecomposition."""
    alpha = _check_alpha(alpha)
    t = float(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if data is None:
        data = symmetric_spectral_data(L)
    w, U = data.eigenvalues, data.basis
    powers, _ = _clamped_powers(w, alpha, cluster_tol, w.shape[0])
    F = (U * np.exp(-t * powers)) @ U.T
    F = (F + F.T) / 2.0
    return DenseOperator(F, kind=_meta_kind(L), alpha=alpha,
                         method="symmetric-eig-exp")


def _cluster_labels(lam, zero_mask, separation):
    """Transitive-closure clustering of the nonzero eigenvalues.

    Two eigenvalues chain when |li - lj| < separation * max(1, |li|, |lj|).
    Label 0 is reserved for the zero cluster (possibly empty).
    """
    n = lam.shape[0]
    idx = np.flatnonzero(~zero_mask)
    parent = {int(i): int(i) for i in idx}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            i, j = int(idx[a]), int(idx[b])
            tol = separation * max(1.0, abs(lam[i]), abs(lam[j]))
            if abs(lam[i] - lam[j]) < tol:
                parent[find(i)] = find(j)

    labels = np.zeros(n, dtype=int)
    next_label = 1
    seen = {}
    for i in range(n):
        if zero_mask[i]:
            continue
        r = find(int(i))
        if r not in seen:
            seen[r] = next_label
            next_label += 1
        labels[i] = seen[r]
    return labels


def _reorder_schur(T, Q, labels):
    """ztrexc selection pass making equal labels contiguous (zero cluster
    first, then first-appearance order).  Returns T, Q, blocks."""
    order = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    if 0 in order:
        order.remove(0)
        order.insert(0, 0)

    work = list(int(x) for x in labels)
    pos = 0
    for lab in order:
        count = work.count(lab)
        for _ in range(count):
            j = work.index(lab, pos)
            if j != pos:
                T, Q, info = lapack.ztrexc(T, Q, j + 1, pos + 1)
                if info != 0:
                    raise NumericalError(f"Schur reordering failed (info={info})")
                work.insert(pos, work.pop(j))
            pos += 1

    blocks = []
    start = 0
    for k in range(1, len(work) + 1):
        if k == len(work) or work[k] != work[k - 1]:
            blocks.append((start, k, work[start]))
            start = k
    return T, Q, blocks


def _atomic_power(Tb, alpha):
    """Principal power of a nonsingular triangular diagonal block."""
    m = Tb.shape[0]
    if m == 1:
        return np.array([[Tb[0, 0] ** alpha]], dtype=complex)
    if alpha == 1.0:
        return Tb.copy()
    F = scipy.linalg.fractional_matrix_power(Tb, alpha)
    if not np.all(np.isfinite(F)):
        raise NumericalError("atomic block power produced non-finite entries")
    # f(triangular) is triangular; roundoff below the diagonal is discarded
    low = np.abs(np.tril(F, -1)).max(initial=0.0)
    if low > 1e-10 * max(1.0, np.abs(F).max()):
        raise NumericalError(f"atomic block lost triangularity ({low:.3e})")
    return np.triu(np.asarray(F, dtype=complex))


def fractional_power_general(M, alpha, *, cluster_tol=None,
                             separation=0.1) -> FractionalPowerResult:
    """M^alpha for a real matrix with spectrum in the closed right
    half-plane (singular M-matrices included).

    Complex Schur form, transitive-closure eigenvalue clustering with
    chaining threshold ``separation * max(1, |lambda|)``, exact zero
    mapping for the cluster with |lambda| <= cluster_tol (default
    n * eps * rho(M)), atomic blocks by inverse scaling and squaring, and
    the blocked Parlett recurrence for the off-diagonal blocks.  The
    result is realified; an imaginary residue above 1e-10 * max|result|
    raises :class:`NumericalError`.
    """
    alpha = _check_alpha(alpha)
    A = _as_matrix(M)
    n = A.shape[0]
    data = schur_spectral_data(A)
    T, Q = data.triangular.copy(), data.basis.copy()
    lam = np.diag(T)

    rho = float(np.abs(lam).max(initial=0.0))
    ztol = float(cluster_tol) if cluster_tol is not None else n * _EPS * rho
    zero_mask = np.abs(lam) <= ztol
    floor = -10.0 * max(ztol, n * _EPS * rho)
    bad = (~zero_mask) & (lam.real < floor)
    if np.any(bad):
        worst = lam[bad][np.argmin(lam[bad].real)]
        raise NumericalError(
            f"eigenvalue {worst!r} outside the principal-branch domain "
            f"(real-part floor {floor:.3e})"
        )

    labels = _cluster_labels(lam, zero_mask, separation)
    T, Q, blocks = _reorder_schur(T, Q, labels)

    F = np.zeros_like(T)
    for s0, s1, lab in blocks:
        if lab == 0:
            continue
        F[s0:s1, s0:s1] = _atomic_power(T[s0:s1, s0:s1], alpha)

    p = len(blocks)
    for gap in range(1, p):
        for bi in range(p - gap):
            bj = bi + gap
            r0, r1, _ = blocks[bi]
            c0, c1, _ = blocks[bj]
            rows, cols = slice(r0, r1), slice(c0, c1)
            C = F[rows, rows] @ T[rows, cols] - T[rows, cols] @ F[cols, cols]
            if gap > 1:
                mid = slice(r1, c0)
                C += F[rows, mid] @ T[mid, cols] - T[rows, mid] @ F[mid, cols]
            if r1 - r0 == 1 and c1 - c0 == 1:
                denom = T[r0, r0] - T[c0, c0]
                F[r0, c0] = C[0, 0] / denom
            else:
                X, scale, info = lapack.ztrsyl(T[rows, rows], T[cols, cols],
                                               C, isgn=-1)
                if info != 0 or scale == 0.0:
                    raise NumericalError(
                        "Parlett recurrence breakdown between clusters "
                        f"{blocks[bi][2]} and {blocks[bj][2]} "
                        f"(eigenvalues near {T[r0, r0]!r} / {T[c0, c0]!r})"
                    )
                F[rows, cols] = X / scale

    R = Q @ F @ Q.conj().T
    resid = float(np.abs(R.imag).max())
    limit = 1e-10 * max(1.0, float(np.abs(R.real).max()))
    if resid > limit:
        raise NumericalError(
            f"imaginary residue {resid:.3e} above realification tolerance"
        )
    lam_ordered = np.diag(T).copy()
    zero_count = blocks[0][1] - blocks[0][0] if blocks and blocks[0][2] == 0 else 0
    op = DenseOperator(R.real.copy(), kind=_meta_kind(M), alpha=alpha,
                       method="schur-parlett")
    return FractionalPowerResult(operator=op, alpha=alpha,
                                 zero_cluster=tuple(range(zero_count)),
                                 method="schur-parlett",
                                 eigenvalues=lam_ordered)


def binomial_coefficients(alpha: float, count: int) -> np.ndarray:
    """binom(alpha, k) for k = 0..count-1 by the stable product recurrence."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = np.empty(count)
    out[0] = 1.0
    for k in range(1, count):
        out[k] = out[k - 1] * (alpha - (k - 1)) / k
    return out


def fractional_power_series(L, alpha, terms: int) -> SeriesApproximation:
    """Truncated binomial series rho^alpha * sum_k binom(alpha,k) (-1)^k
    (B/rho)^k with B = rho I - L and rho = max diagonal degree.

    Valid for combinatorial Laplacians (checked: nonpositive off-diagonal,
    nonnegative diagonal, zero row sums).  Returns the partial sum and the
    scalar remainder estimate that bounds the max-norm truncation error.
    """
    alpha = _check_alpha(alpha)
    terms = int(terms)
    if terms < 0:
        raise ValueError("terms must be >= 0")
    A = _as_matrix(L)
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max()))
    off = A - np.diag(np.diag(A))
    if off.max(initial=0.0) > 1e-12 * scale:
        raise ValueError("positive off-diagonal entry: not a Laplacian sign pattern")
    if np.diag(A).min(initial=0.0) < -1e-12 * scale:
        raise ValueError("negative diagonal entry: not a Laplacian sign pattern")
    if float(np.abs(A.sum(axis=1)).max()) > 1e-10 * scale:
        raise ValueError("row sums not zero: not a combinatorial Laplacian")

    rho = float(np.diag(A).max(initial=0.0))
    if rho == 0.0:
        op = DenseOperator(np.zeros_like(A), kind=_meta_kind(L), alpha=alpha,
                           method="series-oracle")
        return SeriesApproximation(operator=op, remainder=0.0, terms=terms)

    Bs = np.eye(n) - A / rho          # B / rho, row-stochastic and nonnegative
    S = np.eye(n)
    P = np.eye(n)
    coeff = 1.0                        # (-1)^k binom(alpha, k)
    partial = 1.0
    for k in range(1, terms + 1):
        coeff *= (k - 1 - alpha) / k
        P = P @ Bs
        S += coeff * P
        partial += coeff
    remainder = float(rho ** alpha * abs(partial))
    op = DenseOperator(rho ** alpha * S, kind=_meta_kind(L), alpha=alpha,
                       method="series-oracle")
    return SeriesApproximation(operator=op, remainder=remainder, terms=terms)


def matrix_exponential(M, t) -> DenseOperator:
    """exp(-t M) by scaling and squaring with diagonal Pade approximants.

    ``t`` must be nonnegative; t = 0 returns the exact identity.  A
    Gershgorin bound on the spectrum flags overflow before computing.
    """
    A = _as_matrix(M)
    t = float(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    n = A.shape[0]
    if t == 0.0:
        return DenseOperator(np.eye(n), kind=_meta_kind(M), method="expm")
    growth = np.diag(A) - (np.abs(A).sum(axis=1) - np.abs(np.diag(A)))
    if t * max(0.0, -float(growth.min())) > 700.0:
        raise NumericalError("exp(-tM) would overflow (Gershgorin bound)")
    E = scipy.linalg.expm(-t * A)
    if not np.all(np.isfinite(E)):
        raise NumericalError("matrix exponential overflowed")
    return DenseOperator(E, kind=_meta_kind(M), method="expm")


def verify_m_matrix(M, tol: float = 1e-10) -> MMatrixReport:
    """Check the singular-M-matrix structure of a (fractional) Laplacian:
    off-diagonal <= tol, diagonal >= -tol, row sums within tol of zero,
    eigenvalue real parts >= -tol (all scaled by max(1, max|M|))."""
    A = _as_matrix(M)
    scale = max(1.0, float(np.abs(A).max()))
    off = A - np.diag(np.diag(A))
    max_off = float(off.max(initial=0.0))
    min_diag = float(np.diag(A).min(initial=0.0))
    max_row = float(np.abs(A.sum(axis=1)).max())
    eigs = np.linalg.eigvals(A)
    min_re = float(eigs.real.min())
    sign_ok = (max_off <= tol * scale and min_diag >= -tol * scale
               and max_row <= tol * scale)
    return MMatrixReport(
        is_sign_pattern=bool(sign_ok),
        max_positive_offdiag=max_off,
        min_diag=min_diag,
        spectrum_ok=bool(min_re >= -tol * scale),
        max_abs_row_sum=max_row,
        min_real_eigenvalue=min_re,
    )
