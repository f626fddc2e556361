"""Nonlocal dynamics on the infinite path graph.

Solutions of ``u'(t) = -L^alpha u(t)`` on the integer lattice have the
Fourier form ``u(t)_z = (1/2pi) int e^{-izx} exp(-t h(x)) dx`` with the
symbol ``h(x) = (2 - 2cos x)**alpha`` for the two-sided (undirected)
chain and ``h(x) = (1 - exp(ix))**alpha`` for the one-sided (directed)
chain.  This module evaluates those integrals for real ``z``, inverts
stable characteristic functions, compares rescaled lattice solutions
against their stable limit densities, and fits the growth exponent of
the squared full width at half maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, NumericalError

#: -log of the integrand tail magnitude at which the domain is cut.
_TAIL_LOG = float(np.log(1e20))
#: -log of the characteristic-function envelope at which it is cut.
_ENVELOPE_LOG = float(np.log(1e14))
#: Hard cap on quadrature intervals per refinement pass.
NODE_CAP = 2 ** 22
#: Elements per chunk when forming the oscillatory phase matrix.
_CHUNK = 2 ** 22

_ORIENTATIONS = ("undirected", "directed")


def _check_orientation(orientation: str) -> str:
    if orientation not in _ORIENTATIONS:
        raise ValueError(f"orientation must be one of {_ORIENTATIONS}")
    return orientation


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(1, n)))))


def lattice_symbol(alpha: float, orientation: str, x) -> np.ndarray:
    """Fourier symbol of the fractional lattice Laplacian.

    Parameters
    ----------
    alpha : float
        Exponent in (0, 1].
    orientation : {'undirected', 'directed'}
        Two-sided chain gives the real symbol ``(2 - 2cos x)**alpha``;
        one-sided gives the principal power ``(1 - exp(1j x))**alpha``.
    x : array_like
        Frequencies.

    Returns
    -------
    numpy.ndarray
        Symbol values, real for the undirected chain.
    """
    _check_orientation(orientation)
    x = np.asarray(x, dtype=float)
    if orientation == "undirected":
        return np.power(2.0 - 2.0 * np.cos(x), alpha)
    return np.power(1.0 - np.exp(1j * x), alpha)


def _directed_symbol_real(alpha: float, x: float) -> float:
    # Re h on [0, pi] in polar form, increasing in x
    return (2.0 * math.sin(x / 2.0)) ** alpha \
        * math.cos(alpha * (x - math.pi) / 2.0)


def _support_cut(alpha: float, orientation: str, t: float) -> float:
    """Smallest x in (0, pi] where t * Re h(x) reaches the tail threshold.

    Beyond the cut the integrand magnitude is below 1e-20, so truncating
    there perturbs the integral by far less than the quadrature
    tolerance while keeping the node count proportional to the width of
    the surviving integrand.
    """
    if orientation == "undirected":
        if t * 4.0 ** alpha <= _TAIL_LOG:
            return math.pi
        v = (_TAIL_LOG / t) ** (1.0 / alpha)
        return math.acos(1.0 - v / 2.0)
    if t * _directed_symbol_real(alpha, math.pi) <= _TAIL_LOG:
        return math.pi
    lo, hi = 0.0, math.pi
    for _ in range(90):
        mid = (lo + hi) / 2.0
        if t * _directed_symbol_real(alpha, mid) < _TAIL_LOG:
            lo = mid
        else:
            hi = mid
    return hi


def _trapezoid_pass(weight: Callable[[np.ndarray], np.ndarray], cut: float,
                    p: int, z: np.ndarray, n: int) -> np.ndarray:
    yc = cut ** (1.0 / p)
    y = np.linspace(-yc, yc, n + 1)
    if p == 1:
        x = y
        w = np.asarray(weight(x), dtype=complex)
    else:
        ay = np.abs(y)
        x = np.sign(y) * ay ** p
        w = np.asarray(weight(x), dtype=complex) * (p * ay ** (p - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    out = np.empty(z.shape[0], dtype=complex)
    cols = max(1, _CHUNK // (n + 1))
    for s in range(0, z.shape[0], cols):
        zc = z[s:s + cols]
        out[s:s + cols] = w @ np.exp(x[:, None] * (-1j * zc[None, :]))
    return out * ((2.0 * yc / n) / (2.0 * math.pi))


def _fourier_inversion(weight, cut: float, p: int, z: np.ndarray, *,
                       n0: int, tol: float, cap: int = NODE_CAP,
                       imag_tol: float = 1e-9) -> np.ndarray:
    """(1/2pi) * integral of exp(-izx) * weight(x) over [-cut, cut].

    Uniform trapezoid in the substituted variable ``y = sign(x)|x|^(1/p)``
    (the substitution removes the |x|^beta cusp of fractional symbols at
    the origin), doubling the interval count until two successive passes
    agree within ``tol`` for every requested ``z``.
    """
    n = min(_next_pow2(n0), cap)
    vals = _trapezoid_pass(weight, cut, p, z, n)
    residual = math.inf
    while n < cap:
        n *= 2
        nxt = _trapezoid_pass(weight, cut, p, z, n)
        residual = float(np.abs(nxt - vals).max())
        vals = nxt
        if residual < tol:
            break
    else:
        raise ConvergenceError(
            f"quadrature stuck at residual {residual:.3e} with {n} intervals")
    worst_imag = float(np.abs(vals.imag).max())
    if worst_imag > imag_tol:
        raise NumericalError(
            f"imaginary residue {worst_imag:.3e} exceeds {imag_tol:.1e}")
    return vals.real


def _substitution_power(beta: float) -> int:
    # smallest integer p with p*beta >= 1; p=1 when the symbol is already C^1
    return 1 if beta >= 1.0 else int(math.ceil(1.0 / beta))


def _start_nodes(zmax: float, cut: float, p: int) -> int:
    cycles = zmax * cut / (2.0 * math.pi)
    return int(max(1024, 64.0 * (1.0 + cycles) * p))


@dataclass(frozen=True)
class LatticeSolution:
    """Evaluator for the lattice solution ``u(t)_z`` at real indices.

    Parameters
    ----------
    alpha : float
        Exponent in (0, 1].
    orientation : {'undirected', 'directed'}
        Chain orientation.
    tol : float, optional
        Quadrature refinement tolerance.
    node_cap : int, optional
        Hard cap on quadrature intervals.
    """

    alpha: float
    orientation: str
    tol: float = 1e-10
    node_cap: int = NODE_CAP

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        _check_orientation(self.orientation)

    def __call__(self, t: float, z):
        """Evaluate ``u(t)_z`` for scalar or array ``z``."""
        t = float(t)
        if t <= 0.0:
            raise ValueError("t must be positive")
        zarr = np.atleast_1d(np.asarray(z, dtype=float))
        cut = _support_cut(self.alpha, self.orientation, t)
        beta = 2.0 * self.alpha if self.orientation == "undirected" \
            else self.alpha
        p = _substitution_power(beta)
        n0 = _start_nodes(float(np.abs(zarr).max(initial=0.0)), cut, p)
        n0 = min(n0, self.node_cap // 2)

        def weight(x):
            return np.exp(-t * lattice_symbol(self.alpha, self.orientation,
                                              x))

        vals = _fourier_inversion(weight, cut, p, zarr, n0=n0, tol=self.tol,
                                  cap=self.node_cap)
        return vals if np.ndim(z) else float(vals[0])


def lattice_solution(alpha: float, orientation: str, t: float, z, *,
                     tol: float = 1e-10):
    """Lattice solution ``u(t)_z``; see `LatticeSolution`.

    Examples
    --------
    >>> round(lattice_solution(0.5, "undirected", 1e-6, 0), 6)
    1.0
    """
    return LatticeSolution(alpha, orientation, tol=tol)(t, z)


@dataclass(frozen=True)
class WindowStats:
    """Integer-index window statistics of a lattice solution.

    Attributes
    ----------
    mass : float
        Sum of ``u(t)_k`` over ``|k| <= kmax``.
    msd : float
        Truncated second moment, sum of ``k**2 u(t)_k`` over the window.
    min_entry : float
        Smallest entry in the window (roundoff should keep it above
        -1e-10).
    kmax : int
        Window half-width.
    grid : int
        FFT grid size used; aliasing folds tails of order ``grid - kmax``
        back into the window, so the grid must dominate the spread.
    """

    mass: float
    msd: float
    min_entry: float
    kmax: int
    grid: int


def lattice_window_stats(alpha: float, orientation: str, t: float,
                         kmax: int, *, grid: int | None = None) -> WindowStats:
    """Mass, truncated second moment and minimum of ``u(t)_k``, |k| <= kmax.

    Computed through one FFT of the sampled symbol, which equals the
    solution on a cycle of length ``grid``; entries are exact up to the
    cyclic fold-in of the far tails.

    Parameters
    ----------
    alpha, orientation, t :
        As in `lattice_solution`.
    kmax : int
        Window half-width.
    grid : int, optional
        FFT size, default the next power of two above ``8 * kmax``.

    Returns
    -------
    WindowStats
    """
    _check_orientation(orientation)
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    n = int(grid) if grid is not None else _next_pow2(max(8 * kmax, 4096))
    if n <= 2 * kmax:
        raise ValueError("grid must exceed twice the window half-width")
    x = 2.0 * math.pi * np.arange(n) / n
    # conjugate symbol so coeff[k] pairs with index +k on directed chains
    coeff = np.fft.ifft(np.exp(-float(t)
                               * np.conj(lattice_symbol(alpha, orientation,
                                                        x))))
    worst_imag = float(np.abs(coeff.imag).max())
    if worst_imag > 1e-9:
        raise NumericalError(f"imaginary residue {worst_imag:.3e} in FFT")
    ks = np.arange(-kmax, kmax + 1)
    vals = coeff.real[np.mod(ks, n)]
    return WindowStats(mass=float(vals.sum()),
                       msd=float((ks.astype(float) ** 2 * vals).sum()),
                       min_entry=float(vals.min()), kmax=int(kmax), grid=n)


@dataclass(frozen=True)
class StableParams:
    """Parameters of a stable distribution with characteristic function
    ``exp(-|gamma z|**alpha (1 + 1j * beta * sign(z) * omega))`` where
    ``omega = -tan(pi alpha / 2)``.

    Only the symmetric (``beta = 0``) and maximally skewed (``beta = 1``)
    families are supported, and ``alpha = 1`` requires ``beta = 0``
    (the skew correction degenerates there).

    Parameters
    ----------
    alpha : float
        Stability index in (0, 2].
    beta : float
        Skewness, 0 or 1.
    gamma : float
        Positive scale.
    delta : float
        Location, fixed at 0.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError("alpha must lie in (0, 2]")
        if self.beta not in (0.0, 1.0):
            raise ValueError("only beta in {0, 1} is supported")
        if self.alpha == 1.0 and self.beta != 0.0:
            raise ValueError("alpha = 1 requires beta = 0")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.delta != 0.0:
            raise ValueError("delta is fixed at 0")

    @property
    def omega(self) -> float:
        """Skew phase factor ``-tan(pi alpha / 2)`` (0 when unused)."""
        if self.beta == 0.0:
            return 0.0
        return -math.tan(math.pi * self.alpha / 2.0)

    def characteristic(self, z) -> np.ndarray:
        """Characteristic function values at real frequencies ``z``."""
        z = np.asarray(z, dtype=float)
        mag = np.power(np.abs(self.gamma * z), self.alpha)
        phase = 1.0 + 1j * self.beta * np.sign(z) * self.omega
        return np.exp(-mag * phase)


def stable_density(params: StableParams, xi, *, tol: float = 1e-10):
    """Stable density by Fourier inversion of its characteristic function.

    Parameters
    ----------
    params : StableParams
        Distribution parameters.
    xi : array_like
        Evaluation points.
    tol : float, optional
        Quadrature refinement tolerance.

    Returns
    -------
    float or numpy.ndarray
        Density values; negative roundoff above -1e-9 is clamped to 0.

    Examples
    --------
    >>> gauss = StableParams(alpha=2.0, beta=0.0, gamma=1.0)
    >>> abs(stable_density(gauss, 0.0) - 1.0 / (2.0 * math.sqrt(math.pi)))
    ... < 1e-9
    True
    """
    xiarr = np.atleast_1d(np.asarray(xi, dtype=float))
    zmax = _ENVELOPE_LOG ** (1.0 / params.alpha) / params.gamma
    p = _substitution_power(params.alpha)
    n0 = min(_start_nodes(float(np.abs(xiarr).max(initial=0.0)), zmax, p),
             NODE_CAP // 2)
    vals = _fourier_inversion(params.characteristic, zmax, p, xiarr,
                              n0=n0, tol=tol)
    negative = vals < 0.0
    if np.any(vals < -1e-9):
        raise NumericalError(
            f"density fell to {vals.min():.3e}, below the roundoff floor")
    vals = np.where(negative, 0.0, vals)
    return vals if np.ndim(xi) else float(vals[0])


@dataclass(frozen=True)
class StableLimitReport:
    """Sup-norm distance of rescaled lattice solutions to their limit.

    Attributes
    ----------
    alpha : float
        Lattice exponent.
    orientation : str
        Chain orientation.
    t_values : numpy.ndarray
        Increasing times.
    errors : numpy.ndarray
        Sup over the grid of |rescaled solution - limit density| per time.
    xi : numpy.ndarray
        Comparison grid.
    target : numpy.ndarray
        Limit density on the grid.
    rescaled : tuple of numpy.ndarray
        Rescaled solution per time.
    strictly_decreasing : bool
        Whether the whole error sequence decreases strictly.
    tail_decreasing : bool
        Whether the last three errors decrease strictly.
    """

    alpha: float
    orientation: str
    t_values: np.ndarray
    errors: np.ndarray
    xi: np.ndarray
    target: np.ndarray
    rescaled: tuple
    strictly_decreasing: bool
    tail_decreasing: bool


def stable_limit_params(alpha: float, orientation: str) -> StableParams:
    """Limit density parameters for the rescaled lattice solution.

    The two-sided chain rescaled by ``t**(1/(2 alpha))`` tends to the
    symmetric stable density with index ``2 alpha`` and unit scale; the
    one-sided chain rescaled by ``t**(1/alpha)`` tends to the maximally
    skewed density with index ``alpha`` and scale
    ``cos(pi alpha / 2)**(1/alpha)``.
    """
    _check_orientation(orientation)
    if not 0.0 < alpha < 1.0:
        raise ValueError("the stable limit requires alpha in (0, 1)")
    if orientation == "undirected":
        return StableParams(alpha=2.0 * alpha, beta=0.0, gamma=1.0)
    gamma = math.cos(math.pi * alpha / 2.0) ** (1.0 / alpha)
    return StableParams(alpha=alpha, beta=1.0, gamma=gamma)


def verify_stable_limit(alpha: float, orientation: str, t_values, xi=None, *,
                        tol: float = 1e-10) -> StableLimitReport:
    """Compare rescaled lattice solutions against the stable limit law.

    For each time ``t`` evaluates ``s_t * u(t)_{s_t xi}`` with
    ``s_t = t**(1/(2 alpha))`` (undirected) or ``t**(1/alpha)``
    (directed) on the grid and reports the sup-norm distance to the
    limit density; the distances should shrink as ``t`` grows.

    Parameters
    ----------
    alpha : float
        Exponent in (0, 1).
    orientation : {'undirected', 'directed'}
        Chain orientation.
    t_values : array_like
        Strictly increasing positive times.
    xi : array_like, optional
        Comparison grid; defaults to 41 points on [-8, 8] (undirected)
        or [-2, 10] (directed, whose limit is supported on the right
        half-line).
    tol : float, optional
        Quadrature tolerance.

    Returns
    -------
    StableLimitReport
    """
    params = stable_limit_params(alpha, orientation)
    ts = np.asarray(t_values, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or np.any(np.diff(ts) <= 0) \
            or ts[0] <= 0:
        raise ValueError("t_values must be increasing positive times")
    if xi is None:
        xi = np.linspace(-8.0, 8.0, 41) if orientation == "undirected" \
            else np.linspace(-2.0, 10.0, 41)
    xi = np.asarray(xi, dtype=float)
    target = np.atleast_1d(stable_density(params, xi, tol=tol))
    scale_exp = 1.0 / (2.0 * alpha) if orientation == "undirected" \
        else 1.0 / alpha
    solution = LatticeSolution(alpha, orientation, tol=tol)
    rescaled = []
    errors = np.empty(ts.shape[0])
    for i, t in enumerate(ts):
        st = t ** scale_exp
        r = st * np.atleast_1d(solution(t, st * xi))
        rescaled.append(r)
        errors[i] = float(np.abs(r - target).max())
    diffs = np.diff(errors)
    tail = diffs[-2:] if diffs.size >= 2 else diffs
    return StableLimitReport(
        alpha=float(alpha), orientation=orientation, t_values=ts,
        errors=errors, xi=xi, target=target, rescaled=tuple(rescaled),
        strictly_decreasing=bool(np.all(diffs < 0)),
        tail_decreasing=bool(np.all(tail < 0)))


def _sample_curve(evaluator, xs):
    try:
        ys = np.asarray(evaluator(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys, True
    except (TypeError, ValueError):
        pass
    return np.array([float(evaluator(float(x))) for x in xs]), False


def fwhm(evaluator, bracket, *, samples: int = 129, tol: float = 1e-10,
         value_noise: float = 1e-9) -> float:
    """Full width at half maximum of a unimodal curve.

    Locates the peak by golden-section refinement of a coarse sample,
    then each half-maximum crossing by bisection.  If every sample left
    of the peak stays above half maximum, the left bracket edge is taken
    as the support boundary (one-sided densities); place the bracket so
    that its left edge sits at the support edge in that case.

    Parameters
    ----------
    evaluator : callable
        Density evaluator, scalar or vectorized over ndarray input.
    bracket : tuple of float
        Search interval containing the peak strictly inside.
    samples : int, optional
        Coarse sample count (at least 5).
    tol : float, optional
        Crossing resolution.
    value_noise : float, optional
        Absolute wiggle allowed by the unimodality check; keep above the
        evaluator's own accuracy.

    Returns
    -------
    float
        Width between the two crossings.

    Raises
    ------
    ValueError
        Peak on the bracket edge, non-unimodal samples, or no crossing.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not hi > lo:
        raise ValueError("empty bracket")
    if samples < 5:
        raise ValueError("need at least 5 samples")
    xs = np.linspace(lo, hi, int(samples))
    ys, vectorized = _sample_curve(evaluator, xs)

    def f(x: float) -> float:
        if vectorized:
            return float(np.asarray(evaluator(np.array([x])))[0])
        return float(evaluator(x))

    k = int(np.argmax(ys))
    if k in (0, xs.shape[0] - 1):
        raise ValueError("peak not interior to the bracket")
    # band-limited index extensions ring at ~1e-5 of the peak near empty
    # support, so the floor is relative with an absolute backstop
    noise = max(1e-4 * float(ys[k]), value_noise)
    rises = np.diff(ys[:k + 1])
    falls = np.diff(ys[k:])
    if np.any(rises < -noise) or np.any(falls > noise):
        raise ValueError("samples are not unimodal on the bracket")

    # golden-section sharpening of the peak
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(xs[k - 1]), float(xs[k + 1])
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if b - a <= max(tol, 1e-13):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    peak = max(float(ys[k]), fc, fd)
    half = peak / 2.0

    def bisect(xlo: float, xhi: float) -> float:
        # invariant: f(xlo) >= half > f(xhi)
        for _ in range(200):
            if abs(xhi - xlo) <= tol:
                break
            mid = (xlo + xhi) / 2.0
            if f(mid) >= half:
                xlo = mid
            else:
                xhi = mid
        return (xlo + xhi) / 2.0

    below_right = np.flatnonzero(ys[k:] < half)
    if below_right.size == 0:
        raise ValueError("no right half-maximum crossing inside the bracket")
    i = k + int(below_right[0])
    right = bisect(float(xs[i - 1]), float(xs[i]))

    below_left = np.flatnonzero(ys[:k + 1] < half)
    if below_left.size == 0:
        left = lo  # support boundary of a one-sided density
    else:
        j = int(below_left[-1])
        left = bisect(float(xs[j + 1]), float(xs[j]))
    return right - left


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of ``log FWHM**2`` against ``log t``.

    Attributes
    ----------
    alpha : float
        Lattice exponent.
    orientation : str
        Chain orientation.
    times : numpy.ndarray
        Fit abscissae.
    widths : numpy.ndarray
        Full widths at half maximum in lattice units.
    exponent : float
        Fitted slope of ``log FWHM**2`` vs ``log t``.
    r_squared : float
        Fit quality.
    expected : float
        Limit-law prediction, ``1/alpha`` (undirected) or ``2/alpha``
        (directed).
    """

    alpha: float
    orientation: str
    times: np.ndarray
    widths: np.ndarray
    exponent: float
    r_squared: float
    expected: float


def _auto_bracket(g, orientation: str) -> tuple[float, float]:
    lo, hi = (-8.0, 8.0) if orientation == "undirected" else (-1.0, 10.0)
    for _ in range(8):
        xs = np.linspace(lo, hi, 41)
        ys, _ = _sample_curve(g, xs)
        k = int(np.argmax(ys))
        peak = float(ys[k])
        grew = False
        if k == 0 or ys[0] > 0.45 * peak:
            lo -= 0.6 * (hi - lo)
            grew = True
        if k == xs.shape[0] - 1 or ys[-1] > 0.45 * peak:
            hi += 0.6 * (hi - lo)
            grew = True
        if not grew:
            return lo, hi
    return lo, hi


def superdiffusion_exponent(alpha: float, orientation: str, t_values, *,
                            samples: int = 129,
                            tol: float = 1e-10) -> ExponentFit:
    """Fit the spreading exponent of the lattice solution.

    Measures the full width at half maximum of ``u(t)`` on a geometric
    time grid in rescaled coordinates (so the search bracket stays O(1))
    and fits the slope of ``log FWHM**2`` against ``log t``.  Values
    above 1 flag superdiffusive spreading.

    Parameters
    ----------
    alpha : float
        Exponent in (0, 1].
    orientation : {'undirected', 'directed'}
        Chain orientation.
    t_values : array_like
        Geometric grid, at least 5 points, largest at least 1e3.
    samples : int, optional
        Coarse FWHM sample count.
    tol : float, optional
        Quadrature and crossing tolerance.

    Returns
    -------
    ExponentFit

    Raises
    ------
    ValueError
        Bad grid.
    NumericalError
        Fit quality below r^2 = 0.99.
    """
    _check_orientation(orientation)
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    ts = np.asarray(t_values, dtype=float)
    if ts.ndim != 1 or ts.size < 5:
        raise ValueError("need a geometric grid with at least 5 points")
    if np.any(np.diff(ts) <= 0) or ts[0] <= 0:
        raise ValueError("times must be strictly increasing and positive")
    if ts[-1] < 1e3:
        raise ValueError("largest time must be at least 1e3")
    ratios = ts[1:] / ts[:-1]
    if ratios.max() / ratios.min() > 1.02:
        raise ValueError("grid must be geometric (constant ratio within 2%)")
    scale_exp = 1.0 / (2.0 * alpha) if orientation == "undirected" \
        else 1.0 / alpha
    solution = LatticeSolution(alpha, orientation, tol=tol)
    widths = np.empty(ts.shape[0])
    for i, t in enumerate(ts):
        st = t ** scale_exp

        def g(xi):
            return solution(t, st * np.asarray(xi, dtype=float))

        bracket = _auto_bracket(g, orientation)
        widths[i] = fwhm(g, bracket, samples=samples, tol=tol) * st
    logt = np.log(ts)
    logw2 = 2.0 * np.log(widths)
    slope, intercept = np.polyfit(logt, logw2, 1)
    pred = slope * logt + intercept
    ss_res = float(((logw2 - pred) ** 2).sum())
    ss_tot = float(((logw2 - logw2.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    if r2 < 0.99:
        raise NumericalError(f"exponent fit r^2 = {r2:.4f} below 0.99")
    expected = 1.0 / alpha if orientation == "undirected" else 2.0 / alpha
    return ExponentFit(alpha=float(alpha), orientation=orientation, times=ts,
                       widths=widths, exponent=float(slope),
                       r_squared=float(r2), expected=float(expected))
