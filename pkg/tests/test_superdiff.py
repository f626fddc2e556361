import numpy as np
import pytest

from fraclap.superdiff import (LatticeSolution, StableParams, fwhm,
                               lattice_solution, lattice_symbol,
                               lattice_window_stats, stable_density,
                               stable_limit_params, superdiffusion_exponent,
                               verify_stable_limit)


def circulant_route(alpha, orientation, t, zs, n):
    # finite-cycle solution via FFT; conjugate symbol puts mass at +z
    h = lattice_symbol(alpha, orientation, 2 * np.pi * np.arange(n) / n)
    coeff = np.fft.ifft(np.exp(-t * np.conj(h)))
    return np.array([coeff[z % n].real for z in zs])


def test_symbol_closed_forms():
    x = np.array([0.0, 1.0, np.pi])
    und = lattice_symbol(0.5, "undirected", x)
    assert np.allclose(und, np.sqrt(2.0 - 2.0 * np.cos(x)))
    assert und[2] == pytest.approx(2.0, abs=1e-14)
    dr = lattice_symbol(0.5, "directed", x)
    assert np.allclose(dr, (1.0 - np.exp(1j * x)) ** 0.5)
    assert dr[0] == 0.0
    assert dr.real.min() >= 0.0          # principal branch, stable semigroup


def test_solution_initial_condition():
    for orientation in ("undirected", "directed"):
        assert lattice_solution(0.5, orientation, 1e-8, 0) == pytest.approx(1.0, abs=1e-6)
        assert abs(lattice_solution(0.5, orientation, 1e-8, 3)) < 1e-6


def test_quadrature_matches_circulant_undirected():
    zs = [0, 1, 5, -5, 20]
    for alpha in (0.5, 0.75):
        lat = np.array([lattice_solution(alpha, "undirected", 10.0, z)
                        for z in zs])
        fin = circulant_route(alpha, "undirected", 10.0, zs, 4096)
        assert np.abs(lat - fin).max() < 1e-6


def test_quadrature_matches_circulant_directed():
    zs = [0, 1, 5, 20]
    for alpha in (0.5, 0.75):
        lat = np.array([lattice_solution(alpha, "directed", 10.0, z)
                        for z in zs])
        fin = circulant_route(alpha, "directed", 10.0, zs, 65536)
        assert np.abs(lat - fin).max() < 1e-6
        # coarse cycle differs only by the wrap-in of the t*d^(-1-alpha) tail
        t = 50.0
        lat = np.array([lattice_solution(alpha, "directed", t, z)
                        for z in zs])
        fin = circulant_route(alpha, "directed", t, zs, 4096)
        tol = 10.0 * t * 4096.0 ** (-1.0 - alpha) + 1e-6
        assert np.abs(lat - fin).max() < tol


def test_window_mass_conservation_feasible_cases():
    st = lattice_window_stats(0.5, "undirected", 1.0, 200000)
    assert abs(st.mass - 1.0) < 1e-5
    st = lattice_window_stats(0.75, "undirected", 1.0, 20000)
    assert abs(st.mass - 1.0) < 1e-6
    for orientation in ("undirected", "directed"):
        st = lattice_window_stats(1.0, orientation, 1.0, 400)
        assert abs(st.mass - 1.0) < 1e-12
        assert st.min_entry > -1e-15


def test_directed_mass_approaches_one_at_tail_order():
    # window deficit shrinks like kmax^-alpha for the one-sided chain
    alpha = 0.5
    deficits = [1.0 - lattice_window_stats(alpha, "directed", 1.0, k).mass
                for k in (10000, 40000, 160000)]
    assert deficits[0] > deficits[1] > deficits[2] > 0
    order = np.log(deficits[0] / deficits[2]) / np.log(16.0)
    assert abs(order - alpha) < 0.05


def test_stable_density_golden_values():
    assert stable_density(StableParams(2.0, 0.0, 1.0), 0.0) == pytest.approx(
        1.0 / (2.0 * np.sqrt(np.pi)), abs=1e-9)
    assert stable_density(StableParams(1.0, 0.0, 1.0), 0.0) == pytest.approx(
        1.0 / np.pi, abs=1e-9)
    # Cauchy closed form away from the origin
    xs = np.array([0.5, 1.0, 3.0])
    got = stable_density(StableParams(1.0, 0.0, 1.0), xs)
    assert np.abs(got - 1.0 / (np.pi * (1.0 + xs**2))).max() < 1e-9


def test_fwhm_golden_values():
    gauss = StableParams(2.0, 0.0, 1.0)
    assert fwhm(lambda x: stable_density(gauss, x), (-10, 10)) == \
        pytest.approx(4.0 * np.sqrt(np.log(2.0)), abs=1e-9)
    cauchy = StableParams(1.0, 0.0, 1.0)
    assert fwhm(lambda x: stable_density(cauchy, x), (-30, 30)) == \
        pytest.approx(2.0, abs=1e-9)


def test_fwhm_rejects_flat_input():
    with pytest.raises(ValueError):
        fwhm(lambda x: np.ones_like(np.asarray(x, dtype=float)), (-1, 1))


def test_stable_limit_index_map():
    p = stable_limit_params(0.5, "undirected")
    assert (p.alpha, p.beta) == (1.0, 0.0)
    p = stable_limit_params(0.75, "undirected")
    assert (p.alpha, p.beta) == (1.5, 0.0)
    p = stable_limit_params(0.5, "directed")
    assert (p.alpha, p.beta) == (0.5, 1.0)


def test_rescaled_solution_approaches_stable_density():
    rep = verify_stable_limit(0.5, "undirected", [10.0, 100.0])
    assert rep.strictly_decreasing
    assert rep.errors[-1] < 1e-4


def test_superdiffusion_exponent_matches_diffusive_case():
    fit = superdiffusion_exponent(1.0, "undirected", np.logspace(1, 3, 5))
    assert abs(fit.exponent - 1.0) < 0.05
    assert fit.expected == 1.0
    assert fit.r_squared > 0.999


def test_superdiffusion_exponent_grid_validation():
    for bad in ([10.0, 100.0],                       # too few points
                np.linspace(10, 2000, 5),            # not geometric
                np.logspace(0, 2, 5)):               # largest time too small
        with pytest.raises(ValueError):
            superdiffusion_exponent(0.5, "undirected", bad)


def test_width_matches_cauchy_limit():
    # two-sided alpha=0.5 rescales to a Cauchy profile of scale t
    t = 1000.0
    sol = LatticeSolution(0.5, "undirected")
    width = fwhm(lambda z: sol(t, z), (-20.0 * t, 20.0 * t))
    assert abs(width / (2.0 * t) - 1.0) < 0.05
