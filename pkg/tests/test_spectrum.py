import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings

from ladderfl import NoEmissionError, Params, TruncationError, build_liouvillian, incoherent_spectrum, steady_state
from ladderfl.dressed import diagonalize, transition_frequencies
from ladderfl.dynamics import Propagator, observable_row
from ladderfl.model import lowering_operator, vec
from ladderfl.spectrum import find_peaks, fluctuation_weight, method_cross_check, slowest_decay_rate
from strategies import params

GRID = np.linspace(-150, 150, 4096)


def quad_spectrum(p, omega):
    """S_inc at one frequency by adaptive quadrature of the fluctuation correlation."""
    L = build_liouvillian(p)
    rho = steady_state(L)
    sm = lowering_operator(p.xi)
    n = np.trace(sm.conj().T @ sm @ rho).real
    mean = np.trace(sm @ rho)
    prop = Propagator(L)
    row, x0 = observable_row(sm.conj().T), vec(sm @ rho - mean * rho)

    def f(t):
        return np.real(prop.expectation(row, x0, [t])[0] * np.exp(-1j * omega * t))

    tmax = 40 / slowest_decay_rate(L)
    val, _ = scipy.integrate.quad(f, 0, tmax, limit=4000, epsabs=1e-12)
    return val / (math.pi * n)


@pytest.mark.parametrize("omega", [-71.2, -11.2, 0.0, 3.3, 60.0, 82.4])
def test_eigen_sum_matches_quadrature(omega):
    p = Params(omega=40, xi=1.3)
    got = incoherent_spectrum(build_liouvillian(p), [omega]).incoherent[0]
    assert got == pytest.approx(quad_spectrum(p, omega), rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("omega_drive", [5.0, 40.0])
@pytest.mark.parametrize("xi", [1 / math.sqrt(2), 1.0, math.sqrt(2)])
def test_methods_agree(omega_drive, xi):
    L = build_liouvillian(Params(omega=omega_drive, xi=xi))
    peak = incoherent_spectrum(L, GRID).incoherent.max()
    assert method_cross_check(L, GRID) <= 1e-3 * peak


def test_fft_handles_irregular_grids():
    L = build_liouvillian(Params(omega=40))
    omega = np.sort(np.random.default_rng(3).uniform(-100, 100, 50))
    a = incoherent_spectrum(L, omega).incoherent
    b = incoherent_spectrum(L, omega, method="fft").incoherent
    assert np.max(np.abs(a - b)) <= 1e-3 * a.max()


def test_fft_refuses_short_traces():
    L = build_liouvillian(Params(omega=40))
    with pytest.raises(TruncationError):
        incoherent_spectrum(L, GRID, method="fft", tau_max=5.0 / slowest_decay_rate(L))


@pytest.mark.parametrize("xi", [0.7, 1.0, 1.4])
def test_sum_rule(xi):
    L = build_liouvillian(Params(omega=40, xi=xi))
    wide = np.linspace(-300, 300, 60001)
    area = np.trapezoid(incoherent_spectrum(L, wide).incoherent, wide)
    assert area == pytest.approx(fluctuation_weight(L), rel=0.01)


def test_seven_lines_at_strong_drive():
    p = Params(omega=40)
    s = incoherent_spectrum(build_liouvillian(p), GRID).incoherent
    pos, _ = find_peaks(GRID, s)
    lines = np.sort(list(transition_frequencies(diagonalize(p)).values()))
    assert pos.size == 7
    assert np.max(np.abs(np.sort(pos) - lines)) <= 0.5


def test_two_lines_at_weak_drive():
    s = incoherent_spectrum(build_liouvillian(Params(omega=5)), GRID).incoherent
    pos, _ = find_peaks(GRID, s)
    assert pos == pytest.approx([-60, 60], abs=0.5)


def test_central_splitting_is_lowest_dressed_frequency():
    p = Params(omega=40)
    s = incoherent_spectrum(build_liouvillian(p), GRID).incoherent
    pos, _ = find_peaks(GRID, s)
    inner = pos[np.abs(pos) < 30]
    side = inner[inner > 1].min()
    assert side == pytest.approx(-diagonalize(p).omega_l, rel=0.10)


def test_symmetry_only_for_equal_dipoles():
    sym = incoherent_spectrum(build_liouvillian(Params(omega=40)), GRID).incoherent
    assert np.max(np.abs(sym - sym[::-1])) <= 1e-6 * sym.max()
    asym = incoherent_spectrum(build_liouvillian(Params(omega=40, xi=math.sqrt(2))), GRID).incoherent
    assert np.max(np.abs(asym - asym[::-1])) > 0.05 * asym.max()


def test_coherent_weight_falls_with_drive():
    weights = [incoherent_spectrum(build_liouvillian(Params(omega=o)), [0.0]).coherent_weight for o in (5, 10, 20, 40)]
    assert all(w >= 0 for w in weights)
    assert all(a > b for a, b in zip(weights, weights[1:]))


@settings(max_examples=100)
@given(params(min_omega=0.5))
def test_spectrum_is_nonnegative_and_peak_normalizes(p):
    res = incoherent_spectrum(build_liouvillian(p), np.linspace(-150, 150, 601), normalization="peak")
    assert res.incoherent.min() >= -1e-8
    assert res.incoherent.max() == pytest.approx(1.0, abs=1e-12)
    assert res.coherent_weight >= 0


def test_no_emission_in_both_methods():
    L = build_liouvillian(Params(omega=0))
    for method in ("eigen_sum", "fft"):
        with pytest.raises(NoEmissionError):
            incoherent_spectrum(L, GRID, method=method)


def test_bad_options():
    L = build_liouvillian(Params(omega=5))
    with pytest.raises(ValueError):
        incoherent_spectrum(L, GRID, method="welch")
    with pytest.raises(ValueError):
        incoherent_spectrum(L, GRID, normalization="area")
