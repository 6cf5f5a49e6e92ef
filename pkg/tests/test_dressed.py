import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import assume, given
from hypothesis import strategies as st

from ladderfl import Params, SecularRates, UnsupportedCorrelationError, build_liouvillian, g2_cross
from ladderfl.dressed import (
    CATALOG_PAIRS,
    TAGS,
    analytic_g2,
    analytic_two_time,
    asymptotic_coherence_rates,
    asymptotic_rates,
    channel_rates,
    characteristic_polynomial,
    check_resolved,
    coherence_rates,
    diagonalize,
    dressed_operator,
    population_evolution_matrix,
    relaxation_eigenvalues,
    report,
    resonant_eigenfrequencies,
    secular_g2,
    transition_frequencies,
)
from ladderfl.errors import SecularBreakdownError
from ladderfl.model import hamiltonian_full, lowering_operator
from strategies import XI_SET, params


@given(params(min_omega=0.5))
def test_basis_diagonalizes_hamiltonian(p):
    b = diagonalize(p)
    assert np.allclose(b.S @ b.S_inv, np.eye(3), atol=1e-12)
    d = b.S_inv @ hamiltonian_full(p) @ b.S
    assert np.allclose(d, np.diag(b.energies), atol=1e-9)
    assert b.omega_l <= b.omega_m <= b.omega_u
    for w in b.energies:
        assert abs(characteristic_polynomial(p, w)) <= 1e-8 * max(1.0, abs(w)) ** 3


@given(params(min_omega=0.5))
def test_a_matrix_is_real_and_reconstructs_lowering(p):
    b = diagonalize(p)
    assert np.isrealobj(b.a)
    assert np.allclose(b.S @ b.a @ b.S_inv, lowering_operator(p.xi), atol=1e-12)


@given(st.floats(0.5, 60.0), st.floats(0.5, 2.0))
def test_resonant_closed_form_eigenfrequencies(omega, xi):
    p = Params(omega=omega, xi=xi)
    b = diagonalize(p)
    zero, low, high = resonant_eigenfrequencies(p)
    assert b.omega_m == pytest.approx(zero, abs=1e-9)
    assert b.omega_l == pytest.approx(low, rel=1e-10)
    assert b.omega_u == pytest.approx(high, rel=1e-10)


def test_transition_frequencies_at_reference_point():
    lines = transition_frequencies(diagonalize(Params(omega=40)))
    r = math.sqrt(30**2 + 400 * 2)
    assert lines["+1"] == pytest.approx(r - 30)
    assert lines["+2"] == pytest.approx(30 + r)
    assert lines["+3"] == pytest.approx(2 * r)
    for k in "123":
        assert lines["-" + k] == -lines["+" + k]


def test_degenerate_levels_are_refused():
    b = diagonalize(Params(omega=0))
    with pytest.raises(SecularBreakdownError):
        check_resolved(b)
    with pytest.raises(SecularBreakdownError):
        build_liouvillian(Params(omega=0), "dressed")


def test_unknown_operator():
    with pytest.raises(UnsupportedCorrelationError):
        dressed_operator("+4")


@pytest.mark.parametrize("xi", XI_SET)
def test_asymptotic_rate_identities(xi):
    r = asymptotic_rates(xi)
    lam_minus, lam_plus = relaxation_eigenvalues(xi)
    # eigenvalues of the asymptotic population matrix, worked out by hand
    m = np.array(
        [
            [-(r["gamma1"] + r["gamma2"]), r["gamma2"], r["gamma1"]],
            [r["gamma2"], -(r["gamma2"] + r["gamma3"]), r["gamma3"]],
            [r["gamma1"], r["gamma3"], -(r["gamma1"] + r["gamma3"])],
        ]
    )
    ev = np.sort(np.linalg.eigvals(m).real)
    assert ev == pytest.approx(sorted([lam_minus, lam_plus, 0.0]), abs=1e-12)


@pytest.mark.parametrize("xi", XI_SET)
def test_general_rates_converge_like_inverse_drive(xi):
    """First-order corrections: the gap to the asymptotic rates halves when omega doubles."""
    target = asymptotic_rates(xi)["gamma1"]

    def gap(omega):
        rates = channel_rates(diagonalize(Params(omega=omega, xi=xi)))
        return abs(rates["-1"] / target - 1)

    ratio = gap(2e4) / gap(1e4)
    assert ratio == pytest.approx(0.5, abs=0.01)
    assert gap(1e6) < 1e-4


@pytest.mark.parametrize("xi", XI_SET)
def test_coherence_rates_asymptotics(xi):
    b = diagonalize(Params(omega=1e6, xi=xi))
    assert np.allclose(coherence_rates(b), asymptotic_coherence_rates(xi), rtol=1e-4)


@pytest.mark.parametrize("xi", XI_SET)
def test_population_matrix_eigenvalues_at_strong_drive(xi):
    ev = np.sort(np.linalg.eigvals(population_evolution_matrix(diagonalize(Params(omega=1e4, xi=xi)))).real)
    lam_minus, lam_plus = relaxation_eigenvalues(xi)
    assert ev[2] == pytest.approx(0, abs=1e-12)
    assert sorted(ev[:2]) == pytest.approx(sorted([lam_minus, lam_plus]), rel=1e-3)


@given(
    st.floats(0.5, 2.0),
    st.lists(st.floats(0, 1), min_size=3, max_size=3).filter(lambda v: sum(v) > 1e-3),
    st.floats(0, 10),
)
def test_two_time_solution_solves_rate_equation(xi, pops, tau):
    """Closed-form populations against the matrix exponential of the asymptotic rate matrix."""
    pops = np.array(pops) / sum(pops)
    r = asymptotic_rates(xi)
    g1, g2, g3 = r["gamma1"], r["gamma2"], r["gamma3"]
    m = np.array([[-(g1 + g2), g2, g1], [g2, -(g2 + g3), g3], [g1, g3, -(g1 + g3)]])
    lam_minus, lam_plus = relaxation_eigenvalues(xi)
    rates = SecularRates(0, 0, 0, 0, 0, 0, 0, lam_minus, lam_plus)
    got = np.array(analytic_two_time(pops, rates, tau))
    assert np.allclose(got, scipy.linalg.expm(m * tau) @ pops, atol=1e-12)


def test_fixed_points():
    tau0 = np.array([0.0])
    assert analytic_g2("0", "0", 1.0, tau0)[0] == pytest.approx(1.5)
    for k in "123":
        if k != "3":
            assert analytic_g2("+" + k, "+" + k, 1.0, tau0)[0] == pytest.approx(0.0)
            assert analytic_g2("-" + k, "+" + k, 1.0, tau0)[0] == pytest.approx(3.0)
        assert analytic_g2("+" + k, "+" + k, 1.0, [1e3])[0] == pytest.approx(1.0)


TAU = np.linspace(0, 10, 101)


@pytest.mark.parametrize("pair", CATALOG_PAIRS)
def test_corrected_catalog_equals_population_solution(pair):
    exact = analytic_g2(*pair, 1.0, TAU, variant="corrected")
    assert np.allclose(exact, secular_g2(*pair, 1.0, TAU), atol=1e-12)


def test_quoted_pair_differs_from_population_solution():
    quoted = analytic_g2("+1", "-2", 1.0, TAU)
    assert np.max(np.abs(quoted - secular_g2("+1", "-2", 1.0, TAU))) > 0.1


@pytest.mark.parametrize("first", TAGS)
@pytest.mark.parametrize("second", TAGS)
def test_population_solution_matches_asymptotic_regression(first, second):
    L = build_liouvillian(Params(omega=40), "dressed", rates="asymptotic")
    numeric = g2_cross(L, first, second, TAU).values
    assert np.allclose(numeric, secular_g2(first, second, 1.0, TAU), atol=1e-9)


def test_catalog_rejects_unknown_pairs():
    with pytest.raises(UnsupportedCorrelationError):
        analytic_g2("+1", "+2", 1.0, TAU)
    with pytest.raises(ValueError):
        analytic_g2("0", "0", 1.0, [-1.0])


def test_report_is_json_ready():
    import json

    text = json.dumps(report(diagonalize(Params(omega=40))))
    assert "transition_frequencies" in text
