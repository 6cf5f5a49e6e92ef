import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ladderfl import DomainError, Params, build_liouvillian, steady_state
from ladderfl.effective import (
    effective_g2_zero,
    effective_params,
    effective_steady_states,
    resonant_g2_zero,
    shifted_resonance,
)
from strategies import params


def test_literal_values_on_resonance():
    ep = effective_params(Params(omega=40, xi=1.5))
    # (omega/2)^2 / (alpha/2) = 400 / -60
    assert ep.delta_g == pytest.approx(-20 / 3)
    assert ep.delta_f == pytest.approx(-20 / 3 * 2.25)
    assert ep.omega_eff == pytest.approx(2 * 1.5 * -20 / 3)
    assert ep.delta_eff == pytest.approx(-20 / 3 * 1.25)


def test_shifted_resonance_vanishes_for_equal_dipoles():
    for omega in (1.0, 20.0, 40.0, 60.0):
        assert shifted_resonance(Params(omega=omega)) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0.0, 60.0), st.floats(0.5, 2.0))
def test_shifted_resonance_zeroes_effective_detuning(omega, xi):
    p = Params(omega=omega, xi=xi)
    try:
        d = shifted_resonance(p)
    except DomainError:
        return
    assume(abs(p.alpha / 2 + d) > 1e-6)
    assert effective_params(p.replace(delta=d), shifted=False).delta_eff == pytest.approx(0.0, abs=1e-7)


def test_shifted_resonance_domain():
    with pytest.raises(DomainError):
        shifted_resonance(Params(omega=200, xi=0.5))
    # populations stay available when only the shifted root is undefined
    p = Params(omega=200, xi=0.5)
    assert effective_params(p, shifted=False).delta_shifted is None
    with pytest.raises(DomainError):
        effective_params(p)


def test_single_photon_resonance_is_refused():
    with pytest.raises(DomainError):
        effective_params(Params(omega=5, delta=60))


@given(params(min_omega=0.5))
def test_closed_forms_match_numeric_effective_model(p):
    assume(abs(p.alpha / 2 + p.delta) > 1.0)
    rho = steady_state(build_liouvillian(p, "effective"))
    numeric = np.real(np.diag(rho))
    assert np.allclose(effective_steady_states(p), numeric, atol=1e-9)
    assert sum(effective_steady_states(p)) == pytest.approx(1.0)


@given(params(min_omega=0.5))
def test_g2_zero_matches_numeric_effective_state(p):
    assume(abs(p.alpha / 2 + p.delta) > 1.0)
    rho = steady_state(build_liouvillian(p, "effective"))
    ee, ff = rho[1, 1].real, rho[2, 2].real
    xi2 = p.xi**2
    assume(ff > 1e-12)
    direct = xi2 * ff / (ee + xi2 * ff) ** 2
    assert effective_g2_zero(p) == pytest.approx(direct, rel=1e-7)


@given(st.floats(1.0, 60.0), st.floats(0.5, 2.0))
def test_g2_zero_on_resonance(omega, xi):
    p = Params(omega=omega, xi=xi)
    expected = 0.5 + 1 / (4 * xi**4) + p.alpha**2 / (4 * omega**4)
    assert effective_g2_zero(p) == pytest.approx(expected, rel=1e-10)


def test_quoted_resonant_form():
    p = Params(omega=40)
    assert resonant_g2_zero(p) == pytest.approx(0.75140625, rel=1e-12)
    assert effective_g2_zero(p) == pytest.approx(resonant_g2_zero(p), rel=1e-12)
    # away from xi = 1 the quoted and consistent forms part ways
    q = Params(omega=40, xi=math.sqrt(2))
    assert resonant_g2_zero(q) - effective_g2_zero(q) == pytest.approx(1 / 8 - 1 / 16)


def test_g2_zero_needs_drive():
    with pytest.raises(DomainError):
        effective_g2_zero(Params(omega=0))
    with pytest.raises(DomainError):
        resonant_g2_zero(Params(omega=0))
