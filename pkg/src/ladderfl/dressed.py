"""Dressed states, the secular (dressed-basis) master equation and its correlation catalog.

Dressed levels are labeled by sorting the eigenvalues of the rotating-frame
Hamiltonian, ``omega_l <= omega_m <= omega_u``.  Matrices in the dressed
basis are ordered ``(m, u, l)``; the eigenvector matrix ``S`` therefore has
columns ``[|m>, |u>, |l>]`` written in the bare basis.

Dressed transition operators are tagged by their spectral line::

    "0"  : |u><u| - |l><l|
    "+1" : |l><m|      "-1" : |m><l|
    "+2" : |u><m|      "-2" : |m><u|
    "+3" : |u><l|      "-3" : |l><u|
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import SecularBreakdownError, UnsupportedCorrelationError
from .model import Params, basis_projector, hamiltonian_full, lindblad_superop, lowering_operator

M, U, L = 0, 1, 2
DEGENERACY_TOL = 1e-6

TAGS = ("0", "+1", "-1", "+2", "-2", "+3", "-3")

# (to, from) dressed indices of each transition operator
_TRANSITIONS = {
    "+1": (L, M),
    "-1": (M, L),
    "+2": (U, M),
    "-2": (M, U),
    "+3": (U, L),
    "-3": (L, U),
}

# position of the matrix element <to|S-|from> in the flattened a-matrix (0-based)
_COEFFICIENT_INDEX = {tag: 3 * to + frm for tag, (to, frm) in _TRANSITIONS.items()}


@dataclass(frozen=True, eq=False)
class DressedBasis:
    params: Params
    omega_m: float
    omega_u: float
    omega_l: float
    S: np.ndarray
    S_inv: np.ndarray
    a: np.ndarray  # 3x3 matrix S^-1 S- S in (m, u, l) ordering

    @property
    def energies(self) -> np.ndarray:
        """Eigenfrequencies in the ``(m, u, l)`` ordering of ``S``."""
        return np.array([self.omega_m, self.omega_u, self.omega_l])

    @property
    def coefficients(self) -> np.ndarray:
        """``a_1 ... a_9`` as a flat array (``a_1`` at index 0)."""
        return self.a.reshape(-1).copy()

    def operator(self, tag: str, *, bare: bool = True) -> np.ndarray:
        """Dressed transition operator for spectral line ``tag``.

        Returned in the bare basis unless ``bare=False``.
        """
        op = dressed_operator(tag)
        return self.S @ op @ self.S_inv if bare else op

    def projector(self, label: str, *, bare: bool = True) -> np.ndarray:
        idx = {"m": M, "u": U, "l": L}[label]
        op = basis_projector(idx, idx)
        return self.S @ op @ self.S_inv if bare else op


def dressed_operator(tag: str) -> np.ndarray:
    """Transition operator of line ``tag`` written in the dressed basis."""
    if tag == "0":
        return basis_projector(U, U) - basis_projector(L, L)
    try:
        to, frm = _TRANSITIONS[tag]
    except KeyError:
        raise UnsupportedCorrelationError(f"unknown dressed operator {tag!r}; expected one of {TAGS}") from None
    return basis_projector(to, frm)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k])
    return v / phase


def diagonalize(p: Params) -> DressedBasis:
    """Numerically diagonalize the rotating-frame Hamiltonian for any detuning."""
    h = hamiltonian_full(p)
    w, v = np.linalg.eigh(h)  # ascending: l, m, u
    order = [1, 2, 0]
    cols = [_fix_phase(v[:, k]) for k in order]
    S = np.column_stack(cols)
    S_inv = S.conj().T
    a = S_inv @ lowering_operator(p.xi) @ S
    # the Hamiltonian is real symmetric, so the a-matrix is real up to rounding
    a = a.real if np.allclose(a.imag, 0, atol=1e-12) else a
    return DressedBasis(
        params=p,
        omega_m=float(w[1]),
        omega_u=float(w[2]),
        omega_l=float(w[0]),
        S=S,
        S_inv=S_inv,
        a=a,
    )


def characteristic_polynomial(p: Params, w: float | np.ndarray) -> float | np.ndarray:
    """Residual of the dressed-state cubic, zero at every eigenfrequency."""
    q = (p.omega / 2) ** 2
    return (
        w**3
        + (p.alpha / 2 + 3 * p.delta) * w**2
        + (p.delta * (p.alpha + 2 * p.delta) - q * (1 + p.xi**2)) * w
        - 2 * p.delta * q
    )


def resonant_eigenfrequencies(p: Params) -> tuple[float, float, float]:
    """Closed-form eigenfrequencies at two-photon resonance (``delta`` ignored).

    Returned as ``(0, -alpha/4 - r, -alpha/4 + r)`` with
    ``r = sqrt((alpha/4)^2 + (omega/2)^2 (1 + xi^2))``.  The two nonzero roots
    are not sorted; for ``alpha < 0`` the first is the lowest level.
    """
    r = math.sqrt((p.alpha / 4) ** 2 + (p.omega / 2) ** 2 * (1 + p.xi**2))
    return 0.0, -p.alpha / 4 - r, -p.alpha / 4 + r


def transition_frequencies(b: DressedBasis) -> dict[str, float]:
    """The seven spectral line positions, keyed by line tag."""
    w1 = b.omega_m - b.omega_l
    w2 = b.omega_u - b.omega_m
    w3 = b.omega_u - b.omega_l
    return {"0": 0.0, "+1": w1, "-1": -w1, "+2": w2, "-2": -w2, "+3": w3, "-3": -w3}


def lowering_coefficients(b: DressedBasis) -> np.ndarray:
    """``a_1 ... a_9``: elements of the lowering operator in the dressed basis."""
    return b.coefficients


def check_resolved(b: DressedBasis, tol: float = DEGENERACY_TOL) -> None:
    w = np.sort(b.energies)
    gaps = np.diff(w)
    if np.any(gaps < tol * b.params.gamma):
        raise SecularBreakdownError(
            f"dressed levels not resolved (gaps {gaps.tolist()}); secular model refuses degenerate spectra"
        )


@dataclass(frozen=True)
class SecularRates:
    gamma0: float
    gamma1: float
    gamma2: float
    gamma3: float
    gamma_um: float
    gamma_ml: float
    gamma_ul: float
    lambda_minus: float
    lambda_plus: float


def asymptotic_rates(xi: float, gamma: float = 1.0) -> dict[str, float]:
    """Strong-drive limits of the dressed decay and dephasing rates."""
    x2 = xi**2
    return {
        "gamma0": (1 + x2) * gamma / 4,
        "gamma1": x2 * gamma / (2 * (1 + x2)),
        "gamma2": x2 * gamma / (2 * (1 + x2)),
        "gamma3": (1 - x2) ** 2 * gamma / (4 * (1 + x2)),
    }


def relaxation_eigenvalues(xi: float, gamma: float = 1.0) -> tuple[float, float]:
    """``(lambda_minus, lambda_plus)`` of the strong-drive population dynamics."""
    x2 = xi**2
    lam_minus = -3 * x2 * gamma / (2 * (1 + x2))
    lam_plus = -gamma * (1 - x2 + x2**2) / (2 * (1 + x2))
    return lam_minus, lam_plus


def channel_rates(b: DressedBasis) -> dict[str, float]:
    """Finite-drive rate ``gamma * |a_k|^2`` of every dressed transition channel."""
    flat = b.coefficients
    g = b.params.gamma
    return {tag: g * abs(flat[k]) ** 2 for tag, k in _COEFFICIENT_INDEX.items()}


def coherence_rates(b: DressedBasis) -> tuple[float, float, float]:
    """General decay rates ``(gamma_um, gamma_ml, gamma_ul)`` of the dressed coherences."""
    a = np.r_[0.0, np.real(b.coefficients)]  # 1-based like a_1 ... a_9
    g = b.params.gamma
    gamma_um = g * (a[2] ** 2 + a[4] ** 2 + a[7] ** 2 + a[8] ** 2 + (a[1] - a[5]) ** 2)
    gamma_ml = g * (a[3] ** 2 + a[4] ** 2 + a[6] ** 2 + a[7] ** 2 + (a[1] - a[9]) ** 2)
    gamma_ul = g * (a[2] ** 2 + a[3] ** 2 + a[6] ** 2 + a[8] ** 2 + (a[5] - a[9]) ** 2)
    return gamma_um, gamma_ml, gamma_ul


def asymptotic_coherence_rates(xi: float, gamma: float = 1.0) -> tuple[float, float, float]:
    """Strong-drive limits of :func:`coherence_rates` expressed through gamma0..gamma3."""
    r = asymptotic_rates(xi, gamma)
    g0, g1, g2, g3 = r["gamma0"], r["gamma1"], r["gamma2"], r["gamma3"]
    return (
        g0 + g1 + 2 * g2 + g3,
        g0 + 2 * g1 + g2 + g3,
        4 * g0 + g1 + g2 + 2 * g3,
    )


def secular_rates(b: DressedBasis) -> SecularRates:
    xi, gamma = b.params.xi, b.params.gamma
    asym = asymptotic_rates(xi, gamma)
    um, ml, ul = coherence_rates(b)
    lam_minus, lam_plus = relaxation_eigenvalues(xi, gamma)
    return SecularRates(
        gamma_um=um,
        gamma_ml=ml,
        gamma_ul=ul,
        lambda_minus=lam_minus,
        lambda_plus=lam_plus,
        **asym,
    )


def population_evolution_matrix(b: DressedBasis) -> np.ndarray:
    """Rate matrix acting on the dressed populations ``(mm, uu, ll)``."""
    a = np.abs(b.coefficients) ** 2 * b.params.gamma
    a1, a2, a3, a4, a5, a6, a7, a8, a9 = a
    return np.array(
        [
            [-(a4 + a7), a2, a3],
            [a4, -(a2 + a8), a6],
            [a7, a8, -(a3 + a6)],
        ]
    )


def dressed_liouvillian_matrix(b: DressedBasis, *, rates: str = "general") -> np.ndarray:
    """Secular master-equation generator, expressed in the bare basis.

    ``rates="general"`` keeps the finite-drive rates ``gamma |a_k|^2`` and the
    dephasing built from the diagonal elements ``a_1, a_5, a_9``;
    ``rates="asymptotic"`` uses the strong-drive limits gamma0..gamma3.
    """
    check_resolved(b)
    to_bare = lambda op: b.S @ op @ b.S_inv  # noqa: E731
    h = to_bare(np.diag(b.energies).astype(complex))
    gamma = b.params.gamma
    if rates == "general":
        diag = np.diag(np.diag(b.a)).astype(complex)
        channels = [(gamma, to_bare(diag))]
        for tag, rate in channel_rates(b).items():
            channels.append((rate, to_bare(dressed_operator(tag))))
    elif rates == "asymptotic":
        asym = asymptotic_rates(b.params.xi, gamma)
        channels = [(asym["gamma0"], to_bare(dressed_operator("0")))]
        for tag in TAGS[1:]:
            channels.append((asym["gamma" + tag[1]], to_bare(dressed_operator(tag))))
    else:
        raise ValueError(f"rates must be 'general' or 'asymptotic', got {rates!r}")
    return lindblad_superop(h, channels)


def analytic_two_time(
    initial: Sequence[float], rates: SecularRates, tau: float | np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Strong-drive solution for the dressed populations ``(mm, uu, ll)`` at delay ``tau``."""
    mm0, uu0, ll0 = (float(x) for x in initial)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    c1 = (ll0 + uu0 + mm0) / 3
    c2 = (ll0 + uu0 - 2 * mm0) / 6
    c3 = (ll0 - uu0) / 2
    em = np.exp(rates.lambda_minus * tau)
    ep = np.exp(rates.lambda_plus * tau)
    return c1 - 2 * c2 * em, c1 + c2 * em - c3 * ep, c1 + c2 * em + c3 * ep


_Form = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _sym_bunched(em: np.ndarray, ep: np.ndarray) -> np.ndarray:
    return 1 + 0.5 * em + 1.5 * ep


_CATALOG: dict[tuple[str, str], _Form] = {
    ("0", "0"): lambda em, ep: 1 + 0.5 * em,
    ("+1", "+1"): lambda em, ep: 1 - em,
    ("-1", "-1"): lambda em, ep: 1 - em,
    ("+2", "+2"): lambda em, ep: 1 - em,
    ("-2", "-2"): lambda em, ep: 1 - em,
    ("+3", "+3"): lambda em, ep: 1 + 0.5 * em - 1.5 * ep,
    ("-3", "-3"): lambda em, ep: 1 + 0.5 * em - 1.5 * ep,
    ("-1", "+1"): lambda em, ep: 1 + 2 * em,
    ("-2", "+2"): lambda em, ep: 1 + 2 * em,
    ("-3", "+3"): _sym_bunched,
    ("+1", "-1"): _sym_bunched,
    ("+2", "-2"): _sym_bunched,
    ("+3", "-3"): _sym_bunched,
    ("-2", "+1"): lambda em, ep: 1 + 2 * em,
    # both exponentials carry lambda_minus in the commonly quoted form
    ("+1", "-2"): lambda em, ep: 1 + 0.5 * em - 1.5 * em,
}

_CORRECTED = {
    ("+1", "-2"): lambda em, ep: 1 + 0.5 * em - 1.5 * ep,
}

CATALOG_PAIRS = tuple(_CATALOG)


def analytic_g2(
    first: str,
    second: str,
    xi: float,
    tau: float | np.ndarray,
    *,
    gamma: float = 1.0,
    variant: str = "quoted",
) -> np.ndarray:
    """Closed-form strong-drive correlation of line ``first`` followed by ``second``.

    Covers the auto-correlations of every line plus the cross-correlations
    in :data:`CATALOG_PAIRS`.  ``variant="corrected"`` replaces the
    ``("+1", "-2")`` entry by the form that follows from the general
    population solution (second exponential decaying at ``lambda_plus``).
    """
    key = (first, second)
    if variant not in ("quoted", "corrected"):
        raise ValueError(f"variant must be 'quoted' or 'corrected', got {variant!r}")
    form = _CORRECTED.get(key) if variant == "corrected" else None
    form = form or _CATALOG.get(key)
    if form is None:
        raise UnsupportedCorrelationError(f"no closed form for {key}; see CATALOG_PAIRS or secular_g2")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    lam_minus, lam_plus = relaxation_eigenvalues(xi, gamma)
    return form(np.exp(lam_minus * tau), np.exp(lam_plus * tau))


def _emission_populations(tag: str) -> tuple[np.ndarray, np.ndarray]:
    """Population vector after emission through ``tag`` and the observable weights of ``tag``.

    Both refer to ``(mm, uu, ll)`` with the uniform strong-drive steady state.
    """
    after = np.zeros(3)
    weights = np.zeros(3)
    if tag == "0":
        after[[U, L]] = 1 / 3
        weights[[U, L]] = 1
    else:
        to, frm = _TRANSITIONS[tag]
        after[to] = 1 / 3
        weights[frm] = 1
    return after, weights


def secular_g2(first: str, second: str, xi: float, tau: float | np.ndarray, *, gamma: float = 1.0) -> np.ndarray:
    """Any dressed correlation from the strong-drive population solution."""
    for tag in (first, second):
        if tag not in TAGS:
            raise UnsupportedCorrelationError(f"unknown dressed operator {tag!r}")
    lam_minus, lam_plus = relaxation_eigenvalues(xi, gamma)
    rates = SecularRates(0, 0, 0, 0, 0, 0, 0, lam_minus, lam_plus)
    after, _ = _emission_populations(first)
    _, weights = _emission_populations(second)
    pops = analytic_two_time(after, rates, tau)
    numerator = sum(w * p for w, p in zip(weights, pops))
    mean_intensity = {tag: (2 / 3 if tag == "0" else 1 / 3) for tag in (first, second)}
    return numerator / (mean_intensity[first] * mean_intensity[second])


def report(b: DressedBasis) -> dict:
    """JSON-friendly summary of the dressed eigensystem and rates."""
    rates = secular_rates(b)
    return {
        "params": b.params.as_dict(),
        "eigenfrequencies": {"m": b.omega_m, "u": b.omega_u, "l": b.omega_l},
        "transition_frequencies": transition_frequencies(b),
        "a": [float(np.real(x)) for x in b.coefficients],
        "channel_rates": channel_rates(b),
        "rates": rates.__dict__,
        "S": np.real(b.S).tolist(),
    }
