"""Steady states, time evolution and two-time correlations via quantum regression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .errors import NoEmissionError, NonUniqueSteadyStateError, PositivityError
from .model import DIM, Liouvillian, unvec, vec

POSITIVITY_TOL = 1e-9
EMISSION_FLOOR = 1e-12
CONDITION_LIMIT = 1e10
NULLITY_TOL = 1e-10


def _matrix(L: Liouvillian | np.ndarray) -> np.ndarray:
    return L.matrix if isinstance(L, Liouvillian) else np.asarray(L, dtype=complex)


def trace_row(dim: int = DIM) -> np.ndarray:
    """Row vector ``t`` with ``t @ vec(rho) == trace(rho)``."""
    return vec(np.eye(dim, dtype=complex))


def observable_row(op: np.ndarray) -> np.ndarray:
    """Row vector ``r`` with ``r @ vec(x) == trace(op @ x)``."""
    return vec(np.asarray(op).T)


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10, positivity_tol: float = POSITIVITY_TOL) -> None:
    """Raise if ``rho`` is not Hermitian, unit-trace and positive semidefinite."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise ValueError(f"density matrix not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise ValueError(f"density matrix trace {tr:.12g} differs from 1")
    low = np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2))
    if low < -positivity_tol:
        raise PositivityError(f"density matrix eigenvalue {low:.3g} below -{positivity_tol:g}")


def steady_state(L: Liouvillian | np.ndarray) -> np.ndarray:
    """Stationary density matrix, from the generator with one row swapped for the trace."""
    m = _matrix(L)
    s = np.linalg.svd(m, compute_uv=False)
    if s[-2] <= NULLITY_TOL * s[0]:
        raise NonUniqueSteadyStateError(
            f"generator has a null space of dimension > 1 (singular values {s[-3:]})"
        )
    a = m.copy()
    a[0, :] = trace_row()
    b = np.zeros(m.shape[0], dtype=complex)
    b[0] = 1.0
    rho = unvec(np.linalg.solve(a, b))
    rho = (rho + rho.conj().T) / 2
    check_density_matrix(rho, tol=1e-9)
    return rho


class Propagator:
    """``exp(L t)`` for many times from a single eigendecomposition.

    Falls back to scaling-and-squaring exponentials when the eigenvector
    matrix is too ill-conditioned to be trusted.
    """

    def __init__(self, L: Liouvillian | np.ndarray, condition_limit: float = CONDITION_LIMIT):
        self.matrix = _matrix(L)
        lam, vecs = np.linalg.eig(self.matrix)
        self.condition = float(np.linalg.cond(vecs))
        self.defective = not np.isfinite(self.condition) or self.condition > condition_limit
        self.eigenvalues = lam
        self.eigenvectors = vecs

    def coefficients(self, x0: np.ndarray) -> np.ndarray:
        """Expansion of ``x0`` in the eigenvectors."""
        return np.linalg.solve(self.eigenvectors, x0)

    def propagate(self, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Rows are ``exp(L t) @ x0`` for each ``t`` in ``times``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.defective:
            return np.array([scipy.linalg.expm(self.matrix * t) @ x0 for t in times])
        c = self.coefficients(x0)
        return (np.exp(np.outer(times, self.eigenvalues)) * c) @ self.eigenvectors.T

    def expectation(self, row: np.ndarray, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """``row @ exp(L t) @ x0`` for each ``t``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.defective:
            return self.propagate(x0, times) @ row
        amps = (row @ self.eigenvectors) * self.coefficients(x0)
        return np.exp(np.outer(times, self.eigenvalues)) @ amps

    def modes(self, row: np.ndarray, x0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and amplitudes with ``row @ exp(L t) @ x0 = sum_k amp_k exp(lam_k t)``."""
        return self.eigenvalues, (row @ self.eigenvectors) * self.coefficients(x0)


def evolve(L: Liouvillian | np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    """State at time ``t`` starting from ``rho0``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.array(rho0, dtype=complex)
    x = Propagator(L).propagate(vec(rho0), [t])[0]
    out = unvec(x)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("propagation produced non-finite entries")
    return out


def integrate(L: Liouvillian | np.ndarray, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Reference propagation by adaptive Runge-Kutta stepping (rows per time)."""
    m = _matrix(L)
    times = np.asarray(times, dtype=float)
    sol = solve_ivp(
        lambda _t, y: m @ y,
        (0.0, float(times[-1])),
        np.asarray(x0, dtype=complex),
        t_eval=times,
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise FloatingPointError(sol.message)
    return sol.y.T


@dataclass(frozen=True)
class CorrelationTrace:
    tau: np.ndarray
    values: np.ndarray
    normalization: float


def _check_grid(tau) -> np.ndarray:
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if tau.ndim != 1 or tau.size == 0:
        raise ValueError("tau grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(tau)) or tau[0] < 0:
        raise ValueError("tau grid must be finite and non-negative")
    if np.any(np.diff(tau) <= 0):
        raise ValueError("tau grid must be strictly ascending")
    return tau


def _regress(L, row, x0, tau, method) -> np.ndarray:
    if method == "eigen":
        return Propagator(L).expectation(row, x0, tau)
    if method == "ode":
        return integrate(L, x0, tau) @ row
    raise ValueError(f"method must be 'eigen' or 'ode', got {method!r}")


def emission_rate(L: Liouvillian, rho: np.ndarray | None = None) -> float:
    """``<S+ S->`` in the steady state (or in ``rho`` if given)."""
    rho = steady_state(L) if rho is None else rho
    sm = L.lowering
    return float(np.real(np.trace(sm.conj().T @ sm @ rho)))


def _emitting_state(L: Liouvillian) -> tuple[np.ndarray, float]:
    rho = steady_state(L)
    n = emission_rate(L, rho)
    if n <= EMISSION_FLOOR:
        raise NoEmissionError(f"steady-state emission <S+S-> = {n:.3g} is too small to normalize")
    return rho, n


def g1(L: Liouvillian, tau, *, method: str = "eigen") -> CorrelationTrace:
    """Normalized first-order correlation ``<S+(tau) S-(0)> / <S+ S->``."""
    tau = _check_grid(tau)
    rho, n = _emitting_state(L)
    sm = L.lowering
    values = _regress(L, observable_row(sm.conj().T), vec(sm @ rho), tau, method) / n
    return CorrelationTrace(tau, values, n)


def g2(L: Liouvillian, tau, *, method: str = "eigen") -> CorrelationTrace:
    """Normalized intensity correlation ``<S+(0) S+S-(tau) S-(0)> / <S+ S->^2``."""
    tau = _check_grid(tau)
    rho, n = _emitting_state(L)
    sm = L.lowering
    sp = sm.conj().T
    values = _regress(L, observable_row(sp @ sm), vec(sm @ rho @ sp), tau, method) / n**2
    return CorrelationTrace(tau, np.real(values), n**2)


def g2_cross(L: Liouvillian, first: str, second: str, tau, *, method: str = "eigen") -> CorrelationTrace:
    """Correlation of dressed line ``first`` followed by line ``second`` after ``tau``.

    Normalized by the product of the two steady-state line intensities.
    Uses the dressed basis attached to ``L`` (or diagonalizes its parameters).
    """
    from .dressed import diagonalize

    tau = _check_grid(tau)
    basis = L.basis if L.basis is not None else diagonalize(L.params)
    a_op = basis.operator(first)
    b_op = basis.operator(second)
    rho = steady_state(L)
    bb = b_op.conj().T @ b_op
    n_a = float(np.real(np.trace(a_op.conj().T @ a_op @ rho)))
    n_b = float(np.real(np.trace(bb @ rho)))
    if min(n_a, n_b) <= EMISSION_FLOOR:
        raise NoEmissionError(f"dressed line intensity vanishes ({first}: {n_a:.3g}, {second}: {n_b:.3g})")
    values = _regress(L, observable_row(bb), vec(a_op @ rho @ a_op.conj().T), tau, method)
    return CorrelationTrace(tau, np.real(values) / (n_a * n_b), n_a * n_b)
