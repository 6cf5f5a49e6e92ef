"""Fluorescence spectrum from the first-order correlation (Wiener-Khinchin).

The frequency axis is the offset from the drive, ``omega - omega_d``, in
units of gamma, with the sign chosen so that emission on a transition whose
upper rotating-frame level lies above the lower one appears at positive
frequency::

    S_inc(w) = (1/pi) Re int_0^inf exp(-i w tau) <dS+(tau) dS-(0)> / <S+S-> dtau

Two independent routes are provided.  ``eigen_sum`` expands the fluctuation
correlation in Liouvillian eigenmodes and sums Lorentzians; ``fft`` samples
the correlation by repeated application of a one-step propagator and
transforms it with a chirp-z FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal

from .dynamics import Propagator, _emitting_state, observable_row
from .errors import TruncationError
from .model import Liouvillian, vec

ZERO_MODE_TOL = 1e-8
MIN_DECAY_PRODUCT = 10.0


@dataclass(frozen=True)
class SpectrumResult:
    omega: np.ndarray
    incoherent: np.ndarray
    coherent_weight: float
    normalization: str
    method: str
    scale: float = 1.0  # raw = incoherent * scale


@dataclass(frozen=True)
class _Fluctuation:
    row: np.ndarray
    x0: np.ndarray
    emission: float
    coherent_weight: float


def _fluctuation(L: Liouvillian) -> _Fluctuation:
    rho, n = _emitting_state(L)
    sm = L.lowering
    mean = np.trace(sm @ rho)
    return _Fluctuation(
        row=observable_row(sm.conj().T),
        x0=vec(sm @ rho - mean * rho),
        emission=n,
        coherent_weight=float(abs(mean) ** 2 / n),
    )


def fluctuation_weight(L: Liouvillian) -> float:
    """``<dS+ dS-> / <S+S->``: total area under the incoherent spectrum."""
    fl = _fluctuation(L)
    return float(np.real(fl.row @ fl.x0) / fl.emission)


def _eigen_sum(L: Liouvillian, fl: _Fluctuation, omega: np.ndarray) -> np.ndarray:
    lam, amps = Propagator(L).modes(fl.row, fl.x0)
    keep = np.abs(lam) > ZERO_MODE_TOL
    lam, amps = lam[keep], amps[keep]
    out = np.zeros(omega.shape)
    for k in range(lam.size):
        out += np.real(amps[k] / (-lam[k] + 1j * omega))
    return out / (np.pi * fl.emission)


def slowest_decay_rate(L: Liouvillian) -> float:
    lam = np.linalg.eigvals(L.matrix)
    rates = -lam.real[np.abs(lam) > ZERO_MODE_TOL]
    return float(rates.min())


def _sample_correlation(L: Liouvillian, fl: _Fluctuation, dt: float, n: int) -> np.ndarray:
    """``row @ exp(L k dt) @ x0`` for ``k = 0 .. n-1`` by repeated stepping."""
    step = scipy.linalg.expm(L.matrix * dt)
    block = 256
    powers = [np.eye(step.shape[0], dtype=complex)]
    for _ in range(block - 1):
        powers.append(step @ powers[-1])
    row_powers = np.array([fl.row @ p for p in powers])  # (block, 9)
    jump = step @ powers[-1]
    out = np.empty(n, dtype=complex)
    x = fl.x0.copy()
    for start in range(0, n, block):
        stop = min(start + block, n)
        out[start:stop] = row_powers[: stop - start] @ x
        x = jump @ x
    return out


def _uniform_spacing(omega: np.ndarray) -> float | None:
    if omega.size < 2:
        return None
    d = np.diff(omega)
    if np.allclose(d, d[0], rtol=1e-9, atol=0):
        return float(d[0])
    return None


def _fft_sum(L, fl, omega, tau_max, dt):
    lam = np.linalg.eigvals(L.matrix)
    nonzero = np.abs(lam) > ZERO_MODE_TOL
    slow_idx = np.argmin(np.where(nonzero, -lam.real, np.inf))
    slow = lam[slow_idx]
    if tau_max is None:
        tau_max = 30.0 / -slow.real
    if tau_max * -slow.real < MIN_DECAY_PRODUCT:
        raise TruncationError(
            f"tau_max * slowest decay rate = {tau_max * -slow.real:.3g} < {MIN_DECAY_PRODUCT:g}"
        )
    if dt is None:
        w_max = max(np.max(np.abs(omega)), np.max(np.abs(lam.imag)))
        dt = min(0.005, np.pi / (8 * w_max)) if w_max > 0 else 0.005
    n = int(np.ceil(tau_max / dt)) + 1
    c = _sample_correlation(L, fl, dt, n)
    t_end = (n - 1) * dt

    # trapezoid weights, endpoint derivative correction at tau=0 and an
    # exponential continuation of the tail at the slowest eigenvalue
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    x = c * w
    c_dot0 = fl.row @ (L.matrix @ fl.x0)

    spacing = _uniform_spacing(omega)
    if spacing is not None:
        chirp = np.exp(-1j * spacing * dt)
        pre = x * np.exp(-1j * omega[0] * dt * np.arange(n))
        total = scipy.signal.czt(pre, m=omega.size, w=chirp, a=1.0)
    else:
        total = np.empty(omega.size, dtype=complex)
        taus = dt * np.arange(n)
        for i in range(0, omega.size, 64):
            chunk = omega[i : i + 64]
            total[i : i + 64] = np.exp(-1j * np.outer(chunk, taus)) @ x
    integral = dt * total
    integral += dt**2 / 12 * (c_dot0 - 1j * omega * c[0])
    integral += c[-1] * np.exp(-1j * omega * t_end) / (-slow + 1j * omega)
    return np.real(integral) / (np.pi * fl.emission)


def incoherent_spectrum(
    L: Liouvillian,
    omega,
    *,
    method: str = "eigen_sum",
    normalization: str = "raw",
    tau_max: float | None = None,
    dt: float | None = None,
) -> SpectrumResult:
    """Incoherent part of the fluorescence spectrum on ``omega``.

    ``normalization="peak"`` rescales so the largest sample is 1; the raw
    density integrates to :func:`fluctuation_weight`.  ``tau_max`` and ``dt``
    only affect the ``fft`` method; by default the trace runs for 30 decay
    times of the slowest mode.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    fl = _fluctuation(L)
    if method == "eigen_sum":
        values = _eigen_sum(L, fl, omega)
    elif method == "fft":
        values = _fft_sum(L, fl, omega, tau_max, dt)
    else:
        raise ValueError(f"method must be 'eigen_sum' or 'fft', got {method!r}")
    scale = 1.0
    if normalization == "peak":
        scale = float(values.max())
        values = values / scale
    elif normalization != "raw":
        raise ValueError(f"normalization must be 'raw' or 'peak', got {normalization!r}")
    return SpectrumResult(omega, values, fl.coherent_weight, normalization, method, scale)


def method_cross_check(L: Liouvillian, omega) -> float:
    """Largest absolute difference between the eigen-sum and FFT spectra on ``omega``."""
    a = incoherent_spectrum(L, omega, method="eigen_sum").incoherent
    b = incoherent_spectrum(L, omega, method="fft").incoherent
    return float(np.max(np.abs(a - b)))


def find_peaks(omega: np.ndarray, values: np.ndarray, rel_height: float = 0.01) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima above ``rel_height`` of the global peak, refined by a parabola.

    Returns ``(positions, heights)`` sorted by position.
    """
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)
    idx, _ = scipy.signal.find_peaks(values, height=rel_height * values.max())
    positions, heights = [], []
    for i in idx:
        y0, y1, y2 = values[i - 1], values[i], values[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        h = omega[i + 1] - omega[i]
        positions.append(omega[i] + shift * h)
        heights.append(y1 - 0.25 * (y0 - y2) * shift)
    return np.array(positions), np.array(heights)
