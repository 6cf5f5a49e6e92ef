"""Closed forms of the adiabatically eliminated two-photon (effective two-level) model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import Params

#: Minimum allowed distance from single-photon resonance, in units of gamma.
SINGLE_PHOTON_GUARD = 1e-9


@dataclass(frozen=True)
class EffectiveParams:
    omega_eff: float
    delta_g: float
    delta_f: float
    delta_eff: float
    delta_shifted: float | None


def _intermediate_detuning(p: Params) -> float:
    detuning = p.alpha / 2 + p.delta
    if abs(detuning) <= SINGLE_PHOTON_GUARD * p.gamma:
        raise DomainError(
            "effective model undefined at single-photon resonance "
            f"(alpha/2 + delta = {detuning:g})"
        )
    return detuning


def shifted_resonance(p: Params) -> float:
    """Drive detuning at which the Stark-shifted two-photon resonance occurs.

    Root of ``delta_eff(delta) = 0`` on the branch that passes through zero
    for ``xi = 1`` when ``alpha < 0``.  Depends on ``omega``, ``alpha`` and
    ``xi`` only.
    """
    half_drive_sq = (p.omega / 2) ** 2
    radicand = (p.alpha / 2) ** 2 + 2 * half_drive_sq * (p.xi**2 - 1)
    if radicand < 0:
        raise DomainError(f"no real shifted two-photon resonance (radicand {radicand:g} < 0)")
    return -p.alpha / 4 - 0.5 * math.sqrt(radicand)


def effective_params(p: Params, *, shifted: bool = True) -> EffectiveParams:
    """Effective two-photon drive, Stark shifts and detunings.

    With ``shifted=False`` the shifted resonance is not evaluated (and its
    domain error cannot be raised); ``delta_shifted`` is then ``None``.
    """
    detuning = _intermediate_detuning(p)
    half_drive_sq = (p.omega / 2) ** 2
    delta_g = half_drive_sq / detuning
    return EffectiveParams(
        omega_eff=2 * p.xi * half_drive_sq / detuning,
        delta_g=delta_g,
        delta_f=p.xi**2 * delta_g,
        delta_eff=-2 * p.delta + half_drive_sq * (p.xi**2 - 1) / detuning,
        delta_shifted=shifted_resonance(p) if shifted else None,
    )


def _population_denominator(p: Params, ep: EffectiveParams) -> float:
    xi2 = p.xi**2
    return ep.omega_eff**2 * (2 + xi2) + 4 * ep.delta_eff**2 + xi2**2 * p.gamma**2


def effective_steady_states(p: Params) -> tuple[float, float, float]:
    """Steady-state populations ``(g, e, f)`` of the effective model."""
    ep = effective_params(p, shifted=False)
    denom = _population_denominator(p, ep)
    pop_e = p.xi**2 * ep.omega_eff**2 / denom
    pop_f = ep.omega_eff**2 / denom
    pop_g = (ep.omega_eff**2 + 4 * ep.delta_eff**2 + p.xi**4 * p.gamma**2) / denom
    return pop_g, pop_e, pop_f


def effective_g2_zero(p: Params) -> float:
    """Zero-delay intensity correlation implied by the effective steady state.

    With ``<S+^2 S-^2> = xi^2 pop_f`` and ``<S+ S-> = pop_e + xi^2 pop_f
    = 2 xi^2 pop_f`` the ratio is ``1 / (4 xi^2 pop_f)``, i.e. the population
    denominator divided by ``4 xi^2 omega_eff^2``.  At ``delta = 0`` this
    equals ``1/2 + 1/(4 xi^4) + alpha^2 gamma^2 / (4 omega^4)``.
    """
    ep = effective_params(p, shifted=False)
    if ep.omega_eff == 0:
        raise DomainError("g2(0) undefined without two-photon drive (omega_eff = 0)")
    return _population_denominator(p, ep) / (4 * p.xi**2 * ep.omega_eff**2)


def resonant_g2_zero(p: Params) -> float:
    """Commonly quoted two-photon-resonance form ``1/2 + 1/(4 xi^2) + alpha^2/(4 omega^4)``.

    Coincides with :func:`effective_g2_zero` at ``delta = 0`` only for
    ``xi = 1``; for other ``xi`` the consistent reduction has ``1/(4 xi^4)``.
    ``delta`` is ignored.
    """
    if p.omega == 0:
        raise DomainError("g2(0) undefined without drive")
    return 0.5 + 1 / (4 * p.xi**2) + (p.alpha * p.gamma) ** 2 / (4 * p.omega**4)
