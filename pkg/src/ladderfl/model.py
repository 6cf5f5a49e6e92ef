"""Operators, Hamiltonians and Liouvillians of the driven ladder atom.

Conventions used throughout the package:

* Bare basis ordering is ``(|g>, |e>, |f>)``, i.e. index 0, 1, 2.
* Frequencies and rates are in units of the lower-dipole decay rate Gamma.
* Density matrices are vectorized by stacking columns (Fortran order), so
  ``vec(A @ rho @ B) == kron(B.T, A) @ vec(rho)``.
* All Hamiltonians live in the frame rotating at the drive frequency.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .errors import ParameterError

DIM = 3
G, E, F = 0, 1, 2


@dataclass(frozen=True)
class Params:
    """Physical parameters, all frequencies in units of ``gamma``.

    ``omega`` is the drive amplitude of the lower transition, ``alpha`` the
    anharmonicity, ``delta`` the detuning from two-photon resonance and
    ``xi`` the ratio of upper to lower dipole moments.
    """

    omega: float
    alpha: float = -120.0
    delta: float = 0.0
    xi: float = 1.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        for name in ("omega", "alpha", "delta", "xi", "gamma"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a real number, got {value!r}") from None
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.gamma <= 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if self.xi <= 0:
            raise ParameterError(f"xi must be positive, got {self.xi}")

    def replace(self, **changes: float) -> "Params":
        values = self.as_dict()
        values.update(changes)
        return Params(**values)

    def as_dict(self) -> dict[str, float]:
        return {
            "omega": self.omega,
            "alpha": self.alpha,
            "delta": self.delta,
            "xi": self.xi,
            "gamma": self.gamma,
        }


class Model(str, enum.Enum):
    FULL = "full"
    EFFECTIVE = "effective"
    DRESSED = "dressed"

    @classmethod
    def parse(cls, tag: "Model | str") -> "Model":
        if isinstance(tag, Model):
            return tag
        aliases = {
            "full": cls.FULL,
            "full3level": cls.FULL,
            "effective": cls.EFFECTIVE,
            "effectivetwolevel": cls.EFFECTIVE,
            "dressed": cls.DRESSED,
            "dressedsecular": cls.DRESSED,
        }
        key = str(tag).replace("_", "").replace("-", "").lower()
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown model {tag!r}; expected one of full, effective, dressed") from None


def basis_projector(i: int, j: int) -> np.ndarray:
    """Return the bare-basis transition operator ``|i><j|``."""
    op = np.zeros((DIM, DIM), dtype=complex)
    op[i, j] = 1.0
    return op


def lowering_operator(xi: float) -> np.ndarray:
    """Collective lowering operator ``|g><e| + xi |e><f|``."""
    xi = float(xi)
    if not math.isfinite(xi) or xi <= 0:
        raise ParameterError(f"xi must be positive and finite, got {xi!r}")
    return basis_projector(G, E) + xi * basis_projector(E, F)


def raising_operator(xi: float) -> np.ndarray:
    return lowering_operator(xi).conj().T


def hamiltonian_full(p: Params) -> np.ndarray:
    """Rotating-frame Hamiltonian of the three-level ladder atom (hbar = 1)."""
    h = np.zeros((DIM, DIM), dtype=complex)
    h[E, E] = -(p.alpha / 2 + p.delta)
    h[F, F] = -2 * p.delta
    h[G, E] = h[E, G] = p.omega / 2
    h[E, F] = h[F, E] = p.xi * p.omega / 2
    return h


def hamiltonian_effective(p: Params) -> np.ndarray:
    """Two-photon Hamiltonian after adiabatic elimination of ``|e>``.

    Embedded in the 3x3 space; the ``|e>`` row and column are zero so the
    intermediate level is only reached through the dissipators.
    """
    from .effective import effective_params

    ep = effective_params(p, shifted=False)
    h = np.zeros((DIM, DIM), dtype=complex)
    h[G, G] = ep.delta_g
    h[F, F] = -2 * p.delta + ep.delta_f
    h[G, F] = h[F, G] = ep.omega_eff / 2
    return h


def dissipator(x: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Lindblad decay term ``2 X rho X^+ - X^+ X rho - rho X^+ X``."""
    xd = x.conj().T
    xdx = xd @ x
    return 2 * x @ rho @ xd - xdx @ rho - rho @ xdx


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    n = math.isqrt(v.shape[-1])
    # works for a single vector or a stack of them along leading axes
    return np.swapaxes(v.reshape(v.shape[:-1] + (n, n)), -1, -2)


def spre(a: np.ndarray) -> np.ndarray:
    """Superoperator of left multiplication, ``rho -> a rho``."""
    return np.kron(np.eye(a.shape[0]), a)


def spost(a: np.ndarray) -> np.ndarray:
    """Superoperator of right multiplication, ``rho -> rho a``."""
    return np.kron(a.T, np.eye(a.shape[0]))


def sprepost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> a rho b``."""
    return np.kron(b.T, a)


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    return -1j * (spre(h) - spost(h))


def dissipator_superop(x: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """Superoperator of ``(rate / 2) * dissipator(x, .)``."""
    xd = x.conj().T
    xdx = xd @ x
    return 0.5 * rate * (2 * sprepost(x, xd) - spre(xdx) - spost(xdx))


def lindblad_superop(h: np.ndarray, channels: Iterable[tuple[float, np.ndarray]]) -> np.ndarray:
    """Generator of ``-i[h, rho] + sum_k (rate_k / 2) Lambda(x_k) rho``."""
    generator = hamiltonian_superop(h)
    for rate, x in channels:
        generator = generator + dissipator_superop(x, rate)
    return generator


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """A 9x9 generator acting on column-stacked density matrices.

    ``basis`` carries the dressed eigensystem when the generator was built
    for the secular dressed-state model.
    """

    matrix: np.ndarray
    model: Model
    params: Params
    basis: Any = field(default=None, repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (DIM * DIM, DIM * DIM):
            raise ValueError(f"Liouvillian must be {DIM * DIM}x{DIM * DIM}, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))

    @property
    def lowering(self) -> np.ndarray:
        return lowering_operator(self.params.xi)


def build_liouvillian(p: Params, model: Model | str = Model.FULL, *, rates: str = "general") -> Liouvillian:
    """Assemble the master-equation generator for one of the three models.

    ``rates`` only matters for the dressed model: ``"general"`` uses the
    finite-drive rates built from the dressed matrix elements of the lowering
    operator, ``"asymptotic"`` the strong-drive limits.  The dressed model
    presumes a drive well above the linewidth; that is the caller's call.
    """
    model = Model.parse(model)
    if model is Model.FULL:
        channels = [(p.gamma, lowering_operator(p.xi))]
        return Liouvillian(lindblad_superop(hamiltonian_full(p), channels), model, p)
    if model is Model.EFFECTIVE:
        channels = [
            (p.gamma, basis_projector(G, E)),
            (p.xi**2 * p.gamma, basis_projector(E, F)),
        ]
        return Liouvillian(lindblad_superop(hamiltonian_effective(p), channels), model, p)

    from .dressed import diagonalize, dressed_liouvillian_matrix

    basis = diagonalize(p)
    return Liouvillian(dressed_liouvillian_matrix(basis, rates=rates), model, p, basis=basis)


def format_matrix(m: np.ndarray, digits: int = 12) -> str:
    """Plain-text dump, one row per line, entries as ``re+imi`` tokens."""
    lines = []
    for row in np.asarray(m, dtype=complex):
        tokens = [f"{z.real:.{digits}g}{z.imag:+.{digits}g}i" for z in row]
        lines.append(" ".join(tokens))
    return "\n".join(lines)


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of :func:`format_matrix`."""
    rows = []
    for line in text.strip().splitlines():
        rows.append([complex(tok.replace("i", "j")) for tok in line.split()])
    return np.array(rows, dtype=complex)
