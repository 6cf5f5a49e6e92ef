"""Exact and approximate resonance fluorescence of a driven three-level ladder atom."""

from .dressed import (
    DressedBasis,
    SecularRates,
    analytic_g2,
    analytic_two_time,
    diagonalize,
    lowering_coefficients,
    population_evolution_matrix,
    secular_g2,
    secular_rates,
    transition_frequencies,
)
from .dynamics import CorrelationTrace, evolve, g1, g2, g2_cross, steady_state
from .effective import EffectiveParams, effective_g2_zero, effective_params, effective_steady_states
from .errors import (
    DomainError,
    LadderError,
    NoEmissionError,
    NonUniqueSteadyStateError,
    ParameterError,
    SecularBreakdownError,
    TruncationError,
    UnsupportedCorrelationError,
)
from .model import (
    Liouvillian,
    Model,
    Params,
    build_liouvillian,
    dissipator,
    hamiltonian_full,
    lowering_operator,
)
from .spectrum import SpectrumResult, incoherent_spectrum, method_cross_check

__version__ = "0.1.0"
