"""Inverse scattering and long-time asymptotics for the focusing NLS equation."""

__version__ = "0.1.0"

from .asymptotics import evaluate_theorem, phase_shift, radiation_term
from .core import (
    ComplexField,
    DiscreteSpectrum,
    ReflectionData,
    ScatteringData,
    SpaceTimeCone,
    SpectralPoint,
)
from .gamma import complex_log_gamma
from .modulation import PartialTransmission, T0, kappa, modify_constants_cone
from .oracle import EvolutionConfig, conserved_mass, evolve, richardson_error, sample_field
from .pcmodel import check_jump, evaluate_M_PC, pc_constants, pcf_D
from .scattering import (
    Potential,
    find_discrete_spectrum,
    norming_constants,
    scatter,
    scattering_coeffs,
    verify_trace_formula,
)
from .solitons import one_soliton, reconstruct_psi, soliton_psi, solve_soliton

__all__ = [
    "ComplexField",
    "DiscreteSpectrum",
    "EvolutionConfig",
    "PartialTransmission",
    "Potential",
    "ReflectionData",
    "ScatteringData",
    "SpaceTimeCone",
    "SpectralPoint",
    "T0",
    "check_jump",
    "complex_log_gamma",
    "conserved_mass",
    "evaluate_M_PC",
    "evaluate_theorem",
    "evolve",
    "find_discrete_spectrum",
    "kappa",
    "modify_constants_cone",
    "norming_constants",
    "one_soliton",
    "pc_constants",
    "pcf_D",
    "phase_shift",
    "radiation_term",
    "reconstruct_psi",
    "richardson_error",
    "sample_field",
    "scatter",
    "scattering_coeffs",
    "soliton_psi",
    "solve_soliton",
    "verify_trace_formula",
]
