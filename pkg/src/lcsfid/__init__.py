"""Fidelity modeling for photonic linear cluster states from a precessing spin.

The package models the periodic-excitation protocol in which a quarter Larmor
precession separates successive photon emissions: an exact state-vector oracle
for single realizations, closed-form per-realization fidelities, analytic
ensemble integrals over timing, dephasing, lifetime, and g-ratio errors, and
parameter studies that locate optimal operating points.
"""

from .closedform import (
    RotationErrors,
    gate_fidelity_closed,
    rotation_errors_basic,
    rotation_errors_dephasing,
    rotation_errors_full,
    rotation_errors_lifetime,
    state_fidelity_closed,
)
from .densmat import DensityMatrix, PureState, fidelity_to_pure, ideal_lcs
from .ensemble import (
    FidelityResult,
    IntegrationOptions,
    ensemble_gate_fidelity,
    ensemble_state_fidelity,
    exp_trig_moment,
    mc_estimate,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    ImpossibleOutcomeError,
    InvalidParameterError,
    LcsfidError,
    OverlapError,
)
from .model import DeviceParams, NaturalUnits, clock_rate, larmor_period, lcs_rate
from .protocol import ErrorSample, PulseSchedule, RunResult, run_single, single_shot_fidelity
from .stochastics import ErrorDistribution, pdf_decay_times, pdf_frequency, pdf_joint, population, sample

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
