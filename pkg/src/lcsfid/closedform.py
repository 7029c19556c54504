"""Closed-form rotation-error sets and single-shot fidelities.

Each protocol cycle applies an imperfect pi/2 spin rotation. The deviation of
cycle i from pi/2 is the rotation error e_i; the state fidelity of one
realization depends on the timing, dephasing, lifetime, and g-ratio errors
only through this length-(n+1) vector. Four nested variants are provided, one
per error source added, and they reduce to one another in the obvious limits.

The state fidelity evaluates, for errors e_1 .. e_{n+1},

    F = ( prod_i cos(e_i / 2) + (-1)^(n+1) prod_i sin(e_i / 2) )^2

which is the factorized form of the even-cosine-subset expansion

    [ 1 + (-1)^(n+1) prod_i sin(e_i) + sum_{|J| even >= 2} prod_{j in J} cos(e_j) ] / 2^n

normalized so that zero error gives 1. It matches the time-domain oracle of
:mod:`lcsfid.protocol` to machine precision for arbitrary realizations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .protocol import ErrorSample, PulseSchedule

VARIANTS = ("basic", "dephasing", "lifetime", "full")


@dataclass(frozen=True)
class RotationErrors:
    """Per-cycle rotation-error vector e_1 .. e_{n+1} in radians."""

    errors: np.ndarray
    variant: str

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.errors, dtype=float))
        object.__setattr__(self, "errors", e)
        if self.variant not in VARIANTS:
            raise InvalidParameterError(f"variant must be one of {VARIANTS}")
        if e.ndim != 1 or len(e) < 1 or not np.all(np.isfinite(e)):
            raise InvalidParameterError("errors must be a finite 1-d vector")

    @property
    def n(self) -> int:
        return len(self.errors) - 1


def rotation_errors_basic(schedule: PulseSchedule, omega: float) -> RotationErrors:
    """Pulse-timing errors only: e_i = (e_i - e_{i-1}) * omega."""
    return RotationErrors(schedule.cycle_deltas() * omega, "basic")


def rotation_errors_dephasing(schedule: PulseSchedule, omega: float,
                              omega_prime: float) -> RotationErrors:
    """Timing plus frequency jitter: e_i = (pi/(2 omega) + de_i) * omega' - pi/2."""
    de = schedule.cycle_deltas()
    return RotationErrors((np.pi / (2 * omega) + de) * omega_prime - np.pi / 2, "dephasing")


def rotation_errors_lifetime(schedule: PulseSchedule, sample: ErrorSample,
                             omega: float) -> RotationErrors:
    """Timing, jitter, and dwell with equal-and-opposite excited precession.

    e_i = (pi/(2 omega) + de_i - t_{i-1}) * omega' - t_i * omega' - pi/2,
    the g_ratio = -1 case of :func:`rotation_errors_full`.
    """
    errs = rotation_errors_full(schedule, sample, omega, -1.0)
    return RotationErrors(errs.errors, "lifetime")


def rotation_errors_full(schedule: PulseSchedule, sample: ErrorSample, omega: float,
                         g_ratio: float) -> RotationErrors:
    """All four error sources:

    e_i = (pi/(2 omega) + de_i - t_{i-1}) * omega' + g_ratio * t_i * omega' - pi/2.

    The dwell t_{i-1} eats ground-state precession time before pulse i, while
    the dwell t_i precesses the excited pseudo-spin at g_ratio times the rate
    before photon i's polarization is fixed.
    """
    if schedule.n != sample.n:
        raise InvalidParameterError(
            f"schedule is for n={schedule.n}, sample for n={sample.n}")
    de = schedule.cycle_deltas()
    t = sample.decay_times
    wp = sample.omega_prime
    errs = ((np.pi / (2 * omega) + de - t[:-1]) * wp + g_ratio * t[1:] * wp - np.pi / 2)
    return RotationErrors(errs, "full")


def state_fidelity_closed(errs: RotationErrors | np.ndarray) -> float:
    """Single-shot n-photon state fidelity for a rotation-error vector of length n+1."""
    e = errs.errors if isinstance(errs, RotationErrors) else np.atleast_1d(np.asarray(errs, float))
    if len(e) < 2:
        raise InvalidParameterError("an n-photon chain has n+1 >= 2 rotation errors")
    n = len(e) - 1
    amp = np.prod(np.cos(e / 2)) + (-1.0) ** (n + 1) * np.prod(np.sin(e / 2))
    return float(amp * amp)


def state_fidelity_closed_batch(errs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`state_fidelity_closed` over the leading axis of (k, n+1) errors."""
    e = np.asarray(errs, dtype=float)
    n = e.shape[-1] - 1
    amp = np.prod(np.cos(e / 2), axis=-1) + (-1.0) ** (n + 1) * np.prod(np.sin(e / 2), axis=-1)
    return amp * amp


def gate_fidelity_closed(e: float) -> float:
    """Fidelity cos^2(e/2) of the pi/2 spin rotation with rotation error e."""
    if not np.all(np.isfinite(e)):
        raise InvalidParameterError("rotation error must be finite")
    return float(np.cos(e / 2.0) ** 2)
