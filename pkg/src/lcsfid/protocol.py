"""Time-domain oracle: one Lindner-Rudolph run for a concrete error realization.

The run is simulated gate by gate on the exact state vector: ground-state
precession between pulses, excited-state precession during each probabilistic
dwell, a polarization-preserving emission (spin-controlled copy), and a
half-wave-plate Z on every emitted photon. The first photon initializes the
spin and the last one disentangles it; both are projected onto outcome 0.

Conventions are fixed so that a zero-error run reproduces
:func:`lcsfid.densmat.ideal_lcs` exactly, with no residual local frame.

Fidelity normalization. The initialization projection is conditioned on (its
realized probability divides out, which is also what an initially mixed spin
gives automatically). The disentangling projection is renormalized by its
ideal success rate of 1/2 rather than by the realized probability: the
resulting figure is linear in the post-selected density matrix, so ensemble
averages of it are true ensemble fidelities, and it coincides with the
closed-form expression in :mod:`lcsfid.closedform` for every realization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import densmat
from .densmat import PureState, apply_single, emit_photon, fidelity_to_pure, ideal_lcs, project, ry, waveplate_z
from .errors import InvalidParameterError, OverlapError
from .model import DeviceParams

#: Ideal success probability of the disentangling projection.
HERALD_RATE = 0.5


@dataclass(frozen=True)
class PulseSchedule:
    """Relative timing offsets e_0 .. e_{n+1} of the n+2 excitation pulses.

    Pulse i nominally fires at i * t_lg / 4; with offsets it fires at
    i * t_lg / 4 + e_i. The experiment clock starts at pulse 0, so e_0 = 0.
    """

    offsets: np.ndarray
    n: int

    def __post_init__(self):
        off = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        object.__setattr__(self, "offsets", off)
        if off.shape != (self.n + 2,):
            raise InvalidParameterError(
                f"need n+2 = {self.n + 2} offsets for an {self.n}-photon chain, got {off.shape}")
        if off[0] != 0.0:
            raise InvalidParameterError("the reference pulse offset e_0 must be 0")
        if not np.all(np.isfinite(off)):
            raise InvalidParameterError("offsets must be finite")

    @classmethod
    def nominal(cls, n: int) -> "PulseSchedule":
        return cls(np.zeros(n + 2), n)

    @classmethod
    def from_offsets(cls, offsets) -> "PulseSchedule":
        offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
        return cls(offsets, len(offsets) - 2)

    @classmethod
    def uniform_cycle(cls, n: int, shift: float) -> "PulseSchedule":
        """Every cycle lengthened by ``shift`` seconds: e_i = i * shift."""
        return cls(np.arange(n + 2, dtype=float) * shift, n)

    def pulse_times(self, quarter: float) -> np.ndarray:
        return np.arange(self.n + 2) * quarter + self.offsets

    def cycle_deltas(self) -> np.ndarray:
        """Offset differences e_i - e_{i-1} for i = 1 .. n+1."""
        return np.diff(self.offsets)


@dataclass(frozen=True)
class ErrorSample:
    """One realized error draw: precession frequency and per-pulse dwell times."""

    omega_prime: float
    decay_times: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.decay_times, dtype=float))
        object.__setattr__(self, "decay_times", t)
        if not np.isfinite(self.omega_prime):
            raise InvalidParameterError("omega_prime must be finite")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise InvalidParameterError("decay times must be finite and >= 0")

    @property
    def n(self) -> int:
        return len(self.decay_times) - 2

    @classmethod
    def noiseless(cls, n: int, omega: float) -> "ErrorSample":
        return cls(omega, np.zeros(n + 2))


@dataclass(frozen=True)
class RunResult:
    """Outcome of one protocol run: heralded photonic state and projection probabilities."""

    state: PureState
    prob_init: float
    prob_final: float

    @property
    def joint_prob(self) -> float:
        return self.prob_init * self.prob_final


def _evolve(params: DeviceParams, schedule: PulseSchedule, sample: ErrorSample) -> PureState:
    """All n+2 excitation cycles, before any projection: spin + n+2 photons."""
    n = schedule.n
    if sample.n != n:
        raise InvalidParameterError(f"sample has {sample.n + 2} dwells, schedule expects {n + 2}")
    omega_p = sample.omega_prime
    g = params.g_ratio
    times = schedule.pulse_times(params.quarter)
    dwells = sample.decay_times

    state = PureState.ground(1)
    prev_decay = 0.0
    for i in range(n + 2):
        if i > 0:
            dt_ground = times[i] - prev_decay
            if dt_ground < 0:
                raise OverlapError(
                    f"pulse {i} at t={times[i]:.3e}s fires before the previous decay "
                    f"at t={prev_decay:.3e}s")
            state = apply_single(state, 0, ry(omega_p * dt_ground))
        # Excitation is an instantaneous relabeling into the trion pseudo-spin,
        # which precesses at g_ratio * omega' until the decay fixes the photon.
        state = apply_single(state, 0, ry(g * omega_p * dwells[i]))
        state = emit_photon(state, 0)
        state = waveplate_z(state, state.m - 1)
        prev_decay = times[i] + dwells[i]

    assert state.m == n + 3  # spin + initialization + n chain photons + disentangler
    return state


def run_single(params: DeviceParams, schedule: PulseSchedule, sample: ErrorSample) -> RunResult:
    """Simulate one run and herald on both boundary photons measuring 0.

    Returns the renormalized n-photon state (photons in emission order) together
    with the initialization-projection probability and the conditional
    probability of the disentangling projection.
    """
    state = _evolve(params, schedule, sample)
    # Photon 0 (qubit 1) initializes the spin; photon n+1 (last qubit) disentangles it.
    state, prob_init = project(state, 1, 0)
    state, prob_final = project(state, state.m - 1, 0)
    # The disentangling projection collapses the spin; drop it (probability 1).
    state, prob_spin = project(state, 0, 0)
    if abs(prob_spin - 1.0) > 1e-9:
        raise InvalidParameterError(f"spin failed to disentangle, p={prob_spin}")
    return RunResult(state, prob_init, prob_final)


def single_shot_fidelity(params: DeviceParams, schedule: PulseSchedule,
                         sample: ErrorSample) -> float:
    """Fidelity of one realization against the ideal chain, at ideal heralding rate.

    Equals fidelity_to_pure(state, ideal) * prob_final / HERALD_RATE, which is
    linear in the post-selected density matrix (see module docstring) and
    therefore averages to the ensemble fidelity.
    """
    res = run_single(params, schedule, sample)
    f_cond = fidelity_to_pure(res.state, ideal_lcs(schedule.n))
    return f_cond * res.prob_final / HERALD_RATE


def reduced_photon_purity(params: DeviceParams, schedule: PulseSchedule,
                          sample: ErrorSample) -> float:
    """Purity of the photonic reduced state after heralding (1 when the spin factors out)."""
    state = _evolve(params, schedule, sample)
    state, _ = project(state, 1, 0)
    state, _ = project(state, state.m - 1, 0)
    rho_photons = densmat.reduced_density(state, list(range(1, state.m)))
    return densmat.purity(rho_photons)
