"""Exact state-vector and density-matrix engine for the spin + photon register.

Qubit 0 is the emitter spin; photons are appended in emission order. Basis
convention: spin up <-> |0> <-> horizontal polarization, spin down <-> |1> <->
vertical. Amplitudes are stored big-endian (qubit 0 is the most significant
bit), so ``psi.reshape((2,) * m)`` indexes qubits left to right.

Everything here is a pure function on immutable inputs; registers are small
(a dozen qubits at most), so dense complex vectors are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImpossibleOutcomeError, InvalidParameterError

NORM_ATOL = 1e-12
PROB_FLOOR = 1e-14

PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class PureState:
    """Normalized state vector over ``m`` qubits."""

    amplitudes: np.ndarray
    m: int

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amp)
        if self.m < 1 or amp.shape != (2 ** self.m,):
            raise InvalidParameterError(
                f"amplitude vector of length {amp.shape} does not match m={self.m}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-10:
            raise InvalidParameterError(f"state norm {norm} is not 1")

    @classmethod
    def ground(cls, m: int = 1) -> "PureState":
        amp = np.zeros(2 ** m, dtype=complex)
        amp[0] = 1.0
        return cls(amp, m)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace density operator on a qubit register."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.ascontiguousarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", rho)
        dim = rho.shape[0]
        if rho.ndim != 2 or rho.shape != (dim, dim) or dim & (dim - 1):
            raise InvalidParameterError(f"entries must be a 2^m x 2^m matrix, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > NORM_ATOL:
            raise InvalidParameterError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise InvalidParameterError(f"trace {np.trace(rho)} is not 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise InvalidParameterError("density matrix has a significantly negative eigenvalue")

    @property
    def m(self) -> int:
        return int(round(np.log2(self.entries.shape[0])))

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        """Convex mixture of pure states."""
        rho = sum(w * np.outer(s.amplitudes, s.amplitudes.conj())
                  for w, s in zip(weights, states))
        return cls(rho)


def ry(theta: float) -> np.ndarray:
    """Rotation about the y axis with ry(theta)|0> = cos(theta/2)|0> + sin(theta/2)|1>."""
    if not np.isfinite(theta):
        raise InvalidParameterError(f"theta must be finite, got {theta}")
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def apply_single(state: PureState, index: int, u: np.ndarray) -> PureState:
    """Apply a single-qubit unitary to the given qubit."""
    if not 0 <= index < state.m:
        raise InvalidParameterError(f"qubit index {index} out of range for m={state.m}")
    u = np.asarray(u, dtype=complex)
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > NORM_ATOL:
        raise InvalidParameterError("u is not unitary")
    t = state.amplitudes.reshape((2,) * state.m)
    t = np.moveaxis(np.tensordot(u, np.moveaxis(t, index, 0), axes=(1, 0)), 0, index)
    return PureState(t.reshape(-1), state.m)


def emit_photon(state: PureState, spin_index: int = 0) -> PureState:
    """Append a photon entangled with the spin by a polarization-preserving emission.

    The new qubit starts in |0> and the spin value is copied onto it in the
    computational basis (a CNOT with the spin as control), realizing the
    isometry |s> -> |s>|s>.
    """
    if spin_index != 0:
        raise InvalidParameterError("the spin is qubit 0 by construction")
    t = state.amplitudes.reshape(2, -1)
    out = np.zeros((2, t.shape[1], 2), dtype=complex)
    out[0, :, 0] = t[0]
    out[1, :, 1] = t[1]
    return PureState(out.reshape(-1), state.m + 1)


def waveplate_z(state: PureState, photon_index: int) -> PureState:
    """Half-wave-plate action on one photon: a Pauli Z in the polarization basis."""
    if photon_index < 1:
        raise InvalidParameterError("waveplate acts on photons (index >= 1), not the spin")
    return apply_single(state, photon_index, PAULI_Z)


def project(state: PureState, index: int, outcome: int) -> tuple[PureState, float]:
    """Project one qubit onto a computational-basis outcome and drop it.

    Returns the renormalized post-measurement state on the remaining qubits and
    the outcome probability. Projecting the only qubit of a register leaves the
    trivial (scalar) register, represented as a fresh |0> for uniformity.
    """
    if not 0 <= index < state.m:
        raise InvalidParameterError(f"qubit index {index} out of range for m={state.m}")
    if outcome not in (0, 1):
        raise InvalidParameterError(f"outcome must be 0 or 1, got {outcome}")
    if state.m == 1:
        amp = state.amplitudes[outcome]
        prob = float(abs(amp) ** 2)
        if prob < PROB_FLOOR:
            raise ImpossibleOutcomeError(f"outcome {outcome} has probability {prob}")
        # Register becomes a scalar; represent it as a fresh |0> for uniformity.
        return PureState(np.array([1.0 + 0.0j, 0.0j]), 1), prob
    t = np.moveaxis(state.amplitudes.reshape((2,) * state.m), index, 0)
    kept = t[outcome].reshape(-1)
    prob = float(np.vdot(kept, kept).real)
    if prob < PROB_FLOOR:
        raise ImpossibleOutcomeError(f"outcome {outcome} has probability {prob}")
    return PureState(kept / np.sqrt(prob), state.m - 1), prob


def fidelity_to_pure(rho: DensityMatrix | PureState, psi: PureState) -> float:
    """<psi| rho |psi>, clamped to [0, 1].

    Accepts a pure state in place of ``rho``, in which case the squared overlap
    is returned.
    """
    if isinstance(rho, PureState):
        if rho.m != psi.m:
            raise InvalidParameterError(f"dimension mismatch: {rho.m} vs {psi.m} qubits")
        val = abs(np.vdot(psi.amplitudes, rho.amplitudes)) ** 2
    else:
        if rho.m != psi.m:
            raise InvalidParameterError(f"dimension mismatch: {rho.m} vs {psi.m} qubits")
        val = float(np.real(psi.amplitudes.conj() @ rho.entries @ psi.amplitudes))
    if val < -1e-10 or val > 1.0 + 1e-10:
        raise InvalidParameterError(f"fidelity {val} outside [0, 1] beyond tolerance")
    return min(max(val, 0.0), 1.0)


def ideal_lcs(n: int) -> PureState:
    """Ideal n-photon linear cluster state: |+>^n entangled by CZ between neighbors.

    The local frame is chosen so that a zero-error protocol run (see
    :mod:`lcsfid.protocol`) reproduces this state exactly; with the basis and
    waveplate conventions used there no extra local correction is needed.
    """
    if not 1 <= n <= 14:
        raise InvalidParameterError(f"photon count must be in [1, 14], got {n}")
    amp = np.full(2 ** n, 2.0 ** (-n / 2.0), dtype=complex)
    idx = np.arange(2 ** n)
    for i in range(n - 1):
        both = ((idx >> (n - 1 - i)) & 1) & ((idx >> (n - 2 - i)) & 1)
        amp[both == 1] *= -1.0
    return PureState(amp, n)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)."""
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def reduced_density(state: PureState, keep: list[int]) -> DensityMatrix:
    """Partial trace down to the listed qubits (in their current order)."""
    keep = sorted(keep)
    drop = [q for q in range(state.m) if q not in keep]
    t = state.amplitudes.reshape((2,) * state.m)
    t = np.transpose(t, keep + drop)
    a = t.reshape(2 ** len(keep), 2 ** len(drop))
    return DensityMatrix(a @ a.conj().T)
