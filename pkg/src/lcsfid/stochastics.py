"""Probability densities over error realizations and reproducible samplers.

The two noise channels are independent: the precession frequency of one
experiment is Gaussian around its mean with width sigma_c = sqrt(2)/T2*, and
each excited-state dwell is exponential with the radiative lifetime, optionally
truncated to a post-selection window [0, t_bin] and renormalized.

Note the excited-state population L(t) is a survival function, not a density;
the dwell-time density is -dL/dt, which for an instantaneous rise is
exp(-t/tau_d)/tau_d. All ensemble integrals use that normalized density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidParameterError
from .model import DeviceParams
from .protocol import ErrorSample


@dataclass(frozen=True)
class ErrorDistribution:
    """Joint distribution of (omega', t_0 .. t_{n+1}) for an n-photon run."""

    omega_mean: float
    sigma_c: float
    tau_d: float
    n: int
    tau_r: float = 0.0
    t_bin: float | None = None

    def __post_init__(self):
        if not self.sigma_c >= 0:
            raise InvalidParameterError(f"sigma_c must be >= 0, got {self.sigma_c}")
        if self.tau_d < 0:
            raise InvalidParameterError(f"tau_d must be >= 0, got {self.tau_d}")
        if self.t_bin is not None and not self.t_bin > 0:
            raise InvalidParameterError(f"t_bin must be positive, got {self.t_bin}")
        if self.n < 1:
            raise InvalidParameterError(f"photon count must be >= 1, got {self.n}")

    @classmethod
    def from_params(cls, params: DeviceParams, n: int,
                    t_bin: float | None = None) -> "ErrorDistribution":
        sigma = 0.0 if math.isinf(params.t2_star) else params.sigma_c
        return cls(omega_mean=params.omega, sigma_c=sigma, tau_d=params.tau_d,
                   n=n, tau_r=params.tau_r, t_bin=t_bin)


def pdf_frequency(omega_prime, dist: ErrorDistribution):
    """Gaussian density of the realized angular precession frequency."""
    s = dist.sigma_c
    if s == 0:
        raise InvalidParameterError("frequency density is degenerate at sigma_c = 0")
    x = (np.asarray(omega_prime, dtype=float) - dist.omega_mean) / s
    return np.exp(-0.5 * x * x) / (s * math.sqrt(2.0 * math.pi))


def population(t, tau_r: float, tau_d: float):
    """Excited-state population: erf rise with constant tau_r, exponential decay.

    For tau_r = 0 the rise is a unit step at t = 0.
    """
    if tau_d <= 0:
        raise InvalidParameterError(f"tau_d must be positive, got {tau_d}")
    if tau_r < 0:
        raise InvalidParameterError(f"tau_r must be >= 0, got {tau_r}")
    t = np.asarray(t, dtype=float)
    if tau_r == 0:
        rise = np.where(t >= 0, 1.0, 0.0)
    else:
        rise = 0.5 * (1.0 + special.erf(t / (math.sqrt(2.0) * tau_r)))
    # Clip the decay exponent so rise * exp stays 0 (not nan) deep in the tail t << 0.
    return rise * np.exp(-np.clip(t / tau_d, -700.0, None))


def _window_mass(dist: ErrorDistribution) -> float:
    if dist.t_bin is None or dist.tau_d == 0:
        return 1.0
    return 1.0 - math.exp(-dist.t_bin / dist.tau_d)


def pdf_decay_times(sample: ErrorSample | np.ndarray, dist: ErrorDistribution):
    """Joint density of the dwell-time vector: independent normalized exponentials.

    With a post-selection window each factor is truncated to [0, t_bin] and
    renormalized by the window mass 1 - exp(-t_bin/tau_d).
    """
    t = sample.decay_times if isinstance(sample, ErrorSample) else np.asarray(sample, float)
    if dist.tau_d == 0:
        raise InvalidParameterError("dwell-time density is degenerate at tau_d = 0")
    dens = np.exp(-t / dist.tau_d) / dist.tau_d / _window_mass(dist)
    if dist.t_bin is not None:
        dens = np.where(t <= dist.t_bin, dens, 0.0)
    dens = np.where(t >= 0, dens, 0.0)
    return float(np.prod(dens)) if dens.ndim == 1 else np.prod(dens, axis=-1)


def pdf_joint(omega_prime, sample: ErrorSample | np.ndarray, dist: ErrorDistribution):
    """Product density of the independent frequency and dwell channels."""
    return pdf_frequency(omega_prime, dist) * pdf_decay_times(sample, dist)


def sample(dist: ErrorDistribution, seed: int) -> ErrorSample:
    """Draw one error realization, deterministically for a fixed seed.

    Uses the counter-based Philox bit generator so draws are reproducible
    across platforms and trivially parallelizable by seed.
    """
    omega_p, dwells = sample_batch(dist, seed, 1)
    return ErrorSample(float(omega_p[0]), dwells[0])


def sample_batch(dist: ErrorDistribution, seed: int, k: int):
    """Draw k realizations at once: (omega' array of shape (k,), dwells of shape (k, n+2))."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    omega_p = dist.omega_mean + dist.sigma_c * rng.standard_normal(k)
    shape = (k, dist.n + 2)
    if dist.tau_d == 0:
        dwells = np.zeros(shape)
    elif dist.t_bin is None:
        dwells = rng.exponential(dist.tau_d, size=shape)
    else:
        # Inverse CDF of the window-truncated exponential.
        u = rng.random(shape)
        dwells = -dist.tau_d * np.log1p(-u * _window_mass(dist))
    return omega_p, dwells
