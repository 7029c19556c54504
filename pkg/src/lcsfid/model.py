"""Device parameters, unit conversions, and derived rates.

Single source of truth for the physical quantities of a cluster-state source:
excited-state lifetime, spin dephasing time, Lande g-factors, and the ground-state
Larmor period that sets the protocol clock. All other modules consume
:class:`DeviceParams` instead of raw numbers so unit handling lives in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidParameterError

# CODATA 2018 values.
HBAR = 1.054571817e-34     # reduced Planck constant, J s (exact h / 2 pi)
MU_B = 9.2740100783e-24    # Bohr magneton, J / T

#: Relative tolerance for mutual-consistency checks between derived quantities.
CONSISTENCY_RTOL = 1e-12


def larmor_period(g_ground: float, field_b: float) -> float:
    """Ground-state Larmor precession period 2*pi*hbar / (g * mu_B * B) in seconds.

    Parameters
    ----------
    g_ground : dimensionless Lande factor of the ground-state spin (nonzero).
    field_b : magnetic field in tesla (positive).
    """
    if g_ground == 0.0 or not math.isfinite(g_ground):
        raise InvalidParameterError(f"g_ground must be finite and nonzero, got {g_ground}")
    if field_b <= 0.0 or not math.isfinite(field_b):
        raise InvalidParameterError(f"field_b must be positive, got {field_b}")
    return 2.0 * math.pi * HBAR / (abs(g_ground) * MU_B * field_b)


def clock_rate(t_lg: float) -> float:
    """Pulse cycle rate 4 / T_LG in hertz: one excitation per quarter precession."""
    if t_lg <= 0.0:
        raise InvalidParameterError(f"t_lg must be positive, got {t_lg}")
    return 4.0 / t_lg


def lcs_rate(n: int, t_lg: float) -> float:
    """Generation rate of n-photon linear cluster states, 4 / ((n + 2) * T_LG) in hertz.

    An n-photon chain consumes n + 2 quarter periods: one initialization photon,
    n chain photons, and one disentangling photon.
    """
    if n < 1:
        raise InvalidParameterError(f"photon count must be >= 1, got {n}")
    if t_lg <= 0.0:
        raise InvalidParameterError(f"t_lg must be positive, got {t_lg}")
    return 4.0 / ((n + 2) * t_lg)


@dataclass(frozen=True)
class DeviceParams:
    """Physical description of the emitter.

    Exactly one of ``field_b`` (with ``g_ground``), ``t_lg``, or ``clock`` must be
    supplied as the source of the Larmor period; the others are derived. The
    excited-to-ground g-factor ratio may be given directly as ``g_ratio`` or via
    the pair (``g_excited``, ``g_ground``).

    Attributes
    ----------
    tau_d : excited-state lifetime in seconds (>= 0; 0 means instantaneous decay).
    tau_r : excitation rise constant in seconds (>= 0; ensemble math assumes 0).
    t2_star : inhomogeneous spin dephasing time in seconds (may be ``inf``).
    g_ratio : g_excited / g_ground, the only g-dependence of the error model.
    t_lg : ground-state Larmor period in seconds.
    """

    tau_d: float
    t2_star: float
    tau_r: float = 0.0
    g_ratio: float | None = None
    g_ground: float | None = None
    g_excited: float | None = None
    field_b: float | None = None
    t_lg: float | None = None
    clock: float | None = None

    def __post_init__(self):
        if self.tau_d < 0 or not math.isfinite(self.tau_d):
            raise InvalidParameterError(f"tau_d must be finite and >= 0, got {self.tau_d}")
        if self.tau_r < 0 or not math.isfinite(self.tau_r):
            raise InvalidParameterError(f"tau_r must be finite and >= 0, got {self.tau_r}")
        if not self.t2_star > 0:
            raise InvalidParameterError(f"t2_star must be positive, got {self.t2_star}")

        sources = [s for s, v in (("field_b", self.field_b), ("t_lg", self.t_lg),
                                  ("clock", self.clock)) if v is not None]
        if len(sources) != 1:
            raise InvalidParameterError(
                f"exactly one of field_b, t_lg, clock must be given, got {sources or 'none'}")
        if self.field_b is not None:
            if self.g_ground is None:
                raise InvalidParameterError("field_b requires g_ground")
            t_lg = larmor_period(self.g_ground, self.field_b)
        elif self.clock is not None:
            if self.clock <= 0:
                raise InvalidParameterError(f"clock must be positive, got {self.clock}")
            t_lg = 4.0 / self.clock
        else:
            if not self.t_lg > 0:
                raise InvalidParameterError(f"t_lg must be positive, got {self.t_lg}")
            t_lg = float(self.t_lg)
        object.__setattr__(self, "t_lg", t_lg)

        if self.g_ratio is None:
            if self.g_excited is None or self.g_ground in (None, 0.0):
                raise InvalidParameterError(
                    "give g_ratio directly, or both g_excited and a nonzero g_ground")
            object.__setattr__(self, "g_ratio", self.g_excited / self.g_ground)
        elif self.g_excited is not None and self.g_ground not in (None, 0.0):
            implied = self.g_excited / self.g_ground
            if abs(implied - self.g_ratio) > CONSISTENCY_RTOL * max(1.0, abs(self.g_ratio)):
                raise InvalidParameterError(
                    f"g_ratio {self.g_ratio} inconsistent with g_excited/g_ground {implied}")
        if not math.isfinite(self.g_ratio):
            raise InvalidParameterError(f"g_ratio must be finite, got {self.g_ratio}")

    @property
    def omega(self) -> float:
        """Angular precession frequency 2*pi / t_lg in rad/s.

        A quarter period then rotates the spin by exactly pi/2.
        """
        return 2.0 * math.pi / self.t_lg

    @property
    def quarter(self) -> float:
        """Quarter Larmor period in seconds, the nominal pulse spacing."""
        return self.t_lg / 4.0

    @property
    def clock_rate(self) -> float:
        return clock_rate(self.t_lg)

    @property
    def sigma_c(self) -> float:
        """Standard deviation sqrt(2)/T2* of the precession-frequency jitter, rad/s."""
        return math.sqrt(2.0) / self.t2_star

    def replace(self, **kwargs) -> "DeviceParams":
        """Copy with some fields replaced; the Larmor-period source may be swapped."""
        base = dict(tau_d=self.tau_d, t2_star=self.t2_star, tau_r=self.tau_r,
                    g_ratio=self.g_ratio, t_lg=self.t_lg)
        if "field_b" in kwargs or "clock" in kwargs:
            base.pop("t_lg")
            base["g_ground"] = self.g_ground
        base.update(kwargs)
        return DeviceParams(**base)


@dataclass(frozen=True)
class NaturalUnits:
    """Conversion between SI seconds and times measured in Larmor periods.

    The protocol's natural clock is t_lg, so sweep grids and thresholds are most
    readable in these units; SI appears only at the I/O boundary.
    """

    scale: float  # seconds per unit (= t_lg)

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")

    @classmethod
    def of(cls, params: DeviceParams) -> "NaturalUnits":
        return cls(scale=params.t_lg)

    def to_natural(self, seconds):
        return seconds / self.scale

    def to_seconds(self, natural):
        return natural * self.scale
