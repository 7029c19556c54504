"""Parameter sweeps and optimizers: operating-point studies for the protocol.

All sweeps evaluate ensemble fidelities on deterministic grids and report true
grid argmaxes, optionally refined by golden-section search. Landscapes here
are smooth but can be nearly flat; optima flag themselves as degenerate when
the refinement interval stops being informative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import IntegrationOptions, ensemble_gate_fidelity, ensemble_state_fidelity, state_fidelity_batch
from .errors import InvalidParameterError
from .model import DeviceParams
from .protocol import PulseSchedule

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Optimum:
    """Result of a one- or two-dimensional fidelity maximization."""

    location: tuple
    value: float
    grid_resolution: float
    tolerance: float
    degenerate: bool = False
    interval: tuple | None = None
    warning: str | None = None

    def __post_init__(self):
        if not -1e-9 <= self.value <= 1 + 1e-9:
            raise InvalidParameterError(f"optimum value {self.value} outside [0, 1]")


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular sweep output: named axes, per-cell values, fixed context."""

    axis_names: tuple
    axes: tuple
    values: np.ndarray
    fixed: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(a) for a in self.axes)
        if self.values.shape != shape:
            raise InvalidParameterError(f"values shape {self.values.shape} != axes {shape}")
        for a in self.axes:
            if len(a) < 2:
                raise InvalidParameterError("each axis needs at least 2 points")

    def argmax(self) -> tuple:
        idx = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return tuple(self.axes[k][i] for k, i in enumerate(idx))

    def rows(self):
        """Iterate (axis values ..., cell value, extras ...) row by row."""
        extra_keys = sorted(self.extras)
        it = np.ndindex(self.values.shape)
        for idx in it:
            coords = [self.axes[k][i] for k, i in enumerate(idx)]
            row = coords + [self.values[idx]]
            row += [self.extras[k][idx] for k in extra_keys]
            yield row

    def header(self):
        return list(self.axis_names) + ["value"] + sorted(self.extras)


def golden_section(f, lo: float, hi: float, tol: float):
    """Golden-section maximization of a unimodal f on [lo, hi] to width tol."""
    a, b = float(lo), float(hi)
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, max(fc, fd), (a, b)


def _maximize_on_grid(f, lo, hi, coarse, tol):
    """Coarse grid scan followed by golden-section refinement around the best cell."""
    grid = np.linspace(lo, hi, coarse)
    vals = np.array([f(x) for x in grid])
    i = int(np.argmax(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    x, v, bracket = golden_section(f, a, b, tol)
    spread = float(vals.max() - vals.min())
    degenerate = False
    warning = None
    interval = bracket
    if spread < 10 * np.finfo(float).eps or vals.max() - np.median(vals) < 1e-12:
        degenerate = True
        interval = (lo, hi)
        warning = "fidelity landscape is flat within tolerance; any point in the interval is optimal"
    elif i == 0 or i == len(grid) - 1:
        degenerate = True
        warning = "optimum sits on a search bound; enlarge the bounds to bracket an interior maximum"
    return Optimum((x,), float(v), float(grid[1] - grid[0]), tol,
                   degenerate=degenerate, interval=interval, warning=warning)


def optimal_uniform_shift(params: DeviceParams, n: int | None,
                          opts: IntegrationOptions = IntegrationOptions(),
                          tol_rad: float = 1e-9):
    """Best linear pulse-timing correction: every cycle lengthened by one shift.

    Maximizes the gate fidelity (n is None) or the n-photon state fidelity over
    a single per-cycle shift, returned in seconds together with the fidelity.
    """
    omega = params.omega
    if n is None:
        f = lambda d: ensemble_gate_fidelity(params, 0.0, d / omega, opts).value
    else:
        f = lambda d: ensemble_state_fidelity(
            params, PulseSchedule.uniform_cycle(n, d / omega), opts).value
    d, v, _ = golden_section(f, -0.45 * math.pi, 0.45 * math.pi, tol_rad)
    return d / omega, v


def optimal_precession(params: DeviceParams, bounds: tuple[float, float], tol: float,
                       opts: IntegrationOptions = IntegrationOptions(),
                       timing_correction: bool = False,
                       coarse_points: int = 41) -> Optimum:
    """Larmor period maximizing the gate fidelity, in seconds.

    Scans t_lg on a coarse grid over ``bounds`` and refines by golden section to
    ``tol``. Pulses stay at nominal quarter periods unless ``timing_correction``
    jointly optimizes the linear timing shift at every candidate period.
    """
    lo, hi = bounds
    if not (hi > lo > 0):
        raise InvalidParameterError(f"bad bounds {bounds}")
    if hi < 2 * lo:
        raise InvalidParameterError("bounds must span at least a factor of 2")

    def f(t_lg):
        p = params.replace(t_lg=t_lg)
        if timing_correction:
            return optimal_uniform_shift(p, None, opts, tol_rad=1e-7)[1]
        return ensemble_gate_fidelity(p, 0.0, 0.0, opts).value

    return _maximize_on_grid(f, lo, hi, coarse_points, tol)


def scan_pulse_timing(params: DeviceParams, n: int = 2,
                      first_range: tuple[float, float] = (0.15, 0.45),
                      second_range: tuple[float, float] = (0.35, 0.80),
                      resolution: float = 0.005,
                      opts: IntegrationOptions = IntegrationOptions()):
    """Two-photon state fidelity versus the first and second excitation times.

    Axes are pulse times in Larmor-period units (nominally 0.25 and 0.50). The
    trailing disentangling pulse follows at the extrapolated cycle, so the
    uniform-cycle family lies on the scan diagonal. Returns the grid and the
    argmax, whose ``location`` holds the two pulse times; feed the optimum to
    :func:`optimal_cycle_time` for the mean pulse spacing.
    """
    if resolution > 0.005 + 1e-12:
        raise InvalidParameterError("resolution must be <= 0.005 Larmor periods")
    if n != 2:
        raise InvalidParameterError("the timing scan is defined for the 2-photon chain")
    t_lg = params.t_lg
    omega = params.omega
    first = np.round(np.arange(first_range[0], first_range[1] + resolution / 2, resolution), 10)
    second = np.round(np.arange(second_range[0], second_range[1] + resolution / 2, resolution), 10)
    a = first[:, None] * np.ones_like(second)[None, :]
    b = np.ones_like(first)[:, None] * second[None, :]
    # Cycle deltas in radians for gates 1..3; pulse 3 extrapolates the last cycle.
    d1 = (a - 0.25) * 2 * math.pi
    d2 = (b - a - 0.25) * 2 * math.pi
    d3 = d2.copy()
    valid = b > a
    dvecs = np.stack([d1, d2, d3], axis=-1).reshape(-1, 3)
    vals = state_fidelity_batch(params, dvecs, opts).reshape(a.shape)
    vals = np.where(valid, vals, 0.0)
    grid = SweepGrid(("first_pulse_tlg", "second_pulse_tlg"), (first, second), vals,
                     fixed={"t_lg_s": t_lg, "resolution_tlg": resolution})
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    loc = (float(first[i]), float(second[j]))
    cycle = (loc[0] + (loc[1] - loc[0])) / 2.0
    opt = Optimum(loc, float(vals[i, j]), resolution, resolution,
                  interval=(cycle - resolution, cycle + resolution))
    return grid, opt


def optimal_cycle_time(opt: Optimum) -> float:
    """Mean spacing between consecutive optimal pulses, in Larmor periods."""
    first, second = opt.location
    return (first + (second - first)) / 2.0


def sweep_heatmap_precession_coherence(params: DeviceParams, t_lg_values, t2_star_values,
                                       opts: IntegrationOptions = IntegrationOptions()) -> SweepGrid:
    """Gate fidelity over a (t_lg, T2*) grid at fixed lifetime.

    The per-column (fixed T2*) argmax over t_lg is exposed in ``extras`` so the
    growth of the optimal period with coherence is directly testable.
    """
    t_lg_values = np.asarray(t_lg_values, float)
    t2_values = np.asarray(t2_star_values, float)
    vals = np.empty((len(t_lg_values), len(t2_values)))
    for j, t2 in enumerate(t2_values):
        for i, tl in enumerate(t_lg_values):
            p = params.replace(t_lg=tl, t2_star=t2)
            vals[i, j] = ensemble_gate_fidelity(p, 0.0, 0.0, opts).value
    argmax_rows = t_lg_values[np.argmax(vals, axis=0)]
    col_argmax = np.broadcast_to(argmax_rows[None, :], vals.shape).copy()
    return SweepGrid(("t_lg_s", "t2_star_s"), (t_lg_values, t2_values), vals,
                     fixed={"tau_d_s": params.tau_d},
                     extras={"optimal_t_lg_s": col_argmax})


def sweep_gratio(params: DeviceParams, g_values, tau_values,
                 bounds: tuple[float, float], tol: float,
                 opts: IntegrationOptions = IntegrationOptions()) -> SweepGrid:
    """Gate fidelity over (g_ratio, tau_d) with the Larmor period optimized per cell.

    Each cell reports the fidelity at its own optimal precession period, which
    is cached in ``extras['t_lg_star_s']``.
    """
    g_values = np.asarray(g_values, float)
    tau_values = np.asarray(tau_values, float)
    vals = np.empty((len(g_values), len(tau_values)))
    tstar = np.empty_like(vals)
    for i, g in enumerate(g_values):
        for j, tau in enumerate(tau_values):
            p = params.replace(g_ratio=g, tau_d=tau)
            if tau == 0.0:
                # No lifetime error: faster is strictly better, no interior optimum.
                opt = _maximize_on_grid(
                    lambda t: ensemble_gate_fidelity(p.replace(t_lg=t), 0.0, 0.0, opts).value,
                    bounds[0], bounds[1], 17, tol)
            else:
                opt = optimal_precession(p, bounds, tol, opts)
            vals[i, j] = opt.value
            tstar[i, j] = opt.location[0]
    return SweepGrid(("g_ratio", "tau_d_s"), (g_values, tau_values), vals,
                     fixed={"t2_star_s": params.t2_star},
                     extras={"t_lg_star_s": tstar})


def fidelity_vs_length(params: DeviceParams, n_max: int,
                       opts: IntegrationOptions = IntegrationOptions()) -> SweepGrid:
    """State fidelity versus chain length, with the total generation time alongside.

    The time axis value for n photons is (n + 2) quarter periods, the emission
    time of the disentangling photon.
    """
    ns = np.arange(1, n_max + 1)
    vals = np.empty(len(ns), float)
    for k, n in enumerate(ns):
        vals[k] = ensemble_state_fidelity(params, PulseSchedule.nominal(int(n)), opts).value
    times = (ns + 2) * params.quarter
    grid = SweepGrid(("photons",), (ns.astype(float),), vals,
                     fixed={"t_lg_s": params.t_lg, "t2_star_s": params.t2_star,
                            "tau_d_s": params.tau_d},
                     extras={"total_time_s": times})
    return grid


def gate_vs_cluster_argmax(params: DeviceParams, bounds: tuple[float, float], tol: float,
                           ns=(2, 3, 4),
                           opts: IntegrationOptions = IntegrationOptions()) -> list[Optimum]:
    """Argmax over the Larmor period of the gate and of each n-photon state fidelity.

    Pulses stay nominal (quarter periods). Error localization through photon
    emission should keep all argmaxes aligned; the list preserves the order
    (gate, then the requested chain lengths).
    """
    out = [optimal_precession(params, bounds, tol, opts)]
    for n in ns:
        def f(t_lg, n=n):
            p = params.replace(t_lg=t_lg)
            return ensemble_state_fidelity(p, PulseSchedule.nominal(n), opts).value
        out.append(_maximize_on_grid(f, bounds[0], bounds[1], 41, tol))
    return out


def spin_trace(params: DeviceParams, duration: float, step: float):
    """Ensemble-averaged spin polarization and its coherence envelope over time.

    S_z(t) = exp(-sigma_c^2 t^2 / 2) cos(omega t); the envelope equals
    exp(-(t / T2*)^2).
    """
    if step <= 0 or duration <= 0:
        raise InvalidParameterError("duration and step must be positive")
    t = np.arange(0.0, duration + step / 2, step)
    sigma = 0.0 if math.isinf(params.t2_star) else params.sigma_c
    envelope = np.exp(-0.5 * sigma ** 2 * t ** 2)
    sz = envelope * np.cos(params.omega * t)
    return t, sz, envelope
