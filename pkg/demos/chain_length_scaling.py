"""Partial spin reinitialization and cluster-length scaling.

Every photon emission localizes the accumulated spin error onto the emitted
photon, partially resetting the spin. The state fidelity therefore decays far
more slowly with chain length than the bare coherence envelope evaluated at
the total generation time.
"""

import numpy as np

from lcsfid import DeviceParams
from lcsfid.studies import fidelity_vs_length, spin_trace

p = DeviceParams(tau_d=0.0, t2_star=30e-9, g_ratio=-1.0, t_lg=10e-9)
grid = fidelity_vs_length(p, 10)

print("state fidelity vs chain length (tau_d = 0, T2* = 30 ns, t_lg = 10 ns)\n")
print(f"{'photons':>7s} {'total time':>11s} {'fidelity':>9s} {'coherence env':>14s}")
for (n,), f in zip(np.ndindex(grid.values.shape), grid.values):
    t_total = grid.extras["total_time_s"][n]
    env = np.exp(-(t_total / p.t2_star) ** 2)
    print(f"{int(grid.axes[0][n]):7d} {t_total*1e9:9.1f}ns {f:9.5f} {env:14.5f}")

print("\nA 10-photon chain takes 30 ns to build, a full coherence time, yet")
print("keeps ~97% fidelity while the raw envelope has fallen to ~37%.")

t, sz, env = spin_trace(p, 30e-9, 5e-9)
print("\nfree-precession trace for comparison (no reinitialization):")
for ti, s, e in zip(t, sz, env):
    print(f"  t = {ti*1e9:4.0f} ns: S_z = {s:+.4f}, envelope = {e:.4f}")
