"""The lifetime / coherence trade-off and the optimal precession period.

A slow clock suffers less from the finite radiative lifetime (the dwell is a
smaller fraction of a cycle) but more from spin dephasing, and vice versa.
Sweeping the Larmor period shows the interior optimum where the two losses
balance, and how it moves with the coherence time.
"""

import numpy as np

from lcsfid import DeviceParams, ensemble_gate_fidelity
from lcsfid.studies import optimal_precession

TAU_D = 0.4e-9
G_RATIO = -3.0

print("gate fidelity vs Larmor period (tau_d = 400 ps, g_ratio = -3)\n")
header = "t_lg (ns) " + "".join(f"  T2*={t2:>3.0f}ns" for t2 in (10, 30, 100))
print(header)
for t_lg in np.linspace(6e-9, 46e-9, 11):
    row = f"{t_lg*1e9:9.1f} "
    for t2 in (10e-9, 30e-9, 100e-9):
        p = DeviceParams(tau_d=TAU_D, t2_star=t2, g_ratio=G_RATIO, t_lg=t_lg)
        row += f"  {ensemble_gate_fidelity(p).value:8.5f}"
    print(row)

print("\noptimal period per coherence time:")
for t2 in (10e-9, 30e-9, 100e-9):
    p = DeviceParams(tau_d=TAU_D, t2_star=t2, g_ratio=G_RATIO, t_lg=10e-9)
    opt = optimal_precession(p, (5e-9, 80e-9), 0.05e-9)
    print(f"  T2* = {t2*1e9:5.0f} ns: t_lg* = {opt.location[0]*1e9:6.2f} ns, "
          f"F = {opt.value:.5f}")
print("\nLonger coherence tolerates a slower clock, which in turn dilutes the")
print("dwell error; with no dephasing at all the optimum runs away to long")
print("periods, and with no lifetime error it runs to short ones.")
