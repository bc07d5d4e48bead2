"""Phase-amplitude coupling of the tunnel-diode unit cell."""

import numpy as np

from activeris.td_unitcell import CircuitParams, TunnelDiodeModel, element_power, fit_envelope, stable_resistance

for m in (1.0, 2.0, 3.0):
    td = TunnelDiodeModel(0.1, 1.0, m)
    print(f"m={m}: R_sp={stable_resistance(td)[0]:.3f} ohm, P={element_power(td) * 1e3:.2f} mW")

env, (phi, lo, hi, full) = fit_envelope(CircuitParams(), return_curves=True)
print(env)
for p in np.linspace(env.band[0], env.band[0] + env.band[1], 7):
    a, b = env.bounds(p)
    print(f"phi={np.mod(p, 2 * np.pi):.3f} rad: alpha in [{a:.3f}, {b:.3f}]")
