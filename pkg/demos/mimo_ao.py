"""Rate of AO, PAI, GA and PSO on one MIMO channel draw."""

import numpy as np

from activeris.mimo_ao import MimoScenario, ao_solve, draw_mimo_channels, ga_solve, pai_solve, pso_solve, transmit_power_for_rho

s = MimoScenario(M_T=4, M_R=4, d=4, N=32)
s = s.with_(P_T=transmit_power_for_rho(10 ** (-10 / 10), s))
ch = draw_mimo_channels(s, np.random.default_rng(1))

ao = ao_solve(s, ch)
print(f"AO   {ao.rate:7.3f} b/s/Hz after {ao.iteration} iterations, {ao.evaluations} evaluations")
print("     surrogate trace", np.round(ao.rate_trace, 3))
print(f"PAI  {pai_solve(s, ch).rate:7.3f} b/s/Hz")
print(f"GA   {ga_solve(s, ch, ao.evaluations, np.random.default_rng(2)).rate:7.3f} b/s/Hz")
print(f"PSO  {pso_solve(s, ch, ao.evaluations, np.random.default_rng(3)).rate:7.3f} b/s/Hz")
