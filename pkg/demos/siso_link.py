"""Amplifying two-panel RIS versus a passive RIS on one SISO link."""

import numpy as np

from activeris.siso_pa import SisoScenario, rate_active, snr_samples
from activeris.stats import bep_bpsk, fit_gamma_moments
from activeris.units import dbm_to_watt

rng = np.random.default_rng(0)
for pt_dbm in (0, 10, 20, 30):
    s = SisoScenario(P_t=float(dbm_to_watt(pt_dbm)), N=64)
    out = snr_samples(s, 20_000, rng)
    fit = fit_gamma_moments(out["snr_active"])
    print(
        f"P_t={pt_dbm:3d} dBm  active {rate_active(out['snr_active']).mean():6.3f} b/s/Hz"
        f"  passive {rate_active(out['snr_passive']).mean():.2e} b/s/Hz"
        f"  Gamma k={fit.k:7.2f} nu={fit.nu:.3g}  BEP={bep_bpsk(fit):.3g}"
    )
