"""Registered experiments.

Each experiment sweeps one or more axes, runs seeded Monte Carlo trials
at every sweep point and reports the mean and standard error of each
curve.  Random streams are keyed by ``(seed, curve, trial)`` rather than
by execution order, so results do not depend on how trials are scheduled
and neighbouring sweep points share channel draws.
"""

import logging
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .. import __version__
from ..channel import Geometry
from ..errors import ActiveRISError, ConfigError
from ..mimo_ao import MimoScenario, ao_solve, draw_mimo_channels, ga_solve, pai_solve, pso_solve, transmit_power_for_rho
from ..power_ee import PowerModelParams, energy_efficiency, total_power_active, total_power_passive
from ..siso_pa import SisoScenario, rate_active, simulate_ber_bpsk, snr_samples
from ..stats import bep_bpsk, fit_gamma_moments
from ..td_unitcell import CircuitParams, fit_envelope
from ..units import db_to_linear, linear_to_db, watt_to_dbm
from .config import Param
from .csvio import ResultTable

__all__ = ["Axis", "Experiment", "EXPERIMENTS", "run_experiment", "mean_se", "siso_scenario", "mimo_scenario"]

log = logging.getLogger(__name__)

P_DBM = Param("power")
METERS = Param("distance")
DB = Param("ratio")
COUNT = Param("int")
NUMBER = Param("number")


@dataclass(frozen=True)
class Axis:
    """Sweep axis with desk-scale and full-scale default values (SI units)."""

    param: Param
    desk: tuple = None
    full: tuple = None

    def values(self, full_scale=False):
        v = self.full if full_scale and self.full is not None else self.desk
        return () if v is None else v


@dataclass(frozen=True)
class Experiment:
    id: str
    description: str
    params: dict
    axes: dict
    run: object
    desk_trials: int
    full_trials: int
    checks: tuple = field(default=())

    def validate(self, spec):
        for check in self.checks:
            check(spec)


def mean_se(x, axis=0):
    """Mean and standard error (``std(ddof=1)/sqrt(n)``; 0 for a single sample)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[axis]
    m = np.mean(x, axis=axis)
    if n < 2:
        return m, np.zeros_like(m)
    return m, np.std(x, axis=axis, ddof=1) / np.sqrt(n)


def _dbm(w):
    return float(watt_to_dbm(w))


def _rng(*key):
    return np.random.default_rng([int(k) for k in key])


def _map(func, items, workers):
    if workers <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=1))


def _build():
    """``git describe`` of the source tree, or the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
        return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        return __version__


# SISO


SISO_PARAMS = {
    "P_t": P_DBM,
    "P_max": P_DBM,
    "G_max": DB,
    "F": DB,
    "sigma2_tot": P_DBM,
    "sigma2_rx": P_DBM,
    "N": COUNT,
    "f_c": Param("frequency", 1e-9),
    "BW": Param("frequency"),
    "K1": DB,
    "K2": DB,
    "d_v": METERS,
    "d_h": METERS,
    "d": METERS,
    "link_states": Param("texts"),
    "alpha": NUMBER,
    "beta": NUMBER,
    "P_n_b": P_DBM,
    "P_Tx": P_DBM,
    "P_Rx": P_DBM,
}
_GEOMETRY = ("d_v", "d_h", "d")
_POWER_MODEL = ("alpha", "beta", "P_n_b", "P_Tx", "P_Rx")


def siso_scenario(overrides):
    """``(SisoScenario, PowerModelParams)`` with overrides applied."""
    base = SisoScenario()
    geo = {k: overrides.get(k, getattr(base.geometry, k)) for k in _GEOMETRY}
    names = {f.name for f in fields(SisoScenario)} - {"geometry"}
    kw = {k: v for k, v in overrides.items() if k in names}
    try:
        pm = PowerModelParams(**{k: overrides[k] for k in _POWER_MODEL if k in overrides})
        return base.with_(geometry=Geometry(**geo), **kw), pm
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_siso(spec):
    siso_scenario(spec.overrides)


def _siso_with(s, **kw):
    geo = {k: kw.pop(k) for k in _GEOMETRY if k in kw}
    if geo:
        g = s.geometry
        kw["geometry"] = Geometry(geo.get("d_v", g.d_v), geo.get("d_h", g.d_h), geo.get("d", g.d))
    return s.with_(**kw)


def _batched_fit(snr, batches=10):
    fit = fit_gamma_moments(snr)
    parts = [fit_gamma_moments(b) for b in np.array_split(snr, batches)]
    k_se = np.std([p.k for p in parts], ddof=1) / np.sqrt(batches)
    nu_se = np.std([p.nu for p in parts], ddof=1) / np.sqrt(batches)
    return fit, k_se, nu_se


def run_gamma_fit_table(spec, emit):
    s0, _ = siso_scenario(spec.overrides)
    table = ResultTable(
        [("P_max", "dBm"), ("N", "-"), ("P_t", "dBm"), ("k", "-"), ("k_se", "-"), ("nu", "-"), ("nu_se", "-")]
    )
    curves = [(pm, n) for pm in spec.axis("P_max") for n in spec.axis("N")]
    for c, (pm, n) in enumerate(curves):
        for pt in spec.axis("P_t"):
            s = s0.with_(P_max=pm, N=int(n), P_t=pt)
            point = (_dbm(pm), n, _dbm(pt))

            def compute(s=s, c=c):
                snr = snr_samples(s, spec.trials, _rng(spec.seed, c))["snr_active"]
                fit, k_se, nu_se = _batched_fit(snr)
                return [fit.k, k_se, fit.nu, nu_se]

            emit(table, point, compute)
    return table


def run_ber_vs_pt(spec, emit):
    s0, _ = siso_scenario(spec.overrides)
    symbols = spec.overrides.get("symbols", 500)
    table = ResultTable(
        [
            ("P_max", "dBm"),
            ("N", "-"),
            ("P_t", "dBm"),
            ("ber_sim", "-"),
            ("ber_sim_se", "-"),
            ("bep_theory", "-"),
            ("bep_conditional", "-"),
            ("bep_conditional_se", "-"),
        ]
    )
    from scipy.special import erfc

    batches = min(20, spec.trials)
    curves = [(pm, n) for pm in spec.axis("P_max") for n in spec.axis("N")]
    for c, (pm, n) in enumerate(curves):
        for pt in spec.axis("P_t"):
            s = s0.with_(P_max=pm, N=int(n), P_t=pt)

            def compute(s=s, c=c):
                rates = []
                for b, size in enumerate(np.diff(np.linspace(0, spec.trials, batches + 1).astype(int))):
                    err, tot = simulate_ber_bpsk(s, int(size), symbols, _rng(spec.seed, c, 1, b))
                    rates.append(err / tot)
                ber, ber_se = mean_se(rates)
                snr = snr_samples(s, spec.trials, _rng(spec.seed, c, 2))["snr_active"]
                cond, cond_se = mean_se(0.5 * erfc(np.sqrt(snr)))
                return [ber, ber_se, bep_bpsk(fit_gamma_moments(snr)), cond, cond_se]

            emit(table, (_dbm(pm), n, _dbm(pt)), compute)
    return table


def _dh_values(spec, d):
    if "d_h" in spec.sweep:
        return [x for x in spec.sweep["d_h"] if x <= d]
    return list(np.round(np.linspace(0.05, 0.95, 19) * d, 12))


DH_LINK_STATES = ("bernoulli", "bernoulli")


def run_rate_vs_dh(spec, emit):
    s0, _ = siso_scenario(spec.overrides)
    if "link_states" not in spec.overrides:
        # moving the surface changes both hop lengths, so both LoS states follow distance
        s0 = s0.with_(link_states=DH_LINK_STATES)
    table = ResultTable(
        [
            ("d", "m"),
            ("N", "-"),
            ("d_h", "m"),
            ("rate_active", "bit/s/Hz"),
            ("rate_active_se", "bit/s/Hz"),
            ("rate_passive", "bit/s/Hz"),
            ("rate_passive_se", "bit/s/Hz"),
            ("rate_unlimited", "bit/s/Hz"),
            ("rate_unlimited_se", "bit/s/Hz"),
            ("G_opt", "dB"),
            ("G_opt_se", "dB"),
        ]
    )
    curves = [(d, n) for d in spec.axis("d") for n in spec.axis("N")]
    for c, (d, n) in enumerate(curves):
        for dh in _dh_values(spec, d):
            s = _siso_with(s0, d=d, d_h=dh, N=int(n))

            def compute(s=s, c=c):
                out = snr_samples(s, spec.trials, _rng(spec.seed, c))
                free = snr_samples(s.with_(P_max=np.inf), spec.trials, _rng(spec.seed, c))
                cells = []
                for x in (rate_active(out["snr_active"]), rate_active(out["snr_passive"]), rate_active(free["snr_active"])):
                    cells.extend(mean_se(x))
                cells.extend(mean_se(linear_to_db(out["G"])))
                return cells

            emit(table, (d, n, dh), compute)
    return table


def run_rate_vs_n(spec, emit):
    s0, _ = siso_scenario(spec.overrides)
    table = ResultTable(
        [
            ("P_t", "dBm"),
            ("P_max", "dBm"),
            ("N", "-"),
            ("rate_active", "bit/s/Hz"),
            ("rate_active_se", "bit/s/Hz"),
            ("rate_passive", "bit/s/Hz"),
            ("rate_passive_se", "bit/s/Hz"),
            ("G_opt", "dB"),
            ("G_opt_se", "dB"),
        ]
    )
    curves = [(pt, pm) for pt in spec.axis("P_t") for pm in spec.axis("P_max")]
    for c, (pt, pm) in enumerate(curves):
        for n in spec.axis("N"):
            s = s0.with_(P_t=pt, P_max=pm, N=int(n))

            def compute(s=s, c=c):
                out = snr_samples(s, spec.trials, _rng(spec.seed, c))
                return [
                    *mean_se(rate_active(out["snr_active"])),
                    *mean_se(rate_active(out["snr_passive"])),
                    *mean_se(linear_to_db(out["G"])),
                ]

            emit(table, (_dbm(pt), _dbm(pm), n), compute)
    return table


_EE_CURVE = {"N": "P_max", "P_t": "P_max", "P_max": "P_t"}


def run_ee_sweeps(spec, emit):
    s0, pm_model = siso_scenario(spec.overrides)
    vary = spec.overrides.get("vary", "N")
    curve = _EE_CURVE[vary]
    unit = {"N": "-", "P_t": "dBm", "P_max": "dBm"}
    table = ResultTable(
        [
            (curve, unit[curve]),
            (vary, unit[vary]),
            ("ee_active", "bit/J"),
            ("ee_active_se", "bit/J"),
            ("ee_passive", "bit/J"),
            ("ee_passive_se", "bit/J"),
            ("rate_active", "bit/s/Hz"),
            ("rate_active_se", "bit/s/Hz"),
            ("rate_passive", "bit/s/Hz"),
            ("rate_passive_se", "bit/s/Hz"),
            ("P_tot_active", "W"),
            ("P_tot_active_se", "W"),
            ("P_tot_passive", "W"),
            ("P_tot_passive_se", "W"),
        ]
    )

    def show(name, v):
        return v if name == "N" else _dbm(v)

    for c, cv in enumerate(spec.axis(curve)):
        for x in spec.axis(vary):
            kw = {curve: cv, vary: x}
            if "N" in kw:
                kw["N"] = int(kw["N"])
            s = s0.with_(**kw)

            def compute(s=s, c=c):
                out = snr_samples(s, spec.trials, _rng(spec.seed, c))
                r_act, r_pas = rate_active(out["snr_active"]), rate_active(out["snr_passive"])
                # both designs phase-control all 2N elements
                p_act = total_power_active(pm_model, s.P_t, s.n_passive, out["P_out"], s.P_max)
                p_pas = np.full_like(r_pas, total_power_passive(pm_model, s.P_t, s.n_passive))
                cells = []
                for v in (energy_efficiency(r_act, s.BW, p_act), energy_efficiency(r_pas, s.BW, p_pas), r_act, r_pas, p_act, p_pas):
                    cells.extend(mean_se(v))
                return cells

            emit(table, (show(curve, cv), show(vary, x)), compute)
    return table


def _check_ee(spec):
    vary = spec.overrides.get("vary", "N")
    if vary not in _EE_CURVE:
        raise ConfigError(f"scenario.vary must be one of {', '.join(_EE_CURVE)}, got {vary!r}")


# circuit


CIRCUIT_PARAMS = {
    "L1": Param("inductance"),
    "L2": Param("inductance"),
    "Z0": Param("resistance"),
    "f_c": Param("frequency"),
    "V0": Param("voltage"),
    "R0": Param("resistance"),
    "C_min": Param("capacitance"),
    "C_max": Param("capacitance"),
    "n_grid": COUNT,
}


def circuit_from(overrides):
    o = overrides
    kw = {k: o[k] for k in ("L1", "L2", "Z0") if k in o}
    if "f_c" in o:
        kw["omega"] = 2.0 * np.pi * o["f_c"]
    if "C_min" in o or "C_max" in o:
        base = CircuitParams().C_range
        kw["C_range"] = (o.get("C_min", base[0]), o.get("C_max", base[1]))
    try:
        return CircuitParams.from_diode(o.get("V0", 0.1), o.get("R0", 1.0), **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_circuit(spec):
    circuit_from(spec.overrides)
    if spec.overrides.get("n_grid", 1024) < 16:
        raise ConfigError("n_grid must be at least 16")


def run_envelope_fig(spec, emit):
    circuit = circuit_from(spec.overrides)
    n_grid = spec.overrides.get("n_grid", 1024)
    table = ResultTable(
        [
            ("phi", "rad"),
            ("alpha_min_exact", "-"),
            ("alpha_max_exact", "-"),
            ("alpha_min_approx", "-"),
            ("alpha_max_approx", "-"),
            ("in_band", "-"),
        ]
    )
    env, (phi, lo, hi, full) = fit_envelope(circuit, n_grid=n_grid, return_curves=True)
    for key in ("delta_min", "delta_max", "beta_min", "beta_max", "theta"):
        table.metadata[f"envelope.{key}"] = repr(getattr(env, key))
    table.metadata["envelope.band"] = f"{env.band[0]!r} {env.band[1]!r}"
    a_min, a_max = env.bounds(phi)
    for row in zip(phi, lo, hi, a_min, a_max, full.astype(float)):
        table.append(row)
    return table


# MIMO


MIMO_PARAMS = {
    "M_T": COUNT,
    "M_R": COUNT,
    "d": COUNT,
    "N": COUNT,
    "N_act": COUNT,
    "sigma2": P_DBM,
    "F_r": DB,
    "F_s": DB,
    "P_T": P_DBM,
    "P_RIS": P_DBM,
    "rho": DB,
    "d_ris_tx": METERS,
    "d_rx_ris": METERS,
    "d_tx_rx": METERS,
    "exp_direct": NUMBER,
    "exp_ris": NUMBER,
    "f_c": Param("frequency"),
    "V0": Param("voltage"),
    "R0": Param("resistance"),
    "passive_R": Param("resistance"),
    "J_alt": COUNT,
    "epsilon": NUMBER,
    "schemes": Param("texts"),
}
SCHEMES = ("ao", "pai", "ga", "pso")
DEFAULT_RHO = float(db_to_linear(-30.0))


def mimo_scenario(overrides, full_scale=False):
    """Scenario of the MIMO experiments; desk scale is ``N=32``, ``M=d=4``."""
    kw = {} if full_scale else dict(M_T=4, M_R=4, d=4, N=32)
    skip = {"rho", "J_alt", "epsilon", "schemes", "f_c"}
    kw.update({k: v for k, v in overrides.items() if k not in skip})
    if "f_c" in overrides:
        kw["omega"] = 2.0 * np.pi * overrides["f_c"]
    try:
        return MimoScenario(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _with_rho(s, spec, rho=None):
    """Set ``P_T`` from the target ``rho`` unless ``P_T`` was given explicitly."""
    if rho is None:
        if "P_T" in spec.overrides:
            return s
        rho = spec.overrides.get("rho", DEFAULT_RHO)
    return s.with_(P_T=transmit_power_for_rho(rho, s))


def _check_mimo(spec):
    if "P_T" in spec.overrides and ("rho" in spec.overrides or "rho" in spec.sweep):
        raise ConfigError("give either P_T or rho, not both")
    bad = set(spec.overrides.get("schemes", ())) - set(SCHEMES)
    if bad:
        raise ConfigError(f"unknown schemes {sorted(bad)}; choose from {', '.join(SCHEMES)}")
    mimo_scenario(spec.overrides, spec.full_scale)


def _mimo_trial(job):
    """Rates of the requested schemes on one channel draw."""
    s, seed, trial, schemes, J_alt, eps = job
    ch = draw_mimo_channels(s, _rng(seed, trial))
    out = {}
    ao = ao_solve(s, ch, epsilon=eps, J_alt=J_alt)
    out["ao"] = ao.rate
    if "pai" in schemes:
        out["pai"] = pai_solve(s, ch, epsilon=eps, J_alt=J_alt).rate
    if "ga" in schemes:
        out["ga"] = ga_solve(s, ch, ao.evaluations, _rng(seed, trial, 1)).rate
    if "pso" in schemes:
        out["pso"] = pso_solve(s, ch, ao.evaluations, _rng(seed, trial, 2)).rate
    return [out[k] for k in schemes]


def _mimo_point(spec, s, schemes, seed):
    J_alt = spec.overrides.get("J_alt", 8)
    eps = spec.overrides.get("epsilon", 1e-3)
    jobs = [(s, seed, t, schemes, J_alt, eps) for t in range(spec.trials)]
    rates = np.array(_map(_mimo_trial, jobs, spec.workers))
    cells = []
    for j in range(len(schemes)):
        cells.extend(mean_se(rates[:, j]))
    return cells


def _scheme_columns(schemes):
    cols = []
    for k in schemes:
        cols += [(f"rate_{k}", "bit/s/Hz"), (f"rate_{k}_se", "bit/s/Hz")]
    return cols


def _schemes(spec):
    chosen = spec.overrides.get("schemes", SCHEMES)
    return tuple(k for k in SCHEMES if k in chosen or k == "ao")


def run_rate_vs_rho(spec, emit):
    s0 = mimo_scenario(spec.overrides, spec.full_scale)
    schemes = _schemes(spec)
    table = ResultTable([("rho", "dB"), *_scheme_columns(schemes)])
    for rho in spec.axis("rho"):
        s = _with_rho(s0, spec, rho)
        emit(table, (float(linear_to_db(rho)),), lambda s=s: _mimo_point(spec, s, schemes, spec.seed))
    return table


def run_rate_vs_distance(spec, emit):
    s0 = mimo_scenario(spec.overrides, spec.full_scale)
    schemes = _schemes(spec)
    table = ResultTable([("d_rx_ris", "m"), *_scheme_columns(schemes)])
    for dist in spec.axis("d_rx_ris"):
        s = _with_rho(s0.with_(d_rx_ris=dist), spec)
        emit(table, (dist,), lambda s=s: _mimo_point(spec, s, schemes, spec.seed))
    return table


def _pris_values(spec, N):
    if "P_RIS" in spec.sweep:
        return spec.sweep["P_RIS"]
    return list(np.round(np.linspace(0.9, 2.55, 12) * N / 64, 12))


def run_rate_vs_pris(spec, emit):
    s0 = _with_rho(mimo_scenario(spec.overrides, spec.full_scale), spec)
    table = ResultTable([("N_act", "-"), ("P_RIS", "W"), ("rate_ao", "bit/s/Hz"), ("rate_ao_se", "bit/s/Hz")])
    for c, frac in enumerate(spec.axis("N_act_frac")):
        n_act = int(round(frac * s0.N))
        for budget in _pris_values(spec, s0.N):
            s = s0.with_(N_act=n_act, P_RIS=budget)
            emit(table, (n_act, budget), lambda s=s: _mimo_point(spec, s, ("ao",), spec.seed))
    return table


def _check_pris(spec):
    for frac in spec.axis("N_act_frac"):
        if not 0 <= frac <= 1:
            raise ConfigError(f"N_act_frac must lie in [0, 1], got {frac}")


def _dbm_values(*x):
    return tuple(float(10 ** ((v - 30) / 10)) for v in x)


def _db_values(*x):
    return tuple(float(db_to_linear(v)) for v in x)


EXPERIMENTS = {
    e.id: e
    for e in [
        Experiment(
            "gamma-fit-table",
            "Moment-matched Gamma shape and scale of the amplifying-RIS SNR",
            {**SISO_PARAMS},
            {
                "P_max": Axis(P_DBM, _dbm_values(10, 20)),
                "N": Axis(COUNT, (64, 256)),
                "P_t": Axis(P_DBM, _dbm_values(*range(-10, 31, 5))),
            },
            run_gamma_fit_table,
            10_000,
            100_000,
            (_check_siso,),
        ),
        Experiment(
            "ber-vs-pt",
            "BPSK bit error rate versus transmit power: simulation and Gamma-MGF analysis",
            {**SISO_PARAMS, "symbols": COUNT},
            {
                "P_max": Axis(P_DBM, _dbm_values(10, 20)),
                "N": Axis(COUNT, (32, 64, 128)),
                "P_t": Axis(P_DBM, _dbm_values(*range(0, 31, 5))),
            },
            run_ber_vs_pt,
            2_000,
            20_000,
            (_check_siso,),
        ),
        Experiment(
            "rate-vs-dh",
            "Rate of the amplifying and passive designs versus RIS position",
            {**SISO_PARAMS},
            {
                "d": Axis(METERS, (50.0, 100.0)),
                "N": Axis(COUNT, (32, 64, 128)),
                "d_h": Axis(METERS),
            },
            run_rate_vs_dh,
            2_000,
            20_000,
            (_check_siso,),
        ),
        Experiment(
            "rate-vs-n",
            "Rate and optimal amplifier gain versus number of elements",
            {**SISO_PARAMS},
            {
                "P_t": Axis(P_DBM, _dbm_values(20, 10)),
                "P_max": Axis(P_DBM, _dbm_values(10, 20)),
                "N": Axis(COUNT, (8, 16, 32, 64, 128, 256, 512)),
            },
            run_rate_vs_n,
            2_000,
            20_000,
            (_check_siso,),
        ),
        Experiment(
            "ee-sweeps",
            "Energy efficiency, rate and total power versus N, P_t or P_max (scenario.vary)",
            {**SISO_PARAMS, "vary": Param("text")},
            {
                "N": Axis(COUNT, (16, 32, 64, 128, 256, 512)),
                "P_t": Axis(P_DBM, _dbm_values(*range(-10, 41, 5))),
                "P_max": Axis(P_DBM, _dbm_values(10, 20, 50)),
            },
            run_ee_sweeps,
            2_000,
            20_000,
            (_check_siso, _check_ee),
        ),
        Experiment(
            "envelope-fig",
            "Exact and cosine-approximated amplitude bounds versus phase",
            CIRCUIT_PARAMS,
            {},
            run_envelope_fig,
            1,
            1,
            (_check_circuit,),
        ),
        Experiment(
            "rate-vs-rho",
            "MIMO rate of AO, PAI, GA and PSO versus normalized SNR",
            MIMO_PARAMS,
            {"rho": Axis(DB, _db_values(-20, -10, 0, 10), _db_values(-40, -30, -20, -10, 0, 10))},
            run_rate_vs_rho,
            50,
            200,
            (_check_mimo,),
        ),
        Experiment(
            "rate-vs-distance",
            "MIMO rate versus RIS-Rx distance at fixed normalized SNR",
            MIMO_PARAMS,
            {"d_rx_ris": Axis(METERS, (1.0, 2.0, 4.0, 8.0, 16.0, 32.0))},
            run_rate_vs_distance,
            50,
            200,
            (_check_mimo,),
        ),
        Experiment(
            "rate-vs-pris",
            "AO rate versus RIS power budget for several numbers of active elements",
            MIMO_PARAMS,
            {
                "N_act_frac": Axis(NUMBER, (0.25, 0.5, 0.75, 1.0)),
                "P_RIS": Axis(P_DBM),
            },
            run_rate_vs_pris,
            50,
            200,
            (_check_mimo, _check_pris),
        ),
    ]
}


def _metadata(spec, elapsed=None):
    meta = {
        "experiment": spec.id,
        "description": spec.experiment.description,
        "build": _build(),
        "seed": spec.seed,
        "trials": spec.trials,
        "scale": "full" if spec.full_scale else "desk",
    }
    for k in sorted(spec.overrides):
        meta[f"scenario.{k}"] = repr(spec.overrides[k])
    for k in sorted(spec.sweep):
        meta[f"sweep.{k}"] = " ".join(repr(float(v)) for v in spec.sweep[k])
    if elapsed is not None:
        meta["wall_time_s"] = f"{elapsed:.3f}"
    return meta


def run_experiment(spec):
    """Run an experiment.

    Sweep points that raise a model or solver error are kept as rows of
    NaN and listed in the metadata (``failed.<row>``); the table's
    ``failures`` attribute counts them.

    Parameters
    ----------
    spec : ExperimentSpec

    Returns
    -------
    ResultTable
    """
    t0 = time.perf_counter()
    failures = []

    def emit(table, point, compute):
        width = len(table.columns) - len(point)
        log.info("%s: point %s", spec.id, ", ".join(f"{x:.6g}" for x in point))
        try:
            cells = compute()
        except ActiveRISError as exc:
            log.warning("%s: point %s failed: %s", spec.id, point, exc)
            failures.append((len(table.rows), f"{type(exc).__name__}: {exc}"))
            cells = [np.nan] * width
        table.append([*point, *cells])

    table = spec.experiment.run(spec, emit)
    meta = _metadata(spec, time.perf_counter() - t0 if spec.record_time else None)
    for row, msg in failures:
        meta[f"failed.{row}"] = msg
    meta.update(table.metadata)
    table.metadata = meta
    table.failures = len(failures)
    return table
