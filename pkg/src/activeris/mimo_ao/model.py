"""Surrogate surface model shared by the optimizers.

A hybrid surface is described per element by

* a cosine amplitude envelope (the optimization surrogate),
* the arc of phases over which the circuit realizes its full resistance
  range, to which phases are confined,
* the circuit used for exact evaluation, and
* a power model ``P(phases, alpha_bar)``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InfeasibleBudgetError
from ..reflection import EnvelopeVectors, RISConfig, assemble_gamma, exact_gamma, hybrid_envelope
from ..td_unitcell import AmplitudeEnvelope, amplitude_bounds_exact, fit_envelope
from .power import PowerChain

__all__ = [
    "SurfaceModel",
    "CoupledPower",
    "DecoupledPower",
    "cached_envelope",
    "envelope_fit_error",
    "surface_model",
    "pai_surface_model",
    "clamp_to_band",
    "exact_amplitude_bounds",
]

TWO_PI = 2.0 * np.pi
_BAND_MARGIN = 1e-6


@lru_cache(maxsize=32)
def cached_envelope(circuit):
    """:func:`fit_envelope` memoized on the (hashable) circuit."""
    return fit_envelope(circuit)


@lru_cache(maxsize=32)
def envelope_fit_error(circuit, n_grid=1024):
    """Largest absolute gap between the cosine and exact bounds inside the band."""
    env, (phi, lo, hi, full) = fit_envelope(circuit, n_grid=n_grid, return_curves=True)
    return float(max(np.max(np.abs(env.alpha_min(phi[full]) - lo[full])), np.max(np.abs(env.alpha_max(phi[full]) - hi[full]))))


def clamp_to_band(phases, lo, span):
    """Move each phase to the nearest point of the arc ``[lo, lo + span]``."""
    off = np.mod(np.asarray(phases, dtype=float) - lo, TWO_PI)
    outside = off > span
    to_end = (off - span) < (TWO_PI - off)
    off = np.where(outside, np.where(to_end, span, 0.0), off)
    return np.mod(lo + off, TWO_PI)


class CoupledPower:
    """Exact chain power, ``alpha_bar`` read against the exact bounds."""

    def __init__(self, chain):
        self.chain = chain

    @property
    def minimum_budget(self):
        return self.chain.minimum_budget

    def total(self, phases, alpha_bar):
        return self.chain.total(phases, alpha_bar)

    def gradient(self, phases, alpha_bar):
        return self.chain.gradient(phases, alpha_bar)


class DecoupledPower:
    """Power seen by the phase-independent benchmark.

    An amplitude in the flat interval is charged the power of the nearest
    amplitude that the cosine model allows at that phase.
    """

    def __init__(self, chain, flat, coupled):
        self.chain = chain
        self.flat = flat
        self.coupled = coupled

    @property
    def minimum_budget(self):
        return self.chain.minimum_budget

    def coupled_alpha_bar(self, phases, alpha_bar):
        alpha = self.flat.alpha_min(phases) + alpha_bar * (self.flat.alpha_max(phases) - self.flat.alpha_min(phases))
        lo, hi = self.coupled.bounds(phases)
        with np.errstate(invalid="ignore", divide="ignore"):
            ab = np.where(hi > lo, (alpha - lo) / (hi - lo), 0.0)
        return np.clip(ab, 0.0, 1.0)

    def total(self, phases, alpha_bar):
        return self.chain.total(phases, self.coupled_alpha_bar(phases, alpha_bar))

    def gradient(self, phases, alpha_bar, step=1e-4):
        alpha_bar = np.asarray(alpha_bar, dtype=float)
        h = np.where(alpha_bar + step <= 1.0, step, -step)
        p0 = self.chain.element_powers(phases, self.coupled_alpha_bar(phases, alpha_bar))
        p1 = self.chain.element_powers(phases, self.coupled_alpha_bar(phases, alpha_bar + h))
        return (p1 - p0) / h


@dataclass
class SurfaceModel:
    """Everything the optimizers need to know about the surface.

    Attributes
    ----------
    envelope : EnvelopeVectors
        Surrogate amplitude envelope per element.
    band_lo, band_span : ndarray
        Allowed phase arc per element.
    active : ndarray of bool
    circuits : list of CircuitParams
        Circuit of each element, for exact evaluation.
    power : CoupledPower or DecoupledPower
    budget : float
        RIS power budget in W.
    peak : ndarray
        Phase of the largest surrogate amplitude, clamped to the band.
    """

    envelope: EnvelopeVectors
    band_lo: np.ndarray
    band_span: np.ndarray
    active: np.ndarray
    circuits: list
    power: object
    budget: float
    peak: np.ndarray

    @property
    def n(self):
        return self.active.size

    def clamp(self, phases):
        return clamp_to_band(phases, self.band_lo, self.band_span)

    def gamma(self, phases, alpha_bar):
        """Surrogate reflection vector."""
        return assemble_gamma(RISConfig(phases, alpha_bar), self.envelope)

    def exact_gamma(self, phases, alpha_bar):
        return exact_gamma(RISConfig(phases, alpha_bar), self.circuits)

    def check_budget(self):
        need = self.power.minimum_budget
        if self.budget < need * (1.0 - 1e-12):
            raise InfeasibleBudgetError(f"RIS budget {self.budget:.6g} W is below the minimum {need:.6g} W", minimum_budget=need)


def _bands(envelopes, active):
    lo = np.where(active, envelopes[0].band[0], envelopes[1].band[0]) + _BAND_MARGIN
    span = np.where(active, envelopes[0].band[1], envelopes[1].band[1]) - 2 * _BAND_MARGIN
    return lo, span


def surface_model(scenario):
    """Coupled surrogate model of the scenario's hybrid surface."""
    s = scenario
    act_env = cached_envelope(s.circuit)
    pas_env = cached_envelope(s.passive_circuit)
    active = s.active_mask
    env = hybrid_envelope(act_env, pas_env, s.N, s.N_act)
    lo, span = _bands((act_env, pas_env), active)
    peak = clamp_to_band(-env.theta, lo, span)
    chain = PowerChain(s.circuit, active, s.V0, s.R0, band=act_env.band)
    circuits = [s.circuit if a else s.passive_circuit for a in active]
    return SurfaceModel(env, lo, span, active, circuits, CoupledPower(chain), s.P_RIS, peak)


def pai_surface_model(scenario):
    """Phase-independent variant: flat amplitude bounds for the active elements."""
    s = scenario
    coupled = surface_model(scenario)
    act_env = cached_envelope(s.circuit)
    pas_env = cached_envelope(s.passive_circuit)
    flat = AmplitudeEnvelope.flat(act_env.delta_min, act_env.beta_max)
    env = hybrid_envelope(flat, pas_env, s.N, s.N_act)
    power = DecoupledPower(coupled.power.chain, env, coupled.envelope)
    peak = coupled.peak
    return SurfaceModel(env, coupled.band_lo, coupled.band_span, coupled.active, coupled.circuits, power, s.P_RIS, peak)


def exact_amplitude_bounds(model, phases):
    """Exact bounds of every element (active and passive) at ``phases``."""
    lo = np.empty(model.n)
    hi = np.empty(model.n)
    for c in set(model.circuits):
        idx = np.array([i for i, ci in enumerate(model.circuits) if ci == c])
        lo[idx], hi[idx] = amplitude_bounds_exact(np.asarray(phases)[idx], c)
    return lo, hi
