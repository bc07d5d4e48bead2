"""Active-RIS MIMO system model and rate-maximization solvers."""

from .ao import AOState, ao_solve, optimize_amplitudes, optimize_phases, optimize_precoder, pai_solve
from .heuristics import ga_solve, pso_solve
from .model import SurfaceModel, pai_surface_model, surface_model
from .power import PowerChain, ris_power
from .system import (
    MimoChannels,
    MimoScenario,
    draw_mimo_channels,
    effective_channel,
    lmmse_combiner,
    rate_lmmse,
    rate_with_combiner,
    rho,
    transmit_power_for_rho,
)

__all__ = [
    "AOState",
    "MimoChannels",
    "MimoScenario",
    "PowerChain",
    "SurfaceModel",
    "ao_solve",
    "draw_mimo_channels",
    "effective_channel",
    "ga_solve",
    "lmmse_combiner",
    "optimize_amplitudes",
    "optimize_phases",
    "optimize_precoder",
    "pai_solve",
    "pai_surface_model",
    "pso_solve",
    "rate_lmmse",
    "rate_with_combiner",
    "rho",
    "ris_power",
    "surface_model",
    "transmit_power_for_rho",
]
