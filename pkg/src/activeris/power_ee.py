"""Power consumption and energy efficiency of the SISO architectures.

The inter-RIS amplifier follows ``P_out / P_amp = eta_max (P_out / P_max)^eps``
with ``eps = 0.5``.  The transmit amplifier is assumed driven to saturation,
so it consumes ``alpha * P_t``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolationError
from .units import dbm_to_watt, dbw_to_watt

__all__ = [
    "PowerModelParams",
    "pa_consumed_power_general",
    "pa_consumed_power",
    "ris_static_power",
    "total_power_active",
    "total_power_passive",
    "energy_efficiency",
]


@dataclass(frozen=True)
class PowerModelParams:
    """Power model constants in SI units.

    Attributes
    ----------
    alpha : float
        Inverse maximum efficiency of the transmit amplifier.
    beta : float
        Inverse maximum efficiency of the inter-RIS amplifier.
    P_n_b : float
        Phase-control power per element in W (6-bit resolution).
    P_Tx, P_Rx : float
        Static transmitter and receiver power in W.
    epsilon : float
        Amplifier efficiency exponent.
    """

    alpha: float = 1.2
    beta: float = 1.2
    P_n_b: float = 7.8e-3
    P_Tx: float = float(dbw_to_watt(9.0))
    P_Rx: float = float(dbm_to_watt(10.0))
    epsilon: float = 0.5

    def __post_init__(self):
        if self.alpha < 1 or self.beta < 1:
            raise ValueError("alpha and beta are inverse efficiencies and must be >= 1")
        if min(self.P_n_b, self.P_Tx, self.P_Rx) < 0:
            raise ValueError("static powers must be non-negative")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")

    @property
    def eta_max(self):
        return 1.0 / self.beta

    @property
    def omega_max(self):
        return 1.0 / self.alpha


def _check_drive(P_out, P_max):
    P_out = np.asarray(P_out, dtype=float)
    if np.any(P_out < 0):
        raise ConstraintViolationError("output power must be non-negative")
    if np.any(P_out > P_max * (1 + 1e-12)):
        raise ConstraintViolationError(f"output power exceeds P_max={P_max}")
    return P_out


def pa_consumed_power_general(P_out, P_max, eta_max, epsilon):
    """Consumed power for an arbitrary efficiency exponent."""
    P_out = _check_drive(P_out, P_max)
    return P_out ** (1.0 - epsilon) * P_max**epsilon / eta_max


def pa_consumed_power(P_out, P_max, eta_max):
    """Consumed amplifier power ``sqrt(P_out P_max) / eta_max``."""
    P_out = _check_drive(P_out, P_max)
    return np.sqrt(P_out * P_max) / eta_max


def ris_static_power(N, P_n_b):
    return N * P_n_b


def total_power_passive(params, P_t, N):
    p = params
    return p.alpha * P_t + p.P_Tx + p.P_Rx + ris_static_power(N, p.P_n_b)


def total_power_active(params, P_t, N, P_out, P_max):
    """Total consumption with the inter-RIS amplifier at output ``P_out``.

    ``N`` is the number of phase-controlled elements counted for static power.
    """
    return total_power_passive(params, P_t, N) + pa_consumed_power(P_out, P_max, params.eta_max)


def energy_efficiency(rate, BW, P_tot):
    """Bits per joule, ``rate * BW / P_tot``."""
    P_tot = np.asarray(P_tot, dtype=float)
    if np.any(P_tot <= 0):
        raise ValueError("total power must be positive")
    return np.asarray(rate) * BW / P_tot
