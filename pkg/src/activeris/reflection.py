"""Reflection-coefficient vector of an N-element RIS under phase-amplitude coupling.

With the cosine envelope, ``alpha_n e^{j phi_n}`` expands into a quadratic
in the unit-modulus vector ``phi``::

    gamma = Z2 (phi o phi) + Z1 phi + z

The selection-tensor product ``D^T (phi kron phi)`` of the dense form is
exactly the elementwise square, so it is never built.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasiblePhaseError
from .td_unitcell import CircuitParams, amplitude_bounds_exact

__all__ = [
    "RISConfig",
    "EnvelopeVectors",
    "hybrid_envelope",
    "selection_product",
    "gamma_coefficients",
    "assemble_gamma",
    "approximate_amplitude",
    "exact_gamma",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RISConfig:
    """Phases in [0, 2pi) and normalized amplitudes in [0, 1]."""

    phases: np.ndarray
    alpha_bar: np.ndarray

    def __post_init__(self):
        phases = np.mod(np.asarray(self.phases, dtype=float), TWO_PI)
        alpha_bar = np.asarray(self.alpha_bar, dtype=float)
        if phases.shape != alpha_bar.shape:
            raise ValueError("phases and alpha_bar must have equal length")
        if np.any((alpha_bar < 0) | (alpha_bar > 1)):
            raise ValueError("alpha_bar must lie in [0, 1]")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "alpha_bar", alpha_bar)

    @property
    def phi(self):
        """Unit-modulus phase vector ``exp(j phases)``."""
        return np.exp(1j * self.phases)

    @classmethod
    def from_phi(cls, phi, alpha_bar):
        return cls(np.angle(phi), alpha_bar)

    def __len__(self):
        return self.phases.size


@dataclass(frozen=True)
class EnvelopeVectors:
    """Per-element envelope parameters, each a length-N array."""

    delta_min: np.ndarray
    delta_max: np.ndarray
    beta_min: np.ndarray
    beta_max: np.ndarray
    theta: np.ndarray

    @classmethod
    def broadcast(cls, env, n):
        if isinstance(env, cls):
            return env
        return cls(*(np.full(n, float(getattr(env, f))) for f in ("delta_min", "delta_max", "beta_min", "beta_max", "theta")))

    def alpha_min(self, phi):
        return 0.5 * (self.delta_max - self.delta_min) * (np.cos(phi + self.theta) + 1.0) + self.delta_min

    def alpha_max(self, phi):
        return 0.5 * (self.beta_max - self.beta_min) * (np.cos(phi + self.theta) + 1.0) + self.beta_min

    def bounds(self, phi):
        return self.alpha_min(phi), self.alpha_max(phi)


def hybrid_envelope(active, passive, n, n_active, order=None):
    """Envelope vectors with the first ``n_active`` elements active.

    ``order`` optionally permutes element positions.
    """
    if not 0 <= n_active <= n:
        raise ValueError(f"need 0 <= n_active <= n, got {n_active}")
    a = EnvelopeVectors.broadcast(active, n)
    p = EnvelopeVectors.broadcast(passive, n)
    mask = np.arange(n) < n_active
    if order is not None:
        mask = mask[np.argsort(order)]
    return EnvelopeVectors(*(np.where(mask, getattr(a, f), getattr(p, f)) for f in ("delta_min", "delta_max", "beta_min", "beta_max", "theta")))


def selection_product(phi):
    """``D^T (phi kron phi)``, which equals ``phi o phi``."""
    phi = np.asarray(phi)
    return phi * phi


def gamma_coefficients(alpha_bar, env):
    """Diagonals of ``Z2``, ``Z1`` and the vector ``z`` for given amplitudes.

    Parameters
    ----------
    alpha_bar : ndarray
    env : AmplitudeEnvelope or EnvelopeVectors

    Returns
    -------
    z2, z1, z0 : ndarray
        ``gamma = z2 * phi**2 + z1 * phi + z0``.
    """
    alpha_bar = np.asarray(alpha_bar, dtype=float)
    e = EnvelopeVectors.broadcast(env, alpha_bar.size)
    y = e.delta_max - e.delta_min
    x = e.beta_max - e.beta_min - y
    s = y + x * alpha_bar
    z2 = 0.25 * np.exp(1j * e.theta) * s
    z1 = 0.5 * y + e.delta_min + (0.5 * x + e.beta_min - e.delta_min) * alpha_bar
    z0 = 0.25 * np.exp(-1j * e.theta) * s
    return z2, z1.astype(complex), z0


def assemble_gamma(config, env):
    """Reflection vector under the cosine envelope model."""
    phi = config.phi
    z2, z1, z0 = gamma_coefficients(config.alpha_bar, env)
    return z2 * selection_product(phi) + z1 * phi + z0


def approximate_amplitude(config, env):
    """``alpha_min + alpha_bar (alpha_max - alpha_min)`` under the cosine model."""
    e = EnvelopeVectors.broadcast(env, len(config))
    lo, hi = e.bounds(config.phases)
    return lo + config.alpha_bar * (hi - lo)


def exact_gamma(config, circuit):
    """Reflection vector using the exact circuit amplitude bounds.

    Parameters
    ----------
    config : RISConfig
    circuit : CircuitParams or sequence of CircuitParams
        One circuit for all elements, or one per element.

    Returns
    -------
    ndarray of complex
    """
    n = len(config)
    circuits = [circuit] * n if isinstance(circuit, CircuitParams) else list(circuit)
    if len(circuits) != n:
        raise ValueError("need one circuit per element")
    lo = np.empty(n)
    hi = np.empty(n)
    # evaluate each distinct circuit once, vectorized over its elements
    for c in set(circuits):
        idx = np.array([i for i, ci in enumerate(circuits) if ci == c])
        a, b = amplitude_bounds_exact(config.phases[idx], c, strict=False)
        bad = np.flatnonzero(np.isnan(a))
        if bad.size:
            i = int(idx[bad[0]])
            raise InfeasiblePhaseError(f"element {i}: phase {config.phases[i]:.6f} rad is not attainable", index=i)
        lo[idx], hi[idx] = a, b
    return (lo + config.alpha_bar * (hi - lo)) * config.phi
