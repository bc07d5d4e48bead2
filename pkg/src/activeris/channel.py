"""Geometry, indoor-hotspot path loss, LoS probability and Rician link sampling.

The two hops of the SISO architecture (Tx -> RIS1 and RIS2 -> Rx) are
described by a :class:`Geometry`.  Each hop is drawn independently: a
Bernoulli LoS event decides both the Rician factor (``K`` or 0) and which
path-loss branch applies.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGeometryError, OutOfModelRangeError
from .units import db_to_linear

__all__ = [
    "Geometry",
    "PathLoss",
    "RicianSpec",
    "ChannelVector",
    "link_distances",
    "path_loss_los_db",
    "path_loss_nlos_db",
    "p_los",
    "sample_channel",
    "draw_los_states",
    "sample_link",
]

LINK_STATES = ("bernoulli", "los", "nlos")


@dataclass(frozen=True)
class Geometry:
    """Placement of the RIS pair between transmitter and receiver.

    Parameters
    ----------
    d_v : float
        Vertical Tx-RIS distance in m.
    d_h : float
        Horizontal Tx-RIS distance in m.
    d : float
        Tx-Rx distance in m.
    """

    d_v: float
    d_h: float
    d: float

    def __post_init__(self):
        for name in ("d_v", "d_h", "d"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidGeometryError(f"{name} must be a positive finite distance, got {value!r}")
        if self.d_h > self.d:
            raise InvalidGeometryError(f"d_h={self.d_h} exceeds the Tx-Rx distance d={self.d}")

    @property
    def d1(self):
        return float(np.hypot(self.d_v, self.d_h))

    @property
    def d2(self):
        return float(np.hypot(self.d_v, self.d - self.d_h))


def link_distances(geom):
    """Return the Tx-RIS1 and RIS2-Rx distances ``(d1, d2)`` in m."""
    if not isinstance(geom, Geometry):
        geom = Geometry(*geom)
    return geom.d1, geom.d2


def _check_range(d_n, f_c):
    d_n = np.asarray(d_n, dtype=float)
    if np.any(~np.isfinite(d_n)) or np.any(d_n < 1.0):
        raise OutOfModelRangeError(f"path-loss model needs d_n >= 1 m, got {d_n}")
    if np.any(np.asarray(f_c, dtype=float) <= 0):
        raise OutOfModelRangeError(f"carrier frequency must be positive, got {f_c}")
    return d_n


def path_loss_los_db(d_n, f_c):
    """Line-of-sight InH path loss in dB.

    Parameters
    ----------
    d_n : float or array_like
        Link distance in m, at least 1 m.
    f_c : float
        Carrier frequency in GHz.
    """
    d_n = _check_range(d_n, f_c)
    return 32.4 + 17.3 * np.log10(d_n) + 20.0 * np.log10(f_c)


def path_loss_nlos_db(d_n, f_c):
    """Non-line-of-sight InH path loss in dB, never below the LoS value."""
    d_n = _check_range(d_n, f_c)
    nlos = 32.4 + 31.9 * np.log10(d_n) + 20.0 * np.log10(f_c)
    return np.maximum(path_loss_los_db(d_n, f_c), nlos)


def p_los(d_n):
    """InH line-of-sight probability.

    The middle and far branches disagree by about 0.003 at 49 m; that
    small jump is part of the model and kept as is.
    """
    d_n = np.asarray(d_n, dtype=float)
    if np.any(d_n <= 0):
        raise InvalidGeometryError(f"distance must be positive, got {d_n}")
    out = np.where(
        d_n <= 5.0,
        1.0,
        np.where(d_n <= 49.0, np.exp(-(d_n - 5.0) / 70.8), 0.54 * np.exp(-(d_n - 49.0) / 211.7)),
    )
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PathLoss:
    """Path loss of one hop, stored in dB with its linear attenuation."""

    value_db: float

    def __post_init__(self):
        if not np.isfinite(self.value_db):
            raise ValueError(f"path loss must be finite, got {self.value_db}")

    @property
    def linear(self):
        return float(db_to_linear(self.value_db))

    @classmethod
    def los(cls, d_n, f_c):
        return cls(float(path_loss_los_db(d_n, f_c)))

    @classmethod
    def nlos(cls, d_n, f_c):
        return cls(float(path_loss_nlos_db(d_n, f_c)))


@dataclass(frozen=True)
class RicianSpec:
    """Rician structure of an N-element link.

    Parameters
    ----------
    K : float
        Rician factor; 0 gives Rayleigh fading.
    los_component : ndarray of complex
        Unit-modulus deterministic LoS gain per element.
    """

    K: float
    los_component: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.K >= 0:
            raise ValueError(f"Rician factor must be non-negative, got {self.K}")
        los = np.asarray(self.los_component, dtype=complex)
        if los.ndim != 1 or not np.allclose(np.abs(los), 1.0, atol=1e-12):
            raise ValueError("LoS component must be a 1-D unit-modulus vector")
        object.__setattr__(self, "los_component", los)

    @property
    def n_elements(self):
        return self.los_component.size

    @classmethod
    def random_los(cls, K, n_elements, rng):
        """LoS phases drawn uniformly once, held for the realization."""
        psi = rng.uniform(0.0, 2.0 * np.pi, n_elements)
        return cls(K, np.exp(1j * psi))


@dataclass(frozen=True)
class ChannelVector:
    """Complex per-element amplitude gains of one link."""

    gains: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=complex)
        if not np.all(np.isfinite(gains)):
            raise ValueError("channel gains must be finite")
        object.__setattr__(self, "gains", gains)

    def __len__(self):
        return self.gains.size

    def __array__(self, dtype=None, copy=None):
        return self.gains if dtype is None else self.gains.astype(dtype)


def _rician_mix(K, los, nlos, lam):
    K = np.asarray(K, dtype=float)
    if np.all(np.isinf(K)):
        return los / np.sqrt(lam)
    return np.sqrt(1.0 / lam) * (np.sqrt(K / (K + 1.0)) * los + np.sqrt(1.0 / (K + 1.0)) * nlos)


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_channel(spec, path_loss, rng):
    """Draw one channel vector given an already-decided LoS state.

    Parameters
    ----------
    spec : RicianSpec
        Rician factor (set it to 0 when the LoS draw failed) and LoS phases.
    path_loss : PathLoss
        Path loss of the branch that applies.
    rng : numpy.random.Generator

    Returns
    -------
    ChannelVector
    """
    nlos = _complex_normal(rng, spec.n_elements)
    return ChannelVector(_rician_mix(spec.K, spec.los_component, nlos, path_loss.linear))


def draw_los_states(d_n, size, rng, state="bernoulli"):
    """Per-realization LoS indicators for one hop.

    ``state`` is ``"bernoulli"`` to draw from :func:`p_los`, or ``"los"`` /
    ``"nlos"`` to force the link state.
    """
    if state == "bernoulli":
        return rng.random(size) < p_los(d_n)
    if state == "los":
        return np.ones(size, dtype=bool)
    if state == "nlos":
        return np.zeros(size, dtype=bool)
    raise ValueError(f"link state must be one of {LINK_STATES}, got {state!r}")


def sample_link(d_n, f_c, K, n_elements, size, rng, state="bernoulli"):
    """Vectorized draw of ``size`` independent realizations of one hop.

    Parameters
    ----------
    d_n : float
        Hop distance in m.
    f_c : float
        Carrier frequency in GHz.
    K : float
        Rician factor applied when the hop is in LoS.
    n_elements : int
    size : int
        Number of realizations.
    rng : numpy.random.Generator
    state : {"bernoulli", "los", "nlos"}

    Returns
    -------
    ndarray, shape (size, n_elements)
        Complex gains, one realization per row.
    """
    los = draw_los_states(d_n, size, rng, state)
    lam = np.where(los, db_to_linear(path_loss_los_db(d_n, f_c)), db_to_linear(path_loss_nlos_db(d_n, f_c)))
    k_eff = np.where(los, float(K), 0.0)[:, None]
    psi = rng.uniform(0.0, 2.0 * np.pi, (size, n_elements))
    nlos = _complex_normal(rng, (size, n_elements))
    return _rician_mix(k_eff, np.exp(1j * psi), nlos, lam[:, None])
