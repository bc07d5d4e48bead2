"""Single-amplifier dual-RIS SISO link.

RIS1 collects the transmitted signal and combines it into one power
amplifier, which feeds RIS2 towards the receiver.  With the phases of both
panels matched to their channels, the only remaining design variable is the
amplifier gain, and since the SNR grows with the gain the optimum sits on
whichever of the two limits (maximum gain or maximum output power) binds
first.

Arrays of channels are accepted throughout: the last axis indexes RIS
elements, leading axes index independent realizations.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import Geometry, sample_link
from .units import db_to_linear, dbm_to_watt

__all__ = [
    "SisoScenario",
    "PhaseConfig",
    "AmplifierState",
    "optimal_phases",
    "pa_input_power",
    "optimal_gain",
    "amplifier_state",
    "snr_active",
    "simulate_received_symbols",
    "rate_active",
    "snr_passive_baseline",
    "draw_channels",
    "optimized_link",
    "snr_samples",
    "simulate_ber_bpsk",
]

_SCALARS = ("snr_active", "snr_passive", "G", "P_in", "P_out")


@dataclass(frozen=True)
class SisoScenario:
    """Parameters of the SISO experiments, all in SI units.

    Attributes
    ----------
    P_t, P_max : float
        Transmit power and amplifier saturation output power in W.
    G_max, F : float
        Maximum amplifier gain and noise figure, linear.
    sigma2_tot, sigma2_rx : float
        Noise power at the amplifier input and at the receiver in W.
    N : int
        Elements per RIS panel.
    f_c : float
        Carrier frequency in GHz.
    BW : float
        Bandwidth in Hz.
    K1, K2 : float
        Rician factors of the Tx-RIS1 and RIS2-Rx hops.
    geometry : Geometry
    link_states : tuple of str
        LoS state of each hop: ``"los"``, ``"nlos"`` or ``"bernoulli"``.
        The default keeps the short Tx hop in LoS and the long Rx hop in
        Rayleigh NLoS.
    """

    P_t: float = float(dbm_to_watt(30.0))
    P_max: float = float(dbm_to_watt(30.0))
    G_max: float = float(db_to_linear(30.0))
    F: float = float(db_to_linear(5.0))
    sigma2_tot: float = float(dbm_to_watt(-100.0))
    sigma2_rx: float = float(dbm_to_watt(-100.0))
    N: int = 128
    f_c: float = 28.0
    BW: float = 180e3
    K1: float = 5.0
    K2: float = 5.0
    geometry: Geometry = field(default_factory=lambda: Geometry(5.0, 5.0, 50.0))
    link_states: tuple = ("los", "nlos")

    def __post_init__(self):
        for name in ("P_t", "P_max", "sigma2_tot", "sigma2_rx", "f_c", "BW"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.G_max < 1 or self.F < 1:
            raise ValueError("G_max and F must be at least 1 (linear)")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if len(self.link_states) != 2:
            raise ValueError("link_states needs one entry per hop")

    @property
    def n_passive(self):
        """Element count of the equal-size passive benchmark (both panels)."""
        return 2 * self.N

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class PhaseConfig:
    """Unit-modulus phase vectors of RIS1 (``phi``) and RIS2 (``theta``)."""

    phi: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        for name in ("phi", "theta"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if not np.allclose(np.abs(v), 1.0, atol=1e-12):
                raise ValueError(f"{name} entries must have unit modulus")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class AmplifierState:
    """Operating point of the inter-RIS amplifier."""

    G: np.ndarray
    P_in: np.ndarray
    P_out: np.ndarray


def _align(x):
    x = np.asarray(x, dtype=complex)
    zero = x == 0
    if np.any(zero):
        warnings.warn("zero channel entry: phase undefined, using 0", RuntimeWarning, stacklevel=3)
    return np.where(zero, 1.0 + 0j, np.exp(-1j * np.angle(x)))


def optimal_phases(h, g):
    """Co-phasing configuration ``phi_i = exp(-j angle h_i)``, same for ``g``."""
    return PhaseConfig(_align(h), _align(g))


def _inner(v, x):
    return np.sum(np.asarray(v) * np.asarray(x), axis=-1)


def pa_input_power(P_t, phi, h):
    """Power entering the amplifier, ``P_t |phi^T h|^2``."""
    return P_t * np.abs(_inner(phi, h)) ** 2


def optimal_gain(P_in, P_max, G_max):
    """Largest gain meeting both amplifier limits, ``min(G_max, P_max / P_in)``."""
    P_in = np.asarray(P_in, dtype=float)
    if np.any(P_in <= 0):
        raise ValueError("amplifier input power must be positive")
    return np.minimum(G_max, P_max / P_in)


def amplifier_state(scenario, h, config):
    P_in = pa_input_power(scenario.P_t, config.phi, h)
    G = optimal_gain(P_in, scenario.P_max, scenario.G_max)
    return AmplifierState(G=G, P_in=P_in, P_out=G * P_in)


def snr_active(scenario, h, g, config, G):
    """Received SNR of the amplified link for gain ``G``."""
    s = scenario
    a = np.abs(_inner(config.phi, h)) ** 2
    b = np.abs(_inner(config.theta, g)) ** 2
    return s.P_t * G / s.N * a * b / (G * s.F / s.N * b * s.sigma2_tot + s.sigma2_rx)


def simulate_received_symbols(scenario, h, g, config, G, symbols, rng):
    """Pass unit-energy symbols through the amplified link with fresh noise.

    Parameters
    ----------
    h, g : ndarray, shape (..., N)
    symbols : ndarray, shape (..., S)
        Symbols per realization along the last axis.

    Returns
    -------
    ndarray
        Received samples, same shape as ``symbols``.
    """
    s = scenario
    G = np.asarray(G, dtype=float)[..., None]
    a = _inner(config.phi, h)[..., None]
    b = _inner(config.theta, g)[..., None]
    shape = np.shape(symbols)

    def noise(var):
        return np.sqrt(var / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    n_tot = noise(s.sigma2_tot)
    n_rx = noise(s.sigma2_rx)
    return np.sqrt(G * s.P_t / s.N) * a * b * symbols + np.sqrt(G * s.F / s.N) * b * n_tot + n_rx


def rate_active(snr):
    """Achievable rate ``log2(1 + snr)`` in bits/s/Hz."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("SNR must be non-negative")
    return np.log2(1.0 + snr)


def snr_passive_baseline(P_t, h_cascade, sigma2_rx):
    """SNR of a single passive RIS with co-phased cascaded gains ``h_i g_i``."""
    return P_t * np.sum(np.abs(h_cascade), axis=-1) ** 2 / sigma2_rx


def draw_channels(scenario, trials, rng):
    """Draw ``trials`` realizations of both hops with ``2N`` elements each.

    The active design uses the first ``N`` columns of ``h`` (RIS1) and the
    last ``N`` of ``g`` (RIS2); the passive benchmark uses all of them,
    so both architectures see the same fading realization.
    """
    s = scenario
    d1, d2 = s.geometry.d1, s.geometry.d2
    h = sample_link(d1, s.f_c, s.K1, s.n_passive, trials, rng, state=s.link_states[0])
    g = sample_link(d2, s.f_c, s.K2, s.n_passive, trials, rng, state=s.link_states[1])
    return h, g


def optimized_link(scenario, trials, rng):
    """Monte Carlo draw of the optimized active and passive links.

    Returns
    -------
    dict
        Arrays of length ``trials``: ``snr_active``, ``snr_passive``,
        ``G``, ``P_in``, ``P_out`` and the active-design channels ``h``, ``g``.
    """
    s = scenario
    h_full, g_full = draw_channels(s, trials, rng)
    h, g = h_full[:, : s.N], g_full[:, s.N :]
    config = optimal_phases(h, g)
    amp = amplifier_state(s, h, config)
    return {
        "snr_active": snr_active(s, h, g, config, amp.G),
        "snr_passive": snr_passive_baseline(s.P_t, h_full * g_full, s.sigma2_rx),
        "G": amp.G,
        "P_in": amp.P_in,
        "P_out": amp.P_out,
        "h": h,
        "g": g,
        "config": config,
    }


def _chunks(total, chunk):
    start = 0
    while start < total:
        yield min(chunk, total - start)
        start += chunk


def snr_samples(scenario, trials, rng, chunk=2048):
    """Per-realization scalars of :func:`optimized_link`, drawn in chunks.

    Channel matrices are discarded after each chunk to bound memory.
    """
    parts = [
        {k: v for k, v in optimized_link(scenario, n, rng).items() if k in _SCALARS}
        for n in _chunks(trials, chunk)
    ]
    return {k: np.concatenate([p[k] for p in parts]) for k in _SCALARS}


def simulate_ber_bpsk(scenario, trials, symbols_per_trial, rng, chunk=2048):
    """Symbol-level BPSK error count with coherent detection.

    Returns
    -------
    errors : int
    total : int
    """
    errors = 0
    for n in _chunks(trials, chunk):
        errors += _bpsk_errors(scenario, n, symbols_per_trial, rng)
    return errors, trials * symbols_per_trial


def _bpsk_errors(scenario, trials, symbols_per_trial, rng):
    link = optimized_link(scenario, trials, rng)
    bits = rng.integers(0, 2, (trials, symbols_per_trial))
    symbols = 2.0 * bits - 1.0
    y = simulate_received_symbols(scenario, link["h"], link["g"], link["config"], link["G"], symbols, rng)
    gain = (_inner(link["config"].phi, link["h"]) * _inner(link["config"].theta, link["g"]))[:, None]
    decided = np.real(y * np.conj(gain)) > 0
    return int(np.count_nonzero(decided != (bits == 1)))
