"""Active-RIS MIMO link: scenario, channels, LMMSE combining and rates.

Received signal::

    y = (H_d + H2 G H1) V s + H2 G n_s + n_r,   G = diag(gamma)

RIS noise ``n_s`` is generated only by active (amplifying) elements; the
passive elements of a hybrid surface add none.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ..td_unitcell import CircuitParams
from ..units import db_to_linear, dbm_to_watt

__all__ = [
    "SPEED_OF_LIGHT",
    "MimoScenario",
    "MimoChannels",
    "draw_mimo_channels",
    "link_gain",
    "effective_channel",
    "noise_covariance",
    "lmmse_combiner",
    "rate_with_combiner",
    "rate_lmmse",
    "rate_gradient",
    "rho",
    "transmit_power_for_rho",
]

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class MimoScenario:
    """System parameters in SI units.

    Attributes
    ----------
    M_T, M_R, d : int
        Transmit antennas, receive antennas and streams.
    N, N_act : int
        RIS elements, of which the first ``N_act`` are active (all when
        ``N_act`` is None).
    sigma2 : float
        Thermal noise power in W.
    F_r, F_s : float
        Receiver and RIS noise figures, linear.
    P_T, P_RIS : float
        Transmit and RIS power budgets in W.
    d_ris_tx, d_rx_ris, d_tx_rx : float
        Link distances in m.
    exp_direct, exp_ris : float
        Path-loss exponents of the direct and RIS links.
    omega : float
        Carrier angular frequency in rad/s.
    V0, R0 : float
        Tunnel-diode model constants.
    passive_R : float
        Resistance of passive elements in Ohm.
    """

    M_T: int = 8
    M_R: int = 8
    d: int = 8
    N: int = 64
    N_act: int = None
    sigma2: float = float(dbm_to_watt(-113.93))
    F_r: float = float(db_to_linear(7.0))
    F_s: float = float(db_to_linear(2.0))
    P_T: float = float(dbm_to_watt(-12.75))
    P_RIS: float = 2.3
    d_ris_tx: float = 40.0
    d_rx_ris: float = 4.0
    d_tx_rx: float = 40.2
    exp_direct: float = 5.0
    exp_ris: float = 2.0
    omega: float = 2.0 * np.pi * 2.4e9
    V0: float = 0.1
    R0: float = 1.0
    passive_R: float = 1.5
    circuit: CircuitParams = field(default=None)

    def __post_init__(self):
        if not 1 <= self.d <= min(self.M_T, self.M_R):
            raise ValueError(f"need 1 <= d <= min(M_T, M_R), got d={self.d}")
        if self.N_act is None:
            object.__setattr__(self, "N_act", self.N)
        if not 0 <= self.N_act <= self.N:
            raise ValueError(f"need 0 <= N_act <= N, got N_act={self.N_act}, N={self.N}")
        for name in ("sigma2", "P_T", "P_RIS", "d_ris_tx", "d_rx_ris", "d_tx_rx", "omega"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.F_r < 1 or self.F_s < 1:
            raise ValueError("noise figures must be >= 1 (linear)")
        if self.circuit is None:
            object.__setattr__(self, "circuit", CircuitParams.from_diode(self.V0, self.R0, omega=self.omega))

    @property
    def wavelength(self):
        return 2.0 * np.pi * SPEED_OF_LIGHT / self.omega

    @property
    def passive_circuit(self):
        return replace(self.circuit, R_range=(self.passive_R, self.passive_R))

    @property
    def active_mask(self):
        return np.arange(self.N) < self.N_act

    def with_(self, **changes):
        """Copy with changes; a fully active surface stays fully active when ``N`` changes."""
        if "N" in changes and "N_act" not in changes and self.N_act == self.N:
            changes["N_act"] = None
        if "circuit" not in changes and ({"V0", "R0", "omega"} & changes.keys()):
            changes["circuit"] = None
        return replace(self, **changes)


@dataclass(frozen=True)
class MimoChannels:
    """Direct (M_R x M_T), Tx-RIS (N x M_T) and RIS-Rx (M_R x N) channels."""

    H_d: np.ndarray
    H1: np.ndarray
    H2: np.ndarray

    def __post_init__(self):
        M_R, M_T = self.H_d.shape
        N = self.H1.shape[0]
        if self.H1.shape != (N, M_T) or self.H2.shape != (M_R, N):
            raise ValueError(f"inconsistent channel shapes {self.H_d.shape}, {self.H1.shape}, {self.H2.shape}")
        for h in (self.H_d, self.H1, self.H2):
            if not np.all(np.isfinite(h)):
                raise ValueError("channels must be finite")

    @property
    def N(self):
        return self.H1.shape[0]


def link_gain(wavelength, distance, exponent):
    """Average power gain ``lambda^2 / (4 pi) * distance^-exponent``.

    The cascaded product of two exponent-2 links is the reference path loss
    ``lambda^4 / (16 pi^2) (d1 d2)^-2`` used to define ``rho``.
    """
    return wavelength**2 / (4.0 * np.pi) * distance ** (-exponent)


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_mimo_channels(scenario, rng):
    """Rayleigh channels scaled by their path loss."""
    s = scenario
    lam = s.wavelength
    H_d = np.sqrt(link_gain(lam, s.d_tx_rx, s.exp_direct)) * _cn(rng, (s.M_R, s.M_T))
    H1 = np.sqrt(link_gain(lam, s.d_ris_tx, s.exp_ris)) * _cn(rng, (s.N, s.M_T))
    H2 = np.sqrt(link_gain(lam, s.d_rx_ris, s.exp_ris)) * _cn(rng, (s.M_R, s.N))
    return MimoChannels(H_d, H1, H2)


def effective_channel(channels, gamma):
    """``H_d + H2 diag(gamma) H1``."""
    gamma = np.asarray(gamma)
    if gamma.shape != (channels.N,):
        raise ValueError(f"gamma must have length {channels.N}")
    return channels.H_d + (channels.H2 * gamma) @ channels.H1


def noise_covariance(gamma, channels, sigma2, F_r, F_s, noise_mask=None):
    """Receiver noise plus RIS noise routed through the active elements."""
    g = np.asarray(gamma) if noise_mask is None else np.asarray(gamma) * noise_mask
    A = channels.H2 * g
    return sigma2 * F_s * (A @ A.conj().T) + sigma2 * F_r * np.eye(channels.H2.shape[0])


def _solve(A, B):
    """Solve ``A X = B``, lifting the diagonal only if badly conditioned."""
    if np.linalg.cond(A) > 1e12:
        A = A + 1e-12 * np.real(np.trace(A)) / A.shape[0] * np.eye(A.shape[0])
    return np.linalg.solve(A, B)


def lmmse_combiner(V, gamma, channels, sigma2, F_r, F_s, noise_mask=None):
    """LMMSE receive filter ``(H V V^H H^H + R_n)^-1 H V``."""
    H = effective_channel(channels, gamma)
    HV = H @ V
    J = HV @ HV.conj().T + noise_covariance(gamma, channels, sigma2, F_r, F_s, noise_mask)
    return _solve(J, HV)


def rate_with_combiner(V, W, gamma, channels, sigma2, F_r, F_s, noise_mask=None):
    """Sum rate of per-stream detection with combiner ``W``, in bits/s/Hz."""
    H = effective_channel(channels, gamma)
    G = W.conj().T @ H @ V  # G[i, j] = w_i^H H v_j
    power = np.abs(G) ** 2
    signal = np.diag(power)
    interference = power.sum(axis=1) - signal
    g = np.asarray(gamma) if noise_mask is None else np.asarray(gamma) * noise_mask
    ris = sigma2 * F_s * np.sum(np.abs(W.conj().T @ (channels.H2 * g)) ** 2, axis=1)
    rx = sigma2 * F_r * np.sum(np.abs(W) ** 2, axis=0)
    den = interference + ris + rx
    # a stream with zero combiner carries nothing
    sinr = np.divide(signal, den, out=np.zeros_like(signal), where=den > 0)
    return float(np.sum(np.log2(1.0 + sinr)))


def _logdet(A):
    sign, value = np.linalg.slogdet(A)
    return value


def rate_lmmse(V, gamma, channels, sigma2, F_r, F_s, noise_mask=None):
    """Sum rate with the LMMSE combiner.

    Uses ``1 + b_i^H (J - b_i b_i^H)^-1 b_i = det J / det(J - b_i b_i^H)``.
    """
    H = effective_channel(channels, gamma)
    B = H @ V
    J = B @ B.conj().T + noise_covariance(gamma, channels, sigma2, F_r, F_s, noise_mask)
    ld = _logdet(J)
    total = 0.0
    for i in range(B.shape[1]):
        b = B[:, i : i + 1]
        total += ld - _logdet(J - b @ b.conj().T)
    return float(max(total, 0.0) / np.log(2.0))


def rate_gradient(V, gamma, channels, sigma2, F_r, F_s, noise_mask=None):
    """Wirtinger derivative of :func:`rate_lmmse` with respect to ``conj(gamma)``.

    The Euclidean gradient of the real rate in the complex vector space is
    twice this quantity.
    """
    gamma = np.asarray(gamma)
    m = np.ones(gamma.shape) if noise_mask is None else np.asarray(noise_mask, dtype=float)
    H = effective_channel(channels, gamma)
    B = H @ V
    HV1 = channels.H1 @ V  # N x d
    noise = noise_covariance(gamma, channels, sigma2, F_r, F_s, noise_mask)
    J = B @ B.conj().T + noise
    d = V.shape[1]

    def grad(X, cols):
        T = channels.H2.conj().T @ np.linalg.inv(X)  # N x M_R
        g = np.sum((T @ B[:, cols]) * np.conj(HV1[:, cols]), axis=1)
        return g + sigma2 * F_s * m * gamma * np.sum(T * channels.H2.T, axis=1)

    total = d * grad(J, np.arange(d))
    for i in range(d):
        b = B[:, i : i + 1]
        total -= grad(J - b @ b.conj().T, np.delete(np.arange(d), i))
    return total / np.log(2.0)


def rho(P_T, wavelength, d_ris_tx, d_rx_ris, sigma2, F_r):
    """Normalized SNR ``P_T P_L / (sigma2 F_r)`` of the cascaded reference link."""
    P_L = wavelength**4 / (16.0 * np.pi**2) * (d_ris_tx * d_rx_ris) ** -2
    return P_T * P_L / (sigma2 * F_r)


def transmit_power_for_rho(rho_lin, scenario):
    """Transmit power that yields the requested ``rho`` (linear)."""
    s = scenario
    return rho_lin / rho(1.0, s.wavelength, s.d_ris_tx, s.d_rx_ris, s.sigma2, s.F_r)
