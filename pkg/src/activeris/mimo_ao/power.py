"""RIS power consumption through the exact circuit chain.

For an active element at phase ``phi`` and normalized amplitude ``abar``::

    abar -> alpha = a_lo(phi) + abar (a_hi(phi) - a_lo(phi))   (exact bounds)
         -> R      (resistance realizing alpha at phi)
         -> m      (diode steepness with R_sp(m) = R)
         -> P      (stable-point DC power)

Every step is vectorized over elements and solved by bisection, since each
map is monotone.
"""

import numpy as np
from scipy import special

from ..errors import InfeasibleResistanceError, ModelInversionError
from ..td_unitcell import (
    TunnelDiodeModel,
    _capacitance,
    _closed_form_amplitude,
    feasible_resistance_range,
    impedance,
    stable_resistance,
)

__all__ = [
    "amplitude_at_resistance",
    "resistances_for_amplitudes",
    "m_from_resistances",
    "element_powers_from_m",
    "PowerChain",
    "ris_power",
]

_ITER = 60


class _AmplitudeMap:
    """``R -> |gamma|`` at fixed phases, with the capacitance re-solved for each ``R``.

    The phase constraint is a quadratic in the branch reactance ``X``
    (see :func:`capacitance_for_phase_closed_form`); the phase-only terms
    are computed once.  Amplitudes use the same closed form as
    :func:`amplitude_bounds_exact`, so the interval ends are reproduced
    exactly.
    """

    def __init__(self, phases, circuit):
        self.phases = np.asarray(phases, dtype=float)
        self.circuit = circuit
        a = circuit.omega * circuit.L1
        Z0 = circuit.Z0
        s, c = np.sin(self.phases), np.cos(self.phases)
        self.a, self.s, self.c = a, s, c
        self.A = s * (a * a - Z0 * Z0) - 2.0 * Z0 * a * c
        self.B = -2.0 * a * Z0 * Z0 * s - 2.0 * Z0 * a * a * c
        self.K1 = s * (a * a - Z0 * Z0) - 2.0 * Z0 * a * c
        self.K0 = -s * Z0 * Z0 * a * a
        w = circuit.omega
        c_lo, c_hi = circuit.C_range
        self.X_lo = w * circuit.L2 - 1.0 / (w * c_lo)
        self.X_hi = w * circuit.L2 - 1.0 / (w * c_hi)

    def __call__(self, R):
        R = np.asarray(R, dtype=float)
        a, Z0, A, B = self.a, self.circuit.Z0, self.A, self.B
        K = self.K1 * R * R + self.K0
        disc = B * B - 4.0 * A * K
        sq = np.sqrt(np.maximum(disc, 0.0))
        out = np.full(R.shape, np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            small = np.abs(A) < 1e-12 * (np.abs(B) + 1e-300)
            for X in (np.where(small, -K / B, (-B + sq) / (2.0 * A)), np.where(small, np.nan, (-B - sq) / (2.0 * A))):
                span = self.X_hi - self.X_lo
                ok = (disc >= 0) & (X >= self.X_lo - 1e-12 * span) & (X <= self.X_hi + 1e-12 * span)
                br = R + 1j * X
                Z = 1j * a * br / (1j * a + br)
                g = (Z - Z0) / (Z + Z0)
                ok &= np.abs(np.angle(g * np.exp(-1j * self.phases))) < 1e-6
                num = Z.imag * self.c + (Z0 - Z.real) * self.s
                den = Z.imag * self.c + (Z0 + Z.real) * self.s
                good = np.abs(den) > 1e-6 * (np.abs(Z) + Z0)
                amp = np.where(good, np.sqrt(np.abs(num / den)), np.abs(g))
                out = np.where(np.isnan(out) & ok, amp, out)
        bad = np.isnan(out)
        if bad.any():
            out[bad] = amplitude_at_resistance(R[bad], self.phases[bad], self.circuit)
        return out


def amplitude_at_resistance(R, phases, circuit):
    """``|gamma|`` at resistance ``R`` with the capacitance set for ``phases``.

    Uses the same closed form as :func:`amplitude_bounds_exact`, so the
    chain reproduces the bounds exactly at the interval ends.
    """
    R, phases = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(phases, dtype=float))
    C = _capacitance(R.ravel(), phases.ravel(), circuit).reshape(R.shape)
    if np.any(np.isnan(C)):
        raise ModelInversionError("no capacitance realizes the requested phase")
    return _closed_form_amplitude(impedance(C, R, circuit), phases, circuit.Z0)


def resistances_for_amplitudes(phases, alpha, circuit, bounds=None):
    """Vectorized inverse of :func:`amplitude_at_resistance` in ``R``.

    Parameters
    ----------
    phases, alpha : ndarray
    circuit : CircuitParams
    bounds : tuple of ndarray, optional
        Precomputed ``feasible_resistance_range(phases)``.

    Returns
    -------
    ndarray
    """
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), phases.shape)
    R_a, R_b = bounds if bounds is not None else feasible_resistance_range(phases, circuit)
    R_a, R_b = np.atleast_1d(R_a).astype(float), np.atleast_1d(R_b).astype(float)
    if np.any(np.isnan(R_a)):
        raise ModelInversionError("phase not attainable by the unit cell")
    amp = _AmplitudeMap(phases, circuit)
    a_a = amp(R_a)
    a_b = amp(R_b)
    lo, hi = np.minimum(a_a, a_b), np.maximum(a_a, a_b)
    tol = 1e-9 * np.maximum(hi, 1.0)
    if np.any((alpha < lo - tol) | (alpha > hi + tol)):
        i = int(np.flatnonzero((alpha < lo - tol) | (alpha > hi + tol))[0])
        raise ModelInversionError(f"element {i}: amplitude {alpha[i]} outside [{lo[i]}, {hi[i]}]")
    # bracketed regula falsi (Illinois variant), vectorized
    x0, x1 = R_a.copy(), R_b.copy()
    f0, f1 = a_a - alpha, a_b - alpha
    R = np.where(np.abs(f0) <= np.abs(f1), x0, x1)
    side = np.zeros(phases.shape, int)
    todo = (f0 != 0) & (f1 != 0) & (np.sign(f0) != np.sign(f1))
    for _ in range(_ITER):
        if not todo.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(todo, (x0 * f1 - x1 * f0) / (f1 - f0), R)
        x = np.where(np.isfinite(x), x, 0.5 * (x0 + x1))
        fx = np.where(todo, amp(x) - alpha, 0.0)
        R = np.where(todo, x, R)
        left = todo & (np.sign(fx) == np.sign(f0))
        right = todo & ~left
        x0, f0 = np.where(left, x, x0), np.where(left, fx, f0)
        f1 = np.where(left & (side == -1), 0.5 * f1, f1)
        x1, f1 = np.where(right, x, x1), np.where(right, fx, f1)
        f0 = np.where(right & (side == 1), 0.5 * f0, f0)
        side = np.where(left, -1, np.where(right, 1, side))
        todo &= (np.abs(fx) > 1e-13 * np.maximum(alpha, 1.0)) & (np.abs(x1 - x0) > 1e-15 * np.abs(R_b - R_a))
    R = np.where(np.abs(a_a - alpha) <= 1e-12 * np.maximum(alpha, 1.0), R_a, R)
    return np.where(np.abs(a_b - alpha) <= 1e-12 * np.maximum(alpha, 1.0), R_b, R)


def m_from_resistances(R, R0=1.0, V0=0.1, tol=1e-9):
    """Vectorized inverse of the stable-point resistance ``R_sp(m)`` on [1, 3].

    With ``u = 1/m``, ``-R/R0 = u e^(1+u)``, so ``m = 1 / W(|R| / (R0 e))``
    with ``W`` the principal Lambert function.
    """
    R = np.asarray(R, dtype=float)
    r1 = stable_resistance(TunnelDiodeModel(V0, R0, 1.0))[0]
    r3 = stable_resistance(TunnelDiodeModel(V0, R0, 3.0))[0]
    span = r3 - r1
    if np.any((R < r1 - tol * abs(span)) | (R > r3 + tol * abs(span))):
        raise InfeasibleResistanceError(f"resistance outside the stable range [{r1:.6f}, {r3:.6f}] Ohm")
    u = np.real(special.lambertw(-R / (R0 * np.e)))
    return np.clip(1.0 / u, 1.0, 3.0)


def element_powers_from_m(m, R0=1.0, V0=0.1):
    """``(V0^2/R0)(1/m + 1)^(2/m)``, elementwise."""
    m = np.asarray(m, dtype=float)
    return V0**2 / R0 * (1.0 / m + 1.0) ** (2.0 / m)


class PowerChain:
    """Power model of a hybrid surface, with exact bounds cached per phase vector.

    Parameters
    ----------
    circuit : CircuitParams
        Active unit cell.
    active : ndarray of bool
        Which elements draw power.
    V0, R0 : float
        Diode constants.
    band : tuple, optional
        ``(start, span)`` of the phase arc over which the whole resistance
        range is feasible.  Inside it the resistance search is skipped.
    """

    def __init__(self, circuit, active, V0=0.1, R0=1.0, band=None):
        self.circuit = circuit
        self.band = band
        self.active = np.asarray(active, dtype=bool)
        self.V0 = V0
        self.R0 = R0
        self._key = None
        self._cache = None
        self.p_min = float(element_powers_from_m(3.0, R0, V0))
        self.p_max = float(element_powers_from_m(1.0, R0, V0))

    @property
    def n_active(self):
        return int(self.active.sum())

    @property
    def minimum_budget(self):
        return self.n_active * self.p_min

    def _prepare(self, phases):
        phases = np.asarray(phases, dtype=float)
        key = phases.tobytes()
        if key != self._key:
            ph = phases[self.active]
            if self.band is not None and np.all(np.mod(ph - self.band[0], 2.0 * np.pi) <= self.band[1]):
                R_a = np.full(ph.shape, self.circuit.R_range[0])
                R_b = np.full(ph.shape, self.circuit.R_range[1])
            else:
                R_a, R_b = (np.atleast_1d(x) for x in feasible_resistance_range(ph, self.circuit))
            if np.any(np.isnan(R_a)):
                raise ModelInversionError("phase not attainable by the unit cell")
            amp = _AmplitudeMap(ph, self.circuit)
            a_a, a_b = amp(R_a), amp(R_b)
            self._cache = (R_a, R_b, np.minimum(a_a, a_b), np.maximum(a_a, a_b))
            self._key = key
        return self._cache

    def exact_bounds(self, phases):
        """Exact amplitude bounds of the active elements."""
        return self._prepare(phases)[2:]

    def element_powers(self, phases, alpha_bar):
        """Per-element power in W; zero for passive elements."""
        alpha_bar = np.asarray(alpha_bar, dtype=float)
        out = np.zeros(alpha_bar.shape)
        if not self.n_active:
            return out
        R_a, R_b, lo, hi = self._prepare(phases)
        ab = np.clip(alpha_bar[self.active], 0.0, 1.0)
        alpha = lo + ab * (hi - lo)
        ph = np.asarray(phases, dtype=float)[self.active]
        R = resistances_for_amplitudes(ph, alpha, self.circuit, bounds=(R_a, R_b))
        out[self.active] = element_powers_from_m(m_from_resistances(R, self.R0, self.V0), self.R0, self.V0)
        return out

    def total(self, phases, alpha_bar):
        return float(np.sum(self.element_powers(phases, alpha_bar)))

    def gradient(self, phases, alpha_bar, step=1e-4):
        """Per-element ``dP/d abar`` by one-sided finite differences."""
        alpha_bar = np.asarray(alpha_bar, dtype=float)
        h = np.where(alpha_bar + step <= 1.0, step, -step)
        p0 = self.element_powers(phases, alpha_bar)
        p1 = self.element_powers(phases, alpha_bar + h)
        return np.where(self.active, (p1 - p0) / h, 0.0)


def ris_power(alpha_bar, phases, circuit, active=None, V0=0.1, R0=1.0):
    """Total power drawn by the active elements.

    Parameters
    ----------
    alpha_bar, phases : ndarray
    circuit : CircuitParams
    active : ndarray of bool, optional
        Defaults to all elements.

    Returns
    -------
    float
        Power in W.
    """
    alpha_bar = np.atleast_1d(np.asarray(alpha_bar, dtype=float))
    active = np.ones(alpha_bar.shape, bool) if active is None else active
    return PowerChain(circuit, active, V0, R0).total(np.broadcast_to(phases, alpha_bar.shape), alpha_bar)
