"""Tunnel-diode unit cell: circuit, diode I-V model and amplitude envelopes.

The unit cell is a transmission-line model: an inductance ``L1`` in
parallel with a series branch ``L2``, tunable capacitance ``C`` and a
resistance ``R`` that becomes negative when the diode is biased into its
negative differential resistance region.  Its reflection coefficient is
``(Z - Z0) / (Z + Z0)``.

For a target phase the capacitance is fixed by the resistance, so the
achievable amplitudes at that phase form an interval whose ends are
reached at the extreme feasible resistances.  Amplitude grows with
``|R|``, hence the lower bound comes from the resistance closest to zero.

Note that many high-gain configurations have ``Re(Z + Z0) <= 0``.  The
stability check is therefore available (``is_stable``, ``stable_only``) but
not enforced by default.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (
    InfeasiblePhaseError,
    InfeasibleResistanceError,
    InstabilityError,
    ModelInversionError,
    PeakSingularityError,
    ResonanceSingularityError,
)

__all__ = [
    "CircuitParams",
    "TunnelDiodeModel",
    "ReflectionCoefficient",
    "AmplitudeEnvelope",
    "ExactEnvelope",
    "impedance",
    "reflection_coefficient",
    "reflection",
    "is_stable",
    "tunneling_current_peak_model",
    "tunneling_current",
    "differential_resistance",
    "stable_resistance",
    "element_power",
    "m_from_resistance",
    "capacitance_for_phase",
    "capacitance_for_phase_closed_form",
    "attainable_phase_arc",
    "feasible_resistance_range",
    "amplitude_bounds_exact",
    "resistance_for_amplitude",
    "fit_envelope",
    "amplitude_from_normalized",
]

TWO_PI = 2.0 * np.pi
_C_GRID = 129


@dataclass(frozen=True)
class TunnelDiodeModel:
    """Generalized tunneling current ``I = (V/R0) exp(-(V/V0)^m)``.

    Attributes
    ----------
    V0 : float
        Voltage scale in V, in [0.1, 0.5].
    R0 : float
        Ohmic resistance of the linear regime in Ohm.
    m : float
        Steepness, in [1, 3].
    """

    V0: float = 0.1
    R0: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not 0.1 <= self.V0 <= 0.5:
            raise ValueError(f"V0 must lie in [0.1, 0.5] V, got {self.V0}")
        if not 1.0 <= self.m <= 3.0:
            raise ValueError(f"m must lie in [1, 3], got {self.m}")
        if not self.R0 > 0:
            raise ValueError("R0 must be positive")


def _as_td(td=None, **kw):
    return td if td is not None else TunnelDiodeModel(**kw)


@dataclass(frozen=True)
class CircuitParams:
    """Unit-cell circuit.  Defaults are the 2.4 GHz active design.

    ``R_range`` may be negative (active), positive (lossy passive), or a
    single point when ``R_lo == R_hi``.
    """

    L1: float = 4.5e-9
    L2: float = 0.7e-9
    Z0: float = 377.0
    omega: float = TWO_PI * 2.4e9
    C_range: tuple = (0.85e-12, 6.25e-12)
    R_range: tuple = (-7.39, -1.26)

    def __post_init__(self):
        if min(self.L1, self.L2, self.Z0, self.omega) <= 0:
            raise ValueError("L1, L2, Z0 and omega must be positive")
        c_lo, c_hi = self.C_range
        if not 0 < c_lo < c_hi:
            raise ValueError(f"need 0 < C_min < C_max, got {self.C_range}")
        r_lo, r_hi = self.R_range
        if not r_lo <= r_hi:
            raise ValueError(f"need R_lo <= R_hi, got {self.R_range}")
        object.__setattr__(self, "C_range", (float(c_lo), float(c_hi)))
        object.__setattr__(self, "R_range", (float(r_lo), float(r_hi)))

    @property
    def is_active(self):
        return self.R_range[1] < 0

    @classmethod
    def from_diode(cls, V0=0.1, R0=1.0, m_range=(1.0, 3.0), **kw):
        """Circuit whose resistance range is the diode's stable-point range."""
        r_lo = stable_resistance(TunnelDiodeModel(V0, R0, m_range[0]))[0]
        r_hi = stable_resistance(TunnelDiodeModel(V0, R0, m_range[1]))[0]
        return cls(R_range=(r_lo, r_hi), **kw)

    @classmethod
    def passive(cls, R=1.5, **kw):
        return cls(R_range=(R, R), **kw)


@dataclass(frozen=True)
class ReflectionCoefficient:
    """Amplitude and phase (in [0, 2pi)) of a reflection coefficient."""

    alpha: np.ndarray
    phase: np.ndarray

    @property
    def complex(self):
        return self.alpha * np.exp(1j * self.phase)


# circuit


def impedance(C, R, circuit):
    """Input impedance of the unit cell.

    Parameters
    ----------
    C : float or ndarray
        Capacitance in F.
    R : float or ndarray
        Resistance in Ohm.
    circuit : CircuitParams

    Returns
    -------
    complex or ndarray
    """
    C = np.asarray(C, dtype=float)
    if np.any(C <= 0):
        raise ValueError("capacitance must be positive")
    w = circuit.omega
    branch = 1j * w * circuit.L2 + 1.0 / (1j * w * C) + R
    den = 1j * w * circuit.L1 + branch
    if np.any(np.abs(den) < 1e-12):
        raise ResonanceSingularityError("parallel resonance: impedance denominator vanishes")
    return 1j * w * circuit.L1 * branch / den


def reflection(C, R, circuit):
    """Complex reflection coefficient for capacitance ``C`` and resistance ``R``."""
    Z = impedance(C, R, circuit)
    return (Z - circuit.Z0) / (Z + circuit.Z0)


def reflection_coefficient(Z, Z0):
    """Decompose ``(Z - Z0)/(Z + Z0)`` into amplitude and phase."""
    Z = np.asarray(Z, dtype=complex)
    if np.any(np.abs(Z + Z0) < 1e-9):
        raise InstabilityError("Z + Z0 vanishes: unbounded reflection")
    g = (Z - Z0) / (Z + Z0)
    return ReflectionCoefficient(np.abs(g), np.mod(np.angle(g), TWO_PI))


def is_stable(C, R, circuit):
    """Stability criterion ``Re(Z + Z0) > 0``."""
    return np.real(impedance(C, R, circuit)) + circuit.Z0 > 0


# diode


def tunneling_current_peak_model(V, I_p, V_p):
    """Tunneling current written with the peak point ``(V_p, I_p)``."""
    V = np.asarray(V, dtype=float)
    return I_p / V_p * V * np.exp(1.0 - V / V_p)


def tunneling_current(V, td=None):
    td = _as_td(td)
    V = np.asarray(V, dtype=float)
    return V / td.R0 * np.exp(-((V / td.V0) ** td.m))


def differential_resistance(V, td=None):
    """Differential resistance ``dV/dI`` of the tunneling current."""
    td = _as_td(td)
    u = (np.asarray(V, dtype=float) / td.V0) ** td.m
    den = 1.0 - td.m * u
    if np.any(np.abs(den) < 1e-14):
        raise PeakSingularityError("current peak: differential resistance is unbounded")
    return td.R0 * np.exp(u) / den


def stable_resistance(td=None):
    """Stable operating point, where ``dR/dV = 0``.

    Returns
    -------
    R_sp : float
        Negative resistance in Ohm.
    V_r : float
        Bias voltage in V.
    """
    td = _as_td(td)
    m = td.m
    V_r = (1.0 / m + 1.0) ** (1.0 / m) * td.V0
    R_sp = -td.R0 / m * np.exp((m + 1.0) / m)
    return float(R_sp), float(V_r)


def element_power(td=None):
    """DC power drawn at the stable point, ``(V0^2/R0)(1/m + 1)^(2/m)``."""
    td = _as_td(td)
    return float(td.V0**2 / td.R0 * (1.0 / td.m + 1.0) ** (2.0 / td.m))


def m_from_resistance(R_target, R0=1.0, V0=0.1, tol=1e-12):
    """Invert :func:`stable_resistance` for the steepness ``m``.

    ``R_sp(m)`` is strictly increasing on [1, 3], so bisection applies.
    """
    lo = stable_resistance(TunnelDiodeModel(V0, R0, 1.0))[0]
    hi = stable_resistance(TunnelDiodeModel(V0, R0, 3.0))[0]
    if not lo - tol <= R_target <= hi + tol:
        raise InfeasibleResistanceError(f"R={R_target} outside the stable range [{lo:.6f}, {hi:.6f}] Ohm")
    if R_target <= lo:
        return 1.0
    if R_target >= hi:
        return 3.0

    def f(m):
        return -R0 / m * np.exp((m + 1.0) / m) - R_target

    return float(optimize.bisect(f, 1.0, 3.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


# phase and capacitance


def _wrap(x):
    return np.mod(x + np.pi, TWO_PI) - np.pi


def capacitance_for_phase(R, target_phase, circuit, stable_only=False):
    """Capacitance giving reflection phase ``target_phase`` at resistance ``R``.

    Root-finding on the wrapped phase error along ``C_range``.

    Returns
    -------
    float or None
        ``None`` when no capacitance in range realizes the phase.
    """
    c_lo, c_hi = circuit.C_range
    grid = np.linspace(c_lo, c_hi, _C_GRID)
    err = _wrap(np.angle(reflection(grid, R, circuit)) - target_phase)
    if np.any(err == 0):
        C = float(grid[np.flatnonzero(err == 0)[0]])
    else:
        crossing = np.flatnonzero((np.sign(err[:-1]) != np.sign(err[1:])) & (np.abs(err[:-1] - err[1:]) < np.pi))
        if crossing.size == 0:
            # phases reached only at a range endpoint
            end = np.flatnonzero(np.abs(err[[0, -1]]) < 1e-9)
            if end.size == 0:
                return None
            C = float(grid[[0, -1][end[0]]])
            if stable_only and not is_stable(C, R, circuit):
                return None
            return C

        def f(c):
            return _wrap(np.angle(reflection(c, R, circuit)) - target_phase)

        i = crossing[0]
        C = optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-27, rtol=4 * np.finfo(float).eps, maxiter=200)
    if stable_only and not is_stable(C, R, circuit):
        return None
    return float(C)


def capacitance_for_phase_closed_form(R, target_phase, circuit):
    """Vectorized closed-form capacitance.

    Writing ``X = w L2 - 1/(w C)`` for the branch reactance and clearing
    denominators in ``arg(gamma) = phi`` gives a quadratic in ``X``.  Of
    its real roots the one whose phase is ``phi`` (not ``phi + pi``) and
    whose capacitance lies in range is kept; NaN marks infeasibility.
    """
    R, phi = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(target_phase, dtype=float))
    a = circuit.omega * circuit.L1
    Z0 = circuit.Z0
    s, c = np.sin(phi), np.cos(phi)
    A = s * (a * a - Z0 * Z0) - 2.0 * Z0 * a * c
    B = -2.0 * a * Z0 * Z0 * s - 2.0 * Z0 * a * a * c
    K = s * (a * a * R * R - Z0 * Z0 * R * R - Z0 * Z0 * a * a) - 2.0 * Z0 * a * R * R * c
    disc = B * B - 4.0 * A * K
    sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.abs(A) < 1e-12 * (np.abs(B) + 1e-300)
        roots = [
            np.where(small, -K / B, (-B + sq) / (2.0 * A)),
            np.where(small, np.nan, (-B - sq) / (2.0 * A)),
        ]
    w, L2 = circuit.omega, circuit.L2
    c_lo, c_hi = circuit.C_range
    out = np.full(R.shape, np.nan)
    for X in roots:
        with np.errstate(divide="ignore", invalid="ignore"):
            C = 1.0 / (w * (w * L2 - X))
        ok = np.isfinite(C) & (C >= c_lo * (1 - 1e-12)) & (C <= c_hi * (1 + 1e-12))
        Cc = np.where(ok, np.clip(C, c_lo, c_hi), c_lo)
        with np.errstate(invalid="ignore"):
            ok &= np.abs(_wrap(np.angle(reflection(Cc, np.where(np.isfinite(R), R, 0.0), circuit)) - phi)) < 1e-6
        out = np.where(np.isnan(out) & ok, Cc, out)
    return out if out.ndim else float(out)


def attainable_phase_arc(R, circuit):
    """Arc of phases reachable by sweeping ``C`` at resistance ``R``.

    Returns
    -------
    start : ndarray
        Phase at ``C_min``.
    sweep : ndarray
        Signed unwrapped phase change from ``C_min`` to ``C_max``.
    """
    R = np.asarray(R, dtype=float)
    grid = np.linspace(*circuit.C_range, _C_GRID)
    ang = np.angle(reflection(grid, R[..., None], circuit))
    sweep = np.sum(_wrap(np.diff(ang, axis=-1)), axis=-1)
    return ang[..., 0], sweep


def _in_arc(phi, start, sweep):
    fwd = np.mod(phi - start, TWO_PI)
    bwd = np.mod(start - phi, TWO_PI)
    tol = 1e-12
    return np.where(sweep >= 0, (fwd <= sweep + tol) | (fwd >= TWO_PI - tol), (bwd <= -sweep + tol) | (bwd >= TWO_PI - tol))


def _feasible(R, phi, circuit):
    start, sweep = attainable_phase_arc(R, circuit)
    return _in_arc(phi, start, sweep)


def feasible_resistance_range(target_phase, circuit, n_grid=65, tol=1e-11):
    """Resistances in ``R_range`` for which the phase can be realized.

    Works elementwise over an array of phases.

    Returns
    -------
    R_min, R_max : ndarray
        Signed endpoints of the feasible sub-interval, NaN where empty.
    """
    phi = np.atleast_1d(np.asarray(target_phase, dtype=float))
    r_lo, r_hi = circuit.R_range
    if r_lo == r_hi:
        ok = _feasible(np.full(phi.shape, r_lo), phi, circuit)
        R = np.where(ok, r_lo, np.nan)
        return (R, R.copy()) if np.ndim(target_phase) else (float(R[0]), float(R[0]))
    grid = np.linspace(r_lo, r_hi, n_grid)
    feas = _feasible(grid[None, :], phi[:, None], circuit)
    any_ok = feas.any(axis=1)
    first = np.argmax(feas, axis=1)
    last = n_grid - 1 - np.argmax(feas[:, ::-1], axis=1)

    def refine(inside, outside):
        for _ in range(int(np.ceil(np.log2((r_hi - r_lo) / tol)))):
            mid = 0.5 * (inside + outside)
            ok = _feasible(mid, phi, circuit)
            inside = np.where(ok, mid, inside)
            outside = np.where(ok, outside, mid)
        return inside

    lo_in = grid[first]
    lo_out = grid[np.maximum(first - 1, 0)]
    R_min = np.where(first > 0, refine(lo_in, lo_out), lo_in)
    hi_in = grid[last]
    hi_out = grid[np.minimum(last + 1, n_grid - 1)]
    R_max = np.where(last < n_grid - 1, refine(hi_in, hi_out), hi_in)
    R_min = np.where(any_ok, R_min, np.nan)
    R_max = np.where(any_ok, R_max, np.nan)
    if np.ndim(target_phase) == 0:
        return float(R_min[0]), float(R_max[0])
    return R_min, R_max


def _capacitance(R, phi, circuit):
    """Closed form with a root-finding fallback wherever it fails."""
    C = np.atleast_1d(capacitance_for_phase_closed_form(R, phi, circuit))
    R_b, phi_b = np.broadcast_arrays(np.atleast_1d(R), np.atleast_1d(phi))
    for i in np.flatnonzero(np.isnan(C) & np.isfinite(R_b)):
        C[i] = np.nan if (c := capacitance_for_phase(R_b[i], phi_b[i], circuit)) is None else c
    return C


def _closed_form_amplitude(Z, phi, Z0):
    # |gamma| from the impedance and the known phase; the tan form is
    # multiplied through by cos(phi) so it stays finite at phi = pi/2
    # near phi = 0 or pi both terms vanish and the form is 0/0; the direct
    # modulus is used there instead
    num = Z.imag * np.cos(phi) + (Z0 - Z.real) * np.sin(phi)
    den = Z.imag * np.cos(phi) + (Z0 + Z.real) * np.sin(phi)
    direct = np.abs((Z - Z0) / (Z + Z0))
    ok = np.abs(den) > 1e-6 * (np.abs(Z) + Z0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(ok, np.sqrt(np.abs(num / den)), direct)


def amplitude_bounds_exact(target_phase, circuit, strict=True):
    """Exact amplitude interval ``[alpha_min, alpha_max]`` at a phase.

    Parameters
    ----------
    target_phase : float or ndarray
    circuit : CircuitParams
    strict : bool
        Raise :class:`InfeasiblePhaseError` for unattainable phases;
        otherwise return NaN there.

    Returns
    -------
    alpha_min, alpha_max : float or ndarray
    """
    scalar = np.ndim(target_phase) == 0
    phi = np.mod(np.atleast_1d(np.asarray(target_phase, dtype=float)), TWO_PI)
    R_min, R_max = (np.atleast_1d(x) for x in feasible_resistance_range(phi, circuit))
    bad = np.isnan(R_min)
    if strict and bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise InfeasiblePhaseError(f"phase {phi[i]:.6f} rad is not attainable by the unit cell", index=i)
    out = []
    for R in (R_max, R_min):
        C = _capacitance(R, phi, circuit)
        ok = np.isfinite(C)
        Z = impedance(np.where(ok, C, circuit.C_range[0]), np.where(ok, R, 0.0), circuit)
        out.append(np.where(ok, _closed_form_amplitude(Z, phi, circuit.Z0), np.nan))
    a_lo, a_hi = np.minimum(out[0], out[1]), np.maximum(out[0], out[1])
    if scalar:
        return float(a_lo[0]), float(a_hi[0])
    return a_lo, a_hi


def resistance_for_amplitude(target_phase, alpha, circuit, tol=1e-12):
    """Resistance realizing amplitude ``alpha`` at ``target_phase``.

    The amplitude is monotone in ``R`` over the feasible interval, so the
    inversion is a bisection.  Amplitudes outside the exact bounds are
    rejected with :class:`ModelInversionError`.
    """
    phi = float(np.mod(target_phase, TWO_PI))
    R_min, R_max = feasible_resistance_range(phi, circuit)
    if np.isnan(R_min):
        raise ModelInversionError(f"phase {phi:.6f} rad is not attainable")

    def amp(R):
        C = _capacitance(R, phi, circuit)[0]
        if np.isnan(C):
            raise ModelInversionError(f"no capacitance realizes phase {phi:.6f} at R={R}")
        return float(np.abs(reflection(C, R, circuit)))

    a_lo, a_hi = amp(R_min), amp(R_max)
    if R_min == R_max:
        if abs(alpha - a_lo) > 1e-9:
            raise ModelInversionError("single-resistance cell cannot change amplitude")
        return R_min
    if not min(a_lo, a_hi) - 1e-9 <= alpha <= max(a_lo, a_hi) + 1e-9:
        raise ModelInversionError(f"amplitude {alpha} outside [{min(a_lo, a_hi)}, {max(a_lo, a_hi)}] at phase {phi:.6f}")
    if abs(alpha - a_lo) <= 1e-12 * a_lo:
        return R_min
    if abs(alpha - a_hi) <= 1e-12 * a_hi:
        return R_max
    return float(optimize.brentq(lambda R: amp(R) - alpha, R_min, R_max, xtol=tol))


# envelopes


@dataclass(frozen=True)
class AmplitudeEnvelope:
    """Cosine model of the phase-amplitude coupling.

    ``alpha_min(phi) = (delta_max - delta_min)/2 (cos(phi + theta) + 1) + delta_min``
    and likewise ``alpha_max`` with ``beta``.  Both peak at ``phi = -theta``.
    """

    delta_min: float
    delta_max: float
    beta_min: float
    beta_max: float
    theta: float
    band: tuple = field(default=(0.0, TWO_PI), compare=False)

    def __post_init__(self):
        if not (self.delta_min <= self.delta_max and self.beta_min <= self.beta_max):
            raise ValueError("envelope extrema out of order")
        if self.delta_max > self.beta_max + 1e-12:
            raise ValueError("lower envelope peak exceeds the upper envelope peak")

    @classmethod
    def flat(cls, alpha_min, alpha_max):
        """Phase-independent bounds ``[alpha_min, alpha_max]``."""
        return cls(alpha_min, alpha_min, alpha_max, alpha_max, 0.0)

    def alpha_min(self, phi):
        return 0.5 * (self.delta_max - self.delta_min) * (np.cos(phi + self.theta) + 1.0) + self.delta_min

    def alpha_max(self, phi):
        return 0.5 * (self.beta_max - self.beta_min) * (np.cos(phi + self.theta) + 1.0) + self.beta_min

    def bounds(self, phi):
        return self.alpha_min(phi), self.alpha_max(phi)


@dataclass(frozen=True)
class ExactEnvelope:
    """Amplitude bounds evaluated from the circuit model itself."""

    circuit: CircuitParams

    def bounds(self, phi):
        return amplitude_bounds_exact(phi, self.circuit)

    def alpha_min(self, phi):
        return self.bounds(phi)[0]

    def alpha_max(self, phi):
        return self.bounds(phi)[1]


def _refine_peak(x, y, i):
    n = len(y)
    if i == 0 or i == n - 1:
        return x[i], y[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    den = y0 - 2.0 * y1 + y2
    if den >= 0:
        return x[i], y1
    t = 0.5 * (y0 - y2) / den
    h = x[i + 1] - x[i]
    return x[i] + t * h, y1 - 0.25 * (y0 - y2) * t


def fit_envelope(circuit, n_grid=1024, return_curves=False):
    """Fit the cosine envelope to the exact amplitude bounds.

    Extrema are taken over the band of phases at which the whole resistance
    range is feasible; outside it the lower bound degenerates.  The peak
    phase is refined by golden-section search on the exact upper bound.

    Parameters
    ----------
    circuit : CircuitParams
    n_grid : int
        Points of the uniform phase grid over [0, 2pi).
    return_curves : bool
        Also return ``(phi, alpha_min, alpha_max, full)`` on the grid, with
        ``full`` flagging the band.

    Returns
    -------
    AmplitudeEnvelope
    """
    phi = np.arange(n_grid) * TWO_PI / n_grid
    R_min, R_max = feasible_resistance_range(phi, circuit)
    r_lo, r_hi = circuit.R_range
    span = max(r_hi - r_lo, 1.0)
    full = (np.abs(R_min - r_lo) < 1e-9 * span) & (np.abs(R_max - r_hi) < 1e-9 * span)
    if not full.any():
        raise InfeasiblePhaseError("no phase is attainable across the full resistance range")
    a_min, a_max = amplitude_bounds_exact(phi, circuit, strict=False)
    # the band may wrap around 0; rotate so it is contiguous
    shift = int(np.argmin(full)) if not full.all() else 0
    order = np.roll(np.arange(n_grid), -shift)
    band = order[full[order]]
    x = np.unwrap(phi[band])
    i = int(np.argmax(a_max[band]))
    peak, _ = _refine_peak(x, a_max[band], i)
    if 0 < i < band.size - 1:
        res = optimize.minimize_scalar(
            lambda p: -amplitude_bounds_exact(p, circuit)[1],
            bracket=(x[i - 1], x[i], x[i + 1]),
            tol=1e-12,
        )
        peak = res.x
    peak = float(np.mod(peak, TWO_PI))
    d_top, b_top = amplitude_bounds_exact(peak, circuit)
    env = AmplitudeEnvelope(
        delta_min=float(np.min(a_min[band])),
        delta_max=float(max(d_top, np.max(a_min[band]))),
        beta_min=float(np.min(a_max[band])),
        beta_max=float(max(b_top, np.max(a_max[band]))),
        theta=float(np.mod(-peak, TWO_PI)),
        band=(float(np.mod(x[0], TWO_PI)), float(x[-1] - x[0])),
    )
    if return_curves:
        return env, (phi, a_min, a_max, full)
    return env


def amplitude_from_normalized(phase, alpha_bar, envelope):
    """Amplitude ``alpha_min + alpha_bar (alpha_max - alpha_min)`` at ``phase``.

    ``envelope`` is an :class:`AmplitudeEnvelope` or :class:`ExactEnvelope`.
    """
    alpha_bar = np.asarray(alpha_bar, dtype=float)
    if np.any((alpha_bar < 0) | (alpha_bar > 1)):
        raise ValueError("normalized amplitude must lie in [0, 1]")
    lo, hi = envelope.bounds(phase)
    return lo + alpha_bar * (hi - lo)
