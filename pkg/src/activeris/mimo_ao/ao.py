"""Alternating optimization of precoder, RIS phases and RIS amplitudes.

Each block is an ascent step on the surrogate rate (cosine envelope), so
the rate trace is non-decreasing:

* precoder: for fixed ``gamma`` the noise covariance does not depend on
  ``V``, and eigenmode water-filling on the whitened channel attains the
  capacity, which the per-stream LMMSE rate reaches for diagonalizing
  precoders.  A weighted-MMSE iteration is available as an alternative.
* phases: Riemannian gradient ascent on the unit-modulus manifold with
  backtracking, phases confined to the band of the envelope.
* amplitudes: SCA with a linearized power constraint and a proximal term.

Reported rates are evaluated on the exact circuit model.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ActiveRISError
from ..reflection import RISConfig, gamma_coefficients
from .model import exact_amplitude_bounds, pai_surface_model, surface_model
from .system import lmmse_combiner, noise_covariance, rate_gradient, rate_lmmse, rate_with_combiner

__all__ = [
    "AOState",
    "Objective",
    "waterfilling",
    "waterfilling_precoder",
    "wmmse_precoder",
    "optimize_precoder",
    "riemannian_gradient",
    "optimize_phases",
    "optimize_amplitudes",
    "initial_state",
    "initial_states",
    "evaluate_exact",
    "ao_solve",
    "pai_solve",
]

N_ROTATIONS = 16
# surfaces this small are started from every candidate
SMALL_SURFACE = 8


@dataclass
class AOState:
    """Iterate of the alternating optimization.

    Attributes
    ----------
    V : ndarray, shape (M_T, d)
    W : ndarray or None
        LMMSE combiner, set once at the end.
    config : RISConfig
    rate_trace : list of float
        Surrogate rate after initialization and after every AO iteration.
    iteration : int
    evaluations : int
        Objective and gradient evaluations used.
    rate : float
        Rate on the exact circuit model (NaN until evaluated).
    stalled : bool
        A line search failed to improve at some point.
    gamma, resistance, capacitance : ndarray or None
        Physical reflection vector and circuit settings, when known.
    """

    V: np.ndarray
    config: RISConfig
    W: np.ndarray = None
    rate_trace: list = field(default_factory=list)
    iteration: int = 0
    evaluations: int = 0
    rate: float = float("nan")
    stalled: bool = False
    gamma: np.ndarray = None
    resistance: np.ndarray = None
    capacitance: np.ndarray = None

    @property
    def surrogate_rate(self):
        return self.rate_trace[-1] if self.rate_trace else float("nan")


class Objective:
    """Surrogate rate with evaluation counting."""

    def __init__(self, channels, scenario, model):
        self.channels = channels
        self.s = scenario
        self.model = model
        self.mask = model.active.astype(float)
        self.count = 0

    def rate_gamma(self, V, gamma):
        self.count += 1
        s = self.s
        return rate_lmmse(V, gamma, self.channels, s.sigma2, s.F_r, s.F_s, self.mask)

    def rate(self, V, phases, alpha_bar):
        return self.rate_gamma(V, self.model.gamma(phases, alpha_bar))

    def gradient_gamma(self, V, gamma):
        self.count += 1
        s = self.s
        return rate_gradient(V, gamma, self.channels, s.sigma2, s.F_r, s.F_s, self.mask)

    def noise(self, gamma):
        s = self.s
        return noise_covariance(gamma, self.channels, s.sigma2, s.F_r, s.F_s, self.mask)


# precoder


def waterfilling(gains, total):
    """Power allocation ``p_i = max(mu - 1/g_i, 0)`` with ``sum p = total``."""
    gains = np.asarray(gains, dtype=float)
    p = np.zeros_like(gains)
    pos = np.flatnonzero(gains > 0)
    if pos.size == 0 or total <= 0:
        return p
    order = pos[np.argsort(gains[pos])[::-1]]
    inv = 1.0 / gains[order]
    for k in range(order.size, 0, -1):
        mu = (total + inv[:k].sum()) / k
        if mu > inv[k - 1]:
            p[order[:k]] = mu - inv[:k]
            break
    return p


def waterfilling_precoder(H, R_n, P_T, d):
    """Capacity-achieving precoder of ``y = H x + n``, ``n ~ CN(0, R_n)``, with ``d`` streams."""
    L = np.linalg.cholesky(R_n)
    Hw = np.linalg.solve(L, H)
    _, sv, Vh = np.linalg.svd(Hw)
    gains = np.zeros(d)
    gains[: min(d, sv.size)] = sv[:d] ** 2
    p = waterfilling(gains, P_T)
    return Vh.conj().T[:, :d] * np.sqrt(p)


def _trace_scaled(A, B, P_T):
    """``(A + mu I)^-1 B`` with ``mu >= 0`` chosen so the trace power is ``P_T``."""
    lam, U = np.linalg.eigh(A)
    lam = np.maximum(lam, 0.0)
    Q = np.abs(U.conj().T @ B) ** 2
    q = Q.sum(axis=1)

    def power(mu):
        with np.errstate(divide="ignore"):
            return np.sum(q / (lam + mu) ** 2)

    if lam.min() > 1e-14 * max(lam.max(), 1e-300) and power(0.0) <= P_T:
        mu = 0.0
    else:
        lo, hi = 0.0, max(np.sqrt(q.sum() / P_T), 1e-300)
        while power(hi) > P_T:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if power(mid) > P_T else (lo, mid)
            if hi - lo <= 1e-15 * hi:
                break
        mu = hi
    return U @ ((U.conj().T @ B) / (lam + mu)[:, None])


def wmmse_precoder(H, R_n, P_T, V0, iters=100, tol=1e-10):
    """Weighted-MMSE iteration on the per-stream LMMSE rate.

    With diagonal weights ``1/MSE_i`` the iteration is a monotone ascent of
    ``sum_i log(1 + SINR_i)``; a step that does not improve is rejected.

    Returns
    -------
    V : ndarray
    rates : list of float
        Rate in nats after each accepted iterate.
    """

    def rate(V):
        J = H @ V @ (H @ V).conj().T + R_n
        B = H @ V
        ld = np.linalg.slogdet(J)[1]
        return sum(ld - np.linalg.slogdet(J - B[:, i : i + 1] @ B[:, i : i + 1].conj().T)[1] for i in range(V.shape[1]))

    V = V0
    if np.linalg.norm(V) == 0:
        V = np.sqrt(P_T / V0.shape[1]) * np.eye(*V0.shape)
    V = V * np.sqrt(P_T) / np.linalg.norm(V)
    rates = [rate(V)]
    for _ in range(iters):
        B = H @ V
        J = B @ B.conj().T + R_n
        U = np.linalg.solve(J, B)
        mse = np.real(1.0 - np.sum(U.conj() * B, axis=0))
        w = 1.0 / np.maximum(mse, 1e-300)
        HU = H.conj().T @ U
        A = (HU * w) @ HU.conj().T
        V_new = _trace_scaled(A, HU * w, P_T)
        r = rate(V_new)
        if r < rates[-1]:
            break
        V = V_new
        rates.append(r)
        if r - rates[-2] <= tol * max(abs(r), 1.0):
            break
    return V, rates


def optimize_precoder(state, channels, scenario, model=None, method="waterfilling", objective=None):
    """Precoder step for fixed RIS configuration.

    Parameters
    ----------
    state : AOState
    method : {"waterfilling", "fp"}
        Closed-form eigenmode water-filling, or the weighted-MMSE
        fractional-programming iteration.

    Returns
    -------
    ndarray
        New precoder; the incoming one is kept if it is better.
    """
    model = model if model is not None else surface_model(scenario)
    obj = objective if objective is not None else Objective(channels, scenario, model)
    gamma = model.gamma(state.config.phases, state.config.alpha_bar)
    H = channels.H_d + (channels.H2 * gamma) @ channels.H1
    R_n = obj.noise(gamma)
    if method == "waterfilling":
        V = waterfilling_precoder(H, R_n, scenario.P_T, scenario.d)
    elif method == "fp":
        V, _ = wmmse_precoder(H, R_n, scenario.P_T, state.V)
    else:
        raise ValueError(f"unknown precoder method {method!r}")
    if not np.any(V):
        return state.V
    if obj.rate_gamma(V, gamma) < obj.rate_gamma(state.V, gamma):
        return state.V
    return V


# phases


def _phase_derivative(phi, z2, z1):
    return 2.0 * z2 * phi + z1


def riemannian_gradient(V, phases, alpha_bar, objective):
    """Riemannian gradient of the surrogate rate at ``phi = exp(j phases)``.

    The Euclidean gradient in ``phi`` is ``2 G conj(2 z2 phi + z1)`` with
    ``G`` the derivative in ``conj(gamma)``; its tangent-space projection is
    ``g - Re(g conj(phi)) phi``.
    """
    model = objective.model
    phi = np.exp(1j * np.asarray(phases, dtype=float))
    z2, z1, z0 = gamma_coefficients(alpha_bar, model.envelope)
    G = objective.gradient_gamma(V, z2 * phi * phi + z1 * phi + z0)
    g = 2.0 * G * np.conj(_phase_derivative(phi, z2, z1))
    return g - np.real(g * np.conj(phi)) * phi


def _fit_budget(model, phases, alpha_bar, steps=20):
    """``alpha_bar`` scaled down just enough to meet the budget at ``phases``."""
    if model.power.total(phases, alpha_bar) <= model.budget * (1.0 + 1e-9):
        return alpha_bar
    free = model.active
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        ok = model.power.total(phases, np.where(free, mid * alpha_bar, alpha_bar)) <= model.budget
        lo, hi = (mid, hi) if ok else (lo, mid)
    return np.where(free, lo * alpha_bar, alpha_bar)


def optimize_phases(state, channels, scenario, model=None, objective=None, iters=15, max_backtrack=30, tol=1e-7):
    """Backtracking Riemannian ascent on the phases.

    Phases are retracted by normalization and clamped to the band.  Since
    the power drawn at a fixed normalized amplitude depends on the phase, a
    trial point that exceeds the budget has its active amplitudes scaled
    down until it fits.  A step is accepted only if the surrogate rate
    increases; otherwise the step halves.

    Returns
    -------
    phases, alpha_bar : ndarray
    stalled : bool
        True if the first line search could not improve.
    """
    model = model if model is not None else surface_model(scenario)
    obj = objective if objective is not None else Objective(channels, scenario, model)
    V, ab = state.V, state.config.alpha_bar
    phases = state.config.phases
    f = obj.rate(V, phases, ab)
    stalled = False
    for it in range(iters):
        xi = riemannian_gradient(V, phases, ab, obj)
        scale = np.max(np.abs(xi))
        if not scale > 0:
            break
        t = 0.5 / scale
        phi = np.exp(1j * phases)
        accepted = False
        for _ in range(max_backtrack):
            cand = phi + t * xi
            cand_phases = model.clamp(np.angle(cand / np.abs(cand)))
            cand_ab = ab
            f_new = obj.rate(V, cand_phases, ab)
            if f_new > f:
                cand_ab = _fit_budget(model, cand_phases, ab)
                if cand_ab is not ab:
                    f_new = obj.rate(V, cand_phases, cand_ab)
                if f_new > f:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            stalled = it == 0
            break
        gain = f_new - f
        phases, ab, f = cand_phases, cand_ab, f_new
        if gain <= tol * max(abs(f), 1e-12):
            break
    return phases, ab, stalled


# amplitudes


def _max_uniform(model, phases, fixed, steps=40):
    """Largest ``s`` with ``alpha_bar = s`` on active elements within budget."""

    def ab(s):
        return np.where(model.active, s, fixed)

    if model.power.total(phases, ab(1.0)) <= model.budget:
        return ab(1.0)
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if model.power.total(phases, ab(mid)) <= model.budget else (lo, mid)
    return ab(lo)


def _sca_candidate(a0, g, dp, L, slack, free):
    """Maximize ``g'D - L/2 |D|^2`` s.t. ``dp'D <= slack``, box and pinned entries."""

    def solve(mu):
        a = np.clip(a0 + (g - mu * dp) / L, 0.0, 1.0)
        return np.where(free, a, a0)

    a = solve(0.0)
    if dp @ (a - a0) <= slack:
        return a
    lo, hi = 0.0, 1.0
    while dp @ (solve(hi) - a0) > slack and hi < 1e12:
        hi *= 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if dp @ (solve(mid) - a0) > slack else (lo, mid)
    return solve(hi)


def optimize_amplitudes(state, channels, scenario, model=None, objective=None, iters=20, max_tries=30, tol=1e-7):
    """SCA on the normalized amplitudes of the active elements.

    Passive elements are pinned.  Each SCA step linearizes the rate and
    the power around the incumbent and solves the proximal subproblem in
    closed form up to a scalar multiplier; it is accepted only if the true
    rate increases and the true power is within budget.

    Raises
    ------
    InfeasibleBudgetError
        If the budget is below the minimum power of the active elements.
    """
    model = model if model is not None else surface_model(scenario)
    model.check_budget()
    obj = objective if objective is not None else Objective(channels, scenario, model)
    V, phases = state.V, state.config.phases
    a = state.config.alpha_bar.copy()
    free = model.active.copy()
    if not free.any():
        return a
    budget = model.budget
    if model.power.total(phases, a) > budget * (1.0 + 1e-9):
        a = _max_uniform(model, phases, a)
    zero = model.gamma(phases, np.zeros_like(a))
    c1 = model.gamma(phases, np.ones_like(a)) - zero
    f = obj.rate(V, phases, a)
    L = None
    for _ in range(iters):
        G = obj.gradient_gamma(V, zero + c1 * a)
        g = np.where(free, 2.0 * np.real(np.conj(G) * c1), 0.0)
        if not np.any(g):
            break
        p0 = model.power.total(phases, a)
        dp = np.where(free, model.power.gradient(phases, a), 0.0)
        L = 4.0 * np.max(np.abs(g)) if L is None else max(L / 4.0, 1e-12 * np.max(np.abs(g)))
        slack = budget - p0
        accepted = False
        for _ in range(max_tries):
            cand = _sca_candidate(a, g, dp, L, slack, free)
            if np.array_equal(cand, a):
                break
            p_new = model.power.total(phases, cand)
            if p_new > budget * (1.0 + 1e-9):
                slack -= p_new - budget + 1e-12 * budget
                continue
            f_new = obj.rate(V, phases, cand)
            if f_new > f:
                accepted = True
                break
            L *= 2.0
        if not accepted:
            break
        gain = f_new - f
        a, f = cand, f_new
        if gain <= tol * max(abs(f), 1e-12):
            break
    return a


# drivers


def _candidate_phases(channels, model, n_rot=N_ROTATIONS):
    """Starting phase vectors: the envelope peak and co-phased configurations.

    Each element's cascaded gain along the principal mode of the direct
    channel is rotated onto a common reference phase, then clamped into the
    band.  The reference is either the direct path's phase or one of
    ``n_rot`` uniform rotations.
    """
    H = channels.H_d
    if np.any(H):
        U, _, Vh = np.linalg.svd(H)
        u, v = U[:, 0], Vh[0].conj()
    else:
        U, _, Vh = np.linalg.svd(channels.H2 @ channels.H1)
        u, v = U[:, 0], Vh[0].conj()
    casc = (u.conj() @ channels.H2) * (channels.H1 @ v)
    ref = np.angle(u.conj() @ H @ v) if np.any(H) else 0.0
    out = [model.peak.copy()]
    for psi in np.concatenate([[ref], ref + 2.0 * np.pi * np.arange(1, n_rot) / n_rot]):
        out.append(model.clamp(psi - np.angle(casc)))
    return out


def initial_states(scenario, channels, model, objective, starts=1):
    """Best ``starts`` co-phased starting points at a large uniform feasible amplitude.

    Each candidate is scored with its water-filled precoder, at the uniform
    amplitude that is feasible at the envelope peak (or a coarse bisection
    of its own where that amplitude exceeds the budget).
    """
    model.check_budget()
    V0 = np.zeros((scenario.M_T, scenario.d), complex)
    zero = np.zeros(model.n)
    a_peak = _max_uniform(model, model.peak, zero)
    scored = []
    seen = set()
    for cand in _candidate_phases(channels, model):
        key = np.round(cand, 9).tobytes()
        if key in seen:
            continue
        seen.add(key)
        a = a_peak if model.power.total(cand, a_peak) <= model.budget else _max_uniform(model, cand, zero, steps=12)
        st = AOState(V=V0, config=RISConfig(cand, a))
        V = optimize_precoder(st, channels, scenario, model, objective=objective)
        scored.append((objective.rate(V, cand, a), len(scored), cand))
    scored.sort(key=lambda x: (-x[0], x[1]))
    out = []
    for _, _, phases in scored[:starts]:
        a = _max_uniform(model, phases, zero)
        state = AOState(V=V0, config=RISConfig(phases, a))
        state.V = optimize_precoder(state, channels, scenario, model, objective=objective)
        out.append(state)
    return out


def initial_state(scenario, channels, model, objective):
    """Highest-scoring starting point, see :func:`initial_states`."""
    return initial_states(scenario, channels, model, objective, 1)[0]


def evaluate_exact(state, channels, scenario, model):
    """Exact-model ``gamma``, LMMSE combiner and rate of a configuration."""
    s = scenario
    gamma = model.exact_gamma(state.config.phases, state.config.alpha_bar)
    mask = model.active.astype(float)
    W = lmmse_combiner(state.V, gamma, channels, s.sigma2, s.F_r, s.F_s, mask)
    rate = rate_with_combiner(state.V, W, gamma, channels, s.sigma2, s.F_r, s.F_s, mask)
    return gamma, W, rate


def _ascend(state, channels, scenario, model, obj, epsilon, J_alt, precoder):
    state = replace(state, rate_trace=[obj.rate(state.V, state.config.phases, state.config.alpha_bar)])
    for j in range(1, J_alt + 1):
        try:
            state.V = optimize_precoder(state, channels, scenario, model, method=precoder, objective=obj)
            phases, ab, stalled = optimize_phases(state, channels, scenario, model, objective=obj)
            state.config = RISConfig(phases, ab)
            state.stalled |= stalled
            ab = optimize_amplitudes(state, channels, scenario, model, objective=obj)
            state.config = RISConfig(phases, ab)
        except ActiveRISError as exc:
            raise type(exc)(f"AO iteration {j}: {exc}") from exc
        prev = state.rate_trace[-1]
        state.rate_trace.append(obj.rate(state.V, phases, ab))
        state.iteration = j
        if abs(state.rate_trace[-1] - prev) <= epsilon * max(abs(prev), 1e-12):
            break
    return state


def _default_starts(n, starts):
    if starts is not None:
        if starts < 1:
            raise ValueError("starts must be >= 1")
        return int(starts)
    return N_ROTATIONS + 1 if n <= SMALL_SURFACE else 1


def _run(scenario, channels, model, epsilon, J_alt, init, precoder, starts=None):
    starts = _default_starts(model.n, starts)
    obj = Objective(channels, scenario, model)
    inits = [init] if init is not None else initial_states(scenario, channels, model, obj, starts)
    best = None
    for state in inits:
        state = _ascend(state, channels, scenario, model, obj, epsilon, J_alt, precoder)
        if best is None or state.rate_trace[-1] > best.rate_trace[-1]:
            best = state
    best.evaluations = obj.count
    return best


def ao_solve(scenario, channels, epsilon=1e-3, J_alt=8, init=None, precoder="waterfilling", model=None, starts=None):
    """Alternating optimization under phase-amplitude coupling.

    Parameters
    ----------
    scenario : MimoScenario
    channels : MimoChannels
    epsilon : float
        Relative change of the rate that stops the loop.
    J_alt : int
        Maximum number of AO iterations.
    init : AOState, optional
        Warm start.
    precoder : {"waterfilling", "fp"}
    starts : int, optional
        Number of starting points (best-scored co-phased configurations);
        the run with the highest final surrogate rate is returned.  Defaults
        to every candidate for surfaces of at most ``SMALL_SURFACE``
        elements and to one otherwise.

    Returns
    -------
    AOState
        With ``W`` the LMMSE combiner and ``rate`` evaluated on the exact
        circuit model.
    """
    if J_alt < 1:
        raise ValueError("J_alt must be at least 1")
    model = model if model is not None else surface_model(scenario)
    state = _run(scenario, channels, model, epsilon, J_alt, init, precoder, starts)
    state.gamma, state.W, state.rate = evaluate_exact(state, channels, scenario, model)
    return state


def _project_to_coupled(state, scenario, pai, coupled):
    """Clamp the independent amplitudes into the exact bounds and repair power."""
    phases = state.config.phases
    env = pai.envelope
    alpha = env.alpha_min(phases) + state.config.alpha_bar * (env.alpha_max(phases) - env.alpha_min(phases))
    lo, hi = exact_amplitude_bounds(coupled, phases)
    alpha = np.clip(alpha, lo, hi)
    with np.errstate(invalid="ignore", divide="ignore"):
        ab = np.clip(np.where(hi > lo, (alpha - lo) / (hi - lo), 0.0), 0.0, 1.0)
    if coupled.power.total(phases, ab) > coupled.budget:
        s_lo, s_hi = 0.0, 1.0
        for _ in range(50):
            mid = 0.5 * (s_lo + s_hi)
            ok = coupled.power.total(phases, mid * ab) <= coupled.budget
            s_lo, s_hi = (mid, s_hi) if ok else (s_lo, mid)
        ab = s_lo * ab
    return RISConfig(phases, ab)


def pai_solve(scenario, channels, epsilon=1e-3, J_alt=8, init=None, precoder="waterfilling", starts=None):
    """Benchmark that ignores the phase-amplitude coupling.

    Active amplitudes range over the phase-independent interval
    ``[min alpha_min, max alpha_max]``.  The returned configuration is the
    optimized one projected onto the coupled model (amplitudes clamped into
    the exact bounds, power repaired by scaling), and ``rate`` is its exact
    rate.  ``rate_trace`` holds the decoupled surrogate.

    Parameters
    ----------
    init : AOState, optional
        Warm start given in coupled variables, e.g. an AO solution.
    """
    coupled = surface_model(scenario)
    pai = pai_surface_model(scenario)
    if init is not None:
        phases = init.config.phases
        alpha = coupled.envelope.alpha_min(phases) + init.config.alpha_bar * (
            coupled.envelope.alpha_max(phases) - coupled.envelope.alpha_min(phases)
        )
        lo, hi = pai.envelope.bounds(phases)
        with np.errstate(invalid="ignore", divide="ignore"):
            ab = np.clip(np.where(hi > lo, (alpha - lo) / (hi - lo), 0.0), 0.0, 1.0)
        init = replace(init, config=RISConfig(phases, ab), rate_trace=[])
    state = _run(scenario, channels, pai, epsilon, J_alt, init, precoder, starts)
    state.config = _project_to_coupled(state, scenario, pai, coupled)
    state.gamma, state.W, state.rate = evaluate_exact(state, channels, scenario, coupled)
    return state
