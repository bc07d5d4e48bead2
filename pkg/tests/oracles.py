"""Independent reference computations shared by several test modules."""

import numpy as np

from activeris.mimo_ao.model import surface_model
from activeris.mimo_ao.power import PowerChain
from activeris.mimo_ao.system import MimoChannels, MimoScenario, noise_covariance, transmit_power_for_rho


def single_stream_rate(channels, gamma, scenario, mask):
    """``log2(1 + P_T lambda_max(H^H R_n^-1 H))``, the best rate of one stream."""
    s = scenario
    H = channels.H_d + (channels.H2 * gamma) @ channels.H1
    Rn = noise_covariance(gamma, channels, s.sigma2, s.F_r, s.F_s, mask)
    M = H.conj().T @ np.linalg.solve(Rn, H)
    return float(np.log2(1.0 + s.P_T * np.max(np.linalg.eigvalsh(0.5 * (M + M.conj().T)))))


def capacity(H, Rn, P_T, d):
    """Water-filling capacity in bits, with the water level found by bisection."""
    M = H.conj().T @ np.linalg.solve(Rn, H)
    g = np.sort(np.linalg.eigvalsh(0.5 * (M + M.conj().T)))[::-1][:d]
    g = g[g > 0]
    lo, hi = 0.0, P_T + np.sum(1.0 / g)
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        lo, hi = (mu, hi) if np.sum(np.maximum(mu - 1.0 / g, 0.0)) < P_T else (lo, mu)
    p = np.maximum(mu - 1.0 / g, 0.0)
    return float(np.sum(np.log2(1.0 + p * g)))


def toy_scenario(N, M, rho_db=0.0, budget_fraction=0.5):
    """Small single-stream scenario with a binding RIS budget."""
    s = MimoScenario(M_T=M, M_R=M, d=1, N=N)
    p_min = 0.1**2 * (4.0 / 3.0) ** (2.0 / 3.0)
    p_max = 0.04
    s = s.with_(P_RIS=N * (p_min + budget_fraction * (p_max - p_min)))
    return s.with_(P_T=transmit_power_for_rho(10 ** (rho_db / 10), s))


def grid_oracle(scenario, channels, n_phase=16, n_amp=8, max_sweeps=20):
    """Coordinate-wise exhaustive search over a per-element phase x amplitude grid.

    Phases are spread over each element's allowed band.  With one element
    this is a plain exhaustive search.

    Returns
    -------
    best : float
        Surrogate single-stream rate.
    phases, alpha_bar : ndarray
    """
    model = surface_model(scenario)
    mask = model.active.astype(float)
    N = model.n
    ab_grid = np.linspace(0.0, 1.0, n_amp)
    ph_grid = [model.band_lo[n] + np.linspace(0.0, model.band_span[n], n_phase) for n in range(N)]
    # element powers are separable: tabulate P_n(phase, alpha_bar) once
    chain = model.power.chain
    table = []
    for n in range(N):
        if model.active[n]:
            P, A = np.meshgrid(ph_grid[n], ab_grid, indexing="ij")
            sub = PowerChain(chain.circuit, np.ones(P.size, bool), chain.V0, chain.R0, band=chain.band)
            table.append(sub.element_powers(P.ravel(), A.ravel()).reshape(P.shape))
        else:
            table.append(np.zeros((n_phase, n_amp)))
    idx_p = np.zeros(N, int)
    idx_a = np.zeros(N, int)

    def value(ip, ia):
        if sum(table[n][ip[n], ia[n]] for n in range(N)) > model.budget * (1 + 1e-9):
            return -np.inf
        ph = np.array([ph_grid[n][ip[n]] for n in range(N)])
        return single_stream_rate(channels, model.gamma(ph, ab_grid[ia]), scenario, mask)

    best = value(idx_p, idx_a)
    for _ in range(max_sweeps):
        improved = False
        for n in range(N):
            for i in range(n_phase):
                for j in range(n_amp):
                    ip, ia = idx_p.copy(), idx_a.copy()
                    ip[n], ia[n] = i, j
                    v = value(ip, ia)
                    if v > best + 1e-12:
                        best, idx_p, idx_a, improved = v, ip, ia, True
        if not improved:
            break
    phases = np.array([ph_grid[n][idx_p[n]] for n in range(N)])
    return best, phases, ab_grid[idx_a]


def zero_channels(scenario):
    s = scenario
    return MimoChannels(np.zeros((s.M_R, s.M_T), complex), np.zeros((s.N, s.M_T), complex), np.zeros((s.M_R, s.N), complex))
