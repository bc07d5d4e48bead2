"""Genetic algorithm and particle swarm baselines over the circuit parameters.

Both search directly over the physical variables: the resistance of every
active element, the capacitance of every element and the precoder.  The
reflection vector then follows from the circuit itself, so no envelope
model is involved.  The precoder is always scaled to full transmit power
and the receiver is LMMSE.  Budget violations are penalized with weight
``1e3`` per watt and repaired at the end by pulling the resistances
towards the low-power end of their range.

Both restart from fresh random points (keeping the incumbent) once the
best fitness has not improved for ``restart_after`` generations, so that
with an unbounded budget the whole box keeps being explored.
"""

from dataclasses import dataclass

import numpy as np

from ..reflection import RISConfig
from ..td_unitcell import amplitude_bounds_exact, reflection
from .ao import AOState
from .power import element_powers_from_m, m_from_resistances
from .system import lmmse_combiner, rate_lmmse, rate_with_combiner

__all__ = ["CircuitProblem", "ga_solve", "pso_solve"]

PENALTY = 1e3


@dataclass
class CircuitProblem:
    """Box-constrained encoding ``x = [R_active, C, Re V, Im V]``."""

    scenario: object
    channels: object

    def __post_init__(self):
        s = self.scenario
        self.active = s.active_mask
        self.na = int(self.active.sum())
        self.nv = s.M_T * s.d
        r_lo, r_hi = s.circuit.R_range
        c_lo, c_hi = s.circuit.C_range
        self.lower = np.concatenate([np.full(self.na, r_lo), np.full(s.N, c_lo), -np.ones(2 * self.nv)])
        self.upper = np.concatenate([np.full(self.na, r_hi), np.full(s.N, c_hi), np.ones(2 * self.nv)])
        self.count = 0

    @property
    def dim(self):
        return self.lower.size

    def decode(self, x):
        s = self.scenario
        R_act = x[: self.na]
        C = x[self.na : self.na + s.N]
        v = x[self.na + s.N :]
        V = (v[: self.nv] + 1j * v[self.nv :]).reshape(s.M_T, s.d)
        norm = np.linalg.norm(V)
        V = V * np.sqrt(s.P_T) / norm if norm > 0 else np.sqrt(s.P_T / s.d) * np.eye(s.M_T, s.d)
        R = np.full(s.N, s.passive_R)
        R[self.active] = R_act
        return R, C, V

    def gamma(self, R, C):
        s = self.scenario
        g = np.empty(s.N, complex)
        g[self.active] = reflection(C[self.active], R[self.active], s.circuit)
        g[~self.active] = reflection(C[~self.active], R[~self.active], s.passive_circuit)
        return g

    def power(self, R):
        s = self.scenario
        m = m_from_resistances(R[self.active], s.R0, s.V0)
        return float(np.sum(element_powers_from_m(m, s.R0, s.V0)))

    def fitness(self, x):
        self.count += 1
        s = self.scenario
        R, C, V = self.decode(x)
        rate = rate_lmmse(V, self.gamma(R, C), self.channels, s.sigma2, s.F_r, s.F_s, self.active.astype(float))
        return rate - PENALTY * max(self.power(R) - s.P_RIS, 0.0)

    def repair(self, x):
        """Scale the active resistances towards the low-power end until the budget holds."""
        s = self.scenario
        x = x.copy()
        R, _, _ = self.decode(x)
        if self.power(R) <= s.P_RIS:
            return x
        r_hi = s.circuit.R_range[1]
        R_act = x[: self.na].copy()
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            R[self.active] = r_hi + mid * (R_act - r_hi)
            lo, hi = (mid, hi) if self.power(R) <= s.P_RIS else (lo, mid)
        x[: self.na] = r_hi + lo * (R_act - r_hi)
        return x

    def to_state(self, x, evaluations):
        s = self.scenario
        R, C, V = self.decode(x)
        gamma = self.gamma(R, C)
        phases = np.mod(np.angle(gamma), 2.0 * np.pi)
        ab = np.zeros(s.N)
        for circuit, mask in ((s.circuit, self.active), (s.passive_circuit, ~self.active)):
            if mask.any():
                lo, hi = amplitude_bounds_exact(phases[mask], circuit, strict=False)
                with np.errstate(invalid="ignore", divide="ignore"):
                    ab[mask] = np.nan_to_num(np.clip((np.abs(gamma[mask]) - lo) / (hi - lo), 0.0, 1.0))
        mask = self.active.astype(float)
        W = lmmse_combiner(V, gamma, self.channels, s.sigma2, s.F_r, s.F_s, mask)
        rate = rate_with_combiner(V, W, gamma, self.channels, s.sigma2, s.F_r, s.F_s, mask)
        return AOState(
            V=V,
            config=RISConfig(phases, ab),
            W=W,
            rate_trace=[rate],
            evaluations=evaluations,
            rate=rate,
            gamma=gamma,
            resistance=R,
            capacitance=C,
        )


def _population_size(budget, dim):
    return int(max(4, min(20, budget // 4, 4 + 3 * np.log(dim))))


def _improved(new, old):
    return new > old + 1e-12 * max(abs(old), 1.0)


def ga_solve(scenario, channels, budget, rng, pop_size=None, crossover=0.9, eta_mut=0.1, restart_after=25):
    """Real-coded genetic algorithm with a fixed evaluation budget.

    Tournament selection, blend crossover (BLX-0.5), Gaussian mutation
    with per-gene probability ``1/dim`` and one elite.

    Parameters
    ----------
    budget : int
        Number of fitness evaluations.
    rng : numpy.random.Generator
    restart_after : int
        Generations without improvement before the non-elite population
        is redrawn.

    Returns
    -------
    AOState
    """
    prob = CircuitProblem(scenario, channels)
    lo, hi = prob.lower, prob.upper
    width = hi - lo
    n = pop_size or _population_size(budget, prob.dim)
    pop = lo + rng.random((n, prob.dim)) * width
    fit = np.array([prob.fitness(x) for x in pop])
    best, stall = fit.max(), 0
    while prob.count + n - 1 <= budget:
        if stall >= restart_after:
            k = int(np.argmax(fit))
            pop[0], fit[0] = pop[k].copy(), fit[k]
            pop[1:] = lo + rng.random((n - 1, prob.dim)) * width
            fit[1:] = [prob.fitness(x) for x in pop[1:]]
            stall = 0
            if prob.count + n - 1 > budget:
                break
        elite = pop[np.argmax(fit)].copy()
        children = [elite]
        while len(children) < n:
            i, j = rng.integers(n, size=2), rng.integers(n, size=2)
            a = pop[i[np.argmax(fit[i])]]
            b = pop[j[np.argmax(fit[j])]]
            if rng.random() < crossover:
                u = rng.uniform(-0.5, 1.5, prob.dim)
                c = a + u * (b - a)
            else:
                c = a.copy()
            mut = rng.random(prob.dim) < 1.0 / prob.dim
            c = c + mut * rng.standard_normal(prob.dim) * eta_mut * width
            children.append(np.clip(c, lo, hi))
        new = np.array(children)
        new_fit = np.concatenate([[fit.max()], [prob.fitness(x) for x in new[1:]]])
        pop, fit = new, new_fit
        stall = 0 if _improved(fit.max(), best) else stall + 1
        best = max(best, fit.max())
    best = prob.repair(pop[np.argmax(fit)])
    return prob.to_state(best, prob.count)


def pso_solve(scenario, channels, budget, rng, swarm=None, inertia=0.72, c1=1.49, c2=1.49, vmax=0.2, restart_after=25):
    """Global-best particle swarm with a fixed evaluation budget.

    Parameters
    ----------
    budget : int
        Number of fitness evaluations.
    rng : numpy.random.Generator
    vmax : float
        Velocity limit as a fraction of each variable's range.
    restart_after : int
        Iterations without improvement of the global best before every
        other particle is redrawn.

    Returns
    -------
    AOState
    """
    prob = CircuitProblem(scenario, channels)
    lo, hi = prob.lower, prob.upper
    width = hi - lo
    n = swarm or _population_size(budget, prob.dim)
    x = lo + rng.random((n, prob.dim)) * width
    v = (rng.random((n, prob.dim)) - 0.5) * vmax * width
    fit = np.array([prob.fitness(p) for p in x])
    pbest, pfit = x.copy(), fit.copy()
    g = int(np.argmax(pfit))
    best, stall = pfit[g], 0
    while prob.count + n <= budget:
        if stall >= restart_after:
            others = np.arange(n) != g
            k = int(others.sum())
            x[others] = lo + rng.random((k, prob.dim)) * width
            v[others] = (rng.random((k, prob.dim)) - 0.5) * vmax * width
            if prob.count + k + n > budget:
                break
            pbest[others] = x[others]
            pfit[others] = [prob.fitness(p) for p in x[others]]
            g = int(np.argmax(pfit))
            stall = 0
        r1, r2 = rng.random((n, prob.dim)), rng.random((n, prob.dim))
        v = inertia * v + c1 * r1 * (pbest - x) + c2 * r2 * (pbest[g] - x)
        v = np.clip(v, -vmax * width, vmax * width)
        x = np.clip(x + v, lo, hi)
        fit = np.array([prob.fitness(p) for p in x])
        better = fit > pfit
        pbest[better], pfit[better] = x[better], fit[better]
        g = int(np.argmax(pfit))
        stall = 0 if _improved(pfit[g], best) else stall + 1
        best = max(best, pfit[g])
    best = prob.repair(pbest[g])
    return prob.to_state(best, prob.count)
