import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from activeris.errors import InfeasiblePhaseError
from activeris.reflection import (
    EnvelopeVectors,
    RISConfig,
    approximate_amplitude,
    assemble_gamma,
    exact_gamma,
    hybrid_envelope,
    selection_product,
)
from activeris.td_unitcell import AmplitudeEnvelope, CircuitParams, fit_envelope, reflection

CIRCUIT = CircuitParams()
ENV = AmplitudeEnvelope(1.0069, 1.2384, 1.0419, 4.3281, 0.3562)


def selection_tensor_dense(n):
    """Reference stack of D_i, shape (n*n, n)."""
    D = np.zeros((n * n, n))
    for i in range(n):
        block = np.zeros((n, n))
        block[i, i] = 1.0
        D[:, i] = block.ravel()
    return D


def dense_gamma(config, env):
    """Direct transcription of the matrix form, for small N."""
    n = len(config)
    e = EnvelopeVectors.broadcast(env, n)
    phi = config.phi
    y = e.delta_max - e.delta_min
    x = e.beta_max - e.beta_min - y
    Z2 = np.diag(0.25 * np.exp(1j * e.theta) * (y + x * config.alpha_bar))
    Z1 = np.diag(0.5 * y + e.delta_min + (0.5 * x + e.beta_min - e.delta_min) * config.alpha_bar)
    z = 0.25 * np.exp(-1j * e.theta) * (y + x * config.alpha_bar)
    return Z2 @ selection_tensor_dense(n).T @ np.kron(phi, phi) + Z1 @ phi + z


@pytest.fixture(scope="module")
def fitted_env():
    return fit_envelope(CIRCUIT)


class TestSelection:
    def test_identity(self):
        rng = np.random.default_rng(0)
        D = selection_tensor_dense(6)
        for _ in range(1000):
            phi = np.exp(2j * np.pi * rng.random(6))
            np.testing.assert_allclose(D.T @ np.kron(phi, phi), selection_product(phi), atol=1e-12)

    def test_dense_form_matches(self):
        rng = np.random.default_rng(1)
        cfg = RISConfig(rng.uniform(0, 2 * np.pi, 5), rng.random(5))
        np.testing.assert_allclose(assemble_gamma(cfg, ENV), dense_gamma(cfg, ENV), atol=1e-12)


class TestAssemble:
    @given(st.floats(0, 2 * np.pi), st.floats(0, 1))
    def test_scalar_identity(self, phase, a):
        cfg = RISConfig([phase], [a])
        lo, hi = ENV.bounds(phase)
        expected = (lo + a * (hi - lo)) * np.exp(1j * phase)
        np.testing.assert_allclose(assemble_gamma(cfg, ENV), [expected], atol=1e-12)

    def test_lower_envelope(self):
        phases = np.linspace(0, 2 * np.pi, 50, endpoint=False)
        g = assemble_gamma(RISConfig(phases, np.zeros(50)), ENV)
        np.testing.assert_allclose(np.abs(g), ENV.alpha_min(phases), atol=1e-12)

    def test_upper_envelope(self):
        phases = np.linspace(0, 2 * np.pi, 50, endpoint=False)
        g = assemble_gamma(RISConfig(phases, np.ones(50)), ENV)
        np.testing.assert_allclose(np.abs(g), ENV.alpha_max(phases), atol=1e-12)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1))
    def test_linear_in_amplitude(self, seed):
        rng = np.random.default_rng(seed)
        phases = rng.uniform(0, 2 * np.pi, 8)
        a1 = rng.random(8) * 0.5
        a2 = rng.random(8) * 0.5
        g = lambda a: assemble_gamma(RISConfig(phases, a), ENV)
        np.testing.assert_allclose(g(a1) + g(a2) - g(np.zeros(8)), g(a1 + a2), atol=1e-12)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1))
    def test_bounded(self, seed):
        rng = np.random.default_rng(seed)
        cfg = RISConfig(rng.uniform(0, 2 * np.pi, 16), rng.random(16))
        mag = np.abs(assemble_gamma(cfg, ENV))
        assert np.all(mag <= ENV.beta_max + 1e-12)
        assert np.all(mag >= ENV.delta_min - 1e-12)

    def test_per_element_envelopes(self):
        passive = AmplitudeEnvelope(0.775, 0.99, 0.775, 0.99, 3.13)
        env = hybrid_envelope(ENV, passive, 6, 2)
        cfg = RISConfig(np.full(6, 5.9), np.full(6, 0.5))
        g = assemble_gamma(cfg, env)
        np.testing.assert_allclose(np.abs(g[:2]), approximate_amplitude(RISConfig(np.full(2, 5.9), np.full(2, 0.5)), ENV))
        assert np.all(np.abs(g[2:]) < 1)

    def test_hybrid_permutation(self):
        passive = AmplitudeEnvelope.flat(0.5, 0.9)
        env = hybrid_envelope(ENV, passive, 4, 1, order=np.array([3, 0, 1, 2]))
        assert env.beta_max[3] == ENV.beta_max
        assert np.all(env.beta_max[:3] == 0.9)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RISConfig([0.0, 1.0], [0.5])
        with pytest.raises(ValueError):
            RISConfig([0.0], [1.5])


class TestExact:
    def test_close_to_approximation(self, fitted_env):
        rng = np.random.default_rng(3)
        lo, span = fitted_env.band
        phases = lo + rng.random((100, 8)) * span
        for row in phases:
            cfg = RISConfig(row, rng.random(8))
            diff = np.abs(exact_gamma(cfg, CIRCUIT) - assemble_gamma(cfg, fitted_env))
            assert np.all(diff <= 0.61)

    def test_passive_cell(self):
        passive = CircuitParams.passive(1.5)
        env = fit_envelope(passive)
        lo, span = env.band
        cfg = RISConfig(lo + np.linspace(0, span, 32), np.random.default_rng(0).random(32))
        assert np.all(np.abs(exact_gamma(cfg, passive)) <= 1.0)

    def test_matched_load_reflects_nothing(self):
        a = CIRCUIT.omega * CIRCUIT.L1
        Z0 = CIRCUIT.Z0
        R = Z0 * a * a / (a * a + Z0 * Z0)
        X = -a * Z0 * Z0 / (a * a + Z0 * Z0)
        C = 1 / (CIRCUIT.omega * (CIRCUIT.omega * CIRCUIT.L2 - X))
        assert CIRCUIT.C_range[0] < C < CIRCUIT.C_range[1]
        assert abs(reflection(C, R, CIRCUIT)) < 1e-12

    def test_infeasible_names_element(self):
        cfg = RISConfig([np.radians(300), np.radians(300), np.radians(90)], [0.1, 0.2, 0.3])
        with pytest.raises(InfeasiblePhaseError) as info:
            exact_gamma(cfg, CIRCUIT)
        assert info.value.index == 2

    def test_per_element_circuits(self):
        passive = CircuitParams.passive(1.5)
        cfg = RISConfig(np.radians([300.0, 300.0]), [1.0, 1.0])
        g = exact_gamma(cfg, [CIRCUIT, passive])
        assert abs(g[0]) > 1 > abs(g[1])
