from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import lambertw

from activeris.errors import (
    InfeasiblePhaseError,
    InfeasibleResistanceError,
    InstabilityError,
    PeakSingularityError,
    ResonanceSingularityError,
)
from activeris.td_unitcell import (
    AmplitudeEnvelope,
    CircuitParams,
    ExactEnvelope,
    TunnelDiodeModel,
    amplitude_bounds_exact,
    amplitude_from_normalized,
    attainable_phase_arc,
    capacitance_for_phase,
    capacitance_for_phase_closed_form,
    differential_resistance,
    element_power,
    feasible_resistance_range,
    fit_envelope,
    impedance,
    is_stable,
    m_from_resistance,
    reflection,
    reflection_coefficient,
    resistance_for_amplitude,
    stable_resistance,
    tunneling_current,
    tunneling_current_peak_model,
)

CIRCUIT = CircuitParams()
PASSIVE = CircuitParams.passive(1.5)


@pytest.fixture(scope="module")
def fitted():
    return fit_envelope(CIRCUIT, return_curves=True)


class TestImpedance:
    def test_open_branch_limit(self):
        np.testing.assert_allclose(impedance(2e-12, 1e15, CIRCUIT), 1j * CIRCUIT.omega * CIRCUIT.L1, rtol=1e-9)

    def test_rational_oracle(self):
        # exact rational evaluation with j handled as a pair of fractions
        w, L1, L2, C, R = (Fraction(CIRCUIT.omega), Fraction(4.5e-9), Fraction(0.7e-9), Fraction(2e-12), Fraction(1))
        xl1 = w * L1
        xb = w * L2 - 1 / (w * C)
        # Z = j xl1 (R + j xb) / (R + j (xl1 + xb))
        num_re, num_im = -xl1 * xb, xl1 * R
        den_re, den_im = R, xl1 + xb
        mag = den_re**2 + den_im**2
        z_re = (num_re * den_re + num_im * den_im) / mag
        z_im = (num_im * den_re - num_re * den_im) / mag
        z = impedance(2e-12, 1.0, CIRCUIT)
        np.testing.assert_allclose([z.real, z.imag], [float(z_re), float(z_im)], rtol=1e-10)

    def test_series_resonance_shorts(self):
        w = CIRCUIT.omega
        C = 1 / (w**2 * CIRCUIT.L2)
        assert abs(impedance(C, 0.0, CIRCUIT)) < 1e-9

    def test_parallel_resonance_raises(self):
        w = CIRCUIT.omega
        C = 1 / (w**2 * (CIRCUIT.L1 + CIRCUIT.L2))
        with pytest.raises(ResonanceSingularityError):
            impedance(C, 0.0, CIRCUIT)


class TestReflection:
    def test_matched(self):
        assert reflection_coefficient(377.0, 377.0).alpha == 0

    def test_short(self):
        r = reflection_coefficient(0.0, 377.0)
        assert r.alpha == 1
        np.testing.assert_allclose(r.phase, np.pi)

    def test_unbounded(self):
        with pytest.raises(InstabilityError):
            reflection_coefficient(-377.0, 377.0)

    def test_peak_amplification(self):
        C = np.linspace(0.85e-12, 6.25e-12, 200_001)
        peak = np.max(np.abs(reflection(C, -7.39, CIRCUIT)))
        np.testing.assert_allclose(peak, 4.3, atol=0.1)

    def test_passive_attenuates(self):
        C = np.linspace(0.85e-12, 6.25e-12, 1001)
        assert np.all(np.abs(reflection(C, 1.5, CIRCUIT)) <= 1)

    def test_high_gain_violates_stability_criterion(self):
        C = capacitance_for_phase(-7.39, np.radians(339.59), CIRCUIT)
        assert not is_stable(C, -7.39, CIRCUIT)
        assert capacitance_for_phase(-7.39, np.radians(339.59), CIRCUIT, stable_only=True) is None
        assert is_stable(2e-12, 1.5, CIRCUIT)


class TestDiode:
    def test_peak_model(self):
        assert tunneling_current_peak_model(0.2, 3e-3, 0.2) == pytest.approx(3e-3, rel=1e-15)
        assert tunneling_current_peak_model(0.0, 3e-3, 0.2) == 0
        h = 1e-6
        slope = (tunneling_current_peak_model(0.2 + h, 3e-3, 0.2) - tunneling_current_peak_model(0.2 - h, 3e-3, 0.2)) / (2 * h)
        assert abs(slope) < 1e-6

    def test_generalized_current(self):
        td = TunnelDiodeModel(0.1, 1.0, 1.0)
        assert tunneling_current(0.0, td) == 0
        np.testing.assert_allclose(tunneling_current(0.1, td), 0.1 / np.e, rtol=1e-15)
        np.testing.assert_allclose(tunneling_current(0.1, td), 0.03679, atol=1e-5)
        np.testing.assert_allclose(tunneling_current(1e-9, td) / 1e-9, 1 / td.R0, rtol=1e-6)

    def test_ohmic_limit(self):
        np.testing.assert_allclose(differential_resistance(1e-9, TunnelDiodeModel(0.2, 2.0, 2.0)), 2.0, rtol=1e-12)

    def test_matches_numerical_derivative(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            td = TunnelDiodeModel(rng.uniform(0.1, 0.5), rng.uniform(0.5, 2), rng.uniform(1, 3))
            V = td.V0 * rng.uniform(0.1, 1.8)
            if abs(1 - td.m * (V / td.V0) ** td.m) < 0.05:
                continue
            h = 1e-7 * td.V0
            dI = (tunneling_current(V + h, td) - tunneling_current(V - h, td)) / (2 * h)
            np.testing.assert_allclose(differential_resistance(V, td), 1 / dI, rtol=1e-6)

    def test_sign_flip(self):
        td = TunnelDiodeModel(0.1, 1.0, 2.0)
        threshold = td.V0 * (1 / td.m) ** (1 / td.m)
        assert differential_resistance(threshold * 0.99, td) > 0
        assert differential_resistance(threshold * 1.01, td) < 0
        with pytest.raises(PeakSingularityError):
            differential_resistance(threshold, td)

    def test_stable_points(self):
        np.testing.assert_allclose(stable_resistance(TunnelDiodeModel(m=1))[0], -np.e**2, rtol=1e-15)
        np.testing.assert_allclose(stable_resistance(TunnelDiodeModel(m=1))[0], -7.389, atol=1e-3)
        np.testing.assert_allclose(stable_resistance(TunnelDiodeModel(m=3))[0], -1.265, atol=1e-3)

    @pytest.mark.parametrize("m", [1.0, 1.7, 2.4, 3.0])
    def test_stable_point_is_extremum(self, m):
        td = TunnelDiodeModel(0.1, 1.0, m)
        R_sp, V_r = stable_resistance(td)
        h = 1e-7
        dR = (differential_resistance(V_r + h, td) - differential_resistance(V_r - h, td)) / (2 * h)
        assert abs(dR) < 1e-6 * abs(R_sp) / V_r
        np.testing.assert_allclose(differential_resistance(V_r, td), R_sp, rtol=1e-13)
        # |R| is smallest at V_r inside the negative region
        assert abs(differential_resistance(V_r * 1.01, td)) > abs(R_sp)
        assert abs(differential_resistance(V_r * 0.99, td)) > abs(R_sp)

    def test_element_power(self):
        np.testing.assert_allclose(element_power(TunnelDiodeModel(0.1, 1.0, 1.0)), 0.04, rtol=1e-14)
        np.testing.assert_allclose(element_power(TunnelDiodeModel(0.1, 1.0, 3.0)), 0.01211, atol=1e-5)

    @pytest.mark.parametrize("m", [1.0, 2.0, 3.0])
    def test_element_power_versus_bias_product(self, m):
        # the closed form omits the exp(-(V_r/V0)^m) factor of I(V_r) V_r
        td = TunnelDiodeModel(0.1, 1.0, m)
        _, V_r = stable_resistance(td)
        product = tunneling_current(V_r, td) * V_r
        np.testing.assert_allclose(product / element_power(td), np.exp(-(1 / m + 1)), rtol=1e-12)

    def test_power_decreasing_in_m(self):
        p = [element_power(TunnelDiodeModel(0.1, 1.0, m)) for m in np.linspace(1, 3, 50)]
        assert np.all(np.diff(p) < 0)


class TestInversion:
    def test_endpoints(self):
        np.testing.assert_allclose(m_from_resistance(-np.e**2), 1.0, atol=1e-8)
        np.testing.assert_allclose(m_from_resistance(-7.389), 1.0, atol=1e-4)
        np.testing.assert_allclose(m_from_resistance(-np.exp(4 / 3) / 3), 3.0, atol=1e-6)

    @given(st.floats(1.0, 3.0))
    def test_round_trip(self, m):
        R = stable_resistance(TunnelDiodeModel(m=m))[0]
        m_back = m_from_resistance(R)
        np.testing.assert_allclose(stable_resistance(TunnelDiodeModel(m=m_back))[0], R, atol=1e-10)

    @given(st.floats(1.0, 3.0))
    def test_lambert_oracle(self, m):
        R = stable_resistance(TunnelDiodeModel(m=m))[0]
        # |R| = e^(1/m) e / m  =>  1/m = W(|R|/e)
        expected = 1 / lambertw(abs(R) / np.e).real
        np.testing.assert_allclose(m_from_resistance(R), expected, rtol=1e-9)

    @pytest.mark.parametrize("R", [-8.0, -1.0, 0.5])
    def test_out_of_range(self, R):
        with pytest.raises(InfeasibleResistanceError):
            m_from_resistance(R)


class TestCapacitance:
    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            C = rng.uniform(*CIRCUIT.C_range)
            R = rng.uniform(*CIRCUIT.R_range)
            phase = np.angle(reflection(C, R, CIRCUIT))
            C_back = capacitance_for_phase(R, phase, CIRCUIT)
            np.testing.assert_allclose(C_back, C, rtol=1e-12)
            assert abs(np.angle(reflection(C_back, R, CIRCUIT) * np.exp(-1j * phase))) < 1e-9

    def test_closed_form_matches_root_finding(self):
        rng = np.random.default_rng(2)
        R = rng.uniform(*CIRCUIT.R_range, 300)
        phase = rng.uniform(0, 2 * np.pi, 300)
        closed = capacitance_for_phase_closed_form(R, phase, CIRCUIT)
        for r, p, c in zip(R, phase, closed):
            ref = capacitance_for_phase(r, p, CIRCUIT)
            if ref is None:
                assert np.isnan(c)
            else:
                np.testing.assert_allclose(c, ref, rtol=1e-9)

    def test_outside_arc_infeasible(self):
        start, sweep = attainable_phase_arc(-7.39, CIRCUIT)
        outside = start + sweep / 2 + np.pi
        grid = np.linspace(*CIRCUIT.C_range, 100_001)
        err = np.angle(reflection(grid, -7.39, CIRCUIT) * np.exp(-1j * outside))
        assert np.min(np.abs(err)) > 1e-3
        assert capacitance_for_phase(-7.39, outside, CIRCUIT) is None

    def test_peak_phase_feasible_for_both_endpoints(self):
        peak = np.radians(339.59)
        for R in CIRCUIT.R_range:
            assert capacitance_for_phase(R, peak, CIRCUIT) is not None


class TestFeasibleRange:
    def test_center_full(self):
        lo, hi = feasible_resistance_range(np.radians(300), CIRCUIT)
        np.testing.assert_allclose([lo, hi], CIRCUIT.R_range, atol=1e-9)

    def test_shrinks_at_extreme_phase(self):
        center = feasible_resistance_range(np.radians(300), CIRCUIT)
        start, sweep = attainable_phase_arc(-7.39, CIRCUIT)
        edge = start + sweep - 1e-3 * np.sign(sweep)
        lo, hi = feasible_resistance_range(edge, CIRCUIT)
        assert center[0] <= lo and hi <= center[1]
        assert (hi - lo) < (center[1] - center[0])

    def test_empty(self):
        lo, hi = feasible_resistance_range(np.radians(90), CIRCUIT)
        assert np.isnan(lo) and np.isnan(hi)

    def test_grid_oracle(self):
        phase = np.radians(190.0)
        lo, hi = feasible_resistance_range(phase, CIRCUIT)
        Rg = np.linspace(*CIRCUIT.R_range, 400)
        ok = np.array([capacitance_for_phase(r, phase, CIRCUIT) is not None for r in Rg])
        assert ok.any()
        assert Rg[ok].min() >= lo - 1e-6 and Rg[ok].max() <= hi + 1e-6
        assert Rg[ok].min() - lo < Rg[1] - Rg[0] and hi - Rg[ok].max() < Rg[1] - Rg[0]


class TestAmplitudeBounds:
    def test_matches_direct_evaluation(self):
        phase = np.arange(512) * 2 * np.pi / 512
        a_lo, a_hi = amplitude_bounds_exact(phase, CIRCUIT, strict=False)
        R_min, R_max = feasible_resistance_range(phase, CIRCUIT)
        for i in np.flatnonzero(np.isfinite(a_lo)):
            direct = [abs(reflection(capacitance_for_phase(R, phase[i], CIRCUIT), R, CIRCUIT)) for R in (R_min[i], R_max[i])]
            np.testing.assert_allclose([a_lo[i], a_hi[i]], sorted(direct), rtol=1e-9)
        assert np.isfinite(a_lo).sum() > 200

    def test_lower_bound_from_smaller_magnitude(self):
        phi = np.radians(300)
        a_lo, _ = amplitude_bounds_exact(phi, CIRCUIT)
        C = capacitance_for_phase(-1.26, phi, CIRCUIT)
        np.testing.assert_allclose(a_lo, abs(reflection(C, -1.26, CIRCUIT)), rtol=1e-10)

    def test_peak(self, fitted):
        _, (phi, _, a_hi, _) = fitted
        np.testing.assert_allclose(np.nanmax(a_hi), 4.3, atol=0.1)

    def test_passive_limit(self):
        _, a_hi = amplitude_bounds_exact(np.arange(1024) * 2 * np.pi / 1024, PASSIVE, strict=False)
        assert np.nanmax(a_hi) <= 1.0

    def test_periodic(self):
        phi = np.radians([200.0, 250.0, 300.0, 350.0])
        a = np.array(amplitude_bounds_exact(phi, CIRCUIT))
        b = np.array(amplitude_bounds_exact(phi + 2 * np.pi, CIRCUIT))
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_infeasible_raises(self):
        with pytest.raises(InfeasiblePhaseError):
            amplitude_bounds_exact(np.radians([300.0, 90.0]), CIRCUIT)

    def test_finite_at_quarter_turn(self):
        # no tan(phi) singularity at phi = 3 pi / 2
        a_lo, a_hi = amplitude_bounds_exact(1.5 * np.pi, CIRCUIT)
        assert np.isfinite(a_lo) and np.isfinite(a_hi) and a_lo < a_hi

    def test_amplitude_inversion(self):
        phi = np.radians(320)
        a_lo, a_hi = amplitude_bounds_exact(phi, CIRCUIT)
        for a in np.linspace(a_lo, a_hi, 7):
            R = resistance_for_amplitude(phi, a, CIRCUIT)
            C = capacitance_for_phase(R, phi, CIRCUIT)
            np.testing.assert_allclose(abs(reflection(C, R, CIRCUIT)), a, rtol=1e-9)


class TestEnvelope:
    def test_ordering(self, fitted):
        env, _ = fitted
        assert env.delta_min <= env.delta_max <= env.beta_max
        assert env.beta_min <= env.beta_max

    def test_exact_at_peak(self, fitted):
        env, _ = fitted
        peak = -env.theta
        lo, hi = amplitude_bounds_exact(peak, CIRCUIT)
        np.testing.assert_allclose(env.alpha_min(peak), lo, atol=1e-6)
        np.testing.assert_allclose(env.alpha_max(peak), hi, atol=1e-6)
        np.testing.assert_allclose(np.degrees(np.mod(peak, 2 * np.pi)), 339.59, atol=0.01)

    def test_lower_fit_tighter(self, fitted):
        env, (phi, a_lo, a_hi, band) = fitted
        err_lo = np.max(np.abs(env.alpha_min(phi[band]) - a_lo[band]))
        err_hi = np.max(np.abs(env.alpha_max(phi[band]) - a_hi[band]))
        assert err_lo < err_hi

    def test_passive_envelope(self):
        env = fit_envelope(PASSIVE)
        assert env.beta_max <= 1.0
        np.testing.assert_allclose(env.delta_max, env.beta_max)

    def test_flat(self):
        env = AmplitudeEnvelope.flat(0.5, 2.0)
        np.testing.assert_allclose(env.bounds(np.linspace(0, 7, 9)), [[0.5] * 9, [2.0] * 9])

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            AmplitudeEnvelope(2.0, 1.0, 3.0, 4.0, 0.0)


class TestNormalized:
    @pytest.mark.parametrize("env", [AmplitudeEnvelope(1.0, 1.2, 1.05, 4.3, 0.35), ExactEnvelope(CIRCUIT)])
    def test_interpolation(self, env):
        phi = np.radians(310.0)
        lo, hi = env.bounds(phi)
        assert amplitude_from_normalized(phi, 0.0, env) == lo
        assert amplitude_from_normalized(phi, 1.0, env) == hi
        np.testing.assert_allclose(amplitude_from_normalized(phi, 0.5, env), 0.5 * (lo + hi), rtol=1e-15)

    def test_range_checked(self):
        with pytest.raises(ValueError):
            amplitude_from_normalized(0.0, 1.5, AmplitudeEnvelope.flat(0, 1))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.85e-12, 6.25e-12), st.floats(-7.39, -1.26))
def test_amplitude_grows_with_resistance_magnitude(C, R):
    phase = np.angle(reflection(C, R, CIRCUIT))
    R2 = R - 0.1
    if R2 < -7.39:
        return
    C2 = capacitance_for_phase(R2, phase, CIRCUIT)
    if C2 is None:
        return
    assert abs(reflection(C2, R2, CIRCUIT)) > abs(reflection(C, R, CIRCUIT))
