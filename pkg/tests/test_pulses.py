"""Loop angles, inverse-engineered amplitudes, and schedule synthesis."""

import numpy as np
import pytest

from darkpath.pulses import (GateSpec, LoopSchedule, PulseSchedule, alpha_of,
                             alpha_dot_of, beta_of, control_amplitudes,
                             inject_rabi_error, solve_duration, split_bright,
                             synthesize)

RABI = 2.0 * np.pi * 1.0e4

# frozen peak values of the unit-duration bright amplitude max|Omega| T,
# obtained from a refined grid search over the closed-form profiles
PEAK_ETA0 = np.pi ** 2
PEAK_ETA4 = 30.154284


class TestLoopAngles:
    def test_alpha_boundary_values(self):
        T = 1.7e-4
        assert alpha_of(0.0, T) == 0.0
        assert alpha_of(T, T) == pytest.approx(0.0, abs=1e-12)
        assert alpha_of(T / 2, T) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_alpha_dot_finite_difference(self):
        T = 1.0
        ts = np.linspace(0.05, 0.95, 19)
        h = 1e-7
        fd = (alpha_of(ts + h, T) - alpha_of(ts - h, T)) / (2 * h)
        assert np.abs(alpha_dot_of(ts, T) - fd).max() < 1e-6

    def test_beta_range(self):
        T, eta = 1.0, 4.0
        assert beta_of(0.0, T, eta) == 0.0
        assert beta_of(T / 2, T, eta) == pytest.approx(eta, abs=1e-12)
        assert beta_of(T, T, eta) == pytest.approx(0.0, abs=1e-12)
        assert np.all(beta_of(np.linspace(0, T, 101), T, 0.0) == 0.0)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            alpha_of(-0.1, 1.0)
        with pytest.raises(ValueError):
            alpha_of(1.1, 1.0)


class TestControlAmplitudes:
    def test_vanish_at_nodes(self):
        T = 1.0
        for eta in (0.0, 2.0, 4.0):
            for t in (0.0, T / 2, T):
                om, om2 = control_amplitudes(t, T, eta)
                assert abs(om) < 1e-9 and abs(om2) < 1e-9

    def test_antisymmetric_about_midpoint(self):
        T = 1.0
        ts = np.linspace(0.01, 0.49, 25)
        om_a, om2_a = control_amplitudes(ts, T, 4.0)
        om_b, om2_b = control_amplitudes(T - ts, T, 4.0)
        assert np.abs(om_a + om_b).max() < 1e-9
        assert np.abs(om2_a + om2_b).max() < 1e-9

    def test_matches_raw_cotangent_form(self):
        # the shipped forms come from substituting beta_dot =
        # eta sin(alpha) alpha_dot into the raw inverse-engineered pair,
        # which contains cot(alpha); away from the endpoints both agree
        T, eta = 1.0, 4.0
        ts = np.linspace(0.05, 0.95, 91)
        a = alpha_of(ts, T)
        b = beta_of(ts, T, eta)
        adot = alpha_dot_of(ts, T)
        bdot = eta * np.sin(a) * adot
        cot = np.cos(a) / np.sin(a)
        raw_om = 2.0 * (bdot * cot * np.sin(b) + adot * np.cos(b))
        raw_om2 = 2.0 * (bdot * cot * np.cos(b) - adot * np.sin(b))
        om, om2 = control_amplitudes(ts, T, eta)
        scale = np.abs(om).max()
        assert np.abs(om - raw_om).max() < 1e-8 * scale
        assert np.abs(om2 - raw_om2).max() < 1e-8 * scale

    def test_eta_zero_reduces_to_bare_loop(self):
        T = 1.0
        ts = np.linspace(0, T, 101)
        om, om2 = control_amplitudes(ts, T, 0.0)
        assert np.abs(om - 2.0 * alpha_dot_of(ts, T)).max() < 1e-12
        assert np.abs(om2).max() == 0.0

    def test_first_half_area_is_pi(self):
        # at eta = 0, int_0^{T/2} Omega dt = 2 alpha(T/2) = pi
        T = 1.0
        ts = np.linspace(0.0, T / 2, 20001)
        om, _ = control_amplitudes(ts, T, 0.0)
        area = np.trapezoid(om, ts)
        assert area == pytest.approx(np.pi, abs=1e-8)


class TestSolveDuration:
    def test_eta0_closed_form(self):
        # max of 2 alpha_dot is pi^2/T, so T = pi^2 / peak
        assert solve_duration(RABI, 0.0) == pytest.approx(PEAK_ETA0 / RABI,
                                                          rel=1e-9)

    def test_eta4_frozen_peak(self):
        assert solve_duration(RABI, 4.0) == pytest.approx(PEAK_ETA4 / RABI,
                                                          rel=1e-6)

    def test_duration_scales_inversely(self):
        assert solve_duration(2 * RABI, 4.0) == pytest.approx(
            solve_duration(RABI, 4.0) / 2.0, rel=1e-12)

    def test_per_tone_shorter_for_split_gates(self):
        full = solve_duration(RABI, 4.0)
        per = solve_duration(RABI, 4.0, per_tone=True, theta=np.pi / 2)
        assert per < full

    def test_validation(self):
        with pytest.raises(ValueError):
            solve_duration(-1.0, 4.0)
        with pytest.raises(ValueError):
            solve_duration(RABI, 4.0, n_grid=100)


def test_split_bright_tone_ratio():
    theta, phi, phi0 = 0.8, 0.3, 0.1
    om0, om1, phi1 = split_bright(2.0, theta, phi, phi0)
    assert np.hypot(om0, om1) == pytest.approx(2.0, abs=1e-12)
    assert om0 / om1 == pytest.approx(np.tan(theta / 2), abs=1e-12)
    assert phi1 == pytest.approx(phi0 - phi + np.pi, abs=1e-12)


class TestGateSpec:
    def test_requires_exactly_one_budget(self):
        with pytest.raises(ValueError):
            GateSpec(0.0, 0.0, np.pi, 4.0)
        with pytest.raises(ValueError):
            GateSpec(0.0, 0.0, np.pi, 4.0, duration=1e-4, peak_rabi=RABI)

    def test_resolve_duration_passthrough(self):
        spec = GateSpec(0.0, 0.0, np.pi, 4.0, duration=3.3e-4)
        assert spec.resolve_duration() == 3.3e-4

    def test_rejects_bad_eta(self):
        with pytest.raises(ValueError):
            GateSpec(0.0, 0.0, np.pi, -1.0, duration=1e-4)


class TestLoopSchedule:
    def test_interval_phases(self):
        loop = LoopSchedule(1e-4, 4.0, np.pi / 2, phi0=0.0)
        assert loop.interval_phases == (0.0, -np.pi / 2)

    def test_phase_jump_at_midpoint(self):
        T = 1e-4
        loop = LoopSchedule(T, 4.0, 1.0)
        assert loop.phi0_at(0.3 * T) == 0.0
        assert loop.phi0_at(T / 2) == 0.0
        assert loop.phi0_at(np.nextafter(T / 2, T)) == -1.0
        assert loop.phi0_at(T) == -1.0


@pytest.fixture(scope="module")
def schedule():
    return synthesize(GateSpec(np.pi / 2, 0.0, np.pi, 4.0, peak_rabi=RABI),
                      n_samples=1024)


class TestSynthesize:
    def test_shapes_and_duration(self, schedule):
        assert schedule.amplitudes.shape == (3, 1025)
        assert schedule.phases.shape == (3, 1025)
        assert schedule.n_samples == 1024
        assert schedule.duration == pytest.approx(PEAK_ETA4 / RABI, rel=1e-6)

    def test_peak_amplitude_hits_budget(self, schedule):
        assert schedule.peak_amplitude == pytest.approx(RABI, rel=1e-4)
        assert schedule.peak_amplitude <= RABI * (1 + 1e-9)

    def test_tone_split_ratio(self, schedule):
        interior = slice(10, 500)
        ratio = schedule.amplitudes[0, interior] / schedule.amplitudes[1, interior]
        assert np.abs(ratio - np.tan(np.pi / 4)).max() < 1e-9

    def test_phases_piecewise_constant(self, schedule):
        T = schedule.duration
        first = schedule.times <= T / 2
        assert np.all(schedule.phases[0, first] == 0.0)
        assert np.all(schedule.phases[0, ~first] == -np.pi)
        assert np.all(schedule.phases[2] == 0.0)
        # phi1 = phi0 - phi + pi with phi = 0 for this gate
        assert np.abs(schedule.phases[1] - schedule.phases[0] - np.pi).max() == 0.0

    def test_envelope_matches_samples(self, schedule):
        c = schedule.amplitudes * np.exp(-1j * schedule.phases)
        env = schedule.complex_envelopes(schedule.times)
        assert np.abs(env - c.T).max() < 1e-9 * RABI

    def test_envelope_continuous_at_midpoint(self, schedule):
        T = schedule.duration
        eps = 1e-9 * T
        left = schedule.complex_envelopes(T / 2 - eps)
        right = schedule.complex_envelopes(T / 2 + eps)
        assert np.abs(left - right).max() < 1e-4 * RABI

    def test_rejects_bad_sample_counts(self):
        spec = GateSpec(0.0, 0.0, np.pi, 0.0, peak_rabi=RABI)
        with pytest.raises(ValueError):
            synthesize(spec, n_samples=50)
        with pytest.raises(ValueError):
            synthesize(spec, n_samples=1001)


class TestPulseScheduleValidation:
    def test_rejects_nonuniform_grid(self):
        times = np.array([0.0, 1.0, 3.0])
        zeros = np.zeros((3, 3))
        with pytest.raises(ValueError):
            PulseSchedule(times, zeros, zeros)

    def test_rejects_offset_grid(self):
        times = np.array([1.0, 2.0, 3.0])
        zeros = np.zeros((3, 3))
        with pytest.raises(ValueError):
            PulseSchedule(times, zeros, zeros)

    def test_rejects_shape_mismatch(self):
        times = np.linspace(0, 1, 5)
        with pytest.raises(ValueError):
            PulseSchedule(times, np.zeros((3, 4)), np.zeros((3, 5)))

    def test_interpolated_envelope_fallback(self):
        times = np.linspace(0.0, 1.0, 11)
        amps = np.zeros((3, 11))
        amps[1] = np.sin(np.pi * times)
        phases = np.zeros((3, 11))
        sched = PulseSchedule(times, amps, phases)
        mid = sched.complex_envelopes(0.55)
        expected = (amps[1, 5] + amps[1, 6]) / 2.0
        assert mid[0, 1] == pytest.approx(expected, abs=1e-12)


class TestCsvRoundTrip:
    def test_roundtrip(self, tmp_path):
        sched = synthesize(GateSpec(np.pi / 4, 0.0, np.pi, 4.0, peak_rabi=RABI),
                           n_samples=256)
        path = tmp_path / "schedule.csv"
        sched.to_csv(path)
        back = PulseSchedule.from_csv(path)
        assert np.abs(back.times - sched.times).max() < 1e-11 * sched.duration
        assert np.abs(back.amplitudes - sched.amplitudes).max() < 1e-6
        assert np.abs(back.phases - sched.phases).max() < 1e-12

    def test_header_validated(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            PulseSchedule.from_csv(path)


class TestInjectRabiError:
    def test_scales_amplitudes(self):
        sched = synthesize(GateSpec(0.0, 0.0, np.pi, 4.0, peak_rabi=RABI),
                           n_samples=256)
        bent = inject_rabi_error(sched, 0.07)
        assert np.allclose(bent.amplitudes, 1.07 * sched.amplitudes)
        assert np.array_equal(bent.phases, sched.phases)
        t = 0.37 * sched.duration
        assert np.allclose(bent.complex_envelopes(t),
                           1.07 * sched.complex_envelopes(t))

    def test_rejects_large_epsilon(self):
        sched = synthesize(GateSpec(0.0, 0.0, np.pi, 0.0, peak_rabi=RABI),
                           n_samples=256)
        with pytest.raises(ValueError):
            inject_rabi_error(sched, 1.0)
