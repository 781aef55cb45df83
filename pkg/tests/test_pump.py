import numpy as np
import pytest

from beamlaser import (PumpConfig, PumpScheme, RegimeWarning, bloch_ode_oracle,
                       prep_detuned_single, prep_modulated,
                       prep_modulated_offset, sample_phase_noise)
from beamlaser.pump import rotate_xy

TWO_PI = 2 * np.pi


def cfg_single(omega=TWO_PI * 12e6, tau_p=None, delta_pa=0.0, lw=0.0):
    if tau_p is None:
        tau_p = np.pi / omega
    return PumpConfig(scheme=PumpScheme.DETUNED_SINGLE, omega=omega,
                      tau_p=tau_p, delta_pa=delta_pa, linewidth=lw)


def cfg_mod(omega=TWO_PI * 12e6, tau_p=0.0414e-6, delta_pa=TWO_PI * 2e6,
            delta=0.0, exact=True):
    scheme = PumpScheme.MODULATED_OFFSET if delta else PumpScheme.MODULATED_RESONANT
    return PumpConfig(scheme=scheme, omega=omega, tau_p=tau_p,
                      delta_pa=delta_pa, delta_offset=delta, use_exact=exact)


class TestDetunedSingle:
    def test_pi_pulse_reaches_north_pole(self):
        m = prep_detuned_single(cfg_single(), t0=0.3e-6)
        assert m.as_array() == pytest.approx([0.0, 0.0, 1.0], abs=1e-12)
        assert m.rho_ee == pytest.approx(1.0)

    def test_quarter_pulse_points_minus_y(self):
        c = cfg_single(tau_p=(np.pi / 2) / (TWO_PI * 12e6))
        m = prep_detuned_single(c, t0=0.0)
        assert m.as_array() == pytest.approx([0.0, -1.0, 0.0], abs=1e-12)

    def test_pulse_area_for_eighty_percent_excitation(self):
        # cos(Omega tau_p) = 1 - 2 rho_ee at rho_ee = 0.8 gives 0.70483 pi.
        area = float(np.arccos(1.0 - 2.0 * 0.8))
        assert area / np.pi == pytest.approx(0.7048, abs=5e-4)
        c = cfg_single(tau_p=area / (TWO_PI * 12e6))
        m = prep_detuned_single(c, t0=0.0)
        assert m.sz0 == pytest.approx(0.6, abs=1e-12)
        assert np.hypot(m.sx0, m.sy0) == pytest.approx(0.8, abs=1e-12)

    def test_warns_outside_strong_drive_regime(self):
        c = cfg_single(omega=TWO_PI * 1e6, delta_pa=TWO_PI * 0.5e6)
        with pytest.warns(RegimeWarning):
            prep_detuned_single(c, t0=0.0)

    def test_phase_encodes_arrival_time(self):
        c = cfg_single(tau_p=(np.pi / 2) / (TWO_PI * 12e6), delta_pa=TWO_PI * 1e5)
        t0 = 2.1e-6
        m = prep_detuned_single(c, t0=t0)
        phase = c.delta_pa * t0
        assert m.sx0 == pytest.approx(np.sin(phase), abs=1e-12)
        assert m.sy0 == pytest.approx(-np.cos(phase), abs=1e-12)


class TestModulated:
    def test_modulation_node_leaves_ground_state(self):
        c = cfg_mod(exact=False)
        t0 = (np.pi / 2) / c.delta_pa
        m = prep_modulated(c, t0=t0)
        assert m.as_array() == pytest.approx([0.0, 0.0, -1.0], abs=1e-9)

    def test_exact_vs_short_pulse_gap_at_reference_parameters(self):
        # Omega/2pi = 12 MHz, delta_pa/2pi = 2 MHz, tau_p = 41.4 ns:
        # the modulation phase advances 0.52 rad during the pulse, so the
        # short-pulse form overshoots the rotation angle noticeably.
        omega, delta_pa, tau_p = TWO_PI * 12e6, TWO_PI * 2e6, 0.0414e-6
        a_exact = (omega / delta_pa) * np.sin(delta_pa * tau_p)
        m_exact = prep_modulated(cfg_mod(exact=True), t0=0.0)
        m_approx = prep_modulated(cfg_mod(exact=False), t0=0.0)
        assert m_exact.sz0 == pytest.approx(-np.cos(a_exact), abs=1e-12)
        assert m_exact.sz0 == pytest.approx(0.987, abs=1e-3)
        assert m_approx.sz0 == pytest.approx(0.9998, abs=1e-4)

    def test_zero_modulation_frequency_is_resonant_pulse(self):
        c = cfg_mod(tau_p=np.pi / (TWO_PI * 12e6), delta_pa=0.0, exact=True)
        m = prep_modulated(c, t0=0.77e-6)
        assert m.as_array() == pytest.approx([0.0, 0.0, 1.0], abs=1e-12)


class TestModulatedOffset:
    def test_zero_offset_recovers_modulated(self):
        for t0 in (0.0, 0.13e-6, 2.4e-6):
            a = prep_modulated(cfg_mod(), t0=t0)
            c = cfg_mod(delta=TWO_PI * 1.0)
            c.delta_offset = 0.0
            c.scheme = PumpScheme.MODULATED_OFFSET
            b = prep_modulated_offset(c, t0=t0)
            assert b.as_array() == pytest.approx(a.as_array(), abs=1e-12)

    def test_quarter_turn_carrier_phase(self):
        c = cfg_mod(delta=TWO_PI * 0.03e6, exact=False)
        t0 = (np.pi / 2) / c.delta_offset
        # Choose omega so the short-pulse area at this t0 is exactly pi/2.
        c.omega = (np.pi / 2) / (np.cos(c.delta_pa * t0) * c.tau_p)
        m = prep_modulated_offset(c, t0=t0)
        assert m.as_array() == pytest.approx([1.0, 0.0, 0.0], abs=1e-9)


class TestPhaseNoise:
    def test_zero_linewidth_gives_zero(self):
        rng = np.random.default_rng(1)
        assert sample_phase_noise(0.0, 0.0414e-6, rng) == 0.0

    def test_standard_deviation_matches_formula(self):
        lw, tau_p = TWO_PI * 20e3, 0.0414e-6
        expected = np.sqrt(lw * tau_p)
        assert expected == pytest.approx(0.0722, abs=2e-4)
        rng = np.random.default_rng(7)
        draws = sample_phase_noise(lw, tau_p, rng, size=100_000)
        assert np.std(draws) == pytest.approx(expected, rel=0.01)
        assert np.mean(draws) == pytest.approx(0.0, abs=4 * expected / np.sqrt(1e5))

    def test_seed_determinism(self):
        a = sample_phase_noise(1.0, 1.0, np.random.default_rng(3), size=10)
        b = sample_phase_noise(1.0, 1.0, np.random.default_rng(3), size=10)
        c = sample_phase_noise(1.0, 1.0, np.random.default_rng(4), size=10)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_negative_linewidth_rejected(self):
        with pytest.raises(ValueError):
            sample_phase_noise(-1.0, 1.0, np.random.default_rng(0))


class TestOracle:
    def test_detuned_single_matches_closed_form_in_regime(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            omega = TWO_PI * rng.uniform(5e6, 20e6)
            area = rng.uniform(0.2, 0.99) * np.pi
            c = cfg_single(omega=omega, tau_p=area / omega,
                           delta_pa=omega / rng.uniform(5e3, 5e4))
            t0 = rng.uniform(0, 2 * np.pi) / c.delta_pa
            got = bloch_ode_oracle(c, t0).as_array()
            want = prep_detuned_single(c, t0).as_array()
            assert np.max(np.abs(got - want)) < 1e-3

    def test_modulated_resonant_limit_matches_rabi_solution(self):
        c = cfg_mod(tau_p=0.7 * np.pi / (TWO_PI * 12e6), delta_pa=0.0)
        m = bloch_ode_oracle(c, t0=0.9e-6)
        area = c.omega * c.tau_p
        assert m.as_array() == pytest.approx(
            [0.0, -np.sin(area), -np.cos(area)], abs=1e-9)

    def test_modulated_exact_form_is_exact(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            c = cfg_mod(omega=TWO_PI * rng.uniform(4e6, 20e6),
                        tau_p=rng.uniform(0.01e-6, 0.08e-6),
                        delta_pa=TWO_PI * rng.uniform(0.5e6, 4e6), exact=True)
            t0 = rng.uniform(0.0, 3e-6)
            got = bloch_ode_oracle(c, t0).as_array()
            want = prep_modulated(c, t0).as_array()
            assert np.max(np.abs(got - want)) < 1e-6

    def test_offset_scheme_with_zero_offset_matches_exact_modulated(self):
        c = cfg_mod(delta=TWO_PI * 10.0, exact=True)
        c.delta_offset = 0.0
        got = bloch_ode_oracle(c, t0=0.31e-6).as_array()
        want = prep_modulated(cfg_mod(exact=True), t0=0.31e-6).as_array()
        assert np.max(np.abs(got - want)) < 1e-6

    def test_oracle_preserves_norm(self):
        c = cfg_mod(delta=TWO_PI * 0.03e6)
        m = bloch_ode_oracle(c, t0=1.7e-6)
        assert np.sum(m.as_array() ** 2) == pytest.approx(1.0, abs=1e-9)

    def test_short_pulse_error_is_second_order_at_modulation_antinode(self):
        # At t0 = 0 the short-pulse area error is O((delta_pa tau_p)^2):
        # halving tau_p at fixed pulse area shrinks the gap about fourfold.
        omega1, tau1 = TWO_PI * 12e6, 0.0414e-6
        gaps = []
        for k in (1.0, 2.0):
            c_ex = cfg_mod(omega=omega1 * k, tau_p=tau1 / k, exact=True)
            c_ap = cfg_mod(omega=omega1 * k, tau_p=tau1 / k, exact=False)
            a = prep_modulated(c_ex, 0.0).as_array()
            b = prep_modulated(c_ap, 0.0).as_array()
            gaps.append(np.max(np.abs(a - b)))
        assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.35)


def test_frame_rotation_preserves_transverse_magnitude():
    rng = np.random.default_rng(11)
    for _ in range(50):
        sx, sy = rng.normal(size=2)
        theta = rng.uniform(-10, 10)
        rx, ry = rotate_xy(sx, sy, theta)
        assert np.hypot(rx, ry) == pytest.approx(np.hypot(sx, sy), rel=1e-12)


def test_prepared_states_stay_on_bloch_sphere():
    rng = np.random.default_rng(5)
    for _ in range(100):
        scheme = rng.choice(list(PumpScheme))
        c = PumpConfig(scheme=scheme, omega=TWO_PI * rng.uniform(1e6, 20e6),
                       tau_p=rng.uniform(0.005e-6, 0.1e-6),
                       delta_pa=TWO_PI * rng.uniform(0.1e6, 3e6),
                       delta_offset=TWO_PI * rng.uniform(0.0, 0.05e6),
                       use_exact=bool(rng.integers(2)))
        from beamlaser.pump import prep_mean
        m = prep_mean(c, t0=rng.uniform(0, 5e-6), phi_noise=rng.normal(0, 0.1))
        assert np.sum(m.as_array() ** 2) <= 1.0 + 1e-9
