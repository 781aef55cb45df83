import numpy as np
import pytest

from beamlaser import (AtomEnsemble, AtomState, CollectiveSpin, DerivedRates,
                       NoiseSample, SimConfig, derived_rates, drift,
                       photon_number, rk4_step, run_trajectory, sample_noise)
from beamlaser.dynamics import drift_arrays, read_record, write_record

TWO_PI = 2 * np.pi
G = TWO_PI * 0.25e6
KAPPA = TWO_PI * 50e6
R0 = derived_rates(0.0, G, KAPPA)
QUIET = NoiseSample(0.0, 0.0)


def atom(sx, sy, sz, eta=1.0):
    return AtomState(eta=eta, sx=sx, sy=sy, sz=sz, doppler=0.0, t_exit=0.0)


class TestDrift:
    def test_inverted_atom_seeds_collective_decay(self):
        dsx, dsy, dsz = drift(atom(0, 0, 1), CollectiveSpin(0, 0), R0, QUIET)
        assert dsx == 0.0 and dsy == 0.0
        assert dsz == pytest.approx(-R0.gamma_c, rel=1e-12)

    def test_two_atom_symmetric_transverse_state(self):
        # Both atoms at (1, 0, 0): Jx = 2, so each atom loses inversion at
        # gamma_c and the summed inversion at 2 gamma_c.
        j = CollectiveSpin(2.0, 0.0)
        _, _, dsz = drift(atom(1, 0, 0), j, R0, QUIET)
        assert dsz == pytest.approx(-R0.gamma_c, rel=1e-12)
        total = 2 * dsz
        assert total == pytest.approx(-2 * R0.gamma_c, rel=1e-12)

    def test_no_cross_coupling_at_zero_detuning(self):
        # With gamma_delta = 0 the x equation ignores Jy and the y equation
        # ignores Jx entirely.
        for jy in (0.0, 5.0, -3.0):
            dsx, _, _ = drift(atom(0.3, -0.2, 0.5), CollectiveSpin(1.0, jy),
                              R0, QUIET)
            ref, _, _ = drift(atom(0.3, -0.2, 0.5), CollectiveSpin(1.0, 0.0),
                              R0, QUIET)
            assert dsx == ref
        for jx in (0.0, 5.0, -3.0):
            _, dsy, _ = drift(atom(0.3, -0.2, 0.5), CollectiveSpin(jx, 2.0),
                              R0, QUIET)
            _, ref, _ = drift(atom(0.3, -0.2, 0.5), CollectiveSpin(0.0, 2.0),
                              R0, QUIET)
            assert dsy == ref

    def test_dispersive_part_couples_transverse_axes(self):
        r = derived_rates(KAPPA / 4, G, KAPPA)
        dsx, _, _ = drift(atom(0.0, 0.0, 1.0), CollectiveSpin(0.0, 2.0), r, QUIET)
        assert dsx == pytest.approx(-0.5 * r.gamma_delta * 2.0, rel=1e-12)

    def test_zero_rates_freeze_everything_even_with_noise(self):
        r = DerivedRates(0.0, 0.0, R0.gamma_0)
        loud = NoiseSample(3.1e4, -2.7e4)
        d = drift(atom(0.4, -0.9, 0.2), CollectiveSpin(5.0, -4.0), r, loud)
        assert d == (0.0, 0.0, 0.0)


class TestNoise:
    def test_noise_off_is_exactly_zero(self):
        ns = sample_noise(1e-9, np.random.default_rng(0), noise_on=False)
        assert ns.xi_p == 0.0 and ns.xi_q == 0.0

    @pytest.mark.slow
    def test_variance_is_inverse_dt(self):
        dt = 2.5e-9
        rng = np.random.default_rng(1)
        draws = np.array([sample_noise(dt, rng).xi_p for _ in range(500_000)])
        assert np.var(draws) == pytest.approx(1.0 / dt, rel=0.01)

    def test_components_independent(self):
        dt = 1e-9
        rng = np.random.default_rng(2)
        samples = [sample_noise(dt, rng) for _ in range(100_000)]
        xp = np.array([s.xi_p for s in samples])
        xq = np.array([s.xi_q for s in samples])
        corr = np.corrcoef(xp, xq)[0, 1]
        assert abs(corr) < 3.0 / np.sqrt(xp.size)

    def test_invalid_dt_rejected(self):
        with pytest.raises(ValueError):
            sample_noise(0.0, np.random.default_rng(0))


class TestPhotonNumber:
    def test_zero_spin_means_zero_photons(self):
        assert photon_number(CollectiveSpin(0, 0), R0, G) == 0.0

    def test_resonant_unit_spin(self):
        # |J-|^2 = 1 at resonance gives n = gamma_0 / kappa.
        j = CollectiveSpin(2.0, 0.0)   # |J-|^2 = 1
        n = photon_number(j, R0, G)
        assert n == pytest.approx(R0.gamma_0 / KAPPA, rel=1e-12)

    def test_detuning_suppresses_photon_number(self):
        j = CollectiveSpin(4.0, 2.0)
        n0 = photon_number(j, R0, G)
        nd = photon_number(j, derived_rates(KAPPA, G, KAPPA), G)
        assert nd < n0


def _closed_single_atom_solution(s0, gamma_c, t):
    """One atom coupled to its own field at zero detuning (norm <= 1).

    sx, sy decay at gamma_c/2; the inversion obeys
    dsz/dt = -(gamma_c/2)(sx^2 + sy^2) - gamma_c sz, giving
    sz(t) = (sz0 - (gamma_c T0^2 / 2) t) exp(-gamma_c t).
    """
    sx0, sy0, sz0 = s0
    decay = np.exp(-gamma_c * t / 2)
    t0_sq = sx0**2 + sy0**2
    sz = (sz0 - 0.5 * gamma_c * t0_sq * t) * np.exp(-gamma_c * t)
    return sx0 * decay, sy0 * decay, sz


class TestRK4:
    def _frozen_ensemble(self, states):
        cfg = SimConfig()
        cfg.n_mean = max(len(states), 1)
        ens = AtomEnsemble(cfg)
        n = len(states)
        ens.tail = n
        for i, (sx, sy, sz) in enumerate(states):
            ens.sx[i], ens.sy[i], ens.sz[i] = sx, sy, sz
            ens.eta[i] = 1.0
            ens.gamma_delta[i] = 0.0
            ens.gamma_c[i] = R0.gamma_c
            ens.t_exit[i] = np.inf
        return ens

    def test_empty_ensemble_is_noop(self):
        ens = self._frozen_ensemble([])
        j = rk4_step(ens, QUIET, 1e-9, R0.gamma_0)
        assert (j.jx, j.jy) == (0.0, 0.0)

    def test_fourth_order_convergence(self):
        s0 = (0.6, 0.48, 0.64)
        horizon = 0.2 / R0.gamma_c
        errs = []
        for n_steps in (50, 100):
            ens = self._frozen_ensemble([s0])
            dt = horizon / n_steps
            for _ in range(n_steps):
                rk4_step(ens, QUIET, dt, R0.gamma_0)
            want = _closed_single_atom_solution(s0, R0.gamma_c, horizon)
            got = (ens.sx[0], ens.sy[0], ens.sz[0])
            errs.append(np.max(np.abs(np.subtract(got, want))))
        ratio = errs[0] / errs[1]
        assert 12.0 <= ratio <= 20.0

    def test_macroscopic_inversion_never_grows(self):
        ens = self._frozen_ensemble([(0.0, 0.0, 1.0)] * 64)
        dt = 0.002 / R0.gamma_c
        prev = float(np.sum(ens.sz[:64]))
        for _ in range(200):
            rk4_step(ens, QUIET, dt, R0.gamma_0)
            cur = float(np.sum(ens.sz[:64]))
            assert cur <= prev + 1e-12
            prev = cur

    def test_zero_coupling_is_stationary_despite_noise(self):
        ens = self._frozen_ensemble([(0.3, -0.5, 0.7), (-1.0, 1.0, -1.0)])
        ens.gamma_c[:2] = 0.0
        before = ens.sx[:2].copy(), ens.sy[:2].copy(), ens.sz[:2].copy()
        loud = NoiseSample(1e5, -2e5)
        for _ in range(10):
            rk4_step(ens, loud, 1e-9, R0.gamma_0)
        assert np.array_equal(ens.sx[:2], before[0])
        assert np.array_equal(ens.sy[:2], before[1])
        assert np.array_equal(ens.sz[:2], before[2])

    def test_frozen_collective_spin_option_changes_result(self):
        states = [(0.9, 0.1, 0.4), (-0.2, 0.8, -0.5)]
        a = self._frozen_ensemble(states)
        b = self._frozen_ensemble(states)
        dt = 0.05 / R0.gamma_c
        for _ in range(20):
            rk4_step(a, QUIET, dt, R0.gamma_0, paper_literal=False)
            rk4_step(b, QUIET, dt, R0.gamma_0, paper_literal=True)
        assert not np.allclose(a.sx[:2], b.sx[:2], rtol=0, atol=1e-14)
        assert np.allclose(a.sx[:2], b.sx[:2], rtol=1e-2)

    def test_nonfinite_state_raises(self):
        ens = self._frozen_ensemble([(np.nan, 0.0, 0.0)])
        with pytest.raises(RuntimeError):
            rk4_step(ens, QUIET, 1e-9, R0.gamma_0)


def quick_cfg(seed=1, t_record=5e-6, n_mean=100.0):
    cfg = SimConfig()
    cfg.n_mean = n_mean
    cfg.numerics.dt = 4e-9
    cfg.numerics.t_burn = 2e-6
    cfg.numerics.t_record = t_record
    cfg.numerics.record_every = 4
    cfg.numerics.seed = seed
    return cfg


class TestTrajectory:
    def test_empty_recording_window(self):
        rec = run_trajectory(quick_cfg(t_record=0.0))
        assert len(rec) == 0

    def test_seed_determinism_is_bit_exact(self):
        a = run_trajectory(quick_cfg(seed=3))
        b = run_trajectory(quick_cfg(seed=3))
        assert np.array_equal(a.j_plus, b.j_plus)
        assert np.array_equal(a.n_phot, b.n_phot)
        assert np.array_equal(a.t, b.t)

    def test_different_seeds_differ(self):
        a = run_trajectory(quick_cfg(seed=3))
        b = run_trajectory(quick_cfg(seed=4))
        assert not np.array_equal(a.j_plus, b.j_plus)

    def test_uniform_time_grid_and_positive_photons(self):
        cfg = quick_cfg()
        rec = run_trajectory(cfg)
        dts = np.diff(rec.t)
        assert np.allclose(dts, cfg.numerics.record_every * cfg.numerics.dt,
                           rtol=1e-9)
        assert np.all(rec.n_phot >= 0.0)
        assert rec.dt_record == pytest.approx(
            cfg.numerics.record_every * cfg.numerics.dt)

    def test_python_and_jit_engines_agree(self):
        cfg_a = quick_cfg(seed=9, t_record=2e-6)
        cfg_a.numerics.engine = "numba"
        cfg_b = quick_cfg(seed=9, t_record=2e-6)
        cfg_b.numerics.engine = "numpy"
        a = run_trajectory(cfg_a)
        b = run_trajectory(cfg_b)
        scale = np.max(np.abs(a.j_plus)) + 1e-30
        assert np.max(np.abs(a.j_plus - b.j_plus)) / scale < 1e-9

    def test_imag_term_flag_is_documented_noop(self):
        cfg_a = quick_cfg(seed=5, t_record=2e-6)
        cfg_b = quick_cfg(seed=5, t_record=2e-6)
        cfg_b.numerics.keep_imag_term = True
        a = run_trajectory(cfg_a)
        b = run_trajectory(cfg_b)
        assert np.array_equal(a.j_plus, b.j_plus)

    def test_record_roundtrip(self, tmp_path):
        rec = run_trajectory(quick_cfg(seed=6, t_record=1e-6))
        path = tmp_path / "record.tsv"
        write_record(rec, str(path))
        back = read_record(str(path))
        assert np.allclose(back.j_plus, rec.j_plus, rtol=1e-10)
        assert np.allclose(back.n_phot, rec.n_phot, rtol=1e-10)
        assert back.seed == rec.seed
        assert back.config_hash == rec.config_hash

    def test_kernel_error_flag_on_nonfinite_input(self):
        from beamlaser._engine import _kernel_chunk
        cap = 4
        ring = [np.zeros(cap) for _ in range(6)]
        exit_step = np.full(cap, 10**9, dtype=np.int64)
        scratch = [np.zeros(cap) for _ in range(12)]
        rec = [np.zeros(8) for _ in range(3)]
        head, tail, _, rec_count, err = _kernel_chunk(
            0, 2, np.array([1, 0], dtype=np.int64), np.zeros(2), np.zeros(2),
            np.array([np.nan]), np.zeros(1), np.zeros(1), np.ones(1),
            np.zeros(1), np.full(1, 1e4), np.array([5], dtype=np.int64),
            *ring, exit_step, *scratch,
            0, 0, 0, 1e-9, 1.0, False, 0, 1, 1.0, *rec)
        assert err >= 0
