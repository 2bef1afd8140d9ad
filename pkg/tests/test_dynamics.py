# tests/test_dynamics.py

"""
Tests for the forward-Euler integrator and the closed-form solution.
"""

import math

import numpy as np
import pytest

from ricci_mcmc.config import IntegratorConfig
from ricci_mcmc.divergence import chi_squared, divergence, kl, make_phi_alpha, reverse_kl
from ricci_mcmc.dynamics import (
    euler_step,
    exact_solution_optimal,
    exact_trajectory_optimal,
    make_observers,
    positivity_bound,
    simulate,
    write_trajectory_csv,
)
from ricci_mcmc.errors import DomainError, NumericalBlowup, StepTooLarge
from ricci_mcmc.generator import Generator, build_mh_q, build_optimal_q, optimal_c
from ricci_mcmc.simplex import RandomSource, l1_distance, sample_uniform_simplex, validate_distribution
from ricci_mcmc.util import read_csv


class TestEulerStep:
    """Test a single Euler step."""

    def test_two_state_example(self, pi2):
        p = validate_distribution([0.5, 0.5])
        g = build_optimal_q(pi2)
        out = euler_step(g, p, 0.1)
        # p + dt c (pi - p) with c = 4/3
        assert np.allclose(out.values, [0.5 + 0.1 * (4 / 3) * 0.25, 0.5 - 0.1 * (4 / 3) * 0.25], atol=1e-15)

    def test_fixed_point(self, pi3):
        out = euler_step(build_mh_q(pi3), pi3, 0.5)
        assert np.allclose(out.values, pi3.values, atol=1e-15)

    def test_zero_step(self, pi3):
        p = validate_distribution([0.2, 0.2, 0.6])
        assert euler_step(build_optimal_q(pi3), p, 0.0) == p

    def test_negative_step(self, pi3):
        with pytest.raises(DomainError):
            euler_step(build_optimal_q(pi3), pi3, -0.1)

    def test_positivity_bound(self, pi3):
        g = build_optimal_q(pi3)
        assert positivity_bound(g) == pytest.approx(1.0)
        euler_step(g, pi3, 1.0, enforce_positivity=True)
        with pytest.raises(StepTooLarge):
            euler_step(g, pi3, 1.5, enforce_positivity=True)

    def test_full_step_lands_near_target(self, pi3):
        # dt = 1/c collapses the optimal flow onto pi in one step
        p = validate_distribution([0.1, 0.1, 0.8])
        g = build_optimal_q(pi3)
        out = euler_step(g, p, 1.0 / optimal_c(pi3))
        assert np.allclose(out.values, pi3.values, atol=1e-14)


class TestSimulate:
    """Test the integration loop."""

    def test_mass_and_positivity(self):
        gen = RandomSource(4).generator()
        for kind in (build_optimal_q, build_mh_q):
            pi = sample_uniform_simplex(10, gen)
            p0 = sample_uniform_simplex(10, gen)
            traj = simulate(kind(pi), p0, IntegratorConfig(dt=0.01, t_end=2.0))
            for state in traj.states:
                assert abs(float(np.sum(state.values)) - 1.0) < 1e-12
                assert np.all(state.values >= 0)

    def test_grid_and_record_every(self, pi3):
        p0 = validate_distribution([0.2, 0.2, 0.6])
        cfg = IntegratorConfig(dt=0.1, t_end=1.05, record_every=3)
        traj = simulate(build_optimal_q(pi3), p0, cfg, make_observers(["l1"], pi3))
        # 10.5 rounds to 10 steps: samples at 0, 3, 6, 9 and the final step
        assert np.allclose(traj.times, [0.0, 0.3, 0.6, 0.9, 1.0])
        assert len(traj.series("l1")) == 5

    def test_keep_states_false(self, pi3):
        traj = simulate(build_optimal_q(pi3), pi3, IntegratorConfig(dt=0.1, t_end=1.0), keep_states=False)
        assert traj.states == []

    def test_l1_nonincreasing(self):
        gen = RandomSource(6).generator()
        pi = sample_uniform_simplex(8, gen)
        p0 = sample_uniform_simplex(8, gen)
        for g in (build_optimal_q(pi), build_mh_q(pi)):
            l1 = simulate(g, p0, IntegratorConfig(dt=0.01, t_end=5.0), make_observers(["l1"], pi)).series("l1")
            assert np.all(np.diff(l1) <= 1e-12)

    @pytest.mark.parametrize("phi", [kl(), reverse_kl(), chi_squared(), make_phi_alpha(0.5)], ids=lambda p: p.label)
    def test_divergence_nonincreasing(self, phi):
        gen = RandomSource(7).generator()
        for n in (3, 8):
            pi = sample_uniform_simplex(n, gen)
            p0 = sample_uniform_simplex(n, gen)
            for g in (build_optimal_q(pi), build_mh_q(pi)):
                traj = simulate(g, p0, IntegratorConfig(dt=0.01, t_end=4.0))
                d = np.array([divergence(phi, p, pi) for p in traj.states])
                assert np.all(np.diff(d) <= 1e-12)
                assert d[-1] < d[0]

    @pytest.mark.slow
    def test_mass_conserved_over_long_run(self):
        n = 2000
        gen = RandomSource(9).generator()
        pi = sample_uniform_simplex(n, gen)
        p0 = sample_uniform_simplex(n, gen)
        cfg = IntegratorConfig(dt=1e-4, t_end=10.0, record_every=10**4)
        assert cfg.n_steps == 10**5
        traj = simulate(build_optimal_q(pi), p0, cfg, {"mass": lambda p: float(np.sum(p.values))}, keep_states=False)
        assert np.all(np.abs(traj.series("mass") - 1.0) <= 1e-9)

    def test_step_too_large(self, pi3):
        with pytest.raises(StepTooLarge):
            simulate(build_optimal_q(pi3), pi3, IntegratorConfig(dt=2.0, t_end=4.0))

    def test_blowup(self, pi2):
        q = np.array([[-50.0, 50.0], [150.0, -150.0]])
        g = Generator(q, pi2)
        cfg = IntegratorConfig(dt=0.1, t_end=10.0, enforce_positivity=False)
        with pytest.raises(NumericalBlowup):
            simulate(g, validate_distribution([0.5, 0.5]), cfg)


class TestExactSolution:
    """Test the closed form for the optimal generator."""

    def test_example(self, pi2):
        p0 = validate_distribution([0.5, 0.5])
        out = exact_solution_optimal(pi2, p0, 1.0)
        decay = math.exp(-4 / 3)
        assert np.allclose(out.values, [0.75 - 0.25 * decay, 0.25 + 0.25 * decay], atol=1e-15)

    def test_negative_time(self, pi2):
        with pytest.raises(DomainError):
            exact_solution_optimal(pi2, pi2, -1.0)

    def test_euler_converges_first_order(self):
        gen = RandomSource(8).generator()
        for n in (2, 10, 250):
            for _ in range(3):
                pi = sample_uniform_simplex(n, gen)
                p0 = sample_uniform_simplex(n, gen)
                g = build_optimal_q(pi)
                exact = exact_solution_optimal(pi, p0, 1.0).values
                errs = []
                for dt in (1e-3, 5e-4):
                    traj = simulate(g, p0, IntegratorConfig(dt=dt, t_end=1.0, record_every=10**6), keep_states=True)
                    errs.append(float(np.max(np.abs(traj.final.values - exact))))
                assert errs[0] <= 1e-3
                if errs[0] > 1e-13:
                    assert 1.8 <= errs[0] / errs[1] <= 2.2

    def test_chi2_decays_at_twice_c(self):
        gen = RandomSource(13).generator()
        phi = chi_squared()
        for _ in range(50):
            pi = sample_uniform_simplex(6, gen)
            p0 = sample_uniform_simplex(6, gen)
            d0 = divergence(phi, p0, pi)
            c = optimal_c(pi)
            for t in (0.5, 1.0, 2.0):
                dt = divergence(phi, exact_solution_optimal(pi, p0, t), pi)
                assert dt / d0 == pytest.approx(math.exp(-2 * c * t), rel=1e-10)

    def test_exact_trajectory(self, pi3):
        p0 = validate_distribution([0.1, 0.1, 0.8])
        traj = exact_trajectory_optimal(pi3, p0, [0.0, 1.0, 2.0], make_observers(["l1"], pi3))
        l1_0 = l1_distance(p0, pi3)
        c = optimal_c(pi3)
        assert traj.series("l1").tolist() == pytest.approx([l1_0, l1_0 * math.exp(-c), l1_0 * math.exp(-2 * c)])


class TestObservers:
    """Test observer construction and CSV export."""

    def test_unknown_name(self, pi3):
        with pytest.raises(ValueError):
            make_observers(["l2"], pi3)

    def test_all_names(self, pi3):
        obs = make_observers(["l1", "kl", "chi2", "reverse-kl"], pi3)
        for fn in obs.values():
            assert fn(pi3) == pytest.approx(0.0, abs=1e-15)

    def test_write_trajectory_csv(self, tmp_path, pi3):
        p0 = validate_distribution([0.1, 0.1, 0.8])
        traj = simulate(build_optimal_q(pi3), p0, IntegratorConfig(dt=0.1, t_end=1.0),
                        make_observers(["l1", "kl"], pi3))
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, path, {"kind": "optimal"})
        meta, cols = read_csv(path)
        assert meta == {"kind": "optimal"}
        assert list(cols) == ["t", "l1", "kl"]
        assert cols["l1"] == traj.series("l1").tolist()
