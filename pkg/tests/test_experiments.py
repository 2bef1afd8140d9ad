# tests/test_experiments.py

"""
Tests for the averaged convergence benchmark and its CSV output.
"""

import numpy as np
import pytest

from ricci_mcmc.config import ExperimentConfig
from ricci_mcmc.errors import IoError
from ricci_mcmc.experiments import read_result_csv, run_experiment, write_result_csv


def small_config(**overrides):
    base = dict(n=6, K=4, dt=0.01, T=1.0, seed=3)
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRunExperiment:
    """Test run_experiment on small instances."""

    def test_shapes(self):
        res = run_experiment(small_config())
        assert len(res.times) == 101
        assert res.times[0] == 0.0
        assert res.times[-1] == pytest.approx(1.0)
        for gen in ("optimal", "mh"):
            assert res.mean_series[gen]["l1"].shape == (101,)
        assert res.per_realization_seeds == [(3, 1), (3, 2), (3, 3), (3, 4)]
        assert res.metadata["sampling"] == "uniform-simplex"

    def test_start_at_target(self):
        res = run_experiment(small_config(start_at_target=True))
        for gen in ("optimal", "mh"):
            assert np.max(res.mean_series[gen]["l1"]) <= 1e-12

    def test_l1_decreases(self):
        res = run_experiment(small_config())
        for gen in ("optimal", "mh"):
            assert np.all(np.diff(res.mean_series[gen]["l1"]) <= 1e-12)

    def test_optimal_beats_mh(self):
        res = run_experiment(small_config(n=20, K=5, T=2.0))
        assert res.mean_series["optimal"]["l1"][-1] < res.mean_series["mh"]["l1"][-1]

    def test_exact_oracle(self):
        res = run_experiment(small_config(with_exact=True))
        euler = res.mean_series["optimal"]["l1"]
        assert res.exact_optimal_l1[0] == pytest.approx(euler[0], rel=1e-12)
        # first-order Euler error, about c^2 dt t / 2 relative
        assert np.allclose(euler, res.exact_optimal_l1, rtol=2e-2)

    def test_deterministic(self):
        a = run_experiment(small_config())
        b = run_experiment(small_config())
        assert np.array_equal(a.mean_series["mh"]["l1"], b.mean_series["mh"]["l1"])

    def test_workers_do_not_change_result(self):
        serial = run_experiment(small_config(K=6))
        threaded = run_experiment(small_config(K=6, workers=3))
        for gen in ("optimal", "mh"):
            assert np.array_equal(serial.mean_series[gen]["l1"], threaded.mean_series[gen]["l1"])
        assert serial.per_realization_seeds == threaded.per_realization_seeds

    def test_fixed_pi(self):
        res = run_experiment(small_config(fixed_pi=True, start_at_target=True))
        assert res.metadata["fixed_pi"] is True
        assert np.max(res.mean_series["optimal"]["l1"]) <= 1e-12

    def test_extra_observers(self):
        res = run_experiment(small_config(observers=("kl", "chi2")))
        assert set(res.mean_series["optimal"]) == {"l1", "kl", "chi2"}
        assert np.all(res.mean_series["optimal"]["kl"] >= -1e-15)

    def test_single_generator(self):
        res = run_experiment(small_config(generators=("mh",)))
        assert list(res.mean_series) == ["mh"]


class TestResultCSV:
    """Test write_result_csv and read_result_csv."""

    def test_header_and_metadata(self, tmp_path):
        res = run_experiment(small_config(K=2, T=0.5))
        path = tmp_path / "result.csv"
        write_result_csv(res, path)
        meta, cols = read_result_csv(path)
        assert list(cols) == ["t", "optimal_l1", "mh_l1"]
        assert meta["n"] == "6"
        assert meta["K"] == "2"
        assert cols["mh_l1"] == res.mean_series["mh"]["l1"].tolist()

    def test_column_order_with_extras(self, tmp_path):
        res = run_experiment(small_config(K=2, T=0.5, observers=("kl",), with_exact=True))
        path = tmp_path / "result.csv"
        write_result_csv(res, path)
        _, cols = read_result_csv(path)
        assert list(cols) == ["t", "optimal_l1", "mh_l1", "optimal_kl", "mh_kl", "optimal_exact_l1"]

    def test_single_step_horizon(self, tmp_path):
        res = run_experiment(ExperimentConfig(n=3, K=2, dt=0.1, T=0.1))
        path = tmp_path / "short.csv"
        write_result_csv(res, path)
        _, cols = read_result_csv(path)
        assert cols["t"] == [0.0, 0.1]

    def test_byte_identical_reruns(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            write_result_csv(run_experiment(small_config(K=3, workers=2)), path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_missing_directory(self, tmp_path):
        res = run_experiment(small_config(K=1, T=0.1))
        with pytest.raises(IoError):
            write_result_csv(res, tmp_path / "missing" / "result.csv")


@pytest.mark.slow
class TestFullBenchmark:
    """The published setup: n = 250, K = 100, dt = 0.01, T = 10."""

    def test_full_run(self, tmp_path):
        res = run_experiment(ExperimentConfig(with_exact=True, workers=4))
        opt = res.mean_series["optimal"]["l1"]
        mh = res.mean_series["mh"]["l1"]
        assert len(res.times) == 1001
        assert np.all(opt[1:] < mh[1:])
        # Euler drift from the closed form stays within 3 dt c t relative, c close to 1 here
        exact = res.exact_optimal_l1
        assert np.all(np.abs(opt - exact) <= 3 * 0.01 * 1.05 * res.times * exact + 1e-15)
        write_result_csv(res, tmp_path / "full.csv")
