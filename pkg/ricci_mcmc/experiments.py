# ricci_mcmc/experiments.py

"""
Averaged convergence benchmark: optimal Q against Metropolis-Hastings.

For each realization k = 0..K-1, on its own random substream:
    1. draw pi(k) and p0(k) uniformly on the simplex (p0 redrawn while
       ||p0 - pi||_1 < 1e-9); with fixed_pi a single pi from stream 0 is shared
    2. build the requested generators for pi(k)
    3. Euler-integrate to T, evaluating the observers at each recorded step

Series are averaged over k in index order with math.fsum, so the output
does not depend on how realizations were scheduled across threads.
"""

from __future__ import annotations
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .config import ExperimentConfig
from .dynamics import make_observers, simulate
from .generator import build_generator, optimal_c
from .plotting import write_convergence_plot as _render_plot
from .simplex import Distribution, RandomSource, l1_distance, sample_uniform_simplex
from .util import logger, read_csv, write_csv

MIN_START_GAP = 1e-9
FIXED_PI_STREAM = 0

Series = NDArray[np.float64]


@dataclass
class ExperimentResult:
    """Mean observer series per generator, on a shared time grid."""

    config: ExperimentConfig
    times: Series
    mean_series: Dict[str, Dict[str, Series]]
    per_realization_seeds: List[Tuple[int, int]]
    exact_optimal_l1: Optional[Series] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def columns(self) -> List[Tuple[str, Series]]:
        """CSV columns after t: l1 per generator, then other observers, then the exact series."""
        cols: List[Tuple[str, Series]] = []
        for gen in self.config.generators:
            cols.append((f"{gen}_l1", self.mean_series[gen]["l1"]))
        for obs in self.config.observers:
            if obs == "l1":
                continue
            for gen in self.config.generators:
                cols.append((f"{gen}_{obs}", self.mean_series[gen][obs]))
        if self.exact_optimal_l1 is not None:
            cols.append(("optimal_exact_l1", self.exact_optimal_l1))
        return cols


@dataclass
class _Realization:
    k: int
    stream: Tuple[int, int]
    c: float
    l1_start: float
    series: Dict[str, Dict[str, Series]]


def _draw(cfg: ExperimentConfig, k: int, shared_pi: Optional[Distribution]) -> Tuple[Distribution, Distribution, Tuple[int, int]]:
    source = RandomSource(cfg.seed, k + 1)
    gen = source.generator()
    pi = shared_pi if shared_pi is not None else sample_uniform_simplex(cfg.n, gen)
    if cfg.start_at_target:
        return pi, pi, (source.seed, source.stream_id)
    p0 = sample_uniform_simplex(cfg.n, gen)
    while l1_distance(p0, pi) < MIN_START_GAP:
        p0 = sample_uniform_simplex(cfg.n, gen)
    return pi, p0, (source.seed, source.stream_id)


def _run_one(cfg: ExperimentConfig, k: int, shared_pi: Optional[Distribution]) -> _Realization:
    pi, p0, stream = _draw(cfg, k, shared_pi)
    integrator = cfg.integrator()
    observers = make_observers(cfg.observers, pi)
    series: Dict[str, Dict[str, Series]] = {}
    for kind in cfg.generators:
        traj = simulate(build_generator(kind, pi), p0, integrator, observers, keep_states=False)
        series[kind] = dict(traj.observations)
        series[kind]["__t"] = traj.times
    logger.debug("realization %d done (stream %s)", k, stream)
    return _Realization(k, stream, optimal_c(pi), l1_distance(p0, pi), series)


def _mean(rows: List[Series]) -> Series:
    stack = np.vstack(rows)
    k = stack.shape[0]
    return np.array([math.fsum(col) / k for col in stack.T])


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Run all realizations and average.

    Raises:
        ConfigError: via ExperimentConfig construction
        StepTooLarge, NumericalBlowup: from the integrator
    """
    t0 = time.time()
    logger.info("experiment: n=%d K=%d dt=%g T=%g seed=%d workers=%d",
                cfg.n, cfg.K, cfg.dt, cfg.T, cfg.seed, cfg.workers)

    shared_pi = None
    if cfg.fixed_pi:
        shared_pi = sample_uniform_simplex(cfg.n, RandomSource(cfg.seed, FIXED_PI_STREAM))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(lambda k: _run_one(cfg, k, shared_pi), range(cfg.K)))
    else:
        runs = [_run_one(cfg, k, shared_pi) for k in range(cfg.K)]
    runs.sort(key=lambda r: r.k)

    times = runs[0].series[cfg.generators[0]]["__t"]
    mean_series: Dict[str, Dict[str, Series]] = {}
    for kind in cfg.generators:
        mean_series[kind] = {
            obs: _mean([r.series[kind][obs] for r in runs]) for obs in cfg.observers
        }

    exact = None
    if cfg.with_exact:
        exact = _mean([np.exp(-r.c * times) * r.l1_start for r in runs])

    logger.info("%8f secs for %d realizations", time.time() - t0, cfg.K)
    return ExperimentResult(
        config=cfg,
        times=times,
        mean_series=mean_series,
        per_realization_seeds=[r.stream for r in runs],
        exact_optimal_l1=exact,
        metadata=cfg.metadata(),
    )


def write_result_csv(res: ExperimentResult, path: Union[str, Path]) -> None:
    """
    Header t,optimal_l1,mh_l1[,...]; metadata lines on top.

    Raises:
        IoError: if the directory is missing or the file cannot be written
    """
    cols = res.columns()
    header = ["t"] + [name for name, _ in cols]
    rows = ([float(t)] + [float(s[i]) for _, s in cols] for i, t in enumerate(res.times))
    write_csv(path, header, rows, res.metadata)


def read_result_csv(path: Union[str, Path]) -> Tuple[Dict[str, str], Dict[str, List[float]]]:
    """Parse a file written by write_result_csv into (metadata, columns)."""
    return read_csv(path)


def write_convergence_plot(res: ExperimentResult, path: Union[str, Path], log_y: Optional[bool] = None) -> None:
    """
    SVG plot of mean L1 against time, one line per generator; log_y defaults to the config flag.

    Raises:
        DomainError: if res has no l1 series
        IoError: if the file cannot be written
    """
    _render_plot(res, path, log_y=res.config.log_y if log_y is None else log_y)
