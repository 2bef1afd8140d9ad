# ricci_mcmc/dynamics.py

"""
Kolmogorov forward equation dp_i/dt = sum_j (Q_ji p_j - Q_ij p_i).

- euler_step / simulate: forward Euler, the reference integrator
- exact_solution_optimal: p(t) = pi + exp(-c t)(p0 - pi), valid for build_optimal_q only
- Trajectory: recorded times, states and named observer series

p is never renormalized during integration; mass conservation comes from
the zero row sums of Q.
"""

from __future__ import annotations
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import IntegratorConfig
from .divergence import chi_squared, divergence, kl, reverse_kl
from .errors import DimensionMismatch, DomainError, NumericalBlowup, StepTooLarge
from .generator import Generator, optimal_c
from .simplex import Distribution, as_array, l1_distance
from .util import TRACE, logger, write_csv

BLOWUP_LIMIT = 10.0

Observer = Callable[[Distribution], float]


@dataclass
class Trajectory:
    """Recorded law p(t) with observer series aligned to times."""

    times: NDArray[np.float64]
    states: List[Distribution] = field(default_factory=list)
    observations: Dict[str, NDArray[np.float64]] = field(default_factory=dict)

    @property
    def final(self) -> Distribution:
        return self.states[-1]

    def series(self, name: str) -> NDArray[np.float64]:
        return self.observations[name]


def make_observers(names: Sequence[str], pi: Distribution) -> Dict[str, Observer]:
    """
    Built-in observers against the target pi: l1, kl, chi2, reverse-kl.

    Raises:
        ValueError: on an unknown name
    """
    phis = {"kl": kl(), "chi2": chi_squared(), "reverse-kl": reverse_kl()}
    out: Dict[str, Observer] = {}
    for name in names:
        if name == "l1":
            out[name] = lambda p: l1_distance(p, pi)
        elif name in phis:
            out[name] = (lambda phi: (lambda p: divergence(phi, p, pi)))(phis[name])
        else:
            raise ValueError(f"Unknown observer {name!r}. Allowed: l1, kl, chi2, reverse-kl")
    return out


def positivity_bound(g: Generator) -> float:
    """Largest dt for which an Euler step keeps p >= 0: 1 / max_i(-Q_ii)."""
    rate = g.max_exit_rate
    return math.inf if rate <= 0 else 1.0 / rate


def _check_step(g: Generator, dt: float, enforce_positivity: bool) -> None:
    if dt < 0 or not math.isfinite(dt):
        raise DomainError(f"dt must be finite and >= 0, got {dt!r}")
    if enforce_positivity:
        bound = positivity_bound(g)
        # a few ulps of slack so dt = 1 passes for the optimal Q
        if dt > bound * (1.0 + 1e-12):
            raise StepTooLarge(f"dt={dt!r} exceeds the positivity bound {bound!r}")


def euler_step(g: Generator, p: Union[Distribution, ArrayLike], dt: float, enforce_positivity: bool = False) -> Distribution:
    """
    One forward-Euler step p + dt (Q^T p - rowsum(Q) p).

    Raises:
        DomainError: if dt < 0
        StepTooLarge: if enforce_positivity and dt > 1 / max(-Q_ii)
        DimensionMismatch: if p does not match Q
    """
    pv = as_array(p)
    if pv.shape[0] != g.n:
        raise DimensionMismatch(f"p has {pv.shape[0]} states, Q has {g.n}")
    _check_step(g, dt, enforce_positivity)
    flux = g.q.T @ pv - g.q.sum(axis=1) * pv
    return Distribution(pv + dt * flux)


class _Recorder:
    """Accumulates samples; frozen into a Trajectory at the end."""

    def __init__(self, observers: Mapping[str, Observer], keep_states: bool):
        self.observers = observers
        self.keep_states = keep_states
        self.times: List[float] = []
        self.states: List[Distribution] = []
        self.values: Dict[str, List[float]] = {k: [] for k in observers}

    def add(self, p: Distribution, t: float) -> None:
        self.times.append(t)
        if self.keep_states:
            self.states.append(p)
        for name, fn in self.observers.items():
            self.values[name].append(fn(p))

    def trajectory(self) -> Trajectory:
        return Trajectory(
            times=np.asarray(self.times, dtype=np.float64),
            states=self.states,
            observations={k: np.asarray(v, dtype=np.float64) for k, v in self.values.items()},
        )


def simulate(
    g: Generator,
    p0: Distribution,
    cfg: IntegratorConfig,
    observers: Optional[Mapping[str, Observer]] = None,
    keep_states: bool = True,
) -> Trajectory:
    """
    Integrate the master equation with forward Euler from t = 0 to cfg.t_end.

    States are recorded every cfg.record_every steps and at the final step.

    Raises:
        StepTooLarge: if cfg.enforce_positivity and cfg.dt is above the bound
        NumericalBlowup: if some |p_i| exceeds 10
    """
    if p0.n != g.n:
        raise DimensionMismatch(f"p0 has {p0.n} states, Q has {g.n}")
    _check_step(g, cfg.dt, cfg.enforce_positivity)
    observers = dict(observers or {})
    steps = cfg.n_steps
    dt = cfg.dt

    qt = np.ascontiguousarray(g.q.T)
    rows = g.q.sum(axis=1)

    rec = _Recorder(observers, keep_states)
    p = p0.values.copy()
    rec.add(p0, 0.0)
    tracing = logger.isEnabledFor(TRACE)
    for k in range(1, steps + 1):
        p = p + dt * (qt @ p - rows * p)
        if not np.all(np.abs(p) <= BLOWUP_LIMIT):
            raise NumericalBlowup(f"|p| left [-{BLOWUP_LIMIT}, {BLOWUP_LIMIT}] at step {k}")
        if k % cfg.record_every == 0 or k == steps:
            rec.add(Distribution(p), k * dt)
        if tracing:
            logger.log(TRACE, "step %d: mass=%.17g", k, float(np.sum(p)))
    return rec.trajectory()


def exact_solution_optimal(pi: Distribution, p0: Distribution, t: float) -> Distribution:
    """
    Closed-form law under build_optimal_q(pi).

    The optimal generator reduces the master equation to dp/dt = c(pi - p).

    Raises:
        DomainError: if t < 0
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    if p0.n != pi.n:
        raise DimensionMismatch(f"p0 has {p0.n} states, pi has {pi.n}")
    decay = math.exp(-optimal_c(pi) * t)
    return Distribution(pi.values + decay * (p0.values - pi.values))


def exact_trajectory_optimal(
    pi: Distribution,
    p0: Distribution,
    times: Sequence[float],
    observers: Optional[Mapping[str, Observer]] = None,
    keep_states: bool = True,
) -> Trajectory:
    """exact_solution_optimal sampled at the given times."""
    observers = dict(observers or {})
    rec = _Recorder(observers, keep_states)
    for t in times:
        rec.add(exact_solution_optimal(pi, p0, float(t)), float(t))
    return rec.trajectory()


def write_trajectory_csv(
    traj: Trajectory, path: Union[str, Path], metadata: Optional[Mapping[str, Any]] = None
) -> None:
    """
    Header t,<observer names...>, one row per recorded time.

    Raises:
        IoError: if the file cannot be written
    """
    names = list(traj.observations)
    rows = (
        [float(t)] + [float(traj.observations[n][i]) for n in names]
        for i, t in enumerate(traj.times)
    )
    write_csv(path, ["t"] + names, rows, metadata)
