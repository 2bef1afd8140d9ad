# ricci_mcmc/generator.py

"""
Reversible Q-matrices on a complete graph.

Builders:
- build_optimal_q       Q_ij = c*pi_j (j != i), Q_ii = -c(1 - pi_i), c = 1/(1 - min pi)
- build_optimal_weights omega*_ij = c*pi_i*pi_j, omega*_ii = (1 - c)pi_i + c*pi_i^2
- build_q_from_weights  Q_ij = omega_ij / pi_i, Q_ii = -sum_{k != i} omega_ik / pi_i
- build_mh_q            Q_ij = min(1, pi_j / pi_i) / (n - 1)

A Generator carries the pi it is claimed to be stationary for, so reversibility
checks never need to re-derive it.
"""

from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, DomainError
from .simplex import Distribution
from .util import logger, write_csv

ROW_SUM_TOL = 1e-12
BALANCE_TOL = 1e-12


def _frozen(a: ArrayLike) -> NDArray[np.float64]:
    arr = np.array(a, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric nonnegative edge weights with row sums equal to pi."""

    omega: NDArray[np.float64]
    pi: Distribution

    def __post_init__(self) -> None:
        w = np.asarray(self.omega, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] != self.pi.n:
            raise DimensionMismatch(f"omega of shape {w.shape} does not match {self.pi.n} states")
        object.__setattr__(self, "omega", _frozen(0.5 * (w + w.T)))

    @property
    def n(self) -> int:
        return self.pi.n

    def edges(self):
        """Pairs (i, j), i < j, with omega_ij > 0."""
        iu, ju = np.triu_indices(self.n, k=1)
        mask = self.omega[iu, ju] > 0
        return list(zip(iu[mask].tolist(), ju[mask].tolist()))


@dataclass(frozen=True)
class Generator:
    """Q-matrix together with its claimed stationary distribution."""

    q: NDArray[np.float64]
    pi: Distribution
    kind: str = "custom"

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] != self.pi.n:
            raise DimensionMismatch(f"Q of shape {q.shape} does not match {self.pi.n} states")
        object.__setattr__(self, "q", _frozen(q))

    @property
    def n(self) -> int:
        return self.pi.n

    @property
    def max_exit_rate(self) -> float:
        return float(np.max(-np.diag(self.q)))


def validate_weight_matrix(w: WeightMatrix, tol: float = ROW_SUM_TOL) -> None:
    """
    Raises:
        DomainError: on a negative entry or a row sum away from pi
    """
    if np.any(w.omega < 0):
        i, j = np.argwhere(w.omega < 0)[0]
        raise DomainError(f"omega[{i},{j}] = {w.omega[i, j]!r} is negative")
    resid = np.abs(w.omega.sum(axis=1) - w.pi.values)
    if np.max(resid) > tol:
        i = int(np.argmax(resid))
        raise DomainError(f"row {i} of omega sums to {w.omega[i].sum()!r}, expected pi_{i}={w.pi.values[i]!r}")


def validate_generator(g: Generator, tol: float = ROW_SUM_TOL) -> None:
    """
    Raises:
        DomainError: on a negative off-diagonal rate, a nonzero row sum or broken detailed balance
    """
    off = g.q - np.diag(np.diag(g.q))
    if np.any(off < 0):
        i, j = np.argwhere(off < 0)[0]
        raise DomainError(f"Q[{i},{j}] = {g.q[i, j]!r} is a negative jump rate")
    rows = np.abs(g.q.sum(axis=1))
    if np.max(rows) > tol:
        raise DomainError(f"row {int(np.argmax(rows))} of Q sums to {float(np.max(rows))!r}, not 0")
    resid = check_detailed_balance(g)
    if resid > tol:
        raise DomainError(f"detailed balance residual {resid!r} exceeds {tol:g}")


def optimal_c(pi: Distribution) -> float:
    """c = 1 / (1 - min_k pi_k)."""
    return 1.0 / (1.0 - float(np.min(pi.values)))


def build_optimal_q(pi: Distribution) -> Generator:
    """
    The rank-one generator c(1 pi^T - I).

    Example:
        >>> build_optimal_q(validate_distribution([0.75, 0.25])).q.tolist()
        [[-0.3333333333333333, 0.3333333333333333], [1.0, -1.0]]
    """
    p = pi.values
    c = optimal_c(pi)
    q = np.tile(c * p, (pi.n, 1))
    np.fill_diagonal(q, -c * (1.0 - p))
    logger.debug("optimal Q built: n=%d c=%.17g", pi.n, c)
    return Generator(q, pi, kind="optimal")


def build_optimal_weights(pi: Distribution) -> WeightMatrix:
    p = pi.values
    c = optimal_c(pi)
    w = c * np.outer(p, p)
    # (1 - c)pi_i + c pi_i^2 is exactly 0 at argmin pi; clip the rounding below it
    np.fill_diagonal(w, np.maximum((1.0 - c) * p + c * p * p, 0.0))
    return WeightMatrix(w, pi)


def build_q_from_weights(w: WeightMatrix) -> Generator:
    p = w.pi.values
    q = w.omega / p[:, None]
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return Generator(q, w.pi, kind="weights")


def build_mh_q(pi: Distribution) -> Generator:
    """Metropolis-Hastings generator with the uniform proposal over the other n - 1 states."""
    p = pi.values
    n = pi.n
    q = np.minimum(1.0, p[None, :] / p[:, None]) / (n - 1)
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return Generator(q, pi, kind="mh")


def build_generator(kind: str, pi: Distribution) -> Generator:
    """Dispatch on "optimal" | "mh"."""
    if kind == "optimal":
        return build_optimal_q(pi)
    if kind == "mh":
        return build_mh_q(pi)
    raise ValueError(f"Unknown generator kind {kind!r}. Allowed: optimal, mh")


def check_detailed_balance(g: Generator) -> float:
    """max_{i,j} |Q_ij pi_i - Q_ji pi_j|."""
    flux = g.pi.values[:, None] * g.q
    return float(np.max(np.abs(flux - flux.T)))


def stationarity_residual(g: Generator) -> float:
    """max_i |sum_j (Q_ji pi_j - Q_ij pi_i)|, i.e. how far pi is from a fixed point of the master equation."""
    p = g.pi.values
    drift = g.q.T @ p - g.q.sum(axis=1) * p
    return float(np.max(np.abs(drift)))


def weights_from_generator(g: Generator, tol: float = 1e-10) -> WeightMatrix:
    """
    Recover omega from a reversible generator: omega_ij = pi_i Q_ij, omega_ii = pi_i + pi_i Q_ii.

    Raises:
        DomainError: if g is not reversible w.r.t. its pi or a self-loop weight would be negative
    """
    resid = check_detailed_balance(g)
    if resid > tol:
        raise DomainError(f"Q is not reversible for its pi (residual {resid!r})")
    p = g.pi.values
    w = p[:, None] * g.q
    diag = p + p * np.diag(g.q)
    if np.any(diag < -tol):
        i = int(np.argmin(diag))
        raise DomainError(f"exit rate of state {i} exceeds 1; self-loop weight {diag[i]!r} < 0")
    np.fill_diagonal(w, np.maximum(diag, 0.0))
    return WeightMatrix(w, g.pi)


def optimal_q_spectrum(pi: Distribution) -> NDArray[np.float64]:
    """
    Eigenvalues of build_optimal_q(pi), ascending.

    Q = c(1 pi^T - I) has eigenvalue 0 on the constant vector and -c on every
    vector orthogonal to pi, so the result is (-c, ..., -c, 0) up to rounding.
    """
    g = build_optimal_q(pi)
    ev = np.linalg.eigvals(g.q)
    return np.sort(ev.real)


def write_matrix_csv(
    matrix: ArrayLike,
    path: Union[str, Path],
    metadata: Optional[Mapping[str, Any]] = None,
) -> None:
    """
    Row-major CSV, one matrix row per line, header s0,s1,...

    Raises:
        IoError: if the file cannot be written
    """
    m = np.asarray(matrix, dtype=np.float64)
    header = [f"s{j}" for j in range(m.shape[1])]
    write_csv(path, header, m.tolist(), metadata)
