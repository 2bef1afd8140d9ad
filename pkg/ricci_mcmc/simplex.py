# ricci_mcmc/simplex.py

"""
Points of the open probability simplex.

A Distribution is an immutable, strictly positive probability vector on
n >= 2 states. It is used both for the target law pi and for the
time-dependent law p(t). RandomSource names a reproducible random substream
so that realization k of an experiment draws the same numbers no matter
which thread runs it.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, NonPositiveEntry, NotNormalized, TooFewStates

NORMALIZATION_TOL = 1e-12
MIN_SAMPLED_ENTRY = 1e-12


@dataclass(frozen=True)
class Distribution:
    """
    Strictly positive probability vector.

    Construct through validate_distribution() for untrusted input; the raw
    constructor only freezes the array and is meant for values the library
    produced itself (e.g. integrator iterates).
    """

    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        return f"Distribution({self.values.tolist()!r})"


@dataclass(frozen=True)
class RandomSource:
    """Reproducible random substream identified by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self) -> np.random.Generator:
        """A fresh numpy Generator positioned at the start of this substream."""
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(seq))

    def substream(self, stream_id: int) -> "RandomSource":
        return RandomSource(self.seed, stream_id)


def as_array(x: Union[Distribution, ArrayLike]) -> NDArray[np.float64]:
    if isinstance(x, Distribution):
        return x.values
    return np.asarray(x, dtype=np.float64).reshape(-1)


def validate_distribution(raw: Sequence[float], tol: float = NORMALIZATION_TOL) -> Distribution:
    """
    Validate a raw vector as a point of the open simplex.

    Args:
        raw: candidate probability masses
        tol: allowed absolute deviation of the sum from 1

    Returns:
        Distribution, renormalized by its sum (a change of at most tol)

    Raises:
        TooFewStates: if fewer than two entries are given
        NonPositiveEntry: if an entry is <= 0 or not finite
        NotNormalized: if |sum - 1| > tol

    Example:
        >>> validate_distribution([0.75, 0.25]).values.tolist()
        [0.75, 0.25]
    """
    arr = np.asarray(raw, dtype=np.float64).reshape(-1)
    if arr.shape[0] < 2:
        raise TooFewStates(f"A distribution needs at least 2 states, got {arr.shape[0]}")

    bad = np.flatnonzero(~np.isfinite(arr) | (arr <= 0))
    if bad.size:
        i = int(bad[0])
        raise NonPositiveEntry(f"Entry {i} is {arr[i]!r}; all entries must be finite and > 0")

    total = float(np.sum(arr))
    if abs(total - 1.0) > tol:
        raise NotNormalized(f"Entries sum to {total!r}, not 1 (tolerance {tol:g})")

    return Distribution(arr / total)


def sample_uniform_simplex(
    n: int, rng: Union[RandomSource, np.random.Generator]
) -> Distribution:
    """
    Draw a point uniformly from the simplex (flat Dirichlet).

    n standard exponentials normalized by their sum; draws with any entry
    below 1e-12 are rejected and redrawn from the same stream.

    Raises:
        TooFewStates: if n < 2
    """
    if n < 2:
        raise TooFewStates(f"A distribution needs at least 2 states, got {n}")
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    while True:
        e = gen.standard_exponential(n)
        x = e / np.sum(e)
        if np.min(x) >= MIN_SAMPLED_ENTRY:
            return Distribution(x)


def l1_distance(p: Union[Distribution, ArrayLike], q: Union[Distribution, ArrayLike]) -> float:
    """
    Sum of absolute differences.

    Raises:
        DimensionMismatch: if p and q have different lengths
    """
    a, b = as_array(p), as_array(q)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Cannot compare {a.shape[0]} states with {b.shape[0]} states")
    return float(np.sum(np.abs(a - b)))
