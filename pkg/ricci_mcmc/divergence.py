# ricci_mcmc/divergence.py

"""
phi-divergences D_phi(p || pi) = sum_i phi(p_i / pi_i) * pi_i.

Supported generators phi:
- alpha family   (x^a - 1 - a(x-1)) / (a(a-1))      a not in {0, 1}
- KL             1 - x + x log x                     a = 0
- reverse KL     x - 1 - log x                       a = 1
- chi-squared    (x - 1)^2 / 2                       a = 2
- custom         any user supplied (phi, phi', phi'') triple

The labels a = 0 / a = 1 are the named kinds. Off those two points the
general formula is used, except within 1e-9 of them where the formula
loses all precision; there the continuous limit of the family is returned
(x - 1 - log x as a -> 0, 1 - x + x log x as a -> 1).
"""

from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, DomainError, NegativeInput
from .simplex import Distribution, as_array

ALPHA_SNAP = 1e-9

ScalarMap = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class PhiFunction:
    """
    A convex divergence generator with its derivatives.

    The maps act elementwise on numpy arrays. d3 is optional; the curvature
    module only needs it at coincident arguments and falls back to a finite
    difference of d2 when it is missing.
    """

    kind: str               # "kl" | "reverse-kl" | "chi2" | "alpha" | "custom"
    alpha: Optional[float]
    value: ScalarMap
    d1: ScalarMap
    d2: ScalarMap
    d3: Optional[ScalarMap] = None
    name: str = ""

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "alpha":
            return f"alpha:{self.alpha:g}"
        return self.kind


# --- the four closed-form kinds -------------------------------------------

def _kl() -> PhiFunction:
    return PhiFunction(
        kind="kl",
        alpha=0.0,
        value=lambda x: 1.0 - x + x * np.log(x),
        d1=np.log,
        d2=lambda x: 1.0 / x,
        d3=lambda x: -1.0 / (x * x),
    )


def _reverse_kl() -> PhiFunction:
    return PhiFunction(
        kind="reverse-kl",
        alpha=1.0,
        value=lambda x: x - 1.0 - np.log(x),
        d1=lambda x: 1.0 - 1.0 / x,
        d2=lambda x: 1.0 / (x * x),
        d3=lambda x: -2.0 / (x * x * x),
    )


def _chi2() -> PhiFunction:
    return PhiFunction(
        kind="chi2",
        alpha=2.0,
        value=lambda x: 0.5 * (x - 1.0) ** 2,
        d1=lambda x: x - 1.0,
        d2=lambda x: np.ones_like(x, dtype=np.float64),
        d3=lambda x: np.zeros_like(x, dtype=np.float64),
    )


def _power(a: float) -> PhiFunction:
    return PhiFunction(
        kind="alpha",
        alpha=a,
        value=lambda x: (np.power(x, a) - 1.0 - a * (x - 1.0)) / (a * (a - 1.0)),
        d1=lambda x: (np.power(x, a - 1.0) - 1.0) / (a - 1.0),
        d2=lambda x: np.power(x, a - 2.0),
        d3=lambda x: (a - 2.0) * np.power(x, a - 3.0),
    )


def make_phi_alpha(alpha: float) -> PhiFunction:
    """
    Member of the alpha-divergence family.

    Args:
        alpha: finite family parameter

    Returns:
        PhiFunction; alpha == 0 gives KL, alpha == 1 reverse KL, alpha == 2 chi-squared

    Raises:
        DomainError: if alpha is not finite
    """
    a = float(alpha)
    if not math.isfinite(a):
        raise DomainError(f"alpha must be finite, got {alpha!r}")
    if a == 0.0:
        return _kl()
    if a == 1.0:
        return _reverse_kl()
    if a == 2.0:
        return _chi2()
    # continuous limits next to the removable singularities
    if abs(a) <= ALPHA_SNAP:
        limit = _reverse_kl()
        return PhiFunction("alpha", a, limit.value, limit.d1, limit.d2, limit.d3)
    if abs(a - 1.0) <= ALPHA_SNAP:
        limit = _kl()
        return PhiFunction("alpha", a, limit.value, limit.d1, limit.d2, limit.d3)
    return _power(a)


def kl() -> PhiFunction:
    return make_phi_alpha(0.0)


def reverse_kl() -> PhiFunction:
    return make_phi_alpha(1.0)


def chi_squared() -> PhiFunction:
    return make_phi_alpha(2.0)


def custom_phi(
    name: str,
    value: ScalarMap,
    d1: ScalarMap,
    d2: ScalarMap,
    d3: Optional[ScalarMap] = None,
) -> PhiFunction:
    """Wrap a user supplied (phi, phi', phi'') triple."""
    return PhiFunction(kind="custom", alpha=None, value=value, d1=d1, d2=d2, d3=d3, name=name)


def parse_phi(text: str) -> PhiFunction:
    """
    Parse the CLI grammar alpha:<a> | kl | chi2 | rkl (also reverse-kl).

    Raises:
        ValueError: on anything else
    """
    t = text.strip().lower()
    if t == "kl":
        return kl()
    if t in ("rkl", "reverse-kl"):
        return reverse_kl()
    if t == "chi2":
        return chi_squared()
    if t.startswith("alpha:"):
        try:
            a = float(t.split(":", 1)[1])
        except ValueError as e:
            raise ValueError(f"Bad alpha in {text!r}") from e
        if not math.isfinite(a):
            raise ValueError(f"Bad alpha in {text!r}")
        return make_phi_alpha(a)
    raise ValueError(f"Unknown phi {text!r}. Expected alpha:<a> | kl | chi2 | rkl")


# --- evaluation --------------------------------------------------------------

def phi_eval(phi: PhiFunction, x: float) -> Tuple[float, float, float]:
    """
    Evaluate (phi(x), phi'(x), phi''(x)) at a positive scalar.

    Near x = 0 the analytic limit is returned when it is finite (KL gives
    phi(0+) = 1); kinds that blow up there raise DomainError.

    Raises:
        DomainError: for x <= 0 or a non-finite value
    """
    xf = float(x)
    if not (xf > 0.0) or not math.isfinite(xf):
        raise DomainError(f"phi is defined on x > 0, got {x!r}")
    arr = np.array([xf])
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        v = float(phi.value(arr)[0])
        d1 = float(phi.d1(arr)[0])
        d2 = float(phi.d2(arr)[0])
    if not math.isfinite(v):
        raise DomainError(f"{phi.label} diverges at x={xf!r}")
    return v, d1, d2


def divergence(
    phi: PhiFunction,
    p: Union[Distribution, ArrayLike],
    pi: Union[Distribution, ArrayLike],
) -> float:
    """
    D_phi(p || pi).

    Raises:
        DimensionMismatch: if p and pi differ in length
        DomainError: if some ratio p_i / pi_i makes phi infinite
    """
    pv, piv = as_array(p), as_array(pi)
    if pv.shape != piv.shape:
        raise DimensionMismatch(f"p has {pv.shape[0]} states, pi has {piv.shape[0]}")
    x = pv / piv
    if np.any(x < 0):
        raise DomainError("p has negative entries")
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        vals = phi.value(x)
    # x log x -> 0 at x = 0
    if phi.kind == "kl":
        vals = np.where(x == 0.0, 1.0, vals)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"{phi.label} divergence is infinite for this p")
    return float(np.dot(vals, piv))


def pinsker_l1_bound(kl_value: float) -> float:
    """
    Pinsker: ||p - pi||_1 <= sqrt(2 * KL(p || pi)).

    Raises:
        NegativeInput: if kl_value < 0
    """
    if kl_value < 0:
        raise NegativeInput(f"KL value must be >= 0, got {kl_value!r}")
    return math.sqrt(2.0 * kl_value)


def mobility_ratio(phi: PhiFunction, u: ArrayLike, v: ArrayLike, rel_tol: float = 1e-9) -> NDArray[np.float64]:
    """
    (u - v) / (phi'(u) - phi'(v)) elementwise.

    Pairs with |phi'(u) - phi'(v)| <= rel_tol * max(|phi'(u)|, |phi'(v)|) are
    taken as coincident: the difference has lost its digits there, and
    Simpson's rule for the integral of phi'' over [v, u] is used instead,
    6 / (phi''(u) + 4 phi''((u + v) / 2) + phi''(v)). At u = v that is the
    limit 1/phi''(u).
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        gu, gv = phi.d1(u), phi.d1(v)
        diff = gu - gv
        close = np.abs(diff) <= rel_tol * np.maximum(np.abs(gu), np.abs(gv))
        ratio = (u - v) / diff
        limit = 6.0 / (phi.d2(u) + 4.0 * phi.d2(0.5 * (u + v)) + phi.d2(v))
    return np.where(close, limit, ratio)
