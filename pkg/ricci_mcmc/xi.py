# ricci_mcmc/xi.py

"""
The two-variable function

    xi_phi(s, t) = inf_{u, v} (phi''(u) t + phi''(v) s) * (u - v) / (phi'(u) - phi'(v)),

u = p_i / s, v = p_j / t with (p_i, p_j) in (0, 1]^2, which enters the
rate formula of the optimal generator.

Closed forms: chi-squared gives s + t, reverse KL gives 2 sqrt(s t).
For the power family phi''(x) = x^(a-2) the objective only depends on
x = u / v, so it reduces to one variable:

    xi_a(s, t) = inf_x (t x^(a-2) + s) (a-1)(x - 1) / (x^(a-1) - 1),

and KL (a = 1) is the 1/log limit of the last factor. Both are minimized
over z = log x in [-40, 40]. Custom generators are minimized on a
201 x 201 logarithmic (u, v) grid and polished by coordinate-wise
golden-section search.

Every generator with phi''(x) = x^(a-2), 0 <= a <= 2, satisfies
xi >= 2 sqrt(s t); a result under that floor is logged at DEBUG.
"""

from __future__ import annotations
import math
from typing import Callable, Optional, Tuple

import numpy as np

from .divergence import PhiFunction, mobility_ratio
from .errors import DomainError
from .util import logger

INV_PHI = (math.sqrt(5) - 1) / 2        # 1 / golden ratio
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / golden ratio^2

KL_Z_RANGE = 40.0
KL_GRID = 2001
GRID_2D = 201
P_FLOOR = 1e-8
REFINE_TOL = 1e-10
MAX_SWEEPS = 30
FLOOR_RTOL = 1e-9


def golden_section_min(f: Callable[[float], float], a: float, b: float, tol: float = REFINE_TOL) -> Tuple[float, float]:
    """
    Golden-section search for a unimodal f on [a, b].

    Returns:
        (x, f(x)) for the better of the final interior points, or of the
        endpoints when one of them is lower
    """
    a, b = min(a, b), max(a, b)
    lo, hi = a, b
    h = b - a
    fa, fb = f(a), f(b)
    if h <= tol:
        return (a, fa) if fa <= fb else (b, fb)

    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)

    for _ in range(steps - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    best = min((yc, c), (yd, d), (fa, lo), (fb, hi))
    return best[1], best[0]


def _check_args(s: float, t: float) -> None:
    for name, v in (("s", s), ("t", t)):
        if not (0.0 < v < 1.0):
            raise DomainError(f"{name} must lie in (0, 1), got {v!r}")


def _kl_objective(s: float, t: float, z: np.ndarray) -> np.ndarray:
    # (s e^{-z} + t)(e^z - 1)/z with the z -> 0 limit s + t
    z = np.asarray(z, dtype=np.float64)
    safe = np.where(z == 0.0, 1.0, z)
    ratio = np.where(z == 0.0, 1.0, np.expm1(safe) / safe)
    return (s * np.exp(-z) + t) * ratio


def xi_kl(s: float, t: float) -> float:
    z = np.linspace(-KL_Z_RANGE, KL_Z_RANGE, KL_GRID)
    vals = _kl_objective(s, t, z)
    k = int(np.argmin(vals))
    lo, hi = z[max(k - 1, 0)], z[min(k + 1, KL_GRID - 1)]
    _, best = golden_section_min(lambda x: float(_kl_objective(s, t, np.array([x]))[0]), lo, hi)
    return float(min(best, vals[k]))


def _power_objective(a: float, s: float, t: float, z: np.ndarray) -> np.ndarray:
    # (t e^{(a-2)z} + s) (a-1) expm1(z) / expm1((a-1)z), equal to s + t at z = 0
    z = np.asarray(z, dtype=np.float64)
    b = a - 1.0
    safe = np.where(z == 0.0, 1.0, z)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if b == 0.0:
            mob = np.expm1(safe) / safe
        else:
            mob = b * np.expm1(safe) / np.expm1(b * safe)
        mob = np.where(z == 0.0, 1.0, mob)
        val = (t * np.exp((a - 2.0) * z) + s) * mob
    return np.where(np.isfinite(val), val, np.inf)


def xi_power(a: float, s: float, t: float) -> float:
    """xi for phi''(x) = x^(a-2), by grid search on z = log(u/v) then golden section."""
    z = np.linspace(-KL_Z_RANGE, KL_Z_RANGE, KL_GRID)
    vals = _power_objective(a, s, t, z)
    k = int(np.argmin(vals))
    lo, hi = z[max(k - 1, 0)], z[min(k + 1, KL_GRID - 1)]
    _, best = golden_section_min(lambda x: float(_power_objective(a, s, t, np.array([x]))[0]), lo, hi)
    return float(min(best, vals[k]))


def _general_objective(phi: PhiFunction, s: float, t: float, lu: np.ndarray, lv: np.ndarray) -> np.ndarray:
    u, v = np.exp(lu), np.exp(lv)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        val = (phi.d2(u) * t + phi.d2(v) * s) * mobility_ratio(phi, u, v)
    return np.where(np.isfinite(val), val, np.inf)


def xi_general(phi: PhiFunction, s: float, t: float) -> float:
    lu_lo, lu_hi = math.log(P_FLOOR / s), math.log(1.0 / s)
    lv_lo, lv_hi = math.log(P_FLOOR / t), math.log(1.0 / t)
    lu = np.linspace(lu_lo, lu_hi, GRID_2D)
    lv = np.linspace(lv_lo, lv_hi, GRID_2D)
    LU, LV = np.meshgrid(lu, lv, indexing="ij")
    grid = _general_objective(phi, s, t, LU, LV)
    iu, iv = np.unravel_index(int(np.argmin(grid)), grid.shape)
    x_u, x_v = float(lu[iu]), float(lv[iv])
    best = float(grid[iu, iv])
    du = lu[1] - lu[0]
    dv = lv[1] - lv[0]

    def f(a: float, b: float) -> float:
        return float(_general_objective(phi, s, t, np.array([a]), np.array([b]))[0])

    # coordinate descent, each sweep searches one grid cell either side
    for sweep in range(MAX_SWEEPS):
        prev = best
        x_u, _ = golden_section_min(lambda a: f(a, x_v), max(x_u - du, lu_lo), min(x_u + du, lu_hi))
        x_v, best = golden_section_min(lambda b: f(x_u, b), max(x_v - dv, lv_lo), min(x_v + dv, lv_hi))
        if prev - best <= 1e-14 * max(1.0, abs(best)):
            break
    logger.debug("xi %s(%g, %g): %d sweeps, value %.17g", phi.label, s, t, sweep + 1, best)
    value = min(best, float(grid[iu, iv]))
    _check_floor(phi, s, t, value)
    return value


def _power_exponent(phi: PhiFunction) -> Optional[float]:
    # a with phi''(x) = x^(a-2), None for custom generators
    return {"kl": 1.0, "reverse-kl": 0.0, "chi2": 2.0}.get(phi.kind, phi.alpha)


def _check_floor(phi: PhiFunction, s: float, t: float, value: float) -> None:
    a = _power_exponent(phi)
    if a is None or not (0.0 <= a <= 2.0):
        return
    floor = 2.0 * math.sqrt(s * t)
    if value < floor * (1.0 - FLOOR_RTOL):
        logger.debug("xi %s(%g, %g) = %.17g is below the 2 sqrt(st) floor %.17g", phi.label, s, t, value, floor)


def xi_phi(phi: PhiFunction, s: float, t: float) -> float:
    """
    xi_phi(s, t) for s, t in (0, 1).

    Raises:
        DomainError: if s or t lies outside (0, 1)
    """
    _check_args(s, t)
    if phi.kind == "chi2":
        return s + t
    if phi.kind == "reverse-kl":
        return 2.0 * math.sqrt(s * t)
    if phi.kind == "custom":
        return xi_general(phi, s, t)
    value = xi_kl(s, t) if phi.kind == "kl" else xi_power(float(phi.alpha), s, t)
    _check_floor(phi, s, t, value)
    return value


def xi_lemma_bounds(s: float, t: float) -> Tuple[float, float]:
    """
    Bracket for xi_KL: 2 sqrt(s t) <= xi_KL(s, t) <= 2 (s - t) / (log s - log t).

    The upper bound is twice the logarithmic mean; at s = t it equals 2s.
    """
    _check_args(s, t)
    lower = 2.0 * math.sqrt(s * t)
    if abs(s - t) <= 1e-12 * max(s, t):
        upper = s + t
    else:
        upper = 2.0 * (s - t) / (math.log(s) - math.log(t))
    return lower, upper
