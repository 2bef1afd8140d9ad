# ricci_mcmc/curvature.py

"""
Gamma calculus for the master equation dp/dt = sum_j omega_ij (p_j/pi_j - p_i/pi_i).

With u = p / pi and f = phi'(u):

    theta_ij = omega_ij (u_i - u_j) / (phi'(u_i) - phi'(u_j))     mobility
    eta_ij   = omega_ij (u_j - u_i)                                 edge flux
    Gamma1(f) = 1/2 sum_ij (f_i - f_j)^2 theta_ij
    Gamma2(f) = 1/2 sum_ij (f_i - f_j)^2 a_ij

so that dD/dt = -Gamma1 and d^2D/dt^2 = 2 Gamma2 along solutions.

The a_ij bracket is a sum over k of eight products of first partials of
theta and of the flux. It reproduces the stationary closed form

    a_ij(omega, pi) = omega_ij (S_i + S_j) - sum_{k != i,j} omega_ik omega_jk / pi_k,
    S_i = sum_{k != i} omega_ik / pi_i,

only when written for the outgoing flux psi_ij = omega_ij (u_i - u_j) = -eta_ij;
with eta itself every term flips sign. compute_a therefore assembles the
bracket on psi. compute_a_finite_difference does the same triple loop
literally, with numerical partials, and is the cross-check.

Pairs off the edge set keep their assembled a_ij: the second-order
identity needs them. The edge set only restricts the ratio bound.
"""

from __future__ import annotations
import math
from typing import ClassVar, Iterable, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel

from .divergence import PhiFunction, divergence, kl, mobility_ratio, pinsker_l1_bound
from .errors import (
    DegeneratePhi,
    DimensionMismatch,
    DomainError,
    EmptyEdgeSet,
    SingularPencil,
    ZeroEdge,
)
from .generator import WeightMatrix, build_optimal_weights, optimal_c
from .simplex import Distribution, RandomSource, as_array
from .util import format_float, logger
from .xi import xi_phi

COINCIDENT_TOL = 1e-9
COINCIDENT_DERIV_TOL = 1e-5
NULL_TOL = 1e-10

Matrix = NDArray[np.float64]


def _ratios(w: WeightMatrix, p: Union[Distribution, ArrayLike]) -> NDArray[np.float64]:
    pv = as_array(p)
    if pv.shape[0] != w.n:
        raise DimensionMismatch(f"p has {pv.shape[0]} states, omega has {w.n}")
    return pv / w.pi.values


def compute_theta(w: WeightMatrix, phi: PhiFunction, p: Union[Distribution, ArrayLike]) -> Matrix:
    """
    Mobility matrix theta_ij(omega, p).

    Raises:
        DegeneratePhi: if phi'' vanishes at a coincident pair carrying weight
    """
    u = _ratios(w, p)
    ratio = mobility_ratio(phi, u[:, None], u[None, :], COINCIDENT_TOL)
    live = w.omega > 0
    if np.any(live & ~np.isfinite(ratio)):
        i, j = np.argwhere(live & ~np.isfinite(ratio))[0]
        raise DegeneratePhi(f"phi''({u[i]!r}) = 0 on edge ({i},{j})")
    return np.where(live, w.omega * np.where(np.isfinite(ratio), ratio, 0.0), 0.0)


def compute_eta(w: WeightMatrix, p: Union[Distribution, ArrayLike]) -> Matrix:
    """eta_ij = omega_ij (p_j/pi_j - p_i/pi_i); antisymmetric, independent of phi."""
    u = _ratios(w, p)
    return w.omega * (u[None, :] - u[:, None])


def _check_form(m: ArrayLike, f: ArrayLike) -> Tuple[Matrix, NDArray[np.float64]]:
    m = np.asarray(m, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    if m.ndim != 2 or m.shape != (f.shape[0], f.shape[0]):
        raise DimensionMismatch(f"matrix of shape {m.shape} cannot act on a vector of length {f.shape[0]}")
    return m, f


def gamma1(theta: ArrayLike, f: ArrayLike) -> float:
    """1/2 sum_ij (f_i - f_j)^2 theta_ij."""
    theta, f = _check_form(theta, f)
    diff = f[:, None] - f[None, :]
    return 0.5 * float(np.sum(diff * diff * theta))


def gamma2(a: ArrayLike, f: ArrayLike) -> float:
    """1/2 sum_ij (f_i - f_j)^2 a_ij."""
    a, f = _check_form(a, f)
    diff = f[:, None] - f[None, :]
    return 0.5 * float(np.sum(diff * diff * a))


def _d3(phi: PhiFunction, x: NDArray[np.float64]) -> NDArray[np.float64]:
    if phi.d3 is not None:
        return phi.d3(x)
    h = 1e-6 * np.maximum(x, 1e-12)
    return (phi.d2(x + h) - phi.d2(x - h)) / (2 * h)


def _theta_partials(phi: PhiFunction, u: NDArray[np.float64]) -> Tuple[Matrix, Matrix]:
    """
    d theta(x, y)/dx and d theta(x, y)/dy on the grid x = u_i, y = u_j.

    At x = y both equal -phi'''(x) / (2 phi''(x)^2).
    """
    x = u[:, None]
    y = u[None, :]
    d = x - y
    with np.errstate(divide="ignore", invalid="ignore"):
        F = phi.d1(x) - phi.d1(y)
        tx = (F - d * phi.d2(x)) / (F * F)
        ty = (-F + d * phi.d2(y)) / (F * F)
    mid = 0.5 * (x + y)
    d2m = phi.d2(mid)
    limit = -_d3(phi, mid) / (2.0 * d2m * d2m)
    close = np.abs(d) <= COINCIDENT_DERIV_TOL * np.maximum(np.maximum(x, y), 1.0)
    return np.where(close, limit, tx), np.where(close, limit, ty)


def compute_a(w: WeightMatrix, phi: PhiFunction, p: Union[Distribution, ArrayLike]) -> Matrix:
    """
    The Gamma-two coefficients a_ij(omega, p), symmetrized, zero diagonal.

    Raises:
        DegeneratePhi: as compute_theta
        DomainError: if p has a non-positive entry
    """
    u = _ratios(w, p)
    if np.any(u <= 0):
        raise DomainError("a_ij needs p entrywise > 0")
    pi = w.pi.values
    om = w.omega
    theta = compute_theta(w, phi, p)
    tx, ty = _theta_partials(phi, u)

    # d theta_ij / d p_i and d theta_ij / d p_j
    ti = om * tx / pi[:, None]
    tj = om * ty / pi[None, :]

    # r_i = sum_k psi_ki = pi_i du_i/dt
    psi = om * (u[:, None] - u[None, :])
    r = psi.sum(axis=0)

    col_theta = theta.sum(axis=0)
    self_w = np.diag(om) / pi
    s = om.sum(axis=1) / pi - self_w
    m = theta @ (om / pi[:, None])

    raw = (
        ti * r[:, None]                                   # dtheta_ij/dp_i psi_ki
        + tj * r[None, :]                                 # -dtheta_ij/dp_j psi_jk
        + om * (col_theta / pi)[:, None]                  # dpsi_ij/dp_i theta_ki
        + om * (col_theta / pi)[None, :]                  # -dpsi_ij/dp_j theta_jk
        + theta * (s[:, None] + s[None, :])               # dpsi_jk/dp_j theta_ij, -dpsi_ki/dp_i theta_ij
        - m - m.T                                         # -dpsi_ki/dp_k theta_jk, dpsi_jk/dp_k theta_ki ...
        + theta * (self_w[:, None] + self_w[None, :])     # ... and their k = i, k = j corrections
    )
    a = 0.5 * raw
    a = 0.5 * (a + a.T)
    np.fill_diagonal(a, 0.0)
    return a


def compute_a_finite_difference(
    w: WeightMatrix, phi: PhiFunction, p: Union[Distribution, ArrayLike], h: float = 1e-6
) -> Matrix:
    """
    Literal eight-term assembly with central-difference partials in p (no projection
    onto the simplex). O(n^3) loops; meant for small n.
    """
    pv = as_array(p).copy()
    n = w.n
    pi = w.pi.values

    def psi_of(q: NDArray[np.float64]) -> Matrix:
        uq = q / pi
        return w.omega * (uq[:, None] - uq[None, :])

    theta = compute_theta(w, phi, pv)
    psi = psi_of(pv)
    d_theta = np.empty((n, n, n))
    d_psi = np.empty((n, n, n))
    for c in range(n):
        up, dn = pv.copy(), pv.copy()
        up[c] += h
        dn[c] -= h
        d_theta[c] = (compute_theta(w, phi, up) - compute_theta(w, phi, dn)) / (2 * h)
        d_psi[c] = (psi_of(up) - psi_of(dn)) / (2 * h)

    a = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            acc = 0.0
            for k in range(n):
                acc += (
                    d_theta[i][i, j] * psi[k, i]
                    + d_psi[i][i, j] * theta[k, i]
                    + d_psi[j][j, k] * theta[i, j]
                    - d_psi[k][k, i] * theta[j, k]
                    - d_theta[j][i, j] * psi[j, k]
                    - d_psi[j][i, j] * theta[j, k]
                    - d_psi[i][k, i] * theta[i, j]
                    + d_psi[k][j, k] * theta[k, i]
                )
            a[i, j] = 0.5 * acc
    return 0.5 * (a + a.T)


def compute_a_stationary(w: WeightMatrix) -> Matrix:
    """Closed form of a_ij at p = pi; independent of phi."""
    pi = w.pi.values
    om = w.omega
    self_w = np.diag(om) / pi
    s = om.sum(axis=1) / pi - self_w
    through = om @ (om / pi[:, None])
    # drop k = i and k = j from sum_k omega_ik omega_kj / pi_k
    through = through - om * (self_w[:, None] + self_w[None, :])
    a = om * (s[:, None] + s[None, :]) - through
    a = 0.5 * (a + a.T)
    np.fill_diagonal(a, 0.0)
    return a


def local_rate_objective(w: WeightMatrix, i: int, j: int) -> float:
    """
    F_ij(omega) = a_ij(omega, pi) / omega_ij.

    Raises:
        ZeroEdge: if omega_ij = 0
        DomainError: if i == j
    """
    if i == j:
        raise DomainError(f"F_ij needs two distinct states, got i = j = {i}")
    om = w.omega
    pi = w.pi.values
    if om[i, j] <= 0:
        raise ZeroEdge(f"omega[{i},{j}] = 0; the local rate is undefined off the edge set")
    s_i = (om[i].sum() - om[i, i]) / pi[i]
    s_j = (om[j].sum() - om[j, j]) / pi[j]
    mask = np.ones(w.n, dtype=bool)
    mask[[i, j]] = False
    cross = float(np.sum(om[i, mask] * om[j, mask] / pi[mask]))
    return float(s_i + s_j - cross / om[i, j])


def local_rate_matrix(w: WeightMatrix) -> Matrix:
    """F_ij on the edge set, +inf elsewhere (so minima ignore non-edges)."""
    a = compute_a_stationary(w)
    live = w.omega > 0
    np.fill_diagonal(live, False)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(live, a / w.omega, np.inf)


def ratio_bound_kappa(theta: ArrayLike, a: ArrayLike, edges: Iterable[Tuple[int, int]]) -> float:
    """
    min over edges of a_ij / theta_ij.

    Raises:
        EmptyEdgeSet: if edges is empty
        DomainError: if theta_ij <= 0 on a listed edge
    """
    theta = np.asarray(theta, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    edge_list = list(edges)
    if not edge_list:
        raise EmptyEdgeSet("no edges with positive weight")
    best = math.inf
    for i, j in edge_list:
        if theta[i, j] <= 0:
            raise DomainError(f"theta[{i},{j}] = {theta[i, j]!r} on an edge")
        best = min(best, a[i, j] / theta[i, j])
    return float(best)


def _laplacian(m: Matrix) -> Matrix:
    off = m - np.diag(np.diag(m))
    return np.diag(off.sum(axis=1)) - off


def exact_kappa(theta: ArrayLike, a: ArrayLike) -> float:
    """
    Largest kappa with Gamma2(f) >= kappa Gamma1(f) for every f.

    Smallest eigenvalue of the pencil (L_a, L_theta) on the complement of
    ker L_theta.

    Raises:
        SingularPencil: if L_theta vanishes
    """
    theta = np.asarray(theta, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    l_theta = _laplacian(0.5 * (theta + theta.T))
    l_a = _laplacian(0.5 * (a + a.T))

    evals, evecs = np.linalg.eigh(l_theta)
    scale = float(np.max(np.abs(evals))) if evals.size else 0.0
    keep = evals > NULL_TOL * scale
    if scale == 0.0 or not np.any(keep):
        raise SingularPencil("Gamma1 has no nontrivial direction")
    basis = evecs[:, keep]
    reduced_a = basis.T @ l_a @ basis
    reduced_t = np.diag(evals[keep])
    reduced_a = 0.5 * (reduced_a + reduced_a.T)
    eig = scipy.linalg.eigh(reduced_a, reduced_t, eigvals_only=True)
    return float(eig[0])


# --- rate formulas for the optimal generator --------------------------------

def thm2_pair_values(pi: Distribution, phi: PhiFunction) -> Matrix:
    """
    c (1 - (pi_i + pi_j)/2 + xi_phi(pi_i, pi_j)/2) for i != j; +inf on the diagonal.
    """
    p = pi.values
    n = pi.n
    c = optimal_c(pi)
    out = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(i + 1, n):
            v = c * (1.0 - 0.5 * (p[i] + p[j]) + 0.5 * xi_phi(phi, float(p[i]), float(p[j])))
            out[i, j] = out[j, i] = v
    return out


def kappa_formula_thm2(pi: Distribution, phi: PhiFunction) -> float:
    """
    Closed-form rate of the optimal generator, at least 1/2 for convex phi.

    Never above c, the curvature of omega* at pi. Away from pi it bounds the exact
    curvature from below for two states and for chi-squared; with three or
    more states and a concentrated p the KL-type kinds can fall under it.
    """
    return float(np.min(thm2_pair_values(pi, phi)))


def kappa_sqrt_bound(pi: Distribution) -> float:
    """c min_{i,j} (1 - (sqrt pi_i - sqrt pi_j)^2 / 2); the worst pair is (max pi, min pi)."""
    r = np.sqrt(pi.values)
    gap = float(np.max(r) - np.min(r))
    return optimal_c(pi) * (1.0 - 0.5 * gap * gap)


def divergence_decay_certificate(phi: PhiFunction, pi: Distribution, p0: Distribution, t: float) -> float:
    """
    e^{-2 kappa t} D_phi(p0 || pi) with kappa = kappa_formula_thm2.

    A guaranteed bound on D_phi(p(t) || pi) for two states and for chi-squared
    (where it is exact); elsewhere a reference curve only.
    """
    kappa = kappa_formula_thm2(pi, phi)
    return math.exp(-2.0 * kappa * t) * divergence(phi, p0, pi)


def l1_decay_certificate(pi: Distribution, p0: Distribution, t: float) -> float:
    """Upper bound sqrt(2 KL(p0 || pi)) e^{-kappa t} on ||p(t) - pi||_1, kappa = kappa_sqrt_bound."""
    return pinsker_l1_bound(divergence(kl(), p0, pi)) * math.exp(-kappa_sqrt_bound(pi) * t)


# --- reports -------------------------------------------------------------------

class CurvatureReport(BaseModel):
    """Curvature bounds at one (omega, phi, p)."""

    phi: str
    n: int
    n_edges: int
    ratio_bound: float
    exact_kappa: float
    kappa_thm2: float
    kappa_sqrt_bound: float

    FIELDS: ClassVar[Tuple[str, ...]] = (
        "phi", "n", "n_edges", "ratio_bound", "exact_kappa", "kappa_thm2", "kappa_sqrt_bound",
    )

    def _cells(self) -> List[str]:
        out = []
        for name in self.FIELDS:
            v = getattr(self, name)
            out.append(format_float(v) if isinstance(v, float) else str(v))
        return out

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in zip(self.FIELDS, self._cells())) + "\n"

    @classmethod
    def csv_header(cls) -> str:
        return ",".join(cls.FIELDS)

    def to_csv_row(self) -> str:
        return ",".join(self._cells())


def curvature_report(
    w: WeightMatrix, phi: PhiFunction, p: Optional[Union[Distribution, ArrayLike]] = None
) -> CurvatureReport:
    """
    Ratio bound and exact kappa at (omega, p), next to the two closed-form
    rates of the optimal generator for omega's pi. p defaults to pi.
    """
    point = w.pi if p is None else p
    theta = compute_theta(w, phi, point)
    a = compute_a(w, phi, point)
    edges = w.edges()
    report = CurvatureReport(
        phi=phi.label,
        n=w.n,
        n_edges=len(edges),
        ratio_bound=ratio_bound_kappa(theta, a, edges),
        exact_kappa=exact_kappa(theta, a),
        kappa_thm2=kappa_formula_thm2(w.pi, phi),
        kappa_sqrt_bound=kappa_sqrt_bound(w.pi),
    )
    logger.debug("curvature report: %s", report.to_csv_row())
    return report


class PerturbationReport(BaseModel):
    """Outcome of probing omega* with small feasible perturbations."""

    trials: int
    eps: float
    baseline_min_f: float
    best_perturbed_min_f: float
    violations: int
    passed: bool

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.model_dump().items())


def _feasible_direction(gen: np.random.Generator, base: Matrix, eps: float, attempts: int = 1000) -> Optional[Matrix]:
    n = base.shape[0]
    for _ in range(attempts):
        d = gen.standard_normal((n, n))
        d = np.triu(d, 1)
        d = d + d.T
        d /= np.max(np.abs(d))
        np.fill_diagonal(d, -d.sum(axis=1))
        if np.all(base + eps * d >= 0):
            return d
    return None


def check_local_optimality(
    pi: Distribution,
    trials: int = 200,
    eps: float = 1e-3,
    rng: Union[RandomSource, np.random.Generator, None] = None,
    tol: float = 1e-6,
) -> PerturbationReport:
    """
    Check whether omega* is a local maximizer of min_ij F_ij.

    Each trial adds eps * delta with delta symmetric, zero row sums, keeping
    every weight nonnegative. A trial violates when the perturbed minimum
    exceeds the baseline by more than tol. Failures are reported, never raised.
    """
    if rng is None:
        rng = RandomSource(0)
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    w_star = build_optimal_weights(pi)
    baseline = float(np.min(local_rate_matrix(w_star)))
    best = -math.inf
    violations = 0
    done = 0
    for _ in range(trials):
        d = _feasible_direction(gen, w_star.omega, eps)
        if d is None:
            logger.warning("no feasible perturbation found; stopping after %d trials", done)
            break
        perturbed = WeightMatrix(w_star.omega + eps * d, pi)
        value = float(np.min(local_rate_matrix(perturbed)))
        best = max(best, value)
        if value > baseline + tol:
            violations += 1
        done += 1
    report = PerturbationReport(
        trials=done,
        eps=eps,
        baseline_min_f=baseline,
        best_perturbed_min_f=best if done else baseline,
        violations=violations,
        passed=violations == 0,
    )
    if not report.passed:
        logger.info("omega* beaten in %d of %d perturbations", violations, done)
    return report
