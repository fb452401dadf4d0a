"""Boundary fixed points of ball automorphisms, constructively.

Three routes are implemented:

* a damped schedule alpha_k -> 1 whose Earle-Hamilton fixed points z_k of
  alpha_k*g converge to a limit ("weak fixed point"; in finite dimensions
  the weak and norm limits coincide, so the limit is computed in norm),
  together with the classification of when that limit is an actual fixed
  point;
* the orthogonal-iterates construction: when {T^k e} is an orthogonal
  family, the geometric series z0 = lambda0 * sum mu0^k T^(k+1) e is an
  exact boundary fixed point of T o g_{te}, with lambda0 = 2t/(1+t^2) and
  mu0 = (1-t^2)/(1+t^2);
* the sliver construction: with a_k = <T^k e, e> and
  f(u) = sum a_k u^k, a root u0 of h(u) = (1+u)(1+2f(u))/(1-u) = 1/t^2
  yields the boundary fixed point z0 = t(1+u0)(I - u0 T)^(-1) T e.

Resolvent forms (I - uT)^(-1) replace truncated series wherever T is
available as a matrix; the truncated series are kept for cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import core, tripotents
from .core import as_element, conj_j, inner, j_pairing, spin_norm
from .automorphisms import Automorphism, TripleIsometry
from .errors import (
    NoConvergence,
    NoRoot,
    OrthogonalityViolated,
    PreconditionViolation,
    WitnessNotFound,
)
from .tripotents import TripotentKind, TripotentRank

# step-norm floor: below this, double precision cannot certify progress
_EPS_FLOOR = 64.0 * np.finfo(np.float64).eps

# classification thresholds
BOUNDARY_TOL = 1e-6
_ZERO_TOL = 1e-6
_AWAY_FROM_ONE = 1e-3

CONDITION_BOUNDARY_LIMIT = "limit-on-boundary"
CONDITION_NOT_MAXIMAL = "parameter-not-maximal-multiple"
CONDITION_NORMS_AWAY = "iterate-norms-bounded-away-from-one"
CONDITION_RANK_ONE = "iterates-rank-one"


def geometric_schedule(count: int = 30, ratio: float = 0.5) -> np.ndarray:
    """alpha_k = 1 - ratio^k, k = 1..count; strictly increasing to 1."""
    return 1.0 - np.power(ratio, np.arange(1, count + 1, dtype=np.float64))


def earle_hamilton_fixed_point(h, z_init, tol: float, max_iter: int) -> np.ndarray:
    """Fixed point of a strict ball self-map by Picard iteration.

    Stops when the step norm drops below max(tol, eps floor); raises
    NoConvergence when the budget runs out first.
    """
    z = np.asarray(z_init, dtype=np.complex128)
    stop = max(tol, _EPS_FLOOR * max(1.0, float(spin_norm(z))))
    for _ in range(max_iter):
        z_next = h(z)
        step = float(spin_norm(z_next - z))
        z = z_next
        if step <= stop:
            return z
    raise NoConvergence(
        f"no fixed point to step tolerance {stop:.3e} within {max_iter} iterations"
    )


@dataclass(frozen=True, eq=False)
class WeakFixedPointReport:
    """Outcome of the alpha-schedule: limit estimate and diagnostics."""

    xi: np.ndarray
    alphas: np.ndarray
    norms: np.ndarray
    residual: float
    conditions: tuple
    j_pairings: np.ndarray  # <z_k, j z_k> per stage, diagnostic only
    inner_tols: np.ndarray

    @property
    def classification(self):
        return self.conditions[0] if self.conditions else None


def weak_fixed_point(
    g: Automorphism,
    schedule=None,
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> WeakFixedPointReport:
    """Schedule fixed points z_k of alpha_k*g and classify their limit.

    The per-stage inner tolerance is tol*(1-alpha_k) so late stages stay as
    accurate as the contraction allows.  Conditions reported (any subset):
    limit on the boundary; transvection parameter not a maximal-tripotent
    multiple while the limit is 0; iterate norms bounded away from 1 while
    the limit is 0; all iterates rank one.
    """
    alphas = geometric_schedule() if schedule is None else np.asarray(schedule, float)
    if alphas.ndim != 1 or np.any(np.diff(alphas) <= 0) or alphas[0] <= 0 or alphas[-1] >= 1:
        raise PreconditionViolation("schedule must increase strictly inside (0, 1)")
    z = np.zeros(g.dim, dtype=np.complex128)
    iterates = []
    inner_tols = []
    for alpha in alphas:
        stage_tol = tol * (1.0 - alpha)
        z = earle_hamilton_fixed_point(lambda w: alpha * g.apply(w), z, stage_tol, max_iter)
        iterates.append(z)
        inner_tols.append(max(stage_tol, _EPS_FLOOR * max(1.0, float(spin_norm(z)))))
    xi = iterates[-1]
    norms = np.array([float(spin_norm(zk)) for zk in iterates])
    pairings = np.array([j_pairing(zk) for zk in iterates])

    conditions = []
    if norms[-1] >= 1.0 - BOUNDARY_TOL:
        conditions.append(CONDITION_BOUNDARY_LIMIT)
    if norms[-1] <= _ZERO_TOL:
        a_kind = tripotents.classify(g.a).kind
        if a_kind != TripotentKind.MAXIMAL_MULTIPLE:
            conditions.append(CONDITION_NOT_MAXIMAL)
        if np.max(norms) <= 1.0 - _AWAY_FROM_ONE:
            conditions.append(CONDITION_NORMS_AWAY)
    kinds = [tripotents.classify(zk).kind for zk in iterates]
    if all(k == TripotentKind.MINIMAL_MULTIPLE for k in kinds):
        conditions.append(CONDITION_RANK_ONE)

    return WeakFixedPointReport(
        xi=xi,
        alphas=alphas,
        norms=norms,
        residual=float(spin_norm(g.apply(xi, extended=True) - xi)),
        conditions=tuple(conditions),
        j_pairings=pairings,
        inner_tols=np.array(inner_tols),
    )


# ---------------------------------------------------------------------------
# constructive boundary fixed points for g = T o g_{te}
# ---------------------------------------------------------------------------


def _require_real_maximal(e, tol: float):
    e = as_element(e)
    if tripotents.is_tripotent(e, tol=max(tol, tripotents.DEFAULT_TOL)) != TripotentRank.RANK_TWO:
        raise PreconditionViolation("e must be a maximal tripotent")
    if core.hilbert_norm(conj_j(e) - e) > tol * core.hilbert_norm(e):
        raise PreconditionViolation("e must be fixed by the conjugation (je = e)")
    return e


def _require_j_commuting(T: TripleIsometry, tol: float = 1e-12):
    if not T.commutes_with_j(tol):
        raise PreconditionViolation("isometry must commute with the conjugation")
    return T


def orthogonal_construction(
    T: TripleIsometry, t: float, e, K: int, tol: float = 1e-9
) -> np.ndarray:
    """Boundary fixed point of T o g_{te} from an orthogonal iterate family.

    Checks |<T^k e, e>| <= tol for k = 1..K (by unitarity this is pairwise
    orthogonality of {Te, ..., T^(K+1)e}) and returns the truncated series
    z0 = lambda0 * sum_{k<K} mu0^k T^(k+1) e; the truncation residual of
    the fixed-point identity decays like mu0^K.
    """
    if not 0.0 < t < 1.0:
        raise PreconditionViolation(f"t must be in (0,1), got {t}")
    if K < 1:
        raise PreconditionViolation("K must be positive")
    e = _require_real_maximal(e, tol)
    _require_j_commuting(T)
    mu0 = (1.0 - t * t) / (1.0 + t * t)
    lam0 = 2.0 * t / (1.0 + t * t)
    z0 = np.zeros_like(e)
    v = e
    for k in range(1, K + 1):
        v = T.apply(v)
        if abs(inner(v, e)) > tol:
            raise OrthogonalityViolated(
                f"|<T^{k} e, e>| = {abs(inner(v, e)):.3e} > {tol:.1e}"
            )
        z0 = z0 + (lam0 * mu0 ** (k - 1)) * v
    return z0


@dataclass(frozen=True, eq=False)
class SliverCoefficients:
    """a_k = <T^k e, e> plus the two evaluators for f and for h."""

    a: np.ndarray  # a_1..a_K
    matrix: np.ndarray = field(repr=False)
    e: np.ndarray = field(repr=False)

    def f_series(self, u: float) -> float:
        """Truncated power series sum_k a_k u^k."""
        powers = np.power(u, np.arange(1, self.a.shape[0] + 1))
        return float(self.a @ powers)

    def f_resolvent(self, u: float) -> float:
        """Closed form <u T (I - uT)^(-1) e, e>."""
        n = self.matrix.shape[0]
        v = np.linalg.solve(np.eye(n) - u * self.matrix, self.matrix @ self.e)
        return float(np.real(u * inner(v, self.e)))

    def h(self, u: float) -> float:
        """(1+u)(1+2f(u))/(1-u), evaluated through the resolvent form."""
        return (1.0 + u) * (1.0 + 2.0 * self.f_resolvent(u)) / (1.0 - u)


def sliver_coefficients(T: TripleIsometry, e, K: int, tol: float = 1e-9) -> SliverCoefficients:
    """Correlation coefficients of the iterate family; real by symmetry."""
    e = _require_real_maximal(e, tol)
    _require_j_commuting(T)
    a = np.empty(K, dtype=np.float64)
    v = e
    for k in range(K):
        v = T.apply(v)
        c = inner(v, e)
        a[k] = float(np.real(c))
    return SliverCoefficients(a=a, matrix=T.matrix, e=e)


@dataclass(frozen=True, eq=False)
class SliverData:
    """Outcome of the sliver construction (u0/z0 absent when no root)."""

    coefficients: np.ndarray
    h_profile: np.ndarray  # rows (u, h(u)) from the bracketing scan
    u0: float | None = None
    z0: np.ndarray | None = None
    norm_sq: float | None = None
    residual: float | None = None
    h_residual: float | None = None


def _resolvent_point(T: TripleIsometry, t: float, e, u: float) -> np.ndarray:
    n = T.dim
    return t * (1.0 + u) * np.linalg.solve(np.eye(n) - u * T.matrix, T.apply(e))


def sliver_construction(
    T: TripleIsometry,
    t: float,
    e,
    root_tol: float = 1e-12,
    coeff_count: int = 64,
    grid_depth: int = 50,
) -> SliverData:
    """Boundary fixed point of T o g_{te} via the level crossing h(u) = 1/t^2.

    Scans h on a geometric grid refining toward 1 for a sign bracket, then
    bisects to root_tol.  Raises NoRoot (carrying the scanned profile) when
    no bracket appears, which is how a failed limsup condition manifests on
    the grid; this is reported, never proved.
    """
    if not 0.0 < t < 1.0:
        raise PreconditionViolation(f"t must be in (0,1), got {t}")
    coeffs = sliver_coefficients(T, e, coeff_count)
    e = coeffs.e
    target = 1.0 / (t * t)

    grid = 1.0 - np.power(2.0, -np.arange(1, grid_depth + 1, dtype=np.float64))
    grid = grid[grid < 1.0]
    profile = []
    bracket = None
    u_prev = 1e-9
    h_prev = coeffs.h(u_prev)
    profile.append((u_prev, h_prev))
    for u in grid:
        h_u = coeffs.h(u)
        profile.append((float(u), float(h_u)))
        if h_u >= target:
            bracket = (u_prev, u)
            break
        u_prev, h_prev = float(u), float(h_u)
    h_profile = np.array(profile)
    if bracket is None:
        raise NoRoot(
            f"h(u) < 1/t^2 = {target:.6g} on the whole scanned grid",
            data=SliverData(coefficients=coeffs.a, h_profile=h_profile),
        )

    lo, hi = bracket
    while hi - lo > root_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if coeffs.h(mid) >= target:
            hi = mid
        else:
            lo = mid
    u0 = 0.5 * (lo + hi)

    z0 = _resolvent_point(T, t, e, u0)
    norm_sq = float(np.real(inner(z0, z0)))
    g = Automorphism(T, t * e)
    residual = float(spin_norm(g.apply(z0, extended=True) - z0))
    return SliverData(
        coefficients=coeffs.a,
        h_profile=h_profile,
        u0=float(u0),
        z0=z0,
        norm_sq=norm_sq,
        residual=residual,
        h_residual=float(abs(coeffs.h(u0) - target)),
    )


# ---------------------------------------------------------------------------
# density of quasi-invertible pairs
# ---------------------------------------------------------------------------


def density_witness(x, y, eps: float, seed: int, budget: int = 256) -> np.ndarray:
    """Perturbation z with ||z|| < eps making (x, y+z) quasi-invertible.

    Returns 0 when the pair already is.  The nonzero gate is
    min(1e-12, eps^2/16): r is quadratic in the perturbation, so eps caps
    the reachable |r| at eps^2 and a fixed gate would be unsatisfiable for
    small eps.  Deterministic given the seed.
    """
    x = as_element(x)
    y = as_element(y)
    core.check_same_space(x, y)
    if eps <= 0:
        raise PreconditionViolation("eps must be positive")
    r_floor = min(1e-12, eps * eps / 16.0)
    if abs(core.r_invariant(x, y)) > r_floor:
        return np.zeros_like(y)
    n = x.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    delta = 0.5 * eps

    def candidates():
        # maximal-tripotent directions reach |<z,jz>| = ||z||^2, the largest
        # quadratic response; then generic random directions
        for k in range(n):
            d = np.zeros(n, dtype=np.complex128)
            d[k] = 1.0
            yield d
        while True:
            d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            yield d / spin_norm(d)

    for trial, d in enumerate(candidates()):
        if trial >= budget:
            break
        z = delta * d
        if abs(core.r_invariant(x, y + z)) > r_floor:
            return z
        delta = max(delta * 0.75, 0.25 * eps)
    raise WitnessNotFound(f"no witness within ||z|| < {eps} after {budget} trials")
