"""Iteration of fixed-point-free ball self-maps and the target bidisc.

Maps are composition pipelines over three primitives (linear triple
isometries, transvections, scalar contractions), each of which sends the
open ball into itself.  For a fixed-point-free map the schedule fixed
points accumulate at a boundary Wolff point xi; its spectral decomposition
xi = e + lambda*je (e a minimal tripotent) spans the unique bidisc whose
boundary attracts the orbit tails.  The module measures exactly that
pointwise consequence: distance of orbit points to span{e, je} and, within
the plane, distance to the bidisc boundary in max-norm coordinates
(2<w,e>, 2<w,je>); the factor 2 compensates <e,e> = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .core import as_element, conj_j, inner, spin_norm
from .automorphisms import Transvection, TripleIsometry
from .errors import (
    ConsistencyError,
    DegenerateInput,
    DimensionMismatch,
    DomainError,
)
from .fixedpoints import earle_hamilton_fixed_point, geometric_schedule
from .tripotents import spectral_decompose

_ESCAPE_SLACK = 1e-9


class HolomorphicMap:
    """Composition of ball self-map primitives, applied right-to-left.

    Build with the factories and `compose`: compose(f, g) acts as z -> f(g(z)).
    """

    def __init__(self, dim: int, pipeline=()):
        self.dim = int(dim)
        self._pipeline = tuple(pipeline)  # applied first-to-last

    @classmethod
    def identity(cls, dim: int) -> "HolomorphicMap":
        return cls(dim)

    @classmethod
    def isometry(cls, t: TripleIsometry) -> "HolomorphicMap":
        return cls(t.dim, (("isometry", t),))

    @classmethod
    def transvection(cls, a) -> "HolomorphicMap":
        tv = Transvection(as_element(a))
        return cls(tv.dim, (("transvection", tv),))

    @classmethod
    def scaling(cls, dim: int, rho: float) -> "HolomorphicMap":
        if not 0.0 < rho <= 1.0:
            raise DomainError(f"contraction factor must be in (0,1], got {rho}")
        return cls(dim, (("scaling", float(rho)),))

    @classmethod
    def compose(cls, *maps: "HolomorphicMap") -> "HolomorphicMap":
        """compose(f, g, h)(z) = f(g(h(z)))."""
        if not maps:
            raise ValueError("compose needs at least one map")
        dims = {m.dim for m in maps}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed dimensions {sorted(dims)}")
        pipeline = ()
        for m in reversed(maps):
            pipeline = pipeline + m._pipeline
        return cls(dims.pop(), pipeline)

    def apply(self, z) -> np.ndarray:
        out = np.asarray(z, dtype=np.complex128)
        if out.shape[-1] != self.dim:
            raise DimensionMismatch("map and element dimensions differ")
        for kind, payload in self._pipeline:
            if kind == "isometry":
                out = payload.apply(out)
            elif kind == "transvection":
                out = payload(out)
            else:
                out = payload * out
        return out

    def __call__(self, z) -> np.ndarray:
        return self.apply(z)


def iterate_orbit(f: HolomorphicMap, z0, count: int) -> np.ndarray:
    """[f(z0), f^2(z0), ..., f^count(z0)]; z0 may be a batch of starts.

    Every iterate must stay inside the closed ball up to round-off; escape
    indicates a corrupt map and raises ConsistencyError.
    """
    z = np.asarray(z0, dtype=np.complex128)
    if np.max(spin_norm(z)) >= 1.0:
        raise DomainError("orbit start must lie in the open ball")
    orbit = np.empty((count,) + z.shape, dtype=np.complex128)
    for k in range(count):
        z = f.apply(z)
        orbit[k] = z
    if np.max(spin_norm(orbit)) > 1.0 + _ESCAPE_SLACK:
        raise ConsistencyError("orbit escaped the closed ball; map is not a self-map")
    return orbit


def wolff_point(
    f: HolomorphicMap,
    schedule=None,
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> tuple:
    """(xi, interior_flag): schedule fixed points of alpha_k*f, extrapolated.

    interior_flag is True when ||xi|| <= 1 - 10*tol, i.e. f has an interior
    fixed point and the boundary theory does not apply.
    """
    alphas = geometric_schedule() if schedule is None else np.asarray(schedule, float)
    z = np.zeros(f.dim, dtype=np.complex128)
    for alpha in alphas:
        z = earle_hamilton_fixed_point(
            lambda w: alpha * f.apply(w), z, tol * (1.0 - alpha), max_iter
        )
    interior = float(spin_norm(z)) <= 1.0 - 10.0 * tol
    return z, interior


@dataclass(frozen=True, eq=False)
class BidiscFrame:
    """xi = e + lambda*je with e a minimal tripotent; the bidisc is the
    unit ball of span{e, je} where the norm is the coordinate max-norm."""

    e: np.ndarray
    je: np.ndarray
    xi: np.ndarray
    lam: complex

    def subspace_projector(self) -> np.ndarray:
        p1 = 2.0 * np.outer(self.e, np.conj(self.e))
        p2 = 2.0 * np.outer(self.je, np.conj(self.je))
        return p1 + p2


def target_bidisc(xi, tol: float = 1e-6) -> BidiscFrame:
    """Frame of the bidisc containing the target set, from a boundary point."""
    xi = as_element(xi)
    if float(spin_norm(xi)) < 1.0 - tol:
        raise DegenerateInput("target_bidisc needs a boundary point (||xi|| = 1)")
    frame = spectral_decompose(xi)
    e = frame.e1
    je = conj_j(e)
    nu = 2.0 * inner(frame.e2, je)
    lam = complex(frame.s2 * nu)
    return BidiscFrame(e=e, je=je, xi=xi, lam=lam)


def bidisc_residuals(orbit, frame: BidiscFrame) -> tuple:
    """(d_sub, d_bdry) per orbit point.

    d_sub: Hilbert distance to span{e, je}.  d_bdry: |1 - max(|2<w,e>|,
    |2<w,je>|)|, the max-norm gap of the in-plane part to the bidisc
    boundary.
    """
    w = np.asarray(orbit, dtype=np.complex128)
    zeta = 2.0 * inner(w, frame.e)
    zeta_p = 2.0 * inner(w, frame.je)
    in_plane = core._col(zeta) * frame.e + core._col(zeta_p) * frame.je
    d_sub = core.hilbert_norm(w - in_plane)
    d_bdry = np.abs(1.0 - np.maximum(np.abs(zeta), np.abs(zeta_p)))
    return np.asarray(d_sub, dtype=np.float64), np.asarray(d_bdry, dtype=np.float64)
