"""Tripotent classification and the rank-2 spectral geometry of elements.

Every nonzero element a decomposes as a = s1*e1 + s2*e2 with s1 >= s2 >= 0
and e1, e2 triple-orthogonal minimal tripotents, e2 a unimodular multiple
of j(e1) whenever s2 > 0.  The singular values come from the two scalar
invariants <a,a> and |<a,ja>|; the frame itself lives in the j-invariant
plane span{a, ja}.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from . import core
from .core import as_element, conj_j, inner, j_pairing
from .errors import DegenerateInput, PreconditionViolation

DEFAULT_TOL = 1e-9

# Below this relative size the j-antisymmetric part of an element is treated
# as zero and the frame direction is completed canonically.
_FRAME_DEGENERACY_RTOL = 1e-12


class TripotentKind(Enum):
    ZERO = "zero"
    MINIMAL_MULTIPLE = "minimal-multiple"
    MAXIMAL_MULTIPLE = "maximal-multiple"
    GENERIC_RANK2 = "generic-rank2"


class TripotentRank(IntEnum):
    NOT_TRIPOTENT = 0
    RANK_ONE = 1
    RANK_TWO = 2


@dataclass(frozen=True)
class TripotentClass:
    kind: TripotentKind
    scales: tuple

    @property
    def rank(self) -> int:
        return {
            TripotentKind.ZERO: 0,
            TripotentKind.MINIMAL_MULTIPLE: 1,
            TripotentKind.MAXIMAL_MULTIPLE: 2,
            TripotentKind.GENERIC_RANK2: 2,
        }[self.kind]


def classify(x, tol: float = DEFAULT_TOL) -> TripotentClass:
    """Classify x as zero, a minimal/maximal tripotent multiple, or generic.

    Tolerances are relative: |<x,jx>| <= tol*<x,x> for minimal multiples,
    ||jx - alpha*x|| <= tol*||x|| for maximal multiples.
    """
    x = as_element(x)
    if core.spin_norm(x) <= tol:
        return TripotentClass(TripotentKind.ZERO, ())
    ipxx = float(np.real(inner(x, x)))
    w = j_pairing(x)
    if abs(w) <= tol * ipxx:
        return TripotentClass(TripotentKind.MINIMAL_MULTIPLE, (np.sqrt(2.0 * ipxx),))
    alpha = inner(conj_j(x), x) / ipxx
    if core.hilbert_norm(conj_j(x) - alpha * x) <= tol * np.sqrt(ipxx):
        return TripotentClass(TripotentKind.MAXIMAL_MULTIPLE, (np.sqrt(ipxx),))
    s1, s2 = singular_values(x)
    return TripotentClass(TripotentKind.GENERIC_RANK2, (s1, s2))


def rank(x, tol: float = DEFAULT_TOL) -> int:
    return classify(x, tol).rank


def is_tripotent(e, tol: float = DEFAULT_TOL) -> TripotentRank:
    """Decide whether e is a tripotent and of which rank.

    Rank one: <e,je> ~ 0 and <e,e> ~ 1/2.  Rank two: je ~ lambda*e with
    |lambda| = 1 and <e,e> ~ 1.
    """
    e = as_element(e)
    ipee = float(np.real(inner(e, e)))
    if ipee <= tol:
        return TripotentRank.NOT_TRIPOTENT
    w = j_pairing(e)
    if abs(w) <= tol and abs(ipee - 0.5) <= tol:
        return TripotentRank.RANK_ONE
    lam = inner(conj_j(e), e) / ipee
    if (
        abs(abs(lam) - 1.0) <= tol
        and abs(ipee - 1.0) <= tol
        and core.hilbert_norm(conj_j(e) - lam * e) <= tol
    ):
        return TripotentRank.RANK_TWO
    return TripotentRank.NOT_TRIPOTENT


def are_triple_orthogonal(e, f, tol: float = DEFAULT_TOL) -> bool:
    """Triple orthogonality test for two minimal tripotents.

    Holds iff <e,f> = 0 and jf is a unimodular multiple of e.
    """
    e = as_element(e)
    f = as_element(f)
    if is_tripotent(e, tol) != TripotentRank.RANK_ONE:
        raise PreconditionViolation("first argument is not a minimal tripotent")
    if is_tripotent(f, tol) != TripotentRank.RANK_ONE:
        raise PreconditionViolation("second argument is not a minimal tripotent")
    if abs(inner(e, f)) > tol:
        return False
    lam = inner(conj_j(f), e) / inner(e, e)
    if abs(abs(lam) - 1.0) > tol:
        return False
    return core.hilbert_norm(conj_j(f) - lam * e) <= tol


def _phase_split(a: np.ndarray) -> tuple:
    """Remove the phase of <a,ja> and split into j-symmetric/antisymmetric
    real parts, orthogonalized.

    Returns (half_phase, p, q_perp, |p|, |q_perp|) with
    exp(-i*phi/2)*a = p + i*q and q_perp the part of q orthogonal to p.
    Since |p| = (s1+s2)/2 and |q| = (s1-s2)/2, the singular values read off
    without the cancellation that the direct radicals
    sqrt(<a,a> +- |<a,ja>|) suffer near maximal-tripotent multiples.
    """
    w = j_pairing(a)
    phi = float(np.angle(w)) if abs(w) > 0 else 0.0
    half = np.exp(-0.5j * phi)
    b = half * a
    p = b.real.copy()
    q = b.imag.copy()
    norm_p = float(np.linalg.norm(p))
    norm_q = float(np.linalg.norm(q))
    if norm_q > norm_p:
        # can only happen by round-off at |p| ~ |q|; keep the larger as p
        p, q = q, -p
        norm_p, norm_q = norm_q, norm_p
        half = half * (-1j)
    if norm_p == 0.0:
        return half, p, q, 0.0, 0.0
    p_hat = p / norm_p
    q_perp = q - (q @ p_hat) * p_hat
    return half, p, q_perp, norm_p, float(np.linalg.norm(q_perp))


def singular_values(a) -> tuple:
    """(s1, s2) = (|p| + |q|, |p| - |q|) of the phase-removed split;
    algebraically (sqrt(<a,a>+|<a,ja>|) +- sqrt(<a,a>-|<a,ja>|))/sqrt(2)."""
    a = as_element(a)
    _, _, _, norm_p, norm_q = _phase_split(a)
    return norm_p + norm_q, max(norm_p - norm_q, 0.0)


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    """a = s1*e1 + s2*e2 with orthogonal minimal tripotents e1, e2."""

    s1: float
    s2: float
    e1: np.ndarray
    e2: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.s1 * self.e1 + self.s2 * self.e2

    @property
    def je1(self) -> np.ndarray:
        return conj_j(self.e1)

    def subspace_projector(self) -> np.ndarray:
        """Hilbert projection onto span{e1, j(e1)} (equals span{e1, e2})."""
        p1 = 2.0 * np.outer(self.e1, np.conj(self.e1))
        je1 = conj_j(self.e1)
        p2 = 2.0 * np.outer(je1, np.conj(je1))
        return p1 + p2


def _canonical_direction(p_hat: np.ndarray) -> np.ndarray:
    # deterministic completion: the canonical direction least aligned with
    # p_hat, orthogonalized; first nonzero entry made positive
    k = int(np.argmin(np.abs(p_hat)))
    q = np.zeros_like(p_hat)
    q[k] = 1.0
    q = q - (q @ p_hat) * p_hat
    nz = np.nonzero(np.abs(q) > 0)[0]
    if q[nz[0]] < 0:
        q = -q
    return q / np.linalg.norm(q)


def spectral_decompose(a, tol: float = DEFAULT_TOL) -> SpectralFrame:
    """Spectral frame of a nonzero element.

    Removes the phase of <a,ja>, splits the rephased element into its real
    and imaginary coordinate parts (the j-symmetric/antisymmetric split),
    and normalizes inside span{a, ja}.  When the antisymmetric part
    degenerates (a is a maximal-tripotent multiple) the second direction is
    completed canonically, which pins the frame for golden tests.
    """
    a = as_element(a)
    if core.spin_norm(a) <= tol:
        raise DegenerateInput("cannot decompose an element of norm <= tol")
    half, p, q_perp, norm_p, norm_q = _phase_split(a)
    s1 = norm_p + norm_q
    s2 = max(norm_p - norm_q, 0.0)
    p_hat = p / norm_p
    if norm_q <= _FRAME_DEGENERACY_RTOL * norm_p:
        q_hat = _canonical_direction(p_hat)
    else:
        q_hat = q_perp / norm_q
    e1 = np.conj(half) * (p_hat + 1j * q_hat) / 2.0
    e2 = np.conj(half) * (p_hat - 1j * q_hat) / 2.0
    return SpectralFrame(s1=s1, s2=s2, e1=e1, e2=e2)


def peirce_projections(e, tol: float = DEFAULT_TOL) -> tuple:
    """(P0, P_half, P1) for a tripotent e.

    P1 = Q(e)Q(e), P0 = B(e,e), P_half = 2(D(e,e) - Q(e)Q(e)); they are
    idempotent, mutually orthogonal, and sum to the identity.
    """
    e = as_element(e)
    if is_tripotent(e, tol) == TripotentRank.NOT_TRIPOTENT:
        raise PreconditionViolation("Peirce projections need a tripotent")
    q = core.quadratic_rep(e)
    p1 = q.compose_matrix(q)
    p0 = core.bergman_operator(e, e)
    p_half = 2.0 * (core.box_operator(e, e) - p1)
    return p0, p_half, p1
