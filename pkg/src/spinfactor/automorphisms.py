"""Linear triple isometries, Mobius transvections, and full automorphisms.

Every surjective linear isometry of the spin factor is exp(i*theta) * O
with O real orthogonal in the canonical basis (so O commutes with j); a
general unitary of the underlying Hilbert space need not preserve the spin
norm or the triple rank, and the TripleIsometry constructor rejects such
matrices.

Transvections g_a (||a|| < 1) are evaluated through the spectral frame of
a: g_a factors into two commuting transvections along the frame's minimal
tripotents, which keeps the hot path free of matrix square roots.  The
defining route a + B(a,a)^(1/2) x^(-a) is kept as an independent
cross-check and as the extended-domain path (||z|| < 1/||a||).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import core, tripotents
from .core import as_element, conj_j, inner, j_pairing, spin_norm
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    DomainError,
    InvalidIsometry,
    PreconditionViolation,
)
from .tripotents import TripotentRank, spectral_decompose

_ORTHO_TOL = 1e-12
_BALL_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class TripleIsometry:
    """Phase times real-orthogonal matrix: x -> exp(i*theta) O x."""

    theta: float
    ortho: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.ortho, dtype=np.float64)
        if o.ndim != 2 or o.shape[0] != o.shape[1]:
            raise InvalidIsometry(f"orthogonal part must be square, got {o.shape}")
        if not np.allclose(o.T @ o, np.eye(o.shape[0]), atol=_ORTHO_TOL):
            raise InvalidIsometry("matrix is not real-orthogonal to 1e-12")
        object.__setattr__(self, "ortho", o)
        object.__setattr__(self, "theta", float(self.theta) % (2.0 * np.pi))

    @property
    def dim(self) -> int:
        return self.ortho.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.theta) * self.ortho

    def apply(self, x) -> np.ndarray:
        if np.shape(x)[-1] != self.dim:
            raise DimensionMismatch("isometry and element dimensions differ")
        return np.exp(1j * self.theta) * (np.asarray(x, dtype=np.complex128) @ self.ortho.T)

    def inverse(self) -> "TripleIsometry":
        return TripleIsometry(-self.theta, self.ortho.T)

    def commutes_with_j(self, tol: float = 1e-12) -> bool:
        # exp(i*theta) O commutes with coordinatewise conjugation iff the
        # phase is real, i.e. theta in {0, pi}
        return min(abs(np.sin(self.theta)), 1.0) <= tol

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, dim: int) -> "TripleIsometry":
        return cls(0.0, np.eye(dim))

    @classmethod
    def neg_identity(cls, dim: int) -> "TripleIsometry":
        return cls(0.0, -np.eye(dim))

    @classmethod
    def cyclic_shift(cls, dim: int, order: int | None = None) -> "TripleIsometry":
        """Cycle e_0 -> e_1 -> ... -> e_{order-1} -> e_0, fix the rest."""
        m = dim if order is None else order
        if not 2 <= m <= dim:
            raise InvalidIsometry(f"shift order must be in [2, dim], got {m}")
        o = np.eye(dim)
        cycle = np.zeros((m, m))
        for k in range(m):
            cycle[(k + 1) % m, k] = 1.0
        o[:m, :m] = cycle
        return cls(0.0, o)

    @classmethod
    def permutation(cls, images) -> "TripleIsometry":
        """Basis permutation e_k -> e_{images[k]} (0-based images)."""
        images = list(images)
        dim = len(images)
        if sorted(images) != list(range(dim)):
            raise InvalidIsometry("not a permutation of 0..n-1")
        o = np.zeros((dim, dim))
        for k, pk in enumerate(images):
            o[pk, k] = 1.0
        return cls(0.0, o)

    @classmethod
    def plane_rotation(cls, dim: int, i: int, k: int, angle: float) -> "TripleIsometry":
        """Rotation by `angle` in the real (e_i, e_k) plane (0-based)."""
        if i == k or not (0 <= i < dim and 0 <= k < dim):
            raise InvalidIsometry("plane rotation needs two distinct valid indices")
        o = np.eye(dim)
        c, s = np.cos(angle), np.sin(angle)
        o[i, i] = c
        o[k, k] = c
        o[i, k] = -s
        o[k, i] = s
        return cls(0.0, o)

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-10) -> "TripleIsometry":
        """Validate an arbitrary complex matrix as exp(i*theta) * O.

        Rejects unitaries that are not phase-times-real-orthogonal; those
        fail to preserve the spin norm or the triple rank.
        """
        m = np.asarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidIsometry(f"expected a square matrix, got {m.shape}")
        scale = np.max(np.abs(m))
        if scale == 0:
            raise InvalidIsometry("zero matrix")
        idx = np.unravel_index(np.argmax(np.abs(m)), m.shape)
        theta = float(np.angle(m[idx]))
        o = np.exp(-1j * theta) * m
        if np.max(np.abs(o.imag)) > tol * scale:
            raise InvalidIsometry(
                "matrix is not a unimodular multiple of a real matrix"
            )
        o = o.real
        if not np.allclose(o.T @ o, np.eye(o.shape[0]), atol=max(tol, _ORTHO_TOL)):
            raise InvalidIsometry("real part is not orthogonal")
        return cls(theta, o)


def isometry_apply(t: TripleIsometry, x) -> np.ndarray:
    return t.apply(x)


# ---------------------------------------------------------------------------
# transvections
# ---------------------------------------------------------------------------


def _check_ball(z, extended: bool, norm_a: float):
    nz = np.max(spin_norm(z))
    if nz <= 1.0 + _BALL_SLACK:
        return
    if not extended:
        raise DomainError(
            f"||z|| = {nz:.6f} > 1; pass extended=True for the extended domain"
        )
    if norm_a > 0 and nz * norm_a >= 1.0:
        raise DomainError(
            f"||z|| = {nz:.6f} outside the extended domain of radius {1.0 / norm_a:.6f}"
        )


def _minimal_transvection_raw(t: float, e, je, z) -> np.ndarray:
    # closed form along a minimal tripotent e; z may carry leading axes
    zeta = 2.0 * inner(z, e)
    zeta_p = 2.0 * inner(z, je)
    z_tilde = np.asarray(z) - core._col(zeta) * e - core._col(zeta_p) * je
    den = 1.0 + t * zeta
    ce = (t + zeta) / den
    cje = (zeta_p + t * j_pairing(z)) / den
    ct = np.sqrt(1.0 - t * t) / den
    return core._col(ce) * e + core._col(cje) * je + core._col(ct) * z_tilde


def transvection_minimal(t: float, e, z, *, extended: bool = False) -> np.ndarray:
    """g_{te}(z) for a minimal tripotent e and t in [0, 1)."""
    e = as_element(e)
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must be in [0,1), got {t}")
    if tripotents.is_tripotent(e) != TripotentRank.RANK_ONE:
        raise PreconditionViolation("transvection_minimal needs a minimal tripotent")
    core.check_same_space(e, z)
    _check_ball(z, extended, t)
    return _minimal_transvection_raw(t, e, conj_j(e), z)


def transvection_maximal(t: float, e, z, *, extended: bool = False) -> np.ndarray:
    """g_{te}(z) for a maximal tripotent e and t in [0, 1).

    With je = sigma*e the map is
        g(z) = (t + sigma t (1-t^2) <z,jz> / den) e + ((1-t^2)/den) z,
        den  = 1 + 2t<z,e> + sigma t^2 <z,jz>.
    """
    e = as_element(e)
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must be in [0,1), got {t}")
    if tripotents.is_tripotent(e) != TripotentRank.RANK_TWO:
        raise PreconditionViolation("transvection_maximal needs a maximal tripotent")
    core.check_same_space(e, z)
    _check_ball(z, extended, t)
    sigma = inner(conj_j(e), e) / inner(e, e)
    w = j_pairing(z)
    den = 1.0 + 2.0 * t * inner(z, e) + sigma * t * t * w
    if np.min(np.abs(den)) < 1e-14:
        if np.max(spin_norm(z)) <= 1.0 + _BALL_SLACK:
            raise ConsistencyError("transvection denominator vanished inside the ball")
        raise DomainError("transvection denominator vanished on the extended domain")
    ce = t + sigma * t * (1.0 - t * t) * w / den
    return core._col(ce) * e + core._col((1.0 - t * t) / den) * np.asarray(z)


def bergman_sqrt(a) -> np.ndarray:
    """B_a = B(a,a)^(1/2) as a matrix, built from the spectral frame of a.

    Acts as 1-s1^2 on C*e1, 1-s2^2 on C*e2 and sqrt((1-s1^2)(1-s2^2)) on the
    orthogonal complement; the smallest scalar is 1-||a||^2.
    """
    a = as_element(a)
    n = a.shape[0]
    na = float(spin_norm(a))
    if na >= 1.0:
        raise DomainError(f"bergman_sqrt needs ||a|| < 1, got {na}")
    if na == 0.0:
        return np.eye(n, dtype=np.complex128)
    frame = spectral_decompose(a)
    p1 = 2.0 * np.outer(frame.e1, np.conj(frame.e1))
    p2 = 2.0 * np.outer(frame.e2, np.conj(frame.e2))
    c1 = 1.0 - frame.s1**2
    c2 = 1.0 - frame.s2**2
    c3 = np.sqrt(c1 * c2)
    return c3 * (np.eye(n, dtype=np.complex128) - p1 - p2) + c1 * p1 + c2 * p2


class Transvection:
    """g_a with the spectral frame of a cached for repeated application."""

    def __init__(self, a):
        a = as_element(a)
        norm = float(spin_norm(a))
        if norm >= 1.0:
            raise DomainError(f"transvection parameter must satisfy ||a|| < 1, got {norm}")
        self.a = a
        self.norm = norm
        self.frame = spectral_decompose(a) if norm > 0.0 else None
        if self.frame is not None:
            self._je1 = conj_j(self.frame.e1)
            self._je2 = conj_j(self.frame.e2)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def inverse(self) -> "Transvection":
        return Transvection(-self.a)

    def __call__(self, z, *, extended: bool = False) -> np.ndarray:
        core.check_same_space(self.a, z)
        if self.frame is None:
            return np.array(z, dtype=np.complex128, copy=True)
        nz = float(np.max(spin_norm(z)))
        if nz > 1.0 + _BALL_SLACK:
            if not extended:
                raise DomainError(
                    f"||z|| = {nz:.6f} > 1; pass extended=True for the extended domain"
                )
            if nz * self.norm >= 1.0:
                raise DomainError(
                    f"||z|| = {nz:.6f} outside the extended domain of radius "
                    f"{1.0 / self.norm:.6f}"
                )
            # extended domain: the defining route stays valid up to 1/||a||
            return self.a + quasi_inverse_image(self.a, z)
        f = self.frame
        w = _minimal_transvection_raw(f.s2, f.e2, self._je2, z)
        return _minimal_transvection_raw(f.s1, f.e1, self._je1, w)


def quasi_inverse_image(a, z) -> np.ndarray:
    """B_a applied to z^(-a); the non-constant part of the defining formula."""
    b_a = bergman_sqrt(a)
    zi = np.asarray(z, dtype=np.complex128)
    w = j_pairing(zi)
    r = 1.0 + 2.0 * inner(zi, a) + w * np.conj(j_pairing(a))
    qi = (zi + core._col(w) * conj_j(a)) / core._col(r)
    return qi @ b_a.T


def transvection_apply(a, z, *, extended: bool = False) -> np.ndarray:
    """g_a(z) = a + B_a z^(-a), evaluated through the frame factorization."""
    return Transvection(a)(z, extended=extended)


def transvection_apply_bergman(a, z) -> np.ndarray:
    """Defining route g_a(z) = a + B_a z^(-a); cross-validation oracle for
    the frame-factorized path."""
    a = as_element(a)
    if float(spin_norm(a)) == 0.0:
        return np.array(z, dtype=np.complex128, copy=True)
    return a + quasi_inverse_image(a, z)


# ---------------------------------------------------------------------------
# full automorphisms g = T o g_a
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Automorphism:
    """g = T o g_a, the unique normal form of a ball automorphism."""

    isometry: TripleIsometry
    a: np.ndarray
    _transvection: Transvection = field(init=False, repr=False)

    def __post_init__(self):
        a = as_element(self.a)
        if self.isometry.dim != a.shape[0]:
            raise DimensionMismatch("isometry and parameter dimensions differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "_transvection", Transvection(a))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def is_linear(self) -> bool:
        return self._transvection.frame is None

    def apply(self, z, *, extended: bool = False) -> np.ndarray:
        return self.isometry.apply(self._transvection(z, extended=extended))

    def to_payload(self) -> dict:
        """{theta, ortho row-major, a as 2n floats} wire format."""
        return {
            "theta": float(self.isometry.theta),
            "ortho": [float(v) for v in self.isometry.ortho.ravel()],
            "a": core.element_to_floats(self.a),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Automorphism":
        a = core.element_from_floats(payload["a"])
        n = a.shape[0]
        ortho = np.asarray(payload["ortho"], dtype=np.float64).reshape(n, n)
        return cls(TripleIsometry(payload["theta"], ortho), a)


def automorphism_apply(g: Automorphism, z, *, extended: bool = False) -> np.ndarray:
    return g.apply(z, extended=extended)


def fixed_point_residual(g: Automorphism, z) -> float:
    """||g(z) - z|| in the spin norm; zero exactly at fixed points."""
    return float(spin_norm(g.apply(z) - np.asarray(z, dtype=np.complex128)))


def maximal_parameter_reduction(a) -> tuple:
    """Split a maximal-tripotent multiple a as a = t * mu * e.

    Returns (t, e, mu) with t = |a| > 0, e a maximal tripotent fixed by j
    (je = e), and |mu| = 1.  Fixed points transport along the phase law:
    g_a(w) = w iff g_{te}(z) = z for z = conj(mu) * w.
    """
    a = as_element(a)
    cls = classify_maximal(a)
    t, alpha = cls
    u = a / t
    mu = np.exp(0.5j * np.angle(alpha))
    e = mu * u
    return t, e, np.conj(mu)


def classify_maximal(a) -> tuple:
    """(|a|, alpha) with ja = alpha a; raises if a is not a maximal multiple."""
    a = as_element(a)
    kind = tripotents.classify(a)
    if kind.kind != tripotents.TripotentKind.MAXIMAL_MULTIPLE:
        raise PreconditionViolation("parameter is not a maximal-tripotent multiple")
    ipaa = float(np.real(inner(a, a)))
    alpha = inner(conj_j(a), a) / ipaa
    return float(np.sqrt(ipaa)), alpha
