"""Arithmetic of a finite-dimensional spin factor.

The space is C^n (n >= 2) with the Hilbert inner product <x,y> (linear in
the first slot, conjugate-linear in the second), the conjugation j fixed to
coordinatewise complex conjugation in the canonical basis, the equivalent
norm

    ||x||^2 = <x,x> + sqrt(<x,x>^2 - |<x,jx>|^2),

and the triple product

    {x,y,z} = <x,y> z + <z,y> x - <x,jz> jy.

Elements are plain complex numpy vectors; every function here is pure and
broadcasts over leading axes where that is meaningful (the last axis is the
coordinate axis).  Operators are returned as dense n x n complex matrices,
except the conjugate-linear quadratic representation which gets a thin
wrapper recording its conjugate-linear action.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    QuasiInverseUndefined,
)

# |r(x,y)| at or below QUASI_INVERSE_RTOL * max(1, ||x|| ||y||)^2 counts as
# not quasi-invertible.
QUASI_INVERSE_RTOL = 1e-12


def as_element(coords) -> np.ndarray:
    """Canonicalize coordinates to a 1-D complex128 vector."""
    x = np.asarray(coords, dtype=np.complex128)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a coordinate vector, got shape {x.shape}")
    if x.shape[-1] < 2:
        raise DimensionMismatch("a spin factor needs dimension >= 2")
    return x


def check_same_space(*elements) -> int:
    """Return the common dimension, raising DimensionMismatch otherwise."""
    dims = {np.shape(e)[-1] for e in elements}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def conj_j(x) -> np.ndarray:
    """The conjugation j: coordinatewise complex conjugation."""
    return np.conj(x)


def inner(x, y):
    """Hilbert inner product, linear in x and conjugate-linear in y."""
    return np.sum(np.asarray(x) * np.conj(y), axis=-1)


def j_pairing(x):
    """<x, jx> = sum of squared coordinates."""
    x = np.asarray(x)
    return np.sum(x * x, axis=-1)


def hilbert_norm(x):
    return np.sqrt(np.real(inner(x, x)))


def spin_norm(x):
    """Spin-factor norm; always >= hilbert_norm, equal exactly on scalar
    multiples of maximal tripotents.

    The radicand <x,x>^2 - |<x,jx>|^2 equals 4(|p|^2|q|^2 - (p.q)^2) for
    x = p + iq with real p, q; evaluating that Gram determinant through an
    explicit projection keeps the norm accurate near maximal-tripotent
    directions, where the direct form cancels catastrophically.
    """
    x = np.asarray(x, dtype=np.complex128)
    p = x.real
    q = x.imag
    pp = np.sum(p * p, axis=-1)
    qq = np.sum(q * q, axis=-1)
    swap = qq > pp
    if np.any(swap):
        mask = swap[..., None]
        p, q = np.where(mask, q, p), np.where(mask, p, q)
        pp, qq = np.where(swap, qq, pp), np.where(swap, pp, qq)
    pq = np.sum(p * q, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(pp > 0.0, pq / np.where(pp > 0.0, pp, 1.0), 0.0)
    q_perp = q - np.asarray(coef)[..., None] * p
    gram = pp * np.sum(q_perp * q_perp, axis=-1)
    return np.sqrt(pp + qq + 2.0 * np.sqrt(gram))


def _col(scalar):
    # lift a scalar (or batch of scalars) onto the coordinate axis
    return np.asarray(scalar)[..., None]


def triple_product(x, y, z) -> np.ndarray:
    """{x,y,z} = <x,y> z + <z,y> x - <x,jz> jy."""
    check_same_space(x, y, z)
    return (
        _col(inner(x, y)) * np.asarray(z)
        + _col(inner(z, y)) * np.asarray(x)
        - _col(inner(x, conj_j(z))) * conj_j(y)
    )


def box_operator(x, y) -> np.ndarray:
    """Matrix of z -> {x,y,z} (complex-linear)."""
    n = check_same_space(x, y)
    x = as_element(x)
    y = as_element(y)
    return (
        inner(x, y) * np.eye(n, dtype=np.complex128)
        + np.outer(x, np.conj(y))
        - np.outer(np.conj(y), x)
    )


@dataclass(frozen=True, eq=False)
class QuadraticRep:
    """Conjugate-linear operator z -> matrix @ conj(z), i.e. Q(x)."""

    matrix: np.ndarray

    def __call__(self, z) -> np.ndarray:
        return (np.conj(z) @ self.matrix.T)

    def compose_matrix(self, other: "QuadraticRep") -> np.ndarray:
        """Complex-linear matrix of self o other (two conjugations cancel)."""
        return self.matrix @ np.conj(other.matrix)


def quadratic_rep(x) -> QuadraticRep:
    """Q(x): z -> {x,z,x} = 2<x,z> x - <x,jx> jz."""
    x = as_element(x)
    n = x.shape[0]
    return QuadraticRep(2.0 * np.outer(x, x) - j_pairing(x) * np.eye(n, dtype=np.complex128))


def bergman_operator(x, y) -> np.ndarray:
    """B(x,y) = I - 2 D(x,y) + Q(x)Q(y) as a complex-linear matrix."""
    n = check_same_space(x, y)
    qq = quadratic_rep(x).compose_matrix(quadratic_rep(y))
    return np.eye(n, dtype=np.complex128) - 2.0 * box_operator(x, y) + qq


def bergman_apply(x, y, z) -> np.ndarray:
    """B(x,y)z through its closed form in span{x, jy, z}.

    Coefficients:
        on z : 1 - 2<x,y> + <x,jx><jy,y>
        on x : -2<z,y>(1 - 2<x,y>) - 2<x,jz><jy,y>
        on jy: 2<x,jz> - 2<x,jx><z,y>
    """
    check_same_space(x, y, z)
    ipxy = inner(x, y)
    wx = j_pairing(x)
    wyc = np.conj(j_pairing(y))  # <jy,y>
    zy = inner(z, y)
    xjz = inner(x, conj_j(z))
    cz = 1.0 - 2.0 * ipxy + wx * wyc
    cx = -2.0 * zy * (1.0 - 2.0 * ipxy) - 2.0 * xjz * wyc
    cjy = 2.0 * xjz - 2.0 * wx * zy
    return _col(cz) * np.asarray(z) + _col(cx) * np.asarray(x) + _col(cjy) * conj_j(y)


def r_invariant(x, y):
    """r(x,y) = 1 - 2<x,y> + <x,jx><jy,y>; B(x,y) invertible iff r != 0."""
    check_same_space(x, y)
    return 1.0 - 2.0 * inner(x, y) + j_pairing(x) * np.conj(j_pairing(y))


def is_quasi_invertible(x, y, rtol: float = QUASI_INVERSE_RTOL) -> bool:
    gate = rtol * max(1.0, float(spin_norm(x)) * float(spin_norm(y))) ** 2
    return abs(r_invariant(x, y)) > gate


def quasi_inverse(x, y) -> np.ndarray:
    """x^y = (x - <x,jx> jy) / r(x,y).

    Raises QuasiInverseUndefined when |r| is below the scale-aware tolerance.
    """
    check_same_space(x, y)
    r = r_invariant(x, y)
    gate = QUASI_INVERSE_RTOL * max(1.0, float(spin_norm(x)) * float(spin_norm(y))) ** 2
    if abs(r) <= gate:
        raise QuasiInverseUndefined(f"|r(x,y)| = {abs(r):.3e} <= {gate:.3e}")
    return (np.asarray(x, dtype=np.complex128) - j_pairing(x) * conj_j(y)) / r


def element_to_floats(x) -> list:
    """Flat [re0, im0, re1, im1, ...] serialization."""
    x = as_element(x)
    out = np.empty(2 * x.shape[0], dtype=np.float64)
    out[0::2] = x.real
    out[1::2] = x.imag
    return out.tolist()


def element_from_floats(values) -> np.ndarray:
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.shape[0] % 2:
        raise DimensionMismatch("element serialization must be a flat list of 2n floats")
    return as_element(vals[0::2] + 1j * vals[1::2])


@dataclass(frozen=True)
class SpinSpace:
    """The ambient space: C^dim with the canonical conjugation."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionMismatch("a spin factor needs dimension >= 2")

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.complex128)

    def basis(self, k: int) -> np.ndarray:
        """Canonical basis vector e_k (a maximal tripotent fixed by j)."""
        e = self.zero()
        e[k] = 1.0
        return e

    def minimal_tripotent(self, k: int = 0, m: int = 1) -> np.ndarray:
        """(e_k + i e_m)/2, a minimal tripotent; its j-image is orthogonal to it."""
        if k == m:
            raise ValueError("minimal tripotent needs two distinct basis indices")
        c = self.zero()
        c[k] = 0.5
        c[m] = 0.5j
        return c
