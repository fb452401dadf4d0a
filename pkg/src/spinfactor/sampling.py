"""Seeded random generators for elements, tripotents, and isometries.

Streams are split per sample index through numpy's SeedSequence spawn
keys, so serial and (hypothetically) parallel evaluation of the same
experiment visit identical random states: sample i always draws from
default_rng(SeedSequence(seed, spawn_key=(i,))).
"""

from __future__ import annotations

import numpy as np

from . import core
from .automorphisms import TripleIsometry
from .core import spin_norm
from .tripotents import spectral_decompose


def rng_for(seed: int, index: int | None = None) -> np.random.Generator:
    if index is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def random_direction(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Gaussian direction normalized to spin norm 1."""
    while True:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        n = float(spin_norm(v))
        if n > 1e-6:
            return v / n


def random_element(
    rng: np.random.Generator, dim: int, max_norm: float = 0.95, min_norm: float = 0.0
) -> np.ndarray:
    """Random element with spin norm uniform in [min_norm, max_norm)."""
    return rng.uniform(min_norm, max_norm) * random_direction(rng, dim)


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish real orthogonal matrix (QR with sign-fixed diagonal)."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def random_isometry(rng: np.random.Generator, dim: int) -> TripleIsometry:
    return TripleIsometry(rng.uniform(0.0, 2.0 * np.pi), random_orthogonal(rng, dim))


def random_minimal_tripotent(rng: np.random.Generator, dim: int) -> np.ndarray:
    return spectral_decompose(random_direction(rng, dim)).e1


def random_real_maximal_tripotent(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Maximal tripotent fixed by j (real coordinates, Hilbert-unit)."""
    v = rng.standard_normal(dim)
    return (v / np.linalg.norm(v)).astype(np.complex128)


def random_quasi_invertible_pair(
    rng: np.random.Generator, dim: int, r_min: float = 1e-6, max_norm: float = 0.95
) -> tuple:
    while True:
        x = random_element(rng, dim, max_norm)
        y = random_element(rng, dim, max_norm)
        if abs(core.r_invariant(x, y)) >= r_min:
            return x, y


def null_bergman_pair(rng: np.random.Generator, dim: int, s_max: float = 0.5) -> tuple:
    """(x, y) with r(x, y) = 0 exactly: x = e maximal real, y = e + s*d with
    d = (u + iv)/sqrt(2) built from real unit vectors u, v orthogonal to e
    and to each other (so <d,e> = 0 and <d,jd> = 0)."""
    if dim < 3:
        raise ValueError("null pair construction needs dim >= 3")
    e_r = rng.standard_normal(dim)
    e_r /= np.linalg.norm(e_r)
    u = np.zeros(dim)
    u[int(np.argmin(np.abs(e_r)))] = 1.0
    u -= (u @ e_r) * e_r
    u /= np.linalg.norm(u)
    while True:
        w = rng.standard_normal(dim)
        w -= (w @ e_r) * e_r
        w -= (w @ u) * u
        norm_w = np.linalg.norm(w)
        if norm_w > 1e-8:
            break
    d = (u + 1j * w / norm_w) / np.sqrt(2.0)
    s = rng.uniform(0.05, s_max) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    e = e_r.astype(np.complex128)
    return e, e + s * d
