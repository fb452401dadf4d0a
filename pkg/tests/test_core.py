"""Element arithmetic: norms, triple product, Bergman machinery, quasi-inverse."""

import numpy as np
import pytest

import spinfactor as sf
from spinfactor import errors, sampling
from conftest import assert_close


# ---------------------------------------------------------------------------
# spin norm
# ---------------------------------------------------------------------------


def test_spin_norm_maximal_basis_vector(e1):
    assert sf.spin_norm(e1) == pytest.approx(1.0, abs=1e-15)


def test_spin_norm_minimal_tripotent(cmin):
    # <c,c> = 1/2 and <c,jc> = 0, so the norm doubles the Hilbert square
    assert sf.spin_norm(cmin) == pytest.approx(1.0, abs=1e-15)
    assert sf.hilbert_norm(cmin) == pytest.approx(np.sqrt(0.5), abs=1e-15)


def test_spin_norm_rank2_mixture_equals_top_coefficient(cmin):
    # oracle: the norm is the largest spectral coefficient
    x = 0.8 * cmin + 0.2 * sf.conj_j(cmin)
    assert sf.spin_norm(x) == pytest.approx(0.8, abs=1e-14)


def test_spin_norm_homogeneous_and_definite(space4):
    rng = sampling.rng_for(11)
    x = sampling.random_element(rng, 4, min_norm=0.3)
    for lam in (2.0, 0.25, 1j, -3.5j):
        assert sf.spin_norm(lam * x) == pytest.approx(
            abs(lam) * sf.spin_norm(x), rel=1e-13
        )
    assert sf.spin_norm(space4.zero()) == 0.0


def test_spin_norm_dominates_hilbert_norm(space4):
    for i in range(200):
        x = sampling.random_element(sampling.rng_for(0, i), 4, min_norm=0.05)
        assert sf.spin_norm(x) >= sf.hilbert_norm(x) - 1e-12


def test_spin_norm_stable_near_maximal_boundary(e1):
    # the radicand cancels here; the Gram form must not leak ~sqrt(eps) noise
    for phase in (1.0, np.exp(0.25j * np.pi), 1j):
        z = (1.0 - 1e-12) * phase * e1
        assert abs(sf.spin_norm(z) - (1.0 - 1e-12)) < 1e-14


def test_spin_norm_batched(space4, e1, cmin):
    batch = np.stack([e1, cmin, 0.3 * e1])
    assert_close(sf.spin_norm(batch), [1.0, 1.0, 0.3], tol=1e-14)


# ---------------------------------------------------------------------------
# triple product and operators
# ---------------------------------------------------------------------------


def test_triple_product_maximal_tripotent(e1):
    assert_close(sf.triple_product(e1, e1, e1), e1)


def test_triple_product_minimal_tripotent(cmin):
    assert_close(sf.triple_product(cmin, cmin, cmin), cmin)


def test_box_of_maximal_is_identity_on_anything(e1, cmin):
    assert_close(sf.triple_product(e1, e1, cmin), cmin)
    assert_close(sf.box_operator(e1, e1), np.eye(4))


def test_box_zero_and_orthogonal_pair(space4, e1, cmin):
    assert_close(sf.box_operator(e1, space4.zero()), np.zeros((4, 4)))
    assert_close(sf.box_operator(cmin, sf.conj_j(cmin)), np.zeros((4, 4)))


def test_triple_product_dimension_mismatch(e1):
    with pytest.raises(errors.DimensionMismatch):
        sf.triple_product(e1, e1, np.ones(6, dtype=complex))


def test_quadratic_rep_values(space4, e1, cmin):
    q = sf.quadratic_rep(e1)
    z = sampling.random_element(sampling.rng_for(5), 4)
    assert_close(q(z), 2 * sf.inner(e1, z) * e1 - sf.conj_j(z))
    assert_close(q(e1), e1)
    qc = sf.quadratic_rep(cmin)
    assert_close(qc(z), 2 * sf.inner(cmin, z) * cmin)
    x = sampling.random_element(sampling.rng_for(6), 4)
    assert_close(qc(qc(x)), 2 * sf.inner(x, cmin) * cmin)
    assert_close(qc.compose_matrix(qc) @ x, 2 * sf.inner(x, cmin) * cmin)
    assert_close(sf.quadratic_rep(space4.zero()).matrix, np.zeros((4, 4)))


def test_quadratic_rep_conjugate_linear(cmin):
    q = sf.quadratic_rep(cmin)
    z = sampling.random_element(sampling.rng_for(7), 4)
    assert_close(q(2j * z), -2j * q(z))


def test_bergman_trivial_and_maximal(space4, e1):
    x = sampling.random_element(sampling.rng_for(8), 4)
    assert_close(sf.bergman_operator(x, space4.zero()), np.eye(4))
    assert_close(sf.bergman_operator(e1, e1), np.zeros((4, 4)))


def test_bergman_scalar_family(e1):
    t = 0.5
    assert_close(sf.bergman_operator(t * e1, t * e1), (9.0 / 16.0) * np.eye(4))
    for t in (0.1, 0.9):
        assert_close(
            sf.bergman_operator(t * e1, t * e1), (1 - t * t) ** 2 * np.eye(4), tol=1e-13
        )


def test_bergman_matrix_matches_span_form():
    for i in range(100):
        rng = sampling.rng_for(9, i)
        x, y, z = (sampling.random_element(rng, 5) for _ in range(3))
        assert_close(sf.bergman_operator(x, y) @ z, sf.bergman_apply(x, y, z), tol=1e-12)


def test_bergman_action_on_x_and_jy():
    # specializations of the span form on the pair itself
    for i in range(50):
        rng = sampling.rng_for(10, i)
        x, y = (sampling.random_element(rng, 5) for _ in range(2))
        ipxy = sf.inner(x, y)
        ii = sf.j_pairing(x) * np.conj(sf.j_pairing(y))
        bx = x * ((1 - 2 * ipxy) ** 2 - ii) + sf.conj_j(y) * (
            2 * sf.j_pairing(x) * (1 - ipxy)
        )
        assert_close(sf.bergman_operator(x, y) @ x, bx, tol=1e-12)
        bjy = x * (-2 * np.conj(sf.j_pairing(y)) * (1 - ipxy)) + sf.conj_j(y) * (1 - ii)
        assert_close(sf.bergman_operator(x, y) @ sf.conj_j(y), bjy, tol=1e-12)


# ---------------------------------------------------------------------------
# r invariant and quasi-inverse
# ---------------------------------------------------------------------------


def test_r_invariant_values(space4, e1):
    x = sampling.random_element(sampling.rng_for(12), 4)
    assert sf.r_invariant(x, space4.zero()) == pytest.approx(1.0)
    assert sf.r_invariant(e1, e1) == pytest.approx(0.0, abs=1e-15)
    for eps in (1e-2, 1e-4):
        # r(e1, (1 - eps/2) e1) = eps^2/4 by expanding the square
        assert sf.r_invariant(e1, (1 - eps / 2) * e1) == pytest.approx(
            eps * eps / 4, rel=1e-10
        )


def test_quasi_inverse_trivial_and_disc(space4, e1):
    x = sampling.random_element(sampling.rng_for(13), 4)
    assert_close(sf.quasi_inverse(x, space4.zero()), x)
    for s, w in ((0.3, 0.7), (-0.5, 0.2), (0.9, -0.9)):
        assert_close(
            sf.quasi_inverse(s * e1, w * e1), (s / (1 - s * w)) * e1, tol=1e-13
        )


def test_quasi_inverse_undefined_at_zero_r(e1):
    with pytest.raises(errors.QuasiInverseUndefined):
        sf.quasi_inverse(e1, e1)


def test_quasi_inverse_defining_identity():
    for i in range(200):
        rng = sampling.rng_for(14, i)
        x, y = sampling.random_quasi_invertible_pair(rng, 5)
        lhs = sf.bergman_operator(x, y) @ sf.quasi_inverse(x, y)
        rhs = x - sf.quadratic_rep(x)(y)
        assert_close(lhs, rhs, tol=1e-10)


def test_invertibility_dichotomy():
    # constructed r = 0 pairs are singular; pairs with |r| bounded away are not
    for i in range(60):
        rng = sampling.rng_for(15, i)
        x, y = sampling.null_bergman_pair(rng, 5)
        assert abs(sf.r_invariant(x, y)) < 1e-13
        smin = np.linalg.svd(sf.bergman_operator(x, y), compute_uv=False)[-1]
        assert smin <= 1e-8
    for i in range(60):
        rng = sampling.rng_for(16, i)
        x, y = sampling.random_quasi_invertible_pair(rng, 5, r_min=1e-3)
        smin = np.linalg.svd(sf.bergman_operator(x, y), compute_uv=False)[-1]
        assert smin >= 1e-6


# ---------------------------------------------------------------------------
# algebraic identities (seeded property checks)
# ---------------------------------------------------------------------------


def test_jordan_triple_identity():
    for i in range(150):
        rng = sampling.rng_for(17, i)
        dim = int(rng.integers(2, 9))
        a, b, x, y, z = (sampling.random_element(rng, dim, min_norm=0.2) for _ in range(5))
        lhs = sf.triple_product(a, b, sf.triple_product(x, y, z))
        rhs = (
            sf.triple_product(sf.triple_product(a, b, x), y, z)
            - sf.triple_product(x, sf.triple_product(b, a, y), z)
            + sf.triple_product(x, y, sf.triple_product(a, b, z))
        )
        scale = np.prod([sf.spin_norm(v) for v in (a, b, x, y, z)])
        assert sf.spin_norm(lhs - rhs) <= 1e-10 * scale


def test_norm_cube_law():
    for i in range(150):
        rng = sampling.rng_for(18, i)
        x = sampling.random_element(rng, 6, min_norm=0.1, max_norm=2.0)
        n = sf.spin_norm(x)
        assert sf.spin_norm(sf.triple_product(x, x, x)) == pytest.approx(n**3, rel=1e-10)


def test_triple_product_submultiplicative():
    for i in range(150):
        rng = sampling.rng_for(19, i)
        x, y, z = (sampling.random_element(rng, 6, min_norm=0.1) for _ in range(3))
        bound = sf.spin_norm(x) * sf.spin_norm(y) * sf.spin_norm(z)
        assert sf.spin_norm(sf.triple_product(x, y, z)) <= bound * (1 + 1e-10)


def test_conjugation_equivariance_and_isometry():
    for i in range(100):
        rng = sampling.rng_for(20, i)
        x, y, z = (sampling.random_element(rng, 6) for _ in range(3))
        lhs = sf.conj_j(sf.triple_product(x, y, z))
        rhs = sf.triple_product(sf.conj_j(x), sf.conj_j(y), sf.conj_j(z))
        assert sf.spin_norm(lhs - rhs) <= 1e-12
        assert abs(sf.spin_norm(sf.conj_j(x)) - sf.spin_norm(x)) <= 1e-12


def test_triple_product_linearity_slots():
    rng = sampling.rng_for(21)
    x, y, z, w = (sampling.random_element(rng, 5) for _ in range(4))
    a, b = 0.7 - 0.2j, -1.1 + 0.4j
    # complex-linear and symmetric in the outer slots
    assert_close(
        sf.triple_product(a * x + b * w, y, z),
        a * sf.triple_product(x, y, z) + b * sf.triple_product(w, y, z),
        tol=1e-12,
    )
    assert_close(sf.triple_product(x, y, z), sf.triple_product(z, y, x), tol=1e-13)
    # conjugate-linear in the middle slot
    assert_close(
        sf.triple_product(x, a * y, z),
        np.conj(a) * sf.triple_product(x, y, z),
        tol=1e-12,
    )


def test_box_hermitian_with_nonnegative_spectrum():
    # surrogate for the positivity axiom: D(x,x) as a matrix is Hermitian
    # with nonnegative eigenvalues
    for i in range(50):
        rng = sampling.rng_for(22, i)
        x = sampling.random_element(rng, 5, min_norm=0.1)
        d = sf.box_operator(x, x)
        assert np.max(np.abs(d - d.conj().T)) <= 1e-12
        assert np.min(np.linalg.eigvalsh(d)) >= -1e-12


# ---------------------------------------------------------------------------
# serialization and space helpers
# ---------------------------------------------------------------------------


def test_element_serialization_round_trip():
    rng = sampling.rng_for(23)
    x = sampling.random_element(rng, 7)
    flat = sf.element_to_floats(x)
    assert len(flat) == 14
    assert_close(sf.element_from_floats(flat), x, tol=0.0)
    with pytest.raises(errors.DimensionMismatch):
        sf.element_from_floats([1.0, 2.0, 3.0])


def test_spin_space_validation():
    with pytest.raises(errors.DimensionMismatch):
        sf.SpinSpace(1)
    sp = sf.SpinSpace(3)
    assert_close(sp.basis(2), [0, 0, 1])
    with pytest.raises(ValueError):
        sp.minimal_tripotent(1, 1)
