"""Schedule fixed points, the two boundary constructions, density witnesses."""

import numpy as np
import pytest

import spinfactor as sf
from spinfactor import errors, sampling
from spinfactor.fixedpoints import (
    CONDITION_BOUNDARY_LIMIT,
    CONDITION_NORMS_AWAY,
    CONDITION_NOT_MAXIMAL,
    CONDITION_RANK_ONE,
)
from conftest import assert_close


def _disc_alpha_fixed_point(alpha, t):
    # root in (0,1) of z = alpha (t+z)/(1+tz), i.e. t z^2 + (1-alpha) z - alpha t = 0
    return (-(1 - alpha) + np.sqrt((1 - alpha) ** 2 + 4 * alpha * t * t)) / (2 * t)


# ---------------------------------------------------------------------------
# Earle-Hamilton iteration
# ---------------------------------------------------------------------------


def test_earle_hamilton_linear_contraction(space4):
    z = sf.earle_hamilton_fixed_point(lambda w: 0.5 * w, 0.9 * space4.basis(0), 1e-12, 200)
    assert sf.spin_norm(z) <= 1e-11


def test_earle_hamilton_disc_moebius_matches_quadratic_oracle(e1):
    alpha, t = 0.9, 0.5
    g = sf.Transvection(t * e1)
    z = sf.earle_hamilton_fixed_point(lambda w: alpha * g(w), np.zeros(4), 1e-13, 10_000)
    assert_close(z, _disc_alpha_fixed_point(alpha, t) * e1, tol=1e-11)


def test_earle_hamilton_constant_map(space4):
    a = 0.4 * space4.basis(1)
    z = sf.earle_hamilton_fixed_point(lambda w: a, space4.zero(), 1e-15, 5)
    assert_close(z, a)


def test_earle_hamilton_budget_exhaustion(e1):
    with pytest.raises(errors.NoConvergence):
        sf.earle_hamilton_fixed_point(lambda w: 0.999 * w, 0.9 * e1, 1e-14, 3)


# ---------------------------------------------------------------------------
# weak fixed points
# ---------------------------------------------------------------------------


def test_weak_fixed_point_boundary_transvection(e1):
    g = sf.Automorphism(sf.TripleIsometry.identity(4), 0.5 * e1)
    rep = sf.weak_fixed_point(g)
    assert CONDITION_BOUNDARY_LIMIT in rep.conditions
    assert sf.spin_norm(rep.xi - e1) <= 1e-6
    assert rep.residual <= 1e-6
    # each stage iterate solves its own damped equation
    for k, alpha in enumerate(rep.alphas):
        zk = _disc_alpha_fixed_point(alpha, 0.5)
        assert abs(rep.norms[k] - zk) <= 1e-7


def test_weak_fixed_point_linear_map(space4):
    g = sf.Automorphism(sf.TripleIsometry.identity(4), space4.zero())
    rep = sf.weak_fixed_point(g)
    assert sf.spin_norm(rep.xi) == 0.0
    assert rep.residual == 0.0
    assert CONDITION_NOT_MAXIMAL in rep.conditions
    assert CONDITION_NORMS_AWAY in rep.conditions


def test_weak_fixed_point_minimal_direction_rank_one(cmin):
    # transvection along a minimal tripotent: iterates stay rank one and the
    # limit is an actual fixed point
    g = sf.Automorphism(sf.TripleIsometry.identity(4), 0.4 * cmin)
    rep = sf.weak_fixed_point(g)
    assert CONDITION_RANK_ONE in rep.conditions
    assert rep.residual <= 1e-8
    assert sf.spin_norm(rep.xi - cmin) <= 1e-6


def test_weak_fixed_point_inner_tolerance_invariant(e1):
    g = sf.Automorphism(sf.TripleIsometry.identity(4), 0.3 * e1)
    rep = sf.weak_fixed_point(g, schedule=sf.geometric_schedule(12))
    z = np.zeros(4, dtype=complex)
    for k, alpha in enumerate(rep.alphas):
        zk = _disc_alpha_fixed_point(alpha, 0.3) * e1
        assert sf.spin_norm(zk * rep.norms[k] / sf.spin_norm(zk) - zk) <= 1e-9
        # the recorded iterate satisfies ||z_k - alpha g(z_k)|| <= inner tol
        zk_rec = rep.norms[k] * e1
        resid = sf.spin_norm(zk_rec - alpha * g.apply(zk_rec))
        assert resid <= 2 * rep.inner_tols[k]


def test_weak_fixed_point_boundary_condition_forces_fixedness():
    # whenever the limit sits on the boundary the residual must vanish
    for i, t in enumerate((0.3, 0.5, 0.7)):
        rng = sampling.rng_for(60, i)
        e = sampling.random_real_maximal_tripotent(rng, 5)
        g = sf.Automorphism(sf.TripleIsometry.identity(5), t * e)
        rep = sf.weak_fixed_point(g)
        if rep.norms[-1] >= 1 - 1e-6:
            assert rep.residual <= 1e-5


def test_weak_fixed_point_schedule_validation(e1):
    g = sf.Automorphism(sf.TripleIsometry.identity(4), 0.2 * e1)
    with pytest.raises(errors.PreconditionViolation):
        sf.weak_fixed_point(g, schedule=[0.9, 0.5])
    with pytest.raises(errors.PreconditionViolation):
        sf.weak_fixed_point(g, schedule=[0.5, 1.0])


def test_alpha_scaled_boundary_family_is_alpha_fixed():
    # z_n = -(1/n) e1 + i b_n e_n with b_n = sqrt(1 - 2t/n + 1/n^2) satisfies
    # alpha_n g_{t e1}(z_n) = z_n exactly for alpha_n = 1 - 2t/n: a family of
    # damped fixed points收 whose weak limit 0 is not fixed (g(0) = t e1)
    t = 0.5
    dim = 32
    sp = sf.SpinSpace(dim)
    e = sp.basis(0)
    tv = sf.Transvection(t * e)
    for n in range(2, 31):
        a_n = 1.0 / n
        b_n = np.sqrt(1 - 2 * t * a_n + a_n * a_n)
        alpha_n = 1 - 2 * t * a_n
        z_n = -a_n * e + 1j * b_n * sp.basis(n - 1)
        residual = sf.spin_norm(alpha_n * tv(z_n, extended=True) - z_n)
        assert residual <= 1e-12
        # diagnostics of the family: norms tend to 1, <z,jz> tends to -1
        assert sf.j_pairing(z_n) == pytest.approx(2 * t * a_n - 1, abs=1e-15)
    assert sf.spin_norm(tv(np.zeros(dim))) == pytest.approx(t)


def test_zero_weak_limit_forces_maximal_direction():
    # the alpha-fixed family above has limit 0 while norms approach 1, and
    # its transvection parameter is a maximal multiple; a minimal-direction
    # transvection cannot reproduce that pattern (its limit is fixed)
    t = 0.5
    dim = 32
    sp = sf.SpinSpace(dim)
    assert sf.classify(t * sp.basis(0)).kind.value == "maximal-multiple"
    norms = []
    for n in range(2, 31):
        a_n = 1.0 / n
        b_n = np.sqrt(1 - 2 * t * a_n + a_n * a_n)
        norms.append(sf.spin_norm(-a_n * sp.basis(0) + 1j * b_n * sp.basis(n - 1)))
    assert norms[-1] == pytest.approx(1.0, abs=0.05)
    assert np.all(np.diff(norms) < 0)  # decreasing toward 1 from outside


# ---------------------------------------------------------------------------
# orthogonal construction
# ---------------------------------------------------------------------------


def test_orthogonal_construction_constants():
    sp = sf.SpinSpace(8)
    T = sf.TripleIsometry.cyclic_shift(8)
    z0 = sf.orthogonal_construction(T, 0.5, sp.basis(0), K=7)
    # lambda0 = 0.8, mu0 = 0.6 at t = 1/2
    assert z0[1] == pytest.approx(0.8)
    assert z0[2] == pytest.approx(0.8 * 0.6)
    assert z0[0] == pytest.approx(0.0)


def test_orthogonal_construction_dim48_residuals():
    sp = sf.SpinSpace(48)
    T = sf.TripleIsometry.cyclic_shift(48)
    e = sp.basis(0)
    z0 = sf.orthogonal_construction(T, 0.5, e, K=47)
    assert abs(sf.spin_norm(z0) - 1) <= 1e-8
    g = sf.Automorphism(T, 0.5 * e)
    assert sf.fixed_point_residual(g, z0) <= 1e-8


def test_orthogonal_construction_detects_wraparound():
    sp = sf.SpinSpace(2)
    T = sf.TripleIsometry.cyclic_shift(2)
    with pytest.raises(errors.OrthogonalityViolated):
        sf.orthogonal_construction(T, 0.5, sp.basis(0), K=2)


def test_orthogonal_construction_preconditions():
    sp = sf.SpinSpace(4)
    T = sf.TripleIsometry.cyclic_shift(4)
    with pytest.raises(errors.PreconditionViolation):
        sf.orthogonal_construction(T, 0.5, sp.minimal_tripotent(), K=3)
    with pytest.raises(errors.PreconditionViolation):
        sf.orthogonal_construction(T, 1.5, sp.basis(0), K=3)
    rotated = sf.TripleIsometry(0.3, np.eye(4))  # phase breaks j-commutation
    with pytest.raises(errors.PreconditionViolation):
        sf.orthogonal_construction(rotated, 0.5, sp.basis(0), K=3)


# ---------------------------------------------------------------------------
# sliver construction
# ---------------------------------------------------------------------------


def test_sliver_coefficients_cyclic_shift():
    sp = sf.SpinSpace(6)
    T = sf.TripleIsometry.cyclic_shift(6, 3)
    coeffs = sf.sliver_coefficients(T, sp.basis(0), K=12)
    expected = [1.0 if (k + 1) % 3 == 0 else 0.0 for k in range(12)]
    assert_close(coeffs.a, expected, tol=1e-14)
    for u in (0.2, 0.5, 0.8):
        f_exact = u**3 / (1 - u**3)
        assert coeffs.f_resolvent(u) == pytest.approx(f_exact, rel=1e-12)
        assert coeffs.f_series(u) == pytest.approx(f_exact, abs=2 * u**13)


def test_sliver_coefficients_identity_and_negated():
    sp = sf.SpinSpace(4)
    e = sp.basis(0)
    cid = sf.sliver_coefficients(sf.TripleIsometry.identity(4), e, K=8)
    assert_close(cid.a, np.ones(8), tol=1e-14)
    for u in (0.3, 0.6):
        assert cid.f_resolvent(u) == pytest.approx(u / (1 - u), rel=1e-12)
        assert cid.h(u) == pytest.approx(((1 + u) / (1 - u)) ** 2, rel=1e-12)
    cneg = sf.sliver_coefficients(sf.TripleIsometry.neg_identity(4), e, K=8)
    assert_close(cneg.a, [(-1.0) ** (k + 1) for k in range(8)], tol=1e-14)
    for u in (0.3, 0.6, 0.9):
        assert cneg.f_resolvent(u) == pytest.approx(-u / (1 + u), rel=1e-12)
        assert cneg.h(u) == pytest.approx(1.0, rel=1e-12)


def test_sliver_evaluators_agree():
    for i in range(20):
        rng = sampling.rng_for(61, i)
        T = sf.TripleIsometry(0.0, sampling.random_orthogonal(rng, 5))
        e = sampling.random_real_maximal_tripotent(rng, 5)
        coeffs = sf.sliver_coefficients(T, e, K=80)
        for u in (0.1, 0.4, 0.7):
            tail = u**81 / (1 - u)
            assert abs(coeffs.f_series(u) - coeffs.f_resolvent(u)) <= 2 * tail + 1e-12


def test_sliver_identity_isometry_closed_form():
    for t in (0.3, 0.5, 0.7):
        sp = sf.SpinSpace(4)
        data = sf.sliver_construction(
            sf.TripleIsometry.identity(4), t, sp.basis(0), root_tol=1e-13
        )
        assert data.u0 == pytest.approx((1 - t) / (1 + t), abs=1e-12)
        assert_close(data.z0, sp.basis(0), tol=1e-12)
        assert data.norm_sq == pytest.approx(1.0, abs=1e-12)
        assert data.residual <= 1e-12


def test_sliver_order_two_shift_quadratic_oracle():
    # h(u) = (1+u^2)/(1-u)^2; at t = 1/2 the crossing solves 3u^2 - 8u + 3 = 0
    sp = sf.SpinSpace(2)
    data = sf.sliver_construction(sf.TripleIsometry.cyclic_shift(2), 0.5, sp.basis(0))
    assert data.u0 == pytest.approx((4 - np.sqrt(7)) / 3, abs=1e-10)
    assert data.norm_sq == pytest.approx(1.0, abs=1e-10)
    assert data.residual <= 1e-10


def test_sliver_no_root_for_negated_identity():
    sp = sf.SpinSpace(4)
    with pytest.raises(errors.NoRoot) as exc_info:
        sf.sliver_construction(sf.TripleIsometry.neg_identity(4), 0.5, sp.basis(0))
    data = exc_info.value.data
    assert data.u0 is None
    assert np.max(data.h_profile[:, 1]) < 4.0


def test_sliver_reduces_to_orthogonal_construction():
    # orthogonal iterate family: f vanishes identically and both
    # constructions produce the same boundary fixed point
    sp = sf.SpinSpace(24)
    T = sf.TripleIsometry.cyclic_shift(24)
    e = sp.basis(0)
    t = 0.5
    data = sf.sliver_construction(T, t, e, coeff_count=23)
    z_orth = sf.orthogonal_construction(T, t, e, K=23)
    assert np.max(np.abs(data.coefficients)) <= 1e-12
    assert data.u0 == pytest.approx((1 - t * t) / (1 + t * t), abs=1e-6)
    assert sf.spin_norm(data.z0 - z_orth) <= 1e-8


def test_sliver_fixed_points_random_orthogonal():
    # generic j-commuting isometries: whenever a root is bracketed the
    # construction delivers a genuine boundary fixed point
    found = 0
    for i in range(25):
        rng = sampling.rng_for(62, i)
        T = sf.TripleIsometry(0.0, sampling.random_orthogonal(rng, 6))
        e = sampling.random_real_maximal_tripotent(rng, 6)
        try:
            data = sf.sliver_construction(T, 0.6, e)
        except errors.NoRoot:
            continue
        found += 1
        assert abs(data.norm_sq - 1) <= 1e-9
        assert data.residual <= 1e-9
    assert found >= 5


# ---------------------------------------------------------------------------
# density witnesses
# ---------------------------------------------------------------------------


def test_density_witness_trivial_for_invertible_pair():
    rng = sampling.rng_for(63)
    x, y = sampling.random_quasi_invertible_pair(rng, 5)
    assert_close(sf.density_witness(x, y, eps=1e-3, seed=1), np.zeros(5))


def test_density_witness_for_null_pair(e1):
    z = sf.density_witness(e1, e1, eps=1e-3, seed=2)
    assert 0 < sf.spin_norm(z) < 1e-3
    assert abs(sf.r_invariant(e1, e1 + z)) > 1e-12


def test_density_witness_perturbation_scale(e1):
    # r(e1, e1 + z) = conj(sum z^2), so eps caps |r| at eps^2; a witness
    # below ||z|| < 1e-6 exists only against the eps-scaled gate
    z = sf.density_witness(e1, e1, eps=1e-6, seed=3)
    assert 0 < sf.spin_norm(z) < 1e-6
    r = abs(sf.r_invariant(e1, e1 + z))
    assert r > (1e-6) ** 2 / 16
    assert r == pytest.approx(abs(sf.j_pairing(z)), rel=1e-9)


def test_density_witness_constructed_pairs():
    for i in range(100):
        rng = sampling.rng_for(64, i)
        x, y = sampling.null_bergman_pair(rng, 6)
        z = sf.density_witness(x, y, eps=1e-3, seed=1000 + i)
        assert sf.spin_norm(z) < 1e-3
        assert abs(sf.r_invariant(x, y + z)) > 1e-12


def test_density_witness_deterministic(e1):
    z1 = sf.density_witness(e1, e1, eps=1e-3, seed=77)
    z2 = sf.density_witness(e1, e1, eps=1e-3, seed=77)
    assert_close(z1, z2, tol=0.0)


def test_density_witness_validates_eps(e1):
    with pytest.raises(errors.PreconditionViolation):
        sf.density_witness(e1, e1, eps=0.0, seed=1)
