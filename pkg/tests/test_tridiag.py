import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wynerdof import tridiag as td


def eig_product_roots(p):
    """Independent oracle: det H_p(a) = prod_k (1 + 2a cos(k pi/(p+1))),
    so the real roots are -1/(2cos(k pi/(p+1))) for the nonzero cosines."""
    roots = []
    for k in range(1, p + 1):
        c = math.cos(k * math.pi / (p + 1))
        if abs(c) > 1e-12:
            roots.append(-1.0 / (2.0 * c))
    return sorted(roots)


def dense_det(p, a):
    return 1.0 if p == 0 else float(np.linalg.det(td.h_matrix(p, a)))


class TestDetH:
    def test_order_one_is_always_one(self):
        for a in (0.0, -3.2, 17.5):
            assert td.det_h(1, a) == 1

    def test_vanishes_at_the_order3_critical_gain(self):
        assert abs(td.det_h(3, math.sqrt(2) / 2)) < 1e-15

    def test_order2_at_one_exactly_zero(self):
        assert td.det_h(2, Fraction(1)) == 0
        # one recursion step: u_2 = 1 - a^2
        assert td.det_h(2, Fraction(1, 3)) == 1 - Fraction(1, 9)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            td.det_h(-1, 0.5)

    def test_matches_dense_determinant(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            p = int(rng.integers(0, 41))
            a = float(rng.uniform(-2, 2))
            lhs = td.det_h(p, a)
            rhs = dense_det(p, a)
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))

    @given(st.integers(min_value=0, max_value=25),
           st.floats(min_value=-2, max_value=2, allow_nan=False))
    @settings(max_examples=60, deadline=None)
    def test_recursion_invariant(self, p, a):
        u0, u1, u2 = td.det_h(p, a), td.det_h(p + 1, a), td.det_h(p + 2, a)
        assert abs(u2 - (u1 - a * a * u0)) <= 1e-9 * max(1.0, abs(u2))


class TestBetaPolynomial:
    def test_small_coefficients(self):
        assert td.u_beta_coeffs(0) == (1,)
        assert td.u_beta_coeffs(1) == (1,)
        assert td.u_beta_coeffs(2) == (1, -1)
        assert td.u_beta_coeffs(3) == (1, -2)
        assert td.u_beta_coeffs(5) == (1, -4, 3)

    def test_evaluates_like_the_recursion(self):
        for p in range(0, 12):
            for a in (0.3, 1.1, -0.8):
                val = sum(c * (a * a) ** i for i, c in enumerate(td.u_beta_coeffs(p)))
                assert abs(val - td.det_h(p, a)) < 1e-10


class TestCriticalRoots:
    def test_order2(self):
        rs = td.critical_roots(2)
        assert rs.alphas() == pytest.approx([-1.0, 1.0], abs=1e-12)
        assert all(m == 1 for _, m in rs.roots)

    def test_order3_matches_the_known_drop_gain(self):
        rs = td.critical_roots(3)
        assert rs.alphas() == pytest.approx(
            [-math.sqrt(2) / 2, math.sqrt(2) / 2], abs=1e-12)

    def test_order4_has_four_simple_symmetric_roots(self):
        rs = td.critical_roots(4)
        assert len(rs.roots) == 4
        assert all(m == 1 for _, m in rs.roots)
        al = rs.alphas()
        assert al == pytest.approx([-a for a in reversed(al)], abs=1e-12)

    @pytest.mark.parametrize("p", range(2, 11))
    def test_against_eigenvalue_product_oracle(self, p):
        mine = td.critical_roots(p).alphas()
        oracle = eig_product_roots(p)
        assert len(mine) == len(oracle)
        assert max(abs(a - b) for a, b in zip(mine, oracle)) <= 1e-9

    def test_zero_is_never_a_root(self):
        for p in range(2, 12):
            assert all(abs(a) > 1e-6 for a in td.critical_roots(p).alphas())

    def test_rejects_small_order(self):
        with pytest.raises(ValueError):
            td.critical_roots(1)

    def test_no_two_consecutive_orders_share_a_root(self):
        # exact integer-polynomial gcd in beta
        for p in range(2, 21):
            g = td._pgcd(td._beta_poly(p), td._beta_poly(p + 1))
            assert len(g) == 1

    def test_root_object_exact_membership(self):
        ra = td.RootAlpha(3, 1)
        assert ra.is_root_of(3)
        assert not ra.is_root_of(2)
        assert not ra.is_root_of(4)
        # the order-2 root alpha = 1 is also a root of order 5: u_5 = (1-b)(1-3b)
        r2 = td.RootAlpha(2, 1)
        assert r2.is_root_of(5)
        assert not r2.is_root_of(3)

    def test_root_token_round_trip(self):
        ra = td.RootAlpha(3, 1, -1)
        assert ra.token() == "-root:3:1"
        assert ra.value == pytest.approx(-math.sqrt(2) / 2, abs=1e-14)


class TestRankDichotomy:
    def test_examples(self):
        assert td.rank_h(3, 0.3) == 3
        assert td.rank_h(3, math.sqrt(2) / 2) == 2
        assert td.rank_h(1, 123.0) == 1

    def test_cross_validated_against_numeric_rank(self):
        rng = np.random.default_rng(1)
        alphas = [float(a) for a in rng.uniform(-2, 2, 20)]
        alphas += [ra for p in range(2, 6) for ra in td.critical_roots(p).root_alphas]
        for a in alphas:
            for p in range(1, 9):
                dense = td.h_matrix(p, td.alpha_float(a))
                s = np.linalg.svd(dense, compute_uv=False)
                numeric = int(np.sum(s > 1e-8 * s[0]))
                assert td.rank_h(p, a) == numeric

    def test_rank_in_dichotomy(self):
        rng = np.random.default_rng(2)
        for a in rng.uniform(-2, 2, 50):
            for p in range(1, 12):
                assert td.rank_h(p, float(a)) in (p, p - 1)


class TestNeighborNonzero:
    def test_order2_at_one(self):
        vals = td.neighbor_nonzero_check(2, Fraction(1))
        assert vals == {1: 1, 3: -1, 4: -1}

    def test_order3_at_the_root(self):
        vals = td.neighbor_nonzero_check(3, td.RootAlpha(3, 1))
        assert set(vals) == {1, 2, 4, 5}
        assert vals[2] == pytest.approx(0.5, abs=1e-12)
        assert all(abs(v) > 1e-9 for v in vals.values())

    def test_every_root_has_nonzero_neighbors(self):
        for p in range(2, 8):
            for ra in td.critical_roots(p).root_alphas:
                vals = td.neighbor_nonzero_check(p, ra)
                assert all(abs(v) > 1e-9 for v in vals.values())

    def test_misuse_is_rejected(self):
        with pytest.raises(ValueError):
            td.neighbor_nonzero_check(3, 0.3)


class TestVSequence:
    def test_initial_conditions(self):
        vs = td.v_sequence(0, 0.5)
        assert vs[-1] == 0.0 and vs[0] == 1.0

    def test_alpha_one_values(self):
        vs = td.v_sequence(2, 1.0)
        assert vs[1] == -1.0 and vs[2] == 0.0

    def test_definitional_identity(self):
        for a in (0.3, -1.7, 0.9):
            assert td.v_sequence(25, a).definitional_residual() <= 1e-9

    def test_zero_gain_rejected(self):
        with pytest.raises(ValueError):
            td.v_sequence(4, 0.0)

    def test_row_identity_small(self):
        assert td.v_row_identity_check(5, 3, 0.9) <= 1e-9
        assert td.v_row_identity_check(2, 0, 1.0) <= 1e-12

    def test_row_identity_contract_grid(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            p = int(rng.integers(2, 31))
            l = int(rng.integers(0, 31))
            a = float(rng.uniform(0.1, 2.0)) * (1 if rng.random() < 0.5 else -1)
            assert td.v_row_identity_check(p, l, a) <= 1e-9

    def test_row_identity_restricted_to_width_two(self):
        with pytest.raises(ValueError):
            td.v_row_identity_check(1, 0, 0.7)


class TestBandedM:
    def test_two_by_two_closed_form(self):
        bm = td.build_m_and_inverse(2, 2.0)
        assert bm.matrix.tolist() == [[2.0, 1.0], [0.0, 2.0]]
        assert bm.inverse.tolist() == [[0.5, -0.25], [0.0, 0.5]]

    def test_band_pattern_transcription(self):
        bm = td.build_m_and_inverse(3, 1.0)
        assert bm.matrix.tolist() == [[1, 1, 1], [0, 1, 1], [0, 0, 1]]

    def test_determinant_is_alpha_power(self):
        for p, a in ((4, 0.5), (3, -1.2), (6, 0.3)):
            d = float(np.linalg.det(td.m_matrix(p, a)))
            assert d == pytest.approx(a ** p, rel=1e-9)

    def test_product_is_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            p = int(rng.integers(1, 12))
            a = float(rng.uniform(0.1, 2.0)) * (1 if rng.random() < 0.5 else -1)
            bm = td.build_m_and_inverse(p, a)
            assert np.max(np.abs(bm.matrix @ bm.inverse - np.eye(p))) < 1e-10

    def test_back_substitution_agrees_with_dense_inverse(self):
        for p, a in ((5, 0.7), (8, -0.4), (3, 1.9)):
            bm = td.build_m_and_inverse(p, a)
            assert np.max(np.abs(bm.inverse - np.linalg.inv(bm.matrix))) < 1e-10

    def test_zero_gain_rejected(self):
        with pytest.raises(ValueError):
            td.build_m_and_inverse(3, 0.0)
