import dataclasses
import math
from itertools import product

import numpy as np
import pytest

from wynerdof import converse as cv
from wynerdof import dofcalc as dc
from wynerdof import netmodel as nm
from wynerdof.tridiag import RootAlpha, critical_roots, h_matrix

P = nm.NetworkParams
ROOT3 = RootAlpha(3, 1)


def model(params, topology, alpha):
    return nm.build_channel(params, topology, nm.CrossGainAssignment.equal(alpha))


class TestAsymGenie:
    def test_single_period_example(self):
        p = P(K=7, t_left=2, t_right=1, r_left=2, r_right=1)
        g = cv.build_asym_genie(p, 0.7)
        assert g.group_a == (4, 5, 6, 7)
        assert g.r_a == tuple(range(2, 8))
        assert cv.mac_bound_value(g) == 6

    def test_two_period_example(self):
        g = cv.build_asym_genie(P(K=4), 0.7)
        assert g.missing() == (1, 3)
        assert g.bound == 2

    def test_trivial_partition(self):
        g = cv.build_asym_genie(P(K=3, t_left=2, r_left=2), 0.7)
        assert g.bound == 3 and g.genies == ()

    def test_geometric_weights(self):
        p = P(K=7, t_left=1, t_right=0, r_left=1, r_right=0)
        a = 0.8
        g = cv.build_asym_genie(p, a)
        first = dict(g.genies[0].noise_coeff)
        assert first[1] == 1.0
        for v in range(1, p.t_left + p.r_left + 2):
            assert first[1 + v] == pytest.approx((-1 / a) ** v, rel=1e-12)

    def test_bound_matches_formula_on_grid(self):
        for K in range(1, 13):
            for tl, tr, rl, rr in product(range(3), repeat=4):
                p = P(K=K, t_left=tl, t_right=tr, r_left=rl, r_right=rr)
                assert cv.build_asym_genie(p, 0.9).bound == dc.asym_mg(p)

    def test_reconstruction_exact(self):
        p = P(K=10, t_left=1, t_right=0, r_left=1, r_right=0)
        g = cv.build_asym_genie(p, 0.7)
        rep = cv.verify_reconstruction(g, model(p, nm.ASYMMETRIC, 0.7), trials=100)
        assert rep.ok and rep.max_abs_error <= 1e-9

    def test_corrupted_coefficient_detected(self):
        p = P(K=10, t_left=1, t_right=0, r_left=1, r_right=0)
        g = cv.build_asym_genie(p, 0.7)
        noise = dict(g.genies[0].noise_coeff)
        k = sorted(noise)[1]
        noise[k] += 1e-3
        bad0 = dataclasses.replace(g.genies[0], noise_coeff=tuple(sorted(noise.items())))
        bad = dataclasses.replace(g, genies=(bad0,) + g.genies[1:])
        rep = cv.verify_reconstruction(bad, model(p, nm.ASYMMETRIC, 0.7), trials=100)
        assert not rep.ok and rep.max_abs_error >= 1e-4


class TestSymUb1:
    def test_worked_example(self):
        p = P(K=12, t_left=1, t_right=1, r_left=1, r_right=1)
        g = cv.build_sym_genie_ub1(p, 0.9)
        assert g.bound == 9
        assert g.missing() == (1, 8, 9)
        rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, 0.9), trials=100)
        assert rep.ok and rep.max_abs_error <= 1e-9
        # boundary-pair targets are reconstructed explicitly
        assert {8, 9} <= set(rep.targets)

    def test_coefficients_come_from_banded_inverses(self):
        from wynerdof.tridiag import build_m_and_inverse
        p = P(K=12, t_left=1, t_right=1, r_left=1, r_right=1)
        a = 0.9
        g = cv.build_sym_genie_ub1(p, a)
        ainv = build_m_and_inverse(3, a).inverse
        # the genie hiding antenna 1 carries (a_{1,j} + alpha*a_{2,j}) weights
        v0 = dict(g.genies[0].noise_coeff)
        for j in range(1, 4):
            assert v0[1 + j] == pytest.approx(ainv[0, j - 1] + a * ainv[1, j - 1],
                                              rel=1e-12)

    def test_mirrored_orientation_when_only_the_right_fits(self):
        # kappa in [t_r+r_r+2, t_l+r_l+2): the tail anchors on the right
        p = P(K=14, t_left=3, t_right=0, r_left=1, r_right=0)
        g = cv.build_sym_genie_ub1(p, 0.8)
        vals = {b.label: b.value for b in dc.sym_upper_bounds(p, 0.8)}
        assert g.bound == vals["ub-generic"]
        rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, 0.8), trials=50)
        assert rep.ok

    def test_grid(self):
        for K in range(1, 13):
            for tl, tr, rl, rr in product(range(3), repeat=4):
                p = P(K=K, t_left=tl, t_right=tr, r_left=rl, r_right=rr)
                g = cv.build_sym_genie_ub1(p, 0.8)
                vals = {b.label: b.value for b in dc.sym_upper_bounds(p, 0.8)}
                assert g.bound == vals["ub-generic"], p
                rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, 0.8), trials=6)
                assert rep.ok, (p, rep.failure)


class TestSymUb2:
    def test_null_row_coefficients(self):
        d = cv._null_row_coeffs(3, ROOT3)
        h = h_matrix(3, ROOT3.value)
        resid = np.max(np.abs(h[0] - d @ h[1:]))
        assert resid <= 1e-10
        assert d == pytest.approx([math.sqrt(2), -1.0], rel=1e-9)

    def test_requires_singular_determinant(self):
        p = P(K=9, t_left=1, t_right=1, r_left=1, r_right=1)
        with pytest.raises(ValueError, match="singular"):
            cv.build_sym_genie_ub2(p, 0.9)

    def test_matches_the_critical_case_bound(self):
        # symmetric side-information at the critical gain: the multi-round
        # bound specializes to the case-4 upper endpoint
        p = P(K=7, t_left=1, t_right=1, r_left=1, r_right=1)
        g = cv.build_sym_genie_ub2(p, ROOT3)
        si = dc.sym_mg_symmetric_si(p, ROOT3)
        assert g.bound == si.upper == 5
        rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, ROOT3), trials=100)
        assert rep.ok and rep.max_abs_error <= 1e-9

    def test_multi_round_structure(self):
        p = P(K=17, t_left=1, t_right=1, r_left=1, r_right=1)
        g = cv.build_sym_genie_ub2(p, ROOT3)
        rounds = sorted({s.round_no for s in g.steps})
        assert rounds == list(range(1, len(rounds) + 1))
        assert len(rounds) >= 4  # genuinely staged
        rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, ROOT3), trials=60)
        assert rep.ok

    def test_mirrored_variant(self):
        p = P(K=9, t_left=1, t_right=0, r_left=1, r_right=2)
        g = cv.build_sym_genie_ub2(p, ROOT3, mirror=True)
        rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, ROOT3), trials=60)
        assert rep.ok

    def test_construction_gap_is_surfaced(self):
        # no left cognition and K a multiple of the period: no valid
        # receiver group exists; the builder refuses rather than fudge
        p = P(K=4, t_left=0, t_right=0, r_left=1, r_right=0)
        with pytest.raises(ValueError, match="construction gap"):
            cv.build_sym_genie_ub2(p, RootAlpha(2, 1))

    def test_grid_at_roots(self):
        roots = [ra for q in range(2, 8) for ra in critical_roots(q).root_alphas]
        for K in range(1, 12):
            for tl, tr, rl, rr in product(range(3), repeat=4):
                p = P(K=K, t_left=tl, t_right=tr, r_left=rl, r_right=rr)
                for ra in roots:
                    if not ra.is_root_of(tl + rl + 1):
                        continue
                    try:
                        g = cv.build_sym_genie_ub2(p, ra)
                    except ValueError:
                        continue  # documented corner
                    rep = cv.verify_reconstruction(g, model(p, nm.SYMMETRIC, ra),
                                                   trials=5)
                    assert rep.ok, (p, ra.token(), rep.failure)


class TestOffsetGenie:
    def test_even_period_count(self):
        a = ROOT3.value + 0.05
        g = cv.build_offset_genie(2, a, 7)
        assert g.missing() == (1, 7)
        assert g.bound == 5
        assert g.info_term["q"] == 2

    def test_odd_period_count(self):
        g = cv.build_offset_genie(2, 0.9, 11)
        assert g.info_term["q"] == 3
        assert g.bound == 8

    def test_v_weighted_identity_reconstructs_the_first_antenna(self):
        a = ROOT3.value + 0.03
        g = cv.build_offset_genie(2, a, 7)
        rep = cv.verify_reconstruction(g, model(g.params, nm.SYMMETRIC, a), trials=100)
        assert rep.ok and rep.max_abs_error <= 1e-9

    def test_signal_term_vanishes_at_the_critical_gain(self):
        g = cv.build_offset_genie(2, ROOT3, 7)
        assert abs(g.info_term["v_top"]) < 1e-12

    def test_signal_term_direction(self):
        for gap in (0.2, 0.1, 0.05):
            g = cv.build_offset_genie(2, ROOT3.value + gap, 7)
            assert abs(g.info_term["v_top"]) > 0

    def test_bad_network_size_rejected(self):
        with pytest.raises(ValueError, match="q"):
            cv.build_offset_genie(2, 0.8, 9)

    def test_side_split_with_round_ordering(self):
        # the split puts one early message behind the first round
        g = cv.build_offset_genie(2, 0.8, 7, t_left=1, r_left=1,
                                  t_right=0, r_right=2)
        assert g.groups_b[0] == (2,)  # r_left + 1
        rep = cv.verify_reconstruction(g, model(g.params, nm.SYMMETRIC, 0.8),
                                       trials=60)
        assert rep.ok


class TestStructuralChecks:
    def test_out_of_order_output_use_is_reported_before_numerics(self):
        p = P(K=7, t_left=1, t_right=1, r_left=1, r_right=1)
        g = cv.build_sym_genie_ub2(p, ROOT3)
        # move every step into round 1: later-round dependencies break
        steps = tuple(dataclasses.replace(s, round_no=1) for s in g.steps)
        bad = dataclasses.replace(g, steps=steps)
        rep = cv.verify_reconstruction(bad, model(p, nm.SYMMETRIC, ROOT3), trials=5)
        assert not rep.ok
        assert rep.trials == 0  # failed before sampling
        assert "before" in rep.failure or "not yet decoded" in rep.failure

    def test_instance_mismatch_rejected(self):
        g = cv.build_asym_genie(P(K=4), 0.7)
        with pytest.raises(ValueError):
            cv.verify_reconstruction(g, model(P(K=5), nm.ASYMMETRIC, 0.7))

    def test_plan_supplied_encoder_dependencies(self):
        from wynerdof import schemes as sc
        p = P(K=10, t_left=1, t_right=0, r_left=1, r_right=0)
        g = cv.build_asym_genie(p, 0.7)
        m = model(p, nm.ASYMMETRIC, 0.7)
        plan_deps = sc.asym_plan(p).deps_map()
        rep = cv.verify_reconstruction(g, m, trials=10,
                                       encoder_dependency=plan_deps)
        assert rep.ok
        # a dependency the cooperating group never decodes is a structural error
        needed = g.steps[0].x_terms[0][0]
        bad = dict(plan_deps)
        bad[needed] = frozenset({g.missing()[0]})
        rep2 = cv.verify_reconstruction(g, m, trials=10, encoder_dependency=bad)
        assert not rep2.ok and "not yet decoded" in rep2.failure


class TestEntropyCondition:
    def test_asym_example(self):
        p = P(K=7, t_left=2, t_right=1, r_left=2, r_right=1)
        g = cv.build_asym_genie(p, 0.7)
        rep = cv.genie_entropy_check(g, model(p, nm.ASYMMETRIC, 0.7))
        assert rep.ok and rep.p_free

    def test_duplicated_genie_is_harmless(self):
        p = P(K=7, t_left=2, t_right=1, r_left=2, r_right=1)
        g = cv.build_asym_genie(p, 0.7)
        dup = dataclasses.replace(g, genies=g.genies + g.genies)
        rep = cv.genie_entropy_check(dup, model(p, nm.ASYMMETRIC, 0.7))
        assert rep.ok

    def test_adversarial_genie_flagged(self):
        p = P(K=7, t_left=2, t_right=1, r_left=2, r_right=1)
        g = cv.build_asym_genie(p, 0.7)
        k = g.r_a[0]
        evil = cv.GenieSignal(index=99, noise_coeff=((k, 1.0),))
        bad = dataclasses.replace(g, genies=g.genies + (evil,))
        rep = cv.genie_entropy_check(bad, model(p, nm.ASYMMETRIC, 0.7))
        assert not rep.ok

    def test_all_families_pass(self):
        p = P(K=11, t_left=1, t_right=1, r_left=1, r_right=1)
        m = model(p, nm.SYMMETRIC, ROOT3)
        for g in (cv.build_sym_genie_ub1(p, ROOT3),
                  cv.build_sym_genie_ub2(p, ROOT3)):
            assert cv.genie_entropy_check(g, m).ok

    def test_sandwich_against_certified_plans(self):
        from wynerdof import schemes as sc
        rng = np.random.default_rng(11)
        alphas = [float(a) for a in rng.uniform(0.2, 1.8, 2)] + [ROOT3]
        for K in range(1, 13):
            for s in range(3):
                p = P(K=K, t_left=s, t_right=s, r_left=0, r_right=0)
                for a in alphas:
                    m = model(p, nm.SYMMETRIC, a)
                    plan = sc.sym_symmetric_si_plan(p, a)
                    cert = sc.certify_plan(plan, m)
                    bounds = [cv.build_sym_genie_ub1(p, a).bound]
                    try:
                        bounds.append(cv.build_sym_genie_ub2(p, a).bound)
                    except ValueError:
                        pass
                    assert cert.certified_dof <= min(bounds), (p, a)
