import math

import pytest

from kestenlab.amenability import (KestenWalk, build_kesten_walk,
                                   cogrowth_brute, cogrowth_series,
                                   default_xi_word, folner_defect,
                                   folner_search, folner_sequence,
                                   self_adjoint_check,
                                   spectral_radius_estimate,
                                   walk_from_measure)
from kestenlab.errors import FolnerStageFailed, NotSymmetric
from kestenlab.extension import Cocycle, ExtensionSystem
from kestenlab.groups import (FreeGroup, Homomorphism, LamplighterGroup,
                              ZdGroup, ball, cyclic_group)
from kestenlab.potentials import constant_potential
from kestenlab.sft import full_shift, validate_involution

Z = ZdGroup(1)
Z2 = ZdGroup(2)
F2 = FreeGroup(2)
LAMP = LamplighterGroup()


def z_extension():
    sh = full_shift(2)
    return ExtensionSystem(sh, constant_potential(sh, 0.5),
                           Cocycle((Z.element((1,)), Z.element((-1,)))),
                           validate_involution(sh, (1, 0)))


def f2_extension():
    sh = full_shift(4)
    return ExtensionSystem(sh, constant_potential(sh, 0.25),
                           Cocycle((F2.element((1,)), F2.element((-1,)),
                                    F2.element((2,)), F2.element((-2,)))),
                           validate_involution(sh, (1, 0, 3, 2)))


def z_srw():
    return walk_from_measure(Z, {Z.element((1,)): 0.5,
                                 Z.element((-1,)): 0.5})


class TestKestenWalk:
    def test_default_xi_is_lex_least_periodic(self):
        assert default_xi_word(z_extension(), ()) == (0,)
        assert default_xi_word(f2_extension(), ()) == (0,)

    def test_length_one_walk_uniform_on_generators(self):
        walk = build_kesten_walk(f2_extension(), (), 1)
        m = walk.normalized()
        assert {g.key for g in m} == {(1,), (-1,), (2,), (-2,)}
        for v in m.values():
            assert v == pytest.approx(0.25, abs=1e-15)

    def test_z_walk_is_binomial(self):
        walk = build_kesten_walk(z_extension(), (), 6)
        m = {g.key[0]: v for g, v in walk.normalized().items()}
        for k, v in m.items():
            assert v == pytest.approx(math.comb(6, (6 + k) // 2) / 2 ** 6,
                                      abs=1e-14)

    def test_symmetry_exact(self):
        walk = build_kesten_walk(z_extension(), (), 9)
        grp = walk.group
        for g, v in walk.weights.items():
            assert walk.weights[grp.inverse(g)] == v   # bit-for-bit

    def test_trivial_cocycle_concentrates_at_identity(self):
        sh = full_shift(2)
        C1 = cyclic_group(1)
        ext = ExtensionSystem(sh, constant_potential(sh, 0.5),
                              Cocycle((C1.element(0), C1.element(0))),
                              validate_involution(sh, (1, 0)))
        walk = build_kesten_walk(ext, (), 5)
        m = walk.normalized()
        assert len(m) == 1
        assert m[C1.element(0)] == pytest.approx(1.0, abs=1e-14)

    def test_anchor_must_have_trivial_image(self):
        with pytest.raises(NotSymmetric):
            build_kesten_walk(z_extension(), (0,), 4)

    def test_anchored_walk(self):
        walk = build_kesten_walk(z_extension(), (0, 1), 6)
        assert walk.anchor == (0, 1)
        assert sum(walk.normalized().values()) == pytest.approx(1.0,
                                                                abs=1e-14)

    def test_requires_involution(self):
        sh = full_shift(2)
        ext = ExtensionSystem(sh, constant_potential(sh, 0.5),
                              Cocycle((Z.element((1,)), Z.element((-1,)))))
        with pytest.raises(NotSymmetric):
            build_kesten_walk(ext, (), 4)


class TestSelfAdjoint:
    def test_extension_walk_exactly_self_adjoint(self):
        walk = build_kesten_walk(z_extension(), (), 7)
        assert self_adjoint_check(walk, 8) == 0.0

    def test_lamplighter_walk_self_adjoint(self):
        m = {LAMP.element(((0,), 0)): 1 / 3,
             LAMP.element(((), 1)): 1 / 3,
             LAMP.element(((), -1)): 1 / 3}
        assert self_adjoint_check(walk_from_measure(LAMP, m), 4) == 0.0

    def test_corrupted_walk_detected(self):
        weights = {Z.element((1,)): 0.7, Z.element((-1,)): 0.3}
        bad = KestenWalk(group=Z, weights=weights, anchor=(), xi_word=(),
                         n=0, total=1.0)
        assert self_adjoint_check(bad, 3) == pytest.approx(0.4, abs=1e-14)

    def test_walk_from_measure_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            walk_from_measure(Z, {Z.element((1,)): 0.7,
                                  Z.element((-1,)): 0.3})


class TestSpectralRadius:
    def test_z_srw_matches_binomial_returns(self):
        # u_2k = 4^-k C(2k, k), so rho_k = (4^-k C(2k, k))^(1/2k)
        est = spectral_radius_estimate(z_srw(), 20, ball_radius=41)
        assert not est.radial and est.escaped_mass == 0.0
        for k, r in est.rho_sequence:
            exact = (math.comb(2 * k, k) / 4 ** k) ** (1 / (2 * k))
            assert r == pytest.approx(exact, abs=1e-13)
        assert dict(est.rho_sequence)[20] == pytest.approx(
            0.9494124012731346, abs=1e-12)

    def test_rho_sequence_nondecreasing(self):
        for est in (spectral_radius_estimate(z_srw(), 15, ball_radius=31),
                    spectral_radius_estimate(
                        build_kesten_walk(f2_extension(), (), 1), 40)):
            vals = [r for _, r in est.rho_sequence]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_f2_uniform_walk_goes_radial(self):
        walk = build_kesten_walk(f2_extension(), (), 1)
        est = spectral_radius_estimate(walk, 60)
        assert est.radial and est.escaped_mass == 0.0
        # true value sqrt(3)/2 = 0.866; finite-k estimates stay below 0.9
        assert 0.82 <= est.lower_bound <= math.sqrt(3) / 2

    def test_finite_group_estimate_approaches_one(self):
        C4 = cyclic_group(4)
        walk = walk_from_measure(C4, {C4.element(1): 0.5,
                                      C4.element(3): 0.5})
        est = spectral_radius_estimate(walk, 60, ball_radius=4)
        assert est.lower_bound >= 0.99
        assert est.rayleigh == pytest.approx(1.0, abs=1e-12)

    def test_extension_walk_tracks_base_walk(self):
        # the anchored extension walk on the amenable fiber group keeps the
        # spectral estimate close to the plain simple random walk's
        ext_est = spectral_radius_estimate(
            build_kesten_walk(z_extension(), (), 6), 30, ball_radius=70)
        srw_est = spectral_radius_estimate(z_srw(), 30, ball_radius=70)
        assert srw_est.lower_bound >= 0.9
        assert ext_est.lower_bound >= srw_est.lower_bound - 0.02

    def test_ball_radius_required_when_not_radial(self):
        with pytest.raises(ValueError):
            spectral_radius_estimate(z_srw(), 10)


class TestCogrowth:
    def test_trivial_target_counts_all_reduced_words(self):
        hom = Homomorphism(F2, [cyclic_group(1).element(0)] * 2)
        for n, c in cogrowth_series(2, hom, 8):
            assert c == 4 * 3 ** (n - 1)

    def test_injective_image_never_trivial(self):
        hom = Homomorphism(F2, [F2.element((1,)), F2.element((2,))])
        assert all(c == 0 for _, c in cogrowth_series(2, hom, 12))

    def test_parity_target_even_lengths_only(self):
        C2 = cyclic_group(2)
        hom = Homomorphism(F2, [C2.element(1), C2.element(1)])
        for n, c in cogrowth_series(2, hom, 10):
            assert (c > 0) == (n % 2 == 0)

    def test_dp_matches_brute_force(self):
        hom = Homomorphism(F2, [Z2.element((1, 0)), Z2.element((0, 1))])
        series = dict(cogrowth_series(2, hom, 10))
        for n in range(1, 11):
            assert series[n] == cogrowth_brute(2, hom, n)

    def test_abelianization_growth_approaches_three(self):
        # amenable quotient: c_n^(1/n) climbs toward 2r - 1 = 3
        hom = Homomorphism(F2, [Z2.element((1, 0)), Z2.element((0, 1))])
        series = dict(cogrowth_series(2, hom, 20))
        assert series[4] == 8 and series[6] == 40
        roots = [series[n] ** (1 / n) for n in range(4, 21, 2)]
        assert all(b >= a for a, b in zip(roots, roots[1:]))
        assert 2.4 < roots[-1] < 3.0


class TestFolner:
    Z_GENS = [Z.element((1,)), Z.element((-1,))]
    F2_GENS = [F2.element((i,)) for i in (1, -1, 2, -2)]

    def test_defect_of_interval(self):
        interval = [Z.element((k,)) for k in range(8)]
        assert folner_defect(interval, self.Z_GENS) == pytest.approx(0.5)

    def test_z_box_found(self):
        res = folner_search(Z, self.Z_GENS, 0.5)
        assert res.found and res.certificate.strategy == "box-8"
        assert res.certificate.defect == pytest.approx(0.5)
        assert [g.key for g in res.certificate.elements] == \
            [(k,) for k in range(8)]

    def test_z2_box_found(self):
        gens = [Z2.element(v) for v in ((1, 0), (-1, 0), (0, 1), (0, -1))]
        res = folner_search(Z2, gens, 0.5)
        assert res.found and res.certificate.strategy == "box-16"
        assert res.certificate.defect == pytest.approx(0.5)

    def test_lamplighter_box_found(self):
        gens = [LAMP.element(((0,), 0)), LAMP.element(((), 1)),
                LAMP.element(((), -1))]
        res = folner_search(LAMP, gens, 0.5)
        assert res.found and res.certificate.strategy == "box-8"
        assert res.certificate.defect == pytest.approx(0.5)

    def test_analytic_defect_matches_set_arithmetic(self):
        gens = [Z2.element(v) for v in ((1, 0), (-1, 0), (0, 1), (0, -1))]
        res = folner_search(Z2, gens, 0.5)
        assert folner_defect(res.certificate.elements, gens) == \
            pytest.approx(res.certificate.defect, abs=1e-12)

    def test_finite_group_whole_group_perfect(self):
        C4 = cyclic_group(4)
        res = folner_search(C4, [C4.element(1), C4.element(3)], 0.0)
        assert res.found and res.certificate.strategy == "whole-group"
        assert res.certificate.defect == 0.0

    def test_f2_not_found(self):
        res = folner_search(F2, self.F2_GENS, 0.1, budget=20000)
        assert not res.found and res.certificate is None
        # every candidate stays near the theoretical minimum defect of 4
        assert res.best_defect == pytest.approx(4.0003, abs=1e-3)
        assert res.best_strategy == "ball-8"

    def test_trace_records_candidates(self):
        trace = []
        folner_search(Z, self.Z_GENS, 0.5, trace=trace)
        assert trace == [(f"box-{s}", s, 2 * (2 / s)) for s in range(1, 9)]

    def test_constraint_must_be_inverse_closed(self):
        with pytest.raises(ValueError):
            folner_search(Z, [Z.element((1,))], 0.5)

    def test_greedy_handles_ball_unfriendly_constraint(self):
        # constraint {+2, -2} generates 2Z; intervals of even numbers work
        gens = [Z.element((2,)), Z.element((-2,))]
        res = folner_search(Z, gens, 0.25)
        assert res.found and res.certificate.defect <= 0.25

    def test_z_sequence_three_stages(self):
        seq = folner_sequence(Z, [self.Z_GENS] * 3, [1.0, 0.5, 0.5],
                              budget=100000)
        assert [c.strategy for c in seq] == ["box-4", "box-48", "box-9024"]
        assert [c.defect for c in seq] == pytest.approx([1.0, 0.5, 0.5])
        # each stage is Folner for the previous certificate as constraint
        for prev, nxt in zip(seq, seq[1:]):
            d = folner_defect(nxt.elements, prev.elements)
            assert d <= len(prev.elements) * 0.5

    def test_f2_sequence_fails_loudly(self):
        with pytest.raises(FolnerStageFailed):
            folner_sequence(F2, [self.F2_GENS], [0.5], budget=5000)

    def test_certificates_are_genuine(self):
        gens = [LAMP.element(((0,), 0)), LAMP.element(((), 1)),
                LAMP.element(((), -1))]
        res = folner_search(LAMP, gens, 0.5)
        elements = res.certificate.elements
        keys = {g.key for g in elements}
        assert len(keys) == len(elements)
        for h in gens:
            shifted = {LAMP.multiply(g, h).key for g in elements}
            assert len(shifted ^ keys) / len(keys) <= 0.5
