import pytest
from hypothesis import given, settings, strategies as st

from kestenlab.errors import BackendMismatch, BallTooLarge
from kestenlab.groups import (FiniteGroup, FreeGroup, Homomorphism,
                              LamplighterGroup, QuotientGroup, ZdGroup,
                              apply_hom, axiom_spot_check, ball, cyclic_group)


class TestBackendArithmetic:
    def test_z2_addition(self):
        Z2 = ZdGroup(2)
        assert (Z2.element((1, 0)) * Z2.element((0, 1))).key == (1, 1)

    def test_free_reduction(self):
        F = FreeGroup(2)
        a = F.element((1,))
        assert (a * a.inverse()).key == ()
        assert F.element((1, -2, 2, -1)).key == ()

    def test_lamplighter_wreath_rule(self):
        # (delta_0, 0) * (delta_0, 1) = (empty, 1): the second lamp toggles
        # position 0 again before the move
        L = LamplighterGroup()
        g = L.element(((0,), 0))
        h = L.element(((0,), 1))
        assert (g * h).key == ((), 1)

    def test_lamplighter_inverse(self):
        L = LamplighterGroup()
        g = L.element(((0, 2), 3))
        assert (g * g.inverse()).key == ((), 0)
        assert g.inverse().key == ((-3, -1), -3)

    def test_finite_group_from_table(self):
        C3 = cyclic_group(3)
        assert (C3.element(1) * C3.element(2)).key == 0
        assert C3.element(2).inverse().key == 1

    def test_bad_table_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroup([[0, 0], [1, 1]])     # rows not permutations

    def test_nonassociative_table_rejected(self):
        # a Latin square that is not a group table (order-5 quasigroup)
        table = [[0, 1, 2, 3, 4],
                 [1, 0, 3, 4, 2],
                 [2, 4, 0, 1, 3],
                 [3, 2, 4, 0, 1],
                 [4, 3, 1, 2, 0]]
        with pytest.raises(ValueError):
            FiniteGroup(table)

    def test_backend_mismatch(self):
        Z1, F = ZdGroup(1), FreeGroup(1)
        with pytest.raises(BackendMismatch):
            Z1.multiply(Z1.element((1,)), F.element((1,)))

    def test_axioms_spot_checked_per_backend(self):
        for group, radius in ((ZdGroup(2), 3), (FreeGroup(2), 3),
                              (LamplighterGroup(), 4), (cyclic_group(6), 6)):
            axiom_spot_check(group, ball(group, radius), samples=300)


class TestBall:
    def test_z_radius_3(self):
        assert len(ball(ZdGroup(1), 3)) == 7

    def test_f2_radius_2(self):
        assert len(ball(FreeGroup(2), 2)) == 17

    def test_z2_radius_2_diamond(self):
        assert len(ball(ZdGroup(2), 2)) == 13

    def test_nesting(self):
        small = {g.key for g in ball(FreeGroup(2), 2)}
        large = {g.key for g in ball(FreeGroup(2), 3)}
        assert small < large

    def test_free_group_closed_form(self):
        # |B_r| = 1 + 2r (2r-1 choose growth): 1 + 4(3^r - 1)/2 for rank 2
        for r in range(5):
            assert len(ball(FreeGroup(2), r)) == 1 + 2 * (3 ** r - 1)

    def test_cap_enforced(self):
        with pytest.raises(BallTooLarge):
            ball(FreeGroup(2), 12, cap=1000)

    def test_generators_must_be_inverse_closed(self):
        F = FreeGroup(2)
        with pytest.raises(ValueError):
            ball(F, 2, generators=[F.element((1,))])

    def test_deterministic_order(self):
        first = [g.key for g in ball(LamplighterGroup(), 4)]
        second = [g.key for g in ball(LamplighterGroup(), 4)]
        assert first == second


class TestHomomorphism:
    def test_commutator_dies_in_abelianization(self):
        Z2 = ZdGroup(2)
        hom = Homomorphism(FreeGroup(2),
                           [Z2.element((1, 0)), Z2.element((0, 1))])
        assert apply_hom(hom, (1, 2, -1, -2)).key == (0, 0)

    def test_trivial_hom(self):
        hom = Homomorphism(FreeGroup(2),
                           [cyclic_group(1).element(0)] * 2)
        assert apply_hom(hom, (1, -2, 1, 1)).key == 0

    def test_parity_hom_to_z2(self):
        C2 = cyclic_group(2)
        hom = Homomorphism(FreeGroup(2), [C2.element(1), C2.element(1)])
        assert apply_hom(hom, (1, 2)).key == 0
        assert apply_hom(hom, (1, 2, -1)).key == 1

    @given(st.lists(st.integers(1, 2).flatmap(lambda i: st.sampled_from([i, -i])),
                    max_size=8),
           st.lists(st.integers(1, 2).flatmap(lambda i: st.sampled_from([i, -i])),
                    max_size=8))
    @settings(max_examples=60, deadline=None)
    def test_hom_multiplicative(self, w, v):
        F = FreeGroup(2)
        Z2 = ZdGroup(2)
        hom = Homomorphism(F, [Z2.element((1, 0)), Z2.element((0, 1))])
        lhs = hom.apply(F.element(tuple(w)) * F.element(tuple(v)))
        rhs = hom.apply(tuple(w)) * hom.apply(tuple(v))
        assert lhs.key == rhs.key

    def test_hom_respects_reduction(self):
        # image of a reducible word equals image of its reduced form
        F = FreeGroup(2)
        L = LamplighterGroup()
        hom = Homomorphism(F, [L.element(((0,), 0)), L.element(((), 1))])
        raw = (1, 2, -2, 2, 1, -1)
        assert hom.apply(raw).key == hom.apply(F.element(raw)).key

    def test_quotient_group_wraps_target(self):
        C2 = cyclic_group(2)
        hom = Homomorphism(FreeGroup(2), [C2.element(1), C2.element(1)])
        Q = QuotientGroup(hom)
        gens = Q.generators()
        assert len(gens) == 1 and gens[0].key == 1
        assert len(ball(Q, 3)) == 2
