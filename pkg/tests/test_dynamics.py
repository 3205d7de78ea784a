"""Maps as dynamical systems: iteration, reduction, heights, orbits."""

import random
from fractions import Fraction

import pytest

from arbor import dynamics as dyn
from arbor import localdata as ld
from arbor.algebra import binforms as bf
from arbor.algebra import finitefield as ff
from arbor.dynamics import RationalMap
from arbor.errors import DegenerateMapError, WildRegimeError
from arbor.localdata import POINT_AT_INFINITY


class TestConstruction:
    def test_x2_plus_1_forms(self, x2_plus_1, QQ):
        assert x2_plus_1.degree == 2
        assert x2_plus_1.num.coeffs == (QQ(1), QQ(0), QQ(1))
        assert x2_plus_1.den.coeffs == (QQ(1), QQ(0), QQ(0))

    def test_rabbit_is_valid(self, rabbit):
        assert rabbit.degree == 2
        assert rabbit.is_polynomial()

    def test_resultant_36(self, seven_over_one):
        assert seven_over_one.resultant().as_rational() == 36

    def test_degenerate_rejected(self, QQ):
        with pytest.raises(DegenerateMapError):
            RationalMap.from_affine(QQ, [0, 1, 1], [0, 2, 2])
        with pytest.raises(DegenerateMapError):
            RationalMap.from_affine(QQ, [1, 2, 1], [1, 1])  # shared root -1

    def test_degree_one_rejected(self, QQ):
        with pytest.raises(ValueError):
            RationalMap.from_affine(QQ, [1, 1], [1])


class TestIteration:
    def test_second_iterate_of_x2_plus_1(self, x2_plus_1, QQ):
        f2 = x2_plus_1.iterate(2)
        # (x^2+1)^2 + 1 = x^4 + 2x^2 + 2
        assert f2.num.coeffs == (QQ(2), QQ(0), QQ(2), QQ(0), QQ(1))

    def test_iterate_one_is_identity_case(self, x2_plus_1):
        assert x2_plus_1.iterate(1) is x2_plus_1

    def test_rabbit_critical_orbit_closes(self, rabbit, rabbit_field):
        K = rabbit_field
        assert rabbit.iterate(3).eval_point(K.zero()) == K.zero()

    def test_homomorphism_randomized(self, QQ):
        rng = random.Random(88)
        maps = [RationalMap.from_affine(QQ, [1, 0, 1], [1]),
                RationalMap.from_affine(QQ, [7, 0, 1], [1, 0, 1]),
                RationalMap.from_affine(QQ, [1, 2, 0, 1], [1])]
        for f in maps:
            for _ in range(4):
                n, m = rng.randint(1, 2), rng.randint(1, 2)
                lhs = f.iterate(n + m)
                rhs_num, rhs_den = __import__("arbor.algebra", fromlist=["poly_compose_hom"]) \
                    .poly_compose_hom((f.iterate(n).num, f.iterate(n).den),
                                      (f.iterate(m).num, f.iterate(m).den))
                assert lhs.num == rhs_num and lhs.den == rhs_den


class TestCriticalData:
    def test_x2_plus_c_support(self, rabbit):
        S = rabbit.critical_data().support_form
        # support is {0, inf}: the form X*Y
        assert S.degree == 2
        assert S.order_at_zero() == 1 and S.order_at_infinity() == 1

    def test_rational_map_support(self, seven_over_one):
        S = seven_over_one.critical_data().support_form
        assert S.order_at_zero() == 1 and S.order_at_infinity() == 1

    def test_cubing_multiplicities(self, QQ):
        f = RationalMap.from_affine(QQ, [0, 0, 0, 1], [1])
        W = f.critical_data().wronskian
        assert W.order_at_zero() == 2 and W.order_at_infinity() == 2


class TestGoodReduction:
    def test_bad_exactly_at_2_and_3(self, seven_over_one, QQ):
        for p, expect in ((2, False), (3, False), (5, True), (7, True)):
            P = ld.primes_above(QQ, p)[0]
            assert seven_over_one.good_reduction(P) is expect

    def test_unit_resultant(self, x2_plus_1, QQ):
        assert x2_plus_1.good_reduction(ld.primes_above(QQ, 5)[0])

    def test_rabbit_everywhere_good(self, rabbit, rabbit_field):
        for p in (2, 3, 5, 7, 11, 181):
            for P in ld.primes_above(rabbit_field, p):
                assert rabbit.good_reduction(P)

    def test_reduction_commutes_with_iteration(self, QQ, x2_plus_1, seven_over_one):
        for f, p in ((x2_plus_1, 5), (x2_plus_1, 7), (seven_over_one, 5)):
            P = ld.primes_above(QQ, p)[0]
            for n in (2, 3):
                lhs = f.iterate(n).reduce(P)
                rhs = f.reduce(P)
                # compose the reduced pair n-1 times
                num, den = rhs.num, rhs.den
                for _ in range(n - 1):
                    num2 = bf.compose_pair(rhs.num, num, den)
                    den2 = bf.compose_pair(rhs.den, num, den)
                    num, den = num2, den2
                # reduced forms agree projectively: cross products vanish
                assert (lhs.num * den - lhs.den * num).is_zero()


class TestHeight:
    def test_rabbit_at_two(self, rabbit, rabbit_field):
        P2 = ld.primes_above(rabbit_field, 2)[0]
        h, Q = rabbit.height_and_untwist(P2)
        assert h == 1
        # Q = x + c~
        assert Q.degree == 1
        cbar = P2.field.gen()
        assert Q.num.coeffs == (cbar, P2.field.one())
        assert Q.den.coeffs == (P2.field.one(), P2.field.zero())

    def test_x2_plus_1_at_5(self, x2_plus_1, QQ):
        P5 = ld.primes_above(QQ, 5)[0]
        assert x2_plus_1.height_and_untwist(P5)[0] == 0

    def test_x4_at_two(self, QQ):
        f = RationalMap.from_affine(QQ, [0, 0, 0, 0, 1], [1])
        P2 = ld.primes_above(QQ, 2)[0]
        h, Q = f.height_and_untwist(P2)
        assert h == 2 and Q.degree == 1
        assert Q.num.coeffs == (P2.field.zero(), P2.field.one())

    def test_reconstruction_identity(self, rabbit, rabbit_field, QQ, x2_plus_1):
        cases = [(rabbit, ld.primes_above(rabbit_field, 2)[0]),
                 (x2_plus_1, ld.primes_above(QQ, 2)[0]),
                 (x2_plus_1, ld.primes_above(QQ, 5)[0])]
        for f, P in cases:
            h, Q = f.height_and_untwist(P)
            fbar = f.reduce(P)
            q = P.p ** h
            # substitute (X^q, Y^q) into Q and compare projectively
            lift_num = bf.compose_pair(
                Q.num,
                bf.BinaryForm(P.field, [P.field.zero()] * q + [P.field.one()], q),
                bf.BinaryForm(P.field, [P.field.one()], q))
            lift_den = bf.compose_pair(
                Q.den,
                bf.BinaryForm(P.field, [P.field.zero()] * q + [P.field.one()], q),
                bf.BinaryForm(P.field, [P.field.one()], q))
            assert (fbar.num * lift_den - fbar.den * lift_num).is_zero()
            # maximality: Q itself is separable
            assert not Q.derivative_numerator().is_zero()


class TestResidualOrbits:
    def test_cycle_mod_5(self, x2_plus_1, QQ):
        P5 = ld.primes_above(QQ, 5)[0]
        orb = dyn.residual_orbit(x2_plus_1.reduce(P5), P5.field(0))
        assert orb.tail == ()
        assert [int(x.coords[0]) for x in orb.cycle] == [0, 1, 2]

    def test_tail_mod_3(self, x2_plus_1, QQ):
        P3 = ld.primes_above(QQ, 3)[0]
        orb = dyn.residual_orbit(x2_plus_1.reduce(P3), P3.field(0))
        assert [int(x.coords[0]) for x in orb.tail] == [0, 1]
        assert [int(x.coords[0]) for x in orb.cycle] == [2]

    def test_infinity_fixed_for_polynomials(self, x2_plus_1, QQ):
        P5 = ld.primes_above(QQ, 5)[0]
        orb = dyn.residual_orbit(x2_plus_1.reduce(P5), POINT_AT_INFINITY)
        assert orb.cycle == (POINT_AT_INFINITY,) and orb.period == 1

    def test_orbit_in_extension_field(self, x2_plus_1, QQ):
        P3 = ld.primes_above(QQ, 3)[0]
        F9 = ff.FiniteField(3, [1, 0, 1])
        u = F9.gen()
        orb = dyn.residual_orbit(x2_plus_1.reduce(P3).base_change(F9), u)
        # u^2 + 1 = 0, so u maps to 0, then the rational tail takes over
        assert orb.cycle[0] == F9(2) or [int(c) for c in orb.cycle[0].coords] == [2, 0]


class TestRamIndex:
    def test_critical_cycle(self, x2_plus_1, QQ):
        P5 = ld.primes_above(QQ, 5)[0]
        orb = dyn.residual_orbit(x2_plus_1.reduce(P5), P5.field(0))
        assert dyn.branch_ram_index(x2_plus_1, P5, orb.cycle) == 2

    def test_infinity_totally_ramified(self, x2_plus_1, QQ):
        P5 = ld.primes_above(QQ, 5)[0]
        assert dyn.branch_ram_index(x2_plus_1, P5, (POINT_AT_INFINITY,)) == 2

    def test_noncritical_cycle_is_unramified(self, x2_plus_1, QQ):
        P3 = ld.primes_above(QQ, 3)[0]
        orb = dyn.residual_orbit(x2_plus_1.reduce(P3), P3.field(0))
        assert dyn.branch_ram_index(x2_plus_1, P3, orb.cycle) == 1

    def test_wild_regime_rejected(self, rabbit, rabbit_field):
        P2 = ld.primes_above(rabbit_field, 2)[0]
        with pytest.raises(WildRegimeError):
            dyn.branch_ram_index(rabbit, P2, ())


class TestProp37ResidualCriticalSet:
    def test_residual_critical_set_matches_reductions(self, QQ, x2_plus_1,
                                                      seven_over_one):
        from arbor.portrait import reduce_form
        cases = [(x2_plus_1, 5), (x2_plus_1, 7), (seven_over_one, 5),
                 (seven_over_one, 11)]
        for f, p in cases:
            P = ld.primes_above(QQ, p)[0]
            h, _ = f.height_and_untwist(P)
            assert h == 0
            fbar = f.reduce(P)
            wbar = fbar.derivative_numerator()
            red_support = reduce_form(f.critical_data().support_form, P)
            # supports agree: same roots over the algebraic closure
            dehom_w = ff.poly_trim(list(wbar.dehomogenize()))
            dehom_s = ff.poly_trim(list(red_support.dehomogenize()))
            if dehom_w and dehom_s:
                sf_w = ff.poly_squarefree_part(dehom_w)
                sf_s = ff.poly_squarefree_part(dehom_s)
                assert sf_w == sf_s
            assert (wbar.order_at_infinity() > 0) == (red_support.order_at_infinity() > 0)


class TestUntwist:
    def _branch_for(self, fbar, start, length):
        """Greedy residual branch prefix: preimages by factoring fibers."""
        prefix = [start]
        F = fbar.field
        for _ in range(length - 1):
            target = prefix[-1]
            fiber = bf.BinaryForm(
                F, [a - target * b for a, b in zip(fbar.num.coeffs, fbar.den.coeffs)],
                fbar.degree)
            dehom = fiber.dehomogenize()
            root = None
            for g, _m in ff.factor(dehom):
                if ff.poly_deg(g) == 1:
                    root = -g[0] / g[1]
                    break
            assert root is not None
            prefix.append(root)
        return prefix

    def test_untwisted_prefix_is_a_branch_for_quotient(self, QQ):
        # x^4 over F_2(t^3+t+1)-style fields has h = 2 and Q = x
        f = RationalMap.from_affine(QQ, [0, 0, 0, 0, 1], [1])
        P2 = ld.primes_above(QQ, 2)[0]
        h, Q = f.height_and_untwist(P2)
        F8 = ff.FiniteField(2, [1, 1, 0, 1])
        fbar = f.reduce(P2).base_change(F8)
        g = F8.gen()
        prefix = self._branch_for(fbar, g, 4)
        Qbar = Q.base_change(F8)
        beta = dyn.untwist_branch(fbar, prefix, h)
        for n in range(len(beta) - 1):
            assert Qbar.eval_point(beta[n + 1]) == beta[n]

    def test_untwist_retwist_roundtrip(self, QQ):
        f = RationalMap.from_affine(QQ, [0, 0, 0, 0, 1], [1])
        P2 = ld.primes_above(QQ, 2)[0]
        h, _ = f.height_and_untwist(P2)
        F8 = ff.FiniteField(2, [1, 1, 0, 1])
        fbar = f.reduce(P2).base_change(F8)
        g = F8.gen()
        prefix = self._branch_for(fbar, g ** 3, 5)
        beta = dyn.untwist_branch(fbar, prefix, h)
        assert dyn.retwist_branch(beta, h) == prefix

    def test_height_zero_is_identity(self, x2_plus_1, QQ):
        P5 = ld.primes_above(QQ, 5)[0]
        fbar = x2_plus_1.reduce(P5)
        prefix = [P5.field(0), P5.field(2)]
        assert dyn.untwist_branch(fbar, prefix, 0) == prefix

    def test_prime_field_entries_unchanged(self, QQ):
        f = RationalMap.from_affine(QQ, [0, 0, 0, 0, 1], [1])
        P2 = ld.primes_above(QQ, 2)[0]
        h, _ = f.height_and_untwist(P2)
        fbar = f.reduce(P2)
        prefix = [P2.field(1), P2.field(1), P2.field(1)]
        assert dyn.untwist_branch(fbar, prefix, h) == prefix

    def test_unstable_coefficients_rejected(self, rabbit, rabbit_field):
        # rabbit at 2: coefficients in F_8 are not fixed by Frobenius^1
        P2 = ld.primes_above(rabbit_field, 2)[0]
        h, _ = rabbit.height_and_untwist(P2)
        fbar = rabbit.reduce(P2)
        with pytest.raises(WildRegimeError):
            dyn.untwist_branch(fbar, [P2.field(0), P2.field(0)], h)
