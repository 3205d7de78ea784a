"""Kernel arithmetic: resultants, discriminants, norms, factorization."""

import random
from fractions import Fraction

import pytest

from arbor.algebra import binforms as bf
from arbor.algebra import finitefield as ff
from arbor.algebra import poly_compose_hom
from arbor.algebra.binforms import BinaryForm
from arbor.algebra.integers import factor_integer, is_prime
from arbor.algebra.numberfield import (
    NumberFieldSpec,
    is_irreducible_over_q,
    nf_norm,
    rationals,
)


def qform(QQ, coeffs, deg=None):
    return BinaryForm(QQ, [QQ(Fraction(c)) for c in coeffs], deg)


class TestResultant:
    def test_x2p7_x2p1(self, QQ):
        F = qform(QQ, [7, 0, 1])
        G = qform(QQ, [1, 0, 1])
        assert bf.resultant(F, G).as_rational() == 36

    def test_shared_root(self, QQ):
        F = qform(QQ, [-1, 1])
        assert bf.resultant(F, F).as_rational() == 0

    def test_x_and_y(self, QQ):
        assert bf.resultant(qform(QQ, [0, 1]), qform(QQ, [1, 0])).as_rational() == 1

    def test_matches_sylvester_on_random_forms(self, QQ):
        rng = random.Random(20240801)
        for _ in range(150):
            n, k = rng.randint(1, 4), rng.randint(1, 4)
            F = qform(QQ, [rng.randint(-5, 5) for _ in range(n + 1)], n)
            G = qform(QQ, [rng.randint(-5, 5) for _ in range(k + 1)], k)
            if F.is_zero() or G.is_zero():
                continue
            assert bf.resultant(F, G) == bf.sylvester_resultant(F, G)

    def test_multiplicativity(self, QQ):
        rng = random.Random(7)
        for _ in range(60):
            degs = [rng.randint(1, 3) for _ in range(3)]
            forms = [qform(QQ, [rng.randint(-4, 4) for _ in range(d + 1)], d)
                     for d in degs]
            if any(F.is_zero() for F in forms):
                continue
            A, B, C = forms
            assert bf.resultant(A, B * C) == bf.resultant(A, B) * bf.resultant(A, C)

    def test_zero_iff_common_projective_root(self, QQ):
        # both vanish at infinity
        F = qform(QQ, [1, 1, 0], 2)
        G = qform(QQ, [3, 0], 1)
        assert bf.resultant(F, G).is_zero()


class TestDiscriminant:
    def test_x2_plus_7(self, QQ):
        assert bf.discriminant(qform(QQ, [7, 0, 1])).as_rational() == -28

    def test_repeated_root_at_zero(self, QQ):
        assert bf.discriminant(qform(QQ, [0, 0, 1], 3)).as_rational() == 0

    def test_x2_minus_y2(self, QQ):
        assert bf.discriminant(qform(QQ, [-1, 0, 1])).as_rational() == 4

    def test_depressed_cubic(self, QQ):
        # x^3 + px + q has discriminant -4p^3 - 27q^2
        F = qform(QQ, [5, 3, 0, 1])
        assert bf.discriminant(F).as_rational() == -4 * 27 - 27 * 25

    def test_degree_below_two_rejected(self, QQ):
        with pytest.raises(ValueError):
            bf.discriminant(qform(QQ, [1, 1]))

    def test_zero_iff_squarefree_part_drops_degree(self, QQ):
        rng = random.Random(99)
        for _ in range(80):
            n = rng.randint(2, 5)
            F = qform(QQ, [rng.randint(-3, 3) for _ in range(n + 1)], n)
            if F.is_zero():
                continue
            drops = bf.squarefree_part(F).degree < F.degree
            assert (bf.discriminant(F).is_zero()) == drops


class TestSquarefree:
    def test_char_zero(self, QQ):
        x_minus_1 = qform(QQ, [-1, 1])
        x_plus_2 = qform(QQ, [2, 1])
        F = x_minus_1 * x_minus_1 * x_plus_2
        sf = bf.squarefree_part(F)
        assert sf.degree == 2
        assert bf.resultant(sf, x_minus_1).is_zero()
        assert bf.resultant(sf, x_plus_2).is_zero()

    def test_x_squared_over_f5(self):
        F5 = ff.prime_field(5)
        assert ff.poly_squarefree_part(ff.poly_from_ints(F5, [0, 0, 1])) == \
            ff.poly_from_ints(F5, [0, 1])

    def test_already_squarefree(self, QQ):
        F = qform(QQ, [7, 0, 1])
        assert bf.squarefree_part(F) == bf.normalize(F)

    def test_pth_power_content(self):
        # (x+1)^3 * x over F_3: radical is x(x+1)
        F3 = ff.prime_field(3)
        cube = ff.poly_from_ints(F3, [1, 3, 3, 1])
        poly = ff.poly_mul(cube, ff.poly_from_ints(F3, [0, 1]))
        rad = ff.poly_squarefree_part(poly)
        assert rad == ff.poly_from_ints(F3, [0, 1, 1])


class TestFiniteFieldFactor:
    def test_x2_plus_1_mod_5(self):
        F5 = ff.prime_field(5)
        fac = ff.factor(ff.poly_from_ints(F5, [1, 0, 1]))
        roots = sorted(int((-g[0]).coords[0]) for g, _ in fac)
        assert roots == [2, 3]

    def test_x2_plus_1_mod_3_irreducible(self):
        F3 = ff.prime_field(3)
        fac = ff.factor(ff.poly_from_ints(F3, [1, 0, 1]))
        assert len(fac) == 1 and fac[0][1] == 1
        assert ff.poly_deg(fac[0][0]) == 2

    def test_x_cubed_mod_2(self):
        F2 = ff.prime_field(2)
        fac = ff.factor(ff.poly_from_ints(F2, [0, 0, 0, 1]))
        assert fac == [(ff.poly_from_ints(F2, [0, 1]), 3)]

    def test_remultiplication_randomized(self):
        rng = random.Random(5150)
        for _ in range(60):
            p = rng.choice([2, 3, 5, 7, 13])
            F = ff.prime_field(p)
            coeffs = [rng.randrange(p) for _ in range(rng.randint(2, 8))]
            poly = ff.poly_trim([F(c) for c in coeffs])
            if ff.poly_deg(poly) < 1:
                continue
            fac = ff.factor(poly)
            prod = [poly[-1]]
            for g, m in fac:
                for _ in range(m):
                    prod = ff.poly_mul(prod, g)
            assert prod == poly

    def test_extension_field_factor(self):
        F9 = ff.FiniteField(3, [1, 0, 1])
        u = F9.gen()
        x = [F9.zero(), F9.one()]
        poly = ff.poly_sub(ff.poly_mul(x, x), [u])
        fac = ff.factor(poly)
        prod = [F9.one()]
        for g, m in fac:
            for _ in range(m):
                prod = ff.poly_mul(prod, g)
        assert prod == ff.poly_monic(poly)


class TestNumberField:
    def test_reducible_min_poly_rejected(self):
        with pytest.raises(ValueError):
            NumberFieldSpec([-1, 0, 1])

    def test_zassenhaus_handles_x4_plus_1(self):
        # reducible modulo every prime, irreducible over Q
        assert is_irreducible_over_q([1, 0, 0, 0, 1])
        assert not is_irreducible_over_q([4, 0, 0, 0, 1])

    def test_norm_of_5_minus_theta(self, rabbit_field):
        K = rabbit_field
        assert nf_norm(K(5) - K.gen()) == 181

    def test_norm_of_one_and_minus_theta(self, rabbit_field):
        K = rabbit_field
        assert nf_norm(K.one()) == 1
        assert nf_norm(-K.gen()) == 1

    def test_norm_of_rational_is_power(self, rabbit_field):
        assert nf_norm(rabbit_field(3)) == 27

    def test_norm_multiplicative_randomized(self, rabbit_field):
        K = rabbit_field
        rng = random.Random(31337)
        for _ in range(40):
            a = K.from_coords([Fraction(rng.randint(-9, 9), rng.choice([1, 2, 5]))
                               for _ in range(3)])
            b = K.from_coords([Fraction(rng.randint(-9, 9)) for _ in range(3)])
            assert nf_norm(a * b) == nf_norm(a) * nf_norm(b)

    def test_inverse(self, rabbit_field):
        K = rabbit_field
        a = K(5) - K.gen()
        assert a * a.inverse() == K.one()


class TestFactorInteger:
    def test_119(self):
        assert factor_integer(119).factors == [(7, 1), (17, 1)]

    def test_181_prime(self):
        assert factor_integer(181).factors == [(181, 1)]

    def test_one(self):
        out = factor_integer(1)
        assert out.factors == [] and out.complete

    def test_sign_and_value_roundtrip(self):
        rng = random.Random(77)
        for _ in range(40):
            n = rng.randint(2, 10 ** 12) * rng.choice([1, -1])
            out = factor_integer(n)
            assert out.complete
            assert out.value() == n

    def test_budget_reports_cofactor(self):
        # two large primes; a tiny budget cannot split the product
        a = 2 ** 89 - 1
        b = 2 ** 107 - 1
        assert is_prime(a) and is_prime(b)
        out = factor_integer(a * b, budget=10)
        assert not out.complete
        assert out.cofactor == a * b

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            factor_integer(0)


class TestComposeHom:
    def test_degree_multiplies(self, QQ):
        N = qform(QQ, [1, 0, 1])
        D = qform(QQ, [0, 1, 0], 2)
        num, den = poly_compose_hom((N, D), (N, D))
        assert num.degree == 4 and den.degree == 4

    def test_pure_powers(self, QQ):
        N = qform(QQ, [0, 0, 1], 2)
        D = qform(QQ, [1, 0, 0], 2)
        num, den = poly_compose_hom((N, D), (N, D))
        assert num == qform(QQ, [0, 0, 0, 0, 1], 4)
        assert den == qform(QQ, [1, 0, 0, 0, 0], 4)

    def test_quadratic_family(self, rabbit_field):
        K = rabbit_field
        c = K.gen()
        N = BinaryForm(K, [c, K.zero(), K.one()], 2)
        D = BinaryForm(K, [K.one()], 2)
        num, den = poly_compose_hom((N, D), (N, D))
        # (x^2+c)^2 + c
        expect = BinaryForm(K, [c * c + c, K.zero(), c + c, K.zero(), K.one()], 4)
        assert num == bf.normalize(expect)

    def test_associative_randomized(self, QQ):
        rng = random.Random(4242)
        for _ in range(15):
            pairs = []
            while len(pairs) < 3:
                d = rng.randint(2, 3)
                N = qform(QQ, [rng.randint(-3, 3) for _ in range(d + 1)], d)
                D = qform(QQ, [rng.randint(-3, 3) for _ in range(d + 1)], d)
                if N.is_zero() or D.is_zero() or bf.resultant(N, D).is_zero():
                    continue
                pairs.append((N, D))
            a, b, c = pairs
            left = poly_compose_hom(poly_compose_hom(a, b), c)
            right = poly_compose_hom(a, poly_compose_hom(b, c))
            assert left == right
            assert left[0].degree == a[0].degree * b[0].degree * c[0].degree
