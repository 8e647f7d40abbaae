"""Arithmetic functions, M_s membership, and the exact algebraic shapes."""

import math

import gmpy2
import pytest
from gmpy2 import mpq

from thetacert.gaussian import GaussRat
from thetacert.numthy import (
    AlgebraicParseError,
    GaussianRational,
    IrrationalMarker,
    RootForm,
    UnsupportedAlgebraic,
    alg_div,
    alg_inv,
    alg_mul,
    alg_neg,
    divisors,
    factorize,
    fourth_power_rational,
    in_Ms,
    intersect_Ms_is_units,
    is_gaussian_unit,
    make_algebraic,
    odd_part,
    parse_beta,
    psi,
    w_count,
)


class TestGaussRat:
    def test_field_ops(self):
        a = GaussRat(mpq(1, 2), mpq(-3, 4))
        b = GaussRat(2, 1)
        assert (a * b) / b == a
        assert a + (-a) == GaussRat(0)
        assert (a / b) * b == a

    def test_pow_and_norm(self):
        z = GaussRat(1, 1)
        assert z ** 4 == GaussRat(-4)
        assert z.norm() == 2
        assert (z.conj() * z).re == z.norm()

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            GaussRat(1) / GaussRat(0)


class TestIntegerFunctions:
    def test_psi_examples(self):
        assert psi(3) == 4
        assert psi(9) == 12
        assert psi(15) == 24
        assert psi(1) == 1

    def test_psi_multiplicative_to_200(self):
        for a in range(1, 201):
            for b in range(1, 200 // a + 1):
                if math.gcd(a, b) == 1:
                    assert psi(a * b) == psi(a) * psi(b)

    def test_factorize(self):
        assert factorize(360) == {2: 3, 3: 2, 5: 1}
        assert factorize(1) == {}
        assert factorize(97) == {97: 1}

    def test_divisors(self):
        assert divisors(45) == [1, 3, 5, 9, 15, 45]

    def test_odd_part(self):
        assert odd_part(40) == (3, 5)
        assert odd_part(7) == (0, 7)
        assert odd_part(16) == (4, 1)

    def test_w_count_examples(self):
        assert all(w_count(1, m) == m for m in range(1, 30))
        assert w_count(3, 1) == 1
        assert w_count(2, 4) == 2  # k in {1, 3}
        assert w_count(9, 1) == 1
        assert w_count(3, 3) == 2

    def test_w_count_brute_force(self):
        for a in range(1, 15):
            for b in range(1, 15):
                expected = sum(1 for k in range(b) if math.gcd(math.gcd(a, b), k) == 1)
                assert w_count(a, b) == expected

    def test_w_sum_equals_psi_for_odd_s(self):
        # total multiplicity in the X-axis product equals the X-degree law
        for s in range(3, 100, 2):
            assert sum(w_count(s // u, u) for u in divisors(s)) == psi(s)


class TestShapes:
    def test_rootform_invariants(self):
        with pytest.raises(ValueError):
            RootForm(GaussRat(1), -2, 3)
        with pytest.raises(ValueError):
            RootForm(GaussRat(1), 1, 12)  # not squarefree
        with pytest.raises(ValueError):
            RootForm(GaussRat(2), 1, 3)   # phase not a unit

    def test_make_algebraic_normalizes(self):
        a = make_algebraic(GaussRat(1), 1, 9)
        assert isinstance(a, GaussianRational) and a.value == GaussRat(3)
        b = make_algebraic(GaussRat(1), 2, 12)
        assert isinstance(b, RootForm) and (b.r, b.u) == (mpq(4), 3)
        c = make_algebraic(GaussRat(1), 0, 5)
        assert isinstance(c, GaussianRational) and c.is_zero()

    def test_equality_across_variants(self):
        assert parse_beta("sqrt(3)") != parse_beta("3")
        assert parse_beta("sqrt(3)") == parse_beta("sqrt(3)")
        assert parse_beta("2") == parse_beta("2")


class TestInMs:
    @pytest.mark.parametrize("beta,s,expected", [
        ("sqrt(3)", 3, True),
        ("2", 3, False),        # 2 = sqrt(4), 4 does not divide 3
        ("i", 15, True),        # u = 1
        ("1", 9, True),
        ("-1", 9, True),
        ("-i*sqrt(15)", 15, True),
        ("i*sqrt(5)", 15, True),
        ("sqrt(5)", 9, False),
        ("3", 9, True),         # 3 = sqrt(9), 9 | 9
        ("3/2", 15, False),     # radicand 9/4 not an integer
        ("1+i", 15, False),     # mixed: not phase * sqrt(u)
        ("0", 3, False),
    ])
    def test_membership(self, beta, s, expected):
        assert in_Ms(parse_beta(beta), s) is expected

    def test_enumeration_oracle(self):
        # brute-force the defining set for s = 15 over small candidates
        for u in divisors(15):
            for txt in (f"sqrt({u})", f"-sqrt({u})", f"i*sqrt({u})", f"-i*sqrt({u})"):
                assert in_Ms(parse_beta(txt), 15)
        for u in (2, 4, 7, 30):
            assert not in_Ms(parse_beta(f"sqrt({u})"), 15)

    def test_rejects_even_or_small_s(self):
        with pytest.raises(ValueError):
            in_Ms(parse_beta("1"), 4)
        with pytest.raises(ValueError):
            in_Ms(parse_beta("1"), 1)

    def test_membership_implies_fourth_power_is_square_of_divisor(self):
        for txt, s in [("sqrt(3)", 3), ("i*sqrt(5)", 5), ("-sqrt(15)", 15),
                       ("i", 15), ("3", 9)]:
            b = parse_beta(txt)
            assert in_Ms(b, s)
            f = fourth_power_rational(b)
            root, exact = gmpy2.iroot(int(f), 2)
            assert exact and s % int(root) == 0


class TestIntersection:
    def test_examples(self):
        assert intersect_Ms_is_units(3, 5) is True
        assert intersect_Ms_is_units(3, 9) is False
        assert intersect_Ms_is_units(15, 9) is False

    def test_matches_brute_force_on_radicands(self):
        for s1 in range(3, 30, 2):
            for s2 in range(3, 30, 2):
                shared = [u for u in divisors(s1) if u > 1 and s2 % u == 0]
                assert intersect_Ms_is_units(s1, s2) is (not shared)


class TestUnitAndFourthPower:
    def test_units(self):
        assert is_gaussian_unit(parse_beta("-i"))
        assert is_gaussian_unit(parse_beta("1"))
        assert not is_gaussian_unit(parse_beta("1+i"))
        assert not is_gaussian_unit(parse_beta("3/5"))
        assert not is_gaussian_unit(parse_beta("sqrt(2)"))

    def test_fourth_powers(self):
        assert fourth_power_rational(parse_beta("sqrt(3)")) == 9
        assert fourth_power_rational(parse_beta("i")) == 1
        assert fourth_power_rational(parse_beta("1+i")) == -4
        assert fourth_power_rational(parse_beta("2/3")) == mpq(16, 81)
        assert fourth_power_rational(parse_beta("i*sqrt(6)")) == 36

    def test_irrational_marker_keeps_value(self):
        m = fourth_power_rational(parse_beta("2+i"))
        assert isinstance(m, IrrationalMarker)
        assert m.value == GaussRat(2, 1) ** 4

    def test_rational_iff_axis_or_diagonal(self):
        # (p+qi)^4 rational iff p=0, q=0, or |p|=|q|
        assert isinstance(fourth_power_rational(parse_beta("3-3i")), mpq)
        assert isinstance(fourth_power_rational(parse_beta("1-2i")), IrrationalMarker)


class TestPartialAlgebra:
    def test_mul_combines_radicands(self):
        c = alg_mul(parse_beta("sqrt(6)"), parse_beta("sqrt(10)"))
        assert isinstance(c, RootForm) and (c.r, c.u) == (mpq(2), 15)

    def test_mul_collapses_to_rational(self):
        d = alg_mul(parse_beta("sqrt(2)"), parse_beta("sqrt(2)"))
        assert isinstance(d, GaussianRational) and d.value == GaussRat(2)

    def test_inverse_of_rootform(self):
        e = alg_inv(parse_beta("i*sqrt(3)"))
        assert isinstance(e, RootForm)
        assert e.phase == GaussRat(0, -1) and e.r == mpq(1, 3) and e.u == 3
        assert alg_mul(e, parse_beta("i*sqrt(3)")).value == GaussRat(1)

    def test_div_examples(self):
        b = alg_div(parse_beta("sqrt(8)"), parse_beta("2"))
        assert isinstance(b, RootForm) and (b.r, b.u) == (mpq(1), 2)

    def test_neg(self):
        assert alg_neg(parse_beta("sqrt(3)")).phase == GaussRat(-1)
        assert alg_neg(parse_beta("2+i")).value == GaussRat(-2, -1)

    def test_unsupported_mix(self):
        with pytest.raises(UnsupportedAlgebraic):
            alg_mul(parse_beta("sqrt(2)"), parse_beta("1+i"))

    def test_mul_rootform_by_zero(self):
        z = alg_mul(parse_beta("sqrt(2)"), parse_beta("0"))
        assert isinstance(z, GaussianRational) and z.is_zero()


class TestParse:
    @pytest.mark.parametrize("text,re_q,im_q", [
        ("3", 3, 0),
        ("-3/4", mpq(-3, 4), 0),
        ("i/3", 0, mpq(1, 3)),
        ("2+i", 2, 1),
        ("1-1i", 1, -1),
        ("-i", 0, -1),
        ("sqrt(9)", 3, 0),
    ])
    def test_gaussian_forms(self, text, re_q, im_q):
        b = parse_beta(text)
        assert isinstance(b, GaussianRational)
        assert b.value == GaussRat(re_q, im_q)

    @pytest.mark.parametrize("text,phase,r,u", [
        ("sqrt(3)", GaussRat(1), 1, 3),
        ("-sqrt(3)", GaussRat(-1), 1, 3),
        ("i*sqrt(5)", GaussRat(0, 1), 1, 5),
        ("-i*sqrt(5)", GaussRat(0, -1), 1, 5),
        ("2*sqrt(3)", GaussRat(1), 2, 3),
        ("sqrt(12)", GaussRat(1), 2, 3),
        ("sqrt(3)/2", GaussRat(1), mpq(1, 2), 3),
    ])
    def test_root_forms(self, text, phase, r, u):
        b = parse_beta(text)
        assert isinstance(b, RootForm)
        assert (b.phase, b.r, b.u) == (phase, mpq(r), u)

    @pytest.mark.parametrize("bad", ["", "zz", "sqrt(2)+1", "sqrt(2)+sqrt(3)", "ii"])
    def test_rejects(self, bad):
        with pytest.raises(AlgebraicParseError):
            parse_beta(bad)
