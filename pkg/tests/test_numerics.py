"""Ball arithmetic: exact containment, error paths, certification."""

import gmpy2
import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, settings, strategies as st

from thetacert.numerics import (
    BallComplex,
    BallStraddlesBranchCut,
    DivisorContainsZero,
    add,
    babs,
    ball_arith,
    ball_from_json,
    ball_to_json,
    certify_below,
    certify_nonzero,
    conj,
    div,
    kth_root_principal,
    mul,
    neg,
    pow_int,
    sub,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=64)


def ball(re, im, prec=96):
    return BallComplex.from_rational(mpq(re), mpq(im), prec)


def cmul(ar, ai, br, bi):
    return ar * br - ai * bi, ar * bi + ai * br


class TestConstruction:
    def test_from_rational_contains_value(self):
        b = ball(mpq(1, 3), mpq(-2, 7))
        assert b.contains_rational(mpq(1, 3), mpq(-2, 7))

    def test_from_rational_radius_is_representation_error_only(self):
        b = ball(mpq(1, 3), 0, prec=128)
        assert mpq(b.rad) <= mpq(2) ** -120

    def test_dyadic_midpoint_is_exact(self):
        b = ball(mpq(3, 8), mpq(-5, 4), prec=64)
        assert b.rad == 0
        assert mpq(b.mid_re) == mpq(3, 8)

    def test_zero(self):
        z = BallComplex.zero(64)
        assert z.is_exact_zero()
        assert z.contains_rational(0, 0)

    def test_signed_zero_normalized(self):
        b = BallComplex(mpfr("-0", 64), mpfr("-0", 64), 0, 64)
        assert not gmpy2.is_signed(b.mid_re)
        assert not gmpy2.is_signed(b.mid_im)

    def test_rejects_low_precision(self):
        with pytest.raises(ValueError):
            BallComplex.from_int(1, 16)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            BallComplex(mpfr("inf"), mpfr(0), 0, 64)
        with pytest.raises(ValueError):
            BallComplex(mpfr(0), mpfr(0), mpfr("nan"), 64)

    def test_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            BallComplex(mpfr(0), mpfr(0), mpq(-1, 4), 64)


class TestEnclosure:
    """Random rational inputs: the exact result must land inside the ball."""

    @given(rationals, rationals, rationals, rationals)
    @settings(max_examples=150, deadline=None)
    def test_add_sub_mul(self, ar, ai, br, bi):
        ar, ai, br, bi = mpq(ar), mpq(ai), mpq(br), mpq(bi)
        a, b = ball(ar, ai), ball(br, bi)
        assert add(a, b).contains_rational(ar + br, ai + bi)
        assert sub(a, b).contains_rational(ar - br, ai - bi)
        assert mul(a, b).contains_rational(*cmul(ar, ai, br, bi))

    @given(rationals, rationals, rationals, rationals)
    @settings(max_examples=150, deadline=None)
    def test_div(self, ar, ai, br, bi):
        ar, ai, br, bi = mpq(ar), mpq(ai), mpq(br), mpq(bi)
        if br == 0 and bi == 0:
            return
        den = br * br + bi * bi
        q = div(ball(ar, ai), ball(br, bi))
        assert q.contains_rational((ar * br + ai * bi) / den, (ai * br - ar * bi) / den)

    @given(rationals, rationals)
    @settings(max_examples=100, deadline=None)
    def test_neg_conj(self, ar, ai):
        ar, ai = mpq(ar), mpq(ai)
        a = ball(ar, ai, prec=200)
        assert neg(a).contains_rational(-ar, -ai)
        assert conj(a).contains_rational(ar, -ai)
        # negation of the midpoint is exact, so the radius must not grow
        assert neg(a).rad == a.rad

    @given(rationals, rationals, st.integers(min_value=0, max_value=7))
    @settings(max_examples=100, deadline=None)
    def test_pow_int(self, ar, ai, k):
        ar, ai = mpq(ar), mpq(ai)
        er, ei = mpq(1), mpq(0)
        for _ in range(k):
            er, ei = cmul(er, ei, ar, ai)
        assert pow_int(ball(ar, ai), k).contains_rational(er, ei)

    @given(rationals, rationals)
    @settings(max_examples=100, deadline=None)
    def test_babs_brackets_modulus(self, ar, ai):
        ar, ai = mpq(ar), mpq(ai)
        a = ball(ar, ai)
        m = babs(a)
        # |z|^2 is rational; compare squares to stay exact
        lo = mpq(m.mid_re) - mpq(m.rad)
        hi = mpq(m.mid_re) + mpq(m.rad)
        assert hi * hi >= ar * ar + ai * ai
        if lo > 0:
            assert lo * lo <= ar * ar + ai * ai


class TestPrecisionRefinement:
    def test_radius_shrinks_with_precision(self):
        def run(prec):
            x = div(BallComplex.from_int(1, prec), BallComplex.from_int(3, prec))
            y = kth_root_principal(BallComplex.from_int(2, prec), 3)
            return mul(x, y)

        lo, hi = run(64), run(512)
        assert mpq(hi.rad) < mpq(lo.rad) / 2**300
        assert lo.overlaps(hi)

    def test_abs_bounds_are_ordered(self):
        a = ball(mpq(3, 7), mpq(1, 9))
        assert mpq(a.abs_lower()) <= mpq(a.abs_upper())


class TestDivision:
    def test_exact_value(self):
        q = div(ball(1, 0, 128), ball(0, 1, 128))
        assert q.contains_rational(0, -1)

    def test_divisor_containing_zero_raises(self):
        fuzzy = BallComplex(mpfr(0, 64), mpfr(0, 64), mpq(1, 2), 64)
        with pytest.raises(DivisorContainsZero):
            div(BallComplex.from_int(1, 64), fuzzy)

    def test_divisor_near_zero_but_excluded_works(self):
        small = ball(mpq(1, 10**20), 0, 256)
        q = div(BallComplex.from_int(1, 256), small)
        assert q.contains_rational(10**20, 0)


class TestRoots:
    def test_sqrt_of_four(self):
        r = kth_root_principal(BallComplex.from_int(4, 128), 2)
        assert r.contains_rational(2, 0)

    def test_principal_branch_negative_axis_point(self):
        # point balls on the cut are fine: arg = +pi, sqrt(-4) = 2i
        r = kth_root_principal(BallComplex.from_int(-4, 128), 2)
        assert r.contains_rational(0, 2)

    def test_straddling_ball_raises(self):
        fuzzy = BallComplex(mpfr(-4, 64), mpfr(0, 64), mpq(1, 10), 64)
        with pytest.raises(BallStraddlesBranchCut):
            kth_root_principal(fuzzy, 2)

    def test_ball_containing_origin_raises(self):
        fuzzy = BallComplex(mpfr(0, 64), mpfr(0, 64), mpq(1, 10), 64)
        with pytest.raises(BallStraddlesBranchCut):
            kth_root_principal(fuzzy, 4)

    def test_root_of_exact_zero(self):
        assert kth_root_principal(BallComplex.zero(64), 5).is_exact_zero()

    def test_eighth_root_consistent_with_iterated_sqrt(self):
        x = BallComplex.from_int(2, 128)
        direct = kth_root_principal(x, 8)
        iterated = x
        for _ in range(3):
            iterated = kth_root_principal(iterated, 2)
        assert direct.overlaps(iterated)
        # oracle: 2^(1/8) recomputed at 500 bits, frozen via exact dyadic compare
        truth = gmpy2.context(precision=500).rootn(mpfr(2, 500), 8)
        for b in (direct, iterated):
            assert abs(mpq(b.mid_re) - mpq(truth)) <= mpq(b.rad)

    @given(rationals.filter(lambda r: r > 0), st.integers(min_value=2, max_value=6))
    @settings(max_examples=60, deadline=None)
    def test_kth_power_of_root_contains_input(self, x, k):
        x = mpq(x)
        r = kth_root_principal(ball(x, 0, 200), k)
        assert pow_int(r, k).contains_rational(x, 0)

    def test_cube_root_of_i(self):
        # principal cube root of i is e^{i pi/6}; its square is e^{i pi/3}
        r = kth_root_principal(ball(0, 1, 256), 3)
        sq = mul(r, r)
        # Re(e^{i pi/3}) = 1/2 exactly
        assert sq.contains_ball(add(ball(mpq(1, 2), 0, 256),
                                    mul(kth_root_principal(ball(3, 0, 256), 2),
                                        ball(0, mpq(1, 2), 256))))


class TestCertification:
    def test_nonzero_certified(self):
        assert certify_nonzero(ball(mpq(1, 10**30), 0, 256))

    def test_nonzero_refused_when_zero_inside(self):
        a = sub(ball(1, 0, 128), ball(1, 0, 128))
        assert not certify_nonzero(a)

    def test_below_tolerance(self):
        a = sub(ball(1, 0, 128), ball(1, 0, 128))
        assert certify_below(a, mpq(1, 10**40))

    def test_below_refused_when_too_large(self):
        assert not certify_below(ball(1, 0, 128), mpq(1, 10**40))

    def test_below_requires_positive_tolerance(self):
        with pytest.raises(ValueError):
            certify_below(BallComplex.zero(64), 0)

    @given(rationals, rationals)
    @settings(max_examples=100, deadline=None)
    def test_nonzero_never_certified_for_ball_containing_zero(self, ar, ai):
        b = BallComplex(mpfr(mpq(ar), 64), mpfr(mpq(ai), 64), mpq(200), 64)
        assert b.contains_rational(0, 0)
        assert not certify_nonzero(b)


class TestDispatcher:
    def test_named_ops(self):
        a, b = ball(2, 1), ball(1, -1)
        assert ball_arith("add", a, b).contains_rational(3, 0)
        assert ball_arith("mul", a, b).contains_rational(3, -1)
        assert ball_arith("neg", a).contains_rational(-2, -1)
        assert ball_arith("abs", b).contains_ball(
            kth_root_principal(ball(2, 0, 96), 2))

    def test_exact_integer_add(self):
        s = ball_arith("add", BallComplex.from_int(2, 64), BallComplex.from_int(3, 64))
        assert mpq(s.mid_re) == 5
        assert mpq(s.rad) <= mpq(2) ** -61

    def test_mul_by_exact_zero_annihilates(self):
        x = div(ball(7, -3, 64), ball(2, 5, 64))
        z = ball_arith("mul", BallComplex.zero(64), x)
        assert z.is_exact_zero()

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            ball_arith("frobnicate", ball(1, 0))

    def test_arity_enforced(self):
        with pytest.raises(ValueError):
            ball_arith("neg", ball(1, 0), ball(2, 0))
        with pytest.raises(ValueError):
            ball_arith("mul", ball(1, 0))


class TestSerialization:
    def test_roundtrip_bit_exact(self):
        b = div(ball(1, 2, 192), ball(3, -5, 192))
        d = ball_to_json(b)
        b2 = ball_from_json(d, 192)
        assert b2.mid_re == b.mid_re
        assert b2.mid_im == b.mid_im
        assert b2.rad == b.rad

    def test_json_fields_are_strings(self):
        d = ball_to_json(ball(1, -1))
        assert set(d) == {"re", "im", "rad"}
        assert all(isinstance(v, str) for v in d.values())
