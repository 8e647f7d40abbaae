"""Theta series, tau parsing, and certified evaluation against mpmath oracles."""

import mpmath
import pytest
from gmpy2 import mpq

from thetacert.numerics import BallComplex, add, certify_below, mul, pow_int, sub
from thetacert.qseries import qs_eval_ball, qs_pow_int
from thetacert.thetafun import (
    LambdaDegenerate,
    QuadSurd,
    TauNotInUpperHalfPlane,
    TauParseError,
    TauValue,
    ThetaKind,
    _nome_ball,
    j_eval,
    lambda_eval,
    lambda_series,
    parse_tau,
    tau_from_rationals,
    theta_eval,
    theta_eval_tau_ball,
    theta_series,
)

TOL40 = mpq(1, 10**40)

# independent oracle values (mpmath jtheta at 45 digits), frozen
THETA3_AT = {
    "i": "1.08643481121330801457531612151022345707",
    "i/2": "1.419495488083766123362186731351697790857",
    "1/3+i": ("1.043210430920364943743576768732822196641",
              "0.07484266177283784000835728131099447189154"),
}


def contains_decimal(ball, re_str, im_str="0"):
    # the ball radius is far below the oracle's own 40-digit window, so a
    # midpoint-within-window check is the right comparison
    wide = mpq(1, 10**35)
    return (abs(mpq(ball.mid_re) - _dec(re_str)) < wide
            and abs(mpq(ball.mid_im) - _dec(im_str)) < wide)


def _dec(s):
    s = s.strip()
    if "." in s:
        whole, frac = s.split(".")
        return mpq(int(whole + frac), 10 ** len(frac))
    return mpq(int(s))


class TestQuadSurd:
    def test_squarefree_normalization(self):
        s = QuadSurd(0, 1, 12)
        assert (s.b, s.d) == (mpq(2), 3)

    def test_perfect_square_folds_to_rational(self):
        s = QuadSurd(1, 1, 9)
        assert s.is_rational() and s.a == 4

    @pytest.mark.parametrize("a,b,d,expected", [
        (0, 0, 1, 0),
        (3, 0, 1, 1),
        (-2, 0, 1, -1),
        (0, 1, 2, 1),
        (0, -1, 2, -1),
        (2, -1, 3, 1),     # 2 > sqrt(3)
        (-2, 1, 3, -1),
        (1, -1, 2, -1),    # 1 < sqrt(2)
        (-1, 1, 2, 1),
        (mpq(7, 5), -1, 2, -1),    # 49/25 < 2
        (mpq(-99, 70), 1, 2, -1),  # 99/70 > sqrt(2): 9801 > 9800
        (mpq(99, 70), -1, 2, 1),
    ])
    def test_exact_sign(self, a, b, d, expected):
        assert QuadSurd(a, b, d).sign() == expected

    def test_ball_contains_value(self):
        s = QuadSurd(mpq(1, 3), mpq(2, 5), 7)
        b = s.to_ball(256)
        # (x - 1/3)^2 * 25/4 = 7 at the exact value; check via high-prec root
        root7 = pow_int(b, 1)
        shifted = sub(root7, BallComplex.from_rational(mpq(1, 3), 0, 256))
        sq = mul(shifted, shifted)
        assert sq.contains_rational(mpq(4, 25) * 7, 0)


class TestTauValue:
    def test_upper_half_plane_enforced(self):
        with pytest.raises(TauNotInUpperHalfPlane):
            TauValue(QuadSurd(0), QuadSurd(0))
        with pytest.raises(TauNotInUpperHalfPlane):
            TauValue(QuadSurd(1), QuadSurd(2, -1, 3))  # 2 - sqrt(3) > 0 is fine
            TauValue(QuadSurd(1), QuadSurd(1, -1, 2))  # 1 - sqrt(2) < 0

    def test_surd_imaginary_part_certified(self):
        t = TauValue(QuadSurd(0), QuadSurd(-1, 1, 2))  # sqrt(2) - 1 > 0
        assert t.im.sign() == 1

    def test_translate(self):
        t = tau_from_rationals(mpq(1, 3), 1).translate(2)
        assert t.re.a == mpq(7, 3)


class TestParse:
    @pytest.mark.parametrize("text,re_q,im_q", [
        ("i", (0, 0, 1), (1, 0, 1)),
        ("2i", (0, 0, 1), (2, 0, 1)),
        ("i/3", (0, 0, 1), (mpq(1, 3), 0, 1)),
        ("1/3+i", (mpq(1, 3), 0, 1), (1, 0, 1)),
        ("1+sqrt(3)*i", (1, 0, 1), (0, 1, 3)),
        ("1-1/2+2i", (mpq(1, 2), 0, 1), (2, 0, 1)),
        ("sqrt(8)+i", (0, 2, 2), (1, 0, 1)),
        ("2*sqrt(3)/7+i", (0, mpq(2, 7), 3), (1, 0, 1)),
        ("1000000i", (0, 0, 1), (10**6, 0, 1)),
    ])
    def test_grammar(self, text, re_q, im_q):
        t = parse_tau(text)
        assert (t.re.a, t.re.b, t.re.d) == (mpq(re_q[0]), mpq(re_q[1]), re_q[2])
        assert (t.im.a, t.im.b, t.im.d) == (mpq(im_q[0]), mpq(im_q[1]), im_q[2])

    @pytest.mark.parametrize("bad", ["", "zzz", "5..2", "sqrt(3)+sqrt(5)+i", "i+j", "--1+i"])
    def test_rejects(self, bad):
        with pytest.raises((TauParseError, TauNotInUpperHalfPlane)):
            parse_tau(bad)

    def test_lower_half_plane_rejected(self):
        with pytest.raises(TauNotInUpperHalfPlane):
            parse_tau("1-2i")
        with pytest.raises(TauNotInUpperHalfPlane):
            parse_tau("3/4")


class TestSeries:
    def test_theta3_prefix(self):
        s = theta_series(ThetaKind.theta3, 1, 10)
        assert s.coeffs == {0: mpq(1), 1: mpq(2), 4: mpq(2), 9: mpq(2)}

    def test_theta4_prefix(self):
        s = theta_series(ThetaKind.theta4, 1, 5)
        assert s.coeffs == {0: mpq(1), 1: mpq(-2), 4: mpq(2)}

    def test_theta2_fourth_power_prefix(self):
        # 16q(1 + q^2 + q^6 + ...)^4 = 16q + 64q^3 + 96q^5 + ...; odd
        # exponents only (the factor q^{1/4} forces this after 4th power)
        s = theta_series(ThetaKind.theta2, 1, 6)
        assert s.coeffs == {1: mpq(16), 3: mpq(64), 5: mpq(96)}

    def test_theta2_consistent_with_lambda_times_theta3_fourth(self):
        n = 40
        lam = lambda_series(n)
        t34 = qs_pow_int(theta_series(ThetaKind.theta3, 1, n), 4)
        from thetacert.qseries import qs_mul
        assert qs_mul(lam, t34) == theta_series(ThetaKind.theta2, 1, n)

    def test_dilation_argument(self):
        s = theta_series(ThetaKind.theta3, 2, 10)
        assert s.coeffs == {0: mpq(1), 2: mpq(2), 8: mpq(2)}

    def test_lambda_series_prefix(self):
        lam = lambda_series(4)
        assert lam.coeffs == {1: mpq(16), 2: mpq(-128), 3: mpq(704)}
        assert lam.coeff(0) == 0


class TestEval:
    def test_theta3_at_i_against_oracle(self):
        b = theta_eval(ThetaKind.theta3, 1, parse_tau("i"), 256)
        assert contains_decimal(b, THETA3_AT["i"])
        assert mpq(b.rad) < mpq(1, 10**70)

    def test_theta3_at_half_i(self):
        b = theta_eval(ThetaKind.theta3, 1, parse_tau("i/2"), 256)
        assert contains_decimal(b, THETA3_AT["i/2"])

    def test_theta3_complex_point(self):
        b = theta_eval(ThetaKind.theta3, 1, parse_tau("1/3+i"), 256)
        re_s, im_s = THETA3_AT["1/3+i"]
        assert contains_decimal(b, re_s, im_s)

    def test_theta2_equals_theta4_at_i(self):
        t2 = theta_eval(ThetaKind.theta2, 1, parse_tau("i"), 256)
        t4 = theta_eval(ThetaKind.theta4, 1, parse_tau("i"), 256)
        assert certify_below(sub(t2, t4), TOL40)

    def test_huge_imaginary_part(self):
        b = theta_eval(ThetaKind.theta3, 1, parse_tau("1000000i"), 256)
        assert b.contains_rational(1, 0)
        assert mpq(b.rad) < mpq(1, 10**100)

    def test_precision_refinement_nests(self):
        lo = theta_eval(ThetaKind.theta3, 1, parse_tau("i"), 256)
        hi = theta_eval(ThetaKind.theta3, 1, parse_tau("i"), 1024)
        assert lo.contains_ball(hi)

    def test_radius_meets_contract(self):
        for prec in (64, 128, 512):
            b = theta_eval(ThetaKind.theta4, 3, parse_tau("1/3+i"), prec)
            assert mpq(b.rad) <= mpq(2) ** -(prec // 2)

    @pytest.mark.parametrize("tau_text", ["i", "i/2", "1/3+i"])
    def test_jacobi_identity(self, tau_text):
        tau = parse_tau(tau_text)
        t2 = theta_eval(ThetaKind.theta2, 1, tau, 256)
        t3 = theta_eval(ThetaKind.theta3, 1, tau, 256)
        t4 = theta_eval(ThetaKind.theta4, 1, tau, 256)
        resid = sub(add(pow_int(t2, 4), pow_int(t4, 4)), pow_int(t3, 4))
        assert certify_below(resid, TOL40)

    @pytest.mark.parametrize("tau_text", ["i", "i/2", "1/3+i"])
    def test_duplication_identities(self, tau_text):
        tau = parse_tau(tau_text)
        t3 = theta_eval(ThetaKind.theta3, 1, tau, 256)
        t4 = theta_eval(ThetaKind.theta4, 1, tau, 256)
        t3_2 = theta_eval(ThetaKind.theta3, 2, tau, 256)
        t3_4 = theta_eval(ThetaKind.theta3, 4, tau, 256)
        two = BallComplex.from_int(2, 256)
        d2 = sub(mul(two, pow_int(t3_2, 2)), add(pow_int(t3, 2), pow_int(t4, 2)))
        d4 = sub(mul(two, t3_4), add(t3, t4))
        assert certify_below(d2, TOL40)
        assert certify_below(d4, TOL40)

    @pytest.mark.parametrize("tau_text", ["i", "i/2", "1/3+i"])
    def test_periodicity(self, tau_text):
        tau = parse_tau(tau_text)
        a = theta_eval(ThetaKind.theta3, 2, tau, 192)
        b = theta_eval(ThetaKind.theta3, 2, tau.translate(2), 192)
        assert a.overlaps(b)

    @pytest.mark.parametrize("tau_text", ["i", "i/2", "1/3+i"])
    def test_formal_numeric_agreement(self, tau_text):
        tau = parse_tau(tau_text)
        series = theta_series(ThetaKind.theta3, 1, 60)
        qb = _nome_ball(tau.to_ball(256), mpq(1))
        via_series = qs_eval_ball(series, qb, 2)
        direct = theta_eval(ThetaKind.theta3, 1, tau, 256)
        assert via_series.overlaps(direct)

    def test_mult_consistent_with_scaled_tau(self):
        # regression: the tail bound must live in Q = q^a units; an
        # a-fold undercount once dropped a 1e-24 term at mult 4
        via_mult = theta_eval(ThetaKind.theta3, 4, parse_tau("i/2"), 256)
        direct = theta_eval(ThetaKind.theta3, 1, parse_tau("2i"), 256)
        assert via_mult.overlaps(direct)
        assert mpq(via_mult.rad) < mpq(2) ** -200

    def test_tau_ball_escape_hatch(self):
        tau = parse_tau("i")
        via_ball = theta_eval_tau_ball(ThetaKind.theta3, 1, tau.to_ball(200), 200)
        assert via_ball.overlaps(theta_eval(ThetaKind.theta3, 1, tau, 200))

    def test_escape_hatch_rejects_lower_half(self):
        bad = BallComplex.from_rational(0, -1, 96)
        with pytest.raises(TauNotInUpperHalfPlane):
            theta_eval_tau_ball(ThetaKind.theta3, 1, bad, 96)

    def test_mult_must_be_positive(self):
        with pytest.raises(ValueError):
            theta_eval(ThetaKind.theta3, 0, parse_tau("i"), 64)


class TestLambdaAndJ:
    def test_lambda_at_i(self):
        lam = lambda_eval(parse_tau("i"), 256)
        assert lam.contains_rational(mpq(1, 2), 0)

    def test_lambda_tends_to_zero(self):
        lam = lambda_eval(parse_tau("1000000i"), 128)
        assert mpq(lam.abs_upper()) < mpq(1, 10**100)

    def test_j_at_i(self):
        j = j_eval(parse_tau("i"), 256)
        assert j.contains_rational(1728, 0)

    def test_j_at_2i(self):
        # j(2i) = 66^3, classical CM value
        j = j_eval(parse_tau("2i"), 256)
        assert j.contains_rational(287496, 0)

    def test_j_at_cm_point_is_real(self):
        j = j_eval(parse_tau("1+sqrt(3)*i"), 256)
        assert abs(mpq(j.mid_im)) <= mpq(j.rad)
        assert j.contains_rational(54000, 0)

    def test_j_large_at_10i(self):
        j = j_eval(parse_tau("10i"), 192)
        assert mpq(j.abs_lower()) > 10**6

    def test_lambda_degenerate(self):
        # lambda -> 1 as tau -> 0 along the imaginary axis; at 64 bits the
        # ball around lambda(i/100) cannot exclude 1
        with pytest.raises(LambdaDegenerate):
            j_eval(parse_tau("i/100"), 64)

    def test_j_defined_for_tiny_certified_lambda(self):
        # lambda(i*10^6) is astronomically small but certified nonzero, so
        # j is computable and huge
        j = j_eval(parse_tau("1000000i"), 128)
        assert mpq(j.abs_lower()) > mpq(10) ** (10**6)
