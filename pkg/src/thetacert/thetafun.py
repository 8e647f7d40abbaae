"""Theta constants as exact q-series and as certified ball enclosures.

Evaluation points are quadratic-surd tau values (a + b*sqrt(d) components),
which cover every point the toolkit needs exactly; arbitrary complex tau is
accepted only through the ball-input escape hatch, with no exactness claim
about upper-half-plane membership beyond |q| < 1.
"""

import enum
import re as _re

import gmpy2
from gmpy2 import mpfr, mpq

from .numerics import (
    GUARD,
    RAD_PREC,
    BallComplex,
    add,
    div,
    kth_root_principal,
    mul,
    pow_int,
    sub,
)
from .qseries import QSeries, qs_inv, qs_mul, qs_pow_int

_RUP = gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundDown)


class TauNotInUpperHalfPlane(ValueError):
    """Im(tau) could not be certified positive."""


class LambdaDegenerate(ArithmeticError):
    """The lambda ball contains 0 or 1, so j is not defined there."""


class TauParseError(ValueError):
    """Unrecognized tau expression."""


# -- exact quadratic surds ----------------------------------------------


def _squarefree_split(d: int):
    """d = s^2 * d' with d' squarefree; returns (s, d')."""
    if d < 0:
        raise ValueError("radicand must be nonnegative")
    s, rest, f = 1, 1, 2
    while f * f <= d:
        exp = 0
        while d % f == 0:
            d //= f
            exp += 1
        s *= f ** (exp // 2)
        if exp % 2:
            rest *= f
        f += 1
    return s, rest * d


class QuadSurd:
    """Exact real number a + b*sqrt(d), d squarefree positive."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=1):
        a, b, d = mpq(a), mpq(b), int(d)
        if d < 1:
            raise ValueError("d must be a positive integer")
        s, d = _squarefree_split(d)
        b *= s
        if d == 1 or b == 0:
            a += b if d == 1 else 0
            b, d = mpq(0), 1
        self.a, self.b, self.d = a, b, d

    def __eq__(self, other):
        if not isinstance(other, QuadSurd):
            return NotImplemented
        return (self.a, self.b, self.d) == (other.a, other.b, other.d)

    __hash__ = None

    def __repr__(self):
        if self.b == 0:
            return f"QuadSurd({self.a})"
        return f"QuadSurd({self.a} + {self.b}*sqrt({self.d}))"

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_rational(self):
        return self.b == 0

    def sign(self) -> int:
        """Exact sign: -1, 0, or +1."""
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # mixed signs: compare a^2 against b^2 d; equality would force
        # sqrt(d) rational, impossible for squarefree d > 1
        if a > 0:
            return 1 if a * a > b * b * d else -1
        return -1 if a * a > b * b * d else 1

    def translate(self, r) -> "QuadSurd":
        return QuadSurd(self.a + mpq(r), self.b, self.d)

    def to_ball(self, prec: int) -> BallComplex:
        if self.b == 0:
            return BallComplex.from_rational(self.a, 0, prec)
        root = kth_root_principal(BallComplex.from_int(self.d, prec), 2)
        term = mul(BallComplex.from_rational(self.b, 0, prec), root)
        return add(BallComplex.from_rational(self.a, 0, prec), term)


class TauValue:
    """Point of the upper half-plane with exact quadratic-surd parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: QuadSurd, im: QuadSurd):
        if not isinstance(re, QuadSurd) or not isinstance(im, QuadSurd):
            raise TypeError("TauValue components must be QuadSurd")
        if im.sign() <= 0:
            raise TauNotInUpperHalfPlane(f"Im(tau) = {im!r} is not positive")
        self.re = re
        self.im = im

    def __repr__(self):
        return f"TauValue(re={self.re!r}, im={self.im!r})"

    def __eq__(self, other):
        if not isinstance(other, TauValue):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    __hash__ = None

    def translate(self, r) -> "TauValue":
        return TauValue(self.re.translate(r), self.im)

    def to_ball(self, prec: int) -> BallComplex:
        x = self.re.to_ball(prec)
        y = self.im.to_ball(prec)
        rad = _RUP.hypot(x.rad, y.rad)
        return BallComplex(x.mid_re, y.mid_re, rad, prec)


def tau_from_rationals(re, im) -> TauValue:
    return TauValue(QuadSurd(re), QuadSurd(im))


_TERM_RE = _re.compile(
    r"^(?P<num>[0-9]+(?:/[0-9]+)?)?"
    r"(?:\*?sqrt\((?P<rad>[0-9]+)\))?"
    r"(?:/(?P<den>[0-9]+))?$"
)


def parse_tau(text: str) -> TauValue:
    """Parse 'a+b*i' with rational or r*sqrt(d) terms, e.g. '1+sqrt(3)*i', 'i/3'."""
    s = text.replace(" ", "").lower()
    if not s:
        raise TauParseError("empty tau expression")
    # split keeping signs; leading '+' harmless
    chunks = _re.split(r"(?=[+-])", s)
    re_rat, re_surd = mpq(0), {}
    im_rat, im_surd = mpq(0), {}
    for chunk in chunks:
        if not chunk:
            continue
        sign = 1
        if chunk[0] in "+-":
            sign = -1 if chunk[0] == "-" else 1
            chunk = chunk[1:]
        if not chunk:
            raise TauParseError(f"dangling sign in {text!r}")
        imaginary = "i" in chunk
        if imaginary:
            if chunk.count("i") > 1:
                raise TauParseError(f"bad term in {text!r}")
            chunk = chunk.replace("*i", "").replace("i*", "").replace("i", "")
            if chunk.startswith("/"):
                chunk = "1" + chunk
            if not chunk:
                chunk = "1"
        m = _TERM_RE.match(chunk)
        if not m or (m.group("den") and not m.group("rad")):
            raise TauParseError(f"cannot parse term {chunk!r} of {text!r}")
        coeff = mpq(m.group("num") or 1) * sign
        if m.group("den"):
            coeff /= int(m.group("den"))
        d = int(m.group("rad") or 1)
        if d == 0:
            d = 1
            coeff = mpq(0)
        sf, d = _squarefree_split(d)
        coeff *= sf
        rat, surd = (im_rat, im_surd) if imaginary else (re_rat, re_surd)
        if d == 1:
            if imaginary:
                im_rat = rat + coeff
            else:
                re_rat = rat + coeff
        else:
            surd[d] = surd.get(d, mpq(0)) + coeff

    def build(rat, surd):
        surd = {d: c for d, c in surd.items() if c != 0}
        if len(surd) > 1:
            raise TauParseError("at most one radical per component is supported")
        if surd:
            (d, c), = surd.items()
            return QuadSurd(rat, c, d)
        return QuadSurd(rat)

    return TauValue(build(re_rat, re_surd), build(im_rat, im_surd))


# -- formal series -------------------------------------------------------


class ThetaKind(enum.Enum):
    theta2 = "theta2"
    theta3 = "theta3"
    theta4 = "theta4"


def theta_series(kind: ThetaKind, mult: int, order: int) -> QSeries:
    """Exact series of theta3(a*tau), theta4(a*tau), or theta2^4(a*tau).

    theta2 carries q^{1/4}, so only its fourth power lives in the formal
    layer: theta2^4(a*tau) = 16 q^a (sum q^{a n(n+1)})^4.
    """
    kind = ThetaKind(kind)
    a = int(mult)
    if a < 1:
        raise ValueError("mult must be a positive integer")
    if order < 1:
        raise ValueError("order must be positive")
    if kind is ThetaKind.theta2:
        core_order = order - a
        if core_order < 1:
            return QSeries({}, order)
        c = {}
        n = 0
        while a * n * (n + 1) < core_order:
            c[a * n * (n + 1)] = mpq(1)
            n += 1
        fourth = qs_pow_int(QSeries(c, core_order), 4)
        return QSeries({e + a: 16 * v for e, v in fourth.coeffs.items()}, order)
    out = {0: mpq(1)}
    n = 1
    while a * n * n < order:
        out[a * n * n] = mpq(-2) if (kind is ThetaKind.theta4 and n % 2) else mpq(2)
        n += 1
    return QSeries(out, order)


def lambda_series(order: int) -> QSeries:
    t2 = theta_series(ThetaKind.theta2, 1, order)
    t3 = theta_series(ThetaKind.theta3, 1, order)
    return qs_mul(t2, qs_inv(qs_pow_int(t3, 4)))


# -- certified numeric evaluation ----------------------------------------


def _pi_ball(prec: int) -> BallComplex:
    mid = gmpy2.context(precision=prec).const_pi()
    return BallComplex(mid, mpfr(0), _RUP.exp2(2 - prec), prec)


def _exp_complex(z: BallComplex) -> BallComplex:
    """Enclosure of exp(z): |exp(z)-exp(m)| <= e^{Re m} expm1(rad)."""
    prec = z.prec
    ctx = gmpy2.context(precision=prec)
    ex = ctx.exp(z.mid_re)
    c = ctx.cos(z.mid_im)
    s = ctx.sin(z.mid_im)
    mre = ctx.mul(ex, c)
    mim = ctx.mul(ex, s)
    e_up = _RUP.exp(z.mid_re)
    mid_err = _RUP.mul(_RUP.exp2(3 - prec), e_up)
    if gmpy2.is_zero(z.rad):
        prop = mpfr(0)
    else:
        prop = _RUP.mul(e_up, _RUP.expm1(z.rad))
    return BallComplex(mre, mim, _RUP.add(prop, mid_err), prec)


def _nome_ball(tau_ball: BallComplex, scale: mpq) -> BallComplex:
    """exp(i*pi*scale*tau) as a ball."""
    prec = tau_ball.prec
    factor = mul(_pi_ball(prec), BallComplex.from_rational(0, scale, prec))
    return _exp_complex(mul(factor, tau_ball))


def _neglog_lower(t_up) -> mpfr:
    # t <= t_up < 1, so -log(t) >= -log(t_up); round log up, negate exactly
    return _RUP.minus(_RUP.log(t_up))


def _tail_terms(t: mpq, start_exp: int, gap: int, target: mpq):
    """Exact geometric tail t^start/(1-t^gap), or None if above target."""
    tail = t ** start_exp / (1 - t ** gap)
    return tail if tail <= target else None


def _choose_cutoff(t_up, step_quadratic, prec: int, gap_exp):
    """Least M with the quadratic exponent at M+1 beating prec*ln2 + 8.

    step_quadratic(M) gives the series exponent of the first omitted term;
    gap_exp is the minimum exponent gap between consecutive tail terms.
    The formula choice is then bumped until the exact rational tail is
    below 2^-prec (belt and suspenders; normally zero iterations).
    """
    t = mpq(t_up)
    if t >= 1:
        raise TauNotInUpperHalfPlane("|q| >= 1")
    L = _neglog_lower(t_up)
    rhs = _RUP.add(_RUP.mul(mpfr(prec), _RUP.const_log2()), mpfr(8))
    M = 0
    while mpq(_RDN.mul(mpfr(step_quadratic(M)), L)) <= mpq(rhs):
        M += 1
        if M > 10 * prec:
            raise ArithmeticError("theta cutoff did not converge")
    target = mpq(2) ** -prec
    while _tail_terms(t, step_quadratic(M), gap_exp, target) is None:
        M += 1
    return M, 2 * _tail_terms(t, step_quadratic(M), gap_exp, mpq(1))


def _sum_theta34(Q: BallComplex, M: int, alternating: bool) -> BallComplex:
    prec = Q.prec
    acc = BallComplex.from_int(1, prec)
    if M >= 1:
        P = Q
        Q2 = mul(Q, Q)
        R = mul(Q2, Q)
        for n in range(1, M + 1):
            term = add(P, P)
            if alternating and n % 2:
                acc = sub(acc, term)
            else:
                acc = add(acc, term)
            if n < M:
                P = mul(P, R)
                R = mul(R, Q2)
    return acc


def _sum_theta2(w: BallComplex, M: int) -> BallComplex:
    prec = w.prec
    P = w
    acc = w
    W8 = pow_int(w, 8)
    G = W8
    for _ in range(M):
        P = mul(P, G)
        G = mul(G, W8)
        acc = add(acc, P)
    return add(acc, acc)


def _theta_from_tau_ball(kind: ThetaKind, a: int, tau_ball: BallComplex,
                         prec: int) -> BallComplex:
    if kind is ThetaKind.theta2:
        w = _nome_ball(tau_ball, mpq(a, 4))
        t_up = w.abs_upper()
        M, tail = _choose_cutoff(t_up, lambda m: (2 * m + 3) ** 2, prec, 8)
        val = _sum_theta2(w, M)
    else:
        # the summation variable is Q = q^a, so the cutoff and tail work in
        # Q-exponents: first omitted term Q^{(M+1)^2}, gaps >= 1
        Q = _nome_ball(tau_ball, mpq(a))
        t_up = Q.abs_upper()
        M, tail = _choose_cutoff(t_up, lambda m: (m + 1) ** 2, prec, 1)
        val = _sum_theta34(Q, M, kind is ThetaKind.theta4)
    rad = _RUP.add(val.rad, _rad_of(tail))
    return BallComplex(val.mid_re, val.mid_im, rad, prec)


def _rad_of(x: mpq) -> mpfr:
    return _RUP.add(x, mpfr(0))


def theta_eval(kind: ThetaKind, mult: int, tau: TauValue, prec: int) -> BallComplex:
    """Ball enclosing theta_kind(mult * tau); rad <= 2^(-prec/2)."""
    kind = ThetaKind(kind)
    a = int(mult)
    if a < 1:
        raise ValueError("mult must be a positive integer")
    if not isinstance(tau, TauValue):
        raise TypeError("tau must be a TauValue; use theta_eval_tau_ball for balls")
    wp = prec + GUARD
    out = _theta_from_tau_ball(kind, a, tau.to_ball(wp), wp)
    cm = gmpy2.context(precision=prec)
    mre = cm.add(out.mid_re, mpfr(0))
    mim = cm.add(out.mid_im, mpfr(0))
    # exact rounding error, so astronomically tight radii survive rounding
    ere = abs(mpq(mre) - mpq(out.mid_re))
    eim = abs(mpq(mim) - mpq(out.mid_im))
    rad = _RUP.add(out.rad, _RUP.hypot(ere, eim))
    return BallComplex(mre, mim, rad, prec)


def theta_eval_tau_ball(kind: ThetaKind, mult: int, tau_ball: BallComplex,
                        prec: int) -> BallComplex:
    """Escape hatch for arbitrary complex tau given as a ball.

    The enclosure is rigorous for the given ball, but membership of the
    upper half-plane is only checked through |q| < 1.
    """
    kind = ThetaKind(kind)
    a = int(mult)
    if a < 1:
        raise ValueError("mult must be a positive integer")
    return _theta_from_tau_ball(kind, a, tau_ball, prec)


def lambda_eval(tau: TauValue, prec: int) -> BallComplex:
    wp = prec + GUARD
    t2 = theta_eval(ThetaKind.theta2, 1, tau, wp)
    t3 = theta_eval(ThetaKind.theta3, 1, tau, wp)
    return div(pow_int(t2, 4), pow_int(t3, 4))


def j_eval(tau: TauValue, prec: int) -> BallComplex:
    """Klein j via 256 (l^2 - l + 1)^3 / (l^2 (l-1)^2)."""
    wp = prec + GUARD
    lam = lambda_eval(tau, wp)
    if lam.contains_rational(0, 0) or lam.contains_rational(1, 0):
        raise LambdaDegenerate("lambda ball touches 0 or 1")
    one = BallComplex.from_int(1, wp)
    l2 = mul(lam, lam)
    num = pow_int(add(sub(l2, lam), one), 3)
    den = mul(l2, pow_int(sub(lam, one), 2))
    return mul(BallComplex.from_int(256, wp), div(num, den))
