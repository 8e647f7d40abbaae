"""Complex ball arithmetic with certified error bounds.

A ball is a midpoint (two mpfr components at ``prec`` bits) together with a
single nonnegative radius bounding the distance to the represented exact
value in the complex absolute value.  Every operation returns a ball whose
disk contains the image of the input disks; midpoint rounding errors are
folded into the radius, never ignored.

Radii are tracked at a fixed small precision with upward rounding, so a
radius is always an upper bound regardless of the midpoint precision in
use.  Certification predicates (`certify_nonzero`, `certify_below`) compare
exact dyadic rationals and are therefore decision procedures, not floating
point heuristics.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr, mpq, mpz

MIN_PREC = 32
RAD_PREC = 64
GUARD = 32

# Radius arithmetic always rounds away from the true value.
_RUP = gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundDown)
_ZERO = mpfr(0)


class DivisorContainsZero(ZeroDivisionError):
    """Division by a ball whose disk contains zero."""


class BallStraddlesBranchCut(ArithmeticError):
    """Root extraction on a ball crossing the negative real axis."""


_MID_CTX: dict[int, gmpy2.context] = {}
_WORK_CTX: dict[int, gmpy2.context] = {}


def _ctx_mid(prec: int) -> gmpy2.context:
    ctx = _MID_CTX.get(prec)
    if ctx is None:
        ctx = _MID_CTX[prec] = gmpy2.context(precision=prec, round=gmpy2.RoundToNearest)
    return ctx


def _ctx_work(prec: int) -> gmpy2.context:
    ctx = _WORK_CTX.get(prec)
    if ctx is None:
        ctx = _WORK_CTX[prec] = gmpy2.context(precision=prec + GUARD, round=gmpy2.RoundToNearest)
    return ctx


def _eps(prec: int) -> mpfr:
    # 2^-prec, exact
    return _RUP.exp2(-prec)


def _rad_up(v) -> mpfr:
    """Upper-bound conversion of a nonnegative rational/mpfr to radius precision."""
    return _RUP.add(v, _ZERO)


def _hyp_up(re, im) -> mpfr:
    # hypot is sign-insensitive, so no abs is needed (and a bare abs() on an
    # mpfr would silently round at the 53-bit thread context)
    return _RUP.hypot(re, im)


def _hyp_dn(re, im) -> mpfr:
    return _RDN.hypot(re, im)


class BallComplex:
    """Complex midpoint-radius enclosure.

    mid_re, mid_im: mpfr at ``prec`` bits (callers hand in values that are
    exactly representable; the arithmetic here always rounds before
    constructing).  rad: mpfr at RAD_PREC bits, >= 0, an upper bound for
    |exact - mid|.  Signed zeros are normalized to +0 so the branch cut
    test sees a single representation of the axis.
    """

    __slots__ = ("mid_re", "mid_im", "rad", "prec")

    def __init__(self, mid_re, mid_im, rad, prec: int):
        if prec < MIN_PREC:
            raise ValueError(f"precision {prec} below minimum {MIN_PREC}")
        mid_re = mpfr(mid_re, prec)
        mid_im = mpfr(mid_im, prec)
        if isinstance(rad, mpfr):
            rad = _RUP.add(rad, _ZERO)
        else:
            rad = _rad_up(mpq(rad))
        if not (gmpy2.is_finite(mid_re) and gmpy2.is_finite(mid_im) and gmpy2.is_finite(rad)):
            raise ValueError("non-finite ball component")
        if rad < 0:
            raise ValueError("negative radius")
        if mid_re == 0:
            mid_re = mpfr(0, prec)
        if mid_im == 0:
            mid_im = mpfr(0, prec)
        self.mid_re = mid_re
        self.mid_im = mid_im
        self.rad = rad
        self.prec = prec

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rational(re, im, prec: int) -> "BallComplex":
        """Rational midpoint; radius covers only the representation error."""
        re = mpq(re)
        im = mpq(im)
        cm = _ctx_mid(prec)
        mre = cm.add(re, _ZERO)
        mim = cm.add(im, _ZERO)
        ere = abs(mpq(mre) - re)
        eim = abs(mpq(mim) - im)
        rad = _RUP.hypot(ere, eim)
        return BallComplex(mre, mim, rad, prec)

    @staticmethod
    def from_int(n, prec: int) -> "BallComplex":
        return BallComplex.from_rational(mpq(n), mpq(0), prec)

    @staticmethod
    def zero(prec: int) -> "BallComplex":
        return BallComplex(_ZERO, _ZERO, _ZERO, prec)

    # -- queries ---------------------------------------------------------

    def is_exact_zero(self) -> bool:
        return self.mid_re == 0 and self.mid_im == 0 and self.rad == 0

    def abs_upper(self) -> mpfr:
        return _RUP.add(_hyp_up(self.mid_re, self.mid_im), self.rad)

    def abs_lower(self) -> mpfr:
        lo = _RDN.sub(_hyp_dn(self.mid_re, self.mid_im), self.rad)
        return lo if lo > 0 else mpfr(0)

    def contains_rational(self, re, im=0) -> bool:
        """Exact test: does the disk contain the rational point re + im*i?"""
        dre = mpq(self.mid_re) - mpq(re)
        dim = mpq(self.mid_im) - mpq(im)
        return dre * dre + dim * dim <= mpq(self.rad) ** 2

    def contains_ball(self, other: "BallComplex") -> bool:
        """Exact test: |mid - mid'| + rad' <= rad."""
        rs = mpq(self.rad)
        ro = mpq(other.rad)
        if ro > rs:
            return False
        dre = mpq(self.mid_re) - mpq(other.mid_re)
        dim = mpq(self.mid_im) - mpq(other.mid_im)
        return dre * dre + dim * dim <= (rs - ro) ** 2

    def overlaps(self, other: "BallComplex") -> bool:
        dre = mpq(self.mid_re) - mpq(other.mid_re)
        dim = mpq(self.mid_im) - mpq(other.mid_im)
        return dre * dre + dim * dim <= (mpq(self.rad) + mpq(other.rad)) ** 2

    def __repr__(self) -> str:
        return f"BallComplex({self.mid_re}, {self.mid_im}, rad={self.rad}, prec={self.prec})"

    # -- operator sugar ---------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other, self.prec))

    def __radd__(self, other):
        return add(_coerce(other, self.prec), self)

    def __sub__(self, other):
        return sub(self, _coerce(other, self.prec))

    def __rsub__(self, other):
        return sub(_coerce(other, self.prec), self)

    def __mul__(self, other):
        return mul(self, _coerce(other, self.prec))

    def __rmul__(self, other):
        return mul(_coerce(other, self.prec), self)

    def __truediv__(self, other):
        return div(self, _coerce(other, self.prec))

    def __rtruediv__(self, other):
        return div(_coerce(other, self.prec), self)

    def __neg__(self):
        return neg(self)


def _coerce(v, prec: int) -> BallComplex:
    if isinstance(v, BallComplex):
        return v
    if isinstance(v, (int, mpz, mpq)):
        return BallComplex.from_rational(mpq(v), 0, prec)
    raise TypeError(f"cannot coerce {type(v).__name__} to BallComplex")


# -- arithmetic ---------------------------------------------------------


def add(a: BallComplex, b: BallComplex) -> BallComplex:
    prec = min(a.prec, b.prec)
    cm = _ctx_mid(prec)
    re = cm.add(a.mid_re, b.mid_re)
    im = cm.add(a.mid_im, b.mid_im)
    # each midpoint component rounds once: relative error <= 2^-prec
    mid_err = _RUP.mul(_eps(prec), _hyp_up(re, im))
    rad = _RUP.add(_RUP.add(a.rad, b.rad), mid_err)
    return BallComplex(re, im, rad, prec)


def sub(a: BallComplex, b: BallComplex) -> BallComplex:
    return add(a, neg(b))


def neg(a: BallComplex) -> BallComplex:
    cm = _ctx_mid(a.prec)
    return BallComplex(cm.minus(a.mid_re), cm.minus(a.mid_im), a.rad, a.prec)


def conj(a: BallComplex) -> BallComplex:
    cm = _ctx_mid(a.prec)
    return BallComplex(a.mid_re, cm.minus(a.mid_im), a.rad, a.prec)


def mul(a: BallComplex, b: BallComplex) -> BallComplex:
    prec = min(a.prec, b.prec)
    wp = prec + GUARD
    ctx = _ctx_work(prec)
    cm = _ctx_mid(prec)
    t_re = ctx.sub(ctx.mul(a.mid_re, b.mid_re), ctx.mul(a.mid_im, b.mid_im))
    t_im = ctx.add(ctx.mul(a.mid_re, b.mid_im), ctx.mul(a.mid_im, b.mid_re))
    re = cm.add(t_re, _ZERO)
    im = cm.add(t_im, _ZERO)
    ha = _hyp_up(a.mid_re, a.mid_im)
    hb = _hyp_up(b.mid_re, b.mid_im)
    # storage rounding plus a cancellation-safe term at working precision
    mid_err = _RUP.add(
        _RUP.mul(_eps(prec), _hyp_up(re, im)),
        _RUP.mul(_eps(wp - 3), _RUP.mul(ha, hb)),
    )
    rad = _RUP.add(
        _RUP.add(
            _RUP.add(_RUP.mul(a.rad, hb), _RUP.mul(b.rad, ha)),
            _RUP.mul(a.rad, b.rad),
        ),
        mid_err,
    )
    return BallComplex(re, im, rad, prec)


def _divisor_excludes_zero(b: BallComplex) -> bool:
    m2 = mpq(b.mid_re) ** 2 + mpq(b.mid_im) ** 2
    return m2 > mpq(b.rad) ** 2


def div(a: BallComplex, b: BallComplex) -> BallComplex:
    if not _divisor_excludes_zero(b):
        raise DivisorContainsZero("divisor ball does not exclude zero")
    prec = min(a.prec, b.prec)
    wp = prec + GUARD
    ctx = _ctx_work(prec)
    cm = _ctx_mid(prec)
    den = ctx.add(ctx.square(b.mid_re), ctx.square(b.mid_im))
    n_re = ctx.add(ctx.mul(a.mid_re, b.mid_re), ctx.mul(a.mid_im, b.mid_im))
    n_im = ctx.sub(ctx.mul(a.mid_im, b.mid_re), ctx.mul(a.mid_re, b.mid_im))
    re = cm.add(ctx.div(n_re, den), _ZERO)
    im = cm.add(ctx.div(n_im, den), _ZERO)
    ha = _hyp_up(a.mid_re, a.mid_im)
    # |b.mid| must provably clear b.rad; widen the bound precision if needed
    rp = RAD_PREC
    while True:
        cdn = gmpy2.context(precision=rp, round=gmpy2.RoundDown)
        hb_dn = cdn.hypot(b.mid_re, b.mid_im)
        gap = cdn.sub(hb_dn, b.rad)
        if gap > 0:
            break
        rp *= 2
        if rp > 4096:
            raise DivisorContainsZero("divisor margin too thin to bound")
    hb_up = _hyp_up(b.mid_re, b.mid_im)
    num = _RUP.add(_RUP.mul(a.rad, hb_up), _RUP.mul(ha, b.rad))
    den_lo = _RDN.mul(hb_dn, gap)
    prop = _RUP.div(num, den_lo)
    mid_err = _RUP.add(
        _RUP.mul(_eps(prec), _hyp_up(re, im)),
        _RUP.mul(_eps(wp - 4), _RUP.div(ha, hb_dn)),
    )
    rad = _RUP.add(prop, mid_err)
    return BallComplex(re, im, rad, prec)


def babs(a: BallComplex) -> BallComplex:
    """Ball of |a| (a real ball: mid_im = 0)."""
    prec = a.prec
    ctx = _ctx_work(prec)
    cm = _ctx_mid(prec)
    h = cm.add(ctx.hypot(a.mid_re, a.mid_im), _ZERO)
    mid_err = _RUP.mul(_eps(prec - 1), h)
    rad = _RUP.add(a.rad, mid_err)
    return BallComplex(h, _ZERO, rad, prec)


def _crosses_cut(a: BallComplex) -> bool:
    """Does the disk meet the ray {x <= 0, y = 0} in more than a point ball?

    Distance from mid to the ray: |mid| when Re(mid) > 0, else |Im(mid)|.
    Computed as a lower bound, so True may be conservative but False is
    certain.
    """
    if a.rad == 0:
        return False
    if a.mid_re > 0:
        d = _hyp_dn(a.mid_re, a.mid_im)
    else:
        d = _RDN.abs(a.mid_im)
    return d <= a.rad


def kth_root_principal(a: BallComplex, k: int) -> BallComplex:
    """Principal k-th root: the branch with argument in (-pi/k, pi/k].

    Input must be an exact zero ball, or a ball that neither contains zero
    nor crosses the negative real axis.  Point balls on the axis are fine:
    their argument is taken as +pi, matching the half-open sector.
    """
    if k < 1:
        raise ValueError("root order must be >= 1")
    if k == 1:
        return BallComplex(a.mid_re, a.mid_im, a.rad, a.prec)
    if a.is_exact_zero():
        return BallComplex.zero(a.prec)
    if _crosses_cut(a):
        raise BallStraddlesBranchCut(
            "ball meets the negative real axis; principal root has no continuous branch"
        )
    prec = a.prec
    wp = prec + GUARD
    ctx = _ctx_work(prec)
    cm = _ctx_mid(prec)
    h = ctx.hypot(a.mid_re, a.mid_im)
    # mid_im is normalized to +0, so atan2 on the negative axis yields +pi
    theta = ctx.atan2(a.mid_im, a.mid_re)
    phi = ctx.div(theta, k)
    rr = ctx.rootn(h, k)
    w_re = cm.add(ctx.mul(rr, ctx.cos(phi)), _ZERO)
    w_im = cm.add(ctx.mul(rr, ctx.sin(phi)), _ZERO)
    rr_up = _RUP.add(rr, _ZERO)
    mid_err = _RUP.add(
        _RUP.mul(_eps(prec), _hyp_up(w_re, w_im)),
        _RUP.mul(_eps(wp - 5), rr_up),
    )
    if a.rad == 0:
        prop = mpfr(0)
    else:
        rp = RAD_PREC
        while True:
            cdn = gmpy2.context(precision=rp, round=gmpy2.RoundDown)
            h_dn = cdn.hypot(a.mid_re, a.mid_im)
            if h_dn > a.rad:
                break
            rp *= 2
            if rp > 4096:
                raise BallStraddlesBranchCut("ball too close to zero for a root enclosure")
        t = _RUP.div(a.rad, h_dn)
        if t >= 1:
            raise BallStraddlesBranchCut("ball too close to zero for a root enclosure")
        # |f(z)-f(mid)| <= |f(mid)| (exp(-log(1 - rad/|mid|)/k) - 1) on the disk
        u = _RUP.minus(_RDN.log1p(_RDN.minus(t)))
        factor = _RUP.expm1(_RUP.div(u, k))
        prop = _RUP.mul(_RUP.mul(rr_up, _RUP.add(mpfr(1), _eps(30))), factor)
    rad = _RUP.add(mid_err, prop)
    return BallComplex(w_re, w_im, rad, prec)


def pow_int(a: BallComplex, k: int) -> BallComplex:
    """a**k for integer k >= 0 by binary powering."""
    if k < 0:
        raise ValueError("negative powers go through div")
    result = BallComplex.from_int(1, a.prec)
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


_OPS = {"add": add, "sub": sub, "mul": mul, "div": div, "neg": neg, "abs": babs}


def ball_arith(op: str, a: BallComplex, b: BallComplex | None = None) -> BallComplex:
    """Name-dispatched arithmetic: add/sub/mul/div are binary, neg/abs unary."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown ball operation {op!r}") from None
    if op in ("neg", "abs"):
        if b is not None:
            raise ValueError(f"{op} is unary")
        return fn(a)
    if b is None:
        raise ValueError(f"{op} needs two operands")
    return fn(a, b)


# -- certification ------------------------------------------------------


def certify_nonzero(a: BallComplex) -> bool:
    """True iff the disk certainly excludes 0: exact |mid| > rad."""
    m2 = mpq(a.mid_re) ** 2 + mpq(a.mid_im) ** 2
    return m2 > mpq(a.rad) ** 2


def certify_below(a: BallComplex, tol) -> bool:
    """True iff every point of the disk has modulus < tol: exact |mid| + rad < tol."""
    tol = mpq(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    r = mpq(a.rad)
    if r >= tol:
        return False
    m2 = mpq(a.mid_re) ** 2 + mpq(a.mid_im) ** 2
    return m2 < (tol - r) ** 2


# -- serialization ------------------------------------------------------


def ball_to_json(a: BallComplex) -> dict:
    """Decimal strings; str() of an mpfr round-trips at its own precision."""
    return {"re": str(a.mid_re), "im": str(a.mid_im), "rad": str(a.rad)}


def ball_from_json(d: dict, prec: int) -> BallComplex:
    # str() emits enough digits that nearest parsing at the same precision is
    # bit-exact (the producer of these files is this module)
    re = mpfr(d["re"], prec)
    im = mpfr(d["im"], prec)
    rad = mpfr(d["rad"], RAD_PREC)
    return BallComplex(re, im, rad, prec)
