"""Exact truncated power series in the nome q.

Coefficients are exact rationals (integers in practice for theta series).
A series knows its truncation order N: exponents below N are exact, the
tail is unknown. Arithmetic truncates at the minimum operand order, so
exactness of the stored window is never silently lost.
"""

import gmpy2
from gmpy2 import mpq, mpz

from .numerics import RAD_PREC, BallComplex, add as ball_add, mul as ball_mul, pow_int as ball_pow

_RUP = gmpy2.context(precision=RAD_PREC, round=gmpy2.RoundUp)

# below this order the dict convolution always wins
_KRON_MIN_ORDER = 64


class NonUnitConstantTerm(ZeroDivisionError):
    """Inversion of a series whose constant coefficient is zero."""


class QSeries:
    """Sparse exact power series truncated at trunc_order."""

    __slots__ = ("coeffs", "trunc_order")

    def __init__(self, coeffs, trunc_order: int):
        if trunc_order < 1:
            raise ValueError("trunc_order must be positive")
        clean = {}
        for e, c in coeffs.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e >= trunc_order:
                raise ValueError(f"exponent {e} not below trunc_order {trunc_order}")
            c = mpq(c)
            if c != 0:
                clean[int(e)] = c
        self.coeffs = clean
        self.trunc_order = trunc_order

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.trunc_order == other.trunc_order and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return f"QSeries({qs_text(self)!r}, N={self.trunc_order})"

    def coeff(self, e: int) -> mpq:
        if e >= self.trunc_order:
            raise ValueError(f"exponent {e} beyond trunc_order {self.trunc_order}")
        return self.coeffs.get(e, mpq(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs.values())

    def truncate(self, order: int) -> "QSeries":
        if order >= self.trunc_order:
            return QSeries(self.coeffs, self.trunc_order) if order == self.trunc_order else \
                _raise_order(order, self.trunc_order)
        return QSeries({e: c for e, c in self.coeffs.items() if e < order}, order)


def _raise_order(requested, have):
    raise ValueError(f"cannot extend truncation order {have} to {requested}")


def qs_from_coeffs(coeffs, order: int) -> QSeries:
    return QSeries(coeffs, order)


def qs_const(c, order: int) -> QSeries:
    return QSeries({0: mpq(c)}, order)


def qs_one(order: int) -> QSeries:
    return qs_const(1, order)


def qs_zero(order: int) -> QSeries:
    return QSeries({}, order)


def qs_add(a: QSeries, b: QSeries) -> QSeries:
    order = min(a.trunc_order, b.trunc_order)
    out = {e: c for e, c in a.coeffs.items() if e < order}
    for e, c in b.coeffs.items():
        if e < order:
            out[e] = out.get(e, mpq(0)) + c
    return QSeries(out, order)


def qs_sub(a: QSeries, b: QSeries) -> QSeries:
    return qs_add(a, qs_scale(b, -1))


def qs_scale(a: QSeries, c) -> QSeries:
    c = mpq(c)
    if c == 0:
        return qs_zero(a.trunc_order)
    return QSeries({e: v * c for e, v in a.coeffs.items()}, a.trunc_order)


def _mul_dict(a: QSeries, b: QSeries, order: int) -> QSeries:
    out = {}
    be = sorted(b.coeffs)
    for ea, ca in a.coeffs.items():
        if ea >= order:
            continue
        for eb in be:
            e = ea + eb
            if e >= order:
                break
            out[e] = out.get(e, mpq(0)) + ca * b.coeffs[eb]
    return QSeries(out, order)


def _mul_kronecker(a: QSeries, b: QSeries, order: int) -> QSeries:
    """Integer-series product via one big-integer multiplication.

    Packing both operands at a limb width wide enough that no convolution
    coefficient overflows its limb turns the Cauchy product into mpz
    multiplication. Limbs must stay nonnegative, so split each operand into
    positive and negative parts and use a*b = 2*PQ + 2*MN - (P+M)(Q+N).
    """
    pa = [0] * order
    for e, c in a.coeffs.items():
        if e < order:
            pa[e] = int(c)
    pb = [0] * order
    for e, c in b.coeffs.items():
        if e < order:
            pb[e] = int(c)
    maxa = max((abs(x) for x in pa), default=0)
    maxb = max((abs(x) for x in pb), default=0)
    if maxa == 0 or maxb == 0:
        return qs_zero(order)
    width = (order * maxa * maxb).bit_length() + 1

    def pos(v):
        return [x if x > 0 else 0 for x in v]

    def neg(v):
        return [-x if x < 0 else 0 for x in v]

    def absv(v):
        return [abs(x) for x in v]

    def prod(u, v):
        return gmpy2.unpack(gmpy2.pack(u, width) * gmpy2.pack(v, width), width)

    x = prod(pos(pa), pos(pb))
    y = prod(neg(pa), neg(pb))
    z = prod(absv(pa), absv(pb))
    out = {}
    for e in range(order):
        c = 2 * (x[e] if e < len(x) else 0) + 2 * (y[e] if e < len(y) else 0) \
            - (z[e] if e < len(z) else 0)
        if c:
            out[e] = mpq(c)
    return QSeries(out, order)


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    order = min(a.trunc_order, b.trunc_order)
    if a.is_zero() or b.is_zero():
        return qs_zero(order)
    # the dict convolution costs nnz_a * nnz_b; packing costs ~order limb ops
    if (order >= _KRON_MIN_ORDER
            and len(a.coeffs) * len(b.coeffs) > 4 * order
            and a.is_integral() and b.is_integral()):
        return _mul_kronecker(a, b, order)
    return _mul_dict(a, b, order)


def qs_pow_int(a: QSeries, k: int) -> QSeries:
    if k < 0:
        raise ValueError("negative power")
    result = qs_one(a.trunc_order)
    base = a
    while k:
        if k & 1:
            result = qs_mul(result, base)
        k >>= 1
        if k:
            base = qs_mul(base, base)
    return result


def qs_inv(a: QSeries) -> QSeries:
    """Multiplicative inverse up to trunc_order."""
    c0 = a.coeffs.get(0, mpq(0))
    if c0 == 0:
        raise NonUnitConstantTerm("constant coefficient is zero")
    order = a.trunc_order
    if a.is_integral() and abs(c0) == 1:
        # Newton doubling x -> x(2 - ax); stays integral, two products per
        # doubling, so the cost is a few top-order Kronecker multiplies
        x = qs_const(c0, 1)
        n = 1
        while n < order:
            n = min(2 * n, order)
            at = a.truncate(n)
            xt = QSeries(x.coeffs, n)
            ax = qs_mul(at, xt)
            x = qs_mul(xt, qs_sub(qs_const(2, n), ax))
        return x
    # rational recurrence; quadratic, used only at small orders
    inv0 = 1 / c0
    out = {0: inv0}
    src = sorted(e for e in a.coeffs if e > 0)
    for n in range(1, order):
        s = mpq(0)
        for e in src:
            if e > n:
                break
            prev = out.get(n - e)
            if prev is not None:
                s += a.coeffs[e] * prev
        if s != 0:
            out[n] = -s * inv0
    return QSeries(out, order)


def qs_dilate(a: QSeries, k: int) -> QSeries:
    """Substitute q -> q^k (realizes tau -> k*tau on theta series)."""
    if k < 1:
        raise ValueError("dilation factor must be positive")
    order = k * (a.trunc_order - 1) + 1
    return QSeries({e * k: c for e, c in a.coeffs.items()}, order)


def qs_eval_ball(a: QSeries, q0: BallComplex, tail_coeff_bound) -> BallComplex:
    """Evaluate at a ball point inside the unit disk.

    tail_coeff_bound is a caller-supplied C with |a_n| <= C for every
    unknown coefficient n >= trunc_order; the geometric tail
    C|q0|^N/(1-|q0|) is folded into the radius. Pass 0 for exact
    polynomials.
    """
    C = mpq(tail_coeff_bound)
    if C < 0:
        raise ValueError("tail coefficient bound must be nonnegative")
    t = mpq(q0.abs_upper())
    if t >= 1:
        raise ValueError("evaluation point must satisfy |q0| < 1")
    prec = q0.prec
    exps = sorted(a.coeffs, reverse=True)
    if not exps:
        val = BallComplex.zero(prec)
    else:
        val = BallComplex.from_rational(a.coeffs[exps[0]], 0, prec)
        for i in range(1, len(exps)):
            gap = exps[i - 1] - exps[i]
            val = ball_mul(val, ball_pow(q0, gap))
            val = ball_add(val, BallComplex.from_rational(a.coeffs[exps[i]], 0, prec))
        if exps[-1] > 0:
            val = ball_mul(val, ball_pow(q0, exps[-1]))
    tail = C * t ** a.trunc_order / (1 - t)
    rad = _RUP.add(val.rad, _RUP.add(tail, gmpy2.mpfr(0)))
    return BallComplex(val.mid_re, val.mid_im, rad, prec)


def qs_text(a: QSeries) -> str:
    """Debug dump as 'c0 + c1*q + c2*q^2 + ...'."""
    if not a.coeffs:
        return "0"
    parts = []
    for e in sorted(a.coeffs):
        c = a.coeffs[e]
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(f"{c}*q")
        else:
            parts.append(f"{c}*q^{e}")
    return " + ".join(parts).replace("+ -", "- ")
