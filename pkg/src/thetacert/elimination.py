"""Quartic-linear substitution and Sylvester resultants over Q(i).

The two elimination objects are univariate resultants in Y of substituted
annihilators: for odd levels both sides are P polynomials with the scaled
pair convention, for even levels the substituted side is
H_m(X, Y) = Q_m((c0 + c1 X)^4, Y). Coefficients stay in Q(i) throughout;
irrational points enter only later, through their rational fourth powers.

Determinants are taken by fraction-free Bareiss elimination. Small
matrices are eliminated directly over the polynomial ring; large ones are
evaluated at enough integer points (the determinant commutes with
specialization) and reconstructed by exact Newton interpolation, with the
per-point determinants again done by Bareiss.
"""

from gmpy2 import mpq

from .gaussian import GR_ONE, GR_ZERO, GaussRat
from .modpoly import IntPoly2, load_or_fit
from .numerics import BallComplex
from .numthy import odd_part

__all__ = [
    "GaussPoly1", "GaussPoly2", "ZeroPolynomial", "subst_quartic_linear",
    "sylvester_res_Y", "scalar_res", "build_R", "build_W", "eval_poly_ball",
]

# polynomial-entry Bareiss is quadratic-ish in the entry degrees, so past
# this Sylvester dimension the evaluation-interpolation route wins
_DIRECT_SIZE_LIMIT = 8


class ZeroPolynomial(ValueError):
    pass


def _g(x) -> GaussRat:
    return x if isinstance(x, GaussRat) else GaussRat(mpq(x))


class GaussPoly1:
    """Dense univariate polynomial over Q(i), trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [_g(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def eval(self, x) -> GaussRat:
        x = _g(x)
        acc = GR_ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, GaussPoly1):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"GaussPoly1(deg={self.degree()})"


class GaussPoly2:
    """Sparse bivariate polynomial over Q(i): (i, j) -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {}
        for (i, j), c in terms.items():
            c = _g(c)
            if not c.is_zero():
                self.terms[(int(i), int(j))] = c

    def is_zero(self) -> bool:
        return not self.terms

    def deg_x(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def deg_y(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def y_rows(self):
        """Dense X-polynomial (list of GaussRat) for each Y power 0..deg_y."""
        dy = self.deg_y()
        dx = self.deg_x()
        rows = [[GR_ZERO] * (dx + 1) for _ in range(dy + 1)]
        for (i, j), c in self.terms.items():
            rows[j][i] = c
        return [_trim(r) for r in rows]

    def specialize_x(self, x0):
        """Dense list in Y of the coefficients at X = x0."""
        x0 = _g(x0)
        out = [GR_ZERO] * (self.deg_y() + 1)
        for (i, j), c in self.terms.items():
            out[j] = out[j] + c * x0 ** i
        return out

    def eval(self, x0, y0) -> GaussRat:
        x0, y0 = _g(x0), _g(y0)
        acc = GR_ZERO
        for c in reversed(self.specialize_x(x0)):
            acc = acc * y0 + c
        return acc

    def __mul__(self, other):
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, GR_ZERO) + c1 * c2
        return GaussPoly2(out)

    def __repr__(self):
        return f"GaussPoly2({len(self.terms)} terms)"


def _trim(cs):
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


# -- substitution -------------------------------------------------------------


def subst_quartic_linear(P: IntPoly2, x_scale, c0, c1, y_scale) -> GaussPoly2:
    """Exact expansion of P(x_scale * (c0 + c1 X)^4, y_scale * Y)."""
    x_scale = mpq(x_scale)
    y_scale = mpq(y_scale)
    c0, c1 = _g(c0), _g(c1)
    # (c0 + c1 X)^4 by binomial expansion
    quart = [GR_ZERO] * 5
    binom = (1, 4, 6, 4, 1)
    for k in range(5):
        quart[k] = GaussRat(binom[k]) * c0 ** (4 - k) * c1 ** k
    quart = _trim([GaussRat(x_scale) * c for c in quart])
    powers = [[GR_ONE]]
    for _ in range(P.deg_x()):
        powers.append(_dense_gmul(powers[-1], quart))
    out = {}
    for (i, j), c in P.terms.items():
        scale = GaussRat(mpq(c) * y_scale ** j)
        for k, qc in enumerate(powers[i]):
            key = (k, j)
            acc = out.get(key, GR_ZERO) + scale * qc
            out[key] = acc
    return GaussPoly2(out)


def _dense_gmul(a, b):
    if not a or not b:
        return []
    out = [GR_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return _trim(out)


# -- fraction-free determinants ----------------------------------------------


def _bareiss_scalar(m):
    """Determinant of a square GaussRat matrix, fraction-free pivoting."""
    n = len(m)
    sign = 1
    prev = GR_ONE
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return GR_ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = GR_ZERO
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def _dense_divexact(num, den):
    num = list(num)
    out = [GR_ZERO] * (len(num) - len(den) + 1)
    inv_lead = GR_ONE / den[-1]
    for k in range(len(out) - 1, -1, -1):
        q = num[k + len(den) - 1] * inv_lead
        out[k] = q
        if not q.is_zero():
            for t, d in enumerate(den):
                num[k + t] = num[k + t] - q * d
    assert all(c.is_zero() for c in num[: len(den) - 1]), "inexact division"
    return _trim(out)


def _bareiss_poly(m):
    """Determinant of a square matrix of dense GaussRat polynomials."""
    n = len(m)
    sign = 1
    prev = [GR_ONE]
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return []
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = _dense_gsub(_dense_gmul(m[i][j], m[k][k]),
                                _dense_gmul(m[i][k], m[k][j]))
                m[i][j] = _dense_divexact(t, prev) if t else []
            m[i][k] = []
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return [-c for c in det] if sign < 0 else det


def _dense_gsub(a, b):
    out = [GR_ZERO] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = out[i] - x
    return _trim(out)


def _sylvester_rows(f_rows, g_rows):
    """The (df+dg)-dimensional Sylvester matrix with polynomial entries."""
    df = len(f_rows) - 1
    dg = len(g_rows) - 1
    size = df + dg
    matrix = []
    for shift in range(dg):
        row = [[] for _ in range(size)]
        for t in range(df + 1):
            row[shift + t] = list(f_rows[df - t])
        matrix.append(row)
    for shift in range(df):
        row = [[] for _ in range(size)]
        for t in range(dg + 1):
            row[shift + t] = list(g_rows[dg - t])
        matrix.append(row)
    return matrix


def scalar_res(fy, gy) -> GaussRat:
    """Resultant of two univariate-in-Y polynomials given as dense lists.

    Degrees are taken from the list lengths, so callers control the nominal
    degree even when a leading value vanishes under specialization.
    """
    fy = [_g(c) for c in fy]
    gy = [_g(c) for c in gy]
    if len(fy) < 2 or len(gy) < 2:
        raise ValueError("need degree >= 1 on both sides")
    rows = _sylvester_rows([[c] for c in fy], [[c] for c in gy])
    return _bareiss_scalar([[cell[0] if cell else GR_ZERO for cell in row]
                            for row in rows])


def sylvester_res_Y(f: GaussPoly2, g: GaussPoly2) -> GaussPoly1:
    """Res_Y(f, g) as an exact univariate polynomial in X."""
    if f.is_zero() or g.is_zero():
        raise ZeroPolynomial("resultant of the zero polynomial")
    if f.deg_y() < 1 or g.deg_y() < 1:
        raise ValueError("both arguments must have Y-degree >= 1")
    f_rows = f.y_rows()
    g_rows = g.y_rows()
    matrix = _sylvester_rows(f_rows, g_rows)
    size = len(matrix)
    if size <= _DIRECT_SIZE_LIMIT:
        return GaussPoly1(_bareiss_poly(matrix))
    # degree of the determinant is at most the sum over rows of the
    # largest entry degree, so that many values pin it exactly
    bound = sum(max((len(cell) - 1 for cell in row if cell), default=0)
                for row in matrix)
    xs = []
    point = 0
    while len(xs) < bound + 1:
        xs.append(point)
        point = -point + (0 if point > 0 else 1)
    vals = []
    for x0 in xs:
        spec = [[_eval_dense(cell, x0) for cell in row] for row in matrix]
        vals.append(_bareiss_scalar(spec))
    return GaussPoly1(_newton_interpolate(xs, vals))


def _eval_dense(cs, x0) -> GaussRat:
    acc = GR_ZERO
    for c in reversed(cs):
        acc = acc * x0 + c
    return acc


def _newton_interpolate(xs, vals):
    """Exact interpolation through (xs[k], vals[k]), integer nodes."""
    dd = list(vals)
    n = len(xs)
    for level in range(1, n):
        for k in range(n - 1, level - 1, -1):
            dd[k] = (dd[k] - dd[k - 1]) / GaussRat(xs[k] - xs[k - level])
    out = [dd[n - 1]]
    for k in range(n - 2, -1, -1):
        # out = out * (X - xs[k]) + dd[k]
        shifted = [GR_ZERO] + out
        xk = GaussRat(xs[k])
        out = [shifted[t] - (out[t] * xk if t < len(out) else GR_ZERO)
               for t in range(len(shifted))]
        out[0] = out[0] + dd[k]
    return _trim(out)


# -- the proof-shaped builders -------------------------------------------------


def _alphas3(alphas):
    a = [_g(v) for v in alphas]
    if len(a) != 3:
        raise ValueError("need exactly three coefficients")
    if any(v.is_zero() for v in a):
        raise ValueError("all three coefficients must be nonzero")
    return a


def build_R(m: int, n: int, alphas, order_margin=None, directory=None) -> GaussPoly1:
    """Res_Y of the substituted P_m against P_n(n^2 X^4, 16 Y)."""
    m, n = int(m), int(n)
    if m < 3 or m % 2 == 0 or n < 3 or n % 2 == 0:
        raise ValueError("build_R needs odd levels >= 3")
    a0, a1, a2 = _alphas3(alphas)
    kw = {} if order_margin is None else {"order_margin": order_margin}
    pm = load_or_fit("P", m, directory=directory, **kw)
    pn = load_or_fit("P", n, directory=directory, **kw)
    f = subst_quartic_linear(pm, m * m, -a0 / a1, -a2 / a1, 16)
    g = subst_quartic_linear(pn, n * n, GR_ZERO, GR_ONE, 16)
    return sylvester_res_Y(f, g)


def _w_sides(m: int, n: int, alphas, directory=None):
    a0, a1, a2 = _alphas3(alphas)
    am, sm = odd_part(m)
    if am < 1 or sm < 3:
        raise ValueError("the substituted side needs even m with odd part >= 3")
    qm = load_or_fit("Q", m, directory=directory)
    f = subst_quartic_linear(qm, 1, -a0 / a1, -a2 / a1, 1)
    if n % 2 == 0:
        an, sn = odd_part(n)
        if sn < 3:
            raise ValueError("even n needs odd part >= 3")
        g = subst_quartic_linear(load_or_fit("Q", n, directory=directory),
                                 1, GR_ZERO, GR_ONE, 1)
    else:
        if n < 3:
            raise ValueError("odd n must be >= 3")
        g = subst_quartic_linear(load_or_fit("P", n, directory=directory),
                                 n * n, GR_ZERO, GR_ONE, 16)
    return f, g


def build_W(m: int, n: int, alphas, at=None, directory=None):
    """Res_Y(H_m, Q_n(X^4, Y)) for even n, or against the scaled P_n for odd n.

    With ``at`` given, X is specialized there first and the scalar resultant
    is returned (the nominal Y-degrees of the symbolic sides are kept, so
    the value always agrees with the symbolic W at that point).
    """
    m, n = int(m), int(n)
    f, g = _w_sides(m, n, alphas, directory)
    if at is None:
        return sylvester_res_Y(f, g)
    at = _g(at)
    return scalar_res(_pad(f.specialize_x(at), f.deg_y()),
                      _pad(g.specialize_x(at), g.deg_y()))


def _pad(cs, degree):
    return cs + [GR_ZERO] * (degree + 1 - len(cs))


def eval_poly_ball(p: GaussPoly1, x: BallComplex) -> BallComplex:
    """Horner evaluation with enclosure."""
    acc = BallComplex.zero(x.prec)
    for c in reversed(p.coeffs):
        cb = BallComplex.from_rational(c.re, c.im, x.prec)
        acc = acc * x + cb
    return acc
