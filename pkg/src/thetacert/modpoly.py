"""Bivariate integer annihilators of theta-ratio series, fitted exactly.

For odd n >= 3 the polynomial P_n satisfies
    P_n(n^2 * theta3^4(n tau)/theta3^4(tau), 16 * theta2^4/theta3^4) = 0,
is monic of degree psi(n) in X, and the X^{psi(n)-k} coefficient has
Y-degree at most floor(k(n-1)/n).

For even n = 2^a * s with odd s >= 3 the polynomial Q_n satisfies
    Q_n(theta3^4(n tau)/theta3^4(tau), theta2^4/theta3^4) = 0
(no extra scaling), its leading Y-term is the constant c_n^{2^a} times
Y^{2^a psi(s)}, and the Y^j coefficient has X-degree at most
2^a psi(s) - j.  The Y^0 section carries a closed form measured from the
fits themselves; see zero_section_expected.  Every law is re-checked
exactly after each fit and on every cache load.
"""

import math
import os

import gmpy2
from gmpy2 import mpq

from .linalg import NullspaceDimensionNotOne, nullspace_dim_one
from .numthy import divisors, factorize, odd_part, psi, w_count
from .polyjson import PolyFileError, cache_path, read_poly_file, write_poly_file
from .qseries import QSeries, qs_add, qs_inv, qs_mul, qs_one, qs_pow_int, qs_scale
from .thetafun import ThetaKind, lambda_series, theta_series

__all__ = [
    "IntPoly2", "SDecomposition", "ValidationFailure", "OddPartTooSmall",
    "NullspaceDimensionNotOne", "fit_P", "fit_Q", "expand_P_at_Y0",
    "s_decompose", "build_T", "load_or_fit", "eval_on_series",
    "substitute_y", "zero_section_expected",
]

DEFAULT_MARGIN = 50


class ValidationFailure(ArithmeticError):
    def __init__(self, law: str, message: str):
        super().__init__(f"[{law}] {message}")
        self.law = law


class OddPartTooSmall(ValueError):
    pass


# -- dense univariate integer helpers --------------------------------------


def _dense_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _dense_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return _dense_trim(out)


def _dense_pow(a, k: int):
    out = [1]
    base = list(a)
    while k:
        if k & 1:
            out = _dense_mul(out, base)
        k >>= 1
        if k:
            base = _dense_mul(base, base)
    return out


def dense_eval(a, x):
    acc = mpq(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _dense_divmod(num, den):
    num = [mpq(c) for c in num]
    if len(num) < len(den):
        return [], _dense_trim(num)
    quo = [mpq(0)] * (len(num) - len(den) + 1)
    for k in range(len(quo) - 1, -1, -1):
        quo[k] = num[k + len(den) - 1] / den[-1]
        for t, d in enumerate(den):
            num[k + t] -= quo[k] * d
    return quo, _dense_trim(num[: len(den) - 1])


# -- the polynomial container ----------------------------------------------


class IntPoly2:
    """Sparse bivariate integer polynomial with fit metadata."""

    __slots__ = ("terms", "meta")

    def __init__(self, terms, meta):
        self.terms = {(int(i), int(j)): int(c)
                      for (i, j), c in terms.items() if c != 0}
        self.meta = dict(meta)

    def deg_x(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def deg_y(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def y_section(self, j: int):
        """Dense integer X-coefficients of the Y^j term."""
        sec = {i: c for (i, jj), c in self.terms.items() if jj == j}
        if not sec:
            return []
        out = [0] * (max(sec) + 1)
        for i, c in sec.items():
            out[i] = c
        return out

    def eval_rational(self, x, y) -> mpq:
        x, y = mpq(x), mpq(y)
        acc = mpq(0)
        for j in range(self.deg_y(), -1, -1):
            acc = acc * y + dense_eval(self.y_section(j), x)
        return acc

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, abs(c))
            if g == 1:
                break
        return g

    def __eq__(self, other):
        return isinstance(other, IntPoly2) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        kind = self.meta.get("kind", "?")
        n = self.meta.get("n", "?")
        return f"IntPoly2({kind}_{n}, {len(self.terms)} terms)"


class SDecomposition:
    """P_n regrouped by Y-powers: parts[j] is the dense X-polynomial S_j."""

    __slots__ = ("n", "parts", "d")

    def __init__(self, n, parts, d):
        self.n = n
        self.parts = parts
        self.d = d


# -- closed form for the Y = 0 section --------------------------------------


def expand_P_at_Y0(s: int, scaled: bool = False):
    """P_s(X, 0) (or P_s(s^2 X, 0) when scaled) as a dense integer list.

    The constant section factors as prod over u | s of
    (X - u^2)^{w(u, s/u)}; substituting s^2 X keeps everything integral.
    """
    s = int(s)
    if s < 3 or s % 2 == 0:
        raise ValueError("s must be odd and >= 3")
    out = [1]
    scale = s * s if scaled else 1
    for v in divisors(s):
        mult = w_count(v, s // v)
        if mult:
            out = _dense_mul(out, _dense_pow([-v * v, scale], mult))
    return out


def _totient(s: int) -> int:
    t = 1
    for p, e in factorize(s).items():
        t *= (p - 1) * p ** (e - 1)
    return t


def zero_section_expected(n: int):
    """The Y^0 section of the fitted Q_n in closed form, or None.

    Pinned against the fitted polynomials themselves (unique primitive
    kernel vector, dimension certified, annihilation re-checked against an
    independent multiprecision evaluation):

        n = 2s:   s^(2 phi(s)) 2^(4 psi(s)) X^psi(s) P_s(s^2 X, 0)
        n = 4s:   the same with 2^(12 psi(s)), times
                  prod over u | s of (4 u^2 X + 1)^(2 w(s/u, u))

    The extra n = 4s roots sit at X = -1/(4 u^2), i.e. at fourth powers of
    the Gaussian points sqrt(2u) zeta_8.  For a >= 3 no closed form has
    been measured and the caller falls back to a divisibility check.
    """
    a, s = odd_part(n)
    if a < 1 or s < 3:
        raise OddPartTooSmall("need n even with odd part >= 3")
    if a > 2:
        return None
    shift = psi(s)
    base = expand_P_at_Y0(s, scaled=True)
    scale = s ** (2 * _totient(s)) << (4 * ((1 << a) - 1) * shift)
    out = [scale * c for c in base]
    if a == 2:
        for u in divisors(s):
            out = _dense_mul(out, _dense_pow([1, 4 * u * u], 2 * w_count(s // u, u)))
    return [0] * shift + out


# -- fitting -----------------------------------------------------------------


def _p_columns(n: int):
    ps = psi(n)
    cols = [(ps, 0)]
    for k in range(1, ps + 1):
        jmax = (k * (n - 1)) // n
        for j in range(jmax + 1):
            cols.append((ps - k, j))
    return cols


def _q_columns(n: int):
    a, s = odd_part(n)
    D = (1 << a) * psi(s)
    cols = [(0, D)]
    for j in range(D):
        for i in range(D - j + 1):
            cols.append((i, j))
    return cols


def _theta3_pow4_ratio(n: int, order: int) -> QSeries:
    num = qs_pow_int(theta_series(ThetaKind.theta3, n, order), 4)
    den = qs_pow_int(theta_series(ThetaKind.theta3, 1, order), 4)
    return qs_mul(num, qs_inv(den))


def _series_pair(kind: str, n: int, order: int):
    """(A, B) with T(A, B) = 0 for the fitted polynomial of that kind."""
    ratio = _theta3_pow4_ratio(n, order)
    lam = lambda_series(order)
    if kind == "P":
        return qs_scale(ratio, n * n), qs_scale(lam, 16)
    return ratio, lam


def _int_coeff(v) -> int:
    q = mpq(v)
    if q.denominator != 1:
        raise AssertionError("fit series must have integer coefficients")
    return int(q)


def _column_rows(cols, A: QSeries, B: QSeries, order: int):
    """Exact integer matrix rows: row r = q^r coefficients of A^i B^j."""
    max_i = max(i for i, _ in cols)
    max_j = max(j for _, j in cols)
    apow = [qs_one(order)]
    for _ in range(max_i):
        apow.append(qs_mul(apow[-1], A))
    bpow = [qs_one(order)]
    for _ in range(max_j):
        bpow.append(qs_mul(bpow[-1], B))
    series = []
    for i, j in cols:
        if j == 0:
            s = apow[i]
        elif i == 0:
            s = bpow[j]
        else:
            s = qs_mul(apow[i], bpow[j])
        series.append({e: _int_coeff(c) for e, c in s.coeffs.items()})
    rows = []
    for r in range(order):
        rows.append([s.get(r, 0) for s in series])
    return rows


def _fit(kind: str, n: int, order_margin: int, force_solver=None):
    cols = _p_columns(n) if kind == "P" else _q_columns(n)
    order = len(cols) * (n + 1) + order_margin
    A, B = _series_pair(kind, n, order)
    rows = _column_rows(cols, A, B, order)
    vec = nullspace_dim_one(rows, len(cols), anchor=0, force=force_solver)
    return cols, order, vec


def fit_P(n: int, order_margin: int = DEFAULT_MARGIN, force_solver=None) -> IntPoly2:
    """Fit the monic annihilator for odd n >= 3 and validate every law."""
    n = int(n)
    if n < 3 or n % 2 == 0:
        raise ValueError("fit_P needs odd n >= 3")
    cols, order, vec = _fit("P", n, order_margin, force_solver)
    if abs(vec[0]) != 1:
        raise ValidationFailure(
            "monic-leading",
            f"leading X coefficient {vec[0]} of the primitive kernel is not a unit")
    if vec[0] < 0:
        vec = [-v for v in vec]
    poly = IntPoly2({col: v for col, v in zip(cols, vec)},
                    {"kind": "P", "n": n, "fit_order": order})
    validate_poly(poly)
    return poly


def fit_Q(n: int, order_margin: int = DEFAULT_MARGIN, force_solver=None) -> IntPoly2:
    """Fit the even-index annihilator for n = 2^a s, s odd >= 3."""
    n = int(n)
    a, s = odd_part(n)
    if a < 1:
        raise ValueError("fit_Q needs even n")
    if s < 3:
        raise OddPartTooSmall(
            f"odd part of {n} is {s}; pure powers of 2 have no Q polynomial")
    cols, order, vec = _fit("Q", n, order_margin, force_solver)
    if vec[0] < 0:
        vec = [-v for v in vec]
    terms = {col: v for col, v in zip(cols, vec)}
    lead = terms.get((0, (1 << a) * psi(s)), 0)
    root, exact = gmpy2.iroot(gmpy2.mpz(lead), 1 << a) if lead > 0 else (0, False)
    if not exact or int(root) == 0:
        raise ValidationFailure(
            "leading-root",
            f"leading Y coefficient {lead} is not a positive perfect 2^{a} power")
    poly = IntPoly2(terms, {"kind": "Q", "n": n, "fit_order": order,
                            "c_n": int(root)})
    validate_poly(poly)
    return poly


# -- validation ---------------------------------------------------------------


def _require(ok: bool, law: str, message: str):
    if not ok:
        raise ValidationFailure(law, message)


def _validate_P(poly: IntPoly2, n: int):
    ps = psi(n)
    _require(poly.deg_x() == ps, "x-degree",
             f"deg_X = {poly.deg_x()}, expected psi({n}) = {ps}")
    _require(poly.terms.get((ps, 0)) == 1, "monic-leading",
             "X^psi coefficient must be exactly 1")
    for (i, j) in poly.terms:
        _require(not (i == ps and j > 0), "monic-leading",
                 f"X^psi carries a Y^{j} term")
        _require(j <= ((ps - i) * (n - 1)) // n, "coefficient-y-degree",
                 f"term X^{i} Y^{j} exceeds the Y-degree bound")
    _require(poly.deg_y() >= 1, "y-degree-positive", "polynomial free of Y")
    _require(poly.y_section(0) == expand_P_at_Y0(n), "constant-section-product",
             "Y^0 section differs from the divisor product form")
    for (i, j), c in poly.terms.items():
        _require(not (i == 0 and j >= 1), "s-decomp-vanishing",
                 f"S_{j}(0) = {c} must vanish for j >= 1")
    _require(poly.terms.get((0, 0), 0) != 0, "s-decomp-constant",
             "constant term P(0,0) must be a nonzero integer")
    _require(poly.content() == 1, "primitive", "integer content must be 1")


def _validate_Q(poly: IntPoly2, n: int):
    a, s = odd_part(n)
    _require(a >= 1 and s >= 3, "shape", "Q is defined for even n with odd part >= 3")
    D = (1 << a) * psi(s)
    _require(poly.deg_y() == D, "y-degree",
             f"deg_Y = {poly.deg_y()}, expected 2^{a} psi({s}) = {D}")
    lead_sec = poly.y_section(D)
    _require(lead_sec == [poly.terms.get((0, D), 0)] and poly.terms.get((0, D), 0) > 0,
             "leading-y-term", "Y-leading coefficient must be a positive constant")
    c_n = poly.meta.get("c_n")
    _require(c_n is not None and c_n > 0 and c_n ** (1 << a) == poly.terms[(0, D)],
             "leading-root", f"c_n^(2^{a}) must reproduce the leading coefficient")
    for (i, j) in poly.terms:
        if j < D:
            _require(i <= D - j, "coefficient-x-degree",
                     f"term X^{i} Y^{j} exceeds the X-degree bound {D - j}")
            _require(i > 0, "y-axis-section",
                     f"Y^{j} section must vanish at X = 0 for j < {D}")
    sec = poly.y_section(0)
    expected = zero_section_expected(n)
    if expected is not None:
        _require(sec == expected, "zero-section",
                 "Y^0 section differs from the measured closed form")
    else:
        core = [0] * psi(s) + expand_P_at_Y0(s, scaled=True)
        quo, rem = _dense_divmod(sec, core)
        _require(quo and not rem, "zero-section",
                 "X^psi(s) P_s(s^2 X, 0) must divide the Y^0 section")
    _require(poly.content() == 1, "primitive", "integer content must be 1")


def validate_poly(poly: IntPoly2):
    kind = poly.meta.get("kind")
    n = int(poly.meta.get("n", 0))
    for c in poly.terms.values():
        _require(c != 0, "no-zero-terms", "zero coefficient stored")
    if kind == "P":
        _validate_P(poly, n)
    elif kind == "Q":
        _validate_Q(poly, n)
    elif kind == "T":
        _require(len(poly.terms) > 0, "nonempty", "empty polynomial")
    else:
        raise ValidationFailure("kind", f"unknown polynomial kind {kind!r}")


# -- decomposition, substitution, evaluation ---------------------------------


def s_decompose(poly: IntPoly2) -> SDecomposition:
    """Regroup a fitted P_n by Y-powers and re-check the section laws."""
    _require(poly.meta.get("kind") == "P", "kind", "s-decomposition applies to P only")
    n = int(poly.meta["n"])
    d = poly.deg_y()
    parts = [poly.y_section(j) for j in range(d + 1)]
    _require(d >= 1 and parts[d], "s-decomp-top", "top section S_d must be nonzero")
    for j in range(1, d + 1):
        _require(not parts[j] or parts[j][0] == 0, "s-decomp-vanishing",
                 f"S_{j}(0) != 0")
    _require(parts[0] and parts[0][0] != 0 and
             parts[0][0] == poly.terms.get((0, 0), 0),
             "s-decomp-constant", "S_0(0) must equal the nonzero constant term")
    return SDecomposition(n, parts, d)


def substitute_y(poly: IntPoly2, alpha) -> list:
    """Dense rational X-polynomial P(X, alpha)."""
    alpha = mpq(alpha)
    out = [mpq(0)] * (poly.deg_x() + 1)
    for (i, j), c in poly.terms.items():
        out[i] += c * alpha ** j
    while out and out[-1] == 0:
        out.pop()
    return out


def eval_on_series(poly: IntPoly2, order: int) -> QSeries:
    """Substitute the defining series pair; the result must vanish."""
    kind = poly.meta["kind"]
    n = int(poly.meta["n"])
    A, B = _series_pair("P" if kind == "P" else "Q", n, order)
    apow = [qs_one(order)]
    for _ in range(poly.deg_x()):
        apow.append(qs_mul(apow[-1], A))
    acc = QSeries({}, order)
    for j in range(poly.deg_y(), -1, -1):
        acc = qs_mul(acc, B)
        sec = poly.y_section(j)
        for i, c in enumerate(sec):
            if c:
                acc = qs_add(acc, qs_scale(apow[i], c))
    return acc


def substitution_is_zero(poly: IntPoly2, order: int) -> bool:
    return not eval_on_series(poly, order).coeffs


# -- the unified annihilator T_m ----------------------------------------------


def build_T(m: int, order_margin: int = DEFAULT_MARGIN, directory=None) -> IntPoly2:
    """P_m(m^2 X, 16 Y) for odd m; Q_m unchanged for even m."""
    m = int(m)
    a, s = odd_part(m)
    if s < 3:
        raise OddPartTooSmall(f"odd part of {m} is {s}; need >= 3")
    if a == 0:
        base = load_or_fit("P", m, order_margin, directory)
        terms = {(i, j): c * m ** (2 * i) * 16 ** j
                 for (i, j), c in base.terms.items()}
        meta = {"kind": "T", "n": m, "fit_order": base.meta["fit_order"]}
        return IntPoly2(terms, meta)
    base = load_or_fit("Q", m, order_margin, directory)
    meta = dict(base.meta)
    meta["kind"] = "T"
    return IntPoly2(base.terms, meta)


# -- cache --------------------------------------------------------------------


def _poly_from_file(terms_q, meta, kind: str, n: int) -> IntPoly2:
    if meta.get("kind") != kind or int(meta.get("n", -1)) != n:
        raise PolyFileError(f"file metadata {meta.get('kind')}_{meta.get('n')} "
                            f"does not match requested {kind}_{n}")
    terms = {}
    for expo, c in terms_q.items():
        if mpq(c).denominator != 1:
            raise PolyFileError(f"non-integer coefficient {c} at {expo}")
        terms[expo] = int(c)
    out_meta = {"kind": kind, "n": n, "fit_order": int(meta["fit_order"])}
    if kind == "Q":
        out_meta["c_n"] = int(mpq(meta["c_n"]))
    return IntPoly2(terms, out_meta)


def _file_meta(poly: IntPoly2) -> dict:
    meta = {"kind": poly.meta["kind"], "n": int(poly.meta["n"]),
            "fit_order": int(poly.meta["fit_order"])}
    if "c_n" in poly.meta:
        meta["c_n"] = str(poly.meta["c_n"])
    return meta


def load_or_fit(kind: str, n: int, order_margin: int = DEFAULT_MARGIN,
                directory=None) -> IntPoly2:
    """Cache wrapper: load + re-validate, else discard, refit, and store."""
    kind = str(kind).upper()
    n = int(n)
    path = cache_path(kind, n, directory)
    if os.path.exists(path):
        try:
            terms_q, meta = read_poly_file(path)
            poly = _poly_from_file(terms_q, meta, kind, n)
            validate_poly(poly)
            return poly
        except (PolyFileError, ValidationFailure):
            try:
                os.unlink(path)
            except OSError:
                pass
    poly = fit_P(n, order_margin) if kind == "P" else fit_Q(n, order_margin)
    write_poly_file(path, poly.terms, _file_meta(poly))
    return poly
