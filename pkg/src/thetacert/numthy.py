"""Arithmetic functions and exact coefficient-condition predicates.

The algebraic inputs of the non-vanishing conditions are restricted to two
exactly decidable shapes: Gaussian rationals p + q*i, and root forms
phase * r * sqrt(u) with phase a Gaussian unit, r a positive rational, and
u a squarefree integer > 1. Everything the certification layer asks about
these numbers (membership in M_s, unit tests, rationality of fourth
powers) is decided with integer arithmetic only.
"""

import math
import re as _re

from gmpy2 import mpq

from .gaussian import GR_I, GR_ONE, GaussRat


class UnsupportedAlgebraic(ValueError):
    """Operation leaves the supported exact shapes."""


class AlgebraicParseError(ValueError):
    """Unrecognized coefficient expression."""


# -- integer arithmetic ---------------------------------------------------


def factorize(n: int):
    """Trial-division factorization as {prime: exponent}."""
    n = int(n)
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def psi(n: int) -> int:
    """Dedekind psi: n * prod over primes p|n of (1 + 1/p)."""
    n = int(n)
    if n < 1:
        raise ValueError("psi expects a positive integer")
    val = n
    for p in factorize(n):
        val = val // p * (p + 1)
    return val


def divisors(n: int):
    """Sorted positive divisors."""
    fac = factorize(n)
    out = [1]
    for p, e in fac.items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def w_count(a: int, b: int) -> int:
    """Number of k in [0, b) with gcd(a, b, k) = 1."""
    a, b = int(a), int(b)
    if a < 1 or b < 1:
        raise ValueError("w_count expects positive integers")
    g = math.gcd(a, b)
    if g == 1:
        return b
    return sum(1 for k in range(b) if math.gcd(g, k) == 1)


def odd_part(n: int):
    """n = 2^a * s with s odd; returns (a, s)."""
    n = int(n)
    if n < 1:
        raise ValueError("positive integer required")
    a = 0
    while n % 2 == 0:
        n //= 2
        a += 1
    return a, n


# -- exact algebraic shapes ------------------------------------------------

_UNITS = (GaussRat(1), GaussRat(-1), GaussRat(0, 1), GaussRat(0, -1))


def _squarefree_split(u: int):
    s, rest, f = 1, 1, 2
    while f * f <= u:
        e = 0
        while u % f == 0:
            u //= f
            e += 1
        s *= f ** (e // 2)
        if e % 2:
            rest *= f
        f += 1
    return s, rest * u


class GaussianRational:
    """Wrapper variant: beta = p + q*i exactly."""

    __slots__ = ("value",)

    def __init__(self, re, im=0):
        self.value = re if isinstance(re, GaussRat) else GaussRat(re, im)

    def __repr__(self):
        return f"GaussianRational({self.value.re}, {self.value.im})"

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.value == other.value
        if isinstance(other, RootForm):
            return False
        return NotImplemented

    __hash__ = None

    def is_zero(self):
        return self.value.is_zero()


class RootForm:
    """beta = phase * r * sqrt(u), phase in {1,-1,i,-i}, r > 0 rational, u squarefree > 1."""

    __slots__ = ("phase", "r", "u")

    def __init__(self, phase: GaussRat, r, u: int):
        r, u = mpq(r), int(u)
        if phase not in _UNITS:
            raise ValueError("phase must be a Gaussian unit")
        if r <= 0:
            raise ValueError("r must be positive")
        s, u2 = _squarefree_split(u)
        if u2 <= 1 or s != 1:
            raise ValueError("u must be squarefree and > 1; fold squares into r")
        self.phase, self.r, self.u = phase, r, u

    def __repr__(self):
        return f"RootForm({self.phase!r} * {self.r} * sqrt({self.u}))"

    def __eq__(self, other):
        if isinstance(other, RootForm):
            return (self.phase, self.r, self.u) == (other.phase, other.r, other.u)
        if isinstance(other, GaussianRational):
            return False
        return NotImplemented

    __hash__ = None

    def is_zero(self):
        return False


def make_algebraic(phase: GaussRat, r, u: int):
    """Normalizing constructor: collapses u=1 or r=0 to GaussianRational."""
    r, u = mpq(r), int(u)
    if u < 1:
        raise ValueError("u must be positive")
    if r < 0:
        phase, r = -phase, -r
    s, u = _squarefree_split(u)
    r *= s
    if r == 0:
        return GaussianRational(GaussRat(0))
    if u == 1:
        return GaussianRational(phase * GaussRat(r))
    return RootForm(phase, r, u)


class IrrationalMarker:
    """Fourth power is irrational; the exact Gaussian value is retained."""

    __slots__ = ("value",)

    def __init__(self, value: GaussRat):
        self.value = value

    def __repr__(self):
        return f"IrrationalMarker({self.value!r})"


def fourth_power_rational(beta):
    """Exact beta^4 as mpq when rational, else IrrationalMarker."""
    if isinstance(beta, RootForm):
        # phase^4 = 1 for every Gaussian unit; (r sqrt(u))^4 = r^4 u^2
        return beta.r ** 4 * beta.u ** 2
    if isinstance(beta, GaussianRational):
        v = beta.value ** 4
        if v.im == 0:
            return v.re
        return IrrationalMarker(v)
    raise UnsupportedAlgebraic(f"not an AlgebraicLite value: {beta!r}")


def is_gaussian_unit(beta) -> bool:
    if isinstance(beta, RootForm):
        return False
    if isinstance(beta, GaussianRational):
        return beta.value in _UNITS
    raise UnsupportedAlgebraic(f"not an AlgebraicLite value: {beta!r}")


def _phase_and_radicand(beta):
    """beta as (phase, v) with beta = phase*sqrt(v), v rational > 0; None if impossible."""
    if isinstance(beta, RootForm):
        return beta.phase, beta.r ** 2 * beta.u
    if isinstance(beta, GaussianRational):
        g = beta.value
        if g.is_zero():
            return None
        if g.im == 0:
            phase = GR_ONE if g.re > 0 else -GR_ONE
            return phase, g.re ** 2
        if g.re == 0:
            phase = GR_I if g.im > 0 else -GR_I
            return phase, g.im ** 2
        return None
    raise UnsupportedAlgebraic(f"not an AlgebraicLite value: {beta!r}")


def in_Ms(beta, s: int) -> bool:
    """Membership in M_s = {phase * sqrt(u) : u | s, phase in units}."""
    s = int(s)
    if s < 3 or s % 2 == 0:
        raise ValueError("s must be odd and >= 3")
    pr = _phase_and_radicand(beta)
    if pr is None:
        return False
    _, v = pr
    if v.denominator != 1:
        return False
    u = int(v)
    return u >= 1 and s % u == 0


def intersect_Ms_is_units(s1: int, s2: int) -> bool:
    """True iff M_{s1} and M_{s2} meet only in the Gaussian units."""
    for s in (s1, s2):
        if s < 3 or s % 2 == 0:
            raise ValueError("arguments must be odd and >= 3")
    return math.gcd(int(s1), int(s2)) == 1


# -- partial exact arithmetic on the two shapes ---------------------------


def alg_neg(beta):
    if isinstance(beta, GaussianRational):
        return GaussianRational(-beta.value)
    if isinstance(beta, RootForm):
        return RootForm(-beta.phase, beta.r, beta.u)
    raise UnsupportedAlgebraic(f"not an AlgebraicLite value: {beta!r}")


def _gauss_to_phase_scale(g: GaussRat):
    """g as (phase, positive rational) when g is real or imaginary; else None."""
    if g.im == 0:
        if g.re == 0:
            return None
        return (GR_ONE, g.re) if g.re > 0 else (-GR_ONE, -g.re)
    if g.re == 0:
        return (GR_I, g.im) if g.im > 0 else (-GR_I, -g.im)
    return None


def alg_mul(a, b):
    if isinstance(a, GaussianRational) and isinstance(b, GaussianRational):
        return GaussianRational(a.value * b.value)
    if isinstance(a, RootForm) and isinstance(b, RootForm):
        g = math.gcd(a.u, b.u)
        # sqrt(u1) sqrt(u2) = g * sqrt(u1 u2 / g^2)
        return make_algebraic(a.phase * b.phase, a.r * b.r * g,
                              (a.u // g) * (b.u // g))
    if isinstance(a, GaussianRational):
        a, b = b, a
    if isinstance(a, RootForm) and isinstance(b, GaussianRational):
        ps = _gauss_to_phase_scale(b.value)
        if b.value.is_zero():
            return GaussianRational(GaussRat(0))
        if ps is None:
            raise UnsupportedAlgebraic(
                "product of a root form with a mixed Gaussian rational leaves "
                "the supported shapes")
        phase, scale = ps
        return make_algebraic(a.phase * phase, a.r * scale, a.u)
    raise UnsupportedAlgebraic(f"cannot multiply {a!r} and {b!r}")


def alg_inv(beta):
    if isinstance(beta, GaussianRational):
        if beta.value.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(GaussRat(1) / beta.value)
    if isinstance(beta, RootForm):
        # 1/(phase r sqrt(u)) = conj(phase) * (1/(r u)) * sqrt(u)
        return RootForm(beta.phase.conj(), 1 / (beta.r * beta.u), beta.u)
    raise UnsupportedAlgebraic(f"not an AlgebraicLite value: {beta!r}")


def alg_div(a, b):
    return alg_mul(a, alg_inv(b))


# -- parsing ---------------------------------------------------------------

_BETA_TERM = _re.compile(
    r"^(?P<num>-?[0-9]+(?:/[0-9]+)?)?"
    r"(?P<imag>i)?"
    r"(?:\*?sqrt\((?P<rad>[0-9]+)\))?"
    r"(?:/(?P<den>[0-9]+))?$"
)


def parse_beta(text: str):
    """Parse one coefficient: 'p/q', 'a+b*i', '[-]sqrt(u)', '[-]i*sqrt(u)', 'r*sqrt(u)'."""
    s = text.replace(" ", "").lower().replace("*i", "i").replace("i*", "i")
    if not s:
        raise AlgebraicParseError("empty coefficient")
    chunks = [c for c in _re.split(r"(?=[+-])", s) if c]
    acc = GaussRat(0)
    root_terms = []
    for chunk in chunks:
        neg = chunk.startswith("-")
        if chunk[0] in "+-":
            chunk = chunk[1:]
        if not chunk:
            raise AlgebraicParseError(f"dangling sign in {text!r}")
        # move a leading i so '2i/3' and 'i/3' parse as rationals with a flag
        imag = "i" in chunk
        if imag:
            if chunk.count("i") > 1:
                raise AlgebraicParseError(f"bad term {chunk!r}")
            chunk = chunk.replace("i", "", 1)
            if not chunk or chunk.startswith("/"):
                chunk = "1" + chunk
        m = _BETA_TERM.match(chunk)
        if not m or m.group("imag") or (m.group("den") and not m.group("rad")):
            raise AlgebraicParseError(f"cannot parse term {chunk!r} of {text!r}")
        coeff = mpq(m.group("num") or 1)
        if m.group("den"):
            coeff /= int(m.group("den"))
        if neg:
            coeff = -coeff
        if m.group("rad") is not None:
            u = int(m.group("rad"))
            if u == 0:
                continue
            sq, u = _squarefree_split(u)
            coeff *= sq
            if u == 1:
                pass
            else:
                root_terms.append((coeff, u, imag))
                continue
        acc = acc + (GaussRat(0, coeff) if imag else GaussRat(coeff))
    if not root_terms:
        return GaussianRational(acc)
    if len(root_terms) > 1 or not acc.is_zero():
        raise AlgebraicParseError(
            "mixed radical/rational coefficients are outside the supported shapes")
    coeff, u, imag = root_terms[0]
    phase = (GR_I if imag else GR_ONE)
    return make_algebraic(phase if coeff > 0 else -phase, abs(coeff), u)
