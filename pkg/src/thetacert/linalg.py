"""Exact nullspace machinery for the polynomial fits.

Two paths produce the one-dimensional kernel of a tall integer matrix:

* small systems: exact rational Gauss-Jordan elimination;
* large systems: elimination modulo a fixed sequence of 30-bit primes,
  Chinese remaindering, and rational reconstruction.

Both paths end with proofs, not hope: kernel membership is re-verified by
an exact integer matrix-vector product (or, for the streamed fits, by the
caller's full-order series residual), and dimension-exactly-one follows
from a rank-(C-1) certificate — rank modulo any prime is a lower bound
for the rank over the rationals, while the verified kernel vector is the
matching upper bound.
"""

import math

import gmpy2
import numpy as np
from gmpy2 import mpq, mpz

_EXACT_COST_LIMIT = 2_000_000


class NullspaceDimensionNotOne(ArithmeticError):
    def __init__(self, message, dim=None):
        super().__init__(message)
        self.dim = dim


def _primes_30bit():
    """Deterministic descending primes just below 2^30."""
    c = (1 << 30) - 1
    while c > (1 << 29):
        if gmpy2.is_prime(c):
            yield c
        c -= 2


def _primitive(vec):
    """Divide out the content and make the first nonzero entry positive."""
    g = 0
    for v in vec:
        g = math.gcd(g, abs(int(v)))
        if g == 1:
            break
    out = [int(v) // g if g > 1 else int(v) for v in vec]
    for v in out:
        if v:
            if v < 0:
                out = [-x for x in out]
            break
    return out


def matvec_is_zero(rows, vec) -> bool:
    """Exact big-integer check that every row dotted with vec vanishes."""
    v = [mpz(x) for x in vec]
    for row in rows:
        acc = mpz(0)
        for a, x in zip(row, v):
            if a:
                acc += mpz(a) * x
        if acc != 0:
            return False
    return True


def rank_exact(rows) -> int:
    """Rank over the rationals by exact Gauss elimination (small matrices)."""
    m = [[mpq(x) for x in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = None
        for i in range(rank, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pr = m[rank]
        inv = 1 / pr[c]
        for j in range(c, ncols):
            pr[j] *= inv
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c]
                row = m[i]
                for j in range(c, ncols):
                    row[j] -= f * pr[j]
        rank += 1
        if rank == len(m):
            break
    return rank


def nullspace_exact(rows, ncols: int):
    """Unique-up-to-scale kernel vector by exact rational elimination.

    Returns a primitive integer vector; raises NullspaceDimensionNotOne
    with the observed dimension otherwise.
    """
    m = [[mpq(x) for x in row] for row in rows]
    pivots = []
    rank = 0
    for c in range(ncols):
        pivot = None
        for i in range(rank, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pr = m[rank]
        inv = 1 / pr[c]
        for j in range(c, ncols):
            pr[j] *= inv
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c]
                row = m[i]
                for j in range(c, ncols):
                    row[j] -= f * pr[j]
        pivots.append(c)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    if len(free) != 1:
        raise NullspaceDimensionNotOne(
            f"kernel dimension is {len(free)}, expected 1", dim=len(free))
    f = free[0]
    x = [mpq(0)] * ncols
    x[f] = mpq(1)
    for r, c in enumerate(pivots):
        x[c] = -m[r][f]
    den = 1
    for v in x:
        den = den * v.denominator // math.gcd(den, int(v.denominator))
    ints = [int(v * den) for v in x]
    vec = _primitive(ints)
    if not matvec_is_zero(rows, vec):
        raise AssertionError("exact kernel vector failed re-verification")
    return vec


def _eliminate_mod(A: np.ndarray, p: int):
    """In-place reduced row echelon mod p; returns (rank, pivot_columns)."""
    np.mod(A, p, out=A)
    n, C = A.shape
    r = 0
    pivots = []
    for c in range(C):
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        below = A[r + 1:, c]
        sel = np.nonzero(below)[0]
        if sel.size:
            A[r + 1 + sel] = (A[r + 1 + sel] - np.outer(below[sel], A[r])) % p
        pivots.append(c)
        r += 1
        if r == n:
            break
    # backward pass for direct kernel read-off
    for idx in range(len(pivots) - 1, -1, -1):
        c = pivots[idx]
        above = A[:idx, c]
        sel = np.nonzero(above)[0]
        if sel.size:
            A[sel] = (A[sel] - np.outer(above[sel], A[idx])) % p
    return len(pivots), pivots


def _kernel_mod_p(A: np.ndarray, p: int, anchor: int):
    """Kernel vector mod p normalized to 1 at anchor, or a skip/failure tag.

    Returns ("ok", vec) | ("deficient", rank) | ("trivial", None) |
    ("anchor_zero", None).
    """
    n, C = A.shape
    rank, pivots = _eliminate_mod(A, p)
    if rank == C:
        return "trivial", None
    if rank < C - 1:
        return "deficient", rank
    free = next(c for c in range(C) if c not in pivots)
    x = np.zeros(C, dtype=np.int64)
    x[free] = 1
    for r, c in enumerate(pivots):
        x[c] = (-int(A[r, free])) % p
    if x[anchor] == 0:
        return "anchor_zero", None
    inv = pow(int(x[anchor]), p - 2, p)
    x = (x * inv) % p
    return "ok", x


def _rational_reconstruct(x: int, m: int):
    """n/d with x*d = n (mod m), |n|,|d| <= sqrt(m/2); None if no such pair."""
    bound = gmpy2.isqrt(m // 2)
    r0, r1 = mpz(m), mpz(x % m)
    t0, t1 = mpz(0), mpz(1)
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or gmpy2.gcd(t1, m) != 1:
        return None
    if abs(t1) > bound:
        return None
    n, d = int(r1), int(t1)
    if d < 0:
        n, d = -n, -d
    return mpq(n, d)


def nullspace_modular(matrix_mod, ncols: int, anchor: int, max_primes: int = 400,
                      verify=None):
    """Kernel via CRT over 30-bit primes, normalized to 1 at anchor.

    matrix_mod(p) must return the matrix reduced mod p as an int64 array.
    Returns (vec, primes_used) where vec is a primitive integer vector.
    The rank-(C-1) certificate holds for every prime that returned a
    kernel. A spurious early reconstruction is filtered by the optional
    verify(vec) callback (more primes are added until it passes); callers
    without one still must check kernel membership exactly afterwards
    (matrix product or series residual).
    """
    residues = None
    modulus = 1
    deficient_seen = 0
    used = []
    gen = _primes_30bit()
    for _ in range(max_primes):
        p = next(gen)
        A = matrix_mod(p)
        if A.dtype != np.int64:
            A = A.astype(np.int64)
        status, data = _kernel_mod_p(A, p, anchor)
        if status == "trivial":
            raise NullspaceDimensionNotOne("kernel is trivial (dimension 0)", dim=0)
        if status == "deficient":
            deficient_seen += 1
            if deficient_seen >= 3:
                raise NullspaceDimensionNotOne(
                    f"rank deficiency (kernel dimension > 1) modulo {deficient_seen} "
                    "independent primes", dim=ncols - data)
            continue
        if status == "anchor_zero":
            continue
        x = [int(v) for v in data]
        if residues is None:
            residues, modulus = x, p
        else:
            # CRT combine coordinate-wise
            inv = pow(modulus % p, p - 2, p)
            new = []
            for rc, xc in zip(residues, x):
                t = ((xc - rc) * inv) % p
                new.append(rc + modulus * t)
            residues, modulus = new, modulus * p
        used.append(p)
        cand = []
        ok = True
        for rc in residues:
            q = _rational_reconstruct(rc, modulus)
            if q is None:
                ok = False
                break
            cand.append(q)
        if ok and len(used) >= 2:
            den = 1
            for v in cand:
                den = den * v.denominator // math.gcd(den, int(v.denominator))
            vec = _primitive([int(v * den) for v in cand])
            if verify is None or verify(vec):
                return vec, used
    raise NullspaceDimensionNotOne(
        "rational reconstruction did not stabilize within the prime budget")


def nullspace_dim_one(rows, ncols: int, anchor: int, force: str | None = None):
    """Dispatch: exact elimination for small systems, modular for large.

    rows are exact integer (or rational) entries. The returned primitive
    integer vector is exactly verified against all rows in both paths.
    """
    nrows = len(rows)
    cost = nrows * ncols * ncols
    path = force or ("exact" if cost <= _EXACT_COST_LIMIT else "modular")
    if path == "exact":
        return nullspace_exact(rows, ncols)
    int_rows = []
    for row in rows:
        qs = [mpq(x) for x in row]
        den = 1
        for v in qs:
            den = den * v.denominator // math.gcd(den, int(v.denominator))
        int_rows.append([int(v * den) for v in qs])

    def matrix_mod(p):
        return np.array([[x % p for x in row] for row in int_rows], dtype=np.int64)

    vec, _ = nullspace_modular(matrix_mod, ncols, anchor,
                               verify=lambda v: matvec_is_zero(int_rows, v))
    return vec
