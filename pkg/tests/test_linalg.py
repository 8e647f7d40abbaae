"""Nullspace solver tests: both paths against constructed-kernel oracles."""

import random

import numpy as np
import pytest
from gmpy2 import mpq

from thetacert.linalg import (
    NullspaceDimensionNotOne,
    _rational_reconstruct,
    matvec_is_zero,
    nullspace_dim_one,
    nullspace_exact,
    nullspace_modular,
    rank_exact,
)


def rows_orthogonal_to(v, nrows, rng, scale=10):
    """Random integer rows exactly orthogonal to v (pair-combination basis)."""
    C = len(v)
    rows = []
    for _ in range(nrows):
        row = [0] * C
        for _ in range(3):
            i, j = rng.sample(range(C), 2)
            c = rng.randint(-scale, scale)
            row[i] += c * v[j]
            row[j] -= c * v[i]
        rows.append(row)
    return rows


class TestOracleKernels:
    def test_small_exact_recovers_vector(self):
        rng = random.Random(7)
        v = [3, -5, 7, 11, -2]
        rows = rows_orthogonal_to(v, 30, rng)
        got = nullspace_exact(rows, 5)
        assert got == v or got == [-x for x in v]
        assert matvec_is_zero(rows, got)

    def test_dispatch_paths_agree(self):
        rng = random.Random(11)
        v = [9, 14, -25, 4, 1, -6, 30, 2]
        rows = rows_orthogonal_to(v, 60, rng)
        a = nullspace_dim_one(rows, 8, anchor=0, force="exact")
        b = nullspace_dim_one(rows, 8, anchor=0, force="modular")
        assert a == b
        assert matvec_is_zero(rows, a)

    def test_modular_large_entries(self):
        rng = random.Random(13)
        v = [rng.randint(-10**30, 10**30) for _ in range(12)]
        v[0] |= 1
        rows = rows_orthogonal_to(v, 80, rng, scale=10**6)
        got = nullspace_dim_one(rows, 12, anchor=0, force="modular")
        # got is v divided by its content, up to the sign convention
        assert matvec_is_zero(rows, got)
        assert all(a * got[0] == got[i] * v[0] for i, a in enumerate(v))

    def test_rational_rows_cleared(self):
        rng = random.Random(17)
        v = [2, -3, 5, 1]
        rows = rows_orthogonal_to(v, 25, rng)
        qrows = [[mpq(x, 1 + (k % 3)) for k, x in enumerate(row)] for row in rows]
        # scaling columns changes the kernel predictably: x_k -> x_k * (1+(k%3))
        got = nullspace_dim_one(qrows, 4, anchor=0, force="modular")
        expect = [v[k] * (1 + (k % 3)) for k in range(4)]
        g = np.gcd.reduce(expect)
        expect = [x // g for x in expect]
        if expect[0] < 0:
            expect = [-x for x in expect]
        assert got == expect


class TestDimensionErrors:
    def test_trivial_kernel(self):
        rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, 3]]
        with pytest.raises(NullspaceDimensionNotOne) as ei:
            nullspace_exact(rows, 3)
        assert ei.value.dim == 0

    def test_trivial_kernel_modular(self):
        rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, 3]]
        with pytest.raises(NullspaceDimensionNotOne) as ei:
            nullspace_dim_one(rows, 3, anchor=0, force="modular")
        assert ei.value.dim == 0

    def test_two_dimensional_kernel(self):
        # rank 1 matrix on 3 columns
        rows = [[1, 2, 3], [2, 4, 6], [-1, -2, -3]]
        with pytest.raises(NullspaceDimensionNotOne) as ei:
            nullspace_exact(rows, 3)
        assert ei.value.dim == 2

    def test_two_dimensional_kernel_modular(self):
        rows = [[1, 2, 3], [2, 4, 6], [-1, -2, -3], [3, 6, 9]]
        with pytest.raises(NullspaceDimensionNotOne):
            nullspace_dim_one(rows, 3, anchor=0, force="modular")


class TestRank:
    def test_identity(self):
        assert rank_exact([[1, 0], [0, 1]]) == 2

    def test_zero(self):
        assert rank_exact([[0, 0], [0, 0]]) == 0

    def test_duplicates(self):
        assert rank_exact([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2

    def test_rationals(self):
        assert rank_exact([[mpq(1, 2), mpq(1, 3)], [mpq(3, 2), mpq(1, 1)]]) == 1
        assert rank_exact([[mpq(1, 2), mpq(1, 3)], [mpq(3, 2), mpq(2, 1)]]) == 2

    def test_orthogonal_complement_rank(self):
        rng = random.Random(23)
        v = [1, 4, -2, 9, 5, 5]
        rows = rows_orthogonal_to(v, 40, rng)
        assert rank_exact(rows) == 5


class TestReconstruction:
    @pytest.mark.parametrize("n,d", [(1, 3), (-7, 11), (22, 7), (0, 1), (123456, 789)])
    def test_roundtrip(self, n, d):
        m = (1 << 62) + 1  # big odd modulus coprime to the denominators used
        x = (n * pow(d, -1, m)) % m
        assert _rational_reconstruct(x, m) == mpq(n, d)

    def test_failure_when_too_big(self):
        # numerator ~ modulus: no small fraction exists
        m = 10**9 + 7
        x = m - 2
        q = _rational_reconstruct(x, m)
        # -2 is representable, so this one actually succeeds
        assert q == mpq(-2, 1)

    def test_matches_direct_residue(self):
        m = 2**89 - 1
        q = mpq(-355, 113)
        x = (int(q.numerator) * pow(113, -1, m)) % m
        assert _rational_reconstruct(x, m) == q


class TestModularInternals:
    def test_anchor_must_be_nonzero_coordinate(self):
        rng = random.Random(29)
        v = [0, 3, -4, 1]
        rows = rows_orthogonal_to(v, 30, rng)
        # anchor 0 sits on a zero coordinate of the kernel: every prime is
        # skipped and the budget runs out
        def matrix_mod(p):
            return np.array([[x % p for x in row] for row in rows], dtype=np.int64)

        with pytest.raises(NullspaceDimensionNotOne):
            nullspace_modular(matrix_mod, 4, anchor=0, max_primes=5)
        got, _ = nullspace_modular(matrix_mod, 4, anchor=1)
        assert got == [0, 3, -4, 1] or got == [0, -3, 4, -1]
