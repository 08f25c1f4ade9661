"""Exact linear algebra over the rationals.

Matrices are lists of lists of ``Fraction``.  Everything here uses exact
Gaussian elimination with first-nonzero pivoting; there is no numerical
tolerance anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ArityMismatch, DeterminantNotOne


def to_fraction_matrix(grid: Sequence[Sequence]) -> list:
    return [[Fraction(x) for x in row] for row in grid]


def identity_matrix(n: int) -> list:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    rows, inner, cols = len(a), len(b), len(b[0])
    if len(a[0]) != inner:
        raise ArityMismatch("matrix product shape mismatch")
    return [
        [sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
        for i in range(rows)
    ]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(a))]


def transpose(a: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*a)]


def rank(grid: Sequence[Sequence]) -> int:
    """Rank by exact Gaussian elimination, first-nonzero pivoting."""
    m = to_fraction_matrix(grid)
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][c]
        for i in range(r + 1, rows):
            if m[i][c] != 0:
                factor = m[i][c] / pivot
                for j in range(c, cols):
                    m[i][j] -= factor * m[r][j]
        r += 1
        if r == rows:
            break
    return r


def det(grid: Sequence[Sequence]) -> Fraction:
    """Exact determinant via fraction-based Gaussian elimination."""
    m = to_fraction_matrix(grid)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ArityMismatch("determinant of a non-square matrix")
    result = Fraction(1)
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            m[c], m[pivot_row] = m[pivot_row], m[c]
            result = -result
        pivot = m[c][c]
        result *= pivot
        for i in range(c + 1, n):
            if m[i][c] != 0:
                factor = m[i][c] / pivot
                for j in range(c, n):
                    m[i][j] -= factor * m[c][j]
    return result


def matrices_equal(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    return [list(map(Fraction, r)) for r in a] == [list(map(Fraction, r)) for r in b]


# -- SL_n factorization into transvections ------------------------------------
#
# A transvection is I + c*E[j, mu] (j != mu).  Factors are recorded as triples
# (j, mu, c) in product order: A = T(f[0]) * T(f[1]) * ... * T(f[-1]).


def transvection_matrix(n: int, j: int, mu: int, c: Fraction) -> list:
    m = identity_matrix(n)
    m[j][mu] = Fraction(c)
    return m


def _apply_left_transvection(m: list, j: int, mu: int, c: Fraction) -> None:
    """Left-multiply m by I + c*E[j, mu], i.e. row_j += c * row_mu."""
    row_mu = m[mu]
    m[j] = [a + c * b for a, b in zip(m[j], row_mu)]


def _diag_pair_factors(i: int, j: int, c: Fraction) -> list:
    """Transvection factors of diag(c at i, 1/c at j) embedded in SL_n.

    Uses the identity diag(c, 1/c) = E12(a) E21(b) E12(x) E21(y) with
    a = 1, b = c - 1, x = -1/c, y = c - c*c (valid for c != 0).
    """
    c = Fraction(c)
    if c == 1:
        return []
    a, b = Fraction(1), c - 1
    x, y = Fraction(-1) / c, c - c * c
    return [(i, j, a), (j, i, b), (i, j, x), (j, i, y)]


def sl_factor_transvections(matrix: Sequence[Sequence]) -> list:
    """Factor A in SL_n into transvections: A = prod of (I + c*E[j, mu]).

    Raises :class:`DeterminantNotOne` when det(A) != 1.  Returns the factor
    list in product order.  Strategy: reduce A to the identity by recorded
    row operations (left transvections), then invert and reverse the record.
    """
    a = to_fraction_matrix(matrix)
    n = len(a)
    if any(len(row) != n for row in a):
        raise ArityMismatch("SL factorization of a non-square matrix")
    if det(a) != 1:
        raise DeterminantNotOne(f"determinant is {det(a)}, expected 1")

    ops: list = []  # left-multiplications applied to a, in order

    def apply(j: int, mu: int, c: Fraction) -> None:
        if c == 0:
            return
        _apply_left_transvection(a, j, mu, c)
        ops.append((j, mu, c))

    # Upper-triangularize: for each column, ensure a nonzero pivot using a
    # row addition, then clear below.
    for col in range(n):
        if a[col][col] == 0:
            source = next((i for i in range(col + 1, n) if a[i][col] != 0), None)
            if source is None:
                raise DeterminantNotOne("matrix is singular")  # unreachable after det check
            apply(col, source, Fraction(1))
        pivot = a[col][col]
        for i in range(col + 1, n):
            if a[i][col] != 0:
                apply(i, col, -a[i][col] / pivot)
    # Clear above the diagonal (pivots are the nonzero diagonal entries).
    for col in range(n - 1, -1, -1):
        pivot = a[col][col]
        for i in range(col - 1, -1, -1):
            if a[i][col] != 0:
                apply(i, col, -a[i][col] / pivot)
    # Now a = diag(d_1, ..., d_n) with product 1.  Sweep the diagonal to I.
    # The pair factors form a product D = F1*F2*F3*F4, so as left
    # multiplications they must be applied last-to-first.
    for i in range(n - 1):
        d = a[i][i]
        if d != 1:
            for (j, mu, c) in reversed(_diag_pair_factors(i, i + 1, Fraction(1) / d)):
                apply(j, mu, c)

    # O_s * ... * O_1 * A = I, hence A = inv(O_1) * inv(O_2) * ... * inv(O_s);
    # the inverse of (j, mu, c) is (j, mu, -c).
    return [(j, mu, -c) for (j, mu, c) in ops]


def product_of_transvections(n: int, factors: Sequence[tuple]) -> list:
    result = identity_matrix(n)
    for (j, mu, c) in factors:
        result = mat_mul(result, transvection_matrix(n, j, mu, c))
    return result
