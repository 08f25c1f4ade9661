"""Matrix spaces with elementary one-parameter subgroups and their invariants.

Three ambient spaces are supported: generic n x m matrices acted on by row
and column additions, and symmetric / skew-symmetric n x n matrices acted on
by congruence (B -> (I + tE_kl) B (I + tE_kl)^T).

Symmetric and skew matrices are coordinatized by their independent entries
(i <= j resp. i < j), so listed invariants genuinely lie in the kernel of
the generator's derivation on the entry ring.

Index conventions (1-based, matching the action formulas):
  * col(k, l):  column l += t * column k
  * row(k, l):  row l    += t * row k
  * cong(k, l): row/col k += t * row/col l   (with the t^2 correction at (k,k))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    ModeMismatch,
    NotSeparated,
)
from .flows import Derivation
from .linalg import det as rational_det
from .linalg import rank as rational_rank
from .poly import Polynomial, Ring
from .polymaps import pfaffian

GENERIC = "generic"
SYMMETRIC = "symmetric"
SKEW = "skew"
MODES = (GENERIC, SYMMETRIC, SKEW)


class MatrixPoint:
    """An exact rational matrix in one of the three ambient spaces."""

    __slots__ = ("mode", "n", "m", "entries")

    def __init__(self, mode: str, entries: Sequence[Sequence]):
        if mode not in MODES:
            raise ModeMismatch(f"unknown mode {mode!r}")
        grid = tuple(tuple(Fraction(x) for x in row) for row in entries)
        if not grid or not grid[0]:
            raise ArityMismatch("matrix must be nonempty")
        n, m = len(grid), len(grid[0])
        if any(len(row) != m for row in grid):
            raise ArityMismatch("ragged matrix")
        if mode in (SYMMETRIC, SKEW):
            if n != m:
                raise ModeMismatch(f"{mode} matrices must be square")
            for i in range(n):
                for j in range(n):
                    if mode == SYMMETRIC and grid[i][j] != grid[j][i]:
                        raise ModeMismatch("matrix is not symmetric")
                    if mode == SKEW and grid[i][j] != -grid[j][i]:
                        raise ModeMismatch("matrix is not skew-symmetric")
        self.mode = mode
        self.n = n
        self.m = m
        self.entries = grid

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatrixPoint)
            and self.mode == other.mode
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.mode, self.entries))

    def shape(self) -> tuple:
        return (self.mode, self.n, self.m)

    def __repr__(self) -> str:
        return f"MatrixPoint({self.mode}, {[list(r) for r in self.entries]})"


@dataclass(frozen=True)
class Signature:
    """Exact orbit data: rank always; det for square generic and symmetric;
    Pfaffian for skew."""

    rank: int
    det: Fraction | None = None
    pf: Fraction | None = None


def signature(b: MatrixPoint) -> Signature:
    r = rational_rank(b.entries)
    if b.mode == SKEW:
        return Signature(rank=r, pf=pfaffian(b.entries))
    if b.mode == SYMMETRIC or b.n == b.m:
        return Signature(rank=r, det=rational_det(b.entries))
    return Signature(rank=r)


@dataclass(frozen=True)
class ElemGenerator:
    """An elementary one-parameter subgroup of the ambient matrix space."""

    mode: str
    n: int
    m: int
    side: str  # "row" | "col" | "cong"
    k: int  # 1-based
    l: int  # 1-based

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModeMismatch(f"unknown mode {self.mode!r}")
        if self.mode == GENERIC:
            if self.side not in ("row", "col"):
                raise ModeMismatch("generic mode admits row/col generators only")
        else:
            if self.side != "cong":
                raise ModeMismatch(f"{self.mode} mode admits congruence generators only")
        bound = self.n if self.side != "col" else self.m
        if not (1 <= self.k <= bound and 1 <= self.l <= bound):
            raise IndexOutOfRange(f"indices ({self.k}, {self.l}) out of range for side {self.side}")
        if self.k == self.l:
            raise IndexOutOfRange("generator indices must differ")


def elem_action(g: ElemGenerator, t, b: MatrixPoint) -> MatrixPoint:
    """Apply exp(t * generator) to a matrix point."""
    if (b.mode, b.n, b.m) != (g.mode, g.n, g.m):
        raise ModeMismatch("generator and matrix live on different spaces")
    t = Fraction(t)
    rows = [list(row) for row in b.entries]
    k, l = g.k - 1, g.l - 1
    if g.side == "col":
        for i in range(b.n):
            rows[i][l] += t * rows[i][k]
    elif g.side == "row":
        source = list(rows[k])
        for j in range(b.m):
            rows[l][j] += t * source[j]
    else:  # congruence: (I + tE_kl) B (I + tE_kl)^T
        source = list(rows[l])
        for j in range(b.m):
            rows[k][j] += t * source[j]
        column = [rows[i][l] for i in range(b.n)]
        for i in range(b.n):
            rows[i][k] += t * column[i]
    return MatrixPoint(b.mode, rows)


# -- entry rings and symbolic matrices ----------------------------------------


@lru_cache(maxsize=None)
def entry_ring(mode: str, n: int, m: int) -> Ring:
    """Polynomial ring on the independent matrix entries."""
    names = []
    if mode == GENERIC:
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                names.append(f"b{i}_{j}")
    elif mode == SYMMETRIC:
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                names.append(f"b{i}_{j}")
    elif mode == SKEW:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                names.append(f"b{i}_{j}")
    else:
        raise ModeMismatch(f"unknown mode {mode!r}")
    return Ring(names)


@lru_cache(maxsize=None)
def variable_matrix(mode: str, n: int, m: int) -> tuple:
    """The generic matrix of the mode, with entries as ring polynomials."""
    ring = entry_ring(mode, n, m)
    grid = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, m + 1):
            if mode == GENERIC:
                row.append(Polynomial.variable(ring, f"b{i}_{j}"))
            elif mode == SYMMETRIC:
                a, b_ = min(i, j), max(i, j)
                row.append(Polynomial.variable(ring, f"b{a}_{b_}"))
            else:  # skew
                if i == j:
                    row.append(Polynomial.zero(ring))
                elif i < j:
                    row.append(Polynomial.variable(ring, f"b{i}_{j}"))
                else:
                    row.append(-Polynomial.variable(ring, f"b{j}_{i}"))
        grid.append(tuple(row))
    return tuple(grid)


def point_values(b: MatrixPoint) -> tuple:
    """Values of the independent entry variables at a matrix point."""
    values = []
    if b.mode == GENERIC:
        for i in range(b.n):
            values.extend(b.entries[i])
    elif b.mode == SYMMETRIC:
        for i in range(b.n):
            values.extend(b.entries[i][i:])
    else:
        for i in range(b.n):
            values.extend(b.entries[i][i + 1 :])
    return tuple(values)


def evaluate_invariant(f: Polynomial, b: MatrixPoint) -> Fraction:
    return f.evaluate(point_values(b))


@lru_cache(maxsize=None)
def generator_derivation(g: ElemGenerator) -> Derivation:
    """The locally nilpotent vector field of the generator on the entry ring.

    Derived symbolically: apply the action with a formal time to the generic
    matrix and take the t-linear coefficient of each independent entry.
    """
    ring = entry_ring(g.mode, g.n, g.m)
    big = ring.extend("_t")

    def lift(p: Polynomial) -> Polynomial:
        return Polynomial(big, {e + (0,): c for e, c in p.terms.items()})

    t = Polynomial.variable(big, "_t")
    grid = [[lift(entry) for entry in row] for row in variable_matrix(g.mode, g.n, g.m)]
    k, l = g.k - 1, g.l - 1
    if g.side == "col":
        for i in range(g.n):
            grid[i][l] = grid[i][l] + t * grid[i][k]
    elif g.side == "row":
        source = list(grid[k])
        for j in range(g.m):
            grid[l][j] = grid[l][j] + t * source[j]
    else:
        source = list(grid[l])
        for j in range(g.m):
            grid[k][j] = grid[k][j] + t * source[j]
        column = [grid[i][l] for i in range(g.n)]
        for i in range(g.n):
            grid[i][k] = grid[i][k] + t * column[i]

    coeffs = []
    if g.mode == GENERIC:
        positions = [(i, j) for i in range(g.n) for j in range(g.m)]
    elif g.mode == SYMMETRIC:
        positions = [(i, j) for i in range(g.n) for j in range(i, g.n)]
    else:
        positions = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)]
    t_index = big.arity - 1
    for (i, j) in positions:
        linear = grid[i][j].partial("_t")
        # evaluate at _t = 0 by dropping terms still containing _t
        terms = {
            e[:-1]: c for e, c in linear.terms.items() if e[t_index] == 0
        }
        coeffs.append(Polynomial(ring, terms))
    return Derivation(ring, coeffs)


@lru_cache(maxsize=None)
def invariant_basis(g: ElemGenerator) -> tuple:
    """The listed invariant functions of the generator, as entry-ring polynomials.

    Generic column generator: entries outside the moving column plus the 2x2
    minors of the (k, l) column pair; row generators transpose this.  The
    congruence generators keep the entries away from the moving index k, the
    analogous 2x2 minors, and (symmetric case) the principal (k, l) minor;
    in the skew case the entry b_kl itself is invariant.
    """
    grid = variable_matrix(g.mode, g.n, g.m)
    k, l = g.k - 1, g.l - 1
    basis: list = []
    if g.side == "col":
        for i in range(g.n):
            for j in range(g.m):
                if j != l:
                    basis.append(grid[i][j])
        for i in range(g.n):
            for j in range(i + 1, g.n):
                basis.append(grid[i][k] * grid[j][l] - grid[j][k] * grid[i][l])
    elif g.side == "row":
        for i in range(g.n):
            for j in range(g.m):
                if i != l:
                    basis.append(grid[i][j])
        for i in range(g.m):
            for j in range(i + 1, g.m):
                basis.append(grid[k][i] * grid[l][j] - grid[k][j] * grid[l][i])
    elif g.mode == SYMMETRIC:
        for i in range(g.n):
            for j in range(i, g.n):
                if i != k and j != k:
                    basis.append(grid[i][j])
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if i != k and j != k:
                    basis.append(grid[i][k] * grid[j][l] - grid[j][k] * grid[i][l])
        basis.append(grid[k][k] * grid[l][l] - grid[k][l] * grid[l][k])
    else:  # skew congruence
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if i != k and j != k:
                    basis.append(grid[i][j])
        basis.append(grid[k][l])
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if i != k and j != k:
                    basis.append(grid[k][i] * grid[l][j] - grid[k][j] * grid[l][i])
    return tuple(p for p in basis if not p.is_zero)


def separating_invariant(g: ElemGenerator, b: MatrixPoint,
                         frozen: Sequence[MatrixPoint] = ()) -> Polynomial:
    """An invariant of the generator equal to 1 at ``b`` and 0 at each frozen point.

    Built as a Lagrange-style product of normalized shifted basis invariants.
    Raises :class:`NotSeparated` when no listed invariant distinguishes ``b``
    from some frozen point.
    """
    ring = entry_ring(g.mode, g.n, g.m)
    result = Polynomial.constant(ring, 1)
    b_values = point_values(b)
    for z in frozen:
        separator = None
        for h in invariant_basis(g):
            at_b = h.evaluate(b_values)
            at_z = evaluate_invariant(h, z)
            if at_b != at_z:
                separator = (h, at_b, at_z)
                break
        if separator is None:
            raise NotSeparated(
                "no listed invariant separates the point from a frozen point",
                frozen=[list(map(str, row)) for row in z.entries],
            )
        h, at_b, at_z = separator
        result = result * (h - Polynomial.constant(ring, at_z)) * (
            Fraction(1) / (at_b - at_z)
        )
    return result
