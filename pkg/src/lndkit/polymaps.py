"""Polynomial self-maps of affine space, Jacobians, and Pfaffians.

A :class:`PolyMap` stores one image polynomial per ring variable and acts on
points by evaluation, so ``compose(F, G)`` is the point map "apply G, then F"
(substitution of G's images into F).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ArityMismatch, NotSkewSymmetric, RingMismatch
from .poly import Polynomial, Ring


class PolyMap:
    """An n-tuple of polynomials over an n-variable ring."""

    __slots__ = ("ring", "images")

    def __init__(self, ring: Ring, images: Sequence[Polynomial]):
        images = tuple(images)
        if len(images) != ring.arity:
            raise ArityMismatch(
                f"{len(images)} images for ring arity {ring.arity}"
            )
        for img in images:
            if img.ring != ring:
                raise RingMismatch("all images of a PolyMap must live in its ring")
        self.ring = ring
        self.images = images

    @classmethod
    def identity(cls, ring: Ring) -> "PolyMap":
        return cls(ring, [Polynomial.variable(ring, v) for v in ring.variables])

    def is_identity(self) -> bool:
        return all(
            img == Polynomial.variable(self.ring, v)
            for img, v in zip(self.images, self.ring.variables)
        )

    def apply(self, point: Sequence[Fraction]) -> tuple:
        """Evaluate the map at an exact rational point."""
        return tuple(img.evaluate(point) for img in self.images)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMap)
            and self.ring == other.ring
            and self.images == other.images
        )

    def __repr__(self) -> str:
        body = ", ".join(str(img) for img in self.images)
        return f"PolyMap({body})"


def compose(outer: PolyMap, inner: PolyMap) -> PolyMap:
    """The map "apply ``inner`` first, then ``outer``" on the shared ring."""
    if outer.ring != inner.ring:
        raise RingMismatch("composed maps must share one ring")
    return PolyMap(
        outer.ring, [img.substitute(inner.images) for img in outer.images]
    )


class PolyMatrix:
    """A rectangular grid of polynomials over one shared ring."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: Ring, entries: Sequence[Sequence[Polynomial]]):
        grid = tuple(tuple(row) for row in entries)
        if not grid or not grid[0]:
            raise ValueError("PolyMatrix must be nonempty")
        cols = len(grid[0])
        for row in grid:
            if len(row) != cols:
                raise ValueError("ragged PolyMatrix")
            for entry in row:
                if entry.ring != ring:
                    raise RingMismatch("all PolyMatrix entries must share one ring")
        self.ring = ring
        self.rows = len(grid)
        self.cols = cols
        self.entries = grid

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.ring == other.ring
            and self.entries == other.entries
        )


def jacobian_matrix(f: PolyMap) -> PolyMatrix:
    """Matrix of partials dF_i/dx_j."""
    ring = f.ring
    return PolyMatrix(
        ring,
        [[img.partial(v) for v in ring.variables] for img in f.images],
    )


def grid_determinant(grid: Sequence[Sequence]):
    """Determinant of a square grid of Fractions or Polynomials.

    Expansion over column subsets (O(n 2^n) multiplications), which beats
    naive cofactor recursion and keeps everything exact.
    """
    n = len(grid)
    for row in grid:
        if len(row) != n:
            raise ArityMismatch("determinant of a non-square matrix")
    # minors[mask] = determinant of rows 0..k-1, columns in mask (popcount k)
    minors = {0: 1}
    for row_index in range(n):
        next_minors = {}
        for mask, minor in minors.items():
            sign = 1
            for col in range(n):
                bit = 1 << col
                if mask & bit:
                    continue
                contrib = grid[row_index][col] * minor * sign
                new_mask = mask | bit
                if new_mask in next_minors:
                    next_minors[new_mask] = next_minors[new_mask] + contrib
                else:
                    next_minors[new_mask] = contrib
                sign = -sign
        minors = next_minors
    return minors[(1 << n) - 1]


def jacobian_det(f: PolyMap) -> Polynomial:
    """Exact Jacobian determinant of a square polynomial map."""
    matrix = jacobian_matrix(f)
    det = grid_determinant(matrix.entries)
    if isinstance(det, (int, Fraction)):
        return Polynomial.constant(f.ring, det)
    return det


def _is_zero_entry(value) -> bool:
    if isinstance(value, Polynomial):
        return value.is_zero
    return value == 0


def pfaffian(grid: Sequence[Sequence]):
    """Pfaffian of a skew-symmetric grid of Fractions or Polynomials.

    Recursive expansion along the first row; the Pfaffian of a matrix of odd
    order is zero by convention.  Raises :class:`NotSkewSymmetric` when the
    input fails ``M[i][j] == -M[j][i]`` or has a nonzero diagonal.
    """
    grid = [list(row) for row in grid]
    n = len(grid)
    for row in grid:
        if len(row) != n:
            raise NotSkewSymmetric("Pfaffian needs a square matrix")
    for i in range(n):
        if not _is_zero_entry(grid[i][i]):
            raise NotSkewSymmetric(f"diagonal entry ({i}, {i}) is nonzero")
        for j in range(i + 1, n):
            if not _is_zero_entry(grid[i][j] + grid[j][i]):
                raise NotSkewSymmetric(f"entries ({i},{j}) and ({j},{i}) are not opposite")
    if n % 2 == 1:
        return _zero_like(grid[0][0]) if n else 0
    return _pfaffian_rec(grid, list(range(n)))


def _zero_like(entry):
    if isinstance(entry, Polynomial):
        return Polynomial.zero(entry.ring)
    return Fraction(0)


def _pfaffian_rec(grid, indices):
    if not indices:
        return 1
    first = indices[0]
    rest = indices[1:]
    total = None
    sign = 1
    for pos, j in enumerate(rest):
        entry = grid[first][j]
        if not _is_zero_entry(entry):
            sub = rest[:pos] + rest[pos + 1 :]
            contrib = entry * _pfaffian_rec(grid, sub) * sign
            total = contrib if total is None else total + contrib
        sign = -sign
    if total is None:
        return _zero_like(grid[first][first])
    return total


def pfaffian_matrix(m: PolyMatrix) -> Polynomial:
    """Pfaffian of a PolyMatrix, returned as a Polynomial."""
    result = pfaffian(m.entries)
    if isinstance(result, (int, Fraction)):
        return Polynomial.constant(m.ring, result)
    return result
