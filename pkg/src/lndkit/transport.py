"""Certified collective transport of matrix collections by elementary replicas.

The solver moves several matrices simultaneously: each elementary step is
upgraded to a replica whose coefficient is an invariant of the generator
equal to the wanted parameter at the moving matrix and zero at every matrix
already in place, so placed matrices never move again.

Per-move strategy: an exact elimination plan (mode-specific) is computed for
the moving matrix and executed step by step; when an invariant fails to
separate a position from a frozen matrix, seeded random frozen-fixing
pre-moves are inserted and the remaining plan is recomputed from the new
position.  Failures after the retry budget surface as
:class:`SeparationFailure` - never as a wrong certificate.

Completeness caveat: over the rationals the symmetric congruence orbit data
is finer than (rank, det); the symmetric planner relies on an exact
representation search with no theoretical bound, so some inputs that are
equivalent over an algebraically closed field are reported as failures.
Round-trip instances (targets produced from sources by replica words) carry
rational witnesses and are the supported workload.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    ArityMismatch,
    DuplicatePoint,
    ModeMismatch,
    NotSeparated,
    SeparationFailure,
    SignatureMismatch,
    UnsupportedStratum,
)
from .flows import in_kernel
from .linalg import _diag_pair_factors, sl_factor_transvections
from .matrixvars import (
    GENERIC,
    SKEW,
    SYMMETRIC,
    ElemGenerator,
    MatrixPoint,
    elem_action,
    evaluate_invariant,
    generator_derivation,
    separating_invariant,
    signature,
)
from .poly import Polynomial
from .quadforms import represent_binary, ternary_isotropic

DEFAULT_RETRY_BUDGET = 32
DEFAULT_WORD_CAP = 10_000


@dataclass(frozen=True)
class ElemReplica:
    """One word letter: exp(time * coeff * generator-field)."""

    generator: ElemGenerator
    coeff: Polynomial
    time: Fraction


def replica_apply(step: ElemReplica, b: MatrixPoint) -> MatrixPoint:
    """Apply the replica to a point: an elementary step with parameter
    time * coeff(b) (the coefficient is constant along the flow)."""
    parameter = step.time * evaluate_invariant(step.coeff, b)
    if parameter == 0:
        return b
    return elem_action(step.generator, parameter, b)


def word_apply_matrices(word: Sequence[ElemReplica], b: MatrixPoint) -> MatrixPoint:
    """Apply a replica word in list order (first letter acts first)."""
    for step in word:
        b = replica_apply(step, b)
    return b


@dataclass
class TransportCertificate:
    sources: tuple
    targets: tuple
    word: tuple
    verified: bool


def verify(cert: TransportCertificate) -> bool:
    """Independent re-check: every coefficient is a kernel element of its
    generator's derivation, and the word maps each source onto its target."""
    for step in cert.word:
        derivation = generator_derivation(step.generator)
        if not in_kernel(derivation, step.coeff):
            return False
    for source, target in zip(cert.sources, cert.targets):
        if word_apply_matrices(cert.word, source) != target:
            return False
    return True


# -- plans ---------------------------------------------------------------------
#
# A plan op is (side, k, l, t) with the generator's 1-based index convention:
#   row:  row l += t * row k       col:  col l += t * col k
#   cong: row/col k += t * row/col l


@dataclass(frozen=True)
class PlanOp:
    side: str
    k: int
    l: int
    t: Fraction


class _PlannerFailure(Exception):
    """Internal: the mode planner could not produce an exact path."""


def _op_row_add(dest: int, src: int, t) -> PlanOp:
    """row dest += t * row src (0-based arguments)."""
    return PlanOp("row", src + 1, dest + 1, Fraction(t))


def _op_col_add(dest: int, src: int, t) -> PlanOp:
    return PlanOp("col", src + 1, dest + 1, Fraction(t))


def _op_cong_add(dest: int, src: int, t) -> PlanOp:
    return PlanOp("cong", dest + 1, src + 1, Fraction(t))


def _pair_scaling_ops(kind: str, i: int, j: int, c: Fraction) -> list:
    """Ops realizing diag(c at i, 1/c at j) on rows, columns, or by congruence.

    The four transvection factors multiply left-to-right to the diagonal
    matrix; the application order depends on whether steps accumulate on the
    left (rows, congruence) or the right (columns).
    """
    factors = _diag_pair_factors(i, j, c)
    if not factors:
        return []
    if kind == "col":
        return [_op_col_add(beta, alpha, t) for (alpha, beta, t) in factors]
    ordered = list(reversed(factors))
    if kind == "row":
        return [_op_row_add(alpha, beta, t) for (alpha, beta, t) in ordered]
    return [_op_cong_add(alpha, beta, t) for (alpha, beta, t) in ordered]


def _apply_plan_op(op: PlanOp, b: MatrixPoint) -> MatrixPoint:
    g = ElemGenerator(b.mode, b.n, b.m, op.side, op.k, op.l)
    return elem_action(g, op.t, b)


def _plan_path(ops_there: list, ops_back: list) -> list:
    """Splice: follow ops_there, then ops_back reversed with negated times."""
    return ops_there + [
        PlanOp(op.side, op.k, op.l, -op.t) for op in reversed(ops_back)
    ]


# -- generic mode ----------------------------------------------------------------


def _reduce_generic(b: MatrixPoint) -> tuple:
    """Ops carrying the matrix to rank normal form (last pivot holds the
    determinant when square and invertible)."""
    ops: list = []
    w = b

    def do(op: PlanOp) -> None:
        nonlocal w
        if op.t == 0:
            return
        w = _apply_plan_op(op, w)
        ops.append(op)

    n, m = b.n, b.m
    r = 0
    for d in range(min(n, m)):
        pos = None
        for i in range(d, n):
            for j in range(d, m):
                if w.entries[i][j] != 0:
                    pos = (i, j)
                    break
            if pos:
                break
        if pos is None:
            break
        i, j = pos
        if w.entries[d][d] == 0:
            if j == d:
                do(_op_row_add(d, i, 1))
            else:
                if i != d:
                    do(_op_row_add(d, i, 1))
                do(_op_col_add(d, j, 1))
        pivot = w.entries[d][d]
        for i2 in range(n):
            if i2 != d and w.entries[i2][d] != 0:
                do(_op_row_add(i2, d, -w.entries[i2][d] / pivot))
        for j2 in range(m):
            if j2 != d and w.entries[d][j2] != 0:
                do(_op_col_add(j2, d, -w.entries[d][j2] / pivot))
        r += 1

    if r > 0:
        if r < n:
            spare = n - 1
            for i in range(r):
                d_i = w.entries[i][i]
                if d_i != 1:
                    for op in _pair_scaling_ops("row", i, spare, 1 / d_i):
                        do(op)
        elif r < m:
            spare = m - 1
            for j in range(r):
                d_j = w.entries[j][j]
                if d_j != 1:
                    for op in _pair_scaling_ops("col", j, spare, 1 / d_j):
                        do(op)
        else:
            for i in range(n - 1):
                d_i = w.entries[i][i]
                if d_i != 1:
                    for op in _pair_scaling_ops("row", i, i + 1, 1 / d_i):
                        do(op)
    return ops, w


def _random_preops(b: MatrixPoint, rng, attempt: int) -> tuple:
    """Random opening ops used on retries to route the plan off a bad path."""
    ops: list = []
    if attempt > 0:
        for _ in range(attempt % 3 + 1):
            if b.mode == GENERIC:
                if rng.random() < 0.5:
                    i, j = rng.sample(range(b.n), 2)
                    op = _op_row_add(i, j, rng.choice(_SMALL_SCALES))
                else:
                    i, j = rng.sample(range(b.m), 2)
                    op = _op_col_add(i, j, rng.choice(_SMALL_SCALES))
            else:
                i, j = rng.sample(range(b.n), 2)
                op = _op_cong_add(i, j, rng.choice(_SMALL_SCALES))
            b = _apply_plan_op(op, b)
            ops.append(op)
    return ops, b


def _plan_generic(source: MatrixPoint, target: MatrixPoint, rng, attempt: int) -> list:
    pre_s, source = _random_preops(source, rng, attempt)
    pre_t, target = _random_preops(target, rng, attempt)
    ops_s, nf_s = _reduce_generic(source)
    ops_t, nf_t = _reduce_generic(target)
    if nf_s != nf_t:
        raise _PlannerFailure("normal forms differ")
    return _plan_path(pre_s + ops_s, pre_t + ops_t)


# -- skew mode -------------------------------------------------------------------


def _reduce_skew(b: MatrixPoint, rng=None) -> tuple:
    """Congruence ops to the block normal form J(1) + ... + J(1) + J(pf) + 0.

    With an rng the cleanup order is shuffled; retries use this to route
    around frozen matrices that sit next to the normal form.
    """
    ops: list = []
    w = b

    def do(op: PlanOp) -> None:
        nonlocal w
        if op.t == 0:
            return
        w = _apply_plan_op(op, w)
        ops.append(op)

    n = b.n
    a = 0
    blocks = 0
    while a + 1 < n:
        pos = None
        for i in range(a, n):
            for j in range(i + 1, n):
                if w.entries[i][j] != 0:
                    pos = (i, j)
                    break
            if pos:
                break
        if pos is None:
            break
        d1, d2 = a, a + 1
        if w.entries[d1][d2] == 0:
            i, j = pos
            if i != d1:
                do(_op_cong_add(d1, i, 1))
            column = next(
                c for c in range(a, n) if c != d1 and w.entries[d1][c] != 0
            )
            if column != d2:
                do(_op_cong_add(d2, column, 1))
        v = w.entries[d1][d2]
        cleanup = []
        for x in range(a, n):
            if x in (d1, d2):
                continue
            cleanup.append((x, d2, d1))  # clears entry (d1, x) using d2
            cleanup.append((x, d1, d2))  # clears entry (d2, x) using d1
        if rng is not None:
            rng.shuffle(cleanup)
        for (x, src, row) in cleanup:
            value = w.entries[row][x]
            if value != 0:
                sign = Fraction(-1) if row == d1 else Fraction(1)
                do(_op_cong_add(x, src, sign * value / v))
        a += 2
        blocks += 1

    if blocks:
        if 2 * blocks < n:
            spare = n - 1
            for bidx in range(blocks):
                v = w.entries[2 * bidx][2 * bidx + 1]
                if v != 1:
                    for op in _pair_scaling_ops("cong", 2 * bidx, spare, 1 / v):
                        do(op)
        else:
            for bidx in range(blocks - 1):
                v = w.entries[2 * bidx][2 * bidx + 1]
                if v != 1:
                    for op in _pair_scaling_ops("cong", 2 * bidx, 2 * bidx + 2, 1 / v):
                        do(op)
    return ops, w


def _skew3_moves() -> list:
    """For 3x3 skew matrices (a 3-dim space), each congruence generator
    adds a multiple of one independent coordinate to another.  Probed once:
    entries are (op-builder args, source position, dest position, sign)."""
    moves = []
    positions = [(0, 1), (0, 2), (1, 2)]
    for k in range(3):
        for l in range(3):
            if k == l:
                continue
            for s_idx, (si, sj) in enumerate(positions):
                basis = [[Fraction(0)] * 3 for _ in range(3)]
                basis[si][sj] = Fraction(1)
                basis[sj][si] = Fraction(-1)
                before = MatrixPoint(SKEW, basis)
                after = _apply_plan_op(_op_cong_add(k, l, 1), before)
                for d_idx, (di, dj) in enumerate(positions):
                    if d_idx == s_idx:
                        continue
                    delta = after.entries[di][dj] - before.entries[di][dj]
                    if delta != 0:
                        moves.append(((k, l), s_idx, d_idx, delta))
    return moves


_SKEW3_MOVES = _skew3_moves()
_SKEW3_POSITIONS = ((0, 1), (0, 2), (1, 2))


def _plan_skew3(source: MatrixPoint, target: MatrixPoint, rng, attempt: int) -> list:
    """Direct coordinate matching on the 3-dim skew space.

    Avoids routing through the block normal form (which may sit next to a
    frozen matrix): coordinates are matched greedily with exact times, with
    randomized inflation steps when every mismatched coordinate has only
    zero sources."""
    work = [source.entries[i][j] for (i, j) in _SKEW3_POSITIONS]
    goal = [target.entries[i][j] for (i, j) in _SKEW3_POSITIONS]
    ops: list = []
    moves = list(_SKEW3_MOVES)
    for _ in range(40):
        if work == goal:
            return ops
        rng.shuffle(moves)
        progress = False
        for ((k, l), s_idx, d_idx, sign) in moves:
            if work[d_idx] != goal[d_idx] and work[s_idx] != 0:
                t = (goal[d_idx] - work[d_idx]) / (sign * work[s_idx])
                ops.append(_op_cong_add(k, l, t))
                work[d_idx] = goal[d_idx]
                progress = True
                break
        if progress:
            continue
        # every mismatched coordinate lacks a nonzero source: inflate one
        # matched coordinate from any nonzero one (re-fixed later)
        inflated = False
        for ((k, l), s_idx, d_idx, sign) in moves:
            if work[s_idx] != 0:
                t = rng.choice(_SMALL_SCALES)
                ops.append(_op_cong_add(k, l, t))
                work[d_idx] = work[d_idx] + sign * t * work[s_idx]
                inflated = True
                break
        if not inflated:
            break  # the zero matrix is fixed by every congruence
    if work != goal:
        raise _PlannerFailure("skew coordinate matching did not converge")
    return ops


def _plan_skew(source: MatrixPoint, target: MatrixPoint, rng, attempt: int) -> list:
    if source.n == 3:
        return _plan_skew3(source, target, rng, attempt)
    pre_s, source = _random_preops(source, rng, attempt)
    pre_t, target = _random_preops(target, rng, attempt)
    shuffle = rng if attempt > 0 else None
    ops_s, nf_s = _reduce_skew(source, shuffle)
    ops_t, nf_t = _reduce_skew(target, shuffle)
    if nf_s != nf_t:
        raise _PlannerFailure("normal forms differ")
    return _plan_path(pre_s + ops_s, pre_t + ops_t)


# -- symmetric mode ---------------------------------------------------------------


_SMALL_SCALES = [Fraction(s) for s in (1, -1, 2, -2)] + [
    Fraction(1, 2), Fraction(-1, 2), Fraction(3), Fraction(-3),
    Fraction(1, 3), Fraction(-1, 3), Fraction(3, 2), Fraction(-3, 2),
    Fraction(2, 3), Fraction(-2, 3),
]

_WITNESS_HEIGHTS = [Fraction(0)] + _SMALL_SCALES + [
    Fraction(4), Fraction(-4), Fraction(1, 4), Fraction(-1, 4),
    Fraction(5), Fraction(-5), Fraction(5, 2), Fraction(-5, 2),
    Fraction(2, 5), Fraction(-2, 5), Fraction(4, 3), Fraction(-4, 3),
    Fraction(3, 4), Fraction(-3, 4),
]


def _quadratic_value(w: MatrixPoint, support: Sequence[int], coeffs: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for a, (i, ci) in enumerate(zip(support, coeffs)):
        total += ci * ci * w.entries[i][i]
        for (j, cj) in list(zip(support, coeffs))[a + 1 :]:
            total += 2 * ci * cj * w.entries[i][j]
    return total


def _bilinear(w: MatrixPoint, x: dict, j: int) -> Fraction:
    """The bilinear pairing B(x, e_j) = (W x)_j."""
    return sum((c * w.entries[i][j] for i, c in x.items()), Fraction(0))


def _form_value(w: MatrixPoint, x: dict) -> Fraction:
    total = Fraction(0)
    items = list(x.items())
    for a, (i, ci) in enumerate(items):
        total += ci * ci * w.entries[i][i]
        for (j, cj) in items[a + 1 :]:
            total += 2 * ci * cj * w.entries[i][j]
    return total


def _is_rational_square(q: Fraction):
    if q < 0:
        return None
    import math

    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _diagonalize_congruence(w: MatrixPoint, active: Sequence[int]) -> tuple:
    """Congruence-diagonalize the active block: returns (P, diag) with
    P * W_active * P^T diagonal.  P need not be special linear; it is used
    only to pull isotropic witnesses back to the original coordinates."""
    r = len(active)
    a = [[w.entries[i][j] for j in active] for i in active]
    p = [[Fraction(1 if i == j else 0) for j in range(r)] for i in range(r)]

    def row_op(dest, src, t):
        for col in range(r):
            a[dest][col] += t * a[src][col]
        for col in range(r):
            p[dest][col] += t * p[src][col]

    def col_op(dest, src, t):
        for row in range(r):
            a[row][dest] += t * a[row][src]

    for d in range(r):
        if a[d][d] == 0:
            pivot = next((e for e in range(d + 1, r) if a[e][e] != 0), None)
            if pivot is not None:
                row_op(d, pivot, Fraction(1))
                col_op(d, pivot, Fraction(1))
            else:
                # mix rows below into d until the pivot fills (each mix is a
                # valid congruence, so failed tries are harmless)
                for e in range(d, r):
                    for f in range(e + 1, r):
                        if a[e][f] == 0 and a[d][e] == 0 and a[d][f] == 0:
                            continue
                        if e != d:
                            row_op(d, e, Fraction(1))
                            col_op(d, e, Fraction(1))
                        if a[d][d] == 0 and a[d][f] != 0:
                            row_op(d, f, Fraction(1))
                            col_op(d, f, Fraction(1))
                        if a[d][d] != 0:
                            break
                    if a[d][d] != 0:
                        break
        if a[d][d] == 0:
            continue
        for e in range(d + 1, r):
            if a[e][d] != 0:
                t = -a[e][d] / a[d][d]
                row_op(e, d, t)
                col_op(e, d, t)
    return p, [a[i][i] for i in range(r)]


def _isotropic_witness(w: MatrixPoint, active: Sequence[int]) -> dict | None:
    """A nonzero vector with q(x) = 0, if one is findable.

    Works in diagonalized coordinates, where isotropy reduces to exact
    square tests:  d_i x^2 + d_j y^2 = 0  and  d_i x^2 + d_j y^2 = -d_k.
    """
    for i in active:
        if w.entries[i][i] == 0:
            return {i: Fraction(1)}
    p, diag = _diagonalize_congruence(w, active)
    r = len(active)

    def pull_back(u_local: dict) -> dict | None:
        # q(W) at P^T y equals the diagonal form at y
        x = {}
        for local, c in u_local.items():
            for col in range(r):
                if p[local][col] != 0:
                    idx = active[col]
                    x[idx] = x.get(idx, Fraction(0)) + c * p[local][col]
        x = {i: c for i, c in x.items() if c != 0}
        return x or None

    for local in range(r):
        if diag[local] == 0:
            return pull_back({local: Fraction(1)})
    for i in range(r):
        for j in range(i + 1, r):
            ratio = -diag[i] / diag[j]
            root = _is_rational_square(ratio)
            if root is not None and root != 0:
                return pull_back({i: Fraction(1), j: root})
    # exact ternary isotropy on diagonal triples (Legendre equation)
    for triple in combinations(range(r), 3):
        i, j, k = triple
        sol = ternary_isotropic(diag[i], diag[j], diag[k])
        if sol is not None:
            witness = {
                idx: val for idx, val in zip(triple, sol) if val != 0
            }
            return pull_back(witness)
    return None


def _represent_in_form(w: MatrixPoint, active: Sequence[int], target: Fraction) -> dict | None:
    """An exact witness x with q_W(x) = target, through diagonalization.

    Complete for blocks of rank <= 2 (Legendre reduction); for larger blocks
    tries two-variable sub-forms and a bounded sweep of a third coordinate.
    """
    p, diag = _diagonalize_congruence(w, active)
    r = len(active)

    def pull_back(u_local: dict) -> dict | None:
        x: dict = {}
        for local, c in u_local.items():
            for col in range(r):
                if p[local][col] != 0:
                    idx = active[col]
                    x[idx] = x.get(idx, Fraction(0)) + c * p[local][col]
        x = {i: c for i, c in x.items() if c != 0}
        return x or None

    support = [i for i in range(r) if diag[i] != 0]
    for i in support:
        root = _is_rational_square(target / diag[i])
        if root is not None and root != 0:
            return pull_back({i: root})
    for a_idx in range(len(support)):
        for b_idx in range(a_idx + 1, len(support)):
            i, j = support[a_idx], support[b_idx]
            pair = represent_binary(diag[i], diag[j], target)
            if pair is not None:
                witness = {}
                if pair[0] != 0:
                    witness[i] = pair[0]
                if pair[1] != 0:
                    witness[j] = pair[1]
                if witness:
                    return pull_back(witness)
    if len(support) >= 3:
        sweep = [Fraction(v) for v in (1, -1, 2, -2)] + [Fraction(1, 2), Fraction(3)]
        for k in support:
            for t in sweep:
                rest = target - diag[k] * t * t
                if rest == 0:
                    continue
                for a_idx in range(len(support)):
                    for b_idx in range(a_idx + 1, len(support)):
                        i, j = support[a_idx], support[b_idx]
                        if k in (i, j):
                            continue
                        pair = represent_binary(diag[i], diag[j], rest)
                        if pair is not None:
                            witness = {k: t}
                            if pair[0] != 0:
                                witness[i] = pair[0]
                            if pair[1] != 0:
                                witness[j] = pair[1]
                            return pull_back(witness)
    return None


def _represent_via_isotropic(w: MatrixPoint, active: Sequence[int], u: dict,
                             target: Fraction) -> dict | None:
    """Represent any value using an isotropic vector: q(s*u + v) is linear in s."""
    v_index = next(
        (j for j in active if _bilinear(w, u, j) != 0 and j not in u), None
    )
    if v_index is None:
        v_index = next((j for j in active if _bilinear(w, u, j) != 0), None)
    if v_index is None:
        return None  # u lies in the radical of the active block
    b = _bilinear(w, u, v_index)
    q_v = w.entries[v_index][v_index]
    s = (target - q_v) / (2 * b)
    x = {v_index: Fraction(1)}
    for i, c in u.items():
        x[i] = x.get(i, Fraction(0)) + s * c
    return {i: c for i, c in x.items() if c != 0} or None


def _value_table(w: MatrixPoint, active: Sequence[int], cap: int = 9000) -> dict:
    """Nonzero values of the quadratic form at small-height vectors.

    Maps value -> witness {index: coefficient}; enumeration is ordered by
    witness complexity so the first recorded witness is the simplest.
    """
    table: dict = {}

    def record(support, coeffs) -> None:
        value = _quadratic_value(w, support, coeffs)
        if value != 0 and value not in table:
            table[value] = {i: c for i, c in zip(support, coeffs) if c != 0}

    for i in active:
        for s in _WITNESS_HEIGHTS[1:]:
            record((i,), (s,))
    pairs = list(combinations(active, 2))
    for s in _WITNESS_HEIGHTS[1:]:
        for t in _WITNESS_HEIGHTS[1:]:
            for (i, j) in pairs:
                record((i, j), (s, t))
                if len(table) >= cap:
                    return table
    coarse = _WITNESS_HEIGHTS[1:9]
    for support in combinations(active, min(3, len(active))):
        if len(support) < 3:
            continue
        for s in coarse:
            for t in coarse:
                for u in coarse:
                    record(support, (s, t, u))
                    if len(table) >= cap:
                        return table
    return table


def _congruence_by_matrix(active: Sequence[int], f_local: list) -> list:
    """Congruence ops realizing W -> F W F^T for F in SL on the active indices.

    The transvection factors of F multiply left-to-right; congruence steps
    accumulate on the left, so the factors are applied in reverse.
    """
    factors = sl_factor_transvections(f_local)
    ops = []
    for (j, mu, c) in reversed(factors):
        ops.append(_op_cong_add(active[j], active[mu], c))
    return ops


def _entry_size(value: Fraction) -> int:
    return value.numerator.bit_length() + value.denominator.bit_length()


def _matrix_size(w: MatrixPoint) -> int:
    return sum(_entry_size(x) for row in w.entries for x in row)


def _size_reduction_ops(w: MatrixPoint, cap: int = 400, indices: Sequence[int] | None = None) -> tuple:
    """Greedy congruence size reduction (Gauss-style) of a symmetric matrix.

    Congruence preserves the determinant, so forms reached through large
    replica words still have small invariants and admit small reduced
    representatives; this hill-climb recovers one, which keeps the
    common-value search on comparable magnitudes.  With ``indices`` the
    mixing is restricted to those rows/columns.
    """
    ops: list = []
    scope = list(indices) if indices is not None else list(range(w.n))
    size = _matrix_size(w)
    for _ in range(cap):
        best = None
        for i in scope:
            for j in scope:
                if i == j:
                    continue
                candidates = [Fraction(1), Fraction(-1)]
                if w.entries[j][j] != 0:
                    mu = Fraction(round(w.entries[i][j] / w.entries[j][j]))
                    if mu != 0:
                        candidates.extend([-mu, -mu + 1, -mu - 1])
                for t in candidates:
                    if t == 0:
                        continue
                    probe = _apply_plan_op(_op_cong_add(i, j, t), w)
                    probe_size = _matrix_size(probe)
                    if probe_size < size and (best is None or probe_size < best[0]):
                        best = (probe_size, _op_cong_add(i, j, t), probe)
        if best is None:
            break
        size, op, w = best
        ops.append(op)
    return ops, w


def _corner_matching_ops(w: MatrixPoint, active: list, x: dict) -> list:
    """Ops making the (alpha, alpha) entry equal to the value of the form at x.

    Builds F in SL(active) whose alpha-row is x, completes with unit rows,
    and corrects the determinant on a non-alpha row.
    """
    r = len(active)
    local = {idx: pos for pos, idx in enumerate(active)}
    x_local = [Fraction(0)] * r
    for idx, c in x.items():
        x_local[local[idx]] = c
    pivot = next(pos for pos in range(r) if x_local[pos] != 0)
    rows = [x_local]
    for pos in range(r):
        if pos == pivot:
            continue
        rows.append([Fraction(1 if q == pos else 0) for q in range(r)])
    # determinant is +-x_local[pivot]; sign from the permutation of unit rows
    from .linalg import det as rational_det

    d = rational_det(rows)
    if d != 1:
        # scale a unit row (never the first) to fix the determinant
        rows[1] = [v / d for v in rows[1]]
    return _congruence_by_matrix(active, rows)


def _choose_corner(w: MatrixPoint, v: MatrixPoint, active: list, alpha: int) -> tuple:
    """Pick a common corner value for both sides with explicit witnesses.

    Returns (value, x_or_None, y_or_None) where x drives w's corner to the
    value and y drives v's (None means the corner already matches).  An
    isotropic vector on either side makes any value reachable there in
    closed form, which bridges arbitrary magnitude gaps between the sides;
    with none visible, the small-witness value tables must intersect.
    """
    c_w, c_v = w.entries[alpha][alpha], v.entries[alpha][alpha]
    iso_v = _isotropic_witness(v, active)
    if iso_v is not None:
        value = c_w
        x = None
        if value == 0:
            table = _value_table(w, active, cap=400)
            if table:
                value, x = next(iter(table.items()))
        if value != 0:
            y = None if c_v == value else _represent_via_isotropic(v, active, iso_v, value)
            if c_v == value or y is not None:
                return value, x, y
    iso_w = _isotropic_witness(w, active)
    if iso_w is not None:
        value = c_v
        y = None
        if value == 0:
            table = _value_table(v, active, cap=400)
            if table:
                value, y = next(iter(table.items()))
        if value != 0:
            x = None if c_w == value else _represent_via_isotropic(w, active, iso_w, value)
            if c_w == value or x is not None:
                return value, x, y
    # exact representation (Legendre reduction), preferring the small corner
    if c_w != 0:
        y = _represent_in_form(v, active, c_w)
        if y is not None:
            return c_w, None, y
    if c_v != 0:
        x = _represent_in_form(w, active, c_v)
        if x is not None:
            return c_v, x, None
    w_table = _value_table(w, active)
    for value, y in _value_table(v, active).items():
        if value in w_table:
            x = None if c_w == value else w_table[value]
            y = None if c_v == value else y
            return value, x, y
    raise _PlannerFailure("no common represented value found")


def _plan_symmetric(source: MatrixPoint, target: MatrixPoint, rng, attempt: int) -> list:
    """Congruence matching by Witt-style recursion on a common pivot value.

    At each level both sides are driven to share a corner value that each
    form visibly represents (a common entry of their small-witness value
    tables), then the pivot row/column is isolated on both sides and the
    recursion descends; the target-side ops are emitted inverted at the end.
    Later attempts shuffle both sides with random congruences to
    re-randomize the value tables.  The search has no theoretical bound;
    exhaustion surfaces as a planner failure and, eventually,
    SeparationFailure.
    """
    n = source.n
    w, v = source, target
    ops_w: list = []
    ops_v: list = []

    def do_w(op: PlanOp) -> None:
        nonlocal w
        if op.t != 0:
            w = _apply_plan_op(op, w)
            ops_w.append(op)

    def do_v(op: PlanOp) -> None:
        nonlocal v
        if op.t != 0:
            v = _apply_plan_op(op, v)
            ops_v.append(op)

    if attempt > 0:
        for _ in range(attempt % 3 + 1):
            i, j = rng.sample(range(n), 2)
            do_w(_op_cong_add(i, j, rng.choice(_SMALL_SCALES)))
            i, j = rng.sample(range(n), 2)
            do_v(_op_cong_add(i, j, rng.choice(_SMALL_SCALES)))

    for op in _size_reduction_ops(w)[0]:
        do_w(op)
    for op in _size_reduction_ops(v)[0]:
        do_v(op)

    active = list(range(n))
    while active:
        alpha = active[0]
        v_zero = all(v.entries[i][j] == 0 for i in active for j in active)
        w_zero = all(w.entries[i][j] == 0 for i in active for j in active)
        if v_zero and w_zero:
            break
        if v_zero != w_zero:
            raise _PlannerFailure("active blocks have different ranks")

        corner = w.entries[alpha][alpha]
        if corner == 0 or corner != v.entries[alpha][alpha]:
            if len(active) == 1:
                raise _PlannerFailure("final entries differ")
            ordered = [alpha] + [i for i in active if i != alpha]
            corner, x, y = _choose_corner(w, v, active, alpha)
            if x is not None:
                for op in _corner_matching_ops(w, ordered, x):
                    do_w(op)
            if y is not None:
                for op in _corner_matching_ops(v, ordered, y):
                    do_v(op)
        if w.entries[alpha][alpha] != corner or v.entries[alpha][alpha] != corner:
            raise _PlannerFailure("corner matching failed")
        for i in active:
            if i == alpha:
                continue
            if w.entries[i][alpha] != 0:
                do_w(_op_cong_add(i, alpha, -w.entries[i][alpha] / corner))
            if v.entries[i][alpha] != 0:
                do_v(_op_cong_add(i, alpha, -v.entries[i][alpha] / corner))
        active = active[1:]
        # keep magnitudes tame for the deeper levels (corner matches can
        # square entry sizes)
        if len(active) > 1:
            for op in _size_reduction_ops(w, cap=60, indices=active)[0]:
                do_w(op)
            for op in _size_reduction_ops(v, cap=60, indices=active)[0]:
                do_v(op)

    if w != v:
        raise _PlannerFailure("reduction did not converge")
    return _plan_path(ops_w, ops_v)


_PLANNERS = {
    GENERIC: _plan_generic,
    SKEW: _plan_skew,
    SYMMETRIC: _plan_symmetric,
}


# -- the solver --------------------------------------------------------------------


def _random_generator(mode: str, n: int, m: int, rng) -> ElemGenerator:
    if mode == GENERIC:
        side = rng.choice(["row", "col"])
        bound = n if side == "row" else m
    else:
        side = "cong"
        bound = n
    k = rng.randrange(1, bound + 1)
    l = rng.randrange(1, bound + 1)
    while l == k:
        l = rng.randrange(1, bound + 1)
    return ElemGenerator(mode, n, m, side, k, l)


def _separating_coeff(g: ElemGenerator, mover: MatrixPoint, hard: list, soft: list):
    """Invariant of g equal to 1 at the mover and 0 on the frozen matrices.

    The hard set (matrices already in place) is mandatory; soft points
    (matrices not yet moved, frozen only to keep their entries small) are
    dropped one by one when no listed invariant separates them."""
    kept = list(soft)
    while True:
        try:
            return separating_invariant(g, mover, hard + kept)
        except NotSeparated:
            if not kept:
                raise
            for pos, z in enumerate(kept):
                try:
                    separating_invariant(g, mover, [z])
                except NotSeparated:
                    kept.pop(pos)
                    break
            else:
                raise


def _premove(current: list, index: int, hard: list, word: list, rng) -> bool:
    """Insert one random replica fixing the hard frozen matrices and moving
    the indexed matrix off its position.  Returns False when none was found.

    The coefficient is normalized at the moving matrix, so the effective
    elementary parameter is exactly the chosen small time and entry growth
    stays tame across retries."""
    mode, n, m = current[index].shape()
    moving = current[index]
    soft = [
        b for j, b in enumerate(current)
        if j != index and b not in hard
    ]
    for _ in range(24):
        g = _random_generator(mode, n, m, rng)
        try:
            coeff = _separating_coeff(g, moving, hard, soft)
        except NotSeparated:
            continue
        time = rng.choice(_SMALL_SCALES)
        step = ElemReplica(g, coeff, time)
        moved = replica_apply(step, moving)
        if moved == moving:
            continue
        for j, b in enumerate(current):
            current[j] = replica_apply(step, b)
        word.append(step)
        return True
    return False


def transport(sources: Sequence[MatrixPoint], targets: Sequence[MatrixPoint],
              seed: int = 0, retry_budget: int = DEFAULT_RETRY_BUDGET,
              word_cap: int = DEFAULT_WORD_CAP) -> TransportCertificate:
    """Find a verified replica word carrying each source onto its target.

    Preconditions per the transport theorems: equal-length collections of
    pairwise-distinct matrices on one ambient space with matching signatures
    (rank; det for square generic and symmetric; Pfaffian for skew), and rank
    at least 2 everywhere in symmetric mode.
    """
    sources = [s if isinstance(s, MatrixPoint) else MatrixPoint(*s) for s in sources]
    targets = [t if isinstance(t, MatrixPoint) else MatrixPoint(*t) for t in targets]
    if len(sources) != len(targets):
        raise ArityMismatch("source and target collections differ in length")
    if not sources:
        return TransportCertificate((), (), (), True)
    shape = sources[0].shape()
    for b in sources + targets:
        if b.shape() != shape:
            raise ModeMismatch("all matrices must share one ambient space")
    if len(set(sources)) != len(sources):
        raise DuplicatePoint("sources are not pairwise distinct")
    if len(set(targets)) != len(targets):
        raise DuplicatePoint("targets are not pairwise distinct")
    mode, n, m = shape
    for idx, (s, t) in enumerate(zip(sources, targets)):
        sig_s, sig_t = signature(s), signature(t)
        if sig_s != sig_t:
            raise SignatureMismatch(
                f"pair {idx} has signatures {sig_s} vs {sig_t}", index=idx
            )
        if mode == SYMMETRIC and sig_s.rank < 2:
            raise UnsupportedStratum(
                f"pair {idx} has rank {sig_s.rank} < 2 in symmetric mode", index=idx
            )

    rng = random.Random(seed)
    planner = _PLANNERS[mode]
    current = list(sources)
    word: list = []

    for i in range(len(sources)):
        hard = targets[:i]
        attempt = 0
        # A not-yet-moved matrix parked exactly on this move's target would
        # collide with the landing step; nudge it away first.
        for j in range(i + 1, len(current)):
            guard = 0
            while current[j] == targets[i]:
                guard += 1
                if guard > retry_budget:
                    raise SeparationFailure(
                        f"could not clear matrix {j} off the target of matrix {i}",
                        index=i,
                    )
                _premove(current, j, hard, word, rng)
        while current[i] != targets[i]:
            if attempt > retry_budget:
                raise SeparationFailure(
                    f"retry budget exhausted while moving matrix {i}", index=i
                )
            try:
                plan = planner(current[i], targets[i], rng, attempt)
                for op in plan:
                    if op.t == 0:
                        continue
                    g = ElemGenerator(mode, n, m, op.side, op.k, op.l)
                    soft = [
                        b for j, b in enumerate(current)
                        if j != i and b not in hard and b != targets[i]
                    ]
                    coeff = _separating_coeff(g, current[i], hard, soft)
                    step = ElemReplica(g, coeff, op.t)
                    for j, b in enumerate(current):
                        current[j] = replica_apply(step, b)
                    word.append(step)
                    if len(word) > word_cap:
                        raise SeparationFailure(
                            f"word cap {word_cap} exceeded while moving matrix {i}",
                            index=i,
                        )
            except (_PlannerFailure, NotSeparated):
                _premove(current, i, hard, word, rng)
                attempt += 1
                continue
            if current[i] != targets[i]:
                raise AssertionError(
                    "internal error: plan executed but the matrix missed its target"
                )

    cert = TransportCertificate(
        tuple(sources), tuple(targets), tuple(word), verified=False
    )
    cert.verified = verify(cert)
    if not cert.verified:
        raise AssertionError("internal error: produced certificate failed verification")
    return cert
