"""Exact rational linear algebra: RREF, nullspace, pseudoinverse, affine spaces.

All arithmetic in this module is exact (`fractions.Fraction`), so membership
tests and distance comparisons never suffer floating-point noise.  Matrices
are dense row-major tuples of tuples; every dimension encountered here is
tiny (at most a few dozen), so no sparse or float machinery is warranted.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
RatVector = tuple[Fraction, ...]
RatMatrix = tuple[RatVector, ...]  # row-major; all rows share a length

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _coerce(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact arithmetic requires int/str/Fraction, got {type(x).__name__}")


def vec(entries: Iterable) -> RatVector:
    """Build an exact rational vector; floats are rejected to protect exactness."""
    return tuple(_coerce(x) for x in entries)


def mat(rows: Iterable[Iterable]) -> RatMatrix:
    m = tuple(vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def zeros(rows: int, cols: int) -> RatMatrix:
    return tuple(tuple(_ZERO for _ in range(cols)) for _ in range(rows))


def identity(n: int) -> RatMatrix:
    return tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n))


def transpose(a: RatMatrix) -> RatMatrix:
    if not a:
        return ()
    return tuple(zip(*a))


def mat_vec(a: RatMatrix, x: Sequence[Fraction]) -> RatVector:
    return tuple(sum((aij * xj for aij, xj in zip(row, x)), _ZERO) for row in a)


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), _ZERO) for col in bt) for row in a)


def vec_add(x: Sequence[Fraction], y: Sequence[Fraction]) -> RatVector:
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x: Sequence[Fraction], y: Sequence[Fraction]) -> RatVector:
    return tuple(a - b for a, b in zip(x, y))


def dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), _ZERO)


def l1_norm(x: Sequence[Fraction]) -> Fraction:
    return sum((abs(a) for a in x), _ZERO)


def rref(a: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Reduced row-echelon form with strictly increasing pivot columns."""
    rows = [list(r) for r in a]
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(a: RatMatrix) -> int:
    return len(rref(a)[1])


def nullspace(a: RatMatrix) -> list[RatVector]:
    """Basis of the kernel of ``a`` (empty list for injective maps)."""
    if not a:
        return []
    n_cols = len(a[0])
    r, pivots = rref(a)
    pivot_set = set(pivots)
    basis = []
    for j in range(n_cols):
        if j in pivot_set:
            continue
        v = [_ZERO] * n_cols
        v[j] = _ONE
        for row_idx, pc in enumerate(pivots):
            v[pc] = -r[row_idx][j]
        basis.append(tuple(v))
    return basis


def solve_particular(a: RatMatrix, b: Sequence[Fraction]) -> RatVector | None:
    """One exact solution of ``a x = b`` with free variables set to 0, or None."""
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(a, b))
    r, pivots = rref(aug)
    if pivots and pivots[-1] == n_cols:
        return None  # pivot in the RHS column: inconsistent
    x = [_ZERO] * n_cols
    for row_idx, pc in enumerate(pivots):
        x[pc] = r[row_idx][n_cols]
    return tuple(x)


def inverse(a: RatMatrix) -> RatMatrix:
    n = len(a)
    aug = tuple(tuple(row) + tuple(_ONE if i == j else _ZERO for j in range(n)) for i, row in enumerate(a))
    r, pivots = rref(aug)
    if tuple(pivots[:n]) != tuple(range(n)):
        raise ValueError("matrix is singular")
    return tuple(row[n:] for row in r)


def pseudoinverse(a: RatMatrix) -> RatMatrix:
    """Exact Moore-Penrose pseudoinverse via rank factorization.

    Writes ``a = C F`` with C the pivot columns and F the nonzero RREF rows,
    then ``a+ = F^T (F F^T)^-1 (C^T C)^-1 C^T``.  Satisfies all four Penrose
    identities exactly; equals the inverse when one exists.
    """
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    r, pivots = rref(a)
    k = len(pivots)
    if k == 0:
        return zeros(n_cols, n_rows)
    c = tuple(tuple(row[j] for j in pivots) for row in a)  # n_rows x k
    f = r[:k]  # k x n_cols
    ct, ft = transpose(c), transpose(f)
    middle = mat_mul(inverse(mat_mul(f, ft)), inverse(mat_mul(ct, c)))
    return mat_mul(ft, mat_mul(middle, ct))


def _lcm_denoms(entries: Iterable[Fraction]) -> int:
    d = 1
    for x in entries:
        d = d * x.denominator // math.gcd(d, x.denominator)
    return d


def _is_int_vector(v: Sequence) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for x in v)


class AffineSpace:
    """Affine subspace of Q^m given by a generating set (columns) and an offset.

    The orthogonal projection matrix onto the generator span is computed
    eagerly, so instances are immutable and safe to share.  Residuals against
    integer points run on a cached integer form of ``proj - I`` to keep the
    search hot path off Fraction arithmetic.
    """

    def __init__(self, columns: Sequence[Sequence], offset: Sequence):
        self.offset: RatVector = vec(offset)
        m = len(self.offset)
        self.columns: tuple[RatVector, ...] = tuple(vec(c) for c in columns)
        if any(len(c) != m for c in self.columns):
            raise ValueError("generator length does not match ambient dimension")
        # row-major m x q generating matrix (columns are the generators)
        self.gen: RatMatrix = tuple(tuple(c[i] for c in self.columns) for i in range(m))
        self.m = m
        self.dim = rank(self.gen) if self.columns else 0
        self.proj: RatMatrix = self._projection()
        # integer fast path: eps = (P - I)(v - offset) = E (d_off*v - B) / (d_res*d_off)
        e = tuple(tuple(self.proj[i][j] - (_ONE if i == j else _ZERO) for j in range(m)) for i in range(m))
        self._den_res = _lcm_denoms(x for row in e for x in row)
        self._res_rows = tuple(tuple(int(x * self._den_res) for x in row) for row in e)
        self._den_off = _lcm_denoms(self.offset)
        self._off_num = tuple(int(x * self._den_off) for x in self.offset)
        self.dist_den = self._den_res * self._den_off

    def _projection(self) -> RatMatrix:
        if not self.columns:
            return zeros(self.m, self.m)
        gt = transpose(self.gen)
        return mat_mul(self.gen, mat_mul(pseudoinverse(mat_mul(gt, self.gen)), gt))

    def residual_nums(self, v: Sequence[int]) -> tuple[int, ...]:
        """Numerators of the residual of an integer point (denominator ``dist_den``)."""
        d = self._den_off
        w = [d * x - b for x, b in zip(v, self._off_num)]
        return tuple(sum(r * wi for r, wi in zip(row, w)) for row in self._res_rows)

    def dist_num(self, v: Sequence[int]) -> int:
        """L1 residual distance of an integer point, scaled by ``dist_den``."""
        return sum(abs(n) for n in self.residual_nums(v))

    def residual(self, v: Sequence) -> tuple[RatVector, Fraction]:
        """Shortest correction ``eps`` with ``v + eps`` in the space, and its L1 norm."""
        if _is_int_vector(v):
            nums = self.residual_nums([int(x) for x in v])
            eps = tuple(Fraction(n, self.dist_den) for n in nums)
        else:
            w = vec_sub(vec(v), self.offset)
            eps = vec_sub(mat_vec(self.proj, w), w)
        return eps, l1_norm(eps)

    def contains(self, v: Sequence) -> bool:
        if _is_int_vector(v):
            return all(n == 0 for n in self.residual_nums([int(x) for x in v]))
        return self.residual(v)[1] == 0

    def __repr__(self):
        return f"AffineSpace(dim={self.dim}, m={self.m}, q={len(self.columns)})"


def full_space(m: int) -> AffineSpace:
    """All of Q^m (unit-vector generators, zero offset)."""
    return AffineSpace(identity(m), [0] * m)


def projection(space: AffineSpace) -> RatMatrix:
    return space.proj


def residual(space: AffineSpace, v: Sequence) -> tuple[RatVector, Fraction]:
    return space.residual(v)


def solve_min_norm(a: RatMatrix, b: Sequence[Fraction]) -> RatVector | None:
    """Minimum-norm exact solution of ``a x = b``, or None when inconsistent."""
    if solve_particular(a, b) is None:
        return None
    return mat_vec(pseudoinverse(a), vec(b))


def intersect_affine(sa: AffineSpace, sb: AffineSpace) -> AffineSpace | None:
    """Intersection of two affine spaces, or None when they are disjoint.

    Solves the stacked system ``[Ma | -Mb] x = b_b - b_a``; the x_a-part of a
    particular solution locates the intersection and the x_a-parts of the
    nullspace basis generate it.
    """
    if sa.m != sb.m:
        raise ValueError("spaces live in different ambient dimensions")
    qa = len(sa.columns)
    stacked = tuple(
        tuple(sa.gen[i]) + tuple(-x for x in sb.gen[i]) for i in range(sa.m)
    )
    rhs = vec_sub(sb.offset, sa.offset)
    part = solve_particular(stacked, rhs)
    if part is None:
        return None
    offset = vec_add(mat_vec(sa.gen, part[:qa]), sa.offset)
    gens = []
    for nv in nullspace(stacked):
        g = mat_vec(sa.gen, nv[:qa])
        if any(x != 0 for x in g):
            gens.append(g)
    return AffineSpace(gens, offset)


def contains_space(outer: AffineSpace, inner: AffineSpace) -> bool:
    """True when every point of ``inner`` lies in ``outer``."""
    if not outer.contains(inner.offset):
        return False
    return all(outer.contains(vec_add(inner.offset, c)) for c in inner.columns)


def spaces_equal(a: AffineSpace, b: AffineSpace) -> bool:
    return contains_space(a, b) and contains_space(b, a)
