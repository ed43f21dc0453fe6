"""Exact integer linear algebra over Python's arbitrary-precision integers.

Row-vector convention throughout: vectors act on matrices from the left,
``v -> v * M``.  Matrices are immutable tuples of tuple rows; nothing here
ever rounds, overflows, or approximates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

Vector = tuple[int, ...]


def vec(values: Sequence[int]) -> Vector:
    return tuple(int(x) for x in values)


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_neg(a: Vector) -> Vector:
    return tuple(-x for x in a)


def dot(a: Vector, b: Vector) -> int:
    return sum(x * y for x, y in zip(a, b, strict=True))


def norm_sq(a: Vector) -> int:
    return sum(x * x for x in a)


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[Vector, ...]
    width: int  # explicit so 0-row matrices keep their shape

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != self.width:
                raise ValueError("ragged matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], width: Optional[int] = None) -> "IntMatrix":
        tup = tuple(vec(r) for r in rows)
        if width is None:
            if not tup:
                raise ValueError("width required for a matrix with no rows")
            width = len(tup[0])
        return cls(tup, width)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "IntMatrix":
        return cls(tuple((0,) * n_cols for _ in range(n_rows)), n_cols)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return self.width

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.width)

    def is_square(self) -> bool:
        return self.n_rows == self.width

    def row(self, i: int) -> Vector:
        return self.rows[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(self.col(j) for j in range(self.width)), self.n_rows)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(
            tuple(vec_add(a, b) for a, b in zip(self.rows, other.rows)), self.width
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(
            tuple(vec_sub(a, b) for a, b in zip(self.rows, other.rows)), self.width
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(vec_neg(r) for r in self.rows), self.width)

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.width != other.n_rows:
            raise ValueError("inner dimensions do not match")
        cols = [other.col(j) for j in range(other.width)]
        return IntMatrix(
            tuple(tuple(dot(r, c) for c in cols) for r in self.rows), other.width
        )

    def __pow__(self, k: int) -> "IntMatrix":
        if not self.is_square():
            raise ValueError("matrix power needs a square matrix")
        if k < 0:
            raise ValueError("negative matrix power")
        result = IntMatrix.identity(self.n_rows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def act(self, v: Vector) -> Vector:
        """Row action ``v * M``."""
        if len(v) != self.n_rows:
            raise ValueError("vector length does not match row count")
        return tuple(dot(v, self.col(j)) for j in range(self.width))

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square():
            raise ValueError("determinant needs a square matrix")
        n = self.n_rows
        if n == 0:
            return 1
        m = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_positive_definite(self) -> bool:
        """Sylvester's criterion: every leading principal minor is positive."""
        if not self.is_square():
            raise ValueError("positive definiteness needs a square matrix")
        for k in range(1, self.n_rows + 1):
            sub = IntMatrix.from_rows([r[:k] for r in self.rows[:k]], k)
            if sub.det() <= 0:
                return False
        return True


def outer(a: Vector, b: Vector) -> IntMatrix:
    return IntMatrix(tuple(tuple(x * y for y in b) for x in a), len(b))


def stack(top: IntMatrix, bottom: IntMatrix) -> IntMatrix:
    if top.width != bottom.width:
        raise ValueError("width mismatch")
    return IntMatrix(top.rows + bottom.rows, top.width)


def augment(left: IntMatrix, right: IntMatrix) -> IntMatrix:
    if left.n_rows != right.n_rows:
        raise ValueError("row count mismatch")
    return IntMatrix(
        tuple(a + b for a, b in zip(left.rows, right.rows)), left.width + right.width
    )


# -- Smith normal form ------------------------------------------------------


def snf(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns (D, U, V) with ``U * a * V == D``.

    U and V are unimodular; D is diagonal with nonnegative entries forming a
    divisibility chain d1 | d2 | ...
    """
    d, e = a.shape
    m = [list(r) for r in a.rows]
    u = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    v = [[1 if i == j else 0 for j in range(e)] for i in range(e)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, factor):
        m[dst] = [x + factor * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + factor * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, factor):
        for row in m:
            row[dst] += factor * row[src]
        for row in v:
            row[dst] += factor * row[src]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    rank_bound = min(d, e)
    t = 0
    while t < rank_bound:
        # minimal-absolute-value nonzero pivot in the trailing submatrix
        pivot = None
        for i in range(t, d):
            for j in range(t, e):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = False
        for i in range(t + 1, d):
            q = m[i][t] // m[t][t]
            if q:
                add_row(i, t, -q)
            if m[i][t]:
                dirty = True
        for j in range(t + 1, e):
            q = m[t][j] // m[t][t]
            if q:
                add_col(j, t, -q)
            if m[t][j]:
                dirty = True
        if dirty:
            continue  # remainders left; pick a new (smaller) pivot
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    i = 0
    while i + 1 < rank_bound:
        a_i, a_j = m[i][i], m[i + 1][i + 1]
        if a_j != 0 and a_i != 0 and a_j % a_i != 0:
            add_col(i, i + 1, 1)
            # re-clear the disturbed 2x2 block
            t = i
            while t < rank_bound:
                pivot = None
                for r_ in range(t, d):
                    for c_ in range(t, e):
                        if m[r_][c_] != 0 and (
                            pivot is None or abs(m[r_][c_]) < abs(m[pivot[0]][pivot[1]])
                        ):
                            pivot = (r_, c_)
                if pivot is None:
                    break
                swap_rows(t, pivot[0])
                swap_cols(t, pivot[1])
                dirty = False
                for r_ in range(t + 1, d):
                    q = m[r_][t] // m[t][t]
                    if q:
                        add_row(r_, t, -q)
                    if m[r_][t]:
                        dirty = True
                for c_ in range(t + 1, e):
                    q = m[t][c_] // m[t][t]
                    if q:
                        add_col(c_, t, -q)
                    if m[t][c_]:
                        dirty = True
                if not dirty:
                    t += 1
            i = 0
            continue
        i += 1

    for i in range(rank_bound):
        if m[i][i] < 0:
            negate_row(i)

    dm = IntMatrix.from_rows(m, e) if d else IntMatrix((), e)
    um = IntMatrix.from_rows(u, d) if d else IntMatrix((), d)
    vm = IntMatrix.from_rows(v, e) if e else IntMatrix((), e)
    return dm, um, vm


# -- linear Diophantine systems ---------------------------------------------


def solve_linear(a: IntMatrix, b: Vector) -> Optional[tuple[Vector, list[Vector]]]:
    """Solve ``x * a == b`` over the integers.

    Returns a particular solution and a basis of the left kernel of ``a``
    (the full solution set is ``x0 + integer spans of the basis``), or None
    when no integral solution exists.
    """
    d, e = a.shape
    if len(b) != e:
        raise ValueError("target length does not match matrix width")
    if d == 0:
        if any(b):
            return None
        return (), []
    dm, um, vm = snf(a)
    c = vm.act(b) if e else ()
    # c = b * V; with x = y * U the system becomes y * D = c.
    y = [0] * d
    free: list[int] = []
    for j in range(d):
        dj = dm.rows[j][j] if j < min(d, e) else 0
        if j >= e:
            free.append(j)
            continue
        cj = c[j]
        if j < min(d, e) and dj != 0:
            if cj % dj:
                return None
            y[j] = cj // dj
        else:
            if cj != 0:
                return None
            free.append(j)
    for j in range(min(d, e), e):
        if c[j] != 0:
            return None
    x0 = um.act(tuple(y))
    kernel = [um.rows[j] for j in free]
    return x0, kernel


@dataclass(frozen=True)
class AffineMap:
    """The map ``v -> v * matrix + offset`` on row vectors."""

    matrix: IntMatrix
    offset: Vector

    def __post_init__(self) -> None:
        if not self.matrix.is_square() or self.matrix.n_rows != len(self.offset):
            raise ValueError("affine map shape mismatch")

    @property
    def dim(self) -> int:
        return len(self.offset)

    def apply(self, v: Vector) -> Vector:
        return vec_add(self.matrix.act(v), self.offset)

    def homogenize(self) -> IntMatrix:
        """Square matrix H with ``(v, 1) * H == (self.apply(v), 1)``."""
        n = self.dim
        rows = [self.matrix.rows[i] + (0,) for i in range(n)]
        rows.append(tuple(self.offset) + (1,))
        return IntMatrix.from_rows(rows, n + 1)


@dataclass(frozen=True)
class LatticeCoset:
    """The set ``offset + integer combinations of basis`` inside Z^dim."""

    offset: Vector
    basis: tuple[Vector, ...]

    def __post_init__(self) -> None:
        for row in self.basis:
            if len(row) != len(self.offset):
                raise ValueError("basis vector length mismatch")

    @property
    def dim(self) -> int:
        return len(self.offset)

    def contains(self, v: Vector) -> bool:
        if len(v) != self.dim:
            raise ValueError("dimension mismatch")
        if not self.basis:
            return v == self.offset
        a = IntMatrix.from_rows(self.basis, self.dim)
        return solve_linear(a, vec_sub(v, self.offset)) is not None


def coset_meet(
    source: LatticeCoset, p: IntMatrix, target: LatticeCoset
) -> Optional[Vector]:
    """Find ``w`` in ``source`` with ``w * p`` in ``target``, or None.

    Writes ``w = s0 + lam * S`` and ``w*p = t0 + mu * T`` and solves the
    combined integer system for ``(lam, mu)``.
    """
    if p.n_rows != source.dim or p.width != target.dim:
        raise ValueError("shape mismatch between cosets and map")
    k_s = len(source.basis)
    k_t = len(target.basis)
    rows: list[Vector] = []
    for row in source.basis:
        rows.append(p.act(row))
    for row in target.basis:
        rows.append(vec_neg(row))
    rhs = vec_sub(target.offset, p.act(source.offset))
    a = IntMatrix.from_rows(rows, target.dim) if rows else IntMatrix((), target.dim)
    solved = solve_linear(a, rhs)
    if solved is None:
        return None
    x0, _ = solved
    lam = x0[:k_s]
    w = source.offset
    for coeff, base_row in zip(lam, source.basis):
        w = vec_add(w, tuple(coeff * x for x in base_row))
    return w
