"""Exact linear algebra over a prime field F_p.

Matrices are plain ``numpy`` int64 arrays whose entries are kept reduced
into ``[0, p)``.  Vectors are 1-d arrays; "a basis" is always returned as a
2-d array whose *columns* are the basis vectors.  Nothing here touches
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit together."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    """The coefficient field F_p."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def mat(self, entries, rows=None, cols=None) -> np.ndarray:
        """Build a reduced matrix from nested lists (or a flat list plus shape)."""
        a = np.array(entries, dtype=np.int64)
        if rows is not None:
            a = a.reshape(rows, cols)
        return a % self.p

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(int(x), self.p - 2, self.p)

    def elements(self):
        return range(self.p)


def reduce(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def matmul(a, b, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    if a.size == 0 or b.size == 0:
        shape = a.shape[:-1] + b.shape[1:]
        return np.zeros(shape, dtype=np.int64)
    return (a @ b) % p


def rref(a, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with first-nonzero pivoting.

    Returns the reduced matrix and the list of pivot columns.
    """
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = (m[r] * pow(int(m[r, c]), p - 2, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            m[hit] = (m[hit] - np.outer(col[hit], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def kernel_basis(a, p: int) -> np.ndarray:
    """Columns spanning ker A.  Shape is ``(cols, cols - rank)``."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2:
        raise DimensionError("kernel_basis expects a 2-d matrix")
    rows, cols = a.shape
    if rows == 0:
        return identity(cols)
    r, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = zeros(cols, len(free))
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-r[i, fc]) % p
    return basis


def solve_linear(a, b, p: int) -> tuple[np.ndarray | None, np.ndarray]:
    """Solve ``A x = b``.

    Returns ``(x, kernel)`` where ``x`` is one particular solution (``None``
    when the system is inconsistent) and ``kernel`` is a column basis of
    ker A.  ``b`` may be a vector or a matrix of right-hand sides.
    """
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if a.ndim != 2 or a.shape[0] != b.shape[0]:
        raise DimensionError(f"A has shape {a.shape}, b has shape {b.shape}")
    vec = b.ndim == 1
    bb = b.reshape(-1, 1) if vec else b
    rows, cols = a.shape
    ker = kernel_basis(a, p)
    aug, pivots = rref(np.hstack([a, bb]), p) if rows else (zeros(0, cols + bb.shape[1]), [])
    if any(c >= cols for c in pivots):
        return None, ker
    x = zeros(cols, bb.shape[1])
    for i, pc in enumerate(pivots):
        x[pc] = aug[i, cols:]
    if np.any(matmul(a, x, p) != bb):
        raise ArithmeticError("substitution check failed")
    return (x[:, 0] if vec else x), ker


def image_basis(a, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if a.shape[1] == 0:
        return zeros(a.shape[0], 0)
    r, pivots = rref(a.T, p)
    return r[: len(pivots)].T.copy()


def image_and_quotient(a, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Image basis of A and a projection Q onto F_p^rows / im A.

    Q has full row rank ``rows - rank(A)`` and satisfies ``Q A = 0``.
    """
    a = np.asarray(a, dtype=np.int64) % p
    img = image_basis(a, p)
    rows = a.shape[0]
    if img.shape[1] == 0:
        return img, identity(rows)
    # rows of Q span the left kernel of the image
    q = kernel_basis(img.T, p).T.copy()
    return img, q


def section(q, p: int) -> np.ndarray:
    """A right inverse S of a full-row-rank Q (so ``Q S = I``)."""
    q = np.asarray(q, dtype=np.int64)
    k, n = q.shape
    if k == 0:
        return zeros(n, 0)
    s, _ = solve_linear(q, identity(k), p)
    if s is None:
        raise ArithmeticError("projection is not surjective")
    return s


def inverse(a, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError("inverse of a non-square matrix")
    if n == 0:
        return zeros(0, 0)
    r, pivots = rref(np.hstack([a, identity(n)]), p)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return r[:, n:].copy()


def is_invertible(a, p: int) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


# --- subspaces --------------------------------------------------------------
# A subspace of F_p^n is stored as its RREF row matrix (k x n); this form is
# canonical, so equality is array equality.

def row_space(rows, p: int, n: int | None = None) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return zeros(0, rows.shape[1] if rows.ndim == 2 else (n or 0))
    r, pivots = rref(rows, p)
    return r[: len(pivots)].copy()


def span_of_columns(cols, p: int) -> np.ndarray:
    cols = np.asarray(cols, dtype=np.int64)
    return row_space(cols.T, p, cols.shape[0])


def subspace_sum(u, v, p: int) -> np.ndarray:
    return row_space(np.vstack([u, v]), p)


def subspace_contains(u, vecs, p: int) -> bool:
    """Whether every row of ``vecs`` lies in the row space of ``u``."""
    vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
    if vecs.size == 0:
        return True
    u = np.asarray(u, dtype=np.int64)
    return rank(np.vstack([u, vecs]), p) == rank(u, p)


def subspace_intersection(u, v, p: int) -> np.ndarray:
    n = u.shape[1]
    if u.shape[0] == 0 or v.shape[0] == 0:
        return zeros(0, n)
    # x = a U = b V  <=>  [U; -V]^T [a; b] = 0
    stacked = np.vstack([u, (-v) % p]).T
    ker = kernel_basis(stacked, p)
    if ker.shape[1] == 0:
        return zeros(0, n)
    coeffs = ker[: u.shape[0]]
    return row_space(matmul(coeffs.T, u, p), p)


def preimage(m, u, p: int) -> np.ndarray:
    """Row basis of {x : M x in rowspace(u)}."""
    m = np.asarray(m, dtype=np.int64)
    _, q = image_and_quotient(np.asarray(u, dtype=np.int64).T, p)
    return row_space(kernel_basis(matmul(q, m, p), p).T, p, m.shape[1])


def all_vectors(n: int, p: int):
    """Every vector of F_p^n, as an (p**n, n) array."""
    if n == 0:
        return zeros(1, 0)
    grids = np.indices((p,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


class Coordinates:
    """Coordinate extraction for a fixed column basis.

    ``M`` must have linearly independent columns.  ``coords(v)`` returns the
    unique ``c`` with ``M c = v``; with ``check=True`` it raises
    ``ValueError`` when ``v`` is outside the span.
    """

    def __init__(self, m, p: int):
        self.m = np.asarray(m, dtype=np.int64) % p
        self.p = p
        n, k = self.m.shape
        if k == 0:
            self.rows: list[int] = []
            self.inv = zeros(0, 0)
            return
        _, pivots = rref(self.m.T, p)
        if len(pivots) != k:
            raise ValueError("basis columns are dependent")
        self.rows = pivots
        self.inv = inverse(self.m[pivots], p)

    @property
    def dim(self) -> int:
        return self.m.shape[1]

    def coords(self, v, check: bool = True) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.dim == 0:
            c = zeros(0, v.shape[1]) if v.ndim == 2 else np.zeros(0, dtype=np.int64)
        else:
            c = matmul(self.inv, v[self.rows], self.p)
        if check and np.any(matmul(self.m, c, self.p) != v):
            raise ValueError("vector is not in the span of the basis")
        return c

    def contains(self, v) -> bool:
        try:
            self.coords(v)
        except ValueError:
            return False
        return True
