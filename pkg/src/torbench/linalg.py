"""Deterministic exact dense linear algebra over prime fields GF(p).

Matrices are immutable, row-major int64 numpy arrays with all entries reduced
into [0, p).  Every operation is a pure function of its inputs; identical
inputs produce bit-identical outputs.  p is restricted to primes below 2**16
so products of two entries never overflow int64 even after accumulation over
a few thousand terms.

Vector-facing operations (kernel_basis, solve, image_basis, quotient_space)
use column semantics: ``kernel_basis(m)`` spans ``{v : m @ v = 0}``.  Callers
that work with row vectors transpose first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MAX_P = 1 << 16
_checked_primes: set[int] = set()


class ModulusMismatchError(ValueError):
    """Two operands were built over different prime fields."""


def check_prime(p: int) -> int:
    """Validate the modulus by trial division (cached per session)."""
    if p in _checked_primes:
        return p
    if not (2 <= p < _MAX_P):
        raise ValueError(f"modulus must satisfy 2 <= p < 2**16, got {p}")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"modulus {p} is not prime (divisible by {d})")
        d += 1
    _checked_primes.add(p)
    return p


class FpMatrix:
    """Dense matrix over GF(p); the computation substrate for everything else."""

    __slots__ = ("p", "arr")

    def __init__(self, p: int, arr) -> None:
        check_prime(p)
        a = np.asarray(arr, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        a = np.mod(a, p)
        a.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "arr", a)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("FpMatrix is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, p: int, rows) -> "FpMatrix":
        rows = list(rows)
        if not rows:
            raise ValueError("from_rows needs at least one row; use zeros for empty")
        return cls(p, np.array(rows, dtype=np.int64))

    @classmethod
    def row_vector(cls, p: int, values) -> "FpMatrix":
        return cls(p, np.array([list(values)], dtype=np.int64))

    # -- basic queries -----------------------------------------------------
    @property
    def rows(self) -> int:
        return self.arr.shape[0]

    @property
    def cols(self) -> int:
        return self.arr.shape[1]

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix(self.p, self.arr.T)

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.arr[i])

    def to_rows(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.arr]

    def is_zero(self) -> bool:
        return not self.arr.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.arr.shape == other.arr.shape
            and bool(np.array_equal(self.arr, other.arr))
        )

    def __hash__(self) -> int:
        return hash((self.p, self.arr.shape, self.arr.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.rows}x{self.cols})"

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other: "FpMatrix") -> "FpMatrix":
        if not isinstance(other, FpMatrix):
            raise TypeError(f"expected FpMatrix, got {type(other).__name__}")
        if other.p != self.p:
            raise ModulusMismatchError(f"modulus mismatch: {self.p} vs {other.p}")
        return other

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        other = self._coerce(other)
        if self.cols != other.rows:
            raise ValueError(
                f"shape mismatch for product: {self.rows}x{self.cols} @ "
                f"{other.rows}x{other.cols}"
            )
        return FpMatrix(self.p, self.arr @ other.arr)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        other = self._coerce(other)
        return FpMatrix(self.p, self.arr + other.arr)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        other = self._coerce(other)
        return FpMatrix(self.p, self.arr - other.arr)

    def __neg__(self) -> "FpMatrix":
        return FpMatrix(self.p, -self.arr)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix(self.p, self.arr * (c % self.p))

    def kron(self, other: "FpMatrix") -> "FpMatrix":
        other = self._coerce(other)
        return FpMatrix(self.p, np.kron(self.arr, other.arr))

    def take_rows(self, indices) -> "FpMatrix":
        idx = list(indices)
        return FpMatrix(self.p, self.arr[idx, :].reshape(len(idx), self.cols))

    def take_cols(self, indices) -> "FpMatrix":
        idx = list(indices)
        return FpMatrix(self.p, self.arr[:, idx].reshape(self.rows, len(idx)))

    @staticmethod
    def hstack(p: int, mats: list["FpMatrix"], rows: int) -> "FpMatrix":
        parts = [m.arr for m in mats]
        for m in mats:
            if m.p != p:
                raise ModulusMismatchError(f"modulus mismatch: {p} vs {m.p}")
        if not parts:
            return FpMatrix.zeros(p, rows, 0)
        return FpMatrix(p, np.hstack(parts))

    @staticmethod
    def vstack(p: int, mats: list["FpMatrix"], cols: int) -> "FpMatrix":
        parts = [m.arr for m in mats]
        for m in mats:
            if m.p != p:
                raise ModulusMismatchError(f"modulus mismatch: {p} vs {m.p}")
        if not parts:
            return FpMatrix.zeros(p, 0, cols)
        return FpMatrix(p, np.vstack(parts))


@dataclass(frozen=True)
class RrefResult:
    matrix: FpMatrix
    pivots: tuple[int, ...]
    rank: int


def rref(m: FpMatrix) -> RrefResult:
    """Unique reduced row echelon form.

    Pivot tie-break is first nonzero entry scanning top-to-bottom and
    left-to-right, so the result is deterministic.
    """
    p = m.p
    a = np.array(m.arr, dtype=np.int64)
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return RrefResult(FpMatrix(p, a), tuple(pivots), len(pivots))


def rank(m: FpMatrix) -> int:
    return rref(m).rank


def row_space_basis(m: FpMatrix) -> FpMatrix:
    """RREF basis of the row space (nonzero rows of the RREF)."""
    rr = rref(m)
    return FpMatrix(m.p, rr.matrix.arr[: rr.rank])


def image_basis(m: FpMatrix) -> FpMatrix:
    """RREF basis of the column space, returned as rows."""
    return row_space_basis(m.T)


def kernel_basis(m: FpMatrix) -> FpMatrix:
    """Rows form an RREF basis of the right null space {v : m @ v = 0}."""
    p = m.p
    rr = rref(m)
    pivots = rr.pivots
    free = [c for c in range(m.cols) if c not in set(pivots)]
    if not free:
        return FpMatrix.zeros(p, 0, m.cols)
    R = rr.matrix.arr
    rows = np.zeros((len(free), m.cols), dtype=np.int64)
    for k, fc in enumerate(free):
        rows[k, fc] = 1
        for i, pc in enumerate(pivots):
            rows[k, pc] = (-R[i, fc]) % p
    # canonicalize: basis rows themselves in RREF
    return row_space_basis(FpMatrix(p, rows))


def solve(m: FpMatrix, b) -> tuple[int, ...] | None:
    """Some x with m @ x = b, free variables set to 0, or None if unsolvable."""
    bv = np.asarray(list(b), dtype=np.int64).reshape(-1)
    if bv.shape[0] != m.rows:
        raise ValueError(f"rhs length {bv.shape[0]} != row count {m.rows}")
    aug = FpMatrix(m.p, np.hstack([m.arr, (bv % m.p).reshape(-1, 1)]))
    rr = rref(aug)
    if rr.pivots and rr.pivots[-1] == m.cols:
        return None
    x = [0] * m.cols
    R = rr.matrix.arr
    for i, c in enumerate(rr.pivots):
        x[c] = int(R[i, m.cols])
    return tuple(x)


def solve_matrix(m: FpMatrix, b: FpMatrix) -> FpMatrix | None:
    """Some X with m @ X = b (free variables 0), or None if any column fails."""
    if m.p != b.p:
        raise ModulusMismatchError(f"modulus mismatch: {m.p} vs {b.p}")
    if m.rows != b.rows:
        raise ValueError(f"row counts differ: {m.rows} vs {b.rows}")
    aug = FpMatrix(m.p, np.hstack([m.arr, b.arr]))
    rr = rref(aug)
    if any(c >= m.cols for c in rr.pivots):
        return None
    X = np.zeros((m.cols, b.cols), dtype=np.int64)
    R = rr.matrix.arr
    for i, c in enumerate(rr.pivots):
        X[c, :] = R[i, m.cols :]
    return FpMatrix(m.p, X)


def coords_in_row_space(basis: FpMatrix, vectors: FpMatrix) -> FpMatrix | None:
    """Solve X @ basis = vectors for X, or None if some row is outside the span.

    Free coordinates are set to 0, so the answer is deterministic; when the
    basis rows are independent the solution is unique.
    """
    if basis.p != vectors.p:
        raise ModulusMismatchError(f"modulus mismatch: {basis.p} vs {vectors.p}")
    if basis.cols != vectors.cols:
        raise ValueError("ambient dimensions differ")
    p = basis.p
    n = vectors.rows
    if n == 0:
        return FpMatrix.zeros(p, 0, basis.rows)
    # basis^T @ X^T = vectors^T, solved for all columns at once
    aug = FpMatrix(p, np.hstack([basis.arr.T, vectors.arr.T]))
    rr = rref(aug)
    if any(c >= basis.rows for c in rr.pivots):
        return None
    X = np.zeros((n, basis.rows), dtype=np.int64)
    R = rr.matrix.arr
    for i, c in enumerate(rr.pivots):
        X[:, c] = R[i, basis.rows :]
    return FpMatrix(p, X)


@dataclass(frozen=True)
class QuotientSpace:
    """Projection onto a complement of a row-span, with a fixed section.

    projection is q x ambient (column semantics: v |-> projection @ v kills
    exactly the span of sub_basis); section is ambient x q with
    projection @ section = identity.
    """

    projection: FpMatrix
    section: FpMatrix
    dim: int


def quotient_space(ambient_dim: int, sub_basis: FpMatrix) -> tuple[FpMatrix, int]:
    q = quotient_space_with_section(ambient_dim, sub_basis)
    return q.projection, q.dim


def quotient_space_with_section(ambient_dim: int, sub_basis: FpMatrix) -> QuotientSpace:
    if sub_basis.cols != ambient_dim:
        raise ValueError(
            f"sub_basis lives in dimension {sub_basis.cols}, ambient is {ambient_dim}"
        )
    p = sub_basis.p
    rr = rref(sub_basis)
    pivots = rr.pivots
    free = [c for c in range(ambient_dim) if c not in set(pivots)]
    qdim = len(free)
    proj = np.zeros((qdim, ambient_dim), dtype=np.int64)
    sect = np.zeros((ambient_dim, qdim), dtype=np.int64)
    R = rr.matrix.arr
    for j, fc in enumerate(free):
        proj[j, fc] = 1
        sect[fc, j] = 1
        for i, pc in enumerate(pivots):
            proj[j, pc] = (-R[i, fc]) % p
    return QuotientSpace(FpMatrix(p, proj), FpMatrix(p, sect), qdim)
