"""Finite-dimensional unital associative algebras over GF(p) via structure constants."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import FpMatrix, check_prime

Coeffs = tuple[int, ...]


@dataclass(frozen=True)
class Algebra:
    """An algebra given by its multiplication table in a fixed basis.

    mul[i][j] holds the coordinates of b_i * b_j in the basis b_0..b_{d-1};
    unit holds the coordinates of 1.
    """

    name: str
    p: int
    dim: int
    mul: tuple[tuple[Coeffs, ...], ...]
    unit: Coeffs

    def __post_init__(self):
        check_prime(self.p)
        if len(self.mul) != self.dim or any(len(row) != self.dim for row in self.mul):
            raise ValueError(f"mul table of {self.name} is not {self.dim}x{self.dim}")
        if any(len(v) != self.dim for row in self.mul for v in row):
            raise ValueError(f"mul entries of {self.name} are not coordinate vectors")
        if len(self.unit) != self.dim:
            raise ValueError(f"unit of {self.name} has wrong length")

    @cached_property
    def mul_table(self) -> np.ndarray:
        """(d, d, d) array; mul_table[i, j] = coordinates of b_i * b_j."""
        t = np.array(self.mul, dtype=np.int64) % self.p
        t.setflags(write=False)
        return t

    @cached_property
    def unit_row(self) -> FpMatrix:
        return FpMatrix.row_vector(self.p, self.unit)

    @cached_property
    def right_regular(self) -> tuple[FpMatrix, ...]:
        """Matrices of right multiplication: reg[i][l, t] = (b_l * b_i)_t."""
        t = self.mul_table
        return tuple(FpMatrix(self.p, t[:, i, :]) for i in range(self.dim))

    def multiply(self, x, y) -> tuple[int, ...]:
        """Product of two elements given by coordinate vectors."""
        xv = np.asarray(list(x), dtype=np.int64) % self.p
        yv = np.asarray(list(y), dtype=np.int64) % self.p
        out = np.einsum("i,j,ijt->t", xv, yv, self.mul_table) % self.p
        return tuple(int(c) for c in out)


@dataclass(frozen=True)
class AlgebraValidation:
    ok: bool
    failures: tuple[str, ...]

    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


def validate_algebra(a: Algebra) -> AlgebraValidation:
    """Check associativity on all basis triples and both unit laws."""
    failures: list[str] = []
    t = a.mul_table
    d, p = a.dim, a.p
    # (b_i b_j) b_k vs b_i (b_j b_k), all coordinates at once
    left = np.einsum("ijl,lkt->ijkt", t, t) % p
    right = np.einsum("jkl,ilt->ijkt", t, t) % p
    bad = np.argwhere((left != right).any(axis=3))
    for i, j, k in bad:
        failures.append(f"associativity fails at triple ({i},{j},{k})")
    u = np.asarray(a.unit, dtype=np.int64) % p
    eye = np.eye(d, dtype=np.int64)
    for j in range(d):
        if not np.array_equal(np.einsum("i,it->t", u, t[:, j, :]) % p, eye[j]):
            failures.append(f"unit law fails: 1*b_{j} != b_{j}")
        if not np.array_equal(np.einsum("i,it->t", u, t[j, :, :]) % p, eye[j]):
            failures.append(f"unit law fails: b_{j}*1 != b_{j}")
    return AlgebraValidation(not failures, tuple(failures))


@functools.lru_cache(maxsize=None)
def opposite(a: Algebra) -> Algebra:
    """The opposite algebra: mul_op[i][j] = mul[j][i].  Involutive."""
    if a.name.endswith("^op"):
        name = a.name[:-3]
    else:
        name = a.name + "^op"
    mul = tuple(tuple(a.mul[j][i] for j in range(a.dim)) for i in range(a.dim))
    return Algebra(name, a.p, a.dim, mul, a.unit)


def _coeff_vec(d: int, entries: dict[int, int]) -> Coeffs:
    v = [0] * d
    for i, c in entries.items():
        v[i] = c
    return tuple(v)


def build_truncated_poly(p: int, n: int) -> Algebra:
    """k[x]/(x^n) with basis 1, x, ..., x^(n-1)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    mul = tuple(
        tuple(_coeff_vec(n, {i + j: 1} if i + j < n else {}) for j in range(n))
        for i in range(n)
    )
    return Algebra(f"k[x]/(x^{n})@{p}", p, n, mul, _coeff_vec(n, {0: 1}))


def build_upper_triangular(p: int, n: int) -> Algebra:
    """n x n upper triangular matrices; basis E_ij (i <= j) in lex order."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index = {pr: t for t, pr in enumerate(pairs)}
    d = len(pairs)
    mul = tuple(
        tuple(
            _coeff_vec(d, {index[(a, b2)]: 1} if b == a2 else {})
            for (a2, b2) in pairs
        )
        for (a, b) in pairs
    )
    unit = _coeff_vec(d, {index[(i, i)]: 1 for i in range(n)})
    return Algebra(f"UT({n})@{p}", p, d, mul, unit)


def build_group_algebra_cyclic(p: int, n: int) -> Algebra:
    """Group algebra k[C_n]; basis g^0..g^(n-1), cyclic convolution product."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    mul = tuple(
        tuple(_coeff_vec(n, {(i + j) % n: 1}) for j in range(n)) for i in range(n)
    )
    return Algebra(f"k[C{n}]@{p}", p, n, mul, _coeff_vec(n, {0: 1}))
