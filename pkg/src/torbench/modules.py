"""Finite-dimensional left/right modules as tuples of action matrices.

Conventions, used everywhere downstream:

* right modules act on row vectors: m * a = m @ rho(a), so rho(ab) = rho(a) @ rho(b);
* a left module is stored as a right module over the opposite algebra, which
  satisfies the same law, so there is a single code path for both sides;
* a ModuleMap from M to N is a dim(M) x dim(N) matrix acting by v |-> v @ F,
  and composition is matrix product in diagram order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import Algebra, opposite
from .linalg import (
    FpMatrix,
    coords_in_row_space,
    kernel_basis,
    quotient_space_with_section,
    rank,
    row_space_basis,
    rref,
)

RIGHT = "right"
LEFT = "left"


def _other_side(side: str) -> str:
    return LEFT if side == RIGHT else RIGHT


@dataclass(frozen=True)
class ModuleRep:
    """A module of dimension m with one m x m matrix per algebra basis element."""

    algebra: Algebra
    side: str
    dim: int
    action: tuple[FpMatrix, ...]

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if len(self.action) != self.algebra.dim:
            raise ValueError(
                f"need {self.algebra.dim} action matrices, got {len(self.action)}"
            )
        for a in self.action:
            if a.p != self.algebra.p or a.rows != self.dim or a.cols != self.dim:
                raise ValueError("action matrix has wrong modulus or shape")

    @cached_property
    def acting(self) -> Algebra:
        """The algebra whose *right* regular law the stored matrices satisfy."""
        return self.algebra if self.side == RIGHT else opposite(self.algebra)

    @property
    def p(self) -> int:
        return self.algebra.p

    def same_category(self, other: "ModuleRep") -> bool:
        return self.algebra == other.algebra and self.side == other.side

    def act_by(self, coeffs) -> FpMatrix:
        """Matrix of the action of the element with the given coordinates."""
        out = FpMatrix.zeros(self.p, self.dim, self.dim)
        for i, c in enumerate(coeffs):
            if c % self.p:
                out = out + self.action[i].scale(int(c))
        return out


@dataclass(frozen=True)
class ModuleMap:
    """An equivariant map, stored as its matrix on row vectors."""

    source: ModuleRep
    target: ModuleRep
    matrix: FpMatrix

    def __post_init__(self):
        if not self.source.same_category(self.target):
            raise ValueError("source and target live in different module categories")
        if self.matrix.rows != self.source.dim or self.matrix.cols != self.target.dim:
            raise ValueError(
                f"map matrix is {self.matrix.rows}x{self.matrix.cols}, expected "
                f"{self.source.dim}x{self.target.dim}"
            )

    def then(self, other: "ModuleMap") -> "ModuleMap":
        if self.target is not other.source and self.target != other.source:
            raise ValueError("maps do not compose")
        return ModuleMap(self.source, other.target, self.matrix @ other.matrix)

    def is_equivariant(self) -> bool:
        for As, At in zip(self.source.action, self.target.action):
            if As @ self.matrix != self.matrix @ At:
                return False
        return True

    def is_injective(self) -> bool:
        return rank(self.matrix) == self.source.dim

    def is_surjective(self) -> bool:
        return rank(self.matrix) == self.target.dim

    def image_rows(self) -> FpMatrix:
        return row_space_basis(self.matrix)

    def kernel_rows(self) -> FpMatrix:
        """RREF rows spanning {v : v @ matrix = 0}."""
        return kernel_basis(self.matrix.T)


@dataclass(frozen=True)
class ShortExactSeq:
    """0 -> A -> B -> C -> 0 presented by the inclusion and the projection."""

    incl: ModuleMap
    proj: ModuleMap

    @property
    def A(self) -> ModuleRep:
        return self.incl.source

    @property
    def B(self) -> ModuleRep:
        return self.incl.target

    @property
    def C(self) -> ModuleRep:
        return self.proj.target

    def validate(self) -> list[str]:
        problems = []
        if self.incl.target != self.proj.source:
            problems.append("middle modules differ")
            return problems
        if not self.incl.is_equivariant():
            problems.append("inclusion is not equivariant")
        if not self.proj.is_equivariant():
            problems.append("projection is not equivariant")
        if not self.incl.is_injective():
            problems.append("inclusion is not injective")
        if not self.proj.is_surjective():
            problems.append("projection is not surjective")
        if not (self.incl.matrix @ self.proj.matrix).is_zero():
            problems.append("composite A -> C is nonzero")
        if self.A.dim + self.C.dim != self.B.dim:
            problems.append("dimension count fails, image != kernel")
        return problems


@dataclass(frozen=True)
class ModuleValidation:
    ok: bool
    failures: tuple[str, ...]


def validate_module(m: ModuleRep) -> ModuleValidation:
    """Check the unit acts as the identity and action respects multiplication."""
    failures: list[str] = []
    B = m.acting
    ident = FpMatrix.identity(m.p, m.dim)
    if m.act_by(B.unit) != ident:
        failures.append("unit does not act as identity")
    for i in range(B.dim):
        for j in range(B.dim):
            if m.action[i] @ m.action[j] != m.act_by(B.mul[i][j]):
                failures.append(f"action of b_{i}*b_{j} violated at ({i},{j})")
    return ModuleValidation(not failures, tuple(failures))


def zero_module(a: Algebra, side: str) -> ModuleRep:
    z = FpMatrix.zeros(a.p, 0, 0)
    return ModuleRep(a, side, 0, tuple(z for _ in range(a.dim)))


def free_module(a: Algebra, side: str, rank_: int) -> ModuleRep:
    """Rank-r free module: r-fold block of the regular representation."""
    if rank_ < 0:
        raise ValueError(f"rank must be >= 0, got {rank_}")
    B = a if side == RIGHT else opposite(a)
    d = a.dim
    action = []
    for i in range(d):
        reg = B.right_regular[i].arr
        big = np.zeros((rank_ * d, rank_ * d), dtype=np.int64)
        for blk in range(rank_):
            big[blk * d : (blk + 1) * d, blk * d : (blk + 1) * d] = reg
        action.append(FpMatrix(a.p, big))
    return ModuleRep(a, side, rank_ * d, tuple(action))


def is_visibly_free(m: ModuleRep) -> int | None:
    """Rank r if the action literally equals the r-block regular representation."""
    d = m.algebra.dim
    if d == 0 or m.dim % d != 0:
        return None
    r = m.dim // d
    if m == free_module(m.algebra, m.side, r):
        return r
    return None


# -- submodules, quotients, sums ------------------------------------------


def action_closure(m: ModuleRep, rows: FpMatrix) -> FpMatrix:
    """RREF basis of the smallest action-invariant row space containing rows."""
    basis = row_space_basis(rows)
    while True:
        pieces = [basis] + [basis @ A for A in m.action]
        stacked = FpMatrix.vstack(m.p, pieces, m.dim)
        new = row_space_basis(stacked)
        if new.rows == basis.rows:
            return new
        basis = new


def _restricted_action(m: ModuleRep, sub_rows: FpMatrix) -> tuple[FpMatrix, ...]:
    """Action matrices of an invariant row space, in the sub_rows basis."""
    acts = []
    for A in m.action:
        mapped = sub_rows @ A
        coords = coords_in_row_space(sub_rows, mapped)
        if coords is None:
            raise ValueError("row space is not action-invariant")
        acts.append(coords)
    return tuple(acts)


def submodule(m: ModuleRep, gens) -> tuple[ModuleRep, ModuleMap]:
    """Smallest submodule containing the generators, with its inclusion.

    gens is an iterable of coordinate vectors in m; generation order is fixed
    by input order so the result is deterministic.
    """
    gen_list = [list(g) for g in gens]
    if gen_list:
        rows = FpMatrix.from_rows(m.p, gen_list)
    else:
        rows = FpMatrix.zeros(m.p, 0, m.dim)
    basis = action_closure(m, rows)
    rep = ModuleRep(m.algebra, m.side, basis.rows, _restricted_action(m, basis))
    return rep, ModuleMap(rep, m, basis)


def submodule_from_rows(m: ModuleRep, rows: FpMatrix) -> tuple[ModuleRep, ModuleMap]:
    return submodule(m, rows.to_rows())


def quotient(m: ModuleRep, incl: ModuleMap) -> tuple[ModuleRep, ModuleMap]:
    """Quotient by the image of an inclusion; returns (quotient, projection)."""
    if incl.target != m:
        raise ValueError("inclusion does not land in the given module")
    sub_rows = row_space_basis(incl.matrix)
    closed = action_closure(m, sub_rows)
    if closed.rows != sub_rows.rows:
        raise ValueError("given rows do not span a submodule")
    qs = quotient_space_with_section(m.dim, sub_rows)
    proj_rows = qs.projection.T  # dim(m) x q, acting on row vectors
    sect_rows = qs.section.T  # q x dim(m)
    action = tuple(sect_rows @ A @ proj_rows for A in m.action)
    rep = ModuleRep(m.algebra, m.side, qs.dim, action)
    return rep, ModuleMap(m, rep, proj_rows)


@dataclass(frozen=True)
class DirectSum:
    module: ModuleRep
    injections: tuple[ModuleMap, ...]
    projections: tuple[ModuleMap, ...]


def direct_sum(parts: list[ModuleRep]) -> DirectSum:
    if not parts:
        raise ValueError("direct_sum of an empty list needs an algebra; use zero_module")
    first = parts[0]
    for m in parts[1:]:
        if not first.same_category(m):
            raise ValueError("summands live in different module categories")
    p = first.p
    total = sum(m.dim for m in parts)
    offs = list(itertools.accumulate([0] + [m.dim for m in parts]))
    action = []
    for i in range(first.algebra.dim):
        big = np.zeros((total, total), dtype=np.int64)
        for k, m in enumerate(parts):
            big[offs[k] : offs[k + 1], offs[k] : offs[k + 1]] = m.action[i].arr
        action.append(FpMatrix(p, big))
    ds = ModuleRep(first.algebra, first.side, total, tuple(action))
    injections = []
    projections = []
    for k, m in enumerate(parts):
        inj = np.zeros((m.dim, total), dtype=np.int64)
        inj[:, offs[k] : offs[k + 1]] = np.eye(m.dim, dtype=np.int64)
        injections.append(ModuleMap(m, ds, FpMatrix(p, inj)))
        projections.append(ModuleMap(ds, m, FpMatrix(p, inj).T))
    return DirectSum(ds, tuple(injections), tuple(projections))


def direct_power(m: ModuleRep, e: int) -> DirectSum:
    if e == 0:
        return DirectSum(zero_module(m.algebra, m.side), (), ())
    return direct_sum([m] * e)


@dataclass(frozen=True)
class Pushout:
    module: ModuleRep
    from_first: ModuleMap  # P -> Q for pushout(f: K->P, j: K->F)
    from_second: ModuleMap  # F -> Q
    quotient_proj: ModuleMap  # (P + F) -> Q, for factoring maps out of Q


def pushout(f: ModuleMap, j: ModuleMap) -> Pushout:
    """Pushout (P + F)/<(f(k), -j(k))> of two maps out of a common source."""
    if f.source != j.source:
        raise ValueError("pushout needs a common source")
    P, F = f.target, j.target
    ds = direct_sum([P, F])
    rel = FpMatrix.hstack(f.matrix.p, [f.matrix, -j.matrix], f.matrix.rows)
    _, incl = submodule_from_rows(ds.module, rel)
    Q, proj = quotient(ds.module, incl)
    return Pushout(
        Q,
        ds.injections[0].then(proj),
        ds.injections[1].then(proj),
        proj,
    )


def cyclically_presented(a: Algebra, x, side: str = LEFT) -> ModuleRep:
    """A/Ax for left modules, A/xA for right modules, as a quotient of the
    rank-1 free module by the submodule generated by the element x."""
    reg = free_module(a, side, 1)
    _, incl = submodule(reg, [list(x)])
    q, _ = quotient(reg, incl)
    return q


# -- hom spaces -------------------------------------------------------------


def hom_basis(M: ModuleRep, N: ModuleRep) -> list[ModuleMap]:
    """Basis of the equivariant maps M -> N, solved as one linear system.

    Unknowns are the matrix entries in row-major order; the basis order is
    fixed by the RREF of the kernel, hence deterministic.
    """
    if not M.same_category(N):
        raise ValueError("hom between different module categories")
    p = M.p
    m, n = M.dim, N.dim
    if m == 0 or n == 0:
        return []
    eye_m = FpMatrix.identity(p, m)
    eye_n = FpMatrix.identity(p, n)
    blocks = []
    for A, B in zip(M.action, N.action):
        blocks.append(A.kron(eye_n) - eye_m.kron(B.T))
    system = FpMatrix.vstack(p, blocks, m * n)
    basis = kernel_basis(system)
    maps = []
    for i in range(basis.rows):
        mat = FpMatrix(p, basis.arr[i].reshape(m, n))
        maps.append(ModuleMap(M, N, mat))
    return maps


def hom_dim(M: ModuleRep, N: ModuleRep) -> int:
    return len(hom_basis(M, N))


def dual(M: ModuleRep) -> ModuleRep:
    """Field dual: same dimension, transposed action, side flipped."""
    return ModuleRep(
        M.algebra, _other_side(M.side), M.dim, tuple(A.T for A in M.action)
    )


# -- isomorphism testing ----------------------------------------------------


@dataclass(frozen=True)
class IsoVerdict:
    kind: str  # "yes" | "no" | "unknown"
    witness: ModuleMap | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.kind == "yes"


_EXHAUSTIVE_LIMIT = 1 << 20


def is_isomorphic(M: ModuleRep, N: ModuleRep, seed: int = 0) -> IsoVerdict:
    """Search the Hom space for an invertible equivariant matrix.

    Exhaustive (hence definitive either way) while p**dim Hom stays below
    2**20; beyond that 512 seeded random elements are tried before reporting
    "unknown".
    """
    if not M.same_category(N):
        raise ValueError("modules live in different categories")
    if M.dim != N.dim:
        return IsoVerdict("no", reason=f"dim {M.dim} != {N.dim}")
    if M.dim == 0:
        return IsoVerdict("yes", ModuleMap(M, N, FpMatrix.zeros(M.p, 0, 0)))
    ranks_m = tuple(rank(A) for A in M.action)
    ranks_n = tuple(rank(A) for A in N.action)
    if ranks_m != ranks_n:
        return IsoVerdict("no", reason=f"action ranks differ: {ranks_m} vs {ranks_n}")
    homs = hom_basis(M, N)
    h = len(homs)
    if h == 0:
        return IsoVerdict("no", reason="Hom space is zero")

    def candidate(coeffs) -> ModuleMap | None:
        mat = FpMatrix.zeros(M.p, M.dim, N.dim)
        for c, f in zip(coeffs, homs):
            if c:
                mat = mat + f.matrix.scale(c)
        if rank(mat) == M.dim:
            return ModuleMap(M, N, mat)
        return None

    if M.p**h <= _EXHAUSTIVE_LIMIT:
        for coeffs in itertools.product(range(M.p), repeat=h):
            w = candidate(coeffs)
            if w is not None:
                return IsoVerdict("yes", w)
        return IsoVerdict(
            "no", reason=f"no invertible element among all {M.p}**{h} Hom elements"
        )
    rng = random.Random(seed)
    for _ in range(512):
        w = candidate([rng.randrange(M.p) for _ in range(h)])
        if w is not None:
            return IsoVerdict("yes", w)
    return IsoVerdict("unknown", reason="random search over large Hom space failed")


# -- random generation -------------------------------------------------------


def random_module(
    a: Algebra,
    seed: int,
    max_gens: int = 3,
    max_rank: int = 3,
    side: str = RIGHT,
) -> ModuleRep:
    """Seeded random quotient of a free module; deterministic per seed."""
    rng = random.Random(seed)
    r = rng.randint(0, max_rank)
    free = free_module(a, side, r)
    if free.dim == 0:
        return free
    n_gens = rng.randint(0, max_gens)
    gens = [
        [rng.randrange(a.p) for _ in range(free.dim)] for _ in range(n_gens)
    ]
    _, incl = submodule(free, gens)
    q, _ = quotient(free, incl)
    return q
