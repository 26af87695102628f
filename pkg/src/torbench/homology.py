"""Tensor products over the algebra, free resolutions, Tor, Ext and the
finite-family product comparison map.

Tor is computed as homology of a tensored free resolution and can resolve
either argument (the two routes are independent code paths, used as a balance
oracle by the test harness).  Ext is cohomology of the Hom complex, with class
representatives returned as equivariant maps out of the corresponding syzygy.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .linalg import FpMatrix, coords_in_row_space, rank, row_space_basis
from .modules import (
    LEFT,
    RIGHT,
    DirectSum,
    ModuleMap,
    ModuleRep,
    ShortExactSeq,
    action_closure,
    direct_sum,
    dual,
    free_module,
    hom_basis,
    is_visibly_free,
    pushout,
    submodule_from_rows,
    zero_module,
)


# -- generator selection ------------------------------------------------------


def generating_rows(m: ModuleRep, candidates: FpMatrix) -> FpMatrix:
    """Prune candidate rows greedily: drop one whenever the rest still generate."""
    target = action_closure(m, candidates).rows
    gens = [list(candidates.row(i)) for i in range(candidates.rows)]
    i = 0
    while i < len(gens):
        trial = gens[:i] + gens[i + 1 :]
        if trial:
            spanned = action_closure(m, FpMatrix.from_rows(m.p, trial)).rows
        else:
            spanned = 0
        if spanned == target:
            gens.pop(i)
        else:
            i += 1
    if not gens:
        return FpMatrix.zeros(m.p, 0, m.dim)
    return FpMatrix.from_rows(m.p, gens)


def _cover_map(free: ModuleRep, gens: FpMatrix, target: ModuleRep) -> ModuleMap:
    """The map out of a free module sending the j-th block unit to gens[j]."""
    d = target.acting.dim
    rows = []
    for j in range(gens.rows):
        g = gens.take_rows([j])
        for i in range(d):
            rows.append(g @ target.action[i])
    mat = FpMatrix.vstack(target.p, rows, target.dim)
    return ModuleMap(free, target, mat)


class FreeResolution:
    """Lazily extendable chain of free modules resolving a fixed module.

    d_1, d_2, ... live in ``maps``; the augmentation F_0 -> module is separate.
    Extension mutates this object and must happen before sharing across
    threads; all queries on an already-extended resolution are pure.
    """

    def __init__(self, module: ModuleRep):
        self.module = module
        self.maps: list[ModuleMap] = []
        vis = is_visibly_free(module)
        if vis is not None:
            self.frees = [module]
            self.ranks = [vis]
            self.augmentation = ModuleMap(
                module, module, FpMatrix.identity(module.p, module.dim)
            )
            self._kernels = [FpMatrix.zeros(module.p, 0, module.dim)]
            return
        gens = generating_rows(module, FpMatrix.identity(module.p, module.dim))
        f0 = free_module(module.algebra, module.side, gens.rows)
        self.frees = [f0]
        self.ranks = [gens.rows]
        self.augmentation = _cover_map(f0, gens, module)
        self._kernels = [self.augmentation.kernel_rows()]

    @property
    def computed_length(self) -> int:
        return len(self.maps)

    def extend(self, length: int) -> "FreeResolution":
        while len(self.maps) < length:
            self._extend_once()
        return self

    def _extend_once(self) -> None:
        last = self.frees[-1]
        kernel = self._kernels[-1]
        if kernel.rows == 0:
            nxt = free_module(self.module.algebra, self.module.side, 0)
            d = ModuleMap(nxt, last, FpMatrix.zeros(self.module.p, 0, last.dim))
            self.frees.append(nxt)
            self.ranks.append(0)
            self.maps.append(d)
            self._kernels.append(FpMatrix.zeros(self.module.p, 0, 0))
            return
        gens = generating_rows(last, kernel)
        nxt = free_module(self.module.algebra, self.module.side, gens.rows)
        d = _cover_map(nxt, gens, last)
        self.frees.append(nxt)
        self.ranks.append(gens.rows)
        self.maps.append(d)
        self._kernels.append(d.kernel_rows())

    def free(self, n: int) -> ModuleRep:
        self.extend(n)
        return self.frees[n]

    def d(self, n: int) -> ModuleMap:
        """The differential F_n -> F_(n-1) for n >= 1; d(0) is the augmentation."""
        if n == 0:
            return self.augmentation
        self.extend(n)
        return self.maps[n - 1]

    def kernel_rows_at(self, n: int) -> FpMatrix:
        """RREF rows of ker d_n inside F_n."""
        self.extend(n)
        return self._kernels[n]

    def verify_exact(self, upto: int) -> bool:
        self.extend(upto + 1)
        if not self.augmentation.is_surjective():
            return False
        for n in range(1, upto + 1):
            img = row_space_basis(self.d(n).matrix)
            ker = self.kernel_rows_at(n - 1)
            if img.rows != ker.rows:
                return False
            if coords_in_row_space(ker, img) is None:
                return False
        return True


@functools.lru_cache(maxsize=256)
def resolution_of(module: ModuleRep) -> FreeResolution:
    return FreeResolution(module)


def free_resolution(module: ModuleRep, length: int) -> FreeResolution:
    if length < 0:
        raise ValueError("length must be >= 0")
    return resolution_of(module).extend(length)


def syzygy_with_inclusion(module: ModuleRep, n: int) -> tuple[ModuleRep, ModuleMap]:
    """The n-th syzygy with its inclusion into F_(n-1); n = 0 gives the module."""
    if n < 0:
        raise ValueError("syzygy degree must be >= 0")
    if n == 0:
        ident = FpMatrix.identity(module.p, module.dim)
        return module, ModuleMap(module, module, ident)
    res = resolution_of(module).extend(n - 1)
    rows = res.kernel_rows_at(n - 1)
    return submodule_from_rows(res.free(n - 1), rows)


def syzygy(module: ModuleRep, n: int) -> ModuleRep:
    return syzygy_with_inclusion(module, n)[0]


# -- tensor products ----------------------------------------------------------


@dataclass(frozen=True)
class TensorSpace:
    """M (x)_A N as a quotient of the m*n-dimensional k-tensor space.

    projection (m*n x dim) and section (dim x m*n) act on row vectors; pure
    tensor e_r (x) e_s is the row r*n + s.
    """

    left: ModuleRep
    right: ModuleRep
    dim: int
    projection: FpMatrix
    section: FpMatrix


def tensor(M: ModuleRep, N: ModuleRep) -> TensorSpace:
    """Tensor product of a right module with a left module over their algebra."""
    if M.algebra != N.algebra:
        raise ValueError("tensor operands live over different algebras")
    if M.side != RIGHT or N.side != LEFT:
        raise ValueError("tensor expects (right module, left module)")
    p = M.p
    m, n = M.dim, N.dim
    if m == 0 or n == 0:
        return TensorSpace(M, N, 0, FpMatrix.zeros(p, m * n, 0), FpMatrix.zeros(p, 0, m * n))
    eye_m = FpMatrix.identity(p, m)
    eye_n = FpMatrix.identity(p, n)
    blocks = []
    for rho, sigma in zip(M.action, N.action):
        blocks.append(rho.kron(eye_n) - eye_m.kron(sigma))
    rel = FpMatrix.vstack(p, blocks, m * n)
    sub = row_space_basis(rel)
    from .linalg import quotient_space_with_section

    qs = quotient_space_with_section(m * n, sub)
    return TensorSpace(M, N, qs.dim, qs.projection.T, qs.section.T)


def tensor_map_first(
    f: ModuleMap, src: TensorSpace, dst: TensorSpace
) -> FpMatrix:
    """Matrix of f (x) id on the tensor quotients (src.left -> dst.left)."""
    n = src.right.dim
    big = f.matrix.kron(FpMatrix.identity(f.matrix.p, n))
    return src.section @ big @ dst.projection


def tensor_map_second(
    g: ModuleMap, src: TensorSpace, dst: TensorSpace
) -> FpMatrix:
    """Matrix of id (x) g on the tensor quotients (src.right -> dst.right)."""
    m = src.left.dim
    big = FpMatrix.identity(g.matrix.p, m).kron(g.matrix)
    return src.section @ big @ dst.projection


# -- Tor ----------------------------------------------------------------------


@dataclass(frozen=True)
class TorComplex:
    """The complex F_* (x) N (or M (x) G_*) up to a fixed degree."""

    spaces: tuple[TensorSpace, ...]
    diffs: tuple[FpMatrix, ...]  # diffs[k] : spaces[k+1] -> spaces[k]

    def cycle_rows(self, n: int) -> FpMatrix:
        p = self.spaces[n].projection.p
        if n == 0:
            return FpMatrix.identity(p, self.spaces[0].dim)
        from .linalg import kernel_basis

        return kernel_basis(self.diffs[n - 1].T)

    def boundary_rows(self, n: int) -> FpMatrix:
        return row_space_basis(self.diffs[n])

    def homology_dim(self, n: int) -> int:
        return self.cycle_rows(n).rows - self.boundary_rows(n).rows


def _tor_complex_first(M: ModuleRep, N: ModuleRep, length: int) -> TorComplex:
    res = resolution_of(M).extend(length + 1)
    spaces = tuple(tensor(res.free(k), N) for k in range(length + 2))
    diffs = tuple(
        tensor_map_first(res.d(k + 1), spaces[k + 1], spaces[k])
        for k in range(length + 1)
    )
    return TorComplex(spaces, diffs)


def _tor_complex_second(M: ModuleRep, N: ModuleRep, length: int) -> TorComplex:
    res = resolution_of(N).extend(length + 1)
    spaces = tuple(tensor(M, res.free(k)) for k in range(length + 2))
    diffs = tuple(
        tensor_map_second(res.d(k + 1), spaces[k + 1], spaces[k])
        for k in range(length + 1)
    )
    return TorComplex(spaces, diffs)


@dataclass(frozen=True)
class TorResult:
    degree: int
    dimension: int
    cycles: FpMatrix  # homology class representatives, rows in the degree-n space


def tor(n: int, M: ModuleRep, N: ModuleRep, resolve: str = "first") -> TorResult:
    """dim Tor_n(M, N); resolve picks which argument's resolution is used."""
    if n < 0:
        raise ValueError("Tor degree must be >= 0")
    if resolve == "first":
        cx = _tor_complex_first(M, N, n)
    elif resolve == "second":
        cx = _tor_complex_second(M, N, n)
    else:
        raise ValueError(f"resolve must be 'first' or 'second', got {resolve!r}")
    cycles = cx.cycle_rows(n)
    bounds = cx.boundary_rows(n)
    reps = _class_representatives(cycles, bounds)
    return TorResult(n, cycles.rows - bounds.rows, reps)


def tor_dims(M: ModuleRep, N: ModuleRep, max_n: int, resolve: str = "first") -> list[int]:
    """[dim Tor_n(M, N) for n in 0..max_n] from a single complex."""
    if resolve == "first":
        cx = _tor_complex_first(M, N, max_n)
    else:
        cx = _tor_complex_second(M, N, max_n)
    return [cx.homology_dim(n) for n in range(max_n + 1)]


def _class_representatives(cycles: FpMatrix, boundaries: FpMatrix) -> FpMatrix:
    """Cycle rows extending the boundary span to a basis of the cycle space."""
    p = cycles.p
    acc = boundaries
    current = rank(acc)
    reps = []
    for i in range(cycles.rows):
        row = cycles.take_rows([i])
        trial = FpMatrix.vstack(p, [acc, row], cycles.cols)
        r = rank(trial)
        if r > current:
            reps.append(list(cycles.row(i)))
            acc, current = trial, r
    if not reps:
        return FpMatrix.zeros(p, 0, cycles.cols)
    return FpMatrix.from_rows(p, reps)


# -- Ext ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExtResult:
    degree: int
    dimension: int
    reps: tuple[ModuleMap, ...]  # maps from the degree-n syzygy to N


def _hom_rows(maps: list[ModuleMap], p: int, size: int) -> FpMatrix:
    if not maps:
        return FpMatrix.zeros(p, 0, size)
    return FpMatrix.from_rows(p, [sum(f.matrix.to_rows(), []) for f in maps])


def ext(n: int, M: ModuleRep, N: ModuleRep) -> ExtResult:
    """dim Ext^n(M, N) for same-side modules, plus class representatives."""
    if n < 0:
        raise ValueError("Ext degree must be >= 0")
    if not M.same_category(N):
        raise ValueError("Ext needs modules over the same algebra and side")
    res = resolution_of(M).extend(n + 1)
    p = M.p
    homs = [hom_basis(res.free(k), N) for k in range(n + 2)]
    rows = [
        _hom_rows(homs[k], p, res.free(k).dim * N.dim) for k in range(n + 2)
    ]

    def delta(k: int) -> FpMatrix:
        """delta_k : Hom(F_k, N) -> Hom(F_(k+1), N), phi |-> d_(k+1) o phi."""
        hk = len(homs[k])
        out_size = res.free(k + 1).dim * N.dim
        if hk == 0 or len(homs[k + 1]) == 0:
            return FpMatrix.zeros(p, hk, len(homs[k + 1]))
        images = []
        for f in homs[k]:
            comp = res.d(k + 1).matrix @ f.matrix
            images.append(sum(comp.to_rows(), []))
        img_rows = FpMatrix.from_rows(p, images) if images else FpMatrix.zeros(p, 0, out_size)
        coords = coords_in_row_space(rows[k + 1], img_rows)
        if coords is None:
            raise RuntimeError("composite with differential left the Hom space")
        return coords

    d_n = delta(n)
    d_prev = delta(n - 1) if n >= 1 else FpMatrix.zeros(p, 0, len(homs[n]))
    from .linalg import kernel_basis

    cocycles = kernel_basis(d_n.T) if len(homs[n]) else FpMatrix.zeros(p, 0, 0)
    cobounds = row_space_basis(d_prev)
    rep_coords = _class_representatives(cocycles, cobounds)
    dimension = cocycles.rows - cobounds.rows

    # convert representative cocycles F_n -> N into maps from the n-th syzygy
    syz, incl = syzygy_with_inclusion(M, n)
    reps = []
    if rep_coords.rows:
        if n == 0:
            lift = coords_in_row_space(
                res.augmentation.matrix, FpMatrix.identity(p, M.dim)
            )
        else:
            lift = coords_in_row_space(res.d(n).matrix, incl.matrix)
        if lift is None:
            raise RuntimeError("syzygy rows failed to lift through the differential")
        for i in range(rep_coords.rows):
            phi = FpMatrix.zeros(p, res.free(n).dim, N.dim)
            for j, c in enumerate(rep_coords.row(i)):
                if c:
                    phi = phi + homs[n][j].matrix.scale(c)
            reps.append(ModuleMap(syz, N, lift @ phi))
    return ExtResult(n, dimension, tuple(reps))


def ext_dims(M: ModuleRep, N: ModuleRep, max_n: int) -> list[int]:
    return [ext(k, M, N).dimension for k in range(max_n + 1)]


def extension_from_class(M: ModuleRep, N: ModuleRep, rep: ModuleMap) -> ShortExactSeq:
    """Realize an Ext^1(M, N) class representative as 0 -> N -> E -> M -> 0."""
    syz, incl = syzygy_with_inclusion(M, 1)
    if rep.source != syz:
        raise ValueError("representative does not start at the first syzygy")
    po = pushout(rep, incl)
    res = resolution_of(M)
    # E -> M induced by (0, augmentation) on N + F_0
    from .linalg import solve_matrix

    stacked = FpMatrix.vstack(
        M.p,
        [FpMatrix.zeros(M.p, N.dim, M.dim), res.augmentation.matrix],
        M.dim,
    )
    g = solve_matrix(po.quotient_proj.matrix, stacked)
    if g is None:
        raise RuntimeError("extension projection failed to factor")
    proj = ModuleMap(po.module, M, g)
    return ShortExactSeq(po.from_first, proj)


# -- long exact sequence consistency -----------------------------------------


@dataclass(frozen=True)
class ConnectingReport:
    ok: bool
    bound: int
    degrees: tuple[dict, ...]
    failures: tuple[str, ...]


def connecting_check(ses: ShortExactSeq, S: ModuleRep, bound: int) -> ConnectingReport:
    """Dimensional exactness of the long Tor sequence for 0->A->B->C->0 vs S.

    All three complexes reuse one resolution of S, so the induced maps on
    homology need no chain lifting.  Checked for each n <= bound:
    rank(alpha_n) + rank(beta_n) = dim Tor_n(B); the five-term window
    consistency dim Tor_n(C) - rank(beta_n) = dim Tor_(n-1)(A) - rank(alpha_(n-1));
    and surjectivity of beta_0.
    """
    problems = ses.validate()
    if problems:
        raise ValueError(f"invalid short exact sequence: {problems[0]}")
    if S.side != LEFT or S.algebra != ses.A.algebra:
        raise ValueError("S must be a left module over the same algebra")
    res = resolution_of(S).extend(bound + 1)
    spaces = {}
    for tag, mod in (("A", ses.A), ("B", ses.B), ("C", ses.C)):
        spaces[tag] = tuple(tensor(mod, res.free(k)) for k in range(bound + 2))
    diffs = {}
    for tag in ("A", "B", "C"):
        diffs[tag] = tuple(
            tensor_map_second(res.d(k + 1), spaces[tag][k + 1], spaces[tag][k])
            for k in range(bound + 1)
        )
    chain_incl = tuple(
        tensor_map_first(ses.incl, spaces["A"][k], spaces["B"][k])
        for k in range(bound + 1)
    )
    chain_proj = tuple(
        tensor_map_first(ses.proj, spaces["B"][k], spaces["C"][k])
        for k in range(bound + 1)
    )

    def complex_of(tag: str) -> TorComplex:
        return TorComplex(spaces[tag], diffs[tag])

    cxA, cxB, cxC = complex_of("A"), complex_of("B"), complex_of("C")

    def induced_rank(cx_src: TorComplex, cx_dst: TorComplex, chain, n: int) -> int:
        z = cx_src.cycle_rows(n)
        b = cx_dst.boundary_rows(n)
        mapped = z @ chain[n]
        p = mapped.p
        stacked = FpMatrix.vstack(p, [mapped, b], mapped.cols)
        return rank(stacked) - b.rows

    degrees = []
    failures = []
    alpha = [induced_rank(cxA, cxB, chain_incl, n) for n in range(bound + 1)]
    beta = [induced_rank(cxB, cxC, chain_proj, n) for n in range(bound + 1)]
    for n in range(bound + 1):
        hA, hB, hC = cxA.homology_dim(n), cxB.homology_dim(n), cxC.homology_dim(n)
        entry = {
            "n": n,
            "dim_A": hA,
            "dim_B": hB,
            "dim_C": hC,
            "rank_alpha": alpha[n],
            "rank_beta": beta[n],
        }
        if alpha[n] + beta[n] != hB:
            failures.append(f"exactness at Tor_{n}(B) fails")
        if n == 0 and beta[0] != hC:
            failures.append("Tor_0(B) -> Tor_0(C) is not surjective")
        if n >= 1:
            if hC - beta[n] != cxA.homology_dim(n - 1) - alpha[n - 1]:
                failures.append(f"connecting-map window at degree {n} is inconsistent")
        degrees.append(entry)
    return ConnectingReport(not failures, bound, tuple(degrees), tuple(failures))


# -- finite product comparison -------------------------------------------------


@dataclass(frozen=True)
class ProductComparison:
    injective: bool
    surjective: bool
    source_dim: int
    target_dim: int

    @property
    def isomorphism(self) -> bool:
        return self.injective and self.surjective


def product_comparison(family: list[ModuleRep], M: ModuleRep) -> ProductComparison:
    """The canonical map (prod X_i) (x) M -> prod (X_i (x) M), finite families.

    For finite families over finite-dimensional modules this must be an
    isomorphism; the report is a sanity invariant, not a theorem test.
    """
    if M.side != LEFT:
        raise ValueError("comparison needs a left module on the right side")
    if not family:
        return ProductComparison(True, True, 0, 0)
    ds = direct_sum(list(family))
    ts_prod = tensor(ds.module, M)
    comps = []
    total = 0
    for i, X in enumerate(family):
        ts_i = tensor(X, M)
        comps.append(tensor_map_first(ds.projections[i], ts_prod, ts_i))
        total += ts_i.dim
    rho = FpMatrix.hstack(M.p, comps, ts_prod.dim)
    r = rank(rho)
    return ProductComparison(r == ts_prod.dim, r == total, ts_prod.dim, total)


@dataclass(frozen=True)
class DualityReport:
    degree: int
    tor_dim: int
    ext_dim: int

    @property
    def ok(self) -> bool:
        return self.tor_dim == self.ext_dim


def ext_tor_duality_check(n: int, M: ModuleRep, N: ModuleRep) -> DualityReport:
    """dim Ext^n(M, dual N) = dim Tor_n(M, N): field duality as a cross-check."""
    t = tor(n, M, N).dimension
    e = ext(n, M, dual(N)).dimension
    return DualityReport(n, t, e)
