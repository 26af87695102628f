"""Traces, precovers, preenvelopes and filtrations.

The precover pipeline follows the pushout construction: complete the kernel of
a surjection-onto-the-trace to a short exact sequence 0 -> K -> P -> N -> 0
with P orthogonal to the generators and N filtered by them (a finitized,
capped small-object iteration), then push out.  Filtration witnesses record,
for every chain step, an explicit equivariant surjection onto the tagged
generator whose kernel is the previous level; that is exactly the statement
"the layer quotient is isomorphic to the tagged generator", in a form a
verifier can check without reconstructing canonical quotients.
"""

from __future__ import annotations

from dataclasses import dataclass

from .homology import (
    ext,
    extension_from_class,
    resolution_of,
    syzygy_with_inclusion,
)
from .linalg import (
    FpMatrix,
    coords_in_row_space,
    kernel_basis,
    quotient_space_with_section,
    rank,
    row_space_basis,
    solve_matrix,
)
from .modules import (
    DirectSum,
    IsoVerdict,
    ModuleMap,
    ModuleRep,
    ShortExactSeq,
    action_closure,
    direct_power,
    direct_sum,
    hom_basis,
    is_isomorphic,
    pushout,
    quotient,
    submodule,
    submodule_from_rows,
    zero_module,
)

# -- traces -------------------------------------------------------------------


def trace(Xset: list[ModuleRep], M: ModuleRep) -> tuple[ModuleRep, ModuleMap]:
    """Sum of the images of all maps from members of Xset into M."""
    rows: list[list[int]] = []
    for X in Xset:
        for f in hom_basis(X, M):
            rows.extend(f.matrix.to_rows())
    return submodule(M, rows)


def gen_membership(M: ModuleRep, Xset: list[ModuleRep]) -> bool:
    """M is generated by Xset iff the trace is all of M."""
    t, _ = trace(Xset, M)
    return t.dim == M.dim


# -- filtration witnesses -------------------------------------------------------


@dataclass(frozen=True)
class FiltrationLayer:
    tag: int  # index into the generator list
    surjection: FpMatrix  # level_(i+1) sub-basis coords -> generator coords


@dataclass(frozen=True)
class FiltrationWitness:
    """A chain 0 = G_0 <= ... <= G_l = module with tagged layer quotients.

    levels[i] holds RREF rows spanning G_i in module coordinates.  Each layer
    carries an equivariant surjection from the sub-representation on
    levels[i+1] onto the tagged generator whose kernel is levels[i]; this is
    the isomorphism witness for the layer quotient.
    """

    module: ModuleRep
    levels: tuple[FpMatrix, ...]
    layers: tuple[FiltrationLayer, ...]


def trivial_witness(g: ModuleRep, tag: int) -> FiltrationWitness:
    if g.dim == 0:
        return FiltrationWitness(g, (FpMatrix.zeros(g.p, 0, 0),), ())
    return FiltrationWitness(
        g,
        (FpMatrix.zeros(g.p, 0, g.dim), FpMatrix.identity(g.p, g.dim)),
        (FiltrationLayer(tag, FpMatrix.identity(g.p, g.dim)),),
    )


def zero_witness(a, side) -> FiltrationWitness:
    z = zero_module(a, side)
    return FiltrationWitness(z, (FpMatrix.zeros(a.p, 0, 0),), ())


@dataclass(frozen=True)
class FiltrationReport:
    ok: bool
    layer_count: int
    failures: tuple[str, ...]

    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


def filtration_verify(w: FiltrationWitness, G: list[ModuleRep]) -> FiltrationReport:
    """Check the chain shape and every layer's isomorphism witness."""
    failures: list[str] = []
    M = w.module
    levels = w.levels
    if not levels or levels[0].rows != 0:
        return FiltrationReport(False, len(w.layers), ("chain must start at 0",))
    if levels[-1].rows != M.dim:
        failures.append("chain does not end at the whole module")
    if len(w.layers) != len(levels) - 1:
        failures.append("layer count does not match chain length")
        return FiltrationReport(False, len(w.layers), tuple(failures))
    for i in range(len(levels) - 1):
        lo, hi = levels[i], levels[i + 1]
        if hi.rows <= lo.rows:
            failures.append(f"step {i}: chain is not strictly increasing")
            continue
        if lo.rows and coords_in_row_space(hi, lo) is None:
            failures.append(f"step {i}: levels are not nested")
            continue
        if action_closure(M, hi).rows != hi.rows:
            failures.append(f"step {i}: level is not a submodule")
            continue
        layer = w.layers[i]
        if not 0 <= layer.tag < len(G):
            failures.append(f"step {i}: tag {layer.tag} out of range")
            continue
        g = G[layer.tag]
        sub_rep, _ = submodule_from_rows(M, hi)
        psi = layer.surjection
        if psi.rows != sub_rep.dim or psi.cols != g.dim:
            failures.append(f"step {i}: witness matrix has wrong shape")
            continue
        surj = ModuleMap(sub_rep, g, psi)
        if not surj.is_equivariant():
            failures.append(f"step {i}: witness is not equivariant")
            continue
        if rank(psi) != g.dim:
            failures.append(f"step {i}: witness does not surject onto generator {layer.tag}")
            continue
        ker = surj.kernel_rows() @ hi  # back to module coordinates
        if ker.rows != lo.rows:
            failures.append(
                f"step {i}: witness kernel has dimension {ker.rows}, expected {lo.rows}"
            )
            continue
        if lo.rows and coords_in_row_space(lo, ker) is None:
            failures.append(f"step {i}: witness kernel is not the previous level")
    return FiltrationReport(not failures, len(w.layers), tuple(failures))


@dataclass(frozen=True)
class FilteredModule:
    module: ModuleRep
    witness: FiltrationWitness


def direct_sum_filtered(parts: list[FilteredModule]) -> tuple[DirectSum, FiltrationWitness]:
    """Witness for a direct sum: each summand's chain, shifted block by block."""
    if not parts:
        raise ValueError("need at least one summand")
    ds = direct_sum([p.module for p in parts])
    big = ds.module
    levels: list[FpMatrix] = [FpMatrix.zeros(big.p, 0, big.dim)]
    layers: list[FiltrationLayer] = []
    acc = FpMatrix.zeros(big.p, 0, big.dim)  # completed summands so far
    for t, part in enumerate(parts):
        w = part.witness
        inj = ds.injections[t].matrix
        proj = ds.projections[t].matrix
        for i in range(len(w.levels) - 1):
            hi_local = w.levels[i + 1]
            hi_global = row_space_basis(
                FpMatrix.vstack(big.p, [acc, hi_local @ inj], big.dim)
            )
            # surject by projecting to the summand, then the summand's witness
            mapped = hi_global @ proj
            z = coords_in_row_space(hi_local, mapped)
            if z is None:
                raise RuntimeError("direct sum witness failed to project to a summand")
            layers.append(
                FiltrationLayer(w.layers[i].tag, z @ w.layers[i].surjection)
            )
            levels.append(hi_global)
        acc = levels[-1]
    return ds, FiltrationWitness(big, tuple(levels), tuple(layers))


# -- approximation certificates ---------------------------------------------------


@dataclass(frozen=True)
class ApproxCertificate:
    kind: str  # "precover" | "preenvelope"
    map: ModuleMap
    test_records: tuple[dict, ...]
    kernel_orthogonality: tuple[int, ...] | None
    passed: bool


def precover_verify(
    f: ModuleMap,
    test_set: list[ModuleRep],
    with_kernel_orthogonality: bool = False,
) -> ApproxCertificate:
    """Check the precover property of f : X -> M against each test module.

    For every test module Y the induced map Hom(Y, X) -> Hom(Y, M) must cover
    exactly the maps landing in the trace of the test set; f itself need not
    be epic, only epic onto the trace.
    """
    M = f.target
    t_rep, t_incl = trace(test_set, M)
    t_rows = row_space_basis(t_incl.matrix)
    qs = quotient_space_with_section(M.dim, t_rows)
    kill = qs.projection.T  # M.dim x q, zero exactly on the trace
    records: list[dict] = []
    passed = True
    for Y in test_set:
        homs_yx = hom_basis(Y, f.source)
        homs_ym = hom_basis(Y, M)
        vec_size = Y.dim * M.dim
        induced = [
            sum((g.matrix @ f.matrix).to_rows(), []) for g in homs_yx
        ]
        induced_rows = (
            FpMatrix.from_rows(M.p, induced)
            if induced
            else FpMatrix.zeros(M.p, 0, vec_size)
        )
        # the subspace of Hom(Y, M) landing inside the trace
        if homs_ym:
            constraint = FpMatrix.from_rows(
                M.p, [sum((phi.matrix @ kill).to_rows(), []) for phi in homs_ym]
            )
            coeffs = kernel_basis(constraint.T)
            ym_rows = FpMatrix.from_rows(
                M.p, [sum(phi.matrix.to_rows(), []) for phi in homs_ym]
            )
            target_rows = coeffs @ ym_rows
        else:
            target_rows = FpMatrix.zeros(M.p, 0, vec_size)
        target_rank = rank(target_rows)
        induced_rank = rank(induced_rows)
        contained = (
            induced_rank == 0
            or coords_in_row_space(row_space_basis(target_rows), induced_rows)
            is not None
        )
        ok = contained and induced_rank == target_rank
        passed = passed and ok
        records.append(
            {
                "test_dim": Y.dim,
                "hom_to_source": len(homs_yx),
                "hom_to_target": len(homs_ym),
                "target_rank": target_rank,
                "induced_rank": induced_rank,
                "ok": ok,
            }
        )
    orth = None
    if with_kernel_orthogonality:
        ker_rep, _ = submodule_from_rows(f.source, f.kernel_rows())
        orth = tuple(ext(1, Y, ker_rep).dimension for Y in test_set)
    return ApproxCertificate("precover", f, tuple(records), orth, passed)


def preenvelope_candidate(M: ModuleRep, Gset: list[ModuleRep]) -> ModuleMap:
    """The canonical map M -> sum of G^(dim Hom(M, G)) over the generators."""
    parts: list[ModuleRep] = []
    mats: list[FpMatrix] = []
    for G in Gset:
        for f in hom_basis(M, G):
            parts.append(G)
            mats.append(f.matrix)
    if not parts:
        E = zero_module(M.algebra, M.side)
        return ModuleMap(M, E, FpMatrix.zeros(M.p, M.dim, 0))
    ds = direct_sum(parts)
    h = FpMatrix.hstack(M.p, mats, M.dim)
    return ModuleMap(M, ds.module, h)


def preenvelope_verify(h: ModuleMap, test_set: list[ModuleRep]) -> ApproxCertificate:
    """Every map M -> Y with Y in the test set must factor through h."""
    M, E = h.source, h.target
    records: list[dict] = []
    passed = True
    for Y in test_set:
        homs_ey = hom_basis(E, Y)
        homs_my = hom_basis(M, Y)
        vec_size = M.dim * Y.dim
        induced = [sum((h.matrix @ psi.matrix).to_rows(), []) for psi in homs_ey]
        induced_rows = (
            FpMatrix.from_rows(M.p, induced)
            if induced
            else FpMatrix.zeros(M.p, 0, vec_size)
        )
        ok = rank(induced_rows) == len(homs_my)
        passed = passed and ok
        records.append(
            {
                "test_dim": Y.dim,
                "hom_from_envelope": len(homs_ey),
                "hom_from_module": len(homs_my),
                "induced_rank": rank(induced_rows),
                "ok": ok,
            }
        )
    return ApproxCertificate("preenvelope", h, tuple(records), None, passed)


# -- the finitized small-object iteration ------------------------------------------


@dataclass(frozen=True)
class EtCompletionResult:
    status: str  # "ok" | "capped"
    ses: ShortExactSeq | None
    witness: FiltrationWitness | None
    stages: int
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _block_diag(p: int, mats: list[FpMatrix], rows: int, cols: int) -> FpMatrix:
    import numpy as np

    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r : r + m.rows, c : c + m.cols] = m.arr
        r += m.rows
        c += m.cols
    return FpMatrix(p, out)


def et_completion(
    K: ModuleRep, G: list[ModuleRep], cap: int = 32, dim_cap: int = 4096
) -> EtCompletionResult:
    """Iterated universal extensions until every Ext^1(g, -) vanishes.

    Each stage picks the first generator with nonvanishing Ext^1 into the
    current module and pushes out its e-fold presentation along a basis of
    class representatives, absorbing the classes while stacking g^e on top.
    The transfinite construction this imitates need not terminate at finite
    scale, so both the stage count and the module dimension are capped, and a
    capped run is an explicit failure carrying the last stage.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    p = K.p
    current = K
    embs: list[FpMatrix] = []  # embs[t] : K_t -> K_(t+1)
    records: list[tuple[int, FpMatrix, FpMatrix, int]] = []
    # (stage, upper rows in K_(stage+1) coords, psi raw, tag)
    stages = 0
    while True:
        pending = None
        for idx, g in enumerate(G):
            er = ext(1, g, current)
            if er.dimension > 0:
                pending = (idx, g, er)
                break
        if pending is None:
            break
        if stages >= cap:
            return EtCompletionResult(
                "capped", None, None, stages, f"stage cap {cap} reached"
            )
        idx, g, er = pending
        e = er.dimension
        syz, incl = syzygy_with_inclusion(g, 1)
        res_g = resolution_of(g)
        f0 = res_g.free(0)
        ds_syz = direct_power(syz, e)
        ds_f0 = direct_power(f0, e)
        ds_g = direct_power(g, e)
        phi_stack = ModuleMap(
            ds_syz.module,
            current,
            FpMatrix.vstack(p, [r.matrix for r in er.reps], current.dim),
        )
        incl_stack = ModuleMap(
            ds_syz.module,
            ds_f0.module,
            _block_diag(p, [incl.matrix] * e, syz.dim * e, f0.dim * e),
        )
        po = pushout(phi_stack, incl_stack)
        nxt = po.module
        if nxt.dim > dim_cap:
            return EtCompletionResult(
                "capped", None, None, stages, f"dimension cap {dim_cap} exceeded"
            )
        # cokernel leg onto g^e: induced by (0, e-fold augmentation)
        aug_stack = _block_diag(
            p, [res_g.augmentation.matrix] * e, f0.dim * e, g.dim * e
        )
        stacked = FpMatrix.vstack(
            p,
            [FpMatrix.zeros(p, current.dim, g.dim * e), aug_stack],
            g.dim * e,
        )
        pi = solve_matrix(po.quotient_proj.matrix, stacked)
        if pi is None:
            raise RuntimeError("cokernel projection failed to factor through pushout")
        # refine g^e into e single-generator layers via coordinate blocks
        for i in range(1, e + 1):
            tail = pi.take_cols(range(i * g.dim, e * g.dim))
            upper = kernel_basis(tail.T)
            psi = upper @ pi.take_cols(range((i - 1) * g.dim, i * g.dim))
            records.append((stages, upper, psi, idx))
        embs.append(po.from_first.matrix)
        current = nxt
        stages += 1

    P = current
    # composite embedding K -> P and the suffix embeddings per stage
    suffix: list[FpMatrix] = [FpMatrix.identity(p, P.dim)]
    for emb in reversed(embs):
        suffix.append(emb @ suffix[-1])
    suffix.reverse()  # suffix[t] : K_t -> P; suffix[-1] = id
    incl_KP = ModuleMap(K, P, suffix[0])
    N, projN = quotient(P, incl_KP)
    levels: list[FpMatrix] = [FpMatrix.zeros(p, 0, N.dim)]
    layers: list[FiltrationLayer] = []
    for stage, upper, psi, tag in records:
        rows_p = upper @ suffix[stage + 1]
        rows_n = row_space_basis(rows_p @ projN.matrix)
        lift = coords_in_row_space(rows_p @ projN.matrix, rows_n)
        if lift is None:
            raise RuntimeError("chain level failed to lift through the quotient")
        levels.append(rows_n)
        layers.append(FiltrationLayer(tag, lift @ psi))
    witness = FiltrationWitness(N, tuple(levels), tuple(layers))
    ses = ShortExactSeq(incl_KP, projN)

    # post-conditions: orthogonality really holds and the witness verifies
    for g in G:
        if ext(1, g, P).dimension != 0:
            raise RuntimeError("completion finished with nonvanishing Ext^1")
    report = filtration_verify(witness, G)
    if not report.ok:
        raise RuntimeError(f"completion witness failed: {report.first_failure()}")
    return EtCompletionResult("ok", ses, witness, stages)


# -- deconstructible precovers -------------------------------------------------------


@dataclass(frozen=True)
class PrecoverResult:
    status: str  # "ok" | "capped"
    map: ModuleMap | None
    certificate: ApproxCertificate | None
    witness: FiltrationWitness | None
    completion: EtCompletionResult
    kernel_vs_p: IsoVerdict | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok" and self.certificate is not None and self.certificate.passed


def deconstructible_precover(
    M: ModuleRep,
    G: list[ModuleRep],
    f: ModuleMap,
    f_witness: FiltrationWitness,
    test_set: list[ModuleRep] | None = None,
    cap: int = 32,
) -> PrecoverResult:
    """Upgrade f : F -> M (F filtered by G, image = the reachable trace) to a
    precover g : Q -> M with kernel orthogonal to the generators.

    Completes Ker f, pushes the completion out along Ker f -> F, and certifies
    the result directly: the precover property against the test battery and
    Ext^1-orthogonality of Ker g, checked extensionally, not inferred.
    """
    if f.target != M:
        raise ValueError("f must land in M")
    ker_rep, ker_incl = submodule_from_rows(f.source, f.kernel_rows())
    completion = et_completion(ker_rep, G, cap=cap)
    if not completion.ok:
        return PrecoverResult("capped", None, None, None, completion)
    ses = completion.ses
    assert ses is not None and completion.witness is not None
    P, N = ses.B, ses.C
    po = pushout(ses.incl, ker_incl)
    Q = po.module
    p = M.p
    # g : Q -> M induced by (0, f); psi : Q -> N induced by (proj, 0)
    g_mat = solve_matrix(
        po.quotient_proj.matrix,
        FpMatrix.vstack(p, [FpMatrix.zeros(p, P.dim, M.dim), f.matrix], M.dim),
    )
    psi_qn = solve_matrix(
        po.quotient_proj.matrix,
        FpMatrix.vstack(p, [ses.proj.matrix, FpMatrix.zeros(p, f.source.dim, N.dim)], N.dim),
    )
    if g_mat is None or psi_qn is None:
        raise RuntimeError("pushout legs failed to factor")
    g = ModuleMap(Q, M, g_mat)

    # chain for Q: F's chain embedded, then the completion layers pulled back
    into_q = po.from_second.matrix  # F -> Q, injective
    levels: list[FpMatrix] = [FpMatrix.zeros(p, 0, Q.dim)]
    layers: list[FiltrationLayer] = []
    for i in range(len(f_witness.levels) - 1):
        hi_local = f_witness.levels[i + 1]
        rows_q = row_space_basis(hi_local @ into_q)
        z = coords_in_row_space(hi_local @ into_q, rows_q)
        if z is None:
            raise RuntimeError("filtered chain failed to embed in the pushout")
        levels.append(rows_q)
        layers.append(
            FiltrationLayer(
                f_witness.layers[i].tag, z @ f_witness.layers[i].surjection
            )
        )
    n_witness = completion.witness
    for i in range(len(n_witness.levels) - 1):
        hi_n = n_witness.levels[i + 1]
        qs = quotient_space_with_section(N.dim, hi_n)
        kill = qs.projection.T
        rows_q = kernel_basis((psi_qn @ kill).T)
        mapped = rows_q @ psi_qn
        z = coords_in_row_space(hi_n, mapped)
        if z is None:
            raise RuntimeError("completion chain failed to pull back")
        levels.append(rows_q)
        layers.append(
            FiltrationLayer(
                n_witness.layers[i].tag, z @ n_witness.layers[i].surjection
            )
        )
    q_witness = FiltrationWitness(Q, tuple(levels), tuple(layers))

    battery = test_set if test_set is not None else list(G)
    cert = precover_verify(g, battery, with_kernel_orthogonality=True)
    ker_g, _ = submodule_from_rows(Q, g.kernel_rows())
    iso = is_isomorphic(ker_g, P) if ker_g.dim == P.dim else IsoVerdict(
        "no", reason=f"dim {ker_g.dim} != {P.dim}"
    )
    passed = cert.passed and all(d == 0 for d in (cert.kernel_orthogonality or ()))
    cert = ApproxCertificate(
        cert.kind, cert.map, cert.test_records, cert.kernel_orthogonality, passed
    )
    return PrecoverResult("ok", g, cert, q_witness, completion, iso)


# -- batteries and canonical covers ---------------------------------------------------


def filtered_battery(G: list[ModuleRep], cap: int = 24) -> list[FilteredModule]:
    """Generators plus single-class extensions between them, with witnesses."""
    out = [FilteredModule(g, trivial_witness(g, tag)) for tag, g in enumerate(G)]
    for i, gi in enumerate(G):
        for j, gj in enumerate(G):
            if len(out) >= cap:
                return out[:cap]
            for rep in ext(1, gi, gj).reps:
                if len(out) >= cap:
                    break
                ses = extension_from_class(gi, gj, rep)
                E = ses.B
                sub_rows = row_space_basis(ses.incl.matrix)
                c = coords_in_row_space(sub_rows, ses.incl.matrix)
                if c is None:
                    raise RuntimeError("extension inclusion rows are inconsistent")
                inv = solve_matrix(c, FpMatrix.identity(E.p, gj.dim))
                if inv is None:
                    raise RuntimeError("extension witness is not invertible")
                witness = FiltrationWitness(
                    E,
                    (
                        FpMatrix.zeros(E.p, 0, E.dim),
                        sub_rows,
                        FpMatrix.identity(E.p, E.dim),
                    ),
                    (
                        FiltrationLayer(j, inv),
                        FiltrationLayer(i, ses.proj.matrix),
                    ),
                )
                out.append(FilteredModule(E, witness))
    return out[:cap]


def trace_cover(
    M: ModuleRep, filtered: list[FilteredModule]
) -> tuple[ModuleMap, FiltrationWitness]:
    """The canonical surjection onto the trace: one summand per hom basis map."""
    parts: list[FilteredModule] = []
    mats: list[FpMatrix] = []
    for fm in filtered:
        for f in hom_basis(fm.module, M):
            parts.append(fm)
            mats.append(f.matrix)
    if not parts:
        z = zero_module(M.algebra, M.side)
        return (
            ModuleMap(z, M, FpMatrix.zeros(M.p, 0, M.dim)),
            zero_witness(M.algebra, M.side),
        )
    ds, witness = direct_sum_filtered(parts)
    f_map = ModuleMap(ds.module, M, FpMatrix.vstack(M.p, mats, M.dim))
    return f_map, witness
