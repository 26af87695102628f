"""Named seeded property suites over the built-in corpus.

Every suite is deterministic given its seed; every "for all n" payload states
its bound; probes report how often their assertions actually fired.  A suite
never reports pass while any sub-assertion failed, and capped or inconclusive
outcomes are never coerced to pass.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import opposite, validate_algebra
from .approximation import (
    deconstructible_precover,
    et_completion,
    filtered_battery,
    filtration_verify,
    preenvelope_candidate,
    preenvelope_verify,
    trace_cover,
)
from .corpus import (
    approx_generator_sets,
    corpus_algebras,
    corpus_modules,
    corpus_torpairs,
    random_corpus_module,
    random_corpus_pair,
    random_corpus_ses,
)
from .homology import (
    connecting_check,
    ext,
    ext_tor_duality_check,
    extension_from_class,
    free_resolution,
    product_comparison,
    tensor,
    tor,
    tor_dims,
)
from .linalg import FpMatrix, image_basis, kernel_basis, rank, rref, solve
from .modules import (
    LEFT,
    RIGHT,
    ModuleMap,
    direct_sum,
    dual,
    free_module,
    hom_basis,
    is_isomorphic,
    quotient,
    random_module,
    submodule,
    validate_module,
)
from .torpairs import (
    ExtNat,
    TorPairGen,
    extnat_max,
    finite_product_pd,
    hereditary_probe,
    in_t,
    random_ses,
    random_t_member,
    rel_pd,
    rel_pd_via_syzygy,
    rel_pd_via_tor,
    ses_dimension_check,
    xpure_check,
    xpure_quotient_closure_probe,
)


@dataclass
class SuiteResult:
    name: str
    seed: int
    status: str  # "pass" | "fail" | "inconclusive" | "capped"
    payload: dict
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def _finish(name, seed, payload, failures, capped=0) -> SuiteResult:
    if failures:
        status = "fail"
    elif capped:
        status = "capped"
    else:
        status = "pass"
    return SuiteResult(name, seed, status, payload, list(failures))


# -- exact linear algebra -------------------------------------------------------


def suite_linalg(seed: int, trials: int = 200, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    primes = [2, 3, 5, 7]
    for t in range(trials):
        p = rng.choice(primes)
        r, c = rng.randint(0, 6), rng.randint(0, 6)
        m = FpMatrix(p, [[rng.randrange(p) for _ in range(c)] for _ in range(r)] or [[]])
        if r == 0 or c == 0:
            m = FpMatrix.zeros(p, r, c)
        if rank(m) != rank(m.T):
            failures.append(f"trial {t}: rank(m) != rank(m^T)")
        ker = kernel_basis(m)
        if ker.rows + rank(m) != m.cols:
            failures.append(f"trial {t}: rank-nullity fails")
        if ker.rows and not (m @ ker.T).is_zero():
            failures.append(f"trial {t}: kernel rows are not killed")
        rr = rref(m)
        if rref(rr.matrix).matrix != rr.matrix:
            failures.append(f"trial {t}: rref is not idempotent")
        if c > 0:
            x = [rng.randrange(p) for _ in range(c)]
            b = [int(v) for v in (m.arr @ list(x)) % p] if r else []
            got = solve(m, b)
            if got is None:
                failures.append(f"trial {t}: solvable system reported unsolvable")
            elif r and [int(v) for v in (m.arr @ list(got)) % p] != b:
                failures.append(f"trial {t}: solve returned a non-solution")
        if image_basis(m).rows != rank(m):
            failures.append(f"trial {t}: image basis has wrong rank")
    return _finish("linalg", seed, {"trials": trials}, failures)


# -- algebras and modules ----------------------------------------------------------


def suite_algebra(seed: int, trials: int = 50, bound: int = 8, cap: int = 32) -> SuiteResult:
    failures = []
    for name, a in corpus_algebras().items():
        v = validate_algebra(a)
        if not v.ok:
            failures.append(f"{name}: {v.first_failure()}")
        op = opposite(a)
        if not validate_algebra(op).ok:
            failures.append(f"{name}: opposite fails validation")
        if opposite(op) != a:
            failures.append(f"{name}: opposite is not involutive")
        if op.dim != a.dim:
            failures.append(f"{name}: opposite changed dimension")
        commutative = all(
            a.mul[i][j] == a.mul[j][i] for i in range(a.dim) for j in range(a.dim)
        )
        if commutative and op.mul != a.mul:
            failures.append(f"{name}: opposite of commutative algebra differs")
    return _finish("algebra", seed, {"algebras": len(corpus_algebras())}, failures)


def suite_modules(seed: int, trials: int = 60, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    alg = corpus_algebras()
    failures = []
    for t in range(trials):
        a = alg[rng.choice(sorted(alg))]
        side = rng.choice([LEFT, RIGHT])
        M = random_module(a, rng.getrandbits(32), side=side)
        if not validate_module(M).ok:
            failures.append(f"trial {t}: random module fails validation")
            continue
        gens = [[rng.randrange(a.p) for _ in range(M.dim)] for _ in range(rng.randint(0, 2))]
        sub, incl = submodule(M, gens)
        quo, proj = quotient(M, incl)
        if sub.dim + quo.dim != M.dim:
            failures.append(f"trial {t}: sub + quotient dims do not add up")
        if not incl.is_equivariant() or not proj.is_equivariant():
            failures.append(f"trial {t}: inclusion/projection not equivariant")
        if dual(dual(M)) != M:
            failures.append(f"trial {t}: double dual differs")
        N = random_module(a, rng.getrandbits(32), side=side)
        for f in hom_basis(M, N):
            if not f.is_equivariant():
                failures.append(f"trial {t}: hom basis element not equivariant")
        v = is_isomorphic(M, M)
        if v.kind != "yes":
            failures.append(f"trial {t}: module not isomorphic to itself")
        elif not (v.witness.is_equivariant() and rank(v.witness.matrix) == M.dim):
            failures.append(f"trial {t}: reflexive witness invalid")
    return _finish("modules", seed, {"trials": trials}, failures)


# -- homology invariants -------------------------------------------------------------


def suite_homology(seed: int, trials: int = 30, bound: int = 4, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        name, M, N = random_corpus_pair(rng)
        res = free_resolution(M, 3)
        if not res.verify_exact(2):
            failures.append(f"trial {t}: resolution not exact over {name}")
        if tor(0, M, N).dimension != tensor(M, N).dim:
            failures.append(f"trial {t}: Tor_0 != tensor dimension")
        Msame = random_corpus_module(corpus_algebras()[name], rng)
        if ext(0, M, Msame).dimension != len(hom_basis(M, Msame)):
            failures.append(f"trial {t}: Ext^0 != Hom dimension")
        # additivity in the first argument
        two = direct_sum([M, Msame]).module
        for n in (0, 1, 2):
            lhs = tor(n, two, N).dimension
            rhs = tor(n, M, N).dimension + tor(n, Msame, N).dimension
            if lhs != rhs:
                failures.append(f"trial {t}: Tor_{n} not additive")
        # long exact sequence consistency on a random SES
        ses = random_corpus_ses(corpus_algebras()[name], rng)
        rep = connecting_check(ses, N, bound)
        if not rep.ok:
            failures.append(f"trial {t}: connecting check failed: {rep.failures[0]}")
        # finite product comparison map is an isomorphism
        pc = product_comparison([M, Msame], N)
        if not pc.isomorphism:
            failures.append(f"trial {t}: finite product comparison not iso")
    return _finish("homology", seed, {"trials": trials, "bound": bound}, failures)


# -- acceptance-grade suites -----------------------------------------------------------


def suite_tor_balance(seed: int, trials: int = 100, bound: int = 4, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        name, M, N = random_corpus_pair(rng)
        first = tor_dims(M, N, bound, resolve="first")
        second = tor_dims(M, N, bound, resolve="second")
        if first != second:
            failures.append(
                f"pair {t} over {name}: balance fails: {first} vs {second}"
            )
    return _finish("tor-balance", seed, {"pairs": trials, "max_degree": bound}, failures)


def suite_dimension_tor(seed: int, trials: int = 100, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    compared = 0
    for pair_name, tp in sorted(corpus_torpairs().items()):
        for t in range(trials):
            M = random_corpus_module(tp.algebra, rng)
            via_tor = rel_pd_via_tor(M, tp, bound)
            via_syz = rel_pd_via_syzygy(M, tp, bound)
            compared += 1
            if via_tor != via_syz:
                failures.append(
                    f"{pair_name} module {t}: Tor route {via_tor} != syzygy route {via_syz}"
                )
    return _finish(
        "dimension-tor", seed, {"modules_per_pair": trials, "bound": bound, "compared": compared}, failures
    )


def suite_dimension_arithmetic(seed: int, trials: int = 500, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    counts = {"pass": 0, "inconclusive": 0, "fail": 0}
    pairs = sorted(corpus_torpairs().items())
    for t in range(trials):
        pair_name, tp = pairs[t % len(pairs)]
        ses = random_corpus_ses(tp.algebra, rng)
        rep = ses_dimension_check(ses, tp, bound)
        counts[rep.status] += 1
        if rep.status == "fail":
            failures.append(
                f"trial {t} over {pair_name}: casework violated "
                f"(pdA={rep.pd_a}, pdB={rep.pd_b}, pdC={rep.pd_c}, predicted {rep.prediction})"
            )
    return _finish(
        "dimension-arithmetic", seed, {"trials": trials, "bound": bound, **counts}, failures
    )


def suite_fixed_values(seed: int, trials: int = 50, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    mods = corpus_modules()
    alg = corpus_algebras()
    failures = []
    k, kL, regD = mods["D.k"], mods["D.kL"], mods["D.reg"]
    dims = tor_dims(k, kL, bound)
    if dims != [1] * (bound + 1):
        failures.append(f"Tor_n(k,k) over D expected all 1 up to {bound}, got {dims}")
    if ext(1, k, k).dimension != 1:
        failures.append("Ext^1(k,k) over D expected 1")
    if ext(1, k, regD).dimension != 0:
        failures.append("Ext^1(k,D) over D expected 0")
    for t in range(trials):
        M = random_corpus_module(alg["C3"], rng)
        N = random_corpus_module(alg["C3"], rng, side=LEFT)
        if tor(1, M, N).dimension != 0:
            failures.append(f"C3 pair {t}: Tor_1 nonzero over a semisimple algebra")
    for t in range(trials):
        M = random_corpus_module(alg["T2"], rng)
        N = random_corpus_module(alg["T2"], rng, side=LEFT)
        dims = tor_dims(M, N, 4)
        if any(dims[n] != 0 for n in range(2, 5)):
            failures.append(f"T2 pair {t}: Tor_n nonzero for n >= 2: {dims}")
    return _finish(
        "fixed-values", seed, {"random_pairs": trials, "bound": bound, "t2_degree_cap": 4}, failures
    )


def suite_xpure_closure(seed: int, trials: int = 200, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    payload = {"trials_per_pair": trials}
    for pair_name, tp in sorted(corpus_torpairs().items()):
        rep = xpure_quotient_closure_probe(tp, rng.getrandbits(32), trials)
        payload[f"fired_{pair_name}"] = rep.fired
        if not rep.ok:
            failures.extend(f"{pair_name}: {v}" for v in rep.violations)
    return _finish("xpure-closure", seed, payload, failures)


def suite_hereditary(seed: int, trials: int = 40, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    payload = {"trials_per_pair": trials, "bound": bound}
    for pair_name, tp in sorted(corpus_torpairs().items()):
        rep = hereditary_probe(tp, rng.getrandbits(32), trials, bound)
        payload[f"checked_{pair_name}"] = rep.fired
        if not rep.ok:
            failures.extend(f"{pair_name}: {v}" for v in rep.violations)
    return _finish("hereditary", seed, payload, failures)


def suite_torpair_closure(seed: int, trials: int = 40, bound: int = 8, cap: int = 32) -> SuiteResult:
    """T-membership closed under finite sums, summands and extensions."""
    rng = random.Random(seed)
    failures = []
    extensions_tested = 0
    # the pinned pairs plus the pair generated by the projective left simple
    # over T2, whose left class is everything and so admits nonsplit
    # extensions between members
    pairs = dict(corpus_torpairs())
    pairs["T2.proj-simple"] = TorPairGen(
        corpus_algebras()["T2"], (corpus_modules()["T2.s1L"],), "T2.proj-simple"
    )
    for pair_name, tp in sorted(pairs.items()):
        for t in range(trials):
            A = random_t_member(tp, rng)
            B = random_t_member(tp, rng)
            both = direct_sum([A, B]).module
            if not in_t(both, tp):
                failures.append(f"{pair_name} trial {t}: sum of members left T")
            M = random_corpus_module(tp.algebra, rng)
            ds = direct_sum([M, free_module(tp.algebra, RIGHT, 1)]).module
            if in_t(ds, tp) != in_t(M, tp):
                failures.append(f"{pair_name} trial {t}: summand closure fails")
            if A.dim and B.dim:
                for rep in ext(1, A, B).reps[:2]:
                    E = extension_from_class(A, B, rep).B
                    extensions_tested += 1
                    if not in_t(E, tp):
                        failures.append(
                            f"{pair_name} trial {t}: extension of members left T"
                        )
    return _finish(
        "torpair-closure",
        seed,
        {"trials_per_pair": trials, "extensions": extensions_tested},
        failures,
    )


def suite_ext_tor_duality(seed: int, trials: int = 100, bound: int = 4, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        name, M, N = random_corpus_pair(rng)
        n = rng.randint(0, bound)
        rep = ext_tor_duality_check(n, M, N)
        if not rep.ok:
            failures.append(
                f"pair {t} over {name}: Ext^{n}(M, N*) = {rep.ext_dim} != "
                f"Tor_{n}(M, N) = {rep.tor_dim}"
            )
    return _finish("ext-tor-duality", seed, {"pairs": trials, "max_degree": bound}, failures)


def suite_product_dimension(seed: int, trials: int = 100, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    pairs = sorted(corpus_torpairs().items())
    for t in range(trials):
        pair_name, tp = pairs[t % len(pairs)]
        family = [
            random_corpus_module(tp.algebra, rng, max_rank=2)
            for _ in range(rng.randint(1, 4))
        ]
        rep = finite_product_pd(family, tp, bound)
        if not rep.ok:
            failures.append(
                f"family {t} over {pair_name}: pd(sum) = {rep.combined} but "
                f"max = {rep.expected}"
            )
    return _finish("product-dimension", seed, {"families": trials, "bound": bound}, failures)


def suite_approximation(seed: int, trials: int = 20, bound: int = 8, cap: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    capped = 0
    mods = corpus_modules()
    alg = corpus_algebras()

    # pinned completion over D: one stage, middle term the regular module
    res = et_completion(mods["D.k"], [mods["D.k"]], cap=cap)
    if not res.ok:
        failures.append("et_completion over D was capped")
    else:
        if res.stages != 1:
            failures.append(f"et_completion over D took {res.stages} stages, expected 1")
        if res.ses.A.dim != 1 or res.ses.B.dim != 2 or res.ses.C.dim != 1:
            failures.append("et_completion over D produced wrong dimensions")
        if is_isomorphic(res.ses.B, mods["D.reg"]).kind != "yes":
            failures.append("et_completion middle term is not the regular module")
        if ext(1, mods["D.k"], res.ses.B).dimension != 0:
            failures.append("Ext^1(k, P) did not vanish after completion")

    gen_sets = approx_generator_sets()
    batteries = {
        name: filtered_battery(gens, cap=24) for name, gens in gen_sets.items()
    }
    names = sorted(gen_sets)
    for t in range(trials):
        name = names[t % len(names)]
        G = gen_sets[name]
        battery = batteries[name]
        M = random_corpus_module(alg[name], rng, max_rank=2)
        f, w = trace_cover(M, battery)
        result = deconstructible_precover(
            M, G, f, w, test_set=[fm.module for fm in battery], cap=cap
        )
        if result.status == "capped":
            capped += 1
            failures.append(f"precover input {t} over {name}: capped")
            continue
        if not result.certificate.passed:
            failures.append(f"precover input {t} over {name}: certificate failed")
        if any(d != 0 for d in result.certificate.kernel_orthogonality or ()):
            failures.append(f"precover input {t} over {name}: kernel not orthogonal")
        if not filtration_verify(result.witness, G).ok:
            failures.append(f"precover input {t} over {name}: witness failed")
    for t in range(trials):
        name = names[t % len(names)]
        G = gen_sets[name]
        M = random_corpus_module(alg[name], rng, max_rank=2)
        h = preenvelope_candidate(M, G)
        test_set = list(G) + [
            direct_sum([a, b]).module for a in G for b in G
        ]
        cert = preenvelope_verify(h, test_set)
        if not cert.passed:
            failures.append(f"preenvelope input {t} over {name}: verify failed")
    payload = {"pipeline_inputs": trials, "capped": capped, "cap": cap}
    return _finish("approximation", seed, payload, failures, capped=capped)


SUITES = {
    "linalg": suite_linalg,
    "algebra": suite_algebra,
    "modules": suite_modules,
    "homology": suite_homology,
    "tor-balance": suite_tor_balance,
    "dimension-tor": suite_dimension_tor,
    "dimension-arithmetic": suite_dimension_arithmetic,
    "fixed-values": suite_fixed_values,
    "xpure-closure": suite_xpure_closure,
    "hereditary": suite_hereditary,
    "torpair-closure": suite_torpair_closure,
    "ext-tor-duality": suite_ext_tor_duality,
    "product-dimension": suite_product_dimension,
    "approximation": suite_approximation,
}


def run_suite(
    name: str,
    seed: int = 0,
    trials: int | None = None,
    bound: int | None = None,
    cap: int | None = None,
) -> SuiteResult | list[SuiteResult]:
    """Run one named suite, or all of them in a fixed order for name "all".

    Omitted parameters fall back to each suite's own defaults, which are sized
    to the acceptance criteria.
    """
    if name == "all":
        return [run_suite(n, seed, trials, bound, cap) for n in sorted(SUITES)]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))} or 'all'")
    fn = SUITES[name]
    kwargs = {}
    if trials is not None:
        kwargs["trials"] = trials
    if bound is not None:
        kwargs["bound"] = bound
    if cap is not None:
        kwargs["cap"] = cap
    return fn(seed, **kwargs)
