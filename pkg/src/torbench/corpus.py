"""The built-in test corpus: five algebras spanning semisimple, local
self-injective and hereditary behavior, canonical small modules over each,
pinned Tor-pairs, and seeded random samplers used by every probe suite."""

from __future__ import annotations

import random

from .algebra import (
    Algebra,
    build_group_algebra_cyclic,
    build_truncated_poly,
    build_upper_triangular,
)
from .modules import (
    LEFT,
    RIGHT,
    ModuleRep,
    ShortExactSeq,
    cyclically_presented,
    free_module,
    quotient,
    random_module,
    submodule,
)
from .torpairs import TorPairGen, random_ses


def corpus_algebras() -> dict[str, Algebra]:
    return {
        "GF2": build_truncated_poly(2, 1),
        "D": build_truncated_poly(2, 2),
        "N3": build_truncated_poly(2, 3),
        "T2": build_upper_triangular(2, 2),
        "C3": build_group_algebra_cyclic(2, 3),
    }


def _quotient_by(a: Algebra, side: str, gens: list[list[int]]) -> ModuleRep:
    reg = free_module(a, side, 1)
    _, incl = submodule(reg, gens)
    return quotient(reg, incl)[0]


def corpus_modules() -> dict[str, ModuleRep]:
    """Canonical named modules; suffix L marks left modules."""
    alg = corpus_algebras()
    D, N3, T2, C3, GF2 = alg["D"], alg["N3"], alg["T2"], alg["C3"], alg["GF2"]
    out: dict[str, ModuleRep] = {}
    for name, a in alg.items():
        out[f"{name}.reg"] = free_module(a, RIGHT, 1)
        out[f"{name}.regL"] = free_module(a, LEFT, 1)
    # local algebras: the unique simple k = A/(x)
    out["D.k"] = cyclically_presented(D, [0, 1], RIGHT)
    out["D.kL"] = cyclically_presented(D, [0, 1], LEFT)
    out["N3.k"] = cyclically_presented(N3, [0, 1, 0], RIGHT)
    out["N3.kL"] = cyclically_presented(N3, [0, 1, 0], LEFT)
    out["N3.c2"] = cyclically_presented(N3, [0, 0, 1], RIGHT)  # k[x]/(x^2) as module
    out["N3.c2L"] = cyclically_presented(N3, [0, 0, 1], LEFT)
    # T2 basis order: E11, E12, E22
    out["T2.s1"] = _quotient_by(T2, RIGHT, [[0, 1, 0], [0, 0, 1]])  # E11 acts 1
    out["T2.s2"] = _quotient_by(T2, RIGHT, [[1, 0, 0]])  # E22 acts 1, projective
    out["T2.s1L"] = _quotient_by(T2, LEFT, [[0, 0, 1]])  # E11 acts 1
    out["T2.s2L"] = _quotient_by(T2, LEFT, [[1, 0, 0], [0, 1, 0]])  # E22 acts 1
    out["T2.p1"] = submodule(out["T2.reg"], [[1, 0, 0]])[0]  # E11*T2, dim 2
    # C3 = GF(2)[g]/(g^3 - 1): trivial module and the 2-dimensional simple
    out["C3.triv"] = cyclically_presented(C3, [1, 1, 0], RIGHT)
    out["C3.trivL"] = cyclically_presented(C3, [1, 1, 0], LEFT)
    out["C3.w"] = cyclically_presented(C3, [1, 1, 1], RIGHT)
    out["C3.wL"] = cyclically_presented(C3, [1, 1, 1], LEFT)
    out["GF2.k"] = free_module(GF2, RIGHT, 1)
    return out


def corpus_torpairs() -> dict[str, TorPairGen]:
    """The three pinned Tor-pairs used by the acceptance criteria."""
    alg = corpus_algebras()
    mods = corpus_modules()
    return {
        "D.k": TorPairGen(alg["D"], (mods["D.kL"],), "D.k"),
        "T2.simples": TorPairGen(
            alg["T2"], (mods["T2.s1L"], mods["T2.s2L"]), "T2.simples"
        ),
        "N3.k": TorPairGen(alg["N3"], (mods["N3.kL"],), "N3.k"),
    }


def approx_generator_sets() -> dict[str, list[ModuleRep]]:
    """Right-module generator sets driving the approximation suites."""
    mods = corpus_modules()
    return {
        "D": [mods["D.k"]],
        "T2": [mods["T2.s1"], mods["T2.s2"]],
        "C3": [mods["C3.triv"], mods["C3.w"]],
    }


def random_corpus_module(
    a: Algebra, rng: random.Random, side: str = RIGHT, max_rank: int = 3
) -> ModuleRep:
    return random_module(a, rng.getrandbits(32), max_gens=3, max_rank=max_rank, side=side)


def random_corpus_pair(rng: random.Random) -> tuple[str, ModuleRep, ModuleRep]:
    """(algebra name, random right module, random left module) over one algebra."""
    alg = corpus_algebras()
    name = rng.choice(sorted(alg))
    a = alg[name]
    return name, random_corpus_module(a, rng, RIGHT), random_corpus_module(a, rng, LEFT)


def random_corpus_ses(a: Algebra, rng: random.Random) -> ShortExactSeq:
    B = random_corpus_module(a, rng)
    return random_ses(B, rng)
