"""Exact-arithmetic workbench for Tor-pairs, relative projective dimensions
and module approximations over finite-dimensional algebras on GF(p)."""

from .algebra import (
    Algebra,
    build_group_algebra_cyclic,
    build_truncated_poly,
    build_upper_triangular,
    opposite,
    validate_algebra,
)
from .approximation import (
    ApproxCertificate,
    FiltrationWitness,
    deconstructible_precover,
    et_completion,
    filtered_battery,
    filtration_verify,
    gen_membership,
    precover_verify,
    preenvelope_candidate,
    preenvelope_verify,
    trace,
    trace_cover,
)
from .homology import (
    FreeResolution,
    connecting_check,
    ext,
    ext_tor_duality_check,
    free_resolution,
    product_comparison,
    syzygy,
    tensor,
    tor,
)
from .linalg import FpMatrix, image_basis, kernel_basis, quotient_space, rref, solve
from .modules import (
    ModuleMap,
    ModuleRep,
    ShortExactSeq,
    cyclically_presented,
    dual,
    free_module,
    hom_basis,
    is_isomorphic,
    pushout,
    quotient,
    random_module,
    submodule,
    validate_module,
)
from .suites import run_suite
from .torpairs import (
    ExtNat,
    TorPairGen,
    finite_product_pd,
    hereditary_probe,
    in_t,
    rel_pd,
    ses_dimension_check,
    ses_dimension_rule,
    xpure_check,
    xpure_quotient_closure_probe,
)
from .workbench import Report, WorkbenchDocument, load, run

__version__ = "0.1.0"
