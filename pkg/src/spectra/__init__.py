"""Eigenvalue localization in spectral gaps of self-adjoint block operator pencils.

The package factors a two-by-two block pencil through its second block,
tracks the negative-inertia count of the resulting transfer matrix across a
spectral gap, and turns jumps of that count into localized eigenvalues with
multiplicities, kernel lifts, and negative-type certificates.
"""

from .galerkin import (
    BasisSpec,
    IncompatibleForm,
    Mesh1D,
    build_example_dirac,
    build_example_quartic,
    build_example_transport,
    evaluate,
    form_matrix,
    resolvent_check_transport,
    resolvent_kernel_value,
)
from .hermat import (
    HermitianMatrix,
    Inertia,
    LdlFactorization,
    NoConvergence,
    NotPositiveDefinite,
    SingularFactor,
    cholesky,
    default_zero_tol,
    eigh,
    eigh_gen,
    inertia_of,
    ldl_factor,
    solve_with,
)
from .oracle import (
    RootReport,
    StepTooCoarse,
    dense_spectrum,
    dirac_exact,
    quartic_char_roots,
    transport_exact,
)
from .pencil import (
    GapInterval,
    IllConditioned,
    InsideT22Spectrum,
    NegativityViolated,
    OperatorFunctionPencil,
    RiggedBlockPencil,
    assemble_full,
    d1_gram,
    fs_residual,
    gap_of,
    opfunc_from_linear,
    opfunc_schur,
    schur,
    schur_derivative,
    t22_spectrum,
)
from .solver import (
    ABOVE_GAP,
    BisectionBudgetExceeded,
    EigenvalueHit,
    GapMismatch,
    LambdaCurveTable,
    NegativeTypeCertificate,
    SolverConfig,
    TypeViolation,
    count_between,
    kernel_basis,
    lambda_curves,
    lift,
    locate,
    locate_general,
    negative_type_certificate,
    nth_eigenvalue,
    nu,
)

__version__ = "0.1.0"

__all__ = [
    "ABOVE_GAP",
    "BasisSpec",
    "BisectionBudgetExceeded",
    "EigenvalueHit",
    "GapInterval",
    "GapMismatch",
    "HermitianMatrix",
    "IllConditioned",
    "IncompatibleForm",
    "Inertia",
    "InsideT22Spectrum",
    "LambdaCurveTable",
    "LdlFactorization",
    "Mesh1D",
    "NegativeTypeCertificate",
    "NegativityViolated",
    "NoConvergence",
    "NotPositiveDefinite",
    "OperatorFunctionPencil",
    "RiggedBlockPencil",
    "RootReport",
    "SingularFactor",
    "SolverConfig",
    "StepTooCoarse",
    "TypeViolation",
    "assemble_full",
    "build_example_dirac",
    "build_example_quartic",
    "build_example_transport",
    "cholesky",
    "count_between",
    "d1_gram",
    "default_zero_tol",
    "dense_spectrum",
    "dirac_exact",
    "eigh",
    "eigh_gen",
    "evaluate",
    "form_matrix",
    "fs_residual",
    "gap_of",
    "inertia_of",
    "kernel_basis",
    "lambda_curves",
    "ldl_factor",
    "lift",
    "locate",
    "locate_general",
    "negative_type_certificate",
    "nth_eigenvalue",
    "nu",
    "opfunc_from_linear",
    "opfunc_schur",
    "quartic_char_roots",
    "resolvent_check_transport",
    "resolvent_kernel_value",
    "schur",
    "schur_derivative",
    "solve_with",
    "t22_spectrum",
    "transport_exact",
    "__version__",
]
