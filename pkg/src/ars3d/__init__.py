"""Numerical tools for almost-Riemannian geometry on the semidirect products G(theta) = R x_theta R^2."""

from .ars import (
    ARS,
    CrossingResult,
    Distribution,
    Exponential,
    LinearFlow,
    ar_norm,
    bracket,
    crossings,
    frame_at,
    is_subalgebra,
    larc,
    locus_F,
    locus_slice,
    nilradical_line,
)
from .classify import ClassificationResult, canonical_ars, class_partition, classify, normalize_e0, orthonormal_complement
from .errors import ArsError, InvalidARSError, RankError
from .fields import InvariantField, LinearField, derivation_of, eval_linear, flow, flow_invariant, rank_two
from .group import IDENTITY, AlgebraElement, GroupPoint, Tangent, dL, exp_g, inv, mul
from .linalg2 import Family, ThetaForm, commutant_basis, commutes, expm2, lambda_op, theta_matrix
from .morphisms import (
    Automorphism,
    Composite,
    LeftTranslation,
    AffineCandidate,
    LinearCandidate,
    decompose,
    is_automorphism,
    pullback,
    verify_flow_conjugation,
    verify_isometry,
)

__all__ = [
    "ARS",
    "CrossingResult",
    "Distribution",
    "Exponential",
    "LinearFlow",
    "ar_norm",
    "bracket",
    "crossings",
    "frame_at",
    "is_subalgebra",
    "larc",
    "locus_F",
    "locus_slice",
    "nilradical_line",
    "ClassificationResult",
    "canonical_ars",
    "class_partition",
    "classify",
    "normalize_e0",
    "orthonormal_complement",
    "ArsError",
    "InvalidARSError",
    "RankError",
    "InvariantField",
    "LinearField",
    "derivation_of",
    "eval_linear",
    "flow",
    "flow_invariant",
    "rank_two",
    "IDENTITY",
    "AlgebraElement",
    "GroupPoint",
    "Tangent",
    "dL",
    "exp_g",
    "inv",
    "mul",
    "Family",
    "ThetaForm",
    "commutant_basis",
    "commutes",
    "expm2",
    "lambda_op",
    "theta_matrix",
    "Automorphism",
    "Composite",
    "LeftTranslation",
    "AffineCandidate",
    "LinearCandidate",
    "decompose",
    "is_automorphism",
    "pullback",
    "verify_flow_conjugation",
    "verify_isometry",
]

__version__ = "0.1.0"
