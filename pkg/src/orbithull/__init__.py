"""Majorization and unitary-orbit convex hulls in multi-matrix C*-algebras."""

from .algebra import (
    CentralElement,
    HermitianElement,
    MultiMatrixAlgebra,
    TraceWeights,
    algebra_of,
    build_algebra,
    center_valued_trace,
    central_to_element,
    element_from_obj,
    element_to_obj,
    embed_element,
    evaluate_trace,
    extremal_traces,
    identity_element,
    zero_element,
)
from .errors import (
    BadDimension,
    BadEpsilon,
    DecompositionStall,
    EmptyAlgebra,
    EpsilonTooSmall,
    InputError,
    LengthMismatch,
    NoConvergence,
    NotContraction,
    NotDoublyStochastic,
    NotHermitian,
    NotMajorized,
    NotPositive,
    NumericalError,
    OrbitHullError,
    RankOverflow,
    ShapeMismatch,
)
from .majorization import (
    CanonicalPair,
    canonical_pair,
    finite_conditions,
    majorize,
    orbit_distance,
    quotient_norm_check,
    spectrum_hull_check,
    submaj_distance,
    tracial_submajorize,
    zero_in_hull,
)
from .oracle import diagonal_majorization_oracle, frank_wolfe_distance, generate_pair
from .spectral import (
    SpectrumProfile,
    eig_hermitian,
    functional_calculus,
    negative_part,
    operator_norm,
    positive_part,
    shifted_positive_part,
    spectrum_profile,
)
from .synthesis import (
    ConvexCombination,
    ProbeResult,
    apply_combination,
    birkhoff_decompose,
    dixmier_pinch,
    hlp_transfer,
    synthesize_combination,
    uniform_probe,
)

__version__ = "0.1.0"
