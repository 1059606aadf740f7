"""Levy-type operators, symbols and semigroups on the d-torus and SU(2)."""

__version__ = "0.1.0"

from .errors import (
    AtomAtIdentity,
    GroupMismatch,
    InfiniteJumpMass,
    InvalidTestFunction,
    LieflowError,
    MissingWeight,
    NegativeTime,
    NonConstantCharacteristics,
    OutOfChart,
    ResolutionTooLow,
    SeparationViolated,
)
from .groups import (
    Chart,
    GroupElement,
    GroupId,
    as_matrix,
    canonical_coords,
    exp_map,
    haar_quadrature,
    identity,
    inverse,
    multiply,
)
from .reps import Irrep, Weight, casimir, derived_rep, enumerate_weights, irrep, rep_matrix
from .fourier import (
    FourierCoefficients,
    decay_profile,
    evaluate,
    forward_ft,
    inverse_ft,
    left_translate,
    plancherel_norm2,
    sugiura_zeta,
)
from .generator import (
    Characteristics,
    LevyMeasure,
    ModulatedKernel,
    PowerDensity,
    apply_generator,
    as_operator,
    compensator_H,
    hunt_apply,
    levy_integrability_check,
)
from .symbol import (
    Symbol,
    assemble_symbol,
    evolve_semigroup,
    growth_bound_check,
    symbol_at,
    symbol_via_conjugation,
    synthesize,
)
from .simulate import PathConfig, PathEnsemble, empirical_semigroup, simulate_paths, small_time_limit
from .pmp import (
    ExtractedCharacteristics,
    PmpReport,
    almost_positive_check,
    anchored_test_functions,
    extract_characteristics,
    pmp_check,
    random_test_functions,
)
