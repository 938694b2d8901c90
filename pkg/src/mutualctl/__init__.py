"""Numerical solver for mutual control problems on evolution systems.

Two coupled evolution equations x' = Ax + F(x, y), y' = Ay + G(x, y) on
[0, T] are linked by the proportionality final condition
x(T) - a x(0) = k (y(T) - b y(0)).  The package computes mild-solution pairs
by certified fixed-point iteration: a 2x2 convergent-to-zero matrix calculus
with exponent search supplies the contraction certificates, and the solvers
cover the semi-observability problem (y(0) prescribed; Lipschitz, growth and
mixed regimes) and the observability problem (both initial states recovered).
"""

from .errors import (
    CertificationWarning,
    DimensionMismatch,
    InnerNotContractive,
    InvalidCoefficients,
    MatrixNotConvergent,
    MaxIterExceeded,
    MutualControlError,
    OuterNotConverged,
    RangeError,
    SchemaError,
    SingularOrNotConvergent,
    TimeOutOfRange,
)
from .matrices import (
    NonnegMatrix2,
    ThetaCoefficients,
    ThetaSearchResult,
    ThetaStatus,
    eval_h,
    find_theta,
    inverse_I_minus,
    is_convergent_to_zero,
    m_theta,
    phi_minus,
    phi_plus,
    spectral_radius,
)
from .semigroups import (
    Heat1D,
    MatrixExp,
    ScalarExp,
    SemigroupSpec,
    apply,
    bound_CA,
    dim,
    is_compact,
    norm_S_at,
    norm_X,
)
from .trajectories import (
    TimeGrid,
    Trajectory,
    bielecki_norm,
    conv,
    conv_prefix,
    conv_shifted,
    read_csv,
    sup_norm,
    write_csv,
)
from .solvers import (
    LipschitzData,
    NonlinearPair,
    ProblemParams,
    SolveReport,
    SolverConfig,
    apply_N_obs,
    apply_N_semi,
    avramescu_solve_semi,
    build_M_obs,
    build_M_semi,
    control_defect,
    observability_solve,
    perov_solve_semi,
    report_kv_lines,
    schauder_constants,
    schauder_radii,
    schauder_solve_semi,
    semi_theta_coefficients,
    verify_localization,
)
from .nonlinearities import (
    BUILTIN_NAMES,
    ScalarNonlinearity,
    check_declared_constants,
    make_nonlinearity,
    pointwise_pair,
    scalar_lipschitz_data,
)
from .diffusion import (
    DiffusionConfig,
    derive_constants,
    heat_semigroup,
    run_demo,
    superpose,
    superposition_pair,
)

__version__ = "0.1.0"
