"""Spiral and chirp geometry: generation, box dimension, content, return maps."""

from .boxcount import (
    DimensionEstimate,
    ScaleCounts,
    ScaleLadder,
    WindowPolicy,
    box_count,
    box_count_brute,
    fit_dimension,
    fit_dimension_anchored,
    fit_dimension_drift,
    graph_dimension,
    graph_ladder,
    ladder_from_turn_positions,
)
from .curve import Curve
from .errors import (
    BudgetError,
    InsufficientTurnsError,
    MemoryBudgetError,
    MixedSignError,
    NumericalError,
    PartialCurveError,
    SpiraldimError,
    StiffnessError,
    UnderSampledError,
    ValidationError,
)
from .families import (
    chirp_phase_state,
    chirp_value,
    eval_family,
    ode_coefficients_at_time,
    ode_coefficients_of_z,
    pq_derivatives,
    reflected_value,
    trajectory_state,
)
from .generators import (
    gen_chirp_graph,
    gen_chirp_phase_curve,
    gen_phase_trajectory,
    gen_power_spiral,
    gen_reflected_graph,
)
from .integrators import (
    attracted_branch_z0,
    gen_hopf_trajectory,
    integrate_cubic_system,
    integrate_normal_form,
)
from .measure import ContentVerdict, MeasureProfile, content_profile, epsilon_measure
from .phaseplane import (
    ArcLengthProfile,
    BiLipschitzReport,
    CurveRegime,
    ExponentFit,
    PolarProfile,
    ReturnSequence,
    WavyReport,
    arc_length_profile,
    bilipschitz_ratio_scan,
    check_radially_decreasing,
    classify_curve,
    envelope_exponent,
    fit_return_exponent,
    lift_to_surface,
    poincare_sequence,
    project,
    unwrap_phase,
)
from .specs import (
    ChirpSpec,
    NormalFormSpec,
    PowerSpiralSpec,
    SurfaceSpec,
    TrajectoryFamilySpec,
)
from .suites import (
    ALL_SUITES,
    SuiteResult,
    SuiteRow,
    emit_report,
    run_suite,
    suite_degenerate_content,
    suite_hopf,
    suite_poincare,
    suite_projections,
    suite_theorem_phase,
    suite_tricot_baselines,
    trajectory_dimension_prediction,
)

__version__ = "0.1.0"
