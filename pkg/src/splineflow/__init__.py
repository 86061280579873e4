"""Lagrangian evolution of closed planar curves on local B-spline stencils."""

from .bspline import (
    BSplineCurve,
    ControlPolygon,
    KnotVector,
    basis_value,
    clamped_knots,
    control_polygon,
)
from .cover import Cover, PointCloud, Stencil, ensure_counterclockwise, partition
from .errors import (
    BlowupError,
    ConfigurationError,
    DegenerateInputError,
    FitError,
    KnotMultiplicityError,
    OptimizationError,
    OutOfDomainError,
    SplineFlowError,
    TimeStepError,
)
from .evolve import (
    EvolutionConfig,
    FrameRecord,
    RunResult,
    VelocityField,
    fit_cover,
    interpolation_error,
    optimize_control_points,
    run,
    step_control_points,
    step_points,
    velocities,
    velocity_at,
)
from .fit import (
    FitReport,
    ParamAssignment,
    chord_parameterize,
    control_point_distance,
    control_point_distances,
    deviation_metric,
    fit_stencil,
    interpolate_stencil,
    refine_control_polygon,
)
from .geometry import (
    GeometrySample,
    annotate_geometry,
    arc_length,
    curvature,
    geometry_at,
    tangential_divergence,
    unit_normal,
)
from .reaction_diffusion import (
    FieldState,
    RDParams,
    cyclic_tridiagonal_solve,
    gaussian_initial_state,
    imex_step,
    laplace_beltrami,
    reaction_terms,
    steady_state,
    transfer_fields,
)
from .resample import (
    CompositeCurve,
    ResampleResult,
    insert_far,
    redistribute,
    remove_close,
    resample_pass,
)
from .shapes import asterisk_points, circle_points, load_points
from .studies import converge_study, exact_shrinking_radius, parameter_study

__version__ = "0.1.0"
