"""Critical graphs, periods and zero distributions of the quadratic
differential lambda^2 (z-a)(z-b) / (z^2-1)^2 dz^2."""

from ._core import (  # noqa: F401
    Tolerances,
    QDParams,
    ResidueSet,
    PoleType,
    PoleTypes,
    PropertyPReport,
    PathPolyline,
    BranchState,
    LaunchSpec,
    StepLimits,
    Fate,
    Topology,
    TrajectoryRecord,
    PeriodReport,
    ShortTrajectory,
    PoleLoop,
    CriticalGraph,
    PolySpec,
    RootSet,
    MeasureComparison,
    validate,
    from_jacobi,
    r_ab,
    r_ab_zeros,
    residues,
    classify_poles,
    property_p,
    root_at_infinity,
    continue_along,
    side_values,
    launch_directions,
    trace,
    build_graph,
    arc_period,
    loop_period,
    classify_arc,
    reference_arc,
    im_defect,
    teich_check,
    jacobi_build,
    jacobi_roots,
    cauchy,
    cauchy_ratio,
    quadratic_residual,
    compare,
    parse_complex,
)

__version__ = "0.1.0"
