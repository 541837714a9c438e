from .geometry import (
    compact_set,
    dist_to_hull,
    dist_to_set,
    inner,
    nearest_point,
    support_argmax,
    support_value,
)
from .setmaps import (
    constant_map,
    linear_map,
    parse_problem,
    pl_convex_function,
    pl_subdifferential_map,
    problem_spec,
    sample_grid,
    set_valued_map,
    table_map,
)
from .cm_engine import (
    check_condition4,
    class_report,
    classify_cyclic_monotone,
    classify_monotone,
    classify_wcm,
    classify_weakly_monotone,
    cm_sequence,
    extend_exhaustive,
    extend_inertial,
    extend_support,
    verify_cm,
)
from .potential import (
    g_lower,
    g_of_sequence,
    grow_family,
    membership_G,
    select_G,
    sequence_family,
    subgradient_test,
)
from .solver import (
    euler_solve,
    lyapunov_check,
    refine_study,
    trajectory,
    trajectory_cm_check,
    trajectory_residual,
)
