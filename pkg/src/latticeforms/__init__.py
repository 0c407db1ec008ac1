"""Exact desk-scale computation of discrete distance-graph multilinear forms on
Z^d, scaling-exponent fits against the conjectured sharp exponent
d/2(1 - sum 1/p_i), and exact rational membership in the associated
l^p-improving exponent regions."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    LatticeFormsError,
    CapacityError,
    AdmissibilityError,
    DimensionMismatch,
    StrategyUnsupported,
    DimensionFloor,
    DegenerateFit,
    ZeroForm,
)
from .backends import BACKEND, USE_NUMBA  # noqa: F401
from .lattice import (  # noqa: F401
    DEFAULT_BUDGET,
    SphereShell,
    BallRegion,
    enumerate_sphere,
    enumerate_ball,
    sphere_cardinality,
    ball_cardinality,
    shell_to_text,
    shell_from_text,
    ball_to_text,
    ball_from_text,
)
from .graphs import (  # noqa: F401
    DistanceGraph,
    catalog_graph,
    path_graph,
    complete_graph,
    graph_to_json,
    graph_from_json,
    CATALOG_NAMES,
)
from .counting import (  # noqa: F401
    ConfigurationCount,
    count_configurations,
    completion_count,
    admissible_radii,
    cycle_walk_counts,
    mutual_pair_count,
)
from .functions import (  # noqa: F401
    FunctionOnLattice,
    TestFunctionSpec,
    materialize,
    lp_norm,
    conjugate,
    load_function,
    save_function,
)
from .forms import (  # noqa: F401
    NormalizationMode,
    FormValue,
    STRATEGIES,
    STRATEGY_AUTO,
    STRATEGY_BACKTRACKING,
    STRATEGY_CHAIN,
    STRATEGY_TREE,
    evaluate_form,
    spherical_average,
    operator_apply,
)
from .halfspaces import (  # noqa: F401
    GuardedInequality,
    HalfSpaceSystem,
    MembershipVerdict,
    region_parameters,
)
from .regions import (  # noqa: F401
    HolderPoint,
    RegionSpec,
    ValidationReport,
    builtin_region,
    builtin_halfspaces,
    hull_membership,
    facet_system,
    conjectured_exponent,
    interpolated_exponent,
    cross_validate,
    dimension_floor,
    parse_rational,
    region_to_json,
    region_from_json,
    load_region,
    save_region,
)
from .sweeps import (  # noqa: F401
    SweepPlan,
    SweepRow,
    SweepTable,
    FitResult,
    SharpnessResult,
    CounterexampleReport,
    run_sweep,
    fit_exponent,
    sharpness_check,
    necessary_condition_probe,
    probe_sweep,
    subgraph_counterexample,
    sweep_table_to_csv,
    sweep_table_from_csv,
)
