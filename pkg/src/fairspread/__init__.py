"""Fair influence maximization with isoelastic welfare objectives."""

from .cascade import (
    DirectedSketchSet,
    UndirectedSketchSet,
    UtilityVector,
    estimate_utilities,
    exact_utilities,
    sample_sketches,
    simulate_once,
)
from .errors import EnumerationLimitError, GraphFormatError, InfeasibleError
from .experiments import (
    ExperimentConfig,
    ResultRow,
    relative_connectedness_experiment,
    relative_size_experiment,
    rows_to_csv,
    run_sweep,
)
from .fixtures import FIXTURE_NAMES, load_fixture, verify_all, verify_fixture
from .graph import (
    CommunityPartition,
    Graph,
    SbmSpec,
    SeedSet,
    generate_sbm,
    load_graph,
    load_sbm_spec,
    save_graph,
)
from .optimize import (
    DcBounds,
    SelectionTrace,
    dc_lower_bounds,
    exhaustive_opt,
    greedy_utilitarian,
    greedy_welfare,
    saturate_dc,
    saturate_maximin,
)
from .welfare import (
    PrincipleVerdict,
    WelfareParams,
    check_gap_reduction,
    check_influence_transfer,
    check_monotonicity_preference,
    default_params,
    dp_satisfied,
    leximin_compare,
    pof,
    total_influence,
    utility_gap,
    welfare,
)

__version__ = "0.1.0"

__all__ = [
    "CommunityPartition",
    "DcBounds",
    "DirectedSketchSet",
    "EnumerationLimitError",
    "ExperimentConfig",
    "FIXTURE_NAMES",
    "Graph",
    "GraphFormatError",
    "InfeasibleError",
    "PrincipleVerdict",
    "ResultRow",
    "SbmSpec",
    "SeedSet",
    "SelectionTrace",
    "UndirectedSketchSet",
    "UtilityVector",
    "WelfareParams",
    "check_gap_reduction",
    "check_influence_transfer",
    "check_monotonicity_preference",
    "dc_lower_bounds",
    "default_params",
    "dp_satisfied",
    "estimate_utilities",
    "exact_utilities",
    "exhaustive_opt",
    "generate_sbm",
    "greedy_utilitarian",
    "greedy_welfare",
    "leximin_compare",
    "load_fixture",
    "load_graph",
    "load_sbm_spec",
    "pof",
    "relative_connectedness_experiment",
    "relative_size_experiment",
    "rows_to_csv",
    "run_sweep",
    "sample_sketches",
    "saturate_dc",
    "saturate_maximin",
    "save_graph",
    "simulate_once",
    "total_influence",
    "utility_gap",
    "verify_all",
    "verify_fixture",
    "welfare",
]
