"""dagcraft: an interactive workbench for co-designing causal DAGs.

Fit a linear structural causal model to a drafted graph, spin up the
full hypothesis family (coefficients, residual normality, covariance
equivalences, model fit, and their intersection), adjust for
multiplicity with cost-weighted FDR control, and read the verdicts back
off the graph.
"""

from .adjust import (
    AdjustmentResult,
    ErrorRateEstimates,
    PValueEntry,
    SimulationConfig,
    bh_adjust,
    by_adjust,
    fdcr_adjust,
    fisher_combine,
    simulate_error_rates,
    wbh_adjust,
    weighted_simes,
)
from .datasets import (
    TOY_COLUMNS,
    Dataset,
    MomentSummary,
    generate_toy_dataset,
    load_csv,
    moment_summary,
    save_csv,
)
from .errors import (
    CycleError,
    DagcraftError,
    DegenerateColumnWarning,
    DuplicateEdgeError,
    InsufficientRowsError,
    MissingColumnError,
    MissingRawPError,
    NonNumericCellError,
    OutOfRangeError,
    ParseError,
    SingularDesignError,
    SingularSampleCovError,
    SmallResampleWarning,
    UnknownEdgeError,
    UnknownNodeError,
)
from .graph import BELIEF_RANGE, CausalGraph, Edge, belief_to_cost
from .hypotheses import (
    INTERSECTION_ID,
    MODEL_FIT_ID,
    EquivalenceSpec,
    HypothesisFamily,
    HypothesisKind,
    HypothesisRecord,
    build_family,
    equivalence_test,
)
from .report import (
    EFFECTS,
    HIGHLIGHT_COLOR,
    INDUCED_COV,
    VIEWS,
    canonical,
    dumps_canonical,
    export_dot,
)
from .resampling import (
    CovGapBootstrap,
    ResamplingPlan,
    pairwise_r2_pvalues,
    parent_contribution_pvalues,
)
from .rng import derive_substream, make_rng
from .scm import (
    FitStatistic,
    GofResult,
    ScmFit,
    ScmModel,
    fit_scm,
    induced_moments,
    model_fit_statistic,
    residual_normality_test,
)
from .session import (
    IterationSnapshot,
    Project,
    Settings,
    diff_iterations,
    list_projects,
    load_project,
    run_iteration,
    save_project,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustmentResult",
    "BELIEF_RANGE",
    "CausalGraph",
    "CovGapBootstrap",
    "CycleError",
    "DagcraftError",
    "Dataset",
    "DegenerateColumnWarning",
    "DuplicateEdgeError",
    "EFFECTS",
    "Edge",
    "EquivalenceSpec",
    "ErrorRateEstimates",
    "FitStatistic",
    "GofResult",
    "HIGHLIGHT_COLOR",
    "HypothesisFamily",
    "HypothesisKind",
    "HypothesisRecord",
    "INDUCED_COV",
    "INTERSECTION_ID",
    "InsufficientRowsError",
    "IterationSnapshot",
    "MODEL_FIT_ID",
    "MissingColumnError",
    "MissingRawPError",
    "MomentSummary",
    "NonNumericCellError",
    "OutOfRangeError",
    "ParseError",
    "PValueEntry",
    "Project",
    "ResamplingPlan",
    "ScmFit",
    "ScmModel",
    "Settings",
    "SimulationConfig",
    "SingularDesignError",
    "SingularSampleCovError",
    "SmallResampleWarning",
    "TOY_COLUMNS",
    "UnknownEdgeError",
    "UnknownNodeError",
    "VIEWS",
    "belief_to_cost",
    "bh_adjust",
    "build_family",
    "by_adjust",
    "canonical",
    "derive_substream",
    "diff_iterations",
    "dumps_canonical",
    "equivalence_test",
    "export_dot",
    "fdcr_adjust",
    "fisher_combine",
    "fit_scm",
    "generate_toy_dataset",
    "induced_moments",
    "list_projects",
    "load_csv",
    "load_project",
    "make_rng",
    "model_fit_statistic",
    "moment_summary",
    "pairwise_r2_pvalues",
    "parent_contribution_pvalues",
    "residual_normality_test",
    "run_iteration",
    "save_csv",
    "save_project",
    "simulate_error_rates",
    "wbh_adjust",
    "weighted_simes",
]
