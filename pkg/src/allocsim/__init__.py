"""Discrete-event simulator and policy engine for deceased-donor heart allocation.

The package splits into layers: domain primitives (blood groups, geography,
patients and donors), survival and acceptance models, allocation policies,
bipartite matching, synthetic cohort generation, the event-driven simulator,
and potential tuning. The command line lives in allocsim.cli.
"""

from .acceptance import (
    AcceptanceConfig,
    AcceptanceModel,
    acceptance_pair_features,
    adjusted_probability,
    auroc,
    fit_logistic,
    predict_acceptance,
)
from .cohort import (
    Cohort,
    CohortConfig,
    CohortSchema,
    GroundTruth,
    default_config,
    generate,
    ground_truth_models,
    load_csv,
    load_dir,
    save_csv,
)
from .domain import (
    BLOOD_TYPES,
    EARTH_RADIUS_NM,
    BloodMatch,
    BloodType,
    Donor,
    GeoPoint,
    Patient,
    blood_match,
    distance_nm,
)
from .errors import (
    AllocSimError,
    ConfigError,
    EmptyBaselineError,
    EventOutOfRangeError,
    NoComparablePairsError,
    NoEventsError,
    NonConvergenceError,
    ParseError,
    SchemaMismatchError,
    SingleClassError,
    SingularHessianError,
    TooLargeError,
)
from .matching import (
    WeightMatrix,
    brute_force_matching,
    matching_total,
    max_weight_matching,
    sequential_greedy_matching,
)
from .policies import (
    ModelSet,
    PolicyKind,
    PolicySpec,
    RankedCandidate,
    rank_candidates,
    tier_lookup,
    transplant_benefit,
)
from .simulator import (
    SimConfig,
    SimResult,
    TransplantRecord,
    offer_cascade,
    replicate,
    replicate_totals,
    result_to_json,
    run,
)
from .survival import (
    CoxModel,
    FitOptions,
    SurvivalSample,
    concordance_index,
    fit_cox,
    median_survival,
    partial_loglik_grad,
    survival_prob,
)
from .tuning import (
    TuneConfig,
    TuneResult,
    evaluate_theta,
    tune_potentials,
    tune_result_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceConfig",
    "AcceptanceModel",
    "AllocSimError",
    "BLOOD_TYPES",
    "BloodMatch",
    "BloodType",
    "Cohort",
    "CohortConfig",
    "CohortSchema",
    "ConfigError",
    "CoxModel",
    "Donor",
    "EARTH_RADIUS_NM",
    "EmptyBaselineError",
    "EventOutOfRangeError",
    "FitOptions",
    "GeoPoint",
    "GroundTruth",
    "ModelSet",
    "NoComparablePairsError",
    "NoEventsError",
    "NonConvergenceError",
    "ParseError",
    "Patient",
    "PolicyKind",
    "PolicySpec",
    "RankedCandidate",
    "SchemaMismatchError",
    "SimConfig",
    "SimResult",
    "SingleClassError",
    "SingularHessianError",
    "SurvivalSample",
    "TooLargeError",
    "TransplantRecord",
    "TuneConfig",
    "TuneResult",
    "WeightMatrix",
    "acceptance_pair_features",
    "adjusted_probability",
    "auroc",
    "blood_match",
    "brute_force_matching",
    "concordance_index",
    "default_config",
    "distance_nm",
    "evaluate_theta",
    "fit_cox",
    "fit_logistic",
    "generate",
    "ground_truth_models",
    "load_csv",
    "load_dir",
    "matching_total",
    "max_weight_matching",
    "median_survival",
    "offer_cascade",
    "partial_loglik_grad",
    "predict_acceptance",
    "rank_candidates",
    "replicate",
    "replicate_totals",
    "result_to_json",
    "run",
    "save_csv",
    "sequential_greedy_matching",
    "survival_prob",
    "tier_lookup",
    "transplant_benefit",
    "tune_potentials",
    "tune_result_to_dict",
]
