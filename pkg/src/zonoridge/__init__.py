"""Sound over-approximation of ridge regression trained on uncertain data.

The package abstracts an uncertain training set as a zonotope over error
symbols, computes a fixed point of abstract gradient descent in closed form,
and turns the resulting weight zonotope into prediction ranges, robustness
certificates, loss intervals and parameter bounds, together with
ground-truth oracles for validating soundness.
"""

from .dataset import (
    AbstractDataset,
    Dataset,
    DomainRange,
    FeatureScaler,
    UncertaintySpec,
    abstract_missing,
    domain_ranges,
    inject_uncertainty,
    load_csv,
    train_test_split,
)
from .errors import (
    BudgetExceededError,
    DataError,
    DegreeError,
    EmptyDataError,
    IllConditionedError,
    LambdaTooSmall,
    RegistryMismatchError,
    ShapeMismatchError,
    SplitBudgetError,
    ZonoError,
)
from .forms import COEF_EPS, PolyForm, add_forms, mul_forms
from .inference import (
    LossInterval,
    ParameterIntervals,
    PredictionInterval,
    RobustnessReport,
    certify_robustness,
    loss_interval,
    parameter_intervals,
    predict_interval,
    predict_interval_uncertain,
)
from .learning import (
    AbstractWeights,
    FixedPointDiagnostics,
    NonDataSystem,
    ResidualReport,
    RidgeConfig,
    build_non_data_system,
    build_transform,
    closed_form_symbolic_data,
    contains_world_weights,
    determine_num_splits,
    fixed_point,
    ridge_closed_form_real,
    solve_non_data,
    verify_fixed_point_residual,
)
from .oracles import (
    IntervalRidgeResult,
    WorldAssignment,
    WorldOracleResult,
    concrete_loss,
    enumerate_worlds,
    interval_ridge_labels,
    oracle_ranges,
    ridge_concrete,
    sample_worlds,
)
from .symbols import SymbolKind, SymbolRegistry
from .zonotope import (
    IntervalBox,
    ZMatrix,
    ZVector,
    box_join,
    interval_hull,
    interval_of,
    linearize,
    mat_mul,
    mat_vec,
    mu_split,
    order,
    real_mat_vec,
    tih_reduce,
)

__all__ = [
    "AbstractDataset",
    "AbstractWeights",
    "BudgetExceededError",
    "COEF_EPS",
    "DataError",
    "Dataset",
    "DegreeError",
    "DomainRange",
    "EmptyDataError",
    "FeatureScaler",
    "FixedPointDiagnostics",
    "IllConditionedError",
    "IntervalBox",
    "IntervalRidgeResult",
    "LambdaTooSmall",
    "LossInterval",
    "NonDataSystem",
    "ParameterIntervals",
    "PolyForm",
    "PredictionInterval",
    "RegistryMismatchError",
    "ResidualReport",
    "RidgeConfig",
    "RobustnessReport",
    "ShapeMismatchError",
    "SplitBudgetError",
    "SymbolKind",
    "SymbolRegistry",
    "UncertaintySpec",
    "WorldAssignment",
    "WorldOracleResult",
    "ZMatrix",
    "ZVector",
    "ZonoError",
    "abstract_missing",
    "add_forms",
    "box_join",
    "build_non_data_system",
    "build_transform",
    "certify_robustness",
    "closed_form_symbolic_data",
    "concrete_loss",
    "contains_world_weights",
    "determine_num_splits",
    "domain_ranges",
    "enumerate_worlds",
    "fixed_point",
    "inject_uncertainty",
    "interval_hull",
    "interval_of",
    "interval_ridge_labels",
    "linearize",
    "load_csv",
    "loss_interval",
    "mat_mul",
    "mat_vec",
    "mu_split",
    "mul_forms",
    "oracle_ranges",
    "order",
    "parameter_intervals",
    "predict_interval",
    "predict_interval_uncertain",
    "real_mat_vec",
    "ridge_closed_form_real",
    "ridge_concrete",
    "sample_worlds",
    "solve_non_data",
    "tih_reduce",
    "train_test_split",
    "verify_fixed_point_residual",
]
