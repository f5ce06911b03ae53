"""Data-driven discovery of governing ODEs/PDEs from noisy, outlier-laden
data by subsampling-based threshold sparse Bayesian regression."""

from .datasets import (
    BlowUpError,
    DatasetError,
    FieldDataset,
    NoiseSpec,
    Trajectory,
    dataset_table,
    gen_fish_harvesting,
    gen_heat_random_ibc,
    gen_predator_prey,
    inject_outliers,
    read_dataset_csv,
    rk4_integrate,
    save_dataset,
    snr_db,
)
from .derivatives import (
    Grid1D,
    InteriorMask,
    StencilError,
    central_diff_3pt,
    central_diff_5pt,
    forward_diff_2pt,
    intersect_masks,
    second_central_diff,
    second_central_diff_5pt,
)
from .dictionary import (
    BasisTerm,
    Dictionary,
    DictionaryError,
    VariableSpec,
    dimensional_dictionary,
    monomials_up_to_degree,
)
from .heatsolver import HeatSolverError, solve_parabolic_1d
from .predict import (
    DiscoveredEquation,
    FanBranch,
    HeatField,
    PredictError,
    PredictionReport,
    UnsupportedFormError,
    integrate_fan,
    integrate_ode,
    load_model_json,
    mse_report,
    save_model_json,
    solve_discovered_heat,
)
from .rvm import (
    ConvergenceConfig,
    ConvergenceError,
    Hyperparameters,
    RegressionProblem,
    RvmError,
    WeightPosterior,
    log_marginal_likelihood,
    maximize_evidence,
    posterior,
)
from .subtsbr import (
    AdaptiveRule,
    InfeasibleError,
    SubsampleResult,
    SubsamplingConfig,
    SubtsbrError,
    SweepCell,
    SweepTable,
    adjusted_criterion,
    fit_subtsbr,
    subsamples_needed,
    sweep,
    winner_index,
)
from .tsbr import SparseModel, TsbrConfig, TsbrError, fit_tsbr, model_selection_criterion

__version__ = "0.1.0"

__all__ = [
    "AdaptiveRule",
    "BasisTerm",
    "BlowUpError",
    "ConvergenceConfig",
    "ConvergenceError",
    "DatasetError",
    "Dictionary",
    "DictionaryError",
    "DiscoveredEquation",
    "FanBranch",
    "FieldDataset",
    "Grid1D",
    "HeatField",
    "HeatSolverError",
    "Hyperparameters",
    "InfeasibleError",
    "InteriorMask",
    "NoiseSpec",
    "PredictError",
    "PredictionReport",
    "RegressionProblem",
    "RvmError",
    "SparseModel",
    "StencilError",
    "SubsampleResult",
    "SubsamplingConfig",
    "SubtsbrError",
    "SweepCell",
    "SweepTable",
    "Trajectory",
    "TsbrConfig",
    "TsbrError",
    "UnsupportedFormError",
    "VariableSpec",
    "WeightPosterior",
    "adjusted_criterion",
    "central_diff_3pt",
    "central_diff_5pt",
    "dataset_table",
    "dimensional_dictionary",
    "fit_subtsbr",
    "fit_tsbr",
    "forward_diff_2pt",
    "gen_fish_harvesting",
    "gen_heat_random_ibc",
    "gen_predator_prey",
    "inject_outliers",
    "integrate_fan",
    "integrate_ode",
    "intersect_masks",
    "load_model_json",
    "log_marginal_likelihood",
    "maximize_evidence",
    "model_selection_criterion",
    "monomials_up_to_degree",
    "mse_report",
    "posterior",
    "read_dataset_csv",
    "rk4_integrate",
    "save_dataset",
    "save_model_json",
    "second_central_diff",
    "second_central_diff_5pt",
    "snr_db",
    "solve_discovered_heat",
    "solve_parabolic_1d",
    "subsamples_needed",
    "sweep",
    "winner_index",
]
