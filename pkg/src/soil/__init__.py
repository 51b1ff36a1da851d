"""Sparsity oriented importance learning (SOIL) for linear and logistic regression."""

__version__ = "0.1.0"

from .candidates import CandidateModel, CandidateSet, all_subsets, build_candidates, extract_supports, merge_sets
from .fitting import Dataset, PenaltySpec, logistic_fit, ols_fit, penalized_path, soft_threshold
from .importance import ImportanceVector, SelectionReport, rank_variables, soil, threshold_select
from .simulation import AnalysisSettings, ScenarioConfig, StudyResult, cross_examination, example, generate_scenario, run_study
from .weighting import ArmConfig, arm_weights, bic_p_weights, compute_weights, fiducial_weights, normalize_log_weights
