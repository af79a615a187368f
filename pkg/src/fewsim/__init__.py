"""fewsim: coupled food-energy-water scenario simulation platform."""

__version__ = "0.1.0"

from .dataset import StudyAreaDataset, bundled_dataset_path, load_dataset
from .coupling import ScenarioSpec, run_scenario
from .middleware import (CaseConfig, CaseStore, JobManager, VariableAdjustment,
                         expand_scenario_grid, scenario_name)

__all__ = [
    "StudyAreaDataset", "bundled_dataset_path", "load_dataset",
    "ScenarioSpec", "run_scenario",
    "CaseConfig", "CaseStore", "JobManager", "VariableAdjustment",
    "expand_scenario_grid", "scenario_name",
]
