"""Toy-scale training harness over filterdist architecture spec files."""

from .data import DATASETS, DatasetUnavailableError, load_dataset, small_images
from .model import SpecModel, build_trainable
from .specio import HarnessError, apply_template_file, load_spec, report_params, scale_widths
from .sweep import ALL_TEMPLATES, sweep_templates, write_results_csv
from .train import RunResult, TrainRunConfig, default_schedule, train_and_eval

__all__ = [
    "ALL_TEMPLATES",
    "DATASETS",
    "DatasetUnavailableError",
    "HarnessError",
    "RunResult",
    "SpecModel",
    "TrainRunConfig",
    "apply_template_file",
    "build_trainable",
    "default_schedule",
    "load_dataset",
    "load_spec",
    "report_params",
    "scale_widths",
    "small_images",
    "sweep_templates",
    "train_and_eval",
    "write_results_csv",
]
