"""Monte-Carlo studies and the ``gspam`` command line."""

from .cli import build_parser, cli_main, main
from .config import STUDIES, Cell, ConfigError, ExperimentConfig
from .runner import CSV_HEADER, WORKERS_ENV, StudyResult, TrialRecord, run_study, run_trial, trial_seed

__all__ = [
    "build_parser", "cli_main", "main",
    "STUDIES", "Cell", "ConfigError", "ExperimentConfig",
    "CSV_HEADER", "WORKERS_ENV", "StudyResult", "TrialRecord", "run_study", "run_trial", "trial_seed",
]
