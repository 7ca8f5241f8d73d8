"""Experiment configuration, orchestration and reporting."""

from .config import (EXPERIMENTS, ConfigError, RunConfig, config_from_mapping, config_hash,
                     load_config, make_config)
from .results import Check, ResultTable, write_atomic
from .runner import (CRITERIA, ExperimentError, convergence_study, default_suite, load_tables,
                     report, report_lines, run, write_report)
