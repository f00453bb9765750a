"""
EBAdapt Lab - experiments

End-to-end runs and the comparisons built on them: adapted against
unadapted initialization, prompt schemes, compression budgets and the
lexical effect of adaptation.
"""

from .comparisons import (
    budget_schedule,
    compare_initializations,
    compare_schemes,
    compression_sweep,
    lexical_effect,
    monotone_violations,
)
from .exceptions import ExperimentError, InvalidExperimentError
from .models import ExperimentConfig, PipelineResult, Workspace
from .pipeline import evaluate_encoder, prepare_workspace, run_pipeline

__all__ = [
    # Types
    "ExperimentConfig",
    "Workspace",
    "PipelineResult",

    # Pipeline
    "prepare_workspace",
    "run_pipeline",
    "evaluate_encoder",

    # Comparisons
    "compare_initializations",
    "compare_schemes",
    "compression_sweep",
    "lexical_effect",
    "budget_schedule",
    "monotone_violations",

    # Exceptions
    "ExperimentError",
    "InvalidExperimentError",
]

__version__ = "1.0.0"
