"""
EBAdapt Lab - frontend

Streamlit dashboard over run directories: loss curves, retrieval
metrics, the lexical-similarity report and compression comparisons.
"""

from .charts import compression_chart, lexical_chart, loss_curve_chart, metrics_chart
from .run_data import RunArtifacts, list_run_dirs, load_run_artifacts

__all__ = [
    # Data
    "RunArtifacts",
    "load_run_artifacts",
    "list_run_dirs",

    # Charts
    "loss_curve_chart",
    "metrics_chart",
    "lexical_chart",
    "compression_chart",
]

__version__ = "1.0.0"
