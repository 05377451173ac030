"""Themis: deep-futures scenario analysis engine."""

__version__ = "0.1.0"

from .model import (RegionModel, load_region_model, save_region_model,
                    ingest_series, model_fingerprint)
from .pipeline import (PipelineConfig, run_pipeline, what_if,
                       compute_intervention_index, aggregate_scenarios)

__all__ = [
    "RegionModel", "load_region_model", "save_region_model", "ingest_series",
    "model_fingerprint", "PipelineConfig", "run_pipeline", "what_if",
    "compute_intervention_index", "aggregate_scenarios", "__version__",
]
