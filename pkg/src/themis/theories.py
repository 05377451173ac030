"""Pluggable theory variants applied to the extrapolated trend map."""

from __future__ import annotations

from typing import Callable, Dict, Mapping

from .errors import PipelineError

BERNSTEIN_FACTORS = (
    "property_rights",
    "scientific_rationalism",
    "capital_markets",
    "communication_transportation",
)

_REGISTRY: Dict[str, Callable] = {}


def register_theory(name: str):
    def wrap(fn):
        _REGISTRY[name] = fn
        return fn
    return wrap


def known_theories():
    return tuple(sorted(_REGISTRY))


def apply_theory(theory: str, model, trends: Mapping) -> Mapping:
    """Transform {parameter_id: (mean, std)} per the named theory."""
    if theory not in _REGISTRY:
        raise PipelineError("theory", f"unknown theory {theory!r}")
    return _REGISTRY[theory](model, dict(trends))


@register_theory("trend_baseline")
def _trend_baseline(model, trends):
    return trends


@register_theory("bernstein_four_factor")
def _bernstein_four_factor(model, trends):
    """Scale the GDP trend mean by the geometric mean of four factor scores.

    Factors are declared in model metadata under ``bernstein_factors``, each
    either {"score": s} or {"parameter_id": p, "reference": r} where the score
    is the parameter's extrapolated mean divided by the reference value.
    Scores are clamped to [0.01, 1].
    """
    meta = model.metadata.get("bernstein_factors")
    if not meta:
        raise PipelineError("theory", "model metadata lacks bernstein_factors")
    gdp_id = model.metadata.get("gdp_parameter", "gdp")
    if gdp_id not in trends:
        raise PipelineError("theory", f"no trend for GDP parameter {gdp_id!r}")
    product = 1.0
    for factor in BERNSTEIN_FACTORS:
        if factor not in meta:
            raise PipelineError("theory", f"bernstein_factors missing {factor!r}")
        spec = meta[factor]
        if "score" in spec:
            score = float(spec["score"])
        else:
            pid = spec["parameter_id"]
            if pid not in trends:
                raise PipelineError("theory", f"no trend for factor parameter {pid!r}")
            score = trends[pid][0] / float(spec["reference"])
        product *= min(1.0, max(0.01, score))
    scale = product ** 0.25
    mean, std = trends[gdp_id]
    trends[gdp_id] = (mean * scale, std)
    return trends
