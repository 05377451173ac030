"""Synthetic Country X fixture generator.

Produces the bundled 25-parameter region model: a stationary VAR process over
the seven key variables whose lagged-difference correlations carry the target
influence signs, plus correlated companion parameters per domain block, three
actor types and the civil-unrest scenario network.

The VAR coefficients and the scenario CPT calibration constant live in
``data/generator_coefficients.json``; they are produced by
``tools/calibrate_fixture.py`` (numerically calibrated, not measured data).
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources

import numpy as np

from .bbn import BbnNode, RootMapping, ScenarioNetwork
from .model import (ActorSpec, AdjacencyMatrix, Goal, LinearConstraint,
                    ParameterDefinition, ParameterSeries, RegionModel)

KEYS = ("migration", "gdp", "literacy", "religious_education",
        "level_of_health", "status_of_women", "potable_water")

# entry SIGNS[i][j]: effect of a change in KEYS[i] on KEYS[j] one year later
SIGNS = (
    ("self", "minus", "minus", "none", "minus", "none", "plus"),
    ("minus", "self", "plus", "minus", "plus", "plus", "plus"),
    ("plus", "plus", "self", "none", "plus", "plus", "none"),
    ("plus", "minus", "plus", "self", "none", "minus", "none"),
    ("minus", "plus", "plus", "none", "self", "none", "plus"),
    ("minus", "plus", "plus", "minus", "plus", "self", "plus"),
    ("minus", "plus", "none", "none", "plus", "none", "self"),
)

# domain blocks: each key variable anchors a group of correlated companions
BLOCKS = {
    "migration": ("population", "growth", "ethnicity"),
    "gdp": ("labor_force", "unemployment", "wealth_distribution"),
    "literacy": ("primary_education", "secondary_education", "tertiary_education"),
    "religious_education": ("number_of_scientists", "number_of_phds",
                            "trade_distribution"),
    "level_of_health": ("coverage_of_health_care", "life_expectancy"),
    "status_of_women": ("frequency_of_human_interactions",
                        "level_of_human_interactions"),
    "potable_water": ("arable_land", "total_land"),
}

# id -> (domain, units, display name, offset, scale)
PARAMS = {
    "population": ("Demography", "thousands", "Population", 5200.0, 60.0),
    "growth": ("Demography", "percent", "Population growth", 1.8, 0.2),
    "migration": ("Demography", "thousands/yr", "Migration", 120.0, 12.0),
    "ethnicity": ("Demography", "index", "Ethnic fractionalization", 0.55, 0.04),
    "labor_force": ("Economic", "thousands", "Labor force", 2400.0, 40.0),
    "gdp": ("Economic", "USD billions", "GDP", 410.0, 14.0),
    "unemployment": ("Economic", "percent", "Unemployment", 11.0, 1.2),
    "wealth_distribution": ("Economic", "index", "Wealth distribution", 42.0, 2.5),
    "trade_distribution": ("Economic", "index", "Trade distribution", 55.0, 3.0),
    "primary_education": ("Educational", "percent", "Primary education", 78.0, 3.0),
    "secondary_education": ("Educational", "percent", "Secondary education", 52.0, 3.5),
    "tertiary_education": ("Educational", "percent", "Tertiary education", 18.0, 2.0),
    "literacy": ("Educational", "percent", "Literacy", 64.0, 4.0),
    "number_of_scientists": ("Educational", "per 100k", "Number of scientists", 42.0, 4.0),
    "number_of_phds": ("Educational", "per 100k", "Number of Ph.D.'s", 9.0, 1.1),
    "religious_education": ("Educational", "percent", "Religious education", 38.0, 3.2),
    "level_of_health": ("Healthcare", "index", "Level of health", 58.0, 3.0),
    "coverage_of_health_care": ("Healthcare", "percent", "Coverage of health care",
                                61.0, 3.0),
    "life_expectancy": ("Healthcare", "years", "Life expectancy", 66.0, 1.5),
    "frequency_of_human_interactions": ("Sociological", "index",
                                        "Frequency of human interactions", 47.0, 2.5),
    "level_of_human_interactions": ("Sociological", "index",
                                    "Level of human interactions", 51.0, 2.5),
    "status_of_women": ("Sociological", "index", "Status of women", 44.0, 2.8),
    "arable_land": ("Resources", "percent", "Arable land", 23.0, 1.0),
    "total_land": ("Resources", "thousand km2", "Total land", 640.0, 4.0),
    "potable_water": ("Resources", "percent", "Potable water", 68.0, 2.2),
}

PARAM_ORDER = tuple(PARAMS)

BURN_IN = 300
FIRST_YEAR = 1826
SERIES_LENGTH = 200


def load_coefficients() -> dict:
    text = resources.files("themis").joinpath(
        "data/generator_coefficients.json").read_text(encoding="utf-8")
    return json.loads(text)


def generate_key_levels(seed: int, length: int = SERIES_LENGTH,
                        coefficients: dict = None) -> np.ndarray:
    """Stationary VAR(2) levels for the seven key variables, (t x key)."""
    coef = coefficients or load_coefficients()
    a1 = np.asarray(coef["var_matrix_1"], dtype=float)
    a2 = np.asarray(coef["var_matrix_2"], dtype=float)
    q = np.asarray(coef["noise_std"], dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))
    noise = rng.standard_normal((BURN_IN + length, len(KEYS)))
    x1 = np.zeros(len(KEYS))
    x2 = np.zeros(len(KEYS))
    out = np.empty((length, len(KEYS)))
    for t in range(BURN_IN + length):
        x = a1 @ x1 + a2 @ x2 + q * noise[t]
        x2, x1 = x1, x
        if t >= BURN_IN:
            out[t - BURN_IN] = x
    return out


def _smooth_trend_components(levels: np.ndarray, boost: float,
                             curve_seed: int) -> np.ndarray:
    """Per-key smooth long-run components, orthogonal (in sample) to the VAR
    levels and to each other.

    Adding these raises each key's level variance by ``boost`` without
    changing cross-key level covariances, which damps the level correlations
    by 1/(1+boost) while leaving year-over-year differences nearly intact
    (the curves are low-frequency, so their increments are tiny).
    """
    length, n_keys = levels.shape
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=curve_seed, spawn_key=(2,)))
    t = np.linspace(-1.0, 1.0, length)
    cols = [t ** d for d in range(1, 7)]
    for m in range(1, 6):
        cols.append(np.sin(math.pi * m * t))
        cols.append(np.cos(math.pi * m * t))
    basis = np.column_stack(cols)
    basis = basis - basis.mean(axis=0)
    smooth, _ = np.linalg.qr(basis)
    curves = smooth @ rng.standard_normal((smooth.shape[1], n_keys))
    # The curves must stay smooth, so orthogonalize against the levels'
    # smooth parts only; the non-smooth remainder is orthogonal by
    # construction, which makes the curves exactly uncorrelated (in sample)
    # with every level series.
    low = smooth @ (smooth.T @ levels)
    curves -= low @ np.linalg.lstsq(low, curves, rcond=None)[0]
    # mutual Gram-Schmidt so the curves stay uncorrelated with each other
    for k in range(n_keys):
        for j in range(k):
            prev = curves[:, j]
            curves[:, k] -= prev * (prev @ curves[:, k]) / (prev @ prev)
        target_std = math.sqrt(boost) * levels[:, k].std(ddof=1)
        curves[:, k] *= target_std / curves[:, k].std(ddof=1)
    return curves


def generate_panel(seed: int = None, length: int = SERIES_LENGTH,
                   coefficients: dict = None) -> dict:
    """All 25 parameter level series (unit-scaled), keyed by parameter id."""
    coef = coefficients or load_coefficients()
    if seed is None:
        seed = coef["panel_seed"]
    levels = generate_key_levels(seed, length, coef)
    companion_seed = coef.get("companion_seed", seed)
    companion_noise = coef["companion_noise"]
    boost = float(coef.get("level_boost", 0.0))
    if boost > 0.0:
        curve_seed = coef.get("curve_seed", companion_seed)
        levels = levels + _smooth_trend_components(levels, boost, curve_seed)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=companion_seed, spawn_key=(1,)))
    raw = {}
    for k, key in enumerate(KEYS):
        raw[key] = levels[:, k]
    # Companion noise is orthogonalized (in sample) against all key levels and
    # previously drawn noises, so each companion's sample correlation with its
    # key is exactly 1/sqrt(1 + delta^2) for noise multiple delta.
    anchors, _ = np.linalg.qr(
        np.column_stack([np.ones(length)] +
                        [levels[:, k] for k in range(len(KEYS))]))
    for key, companions in BLOCKS.items():
        hub = raw[key]
        hub_std = hub.std(ddof=1)
        for comp in companions:
            noise = rng.standard_normal(length)
            noise -= anchors @ (anchors.T @ noise)
            noise /= noise.std(ddof=1)
            raw[comp] = hub + companion_noise[key] * hub_std * noise
            anchors = np.column_stack(
                [anchors, noise / np.linalg.norm(noise)])
    series = {}
    for pid in PARAM_ORDER:
        _, _, _, offset, scale = PARAMS[pid]
        std = raw[pid].std(ddof=1)
        series[pid] = offset + scale * raw[pid] / (std if std > 0 else 1.0)
    return series


def build_adjacency() -> AdjacencyMatrix:
    n = len(PARAM_ORDER)
    idx = {p: i for i, p in enumerate(PARAM_ORDER)}
    related = [[False] * n for _ in range(n)]
    for i in range(n):
        related[i][i] = True
    for i, ki in enumerate(KEYS):
        for j, kj in enumerate(KEYS):
            related[idx[ki]][idx[kj]] = i == j or SIGNS[i][j] != "none"
    for key, companions in BLOCKS.items():
        for comp in companions:
            related[idx[key]][idx[comp]] = True
            related[idx[comp]][idx[key]] = True
    return AdjacencyMatrix(variables=PARAM_ORDER,
                           related=tuple(tuple(row) for row in related))


def build_actors(domain_state: dict) -> tuple:
    """Three actor types with linear goals against the extrapolated state.

    Type A pursues supporter wealth and population, type B education reach,
    type C resource control; targets are fixed numbers derived from the
    generated series so attainments spread across (0, 1].
    """
    wealth = domain_state["wealth_distribution"]
    population = domain_state["population"]
    literacy = domain_state["literacy"]
    water = domain_state["potable_water"]
    arable = domain_state["arable_land"]
    actor_a = ActorSpec(
        id="actor_a", actor_type="A",
        objective_coefficients={"wealth_distribution": 1.0, "population": 0.001},
        goals=(
            Goal({"wealth_distribution": 1.0}, target=round(wealth * 0.9, 3),
                 weight=2.0, penalize="under"),
            Goal({"population": 1.0}, target=round(population * 0.85, 3),
                 weight=1.0, penalize="under"),
        ),
        constraints=(
            LinearConstraint({"wealth_distribution": 1.0}, "<=",
                             rhs_parameter="wealth_distribution"),
            LinearConstraint({"population": 1.0}, "<=", rhs_parameter="population"),
        ),
        metadata={"dimefil": ["economic"], "pmesii": ["economic", "social"]})
    actor_b = ActorSpec(
        id="actor_b", actor_type="B",
        objective_coefficients={"literacy": 1.0},
        goals=(
            Goal({"literacy": 1.0}, target=round(literacy * 1.35, 3),
                 weight=1.0, penalize="under"),
        ),
        constraints=(
            LinearConstraint({"literacy": 1.0}, "<=", rhs_parameter="literacy"),
        ),
        metadata={"pmesii": ["social", "information"]})
    actor_c = ActorSpec(
        id="actor_c", actor_type="C",
        objective_coefficients={"potable_water": 1.0, "arable_land": 1.0},
        goals=(
            Goal({"potable_water": 1.0}, target=round(water * 1.15, 3),
                 weight=1.0, penalize="under"),
            Goal({"arable_land": 1.0}, target=round(arable * 0.8, 3),
                 weight=1.0, penalize="under"),
        ),
        constraints=(
            LinearConstraint({"potable_water": 1.0}, "<=",
                             rhs_parameter="potable_water"),
            LinearConstraint({"arable_land": 1.0}, "<=", rhs_parameter="arable_land"),
        ),
        metadata={"pmesii": ["infrastructure"]})
    return (actor_a, actor_b, actor_c)


def build_scenario_network(coefficients: dict = None) -> ScenarioNetwork:
    """Civil-unrest scenario: dogmatism and water shortage drive migration,
    disease, women's status and education down to a GDP shortfall, unrest
    and the intervention node. CPT values are calibrated, not observed."""
    coef = coefficients or load_coefficients()
    cal = coef["scenario"]
    p_int_true = cal["p_intervention_given_unrest"]
    nodes = (
        BbnNode("religious_dogmatism", root_mapping=RootMapping(
            source="parameter_trend", parameter_id="religious_education",
            threshold=cal["dogmatism_threshold"], scale=cal["dogmatism_scale"],
            direction="above"),
            cpt=((0.5, 0.5),)),
        BbnNode("water_shortage", root_mapping=RootMapping(
            source="parameter_trend", parameter_id="potable_water",
            threshold=cal["water_threshold"], scale=cal["water_scale"],
            direction="below"),
            cpt=((0.5, 0.5),)),
        BbnNode("migration_surge", parents=("water_shortage",),
                cpt=((0.75, 0.25), (0.20, 0.80))),
        BbnNode("disease_outbreak", parents=("water_shortage",),
                cpt=((0.65, 0.35), (0.10, 0.90))),
        BbnNode("status_of_women_low", parents=("religious_dogmatism",),
                cpt=((0.80, 0.20), (0.25, 0.75))),
        BbnNode("education_low", parents=("migration_surge",),
                cpt=((0.70, 0.30), (0.25, 0.75))),
        BbnNode("gdp_below_threshold",
                parents=("religious_dogmatism", "migration_surge",
                         "status_of_women_low", "education_low"),
                cpt=tuple(
                    (p, round(1.0 - p, 10)) for p in (
                        0.97, 0.92, 0.90, 0.82,  # dogmatism T, migration T
                        0.88, 0.78, 0.74, 0.60,  # dogmatism T, migration F
                        0.90, 0.80, 0.76, 0.62,  # dogmatism F, migration T
                        0.72, 0.55, 0.48, 0.25,  # dogmatism F, migration F
                    ))),
        BbnNode("civil_unrest", parents=("gdp_below_threshold",),
                cpt=((0.85, 0.15), (0.12, 0.88))),
        BbnNode("intervention", parents=("civil_unrest",),
                cpt=((p_int_true, round(1.0 - p_int_true, 12)),
                     (cal["p_intervention_given_calm"],
                      round(1.0 - cal["p_intervention_given_calm"], 12)))),
    )
    return ScenarioNetwork(nodes=nodes, intervention_node="intervention")


def build_country_x_model(seed: int = None, coefficients: dict = None) -> RegionModel:
    coef = coefficients or load_coefficients()
    panel = generate_panel(seed, coefficients=coef)
    years = range(FIRST_YEAR, FIRST_YEAR + SERIES_LENGTH)
    series = tuple(
        ParameterSeries(pid, tuple((y, round(float(v), 6))
                                   for y, v in zip(years, panel[pid])))
        for pid in PARAM_ORDER)
    parameters = tuple(
        ParameterDefinition(id=pid, domain=PARAMS[pid][0], units=PARAMS[pid][1],
                            display_name=PARAMS[pid][2])
        for pid in PARAM_ORDER)
    # final-observation snapshot used to pin actor goal targets
    snapshot = {pid: float(panel[pid][-1]) for pid in PARAM_ORDER}
    model = RegionModel(
        region_name="Country X",
        parameters=parameters,
        series=series,
        adjacency=build_adjacency(),
        actors=build_actors(snapshot),
        scenario_template=build_scenario_network(coef),
        theory="trend_baseline",
        horizon_years=25,
        metadata={
            "provenance": "synthetic fixture; CPTs calibrated, not from observed data",
            "gdp_parameter": "gdp",
            "bernstein_factors": {
                "property_rights": {"score": 1.0},
                "scientific_rationalism": {"score": 1.0},
                "capital_markets": {"score": 1.0},
                "communication_transportation": {"score": 1.0},
            },
        })
    return model


def generate_ingest_csv(seed: int = 7, years: int = 20,
                        first_year: int = 2001) -> str:
    """CSV text with `years` rows for each of the 25 parameters."""
    rng = np.random.default_rng(seed)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["parameter_id", "domain", "year", "value"])
    for pid in PARAM_ORDER:
        domain, _, _, offset, scale = PARAMS[pid]
        walk = np.cumsum(rng.standard_normal(years)) * 0.3
        for i in range(years):
            writer.writerow([pid, domain, first_year + i,
                             round(offset + scale * walk[i], 6)])
    return buf.getvalue()
