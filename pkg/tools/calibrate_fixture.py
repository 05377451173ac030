"""Rebuild the bundled Country X fixture.

The generator coefficients come from two offline steps whose outputs are
frozen in src/themis/data/generator_coefficients.json:

  1. tools/var_fit.py fits the stationary VAR(2) over the seven key
     variables (sign structure of the lagged-difference correlations);
  2. tools/seed_search.py picks panel_seed, the per-block companion-noise
     levels and curve_seed so the real analysis code reproduces the intended
     key-variable selection, variance window and full sign matrix.

This script re-verifies those frozen choices, re-solves the scenario
calibration (root-mapping thresholds from extrapolated trends, then the
intervention CPT entry linearly so the final-year index at seed 42 /
2000 samples is 0.62) and rewrites both data files.
"""

import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from themis import analysis, datagen  # noqa: E402
from themis.model import save_region_model  # noqa: E402
from themis.pipeline import PipelineConfig, run_pipeline  # noqa: E402

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "themis" / "data"
TARGET_INDEX = 0.62


def logit(p):
    return float(np.log(p / (1 - p)))


def verify_panel(coef):
    from seed_search import full_check
    if not full_check(coef, coef["panel_seed"]):
        raise SystemExit("frozen generator choices no longer pass; "
                         "re-run tools/seed_search.py")


def calibrate_scenario(coef):
    scen = {"p_intervention_given_calm": 0.05,
            "p_intervention_given_unrest": 0.9,
            "dogmatism_threshold": 0.0, "dogmatism_scale": 2.0,
            "water_threshold": 0.0, "water_scale": 2.0}
    coef["scenario"] = scen

    model = datagen.build_country_x_model(coefficients=coef)
    horizon = model.last_observed_year() + model.horizon_years
    trends = {s.parameter_id: analysis.fit_trend(s) for s in model.series}
    rel_mean, _ = analysis.extrapolate(trends["religious_education"], horizon)
    wat_mean, _ = analysis.extrapolate(trends["potable_water"], horizon)
    # deterministic root priors ~0.65 (dogmatism, above) and ~0.70 (water, below)
    scen["dogmatism_threshold"] = round(rel_mean - scen["dogmatism_scale"] * logit(0.65), 6)
    scen["water_threshold"] = round(wat_mean + scen["water_scale"] * logit(0.70), 6)

    config = PipelineConfig(seed=42, samples=2000)

    def final_index(p_true):
        scen["p_intervention_given_unrest"] = p_true
        m = datagen.build_country_x_model(coefficients=coef)
        return run_pipeline(m, config).per_year[-1].p_intervention_mean

    # the index is linear in the CPT entry, so two probes pin it down
    p_lo, p_hi = 0.70, 0.95
    f_lo, f_hi = final_index(p_lo), final_index(p_hi)
    p_star = p_lo + (TARGET_INDEX - f_lo) * (p_hi - p_lo) / (f_hi - f_lo)
    scen["p_intervention_given_unrest"] = round(p_star, 6)
    achieved = final_index(scen["p_intervention_given_unrest"])
    print(f"scenario: f({p_lo})={f_lo:.4f} f({p_hi})={f_hi:.4f} "
          f"p*={p_star:.6f} achieved={achieved:.6f}")
    if abs(achieved - TARGET_INDEX) > 0.002:
        raise SystemExit("calibration failed to hit the target index")
    return coef


def main():
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
    with open(DATA_DIR / "generator_coefficients.json") as fh:
        coef = json.load(fh)
    verify_panel(coef)
    coef = calibrate_scenario(coef)

    with open(DATA_DIR / "generator_coefficients.json", "w") as fh:
        json.dump(coef, fh, indent=2, sort_keys=True)
        fh.write("\n")
    model = datagen.build_country_x_model(coefficients=coef)
    save_region_model(model, DATA_DIR / "country_x.model.json")
    print(f"wrote fixture: {DATA_DIR}")


if __name__ == "__main__":
    main()
