"""Pipeline orchestration: analysis, actors, BBN inference and Monte Carlo
aggregation per horizon year, plus what-if re-runs and the intervention report.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from . import analysis, bbn, goals, theories
from .errors import PipelineError, ThemisError
from .model import RegionModel, model_fingerprint, validate_model
from .bbn import RootMapping

SWEEP_DELTAS = (-0.2, -0.1, 0.0, 0.1, 0.2)
CI_Z = 1.6448536269514722  # two-sided 90%


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    samples: int = 1000
    variance_threshold: float = 0.90
    max_vars: int = 7
    r_threshold: float = 0.3
    tripwire: float = 0.5

    def to_json(self) -> dict:
        return {"seed": self.seed, "samples": self.samples,
                "variance_threshold": self.variance_threshold,
                "max_vars": self.max_vars, "r_threshold": self.r_threshold,
                "tripwire": self.tripwire}

    @staticmethod
    def from_json(doc: dict) -> "PipelineConfig":
        cfg = PipelineConfig(**{k: doc[k] for k in doc
                                if k in PipelineConfig.__dataclass_fields__})
        if cfg.samples < 1:
            raise PipelineError("config", "samples must be >= 1")
        if not 0.0 <= cfg.tripwire <= 1.0:
            raise PipelineError("config", "tripwire must be in [0, 1]")
        return cfg


@dataclass(frozen=True)
class YearResult:
    year: int
    p_intervention_mean: float
    p_intervention_ci: tuple  # (lo, hi) at 90%
    scenario_probabilities: Mapping
    samples_used: int
    root_priors: Mapping  # deterministic (mean-trend) root priors
    drivers: tuple  # (root_id, abs_delta_p) ranked descending


@dataclass
class PipelineRun:
    run_id: str
    model_fingerprint: str
    config: PipelineConfig
    horizon_years: int
    per_year: tuple
    key_variables: tuple
    sign_matrix_variables: tuple
    sign_matrix_entries: tuple
    attainments: Mapping  # final-year per-actor
    theory: str
    started: str = ""
    finished: str = ""
    parent_run_id: Optional[str] = None
    # in-memory only: model and cached stage products for what-if reuse
    model: Optional[RegionModel] = None
    internals: Optional[dict] = None


@dataclass(frozen=True)
class InterventionReport:
    run_id: str
    years: tuple
    index_series: tuple
    tripwire_threshold: float
    tripwire_years: tuple
    top_drivers: Mapping  # year -> ranked (root_id, abs_delta_p)


# ---------------------------------------------------------------------------

def aggregate_scenarios(per_scenario: Mapping) -> float:
    """Weighted mean of per-scenario intervention probabilities."""
    if not per_scenario:
        raise PipelineError("aggregate", "no scenarios to aggregate")
    num = 0.0
    den = 0.0
    for sid, (weight, p) in per_scenario.items():
        if weight <= 0:
            raise PipelineError("aggregate", f"scenario {sid!r} weight must be > 0")
        num += weight * p
        den += weight
    return num / den


def _root_prior_for(rm: RootMapping, mean: float) -> float:
    z = (rm.threshold - mean) / rm.scale
    if rm.direction == "above":
        z = -z
    return bbn.logistic(z)


def _sample_truncated(rng, mean, std, lower, upper, size):
    draws = rng.normal(mean, std, size=size)
    if lower is None and upper is None:
        return draws
    lo = -math.inf if lower is None else lower
    hi = math.inf if upper is None else upper
    for _ in range(100):
        bad = (draws < lo) | (draws > hi)
        if not bad.any():
            break
        draws[bad] = rng.normal(mean, std, size=int(bad.sum()))
    return np.clip(draws, lo, hi)


def _deterministic_run_id(fingerprint: str, config: PipelineConfig,
                          parent: Optional[str], edits_doc) -> str:
    payload = json.dumps(
        {"fingerprint": fingerprint, "config": config.to_json(),
         "parent": parent, "edits": edits_doc},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _stage(name):
    """Wrap stage execution so failures carry the stage name."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, ThemisError) \
                    and not isinstance(exc, PipelineError):
                raise PipelineError(name, str(exc)) from exc
            return False
    return _Ctx()


def run_pipeline(model: RegionModel, config: PipelineConfig,
                 parent_run_id: Optional[str] = None,
                 reuse: Optional[dict] = None,
                 edits_doc=None) -> PipelineRun:
    """Execute the full pipeline deterministically from (model, seed, config)."""
    if config.samples < 1:
        raise PipelineError("config", "samples must be >= 1")
    validate_model(model)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    reuse = reuse or {}
    internals = {}

    # --- analysis stage
    if "panel" in reuse:
        panel = reuse["panel"]
        pca_result = reuse["pca"]
        keys = reuse["keys"]
        signs = reuse["signs"]
    else:
        with _stage("standardize"):
            panel = analysis.standardize(model.series)
        with _stage("pca"):
            pca_result = analysis.pca(panel)
        with _stage("select_key_variables"):
            keys = analysis.select_key_variables(
                pca_result, panel, config.variance_threshold, config.max_vars)
        with _stage("estimate_signs"):
            signs = analysis.estimate_signs(panel, keys, model.adjacency,
                                            config.r_threshold)
    internals.update(panel=panel, pca=pca_result, keys=keys, signs=signs)

    # --- trend stage (every parameter with enough data; overrides on top)
    if "trends" in reuse:
        trends = reuse["trends"]
    else:
        trends = {}
        with _stage("fit_trend"):
            for s in model.series:
                if len({y for y, _ in s.observations}) >= 2:
                    trends[s.parameter_id] = analysis.fit_trend(s)
        for pid, override in (reuse.get("trend_overrides") or {}).items():
            if pid not in trends:
                raise PipelineError("fit_trend", f"cannot override unknown trend {pid!r}")
            trends[pid] = replace(trends[pid], **override)
    internals["trends"] = trends

    params_by_id = {p.id: p for p in model.parameters}
    net_template = model.scenario_template
    trend_roots = [n for n in net_template.roots()
                   if n.root_mapping is not None
                   and n.root_mapping.source == "parameter_trend"]
    sampled_params = sorted({n.root_mapping.parameter_id for n in trend_roots})

    last_year = model.last_observed_year()
    per_year = []
    attainments_final = {}
    year_networks = {}

    for year_index in range(1, model.horizon_years + 1):
        year = last_year + year_index
        with _stage("extrapolate"):
            domain_state = {pid: analysis.extrapolate(t, year)
                            for pid, t in trends.items()}
            domain_state = theories.apply_theory(model.theory, model, domain_state)

        with _stage("actor_solver"):
            attainments = {}
            for actor in model.actors:
                bounds = {p.id: (p.lower, p.upper)
                          for p in model.parameters
                          if p.lower is not None or p.upper is not None}
                gp = goals.build_goal_program(actor, domain_state, year,
                                              variable_bounds=bounds)
                attainments[actor.id] = goals.solve_goal_program(gp).attainment

        with _stage("map_roots"):
            mapped = bbn.map_roots(net_template, domain_state, attainments)
        year_networks[year] = mapped
        root_priors = {n.id: bbn.root_prior(mapped, n.id) for n in mapped.roots()}

        with _stage("monte_carlo"):
            p_samples = _monte_carlo_year(
                mapped, trend_roots, sampled_params, domain_state, params_by_id,
                config, year_index)
        mean = float(np.mean(p_samples))
        n = len(p_samples)
        if n > 1:
            se = float(np.std(p_samples, ddof=1)) / math.sqrt(n)
        else:
            se = 0.0
        lo = min(max(0.0, mean - CI_Z * se), mean)
        hi = max(min(1.0, mean + CI_Z * se), mean)
        scenario_probabilities = {"baseline": mean}
        index = aggregate_scenarios({"baseline": (1.0, mean)})

        with _stage("sensitivity"):
            drivers = []
            for root in mapped.roots():
                pairs = bbn.sensitivity(mapped, root.id, SWEEP_DELTAS)
                ps = [p for _, p in pairs]
                drivers.append((root.id, max(ps) - min(ps)))
            drivers.sort(key=lambda d: (-d[1], d[0]))

        per_year.append(YearResult(
            year=year, p_intervention_mean=index,
            p_intervention_ci=(lo, hi),
            scenario_probabilities=scenario_probabilities,
            samples_used=n, root_priors=root_priors,
            drivers=tuple(drivers)))
        attainments_final = attainments

    internals["year_networks"] = year_networks
    fingerprint = model_fingerprint(model)
    run = PipelineRun(
        run_id=_deterministic_run_id(fingerprint, config, parent_run_id, edits_doc),
        model_fingerprint=fingerprint,
        config=config,
        horizon_years=model.horizon_years,
        per_year=tuple(per_year),
        key_variables=keys.selected,
        sign_matrix_variables=signs.variables,
        sign_matrix_entries=signs.entries,
        attainments=attainments_final,
        theory=model.theory,
        started=started,
        finished=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        parent_run_id=parent_run_id,
        model=model,
        internals=internals)
    return run


def _monte_carlo_year(mapped, trend_roots, sampled_params, domain_state,
                      params_by_id, config, year_index):
    """Intervention-probability samples for one horizon year.

    The intervention marginal is multilinear in root priors, so we compute it
    conditional on every trend-root state combo once and recombine per sample.
    """
    n = config.samples
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(year_index,)))

    if not trend_roots:
        p = bbn.infer(mapped, mapped.intervention_node).marginal[0]
        return np.full(n, p)

    root_ids = [r.id for r in trend_roots]
    counts, table = bbn.intervention_given_root_combos(mapped, root_ids)

    sampled_means = {}
    for pid in sampled_params:
        mean, std = domain_state[pid]
        p = params_by_id[pid]
        if std > 0:
            sampled_means[pid] = _sample_truncated(rng, mean, std, p.lower, p.upper, n)
        else:
            sampled_means[pid] = np.full(n, mean)

    # per-sample prior of each trend root's first ("true") state
    priors = np.empty((len(root_ids), n))
    for k, node in enumerate(trend_roots):
        rm = node.root_mapping
        means = sampled_means[rm.parameter_id]
        z = (rm.threshold - means) / rm.scale
        if rm.direction == "above":
            z = -z
        priors[k] = 1.0 / (1.0 + np.exp(-z))

    # combine: combos are row-major over root_ids with binary/n-ary states;
    # trend roots are binary (state 0 = "true")
    p_samples = np.zeros(n)
    total = len(table)
    for flat in range(total):
        weight = np.ones(n)
        rem = flat
        for k in range(len(root_ids) - 1, -1, -1):
            state = rem % counts[k]
            rem //= counts[k]
            if state == 0:
                weight *= priors[k]
            else:
                weight *= (1.0 - priors[k]) / (counts[k] - 1)
        p_samples += weight * table[flat]
    return p_samples


# ---------------------------------------------------------------------------
# what-if

_EDIT_KINDS = ("add_actor", "remove_actor", "override_trend", "set_theory",
               "override_root_mapping", "set_tripwire")


def what_if(run: PipelineRun, edits: Sequence[Mapping]) -> PipelineRun:
    """Derive a child run; only stages downstream of the earliest edit re-run."""
    if run.model is None or run.internals is None:
        raise PipelineError("what_if", "parent run lacks in-memory state")
    from .model import ActorSpec, model_from_json, model_to_json  # cycle guard

    model = run.model
    config = run.config
    doc = model_to_json(model)
    trend_overrides = dict(run.internals.get("trend_overrides") or {})
    recompute_years = False

    for i, edit in enumerate(edits):
        kind = edit.get("kind")
        if kind not in _EDIT_KINDS:
            raise PipelineError("what_if", f"edits[{i}]: unknown kind {kind!r}")
        if kind == "add_actor":
            doc["actors"].append(edit["actor"])
            recompute_years = True
        elif kind == "remove_actor":
            aid = edit["actor_id"]
            before = len(doc["actors"])
            doc["actors"] = [a for a in doc["actors"] if a["id"] != aid]
            if len(doc["actors"]) == before:
                raise PipelineError("what_if", f"edits[{i}]: unknown actor {aid!r}")
            recompute_years = True
        elif kind == "override_trend":
            pid = edit["parameter_id"]
            override = {k: float(edit[k]) for k in ("slope", "intercept", "residual_std")
                        if k in edit}
            if not override:
                raise PipelineError("what_if", f"edits[{i}]: nothing to override")
            trend_overrides[pid] = {**trend_overrides.get(pid, {}), **override}
            recompute_years = True
        elif kind == "set_theory":
            doc["theory"] = edit["theory"]
            recompute_years = True
        elif kind == "override_root_mapping":
            nid = edit["node_id"]
            hit = [nd for nd in doc["scenario_template"]["nodes"] if nd["id"] == nid]
            if not hit:
                raise PipelineError("what_if", f"edits[{i}]: unknown node {nid!r}")
            hit[0]["root_mapping"] = edit["root_mapping"]
            recompute_years = True
        elif kind == "set_tripwire":
            config = replace(config, tripwire=float(edit["tripwire"]))

    new_model = model_from_json(doc)
    edits_doc = [dict(e) for e in edits]

    reuse = {
        "panel": run.internals["panel"],
        "pca": run.internals["pca"],
        "keys": run.internals["keys"],
        "signs": run.internals["signs"],
    }
    if not trend_overrides:
        reuse["trends"] = run.internals["trends"]
    else:
        reuse["trend_overrides"] = trend_overrides

    if not recompute_years:
        # nothing upstream of the report changed; copy results verbatim
        child = replace(run, run_id=_deterministic_run_id(
            run.model_fingerprint, config, run.run_id, edits_doc),
            config=config, parent_run_id=run.run_id)
        child.model = run.model
        child.internals = dict(run.internals)
        return child

    child = run_pipeline(new_model, config, parent_run_id=run.run_id,
                         reuse=reuse, edits_doc=edits_doc)
    child.internals["trend_overrides"] = trend_overrides
    return child


# ---------------------------------------------------------------------------
# reporting and serialization

def compute_intervention_index(run: PipelineRun,
                               tripwire: Optional[float] = None) -> InterventionReport:
    threshold = run.config.tripwire if tripwire is None else float(tripwire)
    years = tuple(yr.year for yr in run.per_year)
    index = tuple(yr.p_intervention_mean for yr in run.per_year)
    fired = tuple(yr.year for yr in run.per_year
                  if yr.p_intervention_mean >= threshold)
    top = {yr.year: yr.drivers for yr in run.per_year if yr.year in fired}
    return InterventionReport(
        run_id=run.run_id, years=years, index_series=index,
        tripwire_threshold=threshold, tripwire_years=fired, top_drivers=top)


def run_to_json(run: PipelineRun, include_timestamps: bool = False) -> dict:
    doc = {
        "run_id": run.run_id,
        "parent_run_id": run.parent_run_id,
        "model_fingerprint": run.model_fingerprint,
        "config": run.config.to_json(),
        "theory": run.theory,
        "horizon_years": run.horizon_years,
        "key_variables": list(run.key_variables),
        "sign_matrix": {
            "variables": list(run.sign_matrix_variables),
            "entries": [list(row) for row in run.sign_matrix_entries],
        },
        "attainments": dict(run.attainments),
        "per_year": [
            {"year": yr.year,
             "p_intervention_mean": yr.p_intervention_mean,
             "p_intervention_ci": list(yr.p_intervention_ci),
             "scenario_probabilities": dict(yr.scenario_probabilities),
             "samples_used": yr.samples_used,
             "root_priors": dict(yr.root_priors),
             "drivers": [[r, d] for r, d in yr.drivers]}
            for yr in run.per_year
        ],
    }
    if include_timestamps:
        doc["started"] = run.started
        doc["finished"] = run.finished
    return doc


def run_to_json_text(run: PipelineRun, include_timestamps: bool = False) -> str:
    return json.dumps(run_to_json(run, include_timestamps), sort_keys=True, indent=2)


def run_from_json(doc: dict) -> PipelineRun:
    per_year = tuple(
        YearResult(
            year=yr["year"],
            p_intervention_mean=yr["p_intervention_mean"],
            p_intervention_ci=tuple(yr["p_intervention_ci"]),
            scenario_probabilities=dict(yr["scenario_probabilities"]),
            samples_used=yr["samples_used"],
            root_priors=dict(yr.get("root_priors", {})),
            drivers=tuple((r, d) for r, d in yr.get("drivers", [])))
        for yr in doc["per_year"])
    return PipelineRun(
        run_id=doc["run_id"],
        model_fingerprint=doc["model_fingerprint"],
        config=PipelineConfig.from_json(doc["config"]),
        horizon_years=doc["horizon_years"],
        per_year=per_year,
        key_variables=tuple(doc["key_variables"]),
        sign_matrix_variables=tuple(doc["sign_matrix"]["variables"]),
        sign_matrix_entries=tuple(tuple(row) for row in doc["sign_matrix"]["entries"]),
        attainments=dict(doc["attainments"]),
        theory=doc.get("theory", "trend_baseline"),
        started=doc.get("started", ""),
        finished=doc.get("finished", ""),
        parent_run_id=doc.get("parent_run_id"))


def load_run(path) -> PipelineRun:
    with open(path, "r", encoding="utf-8") as fh:
        return run_from_json(json.load(fh))


def save_run(run: PipelineRun, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(run_to_json_text(run, include_timestamps=True) + "\n")
