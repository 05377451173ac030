"""Region model: the ontology of domains, parameters, actors and their repository.

A region model is a single self-describing JSON document (``format_version`` 1).
All values are immutable after load; mutating operations return new models.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .bbn import RootMapping, ScenarioNetwork, BbnNode, validate_network
from .errors import ModelParseError, ModelValidationError

FORMAT_VERSION = 1

RELATIONS = ("<=", "=", ">=")
PENALIZE = ("under", "over", "both")


@dataclass(frozen=True)
class ParameterDefinition:
    id: str
    domain: str
    units: str = ""
    display_name: str = ""
    lower: Optional[float] = None  # physical bound used when sampling trends
    upper: Optional[float] = None


@dataclass(frozen=True)
class ParameterSeries:
    parameter_id: str
    observations: tuple  # of (year: int, value: float), years strictly increasing

    def years(self) -> tuple:
        return tuple(y for y, _ in self.observations)

    def values(self) -> tuple:
        return tuple(v for _, v in self.observations)


@dataclass(frozen=True)
class AdjacencyMatrix:
    variables: tuple
    related: tuple  # square tuple-of-tuples of bool

    def allows(self, src: str, dst: str) -> bool:
        try:
            i = self.variables.index(src)
            j = self.variables.index(dst)
        except ValueError:
            return False
        return bool(self.related[i][j])


@dataclass(frozen=True)
class Goal:
    expression_coefficients: Mapping
    target: float
    weight: float = 1.0
    penalize: str = "both"


@dataclass(frozen=True)
class LinearConstraint:
    coefficients: Mapping
    relation: str
    rhs: Optional[float] = None
    # When set, the right-hand side is instantiated from this parameter's
    # extrapolated mean at the horizon year (actor-solver build step).
    rhs_parameter: Optional[str] = None


@dataclass(frozen=True)
class ActorSpec:
    id: str
    actor_type: str  # "A" | "B" | "C" | free-form
    objective_coefficients: Mapping = field(default_factory=dict)
    goals: tuple = ()
    constraints: tuple = ()
    metadata: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class RegionModel:
    region_name: str
    parameters: tuple
    series: tuple
    actors: tuple
    scenario_template: ScenarioNetwork
    adjacency: Optional[AdjacencyMatrix] = None
    theory: str = "trend_baseline"
    horizon_years: int = 25
    metadata: Mapping = field(default_factory=dict)

    def parameter_ids(self) -> tuple:
        return tuple(p.id for p in self.parameters)

    def get_series(self, parameter_id: str) -> Optional[ParameterSeries]:
        for s in self.series:
            if s.parameter_id == parameter_id:
                return s
        return None

    def last_observed_year(self) -> int:
        years = [s.observations[-1][0] for s in self.series if s.observations]
        if not years:
            raise ModelValidationError("series", "no observations in any series")
        return max(years)


# ---------------------------------------------------------------------------
# validation

def validate_model(model: RegionModel) -> None:
    """Check every structural invariant; raise ModelValidationError on the first hit."""
    if not model.region_name:
        raise ModelValidationError("region_name", "must be non-empty")
    if model.horizon_years < 1:
        raise ModelValidationError("horizon_years", "must be >= 1")

    seen = set()
    for i, p in enumerate(model.parameters):
        if not p.id:
            raise ModelValidationError(f"parameters[{i}].id", "must be non-empty")
        if p.id in seen:
            raise ModelValidationError(f"parameters[{i}].id", f"duplicate id {p.id!r}")
        seen.add(p.id)
        if not p.domain:
            raise ModelValidationError(f"parameters[{i}].domain", "must be non-empty")
    ids = seen

    for i, s in enumerate(model.series):
        if s.parameter_id not in ids:
            raise ModelValidationError(
                f"series[{i}].parameter_id", f"unknown parameter {s.parameter_id!r}")
        prev = None
        for j, (year, value) in enumerate(s.observations):
            if prev is not None and year <= prev:
                raise ModelValidationError(
                    f"series[{i}].observations[{j}]",
                    f"years must be strictly increasing (got {year} after {prev})")
            prev = year
            if not math.isfinite(value):
                raise ModelValidationError(
                    f"series[{i}].observations[{j}]", f"non-finite value {value!r}")

    if model.adjacency is not None:
        adj = model.adjacency
        n = len(adj.variables)
        if len(adj.related) != n or any(len(row) != n for row in adj.related):
            raise ModelValidationError("adjacency.related", "matrix must be square")
        for v in adj.variables:
            if v not in ids:
                raise ModelValidationError("adjacency.variables", f"unknown parameter {v!r}")
        for k in range(n):
            if not adj.related[k][k]:
                raise ModelValidationError(
                    f"adjacency.related[{k}][{k}]", "diagonal must be true")

    if not model.actors:
        raise ModelValidationError("actors", "actors must be non-empty")
    actor_ids = set()
    for i, a in enumerate(model.actors):
        if a.id in actor_ids:
            raise ModelValidationError(f"actors[{i}].id", f"duplicate id {a.id!r}")
        actor_ids.add(a.id)
        if not a.goals:
            raise ModelValidationError(f"actors[{i}].goals", "at least one goal required")
        for pid in a.objective_coefficients:
            if pid not in ids:
                raise ModelValidationError(
                    f"actors[{i}].objective_coefficients", f"unknown parameter {pid!r}")
        for g, goal in enumerate(a.goals):
            if goal.weight <= 0:
                raise ModelValidationError(f"actors[{i}].goals[{g}].weight", "must be > 0")
            if not math.isfinite(goal.target):
                raise ModelValidationError(f"actors[{i}].goals[{g}].target", "must be finite")
            if goal.penalize not in PENALIZE:
                raise ModelValidationError(
                    f"actors[{i}].goals[{g}].penalize", f"unknown mode {goal.penalize!r}")
            for pid in goal.expression_coefficients:
                if pid not in ids:
                    raise ModelValidationError(
                        f"actors[{i}].goals[{g}]", f"unknown parameter {pid!r}")
        for c, con in enumerate(a.constraints):
            if con.relation not in RELATIONS:
                raise ModelValidationError(
                    f"actors[{i}].constraints[{c}].relation", f"bad relation {con.relation!r}")
            if not any(v != 0 for v in con.coefficients.values()):
                raise ModelValidationError(
                    f"actors[{i}].constraints[{c}]", "needs at least one nonzero coefficient")
            for pid in con.coefficients:
                if pid not in ids:
                    raise ModelValidationError(
                        f"actors[{i}].constraints[{c}]", f"unknown parameter {pid!r}")
            if con.rhs_parameter is not None and con.rhs_parameter not in ids:
                raise ModelValidationError(
                    f"actors[{i}].constraints[{c}].rhs_parameter",
                    f"unknown parameter {con.rhs_parameter!r}")
            if con.rhs is None and con.rhs_parameter is None:
                raise ModelValidationError(
                    f"actors[{i}].constraints[{c}]", "needs rhs or rhs_parameter")

    validate_network(model.scenario_template)
    net = model.scenario_template
    for node in net.nodes:
        rm = node.root_mapping
        if rm is None:
            continue
        if rm.source == "parameter_trend" and rm.parameter_id not in ids:
            raise ModelValidationError(
                f"scenario_template.nodes[{node.id}].root_mapping",
                f"unknown parameter {rm.parameter_id!r}")
        if rm.source == "actor_attainment" and rm.actor_id not in actor_ids:
            raise ModelValidationError(
                f"scenario_template.nodes[{node.id}].root_mapping",
                f"unknown actor {rm.actor_id!r}")


# ---------------------------------------------------------------------------
# JSON (de)serialization

def _goal_to_json(g: Goal) -> dict:
    return {
        "expression_coefficients": dict(g.expression_coefficients),
        "target": g.target,
        "weight": g.weight,
        "penalize": g.penalize,
    }


def _constraint_to_json(c: LinearConstraint) -> dict:
    out = {"coefficients": dict(c.coefficients), "relation": c.relation}
    if c.rhs is not None:
        out["rhs"] = c.rhs
    if c.rhs_parameter is not None:
        out["rhs_parameter"] = c.rhs_parameter
    return out


def model_to_json(model: RegionModel) -> dict:
    net = model.scenario_template
    doc = {
        "format_version": FORMAT_VERSION,
        "region_name": model.region_name,
        "horizon_years": model.horizon_years,
        "theory": model.theory,
        "parameters": [
            {k: v for k, v in {
                "id": p.id, "domain": p.domain, "units": p.units,
                "display_name": p.display_name,
                "lower": p.lower, "upper": p.upper,
            }.items() if v is not None}
            for p in model.parameters
        ],
        "series": [
            {"parameter_id": s.parameter_id,
             "observations": [[y, v] for y, v in s.observations]}
            for s in model.series
        ],
        "adjacency": None if model.adjacency is None else {
            "variables": list(model.adjacency.variables),
            "related": [[bool(x) for x in row] for row in model.adjacency.related],
        },
        "actors": [
            {"id": a.id, "actor_type": a.actor_type,
             "objective_coefficients": dict(a.objective_coefficients),
             "goals": [_goal_to_json(g) for g in a.goals],
             "constraints": [_constraint_to_json(c) for c in a.constraints],
             "metadata": dict(a.metadata)}
            for a in model.actors
        ],
        "scenario_template": net.to_json(),
        "metadata": dict(model.metadata),
    }
    return doc


def model_from_json(doc: dict) -> RegionModel:
    try:
        version = doc["format_version"]
    except (TypeError, KeyError):
        raise ModelParseError("document missing format_version")
    if version != FORMAT_VERSION:
        raise ModelParseError(f"unsupported format_version {version!r}")

    def req(obj, key, path):
        try:
            return obj[key]
        except (TypeError, KeyError):
            raise ModelParseError(f"missing {path}")

    params = tuple(
        ParameterDefinition(
            id=req(p, "id", f"parameters[{i}].id"),
            domain=req(p, "domain", f"parameters[{i}].domain"),
            units=p.get("units", ""),
            display_name=p.get("display_name", ""),
            lower=p.get("lower"),
            upper=p.get("upper"),
        )
        for i, p in enumerate(doc.get("parameters", []))
    )
    series = tuple(
        ParameterSeries(
            parameter_id=req(s, "parameter_id", f"series[{i}].parameter_id"),
            observations=tuple((int(y), float(v)) for y, v in s.get("observations", [])),
        )
        for i, s in enumerate(doc.get("series", []))
    )
    adj_doc = doc.get("adjacency")
    adjacency = None
    if adj_doc:
        adjacency = AdjacencyMatrix(
            variables=tuple(adj_doc["variables"]),
            related=tuple(tuple(bool(x) for x in row) for row in adj_doc["related"]),
        )
    actors = tuple(
        ActorSpec(
            id=req(a, "id", f"actors[{i}].id"),
            actor_type=a.get("actor_type", "other"),
            objective_coefficients=dict(a.get("objective_coefficients", {})),
            goals=tuple(
                Goal(expression_coefficients=dict(g["expression_coefficients"]),
                     target=float(g["target"]),
                     weight=float(g.get("weight", 1.0)),
                     penalize=g.get("penalize", "both"))
                for g in a.get("goals", [])
            ),
            constraints=tuple(
                LinearConstraint(coefficients=dict(c["coefficients"]),
                                 relation=c["relation"],
                                 rhs=None if c.get("rhs") is None else float(c["rhs"]),
                                 rhs_parameter=c.get("rhs_parameter"))
                for c in a.get("constraints", [])
            ),
            metadata=dict(a.get("metadata", {})),
        )
        for i, a in enumerate(doc.get("actors", []))
    )
    net_doc = req(doc, "scenario_template", "scenario_template")
    network = ScenarioNetwork.from_json(net_doc)

    model = RegionModel(
        region_name=req(doc, "region_name", "region_name"),
        horizon_years=int(doc.get("horizon_years", 25)),
        theory=doc.get("theory", "trend_baseline"),
        parameters=params,
        series=series,
        adjacency=adjacency,
        actors=actors,
        scenario_template=network,
        metadata=dict(doc.get("metadata", {})),
    )
    validate_model(model)
    return model


def load_region_model(path) -> RegionModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelParseError(f"cannot read model document {path}: {exc}")
    return model_from_json(doc)


def save_region_model(model: RegionModel, path) -> None:
    validate_model(model)
    text = json.dumps(model_to_json(model), indent=2, sort_keys=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def model_fingerprint(model: RegionModel) -> str:
    canon = json.dumps(model_to_json(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# CSV ingestion

def ingest_series(model: RegionModel, csv_path) -> RegionModel:
    """Merge `parameter_id,domain,year,value` rows into a new model."""
    ids = set(model.parameter_ids())
    incoming = {}
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["parameter_id", "domain", "year", "value"]
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
            raise ModelParseError(
                f"CSV header must be {','.join(expected)} (got {reader.fieldnames})")
        for lineno, row in enumerate(reader, start=2):
            pid = row["parameter_id"].strip()
            if pid not in ids:
                raise ModelValidationError(f"csv:line {lineno}", f"unknown parameter {pid!r}")
            try:
                year = int(row["year"])
            except ValueError:
                raise ModelValidationError(f"csv:line {lineno}", f"bad year {row['year']!r}")
            try:
                value = float(row["value"])
            except ValueError:
                raise ModelValidationError(f"csv:line {lineno}", f"bad value {row['value']!r}")
            if not math.isfinite(value):
                raise ModelValidationError(f"csv:line {lineno}", f"non-finite value {value!r}")
            bucket = incoming.setdefault(pid, {})
            if year in bucket:
                raise ModelValidationError(
                    f"csv:line {lineno}", f"duplicate year {year} for parameter {pid!r}")
            bucket[year] = value

    by_id = {s.parameter_id: dict(s.observations) for s in model.series}
    for pid, rows in incoming.items():
        existing = by_id.setdefault(pid, {})
        for year, value in rows.items():
            if year in existing:
                raise ModelValidationError(
                    "csv", f"duplicate year {year} for parameter {pid!r} (already in model)")
            existing[year] = value

    new_series = []
    ordered = list(model.parameter_ids())
    for pid in ordered:
        if pid in by_id and by_id[pid]:
            obs = tuple(sorted(by_id[pid].items()))
            new_series.append(ParameterSeries(parameter_id=pid, observations=obs))
    merged = replace(model, series=tuple(new_series))
    validate_model(merged)
    return merged
