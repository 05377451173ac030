"""Actor goal programs: build, solve, rank.

Weighted (non-preemptive) goal programming: each goal contributes deviation
variables and the solver minimizes the weighted, target-normalized sum of the
penalized deviations via one LP solve per actor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

from .errors import ThemisError
from .model import ActorSpec, Goal, LinearConstraint
from .simplex import STATUS_OPTIMAL, solve_lp


class SolverError(ThemisError):
    pass


@dataclass(frozen=True)
class GoalProgram:
    actor_id: str
    decision_variables: tuple
    goals: tuple
    constraints: tuple  # all rhs numeric after instantiation
    variable_bounds: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class AttainmentResult:
    actor_id: str
    variable_values: Mapping
    deviations: tuple  # per-goal (under, over)
    attainment: float
    status: str


def build_goal_program(actor: ActorSpec, domain_state: Mapping,
                       horizon_year: int,
                       variable_bounds: Optional[Mapping] = None) -> GoalProgram:
    """Instantiate an actor's program against extrapolated domain state.

    ``domain_state`` maps parameter_id -> (mean, std) at ``horizon_year``;
    symbolic constraint right-hand sides take the extrapolated mean.
    """
    constraints = []
    for c, con in enumerate(actor.constraints):
        rhs = con.rhs
        if con.rhs_parameter is not None:
            if con.rhs_parameter not in domain_state:
                raise SolverError(
                    f"actor {actor.id!r} constraint {c}: no extrapolated state for "
                    f"parameter {con.rhs_parameter!r} at year {horizon_year}")
            rhs = float(domain_state[con.rhs_parameter][0])
        constraints.append(LinearConstraint(
            coefficients=dict(con.coefficients), relation=con.relation, rhs=rhs))

    variables = []
    for g in actor.goals:
        for v in g.expression_coefficients:
            if v not in variables:
                variables.append(v)
    for con in constraints:
        for v in con.coefficients:
            if v not in variables:
                variables.append(v)
    return GoalProgram(
        actor_id=actor.id,
        decision_variables=tuple(variables),
        goals=tuple(actor.goals),
        constraints=tuple(constraints),
        variable_bounds=dict(variable_bounds or {}))


def _norm(goal: Goal) -> float:
    return max(abs(goal.target), 1.0)


def solve_goal_program(gp: GoalProgram) -> AttainmentResult:
    """Minimize the normalized weighted deviation sum; attainment in [0, 1]."""
    objective = {}
    constraints = list(gp.constraints)
    bounds = dict(gp.variable_bounds)
    for g, goal in enumerate(gp.goals):
        under = f"__under_{g}"
        over = f"__over_{g}"
        coeffs = dict(goal.expression_coefficients)
        coeffs[under] = 1.0
        coeffs[over] = -1.0
        constraints.append(LinearConstraint(coefficients=coeffs, relation="=",
                                            rhs=goal.target))
        w = goal.weight / _norm(goal)
        if goal.penalize in ("under", "both"):
            objective[under] = w
        if goal.penalize in ("over", "both"):
            objective[over] = w
        objective.setdefault(under, 0.0)
        objective.setdefault(over, 0.0)

    variables = list(gp.decision_variables) + [v for v in objective]
    values, _, status = solve_lp(objective, constraints, bounds=bounds,
                                 maximize=False, variables=variables)
    if status != STATUS_OPTIMAL:
        return AttainmentResult(
            actor_id=gp.actor_id, variable_values={}, deviations=(),
            attainment=0.0, status=status)

    deviations = tuple(
        (values[f"__under_{g}"], values[f"__over_{g}"]) for g in range(len(gp.goals)))
    total_weight = sum(goal.weight for goal in gp.goals)
    penalty = 0.0
    for goal, (under, over) in zip(gp.goals, deviations):
        dev = 0.0
        if goal.penalize in ("under", "both"):
            dev += under
        if goal.penalize in ("over", "both"):
            dev += over
        penalty += goal.weight * dev / _norm(goal)
    attainment = 1.0 - min(1.0, penalty / total_weight)
    var_values = {v: values[v] for v in gp.decision_variables}
    return AttainmentResult(
        actor_id=gp.actor_id, variable_values=var_values,
        deviations=deviations, attainment=attainment, status=status)


def rank_actors(results: Sequence[AttainmentResult]) -> Tuple:
    """Descending by attainment; ties broken lexicographically by actor id."""
    if not results:
        raise SolverError("no attainment results to rank")
    ordered = sorted(results, key=lambda r: (-r.attainment, r.actor_id))
    return tuple((r.actor_id, r.attainment) for r in ordered)
