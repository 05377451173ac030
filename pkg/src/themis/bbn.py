"""Bayesian Belief Network: representation, exact inference, root mapping.

Inference is exact variable elimination with a min-degree ordering; a full
joint-enumeration routine serves as an independent oracle for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InferenceError, NetworkError

ROW_SUM_TOL = 1e-9
ENUM_LIMIT = 2 ** 20


@dataclass(frozen=True)
class RootMapping:
    source: str  # "parameter_trend" | "actor_attainment" | "constant"
    parameter_id: Optional[str] = None
    threshold: Optional[float] = None
    scale: Optional[float] = None
    direction: str = "below"  # or "above"
    actor_id: Optional[str] = None
    invert: bool = False
    p: Optional[float] = None

    def to_json(self) -> dict:
        if self.source == "parameter_trend":
            return {"source": "parameter_trend", "parameter_id": self.parameter_id,
                    "threshold": self.threshold, "scale": self.scale,
                    "direction": self.direction}
        if self.source == "actor_attainment":
            return {"source": "actor_attainment", "actor_id": self.actor_id,
                    "invert": self.invert}
        return {"source": "constant", "p": self.p}

    @staticmethod
    def from_json(doc: dict) -> "RootMapping":
        src = doc.get("source")
        if src == "parameter_trend":
            scale = float(doc["scale"])
            if scale <= 0:
                raise NetworkError("root_mapping scale must be > 0")
            return RootMapping(source=src, parameter_id=doc["parameter_id"],
                               threshold=float(doc["threshold"]), scale=scale,
                               direction=doc.get("direction", "below"))
        if src == "actor_attainment":
            return RootMapping(source=src, actor_id=doc["actor_id"],
                               invert=bool(doc.get("invert", False)))
        if src == "constant":
            p = float(doc["p"])
            if not 0.0 <= p <= 1.0:
                raise NetworkError("constant root probability must be in [0,1]")
            return RootMapping(source=src, p=p)
        raise NetworkError(f"unknown root_mapping source {src!r}")


@dataclass(frozen=True)
class BbnNode:
    id: str
    states: tuple = ("true", "false")
    parents: tuple = ()
    cpt: tuple = ()  # rows over parent-state combos (first parent slowest), each a distribution
    root_mapping: Optional[RootMapping] = None


@dataclass(frozen=True)
class ScenarioNetwork:
    nodes: tuple
    intervention_node: str

    def node(self, node_id: str) -> BbnNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise NetworkError(f"unknown node {node_id!r}")

    def node_ids(self) -> tuple:
        return tuple(n.id for n in self.nodes)

    def roots(self) -> tuple:
        return tuple(n for n in self.nodes if not n.parents)

    def to_json(self) -> dict:
        return {
            "nodes": [
                {k: v for k, v in {
                    "id": n.id,
                    "states": list(n.states),
                    "parents": list(n.parents),
                    "cpt": [list(row) for row in n.cpt],
                    "root_mapping": None if n.root_mapping is None else n.root_mapping.to_json(),
                }.items() if not (k == "root_mapping" and v is None)}
                for n in self.nodes
            ],
            "intervention_node": self.intervention_node,
        }

    @staticmethod
    def from_json(doc: dict) -> "ScenarioNetwork":
        nodes = tuple(
            BbnNode(
                id=nd["id"],
                states=tuple(nd.get("states", ["true", "false"])),
                parents=tuple(nd.get("parents", [])),
                cpt=tuple(tuple(float(x) for x in row) for row in nd.get("cpt", [])),
                root_mapping=(RootMapping.from_json(nd["root_mapping"])
                              if nd.get("root_mapping") else None),
            )
            for nd in doc.get("nodes", [])
        )
        return ScenarioNetwork(nodes=nodes, intervention_node=doc["intervention_node"])


@dataclass(frozen=True)
class PosteriorReport:
    query_node: str
    states: tuple
    marginal: tuple
    evidence: Mapping = field(default_factory=dict)

    def p(self, state: str) -> float:
        return self.marginal[self.states.index(state)]


# ---------------------------------------------------------------------------
# validation

def topological_order(net: ScenarioNetwork):
    """Kahn's algorithm; raises NetworkError listing a cycle if one exists."""
    ids = net.node_ids()
    indeg = {i: 0 for i in ids}
    children = {i: [] for i in ids}
    for n in net.nodes:
        for p in n.parents:
            if p not in indeg:
                raise NetworkError(f"node {n.id!r} has unknown parent {p!r}")
            children[p].append(n.id)
            indeg[n.id] += 1
    queue = [i for i in ids if indeg[i] == 0]
    order = []
    while queue:
        nid = queue.pop(0)
        order.append(nid)
        for c in children[nid]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if len(order) < len(ids):
        cycle = sorted(i for i in ids if indeg[i] > 0)
        raise NetworkError(f"cycle among nodes {cycle}")
    return order


def validate_network(net: ScenarioNetwork) -> None:
    if len(set(net.node_ids())) != len(net.nodes):
        raise NetworkError("duplicate node ids")
    topological_order(net)
    by_id = {n.id: n for n in net.nodes}
    for n in net.nodes:
        if len(n.states) < 2:
            raise NetworkError(f"node {n.id!r} needs >= 2 states")
        if n.root_mapping is not None and n.parents:
            raise NetworkError(f"node {n.id!r}: root_mapping on a non-root node")
        rows_needed = 1
        for p in n.parents:
            rows_needed *= len(by_id[p].states)
        if len(n.cpt) != rows_needed:
            raise NetworkError(
                f"node {n.id!r}: CPT has {len(n.cpt)} rows, needs {rows_needed}")
        for r, row in enumerate(n.cpt):
            if len(row) != len(n.states):
                raise NetworkError(f"node {n.id!r}: CPT row {r} has wrong width")
            if any(x < -0.0 or x > 1.0 + ROW_SUM_TOL for x in row):
                raise NetworkError(f"node {n.id!r}: CPT row {r} has values outside [0,1]")
            if abs(sum(row) - 1.0) > ROW_SUM_TOL:
                raise NetworkError(
                    f"node {n.id!r}: CPT row {r} sums to {sum(row)!r}, not 1")
    if net.intervention_node not in by_id:
        raise NetworkError(f"intervention node {net.intervention_node!r} not in network")
    if len(by_id[net.intervention_node].states) != 2:
        raise NetworkError("intervention node must be binary")


# ---------------------------------------------------------------------------
# root mapping

def logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def map_roots(net: ScenarioNetwork, trends: Mapping, attainments: Mapping) -> ScenarioNetwork:
    """Replace each root's prior per its mapping.

    ``trends`` maps parameter_id -> (mean, std) at the horizon year;
    ``attainments`` maps actor_id -> attainment in [0, 1].
    """
    new_nodes = []
    for n in net.nodes:
        rm = n.root_mapping
        if rm is None:
            new_nodes.append(n)
            continue
        if rm.source == "parameter_trend":
            if rm.parameter_id not in trends:
                raise InferenceError(f"no trend for parameter {rm.parameter_id!r}")
            mean, _std = trends[rm.parameter_id]
            z = (rm.threshold - mean) / rm.scale
            if rm.direction == "above":
                z = -z
            p = logistic(z)
        elif rm.source == "actor_attainment":
            if rm.actor_id not in attainments:
                raise InferenceError(f"no attainment for actor {rm.actor_id!r}")
            p = attainments[rm.actor_id]
            if rm.invert:
                p = 1.0 - p
        else:
            p = rm.p
        rest = (1.0 - p) / max(1, len(n.states) - 1)
        row = (p,) + tuple(rest for _ in n.states[1:])
        new_nodes.append(replace(n, cpt=(row,)))
    return replace(net, nodes=tuple(new_nodes))


# ---------------------------------------------------------------------------
# factors

class _Factor:
    __slots__ = ("vars", "table")

    def __init__(self, vars_, table):
        self.vars = tuple(vars_)
        self.table = np.asarray(table, dtype=float)

    def multiply(self, other: "_Factor") -> "_Factor":
        out_vars = list(self.vars)
        for v in other.vars:
            if v not in out_vars:
                out_vars.append(v)
        a = self._expand(out_vars)
        b = other._expand(out_vars)
        return _Factor(out_vars, a * b)

    def _expand(self, out_vars):
        # permute own axes into out_vars order, inserting new axes of size 1
        perm = [self.vars.index(v) for v in out_vars if v in self.vars]
        arr = np.transpose(self.table, perm)
        shape = []
        k = 0
        for v in out_vars:
            if v in self.vars:
                shape.append(arr.shape[k])
                k += 1
            else:
                shape.append(1)
        return arr.reshape(shape)

    def marginalize(self, var) -> "_Factor":
        axis = self.vars.index(var)
        return _Factor(
            tuple(v for v in self.vars if v != var),
            self.table.sum(axis=axis))

    def reduce(self, var, state_index) -> "_Factor":
        axis = self.vars.index(var)
        return _Factor(
            tuple(v for v in self.vars if v != var),
            np.take(self.table, state_index, axis=axis))


def _node_factor(net: ScenarioNetwork, node: BbnNode) -> _Factor:
    by_id = {n.id: n for n in net.nodes}
    parent_sizes = [len(by_id[p].states) for p in node.parents]
    shape = parent_sizes + [len(node.states)]
    table = np.asarray(node.cpt, dtype=float).reshape(shape)
    return _Factor(tuple(node.parents) + (node.id,), table)


def _check_evidence(net: ScenarioNetwork, evidence: Mapping) -> dict:
    out = {}
    for nid, state in evidence.items():
        node = net.node(nid)
        if state not in node.states:
            raise InferenceError(f"node {nid!r} has no state {state!r}")
        out[nid] = node.states.index(state)
    return out


def infer(net: ScenarioNetwork, query: str, evidence: Optional[Mapping] = None) -> PosteriorReport:
    """Exact posterior marginal of ``query`` by variable elimination."""
    evidence = dict(evidence or {})
    qnode = net.node(query)
    ev_idx = _check_evidence(net, evidence)
    if query in evidence:
        marginal = tuple(1.0 if s == evidence[query] else 0.0 for s in qnode.states)
        return PosteriorReport(query, qnode.states, marginal, evidence)

    factors = []
    for n in net.nodes:
        f = _node_factor(net, n)
        for v, idx in ev_idx.items():
            if v in f.vars:
                f = f.reduce(v, idx)
        factors.append(f)

    to_eliminate = set()
    for f in factors:
        to_eliminate.update(f.vars)
    to_eliminate.discard(query)

    # min-degree: repeatedly eliminate the variable appearing with the fewest
    # distinct neighbors across current factors
    while to_eliminate:
        neighbor_count = {}
        for v in to_eliminate:
            nbrs = set()
            for f in factors:
                if v in f.vars:
                    nbrs.update(f.vars)
            nbrs.discard(v)
            neighbor_count[v] = len(nbrs)
        var = min(sorted(to_eliminate), key=lambda v: neighbor_count[v])
        to_eliminate.discard(var)
        related = [f for f in factors if var in f.vars]
        if not related:
            continue
        product = related[0]
        for f in related[1:]:
            product = product.multiply(f)
        factors = [f for f in factors if var not in f.vars]
        factors.append(product.marginalize(var))

    result = factors[0]
    for f in factors[1:]:
        result = result.multiply(f)
    if result.vars != (query,):
        result = _Factor((query,), result._expand([query]).reshape(len(qnode.states)))
    total = float(result.table.sum())
    if total <= 0.0:
        raise InferenceError("contradictory evidence: zero-probability evidence set")
    marginal = tuple(float(x) / total for x in result.table)
    return PosteriorReport(query, qnode.states, marginal, evidence)


def enumerate_joint(net: ScenarioNetwork, query: str,
                    evidence: Optional[Mapping] = None) -> PosteriorReport:
    """Oracle: posterior by summation over the full joint distribution."""
    evidence = dict(evidence or {})
    ev_idx = _check_evidence(net, evidence)
    qnode = net.node(query)
    by_id = {n.id: n for n in net.nodes}
    order = topological_order(net)

    space = 1
    for n in net.nodes:
        space *= len(n.states)
        if space > ENUM_LIMIT:
            raise InferenceError(f"state space exceeds {ENUM_LIMIT}")

    sizes = [len(by_id[nid].states) for nid in order]
    pos = {nid: i for i, nid in enumerate(order)}
    acc = [0.0] * len(qnode.states)

    assignment = [0] * len(order)
    while True:
        ok = all(assignment[pos[nid]] == idx for nid, idx in ev_idx.items())
        if ok:
            p = 1.0
            for nid in order:
                node = by_id[nid]
                row = 0
                for par in node.parents:
                    row = row * len(by_id[par].states) + assignment[pos[par]]
                p *= node.cpt[row][assignment[pos[nid]]]
            acc[assignment[pos[query]]] += p
        # odometer increment
        k = len(order) - 1
        while k >= 0:
            assignment[k] += 1
            if assignment[k] < sizes[k]:
                break
            assignment[k] = 0
            k -= 1
        if k < 0:
            break

    total = sum(acc)
    if total <= 0.0:
        raise InferenceError("contradictory evidence: zero-probability evidence set")
    return PosteriorReport(query, qnode.states, tuple(x / total for x in acc), evidence)


# ---------------------------------------------------------------------------
# sensitivity

def set_root_prior(net: ScenarioNetwork, root: str, p: float) -> ScenarioNetwork:
    node = net.node(root)
    if node.parents:
        raise NetworkError(f"node {root!r} is not a root")
    p = min(1.0, max(0.0, p))
    rest = (1.0 - p) / max(1, len(node.states) - 1)
    row = (p,) + tuple(rest for _ in node.states[1:])
    new_nodes = tuple(replace(n, cpt=(row,)) if n.id == root else n for n in net.nodes)
    return replace(net, nodes=new_nodes)


def root_prior(net: ScenarioNetwork, root: str) -> float:
    node = net.node(root)
    if node.parents:
        raise NetworkError(f"node {root!r} is not a root")
    return node.cpt[0][0]


def sensitivity(net: ScenarioNetwork, root: str, deltas: Sequence[float]):
    """Sweep a root prior by each delta and report (p_root, p_intervention) pairs."""
    base = root_prior(net, root)
    out = []
    for d in deltas:
        p = min(1.0, max(0.0, base + d))
        swept = set_root_prior(net, root, p)
        post = infer(swept, net.intervention_node)
        out.append((p, post.marginal[0]))
    return out


def intervention_given_root_combos(net: ScenarioNetwork, sampled_roots: Sequence[str]):
    """P(intervention = first state | each joint state combo of ``sampled_roots``).

    Lets callers re-evaluate the intervention marginal for many root priors
    cheaply: the marginal is multilinear in root priors, so
    p = sum over combos of prod(prior terms) * table[combo].
    Returns (state_counts, table) with combos in row-major order.
    """
    counts = [len(net.node(r).states) for r in sampled_roots]
    total = 1
    for c in counts:
        total *= c
    table = np.empty(total, dtype=float)
    for flat in range(total):
        rem = flat
        ev = {}
        for r, c in zip(reversed(sampled_roots), reversed(counts)):
            ev[r] = net.node(r).states[rem % c]
            rem //= c
        post = infer(net, net.intervention_node, ev)
        table[flat] = post.marginal[0]
    return counts, table
