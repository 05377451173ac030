"""Exact inference tests: variable elimination against joint enumeration."""

import numpy as np
import pytest

from themis import bbn
from themis.bbn import (BbnNode, RootMapping, ScenarioNetwork, infer,
                        enumerate_joint, intervention_given_root_combos,
                        logistic, map_roots, root_prior, sensitivity,
                        set_root_prior, topological_order, validate_network)
from themis.errors import InferenceError, NetworkError


def random_dag_network(rng, max_nodes=12):
    """Random binary DAG with random CPTs; node i may only depend on j < i."""
    n = int(rng.integers(2, max_nodes + 1))
    nodes = []
    for i in range(n):
        max_parents = min(i, 3)
        k = int(rng.integers(0, max_parents + 1))
        parents = tuple(f"n{j}" for j in
                        sorted(rng.choice(i, size=k, replace=False))) if k else ()
        rows = []
        for _ in range(2 ** len(parents)):
            p = float(rng.uniform(0.01, 0.99))
            rows.append((p, 1.0 - p))
        nodes.append(BbnNode(id=f"n{i}", parents=parents, cpt=tuple(rows)))
    order = rng.permutation(n)
    shuffled = tuple(nodes[i] for i in order)
    return ScenarioNetwork(nodes=shuffled, intervention_node=f"n{n - 1}")


def test_variable_elimination_matches_enumeration():
    rng = np.random.default_rng(20240815)
    for _ in range(100):
        net = random_dag_network(rng)
        validate_network(net)
        query = f"n{int(rng.integers(0, len(net.nodes)))}"
        evidence = {}
        if rng.random() < 0.5:
            others = [n.id for n in net.nodes if n.id != query]
            for ev_node in rng.choice(others, size=min(2, len(others)),
                                      replace=False):
                evidence[str(ev_node)] = "true" if rng.random() < 0.5 else "false"
        try:
            ve = infer(net, query, evidence)
        except InferenceError:
            # contradictory or zero-probability evidence; the oracle must agree
            with pytest.raises(InferenceError):
                enumerate_joint(net, query, evidence)
            continue
        brute = enumerate_joint(net, query, evidence)
        assert ve.states == brute.states
        for a, b in zip(ve.marginal, brute.marginal):
            assert a == pytest.approx(b, abs=1e-9)


def test_infer_simple_chain_closed_form():
    # rain -> sprinkler-free wet-grass chain with hand-computed posterior
    net = ScenarioNetwork(
        nodes=(
            BbnNode("rain", cpt=((0.3, 0.7),)),
            BbnNode("wet", parents=("rain",), cpt=((0.9, 0.1), (0.2, 0.8))),
        ),
        intervention_node="wet")
    p_wet = 0.3 * 0.9 + 0.7 * 0.2
    assert infer(net, "wet").p("true") == pytest.approx(p_wet, abs=1e-12)
    # Bayes: P(rain | wet) = 0.27 / 0.41
    post = infer(net, "rain", {"wet": "true"})
    assert post.p("true") == pytest.approx(0.27 / 0.41, abs=1e-12)


def test_topological_order_rejects_cycles():
    net = ScenarioNetwork(
        nodes=(
            BbnNode("a", parents=("b",), cpt=((0.5, 0.5), (0.5, 0.5))),
            BbnNode("b", parents=("a",), cpt=((0.5, 0.5), (0.5, 0.5))),
        ),
        intervention_node="a")
    with pytest.raises(NetworkError):
        topological_order(net)


def test_validate_network_rejects_bad_rows():
    net = ScenarioNetwork(
        nodes=(BbnNode("a", cpt=((0.6, 0.6),)),),
        intervention_node="a")
    with pytest.raises(NetworkError):
        validate_network(net)


def test_contradictory_evidence_raises():
    net = ScenarioNetwork(
        nodes=(
            BbnNode("a", cpt=((1.0, 0.0),)),
            BbnNode("b", parents=("a",), cpt=((1.0, 0.0), (0.5, 0.5))),
        ),
        intervention_node="b")
    with pytest.raises(InferenceError):
        infer(net, "b", {"a": "false"})


def test_root_prior_roundtrip():
    net = ScenarioNetwork(
        nodes=(
            BbnNode("a", cpt=((0.3, 0.7),)),
            BbnNode("b", parents=("a",), cpt=((0.9, 0.1), (0.2, 0.8))),
        ),
        intervention_node="b")
    swapped = set_root_prior(net, "a", 0.8)
    assert root_prior(swapped, "a") == pytest.approx(0.8)
    assert root_prior(net, "a") == pytest.approx(0.3)  # original untouched
    assert infer(swapped, "b").p("true") == pytest.approx(
        0.8 * 0.9 + 0.2 * 0.2, abs=1e-12)


def test_sensitivity_sweep_monotone_for_positive_link():
    net = ScenarioNetwork(
        nodes=(
            BbnNode("a", cpt=((0.5, 0.5),)),
            BbnNode("b", parents=("a",), cpt=((0.9, 0.1), (0.2, 0.8))),
        ),
        intervention_node="b")
    pairs = sensitivity(net, "a", (-0.2, -0.1, 0.0, 0.1, 0.2))
    ps = [p for _, p in pairs]
    assert ps == sorted(ps)
    assert pairs[2][1] == pytest.approx(infer(net, "b").p("true"), abs=1e-12)


def test_sensitivity_clamps_at_unit_interval():
    net = ScenarioNetwork(
        nodes=(
            BbnNode("a", cpt=((0.95, 0.05),)),
            BbnNode("b", parents=("a",), cpt=((0.9, 0.1), (0.2, 0.8))),
        ),
        intervention_node="b")
    pairs = sensitivity(net, "a", (0.2,))
    assert pairs[0][0] == pytest.approx(1.0)


def test_logistic_root_mapping_directions():
    rm_below = RootMapping(source="parameter_trend", parameter_id="x",
                           threshold=10.0, scale=2.0, direction="below")
    rm_above = RootMapping(source="parameter_trend", parameter_id="x",
                           threshold=10.0, scale=2.0, direction="above")
    net = ScenarioNetwork(
        nodes=(
            BbnNode("low", root_mapping=rm_below, cpt=((0.5, 0.5),)),
            BbnNode("high", root_mapping=rm_above, cpt=((0.5, 0.5),)),
            BbnNode("out", parents=("low",), cpt=((1.0, 0.0), (0.0, 1.0))),
        ),
        intervention_node="out")
    mapped = map_roots(net, trends={"x": (8.0, 1.0)}, attainments={})
    # mean 8 sits below threshold 10: "below" root likely, "above" unlikely
    p_low = root_prior(mapped, "low")
    p_high = root_prior(mapped, "high")
    assert p_low == pytest.approx(logistic((10.0 - 8.0) / 2.0), abs=1e-12)
    assert p_low + p_high == pytest.approx(1.0, abs=1e-12)
    assert p_low > 0.5 > p_high


def test_actor_attainment_and_constant_mappings():
    net = ScenarioNetwork(
        nodes=(
            BbnNode("happy", root_mapping=RootMapping(
                source="actor_attainment", actor_id="actor_a"),
                cpt=((0.5, 0.5),)),
            BbnNode("angry", root_mapping=RootMapping(
                source="actor_attainment", actor_id="actor_a", invert=True),
                cpt=((0.5, 0.5),)),
            BbnNode("fixed", root_mapping=RootMapping(source="constant", p=0.25),
                    cpt=((0.5, 0.5),)),
            BbnNode("out", parents=("happy",), cpt=((1.0, 0.0), (0.0, 1.0))),
        ),
        intervention_node="out")
    mapped = map_roots(net, trends={}, attainments={"actor_a": 0.7})
    assert root_prior(mapped, "happy") == pytest.approx(0.7)
    assert root_prior(mapped, "angry") == pytest.approx(0.3)
    assert root_prior(mapped, "fixed") == pytest.approx(0.25)


def test_intervention_given_root_combos_recombination():
    """The combo table plus independent root priors reproduces the marginal."""
    rng = np.random.default_rng(5)
    for _ in range(20):
        net = random_dag_network(rng, max_nodes=8)
        roots = [n.id for n in net.roots()]
        counts, table = intervention_given_root_combos(net, roots)
        priors = [root_prior(net, r) for r in roots]
        total = 0.0
        for flat in range(len(table)):
            rem = flat
            weight = 1.0
            for p, c in zip(reversed(priors), reversed(counts)):
                state = rem % c
                weight *= p if state == 0 else (1.0 - p)
                rem //= c
            total += weight * table[flat]
        expected = infer(net, net.intervention_node).marginal[0]
        assert total == pytest.approx(expected, abs=1e-9)


def test_network_json_roundtrip():
    rng = np.random.default_rng(11)
    net = random_dag_network(rng)
    doc = net.to_json()
    back = ScenarioNetwork.from_json(doc)
    assert back == net


def test_root_mapping_json_validation():
    with pytest.raises(NetworkError):
        RootMapping.from_json({"source": "constant", "p": 1.5})
    with pytest.raises(NetworkError):
        RootMapping.from_json({"source": "parameter_trend", "parameter_id": "x",
                               "threshold": 1.0, "scale": 0.0})
    with pytest.raises(NetworkError):
        RootMapping.from_json({"source": "mystery"})
