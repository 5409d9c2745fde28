#!/usr/bin/env python3
"""
Tests for ontological models: validity conditions, predictions and contextuality detection.
"""

import numpy as np
import pytest

from contextkit.compress import build_quasi_model
from contextkit.counterfactual import six_state_fixture, six_state_ontological_model
from contextkit.errors import ContractError, InputError, LookupFailure, StructuralError
from contextkit.fixtures import compression_contextual, compression_noncontextual
from contextkit.ontmodel import (EquivalenceClass, OntologicalModel, check_gleason_property, convex_mixture,
                                 detect_measurement_contextuality, detect_preparation_contextuality,
                                 infer_equivalence_classes, predict, prediction_table, validate_model)
from contextkit.scenario import Context, Event, Scenario

SCENARIO = Scenario(("M", "X", "Y"), (Context("C1", ("M", "X"), True), Context("C2", ("M", "Y"), True)))


def random_model(rng, x):
    """Two contexts sharing M; responses in [0, 1] with complements, Dirichlet states."""
    m1, m2 = rng.random(x), rng.random(x)
    responses = {(Event("M"), "C1"): m1, (Event("X"), "C1"): 1 - m1,
                 (Event("M"), "C2"): m2, (Event("Y"), "C2"): 1 - m2}
    preps = {f"P{k}": rng.dirichlet(np.ones(x)) for k in range(3)}
    return OntologicalModel(SCENARIO, x, preps, responses)


def conditions(violations):
    return {v.code for v in violations}


def test_random_models_are_valid_and_mutations_are_caught():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        x = int(rng.integers(2, 8))
        m = random_model(rng, x)
        assert validate_model(m) == []

        mu = np.array(m.preparations["P0"])
        shifted = mu.copy()
        shifted[1] += mu[0] + 0.25
        shifted[0] = -0.25
        assert conditions(validate_model(m.with_preparations({"P0": shifted}))) == {"condition-1"}
        assert conditions(validate_model(m.with_preparations({"P0": mu * 1.1}))) == {"condition-2"}

        resp = dict(m.responses)
        xi = np.array(resp[(Event("M"), "C1")])
        resp[(Event("M"), "C1")] = np.where(np.arange(x) == 0, -0.2, xi)
        resp[(Event("X"), "C1")] = np.where(np.arange(x) == 0, 1.2, 1 - xi)
        bad = OntologicalModel(SCENARIO, x, m.preparations, resp)
        assert conditions(validate_model(bad)) == {"condition-3"}

        resp = dict(m.responses)
        resp[(Event("X"), "C1")] = np.array(resp[(Event("X"), "C1")]) + np.where(np.arange(x) == 0, 0.1, 0.0)
        bad = OntologicalModel(SCENARIO, x, m.preparations, resp)
        assert conditions(validate_model(bad)) == {"condition-4"}


def test_missing_response_is_a_completeness_violation():
    m = compression_noncontextual()
    resp = {k: v for k, v in m.responses.items() if k != (Event("Y"), "C2")}
    [v] = validate_model(OntologicalModel(m.scenario, 4, m.preparations, resp))
    assert v.code == "condition-4"
    assert v.location["missing"] == ["Y=0"]


def test_complement_response_must_match():
    m = compression_noncontextual()
    resp = dict(m.responses)
    resp[(Event("M", 1), "C1")] = [0, 0, 0, 1]
    violations = validate_model(OntologicalModel(m.scenario, 4, m.preparations, resp))
    assert {v.code for v in violations} == {"condition-4"}
    assert all(v.location.get("measurement") == "M" for v in violations)


def test_construction_errors():
    with pytest.raises(StructuralError):
        OntologicalModel(SCENARIO, 2, {"P": [1, 0, 0]}, {})
    with pytest.raises(StructuralError):
        OntologicalModel(SCENARIO, 2, {}, {(Event("Y"), "C1"): [1, 0]})
    with pytest.raises(LookupFailure):
        compression_noncontextual().xi(Event("Y"), "C1")
    with pytest.raises(InputError):
        OntologicalModel.from_dict({"scenario": SCENARIO.to_dict(), "num_ontic_states": 2,
                                    "preparations": {"P": [1, "x"]}, "responses": []})


@pytest.mark.parametrize("outcome", ["x", 1.5, -1, True])
def test_response_outcome_must_be_a_nonnegative_integer(outcome):
    doc = compression_contextual().to_dict()
    doc["responses"][0]["outcome"] = outcome
    with pytest.raises(InputError) as err:
        OntologicalModel.from_dict(doc)
    assert err.value.field_path == "responses[0].outcome"


def test_predictions():
    m = compression_contextual()
    assert predict(m, "P1", Event("M"), "C1") == pytest.approx(0.5)
    assert predict(m, "P1", Event("M"), "C2") == pytest.approx(0.5)
    assert predict(m, "P2", Event("K3"), "C3") == pytest.approx(0.5)
    rows = prediction_table(m)
    assert len(rows) == len(m.preparations) * len(m.responses)
    assert rows[0] == ("P1", "C1", "M", 0, pytest.approx(0.5))


def test_measurement_contextuality_with_gleason_property():
    m = compression_contextual()
    [mc] = detect_measurement_contextuality(m)
    assert mc.measurement == "M" and mc.contexts == ("C1", "C2")
    assert mc.deviation == pytest.approx(1.0)
    assert check_gleason_property(m) == []
    assert detect_measurement_contextuality(compression_noncontextual()) == []


def test_gleason_gap_is_located():
    m = compression_contextual().with_preparations({"Q": [1, 0, 0, 0]})
    [gap] = check_gleason_property(m)
    assert (gap.preparation, gap.measurement, gap.contexts) == ("Q", "M", ("C1", "C2"))
    assert gap.gap == pytest.approx(1.0)


def test_gleason_gaps_are_found_beyond_the_first_outcome():
    # outcome 0 agrees across contexts; outcomes 1 and 2 are swapped in C2
    s = Scenario(("M",), (Context("C1", ("M",)), Context("C2", ("M",))), {"M": 3})
    responses = {(Event("M", 0), "C1"): [1, 0, 0], (Event("M", 1), "C1"): [0, 1, 0], (Event("M", 2), "C1"): [0, 0, 1],
                 (Event("M", 0), "C2"): [1, 0, 0], (Event("M", 1), "C2"): [0, 0, 1], (Event("M", 2), "C2"): [0, 1, 0]}
    m = OntologicalModel(s, 3, {"P": [0, 1, 0]}, responses)
    assert validate_model(m) == []
    gaps = check_gleason_property(m)
    assert [(g.outcome, g.contexts) for g in gaps] == [(1, ("C1", "C2")), (2, ("C1", "C2"))]
    assert all(g.gap == pytest.approx(1.0) for g in gaps)
    with pytest.raises(ContractError, match="M=1"):
        build_quasi_model(m)
    assert check_gleason_property(m.with_preparations({"P": [1, 0, 0]})) == []


def test_preparation_contextuality_of_six_state_model():
    m = six_state_ontological_model()
    found = detect_preparation_contextuality(m)
    assert found
    assert all(f.equivalence_class.name == "maximally-mixed" for f in found)
    with pytest.raises(ContractError):
        detect_preparation_contextuality(m, [EquivalenceClass(("P12",))])


def test_inferred_classes_group_the_composites():
    m = six_state_ontological_model()
    classes = infer_equivalence_classes(m)
    composites = set(six_state_fixture().composites)
    assert any(composites <= set(c.preparations) for c in classes)


def test_convex_mixture():
    m = compression_noncontextual()
    mix = convex_mixture(m, [("P1", 0.5), ("P2", 0.5)])
    assert mix.tolist() == [0.5, 0.5, 0.0, 0.0]
    with pytest.raises(ContractError):
        convex_mixture(m, [("P1", 0.5), ("P2", 0.6)])
    with pytest.raises(ContractError):
        convex_mixture(m, [("P1", 1.5), ("P2", -0.5)])
