#!/usr/bin/env python3
"""
Tests for compressing Gleason-respecting models into quasi-ontological models.
"""

import itertools

import numpy as np
import pytest

from contextkit.compress import (build_quasi_model, detect_negativity, gleason_subspace, project_responses,
                                 quasi_normalization_gaps)
from contextkit.errors import ContractError
from contextkit.fixtures import compression_contextual, compression_noncontextual
from contextkit.ontmodel import OntologicalModel, predict
from contextkit.scenario import Context, Event, Scenario


def five_state_model():
    """M shared by C1/C2 and N shared by C3/C4, each with a context-dependent response."""
    s = Scenario(("M", "N", "X1", "X2", "Y3", "Y4"),
                 (Context("C1", ("M", "X1"), True), Context("C2", ("M", "X2"), True),
                  Context("C3", ("N", "Y3"), True), Context("C4", ("N", "Y4"), True)))
    xi = {("M", "C1"): [1, 1, 0, 0, 0], ("M", "C2"): [0, 0, 1, 1, 0],
          ("N", "C3"): [1, 0, 1, 0, 0], ("N", "C4"): [0, 1, 0, 1, 0]}
    other = {"C1": "X1", "C2": "X2", "C3": "Y3", "C4": "Y4"}
    responses = {}
    for (meas, cid), vec in xi.items():
        responses[(Event(meas), cid)] = vec
        responses[(Event(other[cid]), cid)] = [1 - v for v in vec]
    preps = {"E4": [0, 0, 0, 0, 1], "U": [0.25, 0.25, 0.25, 0.25, 0], "D1": [0.5, 0, 0, 0.5, 0],
             "D2": [0, 0.5, 0.5, 0, 0]}
    return OntologicalModel(s, 5, preps, responses)


def max_prediction_error(m, q):
    return max(abs(predict(m, p, e, cid) - q.predict(p, e)) for (e, cid) in m.responses for p in m.preparations)


@pytest.mark.parametrize("build", [compression_contextual, five_state_model])
def test_contextual_models_compress_exactly(build):
    m = build()
    q = build_quasi_model(m)
    assert q.num_quasi_states < m.num_ontic_states
    assert max_prediction_error(m, q) < 1e-10
    state_gap, resp_gap = quasi_normalization_gaps(q)
    assert state_gap < 1e-9 and resp_gap < 1e-9
    measurements = [e.measurement for e in q.responses if e.outcome == 0]
    assert len(measurements) == len(set(measurements))
    assert q.negativity == detect_negativity(q)


def test_contextual_fixture_needs_negative_quasi_probabilities():
    q = build_quasi_model(compression_contextual())
    assert q.negativity
    assert min(n.value for n in q.negativity) == pytest.approx((1 - np.sqrt(6)) / 4, abs=1e-9)


def relabel_ontic_states(m, perm):
    perm = list(perm)
    preps = {p: np.asarray(mu, dtype=float)[perm] for p, mu in m.preparations.items()}
    resps = {k: np.asarray(xi, dtype=float)[perm] for k, xi in m.responses.items()}
    return OntologicalModel(m.scenario, m.num_ontic_states, preps, resps, m.equivalence_classes)


def quasi_predictions(q):
    return {(p, e.label()): q.predict(p, e) for p in q.states for e in q.responses}


@pytest.mark.parametrize("build", [compression_contextual, five_state_model])
def test_relabelling_ontic_states_keeps_predictions(build):
    m = build()
    reference = build_quasi_model(m)
    expected = quasi_predictions(reference)
    for perm in itertools.permutations(range(m.num_ontic_states)):
        q = build_quasi_model(relabel_ontic_states(m, perm))
        assert q.num_quasi_states == reference.num_quasi_states
        got = quasi_predictions(q)
        assert got.keys() == expected.keys()
        for key, value in expected.items():
            assert got[key] == pytest.approx(value, abs=1e-10)


def test_five_state_model_keeps_three_dimensions():
    m = five_state_model()
    basis, eliminated = gleason_subspace(m)
    assert basis.dim == 3
    assert basis.is_orthonormal()
    assert np.all(np.abs(basis.entry_sums) > 1e-8)
    assert {d.measurement for d in eliminated} == {"M", "N"}
    # the context-dependent parts of the responses carry no state weight here
    assert build_quasi_model(m).negativity == []


def test_noncontextual_model_keeps_full_dimension():
    m = compression_noncontextual()
    q = build_quasi_model(m)
    assert q.num_quasi_states == m.num_ontic_states == 4
    assert q.negativity == []
    assert max_prediction_error(m, q) < 1e-10


def test_projection_merges_context_responses():
    m = compression_contextual()
    basis, _ = gleason_subspace(m)
    projected = project_responses(m, basis)
    assert np.allclose(projected[Event("M")], [0.5, 0.5, 0.5, 0.5])
    P = basis.projector()
    for mu in m.preparations.values():
        assert np.allclose(P @ mu, mu)


def test_gleason_violation_blocks_compression():
    m = compression_contextual().with_preparations({"Q": [1, 0, 0, 0]})
    with pytest.raises(ContractError):
        build_quasi_model(m)


def test_invalid_model_is_rejected():
    m = compression_contextual().with_preparations({"Q": [0.5, 0.5, 0.5, 0]})
    with pytest.raises(ContractError):
        gleason_subspace(m)


def test_quasi_model_serializes_negativity():
    doc = build_quasi_model(compression_contextual()).to_dict()
    assert doc["kind"] == "quasi-model"
    assert doc["negativity"]
    assert len(doc["basis"]) == doc["num_ontic_states"]
