#!/usr/bin/env python3
"""
Tests for the marble-world model: outcomes, priors, sampling and exports.
"""

import numpy as np
import pytest

from contextkit.causal import gleason_constraint_audit
from contextkit.errors import ContractError, InputError, LookupFailure, StructuralError
from contextkit.fixtures import marble_document
from contextkit.marbleworld import (CapPrior, DiscretePrior, HaarPrior, MarbleContext, MarbleState, PointPrior,
                                    asymmetric_cap_prior, asymmetric_pair, export_ontological_model,
                                    find_ks_witness, gleason_violation_test, load_marble_setup, marble_box,
                                    marble_outcome, sample_statistics, shared_indices)
from contextkit.ontmodel import detect_measurement_contextuality, validate_model


def test_outcome_is_the_closest_direction():
    k1, k2 = asymmetric_pair()
    a = MarbleState([1, 0, 0])
    assert marble_outcome(a, k1) == 0
    assert k2.labels[marble_outcome(a, k2)] == "D"
    c = MarbleState([0, 0, 1])
    assert k1.labels[marble_outcome(c, k1)] == "C"
    assert k2.labels[marble_outcome(c, k2)] == "C"


def test_ties_go_to_the_lowest_index():
    k1, _ = asymmetric_pair()
    assert marble_outcome(MarbleState.normalized([1, 1, 0]), k1) == 0
    assert marble_outcome(MarbleState.normalized([0, 1, 1]), k1) == 1


def test_outcome_ignores_global_phases():
    rng = np.random.default_rng(11)
    k1, k2 = asymmetric_pair()
    for c in (k1, k2):
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=c.dimension))
        rephased = MarbleContext(c.directions * phases[:, None], c.labels)
        for amplitudes in HaarPrior(3).sample(rng, 300):
            lam = MarbleState(amplitudes)
            shifted = MarbleState(amplitudes * np.exp(1j * rng.uniform(0, 2 * np.pi)))
            expected = marble_outcome(lam, c)
            assert marble_outcome(shifted, c) == expected
            assert marble_outcome(lam, rephased) == expected


@pytest.mark.parametrize("perm", [(0, 1, 2), (2, 0, 1), (1, 0, 2), (2, 1, 0)])
def test_frequencies_follow_outcome_relabelling(perm):
    k1, _ = asymmetric_pair()
    perm = list(perm)
    relabelled = MarbleContext(k1.directions[perm], tuple(k1.labels[k] for k in perm))
    for prior in (HaarPrior(3), asymmetric_cap_prior()):
        base = sample_statistics(prior, k1, 3000, seed=4)
        moved = sample_statistics(prior, relabelled, 3000, seed=4)
        assert moved.counts.tolist() == base.counts[perm].tolist()
        assert moved.to_dict(relabelled.labels)["frequencies"] == base.to_dict(k1.labels)["frequencies"]


def test_shared_direction_is_located_in_both_contexts():
    k1, k2 = asymmetric_pair()
    assert shared_indices(k1, k2, "C") == (2, 0)
    with pytest.raises(ContractError):
        shared_indices(k1, k2, "A")
    with pytest.raises(LookupFailure):
        shared_indices(k1, k2, "Z")


def test_ks_witness_separates_the_contexts():
    k1, k2 = asymmetric_pair()
    lam = find_ks_witness(k1, k2, "C")
    assert lam is not None
    assert k1.labels[marble_outcome(lam, k1)] == "C"
    assert k2.labels[marble_outcome(lam, k2)] != "C"


def test_identical_contexts_have_no_witness():
    k1, _ = asymmetric_pair()
    assert find_ks_witness(k1, k1, "C", budget=200) is None


def test_cap_prior_violates_the_gleason_property():
    k1, k2 = asymmetric_pair()
    res = gleason_violation_test(asymmetric_cap_prior(), k1, k2, "C", 100000, seed=0)
    assert res.violated
    assert res.gap == pytest.approx(res.p_first - res.p_second)
    assert res.ci[0] <= res.gap <= res.ci[1]


def test_haar_prior_respects_the_gleason_property():
    k1, k2 = asymmetric_pair()
    res = gleason_violation_test(HaarPrior(3), k1, k2, "C", 50000, seed=1)
    assert abs(res.gap) < 0.02
    assert res.p_first == pytest.approx(1 / 3, abs=0.02)


def test_point_prior_is_deterministic():
    k1, k2 = asymmetric_pair()
    res = gleason_violation_test(PointPrior(MarbleState([0, 0, 1])), k1, k2, "C", 100)
    assert res.gap == 0.0
    assert res.p_first == res.p_second == 1.0


def test_sampling_does_not_depend_on_jobs():
    k1, _ = asymmetric_pair()
    prior = asymmetric_cap_prior()
    serial = sample_statistics(prior, k1, 5000, seed=3, jobs=1, batch_size=1000)
    threaded = sample_statistics(prior, k1, 5000, seed=3, jobs=4, batch_size=1000)
    assert np.array_equal(serial.counts, threaded.counts)
    assert serial.counts.sum() == 5000
    assert set(serial.to_dict(k1.labels)["frequencies"]) == {"A", "B", "C"}


def test_cap_prior_samples_stay_in_the_cap():
    prior = asymmetric_cap_prior()
    states = prior.sample(np.random.default_rng(0), 500)
    assert states.shape == (500, 3)
    assert np.all(np.abs(states @ prior.center.amplitudes.conj()) ** 2 >= 0.8)
    with pytest.raises(ContractError):
        CapPrior(prior.center, 1.0)


def test_exported_model_is_measurement_contextual():
    k1, k2 = asymmetric_pair()
    discrete = DiscretePrior.from_prior(asymmetric_cap_prior(), 1000, seed=0)
    model = export_ontological_model(discrete, {"K1": k1, "K2": k2})
    assert validate_model(model) == []
    found = detect_measurement_contextuality(model)
    assert found
    assert {f.measurement for f in found} == {"C"}


def test_export_rejects_conflicting_labels():
    k1, _ = asymmetric_pair()
    clash = MarbleContext(np.eye(3)[[1, 0, 2]], ("A", "X", "Y"))
    with pytest.raises(StructuralError):
        export_ontological_model(DiscretePrior([MarbleState([1, 0, 0])]), {"K1": k1, "K3": clash})


def test_marble_box_loop_fails_determinism():
    k1, k2 = asymmetric_pair()
    witness = find_ks_witness(k1, k2, "C")
    discrete = DiscretePrior([witness, MarbleState([0, 0, 1]), MarbleState([1, 0, 0])])
    audit = gleason_constraint_audit(marble_box(k1, k2, "C", discrete))
    assert audit.mutual_information > 0
    assert audit.verdict == "determinism-failure"


def test_discrete_prior_weights_are_checked():
    with pytest.raises(ContractError):
        DiscretePrior([])
    with pytest.raises(ContractError):
        DiscretePrior([MarbleState([1, 0])], [0.5])


def test_load_marble_setup_from_fixture():
    setup = load_marble_setup(marble_document())
    assert setup.dimension == 3
    assert set(setup.contexts) == {"K1", "K2"}
    assert isinstance(setup.prior, CapPrior)
    assert setup.prior.min_overlap == 0.8
    assert setup.shared == "C"
    assert setup.pair == ("K1", "K2")
    assert setup.n == 100000


def test_load_marble_setup_reports_bad_fields():
    doc = marble_document()
    with pytest.raises(InputError) as err:
        load_marble_setup(dict(doc, prior={"type": "gaussian"}))
    assert err.value.field_path == "prior.type"
    with pytest.raises(InputError):
        load_marble_setup(dict(doc, compare=["K1", "K9"]))
    bad = dict(doc, contexts={"K1": {"directions": [[1, 0, 0], [1, 0, 0], [0, 0, 1]]}})
    with pytest.raises(InputError) as err:
        load_marble_setup(bad)
    assert err.value.field_path == "contexts.K1"


def test_context_construction_errors():
    with pytest.raises(ContractError):
        MarbleContext(np.ones((3, 3)))
    with pytest.raises(StructuralError):
        MarbleContext(np.eye(3)[:2])
    with pytest.raises(StructuralError):
        MarbleContext(np.eye(2), ("A",))
    with pytest.raises(ContractError):
        MarbleState([1, 1, 0])
