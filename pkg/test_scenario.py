#!/usr/bin/env python3
"""
Tests for measurement scenarios and derived exclusivity graphs.
"""

from fractions import Fraction

import pytest

from contextkit.errors import InputError, LookupFailure, StructuralError
from contextkit.fixtures import bell_scenario
from contextkit.scenario import (Context, Event, Scenario, derive_exclusivity_graph, expand_two_outcome,
                                 scenario_from_contexts, shared_measurements, validate_scenario)


def codes(violations):
    return sorted(v.code for v in violations)


def test_bell_scenario_is_valid():
    s = bell_scenario()
    assert validate_scenario(s) == []
    assert s.measurements == ("A0", "B0", "B1", "A1")
    assert shared_measurements(s) == {"A0": ["c00", "c01"], "B0": ["c00", "c10"],
                                      "B1": ["c01", "c11"], "A1": ["c10", "c11"]}


def test_structural_violations_are_reported():
    s = Scenario(("A", "A", "B"), (Context("c1", ("A", "Z")), Context("c1", ("B", "B"))), {"Q": 2})
    assert codes(validate_scenario(s)) == ["duplicate-context", "duplicate-measurement", "duplicate-member",
                                           "unknown-measurement", "unknown-member"]


def test_subset_of_maximal_context_is_rejected():
    s = Scenario(("A", "B", "C"), (Context("big", ("A", "B", "C"), True), Context("small", ("A", "B"))))
    [v] = validate_scenario(s)
    assert v.code == "maximal-subset"
    assert v.location == {"context": "small", "maximal_context": "big"}


def test_empty_scenario_has_no_contexts():
    assert codes(validate_scenario(Scenario(("A",), ()))) == ["no-contexts"]


def test_context_outcomes_follow_member_count():
    s = Scenario(("M", "A", "B"), (Context("single", ("M",)), Context("pair", ("A", "B"))), {"M": 3})
    assert s.context_outcomes("single") == [Event("M", 0), Event("M", 1), Event("M", 2)]
    assert s.context_outcomes("pair") == [Event("A", 0), Event("B", 0)]
    assert s.outcome_tuples("pair") == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(LookupFailure):
        s.context("missing")


def test_from_dict_reports_field_paths():
    with pytest.raises(InputError) as e:
        Scenario.from_dict({"measurements": ["A"], "contexts": [{"id": "c"}]})
    assert e.value.field_path == "contexts[0].members"
    with pytest.raises(InputError) as e:
        Scenario.from_dict({"measurements": ["A"], "contexts": [{"members": ["A"]}], "arity": {"A": "5/2"}})
    assert e.value.field_path == "arity.A"


def test_expand_two_outcome_splits_multi_outcome_measurements():
    s = Scenario(("M", "N"), (Context("c", ("M", "N")),), {"M": 3})
    e = expand_two_outcome(s)
    assert e.measurements == ("M#0", "M#1", "M#2", "N")
    assert e.contexts[0].members == ("M#0", "M#1", "M#2", "N")
    assert all(e.arity_of(m) == 2 for m in e.measurements)


def test_derive_exclusivity_graph_from_contexts():
    s = scenario_from_contexts({f"k{i}": (f"v{i}", f"v{(i + 1) % 5}") for i in range(5)})
    g = derive_exclusivity_graph(s, {"v0": "1/2"})
    assert g.vertices == ("v0", "v1", "v2", "v3", "v4")
    assert g.weights[0] == Fraction(1, 2) and g.weights[1] == 1
    assert len(g.edges()) == 5
    assert not g.maximal_scenario


def test_derive_exclusivity_graph_rejects_three_outcomes():
    s = Scenario(("M",), (Context("c", ("M",)),), {"M": 3})
    with pytest.raises(StructuralError):
        derive_exclusivity_graph(s)
    assert len(derive_exclusivity_graph(expand_two_outcome(s)).vertices) == 3
