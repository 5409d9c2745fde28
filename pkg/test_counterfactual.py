#!/usr/bin/env python3
"""
Tests for counterfactual distributions, bias and the six-state construction.
"""

from fractions import Fraction

import numpy as np
import pytest

from contextkit.counterfactual import (COMPOSITES, CounterfactualDistribution, FeasibilityInstance,
                                       MarginalTarget, six_state_fixture, born_probability, compare_biases,
                                       composite_density_matrix, enumeration_oracle, feasibility_search,
                                       is_unbiased, outcome_weight_bounds, product_distribution, target_residual)
from contextkit.errors import ContractError, InputError, InstanceTooLarge, StructuralError


@pytest.fixture(scope="module")
def fx():
    return six_state_fixture()


def test_born_table_is_exact(fx):
    table = fx.born_table()
    assert table[("P1", "M1")] == 1
    assert table[("P2", "M1")] == 0
    assert table[("P3", "M2")] == 1
    assert table[("P1", "M2")] == Fraction(1, 4)
    assert table[("P4", "M3")] == Fraction(3, 4)
    assert all(isinstance(v, Fraction) for v in table.values())


def test_every_composite_is_maximally_mixed(fx):
    for name in COMPOSITES:
        assert np.allclose(fx.density_matrix(name), np.eye(2) / 2, atol=1e-12)
    with pytest.raises(ContractError):
        composite_density_matrix([(fx.states["P1"], 0.5)])


def test_measurement_directions_give_born_values(fx):
    assert born_probability(fx.states["P5"], fx.measurements["M3"]) == pytest.approx(1.0)
    assert born_probability(np.eye(2) / 2, fx.measurements["M2"], 1) == pytest.approx(0.5)


def test_six_state_instance_is_infeasible_exactly(fx):
    res = feasibility_search(fx.instance())
    assert res.verdict == "INFEASIBLE"
    assert res.exact
    assert res.certificate is not None and res.certificate.verified
    assert res.certificate.multipliers
    assert res.excluded > 0
    assert enumeration_oracle(fx.instance()) is False


@pytest.mark.parametrize("dropped", sorted(COMPOSITES))
def test_leave_one_out_matches_oracle(fx, dropped):
    sub = fx.instance().without(dropped)
    assert dropped not in sub.identified
    res = feasibility_search(sub)
    assert res.feasible == enumeration_oracle(sub)
    assert res.verdict == "INFEASIBLE"


def test_single_mixture_is_feasible(fx):
    inst = fx.instance(["P12"])
    res = feasibility_search(inst)
    assert res.feasible
    assert res.shared is not None and res.shared.validate() == []
    assert target_residual(inst, res.distributions) == 0
    assert enumeration_oracle(inst)


def test_two_pair_mixtures_already_conflict(fx):
    inst = fx.instance(["P12", "P34"])
    assert not feasibility_search(inst).feasible
    assert enumeration_oracle(inst) is False


def test_p135_never_weights_all_ones(fx):
    inst = fx.instance([])
    open_inst = FeasibilityInstance(inst.contexts, inst.targets, {}, {"P135": COMPOSITES["P135"]})
    assert outcome_weight_bounds(open_inst, "P135", (1, 1, 1)) == (0, 0)
    lo, hi = outcome_weight_bounds(open_inst, "P12", (0, 0, 0))
    assert lo == 0 and hi > 0


def test_mixtures_share_marginals_but_not_biases(fx):
    p135, p12 = fx.product_distribution("P135"), fx.product_distribution("P12")
    for i in range(3):
        assert p135.marginal(i) == [Fraction(1, 2), Fraction(1, 2)]
    cmp = compare_biases(p135, p12, 0)
    assert cmp.same_marginals
    assert cmp.different_biases
    assert cmp.conditionals[(0, 0)] == ([Fraction(1, 3), Fraction(2, 3)], [Fraction(1, 10), Fraction(9, 10)])
    assert not p135.weights.get((1, 1, 1))


def test_bias_of_product_and_correlated_distributions():
    d = product_distribution(("a", "b"), [(Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 2), Fraction(1, 2))])
    assert is_unbiased(d, 0).unbiased
    corr = CounterfactualDistribution(("a", "b"), (2, 2), {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})
    verdict = is_unbiased(corr, 1)
    assert not verdict.unbiased
    assert verdict.witness.conditioning == {"a": 0}
    assert verdict.witness.conditional == [1, 0]
    assert corr.joint_marginal([1]) == {(0,): Fraction(1, 2), (1,): Fraction(1, 2)}


def test_distribution_shape_errors():
    with pytest.raises(StructuralError):
        CounterfactualDistribution(("a",), (2,), {(2,): Fraction(1)})
    d = CounterfactualDistribution(("a",), (2,), {(0,): Fraction(1, 2)})
    assert [v.code for v in d.validate()] == ["normalization"]


def test_joint_targets_over_several_contexts():
    inst = FeasibilityInstance(("a", "b"), (
        MarginalTarget("P", ("a", "b"), (Fraction(1, 2), 0, 0, Fraction(1, 2))),
        MarginalTarget("Q", ("a",), (Fraction(1, 2), Fraction(1, 2))),
        MarginalTarget("Q", ("b",), (1, 0)),
    ), mixtures={}, identified=("P", "Q"))
    res = feasibility_search(inst)
    assert not res.feasible
    assert res.certificate.verified


def test_instance_from_dict_and_caps(fx):
    doc = fx.instance().to_dict()
    inst = FeasibilityInstance.from_dict(doc)
    assert inst.identified == tuple(COMPOSITES)
    assert inst.space_size() == 8
    with pytest.raises(InstanceTooLarge):
        feasibility_search(inst, cap=4)
    doc["targets"][0]["context"] = "M9"
    del doc["targets"][0]["contexts"]
    with pytest.raises(InputError):
        FeasibilityInstance.from_dict(doc)
