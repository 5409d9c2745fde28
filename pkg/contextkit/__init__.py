"""
contextkit - contextuality analysis of scenarios, ontological models and empirical tables
"""

__version__ = "0.1.0"
__author__ = "contextkit developers"

from .config import APP_NAME, SCHEMA_VERSION
from .errors import (ContextkitError, ContractError, DegenerateBasisError, IncidentError, InputError,
                     InstanceTooLarge, InternalError, LookupFailure, SolverError, StructuralError, Violation)
from .scenario import (Context, Event, Scenario, derive_exclusivity_graph, expand_two_outcome,
                       scenario_from_contexts, shared_measurements, validate_scenario)
from .ontmodel import (EquivalenceClass, OntologicalModel, check_gleason_property, convex_mixture,
                       detect_measurement_contextuality, detect_preparation_contextuality,
                       infer_equivalence_classes, predict, prediction_table, validate_model)
from .counterfactual import (CounterfactualDistribution, FeasibilityInstance, compare_biases, composite_density_matrix,
                             enumeration_oracle, feasibility_search, is_unbiased, outcome_weight_bounds,
                             six_state_fixture, six_state_ontological_model)
from .empirical import (EmpiricalModel, Level, classify_hierarchy, classify_possibilistic, classify_strong,
                        empirical_from_ontological, global_section_probabilistic, signed_global_section,
                        validate_no_disturbance)
from .compress import build_quasi_model, gleason_subspace, project_responses, quasi_normalization_gaps
from .graphinv import (ExclusivityGraph, exclusivity_check, fractional_packing_number, independence_number,
                       invariants, is_probabilistic_model, lovasz_number, nchv_exists, witness_sigma)
from .causal import (BoxBehavior, JointDistribution, LoopComposition, Phenomenon, conditional_entropy, entropy,
                     factorisable_check, gleason_constraint_audit, information_identity_residual, is_no_disturbance,
                     loop_fixed_points, mutual_information)
from .marbleworld import (CapPrior, DiscretePrior, HaarPrior, MarbleContext, MarbleState, PointPrior,
                          export_ontological_model, find_ks_witness, gleason_violation_test, marble_box,
                          marble_outcome, sample_statistics)
from .fixtures import FIXTURES, fixture_document, resolve_fixtures
from .report import AnalysisReport

__all__ = [
    "APP_NAME",
    "SCHEMA_VERSION",
    "ContextkitError",
    "ContractError",
    "DegenerateBasisError",
    "IncidentError",
    "InputError",
    "InstanceTooLarge",
    "InternalError",
    "LookupFailure",
    "SolverError",
    "StructuralError",
    "Violation",
    "Context",
    "Event",
    "Scenario",
    "derive_exclusivity_graph",
    "expand_two_outcome",
    "scenario_from_contexts",
    "shared_measurements",
    "validate_scenario",
    "EquivalenceClass",
    "OntologicalModel",
    "check_gleason_property",
    "convex_mixture",
    "detect_measurement_contextuality",
    "detect_preparation_contextuality",
    "infer_equivalence_classes",
    "predict",
    "prediction_table",
    "validate_model",
    "CounterfactualDistribution",
    "FeasibilityInstance",
    "six_state_fixture",
    "six_state_ontological_model",
    "compare_biases",
    "composite_density_matrix",
    "enumeration_oracle",
    "feasibility_search",
    "is_unbiased",
    "outcome_weight_bounds",
    "EmpiricalModel",
    "Level",
    "classify_hierarchy",
    "classify_possibilistic",
    "classify_strong",
    "empirical_from_ontological",
    "global_section_probabilistic",
    "signed_global_section",
    "validate_no_disturbance",
    "build_quasi_model",
    "gleason_subspace",
    "project_responses",
    "quasi_normalization_gaps",
    "ExclusivityGraph",
    "exclusivity_check",
    "fractional_packing_number",
    "independence_number",
    "invariants",
    "is_probabilistic_model",
    "lovasz_number",
    "nchv_exists",
    "witness_sigma",
    "BoxBehavior",
    "JointDistribution",
    "LoopComposition",
    "Phenomenon",
    "conditional_entropy",
    "entropy",
    "factorisable_check",
    "gleason_constraint_audit",
    "is_no_disturbance",
    "information_identity_residual",
    "loop_fixed_points",
    "mutual_information",
    "CapPrior",
    "DiscretePrior",
    "HaarPrior",
    "MarbleContext",
    "MarbleState",
    "PointPrior",
    "export_ontological_model",
    "find_ks_witness",
    "gleason_violation_test",
    "marble_box",
    "marble_outcome",
    "sample_statistics",
    "FIXTURES",
    "fixture_document",
    "resolve_fixtures",
    "AnalysisReport",
]
