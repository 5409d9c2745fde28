"""
Bundled fixture catalog and fixture builders
"""

import math
from fractions import Fraction
from typing import Any, Callable, Dict, List

from .causal import BoxBehavior
from .counterfactual import six_state_fixture, six_state_ontological_model
from .empirical import EmpiricalModel
from .errors import LookupFailure
from .graphinv import ExclusivityGraph
from .marbleworld import asymmetric_pair, asymmetric_cap_prior
from .ontmodel import OntologicalModel
from .scenario import Context, Event, Scenario, scenario_from_contexts


# --- Bell scenario tables ---

BELL_CONTEXTS = {"c00": ("A0", "B0"), "c01": ("A0", "B1"), "c10": ("A1", "B0"), "c11": ("A1", "B1")}


def bell_scenario() -> Scenario:
    return scenario_from_contexts(BELL_CONTEXTS, maximal=True)


def _bell_model(prob: Callable[[int, int, int, int], Any]) -> EmpiricalModel:
    tables = {}
    for cid in BELL_CONTEXTS:
        x, y = int(cid[1]), int(cid[2])
        tables[cid] = {(a, b): prob(a, b, x, y) for a in (0, 1) for b in (0, 1)}
    return EmpiricalModel(bell_scenario(), tables)


def pr_box() -> EmpiricalModel:
    return _bell_model(lambda a, b, x, y: Fraction(1, 2) if (a ^ b) == (x & y) else Fraction(0))


def tsirelson_box() -> EmpiricalModel:
    """Quantum CHSH correlations saturating Tsirelson's bound."""
    return _bell_model(lambda a, b, x, y: (1 + (-1) ** (a ^ b ^ (x & y)) / math.sqrt(2)) / 4)


def classical_box() -> EmpiricalModel:
    return _bell_model(lambda a, b, x, y: Fraction(1, 4))


def deterministic_box(assignment: Dict[str, int]) -> EmpiricalModel:
    """Point-mass tables of one global assignment {"A0": a0, "A1": a1, "B0": b0, "B1": b1}."""
    return _bell_model(lambda a, b, x, y: Fraction(int(a == assignment[f"A{x}"] and b == assignment[f"B{y}"])))


HARDY_TABLES = {
    "c00": ("1/10", "1/10", "1/10", "7/10"),
    "c01": ("1/5", "0", "1/5", "3/5"),
    "c10": ("1/5", "1/5", "0", "3/5"),
    "c11": ("0", "2/5", "2/5", "1/5"),
}


def hardy_model() -> EmpiricalModel:
    """Possibilistically but not strongly contextual; tuples ordered 00, 01, 10, 11."""
    order = [(0, 0), (0, 1), (1, 0), (1, 1)]
    return EmpiricalModel(bell_scenario(), {cid: {t: Fraction(v) for t, v in zip(order, vals)}
                                            for cid, vals in HARDY_TABLES.items()})


# --- exclusivity graphs ---

def kcbs_cycle(weights: Any = 1) -> ExclusivityGraph:
    vertices = tuple(f"v{i}" for i in range(5))
    edges = tuple((vertices[i], vertices[(i + 1) % 5]) for i in range(5))
    return ExclusivityGraph(vertices, (weights,) * 5, edges)


def kcbs_quantum() -> ExclusivityGraph:
    """Pentagon at its optimal quantum weights, whose sum equals theta(C5) = sqrt(5)."""
    c = math.cos(math.pi / 5)
    return kcbs_cycle(c / (1 + c))


# --- compression fixtures ---

def _compression_scenario() -> Scenario:
    return Scenario(("M", "X", "Y", "K0", "K1", "K2", "K3"),
                    (Context("C1", ("M", "X"), True), Context("C2", ("M", "Y"), True),
                     Context("C3", ("K0", "K1", "K2", "K3"), True)))


def compression_contextual() -> OntologicalModel:
    """
    M's response differs between C1 and C2, yet every preparation gives it
    probability 1/2 in both. Compression drops one dimension and the
    K responses pick up negative entries.
    """
    responses = {
        (Event("M"), "C1"): [1, 1, 0, 0], (Event("X"), "C1"): [0, 0, 1, 1],
        (Event("M"), "C2"): [0, 0, 1, 1], (Event("Y"), "C2"): [1, 1, 0, 0],
    }
    for i in range(4):
        responses[(Event(f"K{i}"), "C3")] = [1 if j == i else 0 for j in range(4)]
    preps = {"P1": [0.5, 0, 0.5, 0], "P2": [0.5, 0, 0, 0.5], "P3": [0, 0.5, 0.5, 0], "P4": [0, 0.5, 0, 0.5]}
    return OntologicalModel(_compression_scenario(), 4, preps, responses)


def compression_noncontextual() -> OntologicalModel:
    responses = {
        (Event("M"), "C1"): [1, 1, 0, 0], (Event("X"), "C1"): [0, 0, 1, 1],
        (Event("M"), "C2"): [1, 1, 0, 0], (Event("Y"), "C2"): [0, 0, 1, 1],
    }
    for i in range(4):
        responses[(Event(f"K{i}"), "C3")] = [1 if j == i else 0 for j in range(4)]
    preps = {f"P{i + 1}": [1 if j == i else 0 for j in range(4)] for i in range(4)}
    return OntologicalModel(_compression_scenario(), 4, preps, responses)


# --- boxes ---

def copy_box() -> BoxBehavior:
    """O = I with a trivial ontic variable."""
    return BoxBehavior.from_function([[0], [1]], 2)


def gleason_box() -> BoxBehavior:
    """O = Q: the output ignores the input."""
    return BoxBehavior.from_function([[0, 1], [0, 1]], 2)


def marble_document() -> Dict[str, Any]:
    k1, k2 = asymmetric_pair()
    prior = asymmetric_cap_prior()

    def encode(v):
        return [f"{complex(z).real!r},{complex(z).imag!r}" for z in v]

    return {
        "kind": "marble",
        "dimension": 3,
        "contexts": {"K1": {"labels": list(k1.labels), "directions": [encode(v) for v in k1.directions]},
                     "K2": {"labels": list(k2.labels), "directions": [encode(v) for v in k2.directions]}},
        "prior": {"type": "cap", "center": encode(prior.center.amplitudes), "min_overlap": prior.min_overlap},
        "shared": "C",
        "compare": ["K1", "K2"],
        "n": 100000,
        "seed": 0,
    }


# Fixture catalog
FIXTURES = {
    "six-state": {
        "title": "Six qubit states whose five maximally mixed composites cannot share one distribution",
        "kind": "counterfactual",
        "builder": lambda: six_state_fixture().instance().to_dict(),
    },
    "six-state-model": {
        "title": "Preparation-contextual ontological model of the six-state construction",
        "kind": "model",
        "builder": lambda: dict(six_state_ontological_model().to_dict(), kind="model"),
    },
    "pr-box": {
        "title": "Popescu-Rohrlich box",
        "kind": "empirical",
        "builder": lambda: pr_box().to_dict(),
    },
    "chsh-quantum": {
        "title": "CHSH tables at Tsirelson's bound",
        "kind": "empirical",
        "builder": lambda: tsirelson_box().to_dict(),
    },
    "classical-product": {
        "title": "Uniform product tables on the Bell scenario",
        "kind": "empirical",
        "builder": lambda: classical_box().to_dict(),
    },
    "hardy": {
        "title": "Hardy-type tables",
        "kind": "empirical",
        "builder": lambda: hardy_model().to_dict(),
    },
    "kcbs-cycle": {
        "title": "Unit-weighted pentagon",
        "kind": "graph",
        "builder": lambda: dict(kcbs_cycle().to_dict(), kind="graph"),
    },
    "kcbs-quantum": {
        "title": "Pentagon at its optimal quantum weights",
        "kind": "graph",
        "builder": lambda: dict(kcbs_quantum().to_dict(), kind="graph"),
    },
    "compress-contextual": {
        "title": "Contextual Gleason-respecting model for compression",
        "kind": "model",
        "builder": lambda: dict(compression_contextual().to_dict(), kind="model"),
    },
    "compress-noncontextual": {
        "title": "Non-contextual control for compression",
        "kind": "model",
        "builder": lambda: dict(compression_noncontextual().to_dict(), kind="model"),
    },
    "marble-asymmetric": {
        "title": "Marble contexts {A,B,C} and {C,D,E} under a cap prior",
        "kind": "marble",
        "builder": marble_document,
    },
    "copy-box": {
        "title": "Box whose output copies its input",
        "kind": "box",
        "builder": lambda: copy_box().to_dict(),
    },
    "gleason-box": {
        "title": "Box whose output ignores its input",
        "kind": "box",
        "builder": lambda: gleason_box().to_dict(),
    },
}


def resolve_fixtures(selected: List[str]) -> List[str]:
    """Resolve fixture names from a user selection ("all" expands to every fixture)."""
    if not selected or "all" in selected:
        return list(FIXTURES.keys())
    bad = [f for f in selected if f not in FIXTURES]
    if bad:
        raise LookupFailure(f"unknown fixture(s): {', '.join(bad)}. Known: {', '.join(FIXTURES.keys())}")
    return selected


def fixture_document(name: str) -> Dict[str, Any]:
    if name not in FIXTURES:
        raise LookupFailure(f"unknown fixture '{name}'")
    return FIXTURES[name]["builder"]()
