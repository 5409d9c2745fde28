"""
Ontological models: epistemic states, response functions and the
contextuality checks defined on them

A model over N ontic states assigns each preparation P a distribution mu_P
and each (event, context) a response vector xi. A valid model satisfies:

    1. mu_P >= 0
    2. sum(mu_P) = 1
    3. xi >= 0
    4. for every context C and ontic state, the responses of C's outcome
       events sum to 1
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import config
from .errors import ContractError, InputError, LookupFailure, StructuralError, Violation
from .file_ops import join_path, parse_int, parse_vector, require
from .scenario import Event, Scenario, shared_measurements

logger = logging.getLogger(__name__)

ResponseKey = Tuple[Event, str]


def _frozen_vector(values: Iterable[Any]) -> np.ndarray:
    arr = np.array([float(v) for v in values], dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EquivalenceClass:
    """Preparations asserted to be operationally equivalent."""

    preparations: Tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "preparations", tuple(self.preparations))

    def label(self) -> str:
        return self.name or "{" + ",".join(self.preparations) + "}"


@dataclass(frozen=True, eq=False)
class OntologicalModel:
    scenario: Scenario
    num_ontic_states: int
    preparations: Mapping[str, np.ndarray]
    responses: Mapping[ResponseKey, np.ndarray]
    equivalence_classes: Tuple[EquivalenceClass, ...] = ()

    def __post_init__(self):
        n = self.num_ontic_states
        if n < 1:
            raise StructuralError("num_ontic_states must be positive")
        preps = {p: _frozen_vector(mu) for p, mu in self.preparations.items()}
        resps = {}
        for (event, cid), xi in self.responses.items():
            ctx = self.scenario.context(cid)
            if event.measurement not in ctx.members:
                raise StructuralError(f"measurement '{event.measurement}' is not a member of context '{cid}'")
            if not 0 <= event.outcome < self.scenario.arity_of(event.measurement):
                raise StructuralError(f"outcome {event.outcome} out of range for '{event.measurement}'")
            resps[(event, cid)] = _frozen_vector(xi)
        for p, mu in preps.items():
            if mu.shape != (n,):
                raise StructuralError(f"epistemic state '{p}' has length {mu.shape[0]}, expected {n}")
        for (event, cid), xi in resps.items():
            if xi.shape != (n,):
                raise StructuralError(f"response {event.label()}@{cid} has length {xi.shape[0]}, expected {n}")
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "responses", resps)
        object.__setattr__(self, "equivalence_classes", tuple(self.equivalence_classes))

    def mu(self, p: str) -> np.ndarray:
        try:
            return self.preparations[p]
        except KeyError:
            raise LookupFailure(f"unknown preparation '{p}'") from None

    def xi(self, e: Event, cid: str) -> np.ndarray:
        try:
            return self.responses[(e, cid)]
        except KeyError:
            raise LookupFailure(f"no response function for {e.label()} in context '{cid}'") from None

    def with_preparations(self, extra: Mapping[str, Sequence[float]]) -> "OntologicalModel":
        preps = dict(self.preparations)
        preps.update(extra)
        return OntologicalModel(self.scenario, self.num_ontic_states, preps, self.responses,
                                self.equivalence_classes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario.to_dict(),
            "num_ontic_states": self.num_ontic_states,
            "preparations": {p: mu.tolist() for p, mu in self.preparations.items()},
            "responses": [{"measurement": e.measurement, "context": cid, "outcome": e.outcome, "xi": xi.tolist()}
                          for (e, cid), xi in self.responses.items()],
            "equivalence_classes": [list(c.preparations) for c in self.equivalence_classes],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "OntologicalModel":
        scen_doc = doc.get("scenario", doc)
        scenario = Scenario.from_dict(scen_doc, "scenario" if "scenario" in doc else "")
        n = require(doc, "num_ontic_states", kind=int)
        preps = {}
        for p, vec in require(doc, "preparations", kind=dict).items():
            preps[p] = parse_vector(vec, f"preparations.{p}")
        resps = {}
        for i, raw in enumerate(require(doc, "responses", kind=list)):
            where = f"responses[{i}]"
            event = Event(str(require(raw, "measurement", where)),
                          parse_int(raw.get("outcome", 0), join_path(where, "outcome"), minimum=0))
            cid = str(require(raw, "context", where))
            resps[(event, cid)] = parse_vector(require(raw, "xi", where), join_path(where, "xi"))
        classes = []
        for i, raw in enumerate(doc.get("equivalence_classes", [])):
            if not isinstance(raw, list):
                raise InputError("equivalence class must be a list of preparation ids",
                                 field_path=f"equivalence_classes[{i}]")
            classes.append(EquivalenceClass(tuple(str(p) for p in raw)))
        try:
            return cls(scenario, n, preps, resps, tuple(classes))
        except LookupFailure as e:
            raise InputError(str(e)) from e


@dataclass
class MeasurementContextuality:
    measurement: str
    contexts: Tuple[str, str]
    deviation: float


@dataclass
class PreparationContextuality:
    equivalence_class: EquivalenceClass
    preparations: Tuple[str, str]
    deviation: float


@dataclass
class GleasonGap:
    preparation: str
    measurement: str
    contexts: Tuple[str, str]
    gap: float
    outcome: int = 0


def validate_model(m: OntologicalModel, tol: Optional[float] = None) -> List[Violation]:
    """Report every violated condition (1-4) with its location."""
    tol = config.EPS_SUM if tol is None else tol
    out: List[Violation] = []
    for p, mu in m.preparations.items():
        bad = np.flatnonzero(mu < 0)
        for lam in bad:
            out.append(Violation("condition-1", f"mu_{p}[{lam}] = {mu[lam]:.6g} is negative",
                                 {"preparation": p, "ontic_state": int(lam)}))
        s = float(mu.sum())
        if abs(s - 1.0) > tol:
            out.append(Violation("condition-2", f"mu_{p} sums to {s:.12g}", {"preparation": p, "sum": s}))
    for (e, cid), xi in m.responses.items():
        for lam in np.flatnonzero(xi < 0):
            out.append(Violation("condition-3", f"xi[{e.label()}@{cid}][{lam}] = {xi[lam]:.6g} is negative",
                                 {"measurement": e.measurement, "outcome": e.outcome, "context": cid,
                                  "ontic_state": int(lam)}))
    n = m.num_ontic_states
    for ctx in m.scenario.contexts:
        events = m.scenario.context_outcomes(ctx.id)
        total = np.zeros(n)
        missing = []
        for e in events:
            xi = m.responses.get((e, ctx.id))
            if xi is None:
                missing.append(e.label())
            else:
                total = total + xi
        if missing:
            out.append(Violation("condition-4", f"context '{ctx.id}' lacks responses for {', '.join(missing)}",
                                 {"context": ctx.id, "missing": missing}))
            continue
        for lam in np.flatnonzero(np.abs(total - 1.0) > tol):
            out.append(Violation("condition-4", f"responses of context '{ctx.id}' sum to {total[lam]:.12g} "
                                 f"at ontic state {lam}", {"context": ctx.id, "ontic_state": int(lam)}))
        if len(ctx.members) > 1:
            for mid in ctx.members:
                neg = m.responses.get((Event(mid, 1), ctx.id))
                if neg is None:
                    continue
                pos = m.responses[(Event(mid, 0), ctx.id)]
                for lam in np.flatnonzero(np.abs(neg + pos - 1.0) > tol):
                    out.append(Violation("condition-4", f"outcomes of '{mid}' in context '{ctx.id}' do not sum "
                                         f"to 1 at ontic state {lam}",
                                         {"context": ctx.id, "measurement": mid, "ontic_state": int(lam)}))
    return out


def predict(m: OntologicalModel, p: str, e: Event, c: str) -> float:
    """Probability of event e in context c under preparation p: mu_P . xi."""
    return float(m.mu(p) @ m.xi(e, c))


def detect_measurement_contextuality(m: OntologicalModel, tol: Optional[float] = None) -> List[MeasurementContextuality]:
    """Shared measurements whose positive-outcome response differs between two contexts."""
    tol = config.EPS_CONTEXT if tol is None else tol
    out = []
    for meas, cids in shared_measurements(m.scenario).items():
        e = Event(meas, 0)
        stored = [c for c in cids if (e, c) in m.responses]
        for c1, c2 in itertools.combinations(stored, 2):
            dev = float(np.max(np.abs(m.responses[(e, c1)] - m.responses[(e, c2)])))
            if dev > tol:
                out.append(MeasurementContextuality(meas, (c1, c2), dev))
    return out


def detect_preparation_contextuality(m: OntologicalModel, classes: Optional[Sequence[EquivalenceClass]] = None,
                                     tol: Optional[float] = None) -> List[PreparationContextuality]:
    """Pairs of operationally equivalent preparations with distinct epistemic states."""
    tol = config.EPS_CONTEXT if tol is None else tol
    classes = m.equivalence_classes if classes is None else classes
    out = []
    for cls in classes:
        if len(cls.preparations) < 2:
            raise ContractError(f"equivalence class {cls.label()} needs at least two preparations")
        vectors = [(p, m.mu(p)) for p in cls.preparations]
        for (p1, mu1), (p2, mu2) in itertools.combinations(vectors, 2):
            dev = float(np.max(np.abs(mu1 - mu2)))
            if dev > tol:
                out.append(PreparationContextuality(cls, (p1, p2), dev))
    return out


def check_gleason_property(m: OntologicalModel, tol: Optional[float] = None) -> List[GleasonGap]:
    """Preparation, shared measurement, outcome and context pair wherever an outcome probability depends on the context."""
    tol = config.EPS_CONTEXT if tol is None else tol
    out = []
    for meas, cids in shared_measurements(m.scenario).items():
        for k in range(m.scenario.arity_of(meas)):
            e = Event(meas, k)
            stored = [c for c in cids if (e, c) in m.responses]
            for p, mu in m.preparations.items():
                for c1, c2 in itertools.combinations(stored, 2):
                    gap = abs(float(mu @ m.responses[(e, c1)]) - float(mu @ m.responses[(e, c2)]))
                    if gap > tol:
                        out.append(GleasonGap(p, meas, (c1, c2), gap, k))
    return out


def convex_mixture(m: OntologicalModel, parts: Sequence[Tuple[str, Any]], tol: Optional[float] = None) -> np.ndarray:
    tol = config.EPS_SUM if tol is None else tol
    weights = [float(w) for _, w in parts]
    if any(w < 0 for w in weights):
        raise ContractError("mixture weights must be nonnegative")
    if abs(sum(weights) - 1.0) > tol:
        raise ContractError(f"mixture weights sum to {sum(weights):.12g}, expected 1")
    out = np.zeros(m.num_ontic_states)
    for (p, _), w in zip(parts, weights):
        out = out + w * m.mu(p)
    return out


def infer_equivalence_classes(m: OntologicalModel, tol: Optional[float] = None) -> List[EquivalenceClass]:
    """
    Group preparations whose predictions agree on every stored response.
    Convenience only; declared classes remain authoritative.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    keys = list(m.responses)
    if not keys:
        return []
    R = np.vstack([m.responses[k] for k in keys])
    profiles = {p: R @ mu for p, mu in m.preparations.items()}
    classes: List[EquivalenceClass] = []
    assigned = set()
    for p in m.preparations:
        if p in assigned:
            continue
        group = [q for q in m.preparations
                 if q not in assigned and np.max(np.abs(profiles[q] - profiles[p])) <= tol]
        assigned.update(group)
        if len(group) >= 2:
            classes.append(EquivalenceClass(tuple(group)))
    return classes


def prediction_table(m: OntologicalModel) -> List[Tuple[str, str, str, int, float]]:
    """(preparation, context, measurement, outcome, probability) for every stored response."""
    rows = []
    order = {cid: i for i, cid in enumerate(m.scenario.context_ids)}
    keys = sorted(m.responses, key=lambda k: (order[k[1]], m.scenario.measurements.index(k[0].measurement),
                                              k[0].outcome))
    for p in m.preparations:
        for e, cid in keys:
            rows.append((p, cid, e.measurement, e.outcome, predict(m, p, e, cid)))
    return rows


PREDICTION_HEADER = ("preparation", "context", "measurement", "outcome", "probability")
