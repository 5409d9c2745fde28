"""
Counterfactual outcomes, bias, and the six-state preparation-contextuality
construction

A counterfactual outcome c lists, for each context i, the outcome c_i that
would occur if context i were measured. For a context with several members,
c_i indexes that context's joint outcome tuples in lexicographic order.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from . import config
from .errors import ContractError, IncidentError, InputError, InstanceTooLarge, LookupFailure, StructuralError, Violation
from .file_ops import join_path, parse_int, parse_number, require
from .lp import OPTIMAL, solve_lp, verify_farkas
from .ontmodel import EquivalenceClass, OntologicalModel
from .scenario import Context, Event, Scenario

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]
Outcome = Tuple[int, ...]


# --- qubits ---

@dataclass(frozen=True)
class QubitState:
    a0: complex
    a1: complex

    def __post_init__(self):
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ContractError(f"qubit state has squared norm {norm!r}")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    def density_matrix(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class QubitMeasurement:
    """Two-outcome measurement; outcome 0 is the projector onto `direction`."""

    direction: QubitState

    def projector(self, outcome: int = 0) -> np.ndarray:
        p0 = self.direction.density_matrix()
        return p0 if outcome == 0 else np.eye(2) - p0


MAXIMALLY_MIXED = 0.5 * np.eye(2, dtype=complex)


def born_probability(state: Union[QubitState, np.ndarray], meas: QubitMeasurement, outcome: int = 0) -> float:
    """|<m|psi>|^2 for pure states, Tr(rho P) for density matrices."""
    if isinstance(state, QubitState):
        amp = np.vdot(meas.direction.vector, state.vector)
        p0 = float(abs(amp) ** 2)
        return p0 if outcome == 0 else 1.0 - p0
    rho = np.asarray(state, dtype=complex)
    return float(np.real(np.trace(rho @ meas.projector(outcome))))


# --- distributions over counterfactual outcomes ---

@dataclass(frozen=True, eq=False)
class CounterfactualDistribution:
    contexts: Tuple[str, ...]
    arities: Tuple[int, ...]
    weights: Mapping[Outcome, Number]

    def __post_init__(self):
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "arities", tuple(self.arities))
        if len(self.arities) != len(self.contexts):
            raise StructuralError("one arity per context required")
        clean = {}
        for c, w in self.weights.items():
            c = tuple(int(v) for v in c)
            if len(c) != len(self.contexts) or any(not 0 <= v < a for v, a in zip(c, self.arities)):
                raise StructuralError(f"counterfactual outcome {c} does not fit arities {self.arities}")
            clean[c] = w
        object.__setattr__(self, "weights", clean)

    def validate(self, tol: Optional[float] = None) -> List[Violation]:
        tol = config.EPS_SUM if tol is None else tol
        out = [Violation("negative-weight", f"weight of {c} is {float(w):.6g}", {"outcome": list(c)})
               for c, w in self.weights.items() if w < 0]
        total = sum(self.weights.values(), Fraction(0))
        if abs(total - 1) > tol:
            out.append(Violation("normalization", f"weights sum to {float(total):.12g}", {"sum": float(total)}))
        return out

    def marginal(self, i: int) -> List[Number]:
        out: List[Number] = [Fraction(0)] * self.arities[i]
        for c, w in self.weights.items():
            out[c[i]] += w
        return out

    def joint_marginal(self, indices: Sequence[int]) -> Dict[Outcome, Number]:
        out: Dict[Outcome, Number] = {}
        for c, w in self.weights.items():
            key = tuple(c[i] for i in indices)
            out[key] = out.get(key, Fraction(0)) + w
        return out

    def conditional_marginals(self, i: int) -> Dict[Outcome, List[Number]]:
        """Distribution of c_i given each assignment (with positive weight) of the other entries."""
        groups: Dict[Outcome, List[Number]] = {}
        for c, w in sorted(self.weights.items()):
            if w <= 0:
                continue
            rest = c[:i] + c[i + 1:]
            row = groups.setdefault(rest, [Fraction(0)] * self.arities[i])
            row[c[i]] += w
        out = {}
        for rest, row in groups.items():
            total = sum(row, Fraction(0))
            out[rest] = [v / total for v in row]
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {"contexts": list(self.contexts),
                "weights": {",".join(map(str, c)): w for c, w in sorted(self.weights.items()) if w != 0}}


def product_distribution(contexts: Sequence[str], marginals: Sequence[Sequence[Number]]) -> CounterfactualDistribution:
    """Independent entries with the given per-context marginals."""
    arities = tuple(len(m) for m in marginals)
    weights = {}
    for c in itertools.product(*(range(a) for a in arities)):
        w = Fraction(1)
        for i, v in enumerate(c):
            w = w * marginals[i][v]
        if w != 0:
            weights[c] = w
    return CounterfactualDistribution(tuple(contexts), arities, weights)


def mix_distributions(parts: Sequence[Tuple[CounterfactualDistribution, Number]]) -> CounterfactualDistribution:
    first = parts[0][0]
    weights: Dict[Outcome, Number] = {}
    for d, w in parts:
        if d.contexts != first.contexts:
            raise StructuralError("cannot mix distributions over different contexts")
        for c, v in d.weights.items():
            weights[c] = weights.get(c, Fraction(0)) + w * v
    return CounterfactualDistribution(first.contexts, first.arities, weights)


@dataclass
class BiasWitness:
    conditioning: Dict[str, int]
    conditional: List[Number]
    marginal: List[Number]


@dataclass
class BiasVerdict:
    unbiased: bool
    witness: Optional[BiasWitness] = None


def is_unbiased(d: CounterfactualDistribution, i: int, tol: Optional[float] = None) -> BiasVerdict:
    """
    True iff the distribution of c_i does not depend on the other entries.
    On failure the witness is the first conditioning assignment whose
    conditional marginal differs from the unconditional one.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    if not 0 <= i < len(d.contexts):
        raise LookupFailure(f"context index {i} out of range")
    total = sum((w for w in d.weights.values() if w > 0), Fraction(0))
    marginal = [v / total for v in d.marginal(i)] if total else d.marginal(i)
    others = [ctx for k, ctx in enumerate(d.contexts) if k != i]
    for rest, cond in d.conditional_marginals(i).items():
        if any(abs(a - b) > tol for a, b in zip(cond, marginal)):
            return BiasVerdict(False, BiasWitness(dict(zip(others, rest)), cond, marginal))
    return BiasVerdict(True)


@dataclass
class BiasComparison:
    same_marginals: bool
    different_biases: bool
    conditionals: Dict[Outcome, Tuple[Optional[List[Number]], Optional[List[Number]]]]


def compare_biases(d1: CounterfactualDistribution, d2: CounterfactualDistribution, i: int,
                   tol: Optional[float] = None) -> BiasComparison:
    """Compare how two distributions (typically of one mixed state) bias entry i."""
    tol = config.EPS_CONTEXT if tol is None else tol
    same = all(all(abs(a - b) <= tol for a, b in zip(d1.marginal(k), d2.marginal(k)))
               for k in range(len(d1.contexts)))
    c1, c2 = d1.conditional_marginals(i), d2.conditional_marginals(i)
    table = {rest: (c1.get(rest), c2.get(rest)) for rest in sorted(set(c1) | set(c2))}
    differ = False
    for a, b in table.values():
        if a is None or b is None or any(abs(x - y) > tol for x, y in zip(a, b)):
            differ = True
            break
    return BiasComparison(same, differ, table)


# --- feasibility instances ---

@dataclass(frozen=True, eq=False)
class MarginalTarget:
    """Target joint marginal of one preparation over a subset of contexts (lexicographic order)."""

    preparation: str
    contexts: Tuple[str, ...]
    marginal: Tuple[Number, ...]


def _mapping(value: Any, field_path: str) -> Dict[str, Any]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise InputError(f"expected an object, got {type(value).__name__}", field_path=field_path)
    return value


@dataclass(frozen=True, eq=False)
class FeasibilityInstance:
    contexts: Tuple[str, ...]
    targets: Tuple[MarginalTarget, ...]
    arities: Mapping[str, int] = field(default_factory=dict)
    mixtures: Mapping[str, Mapping[str, Number]] = field(default_factory=dict)
    identified: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "identified", tuple(self.identified))
        for t in self.targets:
            for cid in t.contexts:
                if cid not in self.contexts:
                    raise LookupFailure(f"target references unknown context '{cid}'")
            size = math.prod(self.arity(cid) for cid in t.contexts)
            if len(t.marginal) != size:
                raise StructuralError(f"target for {t.preparation} on {t.contexts} has {len(t.marginal)} "
                                      f"entries, expected {size}")
        for mid in self.identified:
            if mid not in self.mixtures and mid not in self.preparations:
                raise LookupFailure(f"identified preparation '{mid}' is not defined")

    def arity(self, cid: str) -> int:
        return self.arities.get(cid, 2)

    @property
    def preparations(self) -> List[str]:
        seen: Dict[str, None] = {}
        for t in self.targets:
            seen.setdefault(t.preparation, None)
        for parts in self.mixtures.values():
            for p in parts:
                seen.setdefault(p, None)
        return list(seen)

    def mixture(self, mid: str) -> Dict[str, Number]:
        if mid in self.mixtures:
            return dict(self.mixtures[mid])
        if mid in self.preparations:
            return {mid: Fraction(1)}
        raise LookupFailure(f"unknown preparation or mixture '{mid}'")

    def space_size(self) -> int:
        return math.prod(self.arity(c) for c in self.contexts)

    def without(self, mixture_id: str) -> "FeasibilityInstance":
        """Same instance with one mixture dropped from the identification."""
        return FeasibilityInstance(self.contexts, self.targets, self.arities,
                                   {k: v for k, v in self.mixtures.items() if k != mixture_id},
                                   tuple(m for m in self.identified if m != mixture_id))

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "FeasibilityInstance":
        contexts = tuple(str(c) for c in require(doc, "contexts", kind=list))
        arities = {str(k): parse_int(v, f"arity.{k}", minimum=1)
                   for k, v in _mapping(doc.get("arity"), "arity").items()}
        targets = []
        for i, raw in enumerate(require(doc, "targets", kind=list)):
            where = f"targets[{i}]"
            if isinstance(raw, dict) and "contexts" in raw:
                ctxs = tuple(str(c) for c in require(raw, "contexts", where, list))
            else:
                ctxs = (str(require(raw, "context", where)),)
            marg = require(raw, "marginal", where, list)
            targets.append(MarginalTarget(str(require(raw, "preparation", where)), ctxs,
                                          tuple(parse_number(v, join_path(where, f"marginal[{k}]"))
                                                for k, v in enumerate(marg))))
        mixtures = {}
        for mid, parts in _mapping(doc.get("mixtures"), "mixtures").items():
            mixtures[str(mid)] = {str(p): parse_number(w, f"mixtures.{mid}.{p}")
                                  for p, w in _mapping(parts, f"mixtures.{mid}").items()}
        try:
            return cls(contexts, tuple(targets), arities, mixtures, tuple(doc.get("identify", [])))
        except LookupFailure as e:
            raise InputError(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "kind": "counterfactual",
            "contexts": list(self.contexts),
            "targets": [{"preparation": t.preparation, "contexts": list(t.contexts), "marginal": list(t.marginal)}
                        for t in self.targets],
        }
        if self.arities:
            doc["arity"] = dict(self.arities)
        if self.mixtures:
            doc["mixtures"] = {k: dict(v) for k, v in self.mixtures.items()}
        if self.identified:
            doc["identify"] = list(self.identified)
        return doc


@dataclass
class FarkasCertificate:
    """Nonzero multipliers of the infeasible system, keyed by constraint label."""

    multipliers: Dict[str, Number]
    verified: bool


@dataclass
class FeasibilityResult:
    feasible: bool
    distributions: Dict[str, CounterfactualDistribution] = field(default_factory=dict)
    shared: Optional[CounterfactualDistribution] = None
    certificate: Optional[FarkasCertificate] = None
    exact: bool = False
    excluded: int = 0
    variables: int = 0

    @property
    def verdict(self) -> str:
        return "FEASIBLE" if self.feasible else "INFEASIBLE"


@dataclass
class _System:
    variables: List[Tuple[str, Outcome]]
    labels: List[str]
    rows: List[List[Number]]
    rhs: List[Number]
    outcomes: List[Outcome]
    excluded: int


def _project(inst: FeasibilityInstance, c: Outcome, ctxs: Sequence[str]) -> int:
    """Flat lexicographic index of c restricted to ctxs."""
    idx = 0
    for cid in ctxs:
        k = inst.contexts.index(cid)
        idx = idx * inst.arity(cid) + c[k]
    return idx


def _build_system(inst: FeasibilityInstance, cap: int, exclude: bool = True) -> _System:
    size = inst.space_size()
    if size > cap:
        raise InstanceTooLarge("counterfactual outcome space", size, cap)
    outcomes = list(itertools.product(*(range(inst.arity(c)) for c in inst.contexts)))
    preps = inst.preparations
    banned = {p: set() for p in preps}
    if exclude:
        for t in inst.targets:
            zeros = {k for k, v in enumerate(t.marginal) if v == 0}
            if zeros:
                for c in outcomes:
                    if _project(inst, c, t.contexts) in zeros:
                        banned[t.preparation].add(c)
    variables = [(p, c) for p in preps for c in outcomes if c not in banned[p]]
    col = {v: j for j, v in enumerate(variables)}
    n = len(variables)
    labels, rows, rhs = [], [], []

    def add(label: str, coeffs: Dict[int, Number], b: Number):
        if not coeffs and b == 0:
            return
        row = [Fraction(0)] * n
        for j, v in coeffs.items():
            row[j] = v
        labels.append(label)
        rows.append(row)
        rhs.append(b)

    for p in preps:
        add(f"normalize[{p}]", {col[(p, c)]: Fraction(1) for c in outcomes if (p, c) in col}, Fraction(1))
    for t in inst.targets:
        for k, value in enumerate(t.marginal):
            coeffs = {col[(t.preparation, c)]: Fraction(1) for c in outcomes
                      if (t.preparation, c) in col and _project(inst, c, t.contexts) == k}
            add(f"target[{t.preparation}|{','.join(t.contexts)}={k}]", coeffs, value)
    if len(inst.identified) >= 2:
        base = inst.mixture(inst.identified[0])
        for other_id in inst.identified[1:]:
            other = inst.mixture(other_id)
            for c in outcomes:
                coeffs: Dict[int, Number] = {}
                for p, w in base.items():
                    if (p, c) in col:
                        coeffs[col[(p, c)]] = coeffs.get(col[(p, c)], 0) + w
                for p, w in other.items():
                    if (p, c) in col:
                        coeffs[col[(p, c)]] = coeffs.get(col[(p, c)], 0) - w
                coeffs = {j: v for j, v in coeffs.items() if v != 0}
                add(f"identify[{inst.identified[0]}={other_id}@{','.join(map(str, c))}]", coeffs, Fraction(0))
    excluded = sum(len(b) for b in banned.values())
    logger.info("counterfactual system: %d variables, %d constraints, %d outcomes excluded by hard zeros",
                n, len(rows), excluded)
    return _System(variables, labels, rows, rhs, outcomes, excluded)


def feasibility_search(inst: FeasibilityInstance, tol: Optional[float] = None, cap: Optional[int] = None,
                       exact: Optional[bool] = None) -> FeasibilityResult:
    """
    Find per-preparation distributions matching every target marginal (and,
    when mixtures are identified, giving them one shared distribution), or
    return a Farkas certificate that none exists.
    """
    cap = config.OUTCOME_SPACE_CAP if cap is None else cap
    tol = config.EPS_CONTEXT if tol is None else tol
    sys_ = _build_system(inst, cap)
    res = solve_lp([0] * len(sys_.variables), A_eq=sys_.rows, b_eq=sys_.rhs, exact=exact, tol=tol)
    if not res.feasible:
        cert = None
        if res.farkas_eq is not None:
            ok = verify_farkas(sys_.rows, sys_.rhs, None, None, res.farkas_eq, None, tol=0.0 if res.exact else tol)
            cert = FarkasCertificate({lab: u for lab, u in zip(sys_.labels, res.farkas_eq) if u != 0}, ok)
        return FeasibilityResult(False, certificate=cert, exact=res.exact,
                                 excluded=sys_.excluded, variables=len(sys_.variables))
    arities = tuple(inst.arity(c) for c in inst.contexts)
    per_prep: Dict[str, Dict[Outcome, Number]] = {p: {} for p in inst.preparations}
    for (p, c), v in zip(sys_.variables, res.x):
        if v != 0:
            per_prep[p][c] = v
    dists = {p: CounterfactualDistribution(inst.contexts, arities, w) for p, w in per_prep.items()}
    shared = None
    if inst.identified:
        parts = inst.mixture(inst.identified[0])
        shared = mix_distributions([(dists[p], w) for p, w in parts.items()])
    return FeasibilityResult(True, dists, shared, None, res.exact, sys_.excluded, len(sys_.variables))


def target_residual(inst: FeasibilityInstance, dists: Mapping[str, CounterfactualDistribution]) -> float:
    """Largest deviation between re-marginalized distributions and the targets."""
    worst = 0.0
    for t in inst.targets:
        d = dists[t.preparation]
        idx = [inst.contexts.index(c) for c in t.contexts]
        joint = d.joint_marginal(idx)
        for k, value in enumerate(t.marginal):
            key = []
            rem = k
            for cid in reversed(t.contexts):
                key.append(rem % inst.arity(cid))
                rem //= inst.arity(cid)
            got = joint.get(tuple(reversed(key)), 0)
            worst = max(worst, abs(float(got) - float(value)))
    return worst


def outcome_weight_bounds(inst: FeasibilityInstance, preparation: str, outcome: Outcome,
                          cap: Optional[int] = None) -> Tuple[Number, Number]:
    """Min and max weight any feasible solution puts on one counterfactual outcome of a (mixed) preparation."""
    cap = config.OUTCOME_SPACE_CAP if cap is None else cap
    sys_ = _build_system(inst, cap)
    outcome = tuple(outcome)
    parts = inst.mixture(preparation)
    obj = [parts.get(p, 0) if c == outcome else 0 for p, c in sys_.variables]
    lo = solve_lp(obj, A_eq=sys_.rows, b_eq=sys_.rhs)
    hi = solve_lp(obj, A_eq=sys_.rows, b_eq=sys_.rhs, maximize=True)
    if lo.status != OPTIMAL or hi.status != OPTIMAL:
        raise ContractError("outcome weight bounds need a feasible instance")
    return lo.objective, hi.objective


def enumeration_oracle(inst: FeasibilityInstance, tol: Optional[float] = None, cap: Optional[int] = None) -> bool:
    """
    Independent feasibility check: enumerate every deterministic assignment,
    keep all of them (no support exclusion) and solve in floating point.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    cap = config.OUTCOME_SPACE_CAP if cap is None else cap
    sys_ = _build_system(inst, cap, exclude=False)
    A = np.array([[float(v) for v in row] for row in sys_.rows], dtype=float)
    b = np.array([float(v) for v in sys_.rhs], dtype=float)
    res = linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 0:
        return bool(np.max(np.abs(A @ res.x - b)) <= max(tol, 1e-7))
    return False


def composite_density_matrix(parts: Sequence[Tuple[QubitState, Number]]) -> np.ndarray:
    """Weighted mixture of pure qubit states; weights must sum to 1."""
    total = sum(w for _, w in parts)
    if abs(float(total) - 1.0) > config.EPS_SUM:
        raise ContractError(f"mixture weights sum to {float(total):.6g}, expected 1")
    return sum(float(w) * psi.density_matrix() for psi, w in parts)


# --- the six-state construction ---

_S3 = math.sqrt(3) / 2

COMPOSITES: Dict[str, Dict[str, Fraction]] = {
    "P12": {"P1": Fraction(1, 2), "P2": Fraction(1, 2)},
    "P34": {"P3": Fraction(1, 2), "P4": Fraction(1, 2)},
    "P56": {"P5": Fraction(1, 2), "P6": Fraction(1, 2)},
    "P135": {"P1": Fraction(1, 3), "P3": Fraction(1, 3), "P5": Fraction(1, 3)},
    "P246": {"P2": Fraction(1, 3), "P4": Fraction(1, 3), "P6": Fraction(1, 3)},
}


@dataclass(frozen=True, eq=False)
class SixStateFixture:
    states: Dict[str, QubitState]
    measurements: Dict[str, QubitMeasurement]
    composites: Dict[str, Dict[str, Fraction]]

    def density_matrix(self, composite: str) -> np.ndarray:
        parts = self.composites.get(composite) or {composite: Fraction(1)}
        return composite_density_matrix([(self.states[p], w) for p, w in parts.items()])

    def born_table(self) -> Dict[Tuple[str, str], Fraction]:
        """Exact outcome-0 probabilities, recovered from floating Born values."""
        out = {}
        for p, psi in self.states.items():
            for mid, meas in self.measurements.items():
                prob = born_probability(psi, meas)
                fr = rationalize_probability(prob)
                out[(p, mid)] = fr
        return out

    def instance(self, composites: Optional[Sequence[str]] = None) -> FeasibilityInstance:
        """All six atomic preparations with Born marginals, the chosen composites identified."""
        names = list(self.composites) if composites is None else list(composites)
        table = self.born_table()
        contexts = tuple(self.measurements)
        targets = tuple(MarginalTarget(p, (mid,), (table[(p, mid)], 1 - table[(p, mid)]))
                        for p in self.states for mid in contexts)
        return FeasibilityInstance(contexts, targets, {}, {n: self.composites[n] for n in names}, tuple(names))

    def product_distribution(self, preparation: str) -> CounterfactualDistribution:
        """Independent counterfactual entries with Born marginals (mixtures mixed linearly)."""
        table = self.born_table()
        contexts = tuple(self.measurements)
        parts = self.composites.get(preparation) or {preparation: Fraction(1)}
        if any(p not in self.states for p in parts):
            raise LookupFailure(f"unknown preparation '{preparation}'")
        return mix_distributions([
            (product_distribution(contexts, [(table[(p, m)], 1 - table[(p, m)]) for m in contexts]), w)
            for p, w in parts.items()])


def rationalize_probability(prob: float, max_denominator: int = 1000) -> Fraction:
    fr = Fraction(prob).limit_denominator(max_denominator)
    if abs(float(fr) - prob) > 1e-12:
        raise IncidentError(f"Born probability {prob!r} is not a small rational")
    return fr


def six_state_fixture() -> SixStateFixture:
    """Six qubit states, three measurements and five composites, all composites maximally mixed."""
    states = {
        "P1": QubitState(1.0, 0.0),
        "P2": QubitState(0.0, 1.0),
        "P3": QubitState(0.5, _S3),
        "P4": QubitState(_S3, -0.5),
        "P5": QubitState(0.5, -_S3),
        "P6": QubitState(_S3, 0.5),
    }
    measurements = {
        "M1": QubitMeasurement(QubitState(1.0, 0.0)),
        "M2": QubitMeasurement(QubitState(0.5, _S3)),
        "M3": QubitMeasurement(QubitState(0.5, -_S3)),
    }
    return SixStateFixture(states, measurements, {k: dict(v) for k, v in COMPOSITES.items()})


def six_state_ontological_model() -> OntologicalModel:
    """
    Ontic states are the eight counterfactual outcomes; responses read off the
    relevant entry. Each pure state gets the product distribution of its Born
    marginals and composites are convex mixtures, so the five composites are
    operationally equivalent yet have distinct epistemic states.
    """
    fx = six_state_fixture()
    contexts = tuple(fx.measurements)
    scenario = Scenario(contexts, tuple(Context(m, (m,), True) for m in contexts))
    lattice = list(itertools.product((0, 1), repeat=len(contexts)))
    responses = {}
    for k, mid in enumerate(contexts):
        for o in (0, 1):
            responses[(Event(mid, o), mid)] = [1.0 if c[k] == o else 0.0 for c in lattice]
    preps = {}
    for p in list(fx.states) + list(fx.composites):
        d = fx.product_distribution(p)
        preps[p] = [float(d.weights.get(c, 0)) for c in lattice]
    return OntologicalModel(scenario, len(lattice), preps, responses,
                            (EquivalenceClass(tuple(fx.composites), "maximally-mixed"),))
