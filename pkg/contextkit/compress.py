"""
Compression of a Gleason-respecting ontological model into a non-contextual
quasi-ontological model

Every epistemic state is orthogonal to the difference of the two response
vectors of a shared measurement, so all of them live in the common null
space S' of those differences. Projecting responses onto S' merges each
measurement's per-context responses into one. Expanding in an orthonormal
basis g_i of S' with entry sums s_i gives

    mu_n(i) = (mu . g_i) * s_i        xi_n(i) = (proj(xi) . g_i) / s_i

which keeps states normalized, responses complete and predictions exact,
at the price of (in general) negative entries.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import config
from .errors import ContractError, DegenerateBasisError, IncidentError
from .ontmodel import OntologicalModel, check_gleason_property, validate_model
from .scenario import Event, Scenario, all_events, shared_measurements

logger = logging.getLogger(__name__)


@dataclass
class SubspaceBasis:
    ambient_dim: int
    vectors: np.ndarray  # shape (n, ambient_dim), Euclidean-orthonormal rows
    entry_sums: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[0])

    def projector(self) -> np.ndarray:
        return self.vectors.T @ self.vectors

    def is_orthonormal(self, tol: float = 1e-10) -> bool:
        gram = self.vectors @ self.vectors.T
        return bool(np.max(np.abs(gram - np.eye(self.dim)), initial=0.0) <= tol)


@dataclass
class DifferenceVector:
    measurement: str
    outcome: int
    contexts: Tuple[str, str]
    vector: np.ndarray


def _null_projector(rows: List[np.ndarray], x: int) -> np.ndarray:
    if not rows:
        return np.eye(x)
    D = np.vstack(rows)
    _, sv, vt = np.linalg.svd(D, full_matrices=False)
    rank = int(np.sum(sv > config.RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    V = vt[:rank]
    return np.eye(x) - V.T @ V


def _gram_schmidt(P: np.ndarray, target: int) -> np.ndarray:
    """Modified Gram-Schmidt over the columns P e_j; the standard basis when P = I."""
    x = P.shape[0]
    basis: List[np.ndarray] = []
    for j in range(x):
        v = P[:, j].copy()
        for _ in range(2):
            for b in basis:
                v = v - (b @ v) * b
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == target:
            break
    return np.array(basis).reshape(len(basis), x)


def _fix_entry_sums(G: np.ndarray, delta: float) -> np.ndarray:
    """Rotate pairs of basis vectors until every entry sum clears delta."""
    G = G.copy()
    for i in range(G.shape[0]):
        s = G.sum(axis=1)
        if abs(s[i]) > delta:
            continue
        partner = next((j for j in range(G.shape[0]) if j != i and abs(s[j]) > delta), None)
        if partner is None:
            raise DegenerateBasisError("the all-ones vector is orthogonal to the surviving subspace; "
                                       "no probability vector lives there")
        gi, gj = G[i].copy(), G[partner].copy()
        G[partner] = (gj + gi) / np.sqrt(2.0)
        G[i] = (gi - gj) / np.sqrt(2.0)
        logger.warning("basis vector %d had entry sum %.3g; rotated with vector %d", i, s[i], partner)
    s = G.sum(axis=1)
    if np.any(np.abs(s) <= delta):
        raise DegenerateBasisError("basis rotation could not clear a zero entry sum")
    return G


def gleason_subspace(m: OntologicalModel, tol: Optional[float] = None) -> Tuple[SubspaceBasis, List[DifferenceVector]]:
    """
    Intersect the ontic space with the null space of every response
    difference of a shared measurement, sweeping measurements and context
    pairs in declaration order until nothing new is eliminated.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    bad = validate_model(m)
    if bad:
        raise ContractError(f"invalid ontological model: {bad[0].message}")
    gaps = check_gleason_property(m, tol)
    if gaps:
        g = gaps[0]
        raise ContractError(f"Gleason property fails for preparation '{g.preparation}', event "
                            f"'{g.measurement}={g.outcome}', contexts {g.contexts[0]}/{g.contexts[1]} "
                            f"(gap {g.gap:.3g})")
    x = m.num_ontic_states
    rows: List[np.ndarray] = []
    eliminated: List[DifferenceVector] = []
    P = np.eye(x)
    shared = shared_measurements(m.scenario)
    changed = True
    while changed:
        changed = False
        for meas, cids in shared.items():
            for k in range(m.scenario.arity_of(meas)):
                e = Event(meas, k)
                stored = [c for c in cids if (e, c) in m.responses]
                for a in range(len(stored)):
                    for b in range(a + 1, len(stored)):
                        diff = m.responses[(e, stored[a])] - m.responses[(e, stored[b])]
                        if np.max(np.abs(P @ diff)) > tol:
                            rows.append(diff)
                            eliminated.append(DifferenceVector(meas, k, (stored[a], stored[b]), diff))
                            P = _null_projector(rows, x)
                            changed = True
    n = int(round(np.trace(P)))
    G = _fix_entry_sums(_gram_schmidt(P, n), config.DELTA_PIVOT)
    logger.info("Gleason subspace: dimension %d of %d after %d eliminations", G.shape[0], x, len(eliminated))
    return SubspaceBasis(x, G, G.sum(axis=1)), eliminated


def project_responses(m: OntologicalModel, basis: SubspaceBasis,
                      tol: Optional[float] = None) -> Dict[Event, np.ndarray]:
    """One projected response per event; per-context projections must coincide."""
    tol = config.PROJECTION_TOL if tol is None else tol
    P = basis.projector()
    out: Dict[Event, np.ndarray] = {}
    origin: Dict[Event, str] = {}
    for (e, cid), xi in m.responses.items():
        proj = P @ xi
        if e in out:
            gap = float(np.max(np.abs(proj - out[e])))
            if gap > tol:
                raise IncidentError(f"projections of {e.label()} from contexts '{origin[e]}' and '{cid}' "
                                    f"differ by {gap:.3g}")
        else:
            out[e] = proj
            origin[e] = cid
    return out


@dataclass
class NegativeEntry:
    vector: str
    index: int
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {"vector": self.vector, "index": self.index, "value": self.value}


@dataclass
class QuasiModel:
    scenario: Scenario
    num_quasi_states: int
    states: Dict[str, np.ndarray]
    responses: Dict[Event, np.ndarray]
    basis: SubspaceBasis
    negativity: List[NegativeEntry] = field(default_factory=list)

    def predict(self, p: str, e: Event) -> float:
        return float(self.states[p] @ self.responses[e])

    def vectors(self) -> List[Tuple[str, np.ndarray]]:
        out = [(f"mu:{p}", v) for p, v in self.states.items()]
        out += [(f"xi:{e.label()}", v) for e, v in self.responses.items()]
        return out

    def to_dict(self) -> Dict[str, Any]:
        responses = []
        for ctx in self.scenario.contexts:
            for mid in ctx.members:
                for e, xi in self.responses.items():
                    if e.measurement == mid:
                        responses.append({"measurement": mid, "context": ctx.id, "outcome": e.outcome,
                                          "xi": xi.tolist()})
        return {
            "kind": "quasi-model",
            "scenario": self.scenario.to_dict(),
            "num_ontic_states": self.num_quasi_states,
            "preparations": {p: v.tolist() for p, v in self.states.items()},
            "responses": responses,
            "negativity": [n.to_dict() for n in self.negativity],
            "basis": self.basis.vectors.tolist(),
        }


def detect_negativity(q: QuasiModel, tol: Optional[float] = None) -> List[NegativeEntry]:
    tol = config.EPS_CONTEXT if tol is None else tol
    out = []
    for name, vec in q.vectors():
        for i in np.flatnonzero(vec < -tol):
            out.append(NegativeEntry(name, int(i), float(vec[i])))
    return out


def build_quasi_model(m: OntologicalModel, tol: Optional[float] = None) -> QuasiModel:
    basis, _ = gleason_subspace(m, tol)
    projected = project_responses(m, basis)
    G, s = basis.vectors, basis.entry_sums
    states = {p: (G @ mu) * s for p, mu in m.preparations.items()}
    responses = {e: (G @ proj) / s for e, proj in projected.items()}
    # events of the scenario with no stored response stay absent
    ordered = {e: responses[e] for e in all_events(m.scenario) if e in responses}
    q = QuasiModel(m.scenario, basis.dim, states, ordered, basis)
    q.negativity = detect_negativity(q, tol)
    logger.info("quasi model: %d quasi states, %d negative entries", q.num_quasi_states, len(q.negativity))
    return q


def quasi_normalization_gaps(q: QuasiModel) -> Tuple[float, float]:
    """Worst deviation of (state sums from 1, context response sums from all-ones)."""
    state_gap = max((abs(float(v.sum()) - 1.0) for v in q.states.values()), default=0.0)
    resp_gap = 0.0
    for ctx in q.scenario.contexts:
        events = [e for e in q.scenario.context_outcomes(ctx.id) if e in q.responses]
        if not events:
            continue
        total = sum(q.responses[e] for e in events)
        resp_gap = max(resp_gap, float(np.max(np.abs(total - 1.0))))
    return state_gap, resp_gap
