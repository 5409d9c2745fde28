"""
Marble world: ontic states are unit vectors, and a measurement's outcome
is the projector closest to the current ontic state (largest squared
overlap, lowest index on ties)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import config
from .causal import BoxBehavior
from .errors import ContractError, InputError, LookupFailure, StructuralError
from .file_ops import parse_complex, parse_int, require
from .ontmodel import OntologicalModel
from .scenario import Context, Event, Scenario

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12


def _unit(vec: Any, what: str) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).ravel()
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-12:
        raise ContractError(f"{what} has norm {norm!r}, expected 1")
    return v


@dataclass(frozen=True, eq=False)
class MarbleState:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _unit(self.amplitudes, "marble state"))

    @classmethod
    def normalized(cls, vec: Sequence[complex]) -> "MarbleState":
        v = np.asarray(vec, dtype=complex)
        return cls(v / np.linalg.norm(v))

    @property
    def dimension(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class MarbleContext:
    """One orthonormal basis; row k is the direction of outcome k."""

    directions: np.ndarray
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=complex)
        if dirs.ndim != 2 or dirs.shape[0] != dirs.shape[1]:
            raise StructuralError("a marble context needs d directions of dimension d")
        gram = dirs.conj() @ dirs.T
        if np.max(np.abs(gram - np.eye(dirs.shape[0]))) > 1e-10:
            raise ContractError("context directions are not orthonormal")
        labels = tuple(self.labels) or tuple(f"m{k}" for k in range(dirs.shape[0]))
        if len(labels) != dirs.shape[0]:
            raise StructuralError("one label per direction required")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "labels", labels)

    @property
    def dimension(self) -> int:
        return self.directions.shape[0]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LookupFailure(f"context has no direction labelled '{label}'") from None

    def overlaps(self, states: np.ndarray) -> np.ndarray:
        """|<m_k|lam>|^2 for a batch of states (rows)."""
        return np.abs(np.atleast_2d(states) @ self.directions.conj().T) ** 2


def outcomes_of(states: np.ndarray, c: MarbleContext) -> np.ndarray:
    ov = c.overlaps(states)
    best = ov.max(axis=1, keepdims=True)
    return np.argmax(ov >= best - TIE_TOL, axis=1)


def marble_outcome(lam: MarbleState, c: MarbleContext) -> int:
    if lam.dimension != c.dimension:
        raise StructuralError("state and context dimensions differ")
    return int(outcomes_of(lam.amplitudes[None, :], c)[0])


def shared_indices(c1: MarbleContext, c2: MarbleContext, shared: str) -> Tuple[int, int]:
    """Index of the shared direction in each context (matched up to phase)."""
    k1 = c1.index(shared)
    ov = np.abs(c2.directions.conj() @ c1.directions[k1])
    k2 = int(np.argmax(ov))
    if abs(ov[k2] - 1.0) > 1e-10:
        raise ContractError(f"direction '{shared}' does not occur in both contexts")
    return k1, k2


# --- priors ---

def haar_states(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


class PointPrior:
    def __init__(self, state: MarbleState):
        self.state = state
        self.dimension = state.dimension

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.repeat(self.state.amplitudes[None, :], n, axis=0)


class HaarPrior:
    """Uniform on the unit sphere: normalized complex Gaussian vectors."""

    def __init__(self, dimension: int):
        self.dimension = dimension

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return haar_states(rng, n, self.dimension)


class CapPrior:
    """Haar measure restricted to states with |<center|lam>|^2 >= min_overlap."""

    def __init__(self, center: MarbleState, min_overlap: float):
        if not 0.0 <= min_overlap < 1.0:
            raise ContractError("min_overlap must lie in [0, 1)")
        self.center = center
        self.min_overlap = min_overlap
        self.dimension = center.dimension

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # acceptance rate of the cap under Haar is (1 - t)^(d - 1)
        rate = (1.0 - self.min_overlap) ** (self.dimension - 1)
        out: List[np.ndarray] = []
        have = 0
        while have < n:
            batch = haar_states(rng, max(16, int((n - have) / rate * 1.2) + 1), self.dimension)
            keep = batch[np.abs(batch @ self.center.amplitudes.conj()) ** 2 >= self.min_overlap]
            out.append(keep)
            have += keep.shape[0]
        return np.vstack(out)[:n]


class DiscretePrior:
    """Finitely many ontic states with weights; exportable as an ontological model."""

    def __init__(self, states: Sequence[MarbleState], weights: Optional[Sequence[float]] = None):
        if not states:
            raise ContractError("discrete prior needs at least one state")
        self.states = np.vstack([s.amplitudes for s in states])
        w = np.full(len(states), 1.0 / len(states)) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (len(states),) or np.any(w < 0) or abs(float(w.sum()) - 1.0) > config.EPS_SUM:
            raise ContractError("discrete prior weights must be a probability vector over the states")
        self.weights = w
        self.dimension = self.states.shape[1]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.states[rng.choice(len(self.weights), size=n, p=self.weights)]

    @classmethod
    def from_prior(cls, prior, n: int, seed: int) -> "DiscretePrior":
        """Discretize any prior into n equally weighted samples."""
        rng = np.random.default_rng(seed)
        return cls([MarbleState(v) for v in prior.sample(rng, n)])


# --- Monte Carlo ---

def _batches(n: int, seed: int, batch_size: Optional[int]) -> List[Tuple[int, np.random.SeedSequence]]:
    size = batch_size or config.MARBLE_BATCH_SIZE
    count = max(1, math.ceil(n / size))
    seeds = np.random.SeedSequence(seed).spawn(count)
    return [(min(size, n - k * size), seeds[k]) for k in range(count)]


def _run_batches(fn, n: int, seed: int, jobs: int, batch_size: Optional[int]) -> list:
    batches = _batches(n, seed, batch_size)
    if jobs <= 1 or len(batches) == 1:
        return [fn(size, ss) for size, ss in batches]
    with ThreadPoolExecutor(max_workers=min(jobs, len(batches))) as executor:
        return list(executor.map(lambda b: fn(*b), batches))


@dataclass
class SampleStatistics:
    counts: np.ndarray
    n: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.n

    @property
    def stderr(self) -> np.ndarray:
        f = self.frequencies
        return np.sqrt(f * (1.0 - f) / self.n)

    def to_dict(self, labels: Sequence[str] = ()) -> Dict[str, Any]:
        labels = list(labels) or [str(k) for k in range(self.counts.size)]
        return {"n": self.n,
                "frequencies": dict(zip(labels, self.frequencies.tolist())),
                "stderr": dict(zip(labels, self.stderr.tolist()))}


def sample_statistics(prior, c: MarbleContext, n: int, seed: Optional[int] = None, jobs: int = 1,
                      batch_size: Optional[int] = None) -> SampleStatistics:
    """Outcome frequencies over n prior samples; batch seeds do not depend on jobs."""
    if n < 1:
        raise ContractError("sample count must be at least 1")
    seed = config.DEFAULT_SEED if seed is None else seed

    def run(size: int, ss: np.random.SeedSequence) -> np.ndarray:
        states = prior.sample(np.random.default_rng(ss), size)
        return np.bincount(outcomes_of(states, c), minlength=c.dimension)

    counts = sum(_run_batches(run, n, seed, jobs, batch_size))
    return SampleStatistics(np.asarray(counts), n)


@dataclass
class GleasonViolation:
    gap: float
    stderr: float
    ci: Tuple[float, float]
    p_first: float
    p_second: float
    n: int

    @property
    def violated(self) -> bool:
        return self.ci[0] > 0.0 or self.ci[1] < 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"gap": self.gap, "stderr": self.stderr, "ci99": list(self.ci), "p_first": self.p_first,
                "p_second": self.p_second, "n": self.n, "violated": self.violated}


def gleason_violation_test(prior, c1: MarbleContext, c2: MarbleContext, shared: str, n: int,
                           seed: Optional[int] = None, jobs: int = 1,
                           batch_size: Optional[int] = None) -> GleasonViolation:
    """
    P(shared | c1) - P(shared | c2) estimated on paired samples, with a
    99% normal confidence interval.
    """
    if n < 1:
        raise ContractError("sample count must be at least 1")
    seed = config.DEFAULT_SEED if seed is None else seed
    k1, k2 = shared_indices(c1, c2, shared)

    def run(size: int, ss: np.random.SeedSequence) -> np.ndarray:
        states = prior.sample(np.random.default_rng(ss), size)
        a = (outcomes_of(states, c1) == k1).astype(float)
        b = (outcomes_of(states, c2) == k2).astype(float)
        d = a - b
        return np.array([a.sum(), b.sum(), d.sum(), (d * d).sum()])

    s1, s2, sd, sdd = sum(_run_batches(run, n, seed, jobs, batch_size))
    gap = sd / n
    var = (sdd - n * gap * gap) / (n - 1) if n > 1 else 0.0
    se = math.sqrt(max(var, 0.0) / n)
    half = config.CONFIDENCE_Z * se
    return GleasonViolation(float(gap), se, (float(gap - half), float(gap + half)), float(s1 / n), float(s2 / n), n)


# --- witnesses ---

def _ks_margin(states: np.ndarray, c1: MarbleContext, c2: MarbleContext, k1: int, k2: int) -> np.ndarray:
    """Positive iff the shared outcome wins in c1 and loses in c2."""
    o1, o2 = c1.overlaps(states), c2.overlaps(states)
    r1 = np.delete(o1, k1, axis=1).max(axis=1)
    r2 = np.delete(o2, k2, axis=1).max(axis=1)
    return np.minimum(o1[:, k1] - r1, r2 - o2[:, k2])


def find_ks_witness(c1: MarbleContext, c2: MarbleContext, shared: str, budget: Optional[int] = None,
                    seed: Optional[int] = None) -> Optional[MarbleState]:
    """
    An ontic state for which the shared direction is the outcome in c1 but
    not in c2. Random restarts first, then hill-climbing from the best
    candidates; None once the budget is spent.
    """
    budget = config.KS_SEARCH_BUDGET if budget is None else budget
    seed = config.DEFAULT_SEED if seed is None else seed
    k1, k2 = shared_indices(c1, c2, shared)
    rng = np.random.default_rng(seed)
    d = c1.dimension
    starts = haar_states(rng, max(1, budget // 2), d)
    margin = _ks_margin(starts, c1, c2, k1, k2)
    best = int(np.argmax(margin))
    if margin[best] > TIE_TOL:
        return MarbleState(starts[best])
    order = np.argsort(-margin)[:5]
    steps = max(1, (budget - starts.shape[0]) // max(1, len(order)))
    for idx in order:
        lam, score, step = starts[idx], margin[idx], 0.5
        for _ in range(steps):
            cand = lam + step * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
            cand = cand / np.linalg.norm(cand)
            s = _ks_margin(cand[None, :], c1, c2, k1, k2)[0]
            if s > score:
                lam, score = cand, s
                if score > TIE_TOL:
                    return MarbleState(lam)
            else:
                step = max(step * 0.95, 1e-3)
    logger.info("no KS witness found within a budget of %d", budget)
    return None


# --- export ---

def export_ontological_model(prior: DiscretePrior, contexts: Mapping[str, MarbleContext],
                             preparation: str = "prior") -> OntologicalModel:
    """
    Deterministic responses over the prior's support states. Directions
    carrying one label must coincide (up to phase) across contexts.
    """
    seen: Dict[str, np.ndarray] = {}
    for cid, c in contexts.items():
        if c.dimension != prior.dimension:
            raise StructuralError(f"context '{cid}' has dimension {c.dimension}, prior {prior.dimension}")
        for label, v in zip(c.labels, c.directions):
            if label in seen and abs(abs(np.vdot(seen[label], v)) - 1.0) > 1e-10:
                raise StructuralError(f"label '{label}' names different directions in different contexts")
            seen.setdefault(label, v)
    scenario = Scenario(tuple(seen), tuple(Context(cid, c.labels, True) for cid, c in contexts.items()))
    responses = {}
    for cid, c in contexts.items():
        out = outcomes_of(prior.states, c)
        for k, label in enumerate(c.labels):
            responses[(Event(label, 0), cid)] = (out == k).astype(float)
    return OntologicalModel(scenario, prior.states.shape[0], {preparation: prior.weights}, responses)


def marble_box(c1: MarbleContext, c2: MarbleContext, shared: str, prior: DiscretePrior,
               p_input: Optional[Sequence[float]] = None) -> BoxBehavior:
    """
    Input 0 measures c1, input 1 measures c2; output 0 iff the shared
    direction is the outcome. The ontic variable is the discretized state.
    """
    k1, k2 = shared_indices(c1, c2, shared)
    o1 = outcomes_of(prior.states, c1) != k1
    o2 = outcomes_of(prior.states, c2) != k2
    table = np.vstack([o1, o2]).astype(int)
    return BoxBehavior.from_function(table, 2, p_input, prior.weights)


# --- fixtures and configuration ---

def asymmetric_pair(angle_degrees: float = 30.0) -> Tuple[MarbleContext, MarbleContext]:
    """{A, B, C} as the standard basis and {C, D, E} with D, E rotated in the A-B plane."""
    t = math.radians(angle_degrees)
    k1 = MarbleContext(np.eye(3), ("A", "B", "C"))
    k2 = MarbleContext(np.array([[0, 0, 1], [math.cos(t), math.sin(t), 0], [-math.sin(t), math.cos(t), 0]]),
                       ("C", "D", "E"))
    return k1, k2


def asymmetric_cap_prior() -> CapPrior:
    return CapPrior(MarbleState(np.array([0.8, 0.0, 0.6])), 0.8)


@dataclass
class MarbleSetup:
    dimension: int
    contexts: Dict[str, MarbleContext]
    prior: Any
    shared: Optional[str]
    pair: Tuple[str, ...]
    n: int
    seed: Optional[int]


def _parse_state(raw: Any, where: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise InputError("expected a list of amplitudes", field_path=where)
    return np.array([parse_complex(v, f"{where}[{i}]") for i, v in enumerate(raw)])


def _parse_prior(raw: Dict[str, Any], d: int):
    kind = raw.get("type", "haar")
    if kind == "haar":
        return HaarPrior(d)
    if kind == "point":
        return PointPrior(MarbleState.normalized(_parse_state(require(raw, "state", "prior"), "prior.state")))
    if kind == "cap":
        center = MarbleState.normalized(_parse_state(require(raw, "center", "prior"), "prior.center"))
        return CapPrior(center, float(require(raw, "min_overlap", "prior")))
    if kind == "custom":
        states = [MarbleState.normalized(_parse_state(s, f"prior.states[{i}]"))
                  for i, s in enumerate(require(raw, "states", "prior", list))]
        return DiscretePrior(states, raw.get("weights"))
    raise InputError(f"unknown prior type {kind!r}", field_path="prior.type")


def load_marble_setup(doc: Dict[str, Any]) -> MarbleSetup:
    d = require(doc, "dimension", kind=int)
    contexts = {}
    for cid, raw in require(doc, "contexts", kind=dict).items():
        where = f"contexts.{cid}"
        dirs = [_parse_state(v, f"{where}.directions[{i}]")
                for i, v in enumerate(require(raw, "directions", where, list))]
        try:
            contexts[cid] = MarbleContext(np.array(dirs), tuple(raw.get("labels", ())))
        except (ContractError, StructuralError) as e:
            raise InputError(str(e), field_path=where) from e
        if contexts[cid].dimension != d:
            raise InputError(f"context dimension {contexts[cid].dimension} != {d}", field_path=where)
    prior = _parse_prior(doc.get("prior") or {}, d)
    pair = tuple(doc.get("compare", ()))
    for cid in pair:
        if cid not in contexts:
            raise InputError(f"unknown context '{cid}'", field_path="compare")
    return MarbleSetup(d, contexts, prior, doc.get("shared"), pair,
                       parse_int(doc.get("n", 10000), "n", minimum=1),
                       None if doc.get("seed") is None else parse_int(doc["seed"], "seed", minimum=0))
