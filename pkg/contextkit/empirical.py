"""
Empirical models: per-context outcome tables, no-disturbance, and the
probabilistic / possibilistic / strong contextuality hierarchy
"""

import enum
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .errors import ContractError, IncidentError, InputError, InstanceTooLarge, InternalError, LookupFailure, StructuralError, Violation
from .file_ops import join_path, parse_number, require
from .lp import solve_lp, verify_farkas
from .ontmodel import OntologicalModel, predict
from .scenario import Event, Scenario

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]
Assignment = Tuple[int, ...]


def _tuple_key(key: str, path: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in key.split(","))
    except ValueError as e:
        raise InputError(f"bad outcome tuple {key!r}", field_path=path) from e


@dataclass(frozen=True, eq=False)
class EmpiricalModel:
    """
    One joint distribution per context. Outcome tuples list the outcomes of
    the context's members in declared member order.
    """

    scenario: Scenario
    tables: Mapping[str, Mapping[Tuple[int, ...], Number]]

    def __post_init__(self):
        clean = {}
        for cid, table in self.tables.items():
            ctx = self.scenario.context(cid)
            arities = [self.scenario.arity_of(m) for m in ctx.members]
            row = {}
            for t, v in table.items():
                t = tuple(int(x) for x in t)
                if len(t) != len(arities) or any(not 0 <= x < a for x, a in zip(t, arities)):
                    raise StructuralError(f"outcome tuple {t} does not fit context '{cid}'")
                row[t] = v
            clean[cid] = row
        object.__setattr__(self, "tables", clean)

    def prob(self, cid: str, t: Tuple[int, ...]) -> Number:
        if cid not in self.tables:
            raise LookupFailure(f"no table for context '{cid}'")
        return self.tables[cid].get(tuple(t), 0)

    def support(self, cid: str, tol: Optional[float] = None) -> List[Tuple[int, ...]]:
        tol = config.EPS_CONTEXT if tol is None else tol
        return [t for t in self.scenario.outcome_tuples(cid) if self.prob(cid, t) > tol]

    def marginal(self, cid: str, members: Sequence[str]) -> Dict[Tuple[int, ...], Number]:
        ctx = self.scenario.context(cid)
        idx = [ctx.members.index(m) for m in members]
        out: Dict[Tuple[int, ...], Number] = {}
        for t, v in self.tables.get(cid, {}).items():
            key = tuple(t[i] for i in idx)
            out[key] = out.get(key, 0) + v
        return out

    def is_rational(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for table in self.tables.values() for v in table.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "empirical",
            "scenario": self.scenario.to_dict(),
            "tables": [{"context": cid,
                        "distribution": {",".join(map(str, t)): v for t, v in sorted(table.items())}}
                       for cid, table in self.tables.items()],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "EmpiricalModel":
        scen_doc = doc.get("scenario", doc)
        scenario = Scenario.from_dict(scen_doc, "scenario" if "scenario" in doc else "")
        tables = {}
        for i, raw in enumerate(require(doc, "tables", kind=list)):
            where = f"tables[{i}]"
            cid = str(require(raw, "context", where))
            dist = require(raw, "distribution", where, dict)
            tables[cid] = {_tuple_key(k, join_path(where, f"distribution.{k}")):
                           parse_number(v, join_path(where, f"distribution.{k}")) for k, v in dist.items()}
        try:
            return cls(scenario, tables)
        except LookupFailure as e:
            raise InputError(str(e)) from e


def validate_tables(em: EmpiricalModel, tol: Optional[float] = None) -> List[Violation]:
    """Coverage, nonnegativity and normalization of every table."""
    tol = config.EPS_SUM if tol is None else tol
    out = []
    for cid in em.scenario.context_ids:
        if cid not in em.tables:
            out.append(Violation("missing-table", f"no table for context '{cid}'", {"context": cid}))
            continue
        table = em.tables[cid]
        for t, v in table.items():
            if v < 0:
                out.append(Violation("negative-probability", f"P({t}|{cid}) = {float(v):.6g}",
                                     {"context": cid, "outcome": list(t)}))
        total = sum(table.values(), Fraction(0))
        if abs(total - 1) > tol:
            out.append(Violation("normalization", f"table '{cid}' sums to {float(total):.12g}",
                                 {"context": cid, "sum": float(total)}))
    return out


def validate_no_disturbance(em: EmpiricalModel, tol: Optional[float] = None) -> List[Violation]:
    """One violation per context pair whose marginals on the shared measurements disagree."""
    tol = config.EPS_CONTEXT if tol is None else tol
    out = []
    ctxs = [c for c in em.scenario.contexts if c.id in em.tables]
    for a, b in itertools.combinations(ctxs, 2):
        shared = [m for m in em.scenario.measurements if m in a.members and m in b.members]
        if not shared:
            continue
        ma, mb = em.marginal(a.id, shared), em.marginal(b.id, shared)
        gap = max((abs(float(ma.get(k, 0)) - float(mb.get(k, 0))) for k in set(ma) | set(mb)), default=0.0)
        if gap > tol:
            out.append(Violation("disturbance",
                                 f"contexts '{a.id}' and '{b.id}' disagree on {', '.join(shared)} by {gap:.6g}",
                                 {"contexts": [a.id, b.id], "shared": shared, "gap": gap}))
    return out


# --- global assignments ---

def enumerate_assignments(s: Scenario, cap: Optional[int] = None) -> List[Assignment]:
    """Every total outcome assignment, lexicographic in measurement declaration order."""
    cap = config.ASSIGNMENT_CAP if cap is None else cap
    size = math.prod(s.arity_of(m) for m in s.measurements)
    if size > cap:
        raise InstanceTooLarge("global assignment space", size, cap)
    return list(itertools.product(*(range(s.arity_of(m)) for m in s.measurements)))


def restrict(s: Scenario, g: Assignment, cid: str) -> Tuple[int, ...]:
    pos = {m: i for i, m in enumerate(s.measurements)}
    return tuple(g[pos[m]] for m in s.context(cid).members)


def section_marginals(s: Scenario, weights: Mapping[Assignment, Number]) -> Dict[str, Dict[Tuple[int, ...], Number]]:
    """Marginals of a (possibly signed) global section on every context."""
    out: Dict[str, Dict[Tuple[int, ...], Number]] = {}
    for cid in s.context_ids:
        table: Dict[Tuple[int, ...], Number] = {}
        for g, w in weights.items():
            t = restrict(s, g, cid)
            table[t] = table.get(t, 0) + w
        out[cid] = table
    return out


def section_residual(em: EmpiricalModel, weights: Mapping[Assignment, Number]) -> float:
    marg = section_marginals(em.scenario, weights)
    worst = 0.0
    for cid in em.scenario.context_ids:
        for t in em.scenario.outcome_tuples(cid):
            worst = max(worst, abs(float(marg[cid].get(t, 0)) - float(em.prob(cid, t))))
    return worst


@dataclass
class _SectionSystem:
    assignments: List[Assignment]
    labels: List[str]
    rows: List[List[Number]]
    rhs: List[Number]


def _section_system(em: EmpiricalModel, cap: Optional[int]) -> _SectionSystem:
    s = em.scenario
    assignments = enumerate_assignments(s, cap)
    labels, rows, rhs = ["normalize"], [[1] * len(assignments)], [Fraction(1)]
    for cid in s.context_ids:
        restricted = [restrict(s, g, cid) for g in assignments]
        for t in s.outcome_tuples(cid):
            labels.append(f"{cid}:{','.join(map(str, t))}")
            rows.append([1 if r == t else 0 for r in restricted])
            rhs.append(em.prob(cid, t))
    return _SectionSystem(assignments, labels, rows, rhs)


@dataclass
class GlobalSectionResult:
    feasible: bool
    weights: Dict[Assignment, Number] = field(default_factory=dict)
    certificate: Optional[Dict[str, Number]] = None
    verified: bool = False
    exact: bool = False


def global_section_probabilistic(em: EmpiricalModel, tol: Optional[float] = None, cap: Optional[int] = None,
                                 exact: Optional[bool] = None) -> GlobalSectionResult:
    """
    A nonnegative distribution over global assignments reproducing every
    table, or a Farkas certificate keyed by "context:tuple" labels.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    sys_ = _section_system(em, cap)
    res = solve_lp([0] * len(sys_.assignments), A_eq=sys_.rows, b_eq=sys_.rhs, exact=exact, tol=tol)
    if res.feasible:
        weights = {g: v for g, v in zip(sys_.assignments, res.x) if v != 0}
        logger.info("global section found with %d atoms", len(weights))
        return GlobalSectionResult(True, weights, exact=res.exact, verified=True)
    cert, ok = None, False
    if res.farkas_eq is not None:
        cert = {lab: u for lab, u in zip(sys_.labels, res.farkas_eq) if u != 0}
        ok = verify_farkas(sys_.rows, sys_.rhs, None, None, res.farkas_eq, None, tol=0.0 if res.exact else tol)
    if not ok:
        logger.warning("no verified infeasibility certificate for the global section LP")
    return GlobalSectionResult(False, certificate=cert, verified=ok, exact=res.exact)


def _search_partition(s: Scenario, supports: Mapping[str, set], first_value: Optional[int]) -> List[Assignment]:
    """Backtracking over measurements in declaration order, pruning on completed contexts."""
    meas = list(s.measurements)
    pos = {m: i for i, m in enumerate(meas)}
    # contexts complete once their last member (in declaration order) is assigned
    closes: Dict[int, List[str]] = {}
    for ctx in s.contexts:
        if ctx.id in supports:
            last = max(pos[m] for m in ctx.members)
            closes.setdefault(last, []).append(ctx.id)
    idx = {cid: [pos[m] for m in s.context(cid).members] for cid in supports}
    out: List[Assignment] = []
    current: List[int] = []

    def extend(i: int):
        if i == len(meas):
            out.append(tuple(current))
            return
        values = [first_value] if i == 0 and first_value is not None else range(s.arity_of(meas[i]))
        for v in values:
            current.append(v)
            if all(tuple(current[k] for k in idx[cid]) in supports[cid] for cid in closes.get(i, ())):
                extend(i + 1)
            current.pop()

    extend(0)
    return out


def consistent_assignments(em: EmpiricalModel, tol: Optional[float] = None, cap: Optional[int] = None,
                           jobs: int = 1) -> List[Assignment]:
    """
    Global assignments whose restriction to every context lies in that
    context's support. The search is split by the first measurement's value;
    partitions are merged in order so the result does not depend on jobs.
    """
    s = em.scenario
    cap = config.ASSIGNMENT_CAP if cap is None else cap
    size = math.prod(s.arity_of(m) for m in s.measurements)
    if size > cap:
        raise InstanceTooLarge("global assignment space", size, cap)
    supports = {cid: set(em.support(cid, tol)) for cid in s.context_ids}
    if not s.measurements:
        return []
    parts = list(range(s.arity_of(s.measurements[0])))
    if jobs <= 1:
        chunks = [_search_partition(s, supports, v) for v in parts]
    else:
        with ThreadPoolExecutor(max_workers=min(jobs, len(parts))) as executor:
            chunks = list(executor.map(lambda v: _search_partition(s, supports, v), parts))
    out = [g for chunk in chunks for g in chunk]
    logger.debug("%d of %d assignments consistent with the supports", len(out), size)
    return out


@dataclass
class PossibilisticVerdict:
    contextual: bool
    witness: Optional[Tuple[str, Tuple[int, ...]]] = None  # supported outcome no consistent assignment reaches
    consistent: List[Assignment] = field(default_factory=list)


def classify_possibilistic(em: EmpiricalModel, tol: Optional[float] = None, cap: Optional[int] = None,
                           jobs: int = 1, assignments: Optional[List[Assignment]] = None) -> PossibilisticVerdict:
    """
    The union of all support-consistent assignments is the largest candidate
    set; the model is possibilistically contextual iff it misses some
    supported outcome. Pass `assignments` to reuse an earlier search.
    """
    s = em.scenario
    good = consistent_assignments(em, tol, cap, jobs) if assignments is None else assignments
    for cid in s.context_ids:
        reached = {restrict(s, g, cid) for g in good}
        for t in em.support(cid, tol):
            if t not in reached:
                return PossibilisticVerdict(True, (cid, t), good)
    return PossibilisticVerdict(False, None, good)


@dataclass
class StrongVerdict:
    strong: bool
    witness: Optional[Assignment] = None  # a consistent assignment when not strong


def classify_strong(em: EmpiricalModel, tol: Optional[float] = None, cap: Optional[int] = None,
                    jobs: int = 1, assignments: Optional[List[Assignment]] = None) -> StrongVerdict:
    good = consistent_assignments(em, tol, cap, jobs) if assignments is None else assignments
    if good:
        return StrongVerdict(False, good[0])
    return StrongVerdict(True)


@dataclass
class SignedSection:
    weights: Dict[Assignment, float]
    residual: float
    negative: List[Tuple[Assignment, float]]

    @property
    def min_weight(self) -> float:
        return min(self.weights.values()) if self.weights else 0.0


def signed_global_section(em: EmpiricalModel, tol: Optional[float] = None, cap: Optional[int] = None) -> SignedSection:
    """
    Minimum-norm signed weights over global assignments reproducing every table.
    A residual above threshold on a no-disturbance model is an incident.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    bad = validate_no_disturbance(em, tol)
    if bad:
        raise ContractError(f"model violates no-disturbance: {bad[0].message}")
    sys_ = _section_system(em, cap)
    A = np.array([[float(v) for v in row] for row in sys_.rows], dtype=float)
    b = np.array([float(v) for v in sys_.rhs], dtype=float)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ x - b))) if len(b) else 0.0
    if residual > config.SIGNED_RESIDUAL_TOL:
        raise IncidentError(f"signed global section residual {residual:.3g} on a no-disturbance model")
    weights = {g: float(v) for g, v in zip(sys_.assignments, x)}
    negative = [(g, v) for g, v in weights.items() if v < -tol]
    return SignedSection(weights, residual, negative)


class Level(str, enum.Enum):
    NONCONTEXTUAL = "noncontextual"
    PROBABILISTIC = "probabilistic"
    POSSIBILISTIC = "possibilistic"
    STRONG = "strong"


@dataclass
class HierarchyVerdict:
    level: Level
    probabilistic: GlobalSectionResult
    possibilistic: PossibilisticVerdict
    strong: StrongVerdict

    def certificates(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        if self.probabilistic.feasible:
            out["global_section"] = {",".join(map(str, g)): w for g, w in self.probabilistic.weights.items()}
        elif self.probabilistic.certificate is not None:
            out["farkas"] = self.probabilistic.certificate
            out["farkas_verified"] = self.probabilistic.verified
        if self.possibilistic.witness is not None:
            cid, t = self.possibilistic.witness
            out["unreachable_outcome"] = {"context": cid, "outcome": list(t)}
        if self.strong.witness is not None:
            out["consistent_assignment"] = list(self.strong.witness)
        return out


def classify_hierarchy(em: EmpiricalModel, tol: Optional[float] = None, cap: Optional[int] = None,
                       jobs: int = 1) -> HierarchyVerdict:
    prob = global_section_probabilistic(em, tol, cap)
    good = consistent_assignments(em, tol, cap, jobs)
    poss = classify_possibilistic(em, tol, assignments=good)
    strong = classify_strong(em, assignments=good)
    if strong.strong and not poss.contextual:
        raise InternalError("strongly contextual model classified as possibilistically non-contextual")
    if poss.contextual and prob.feasible:
        raise InternalError("possibilistically contextual model admits a global section")
    if strong.strong:
        level = Level.STRONG
    elif poss.contextual:
        level = Level.POSSIBILISTIC
    elif not prob.feasible:
        level = Level.PROBABILISTIC
    else:
        level = Level.NONCONTEXTUAL
    logger.info("hierarchy level: %s", level.value)
    return HierarchyVerdict(level, prob, poss, strong)


def empirical_from_ontological(m: OntologicalModel, preparation: str) -> EmpiricalModel:
    """
    The tables an ontological model predicts for one preparation. In a
    multi-member context, outcome 0 of member i is the tuple with a single 0
    at position i; the all-ones tuple carries the remaining weight.
    """
    s = m.scenario
    tables = {}
    for ctx in s.contexts:
        table: Dict[Tuple[int, ...], float] = {}
        if len(ctx.members) == 1:
            mid = ctx.members[0]
            for k in range(s.arity_of(mid)):
                table[(k,)] = predict(m, preparation, Event(mid, k), ctx.id)
        else:
            n = len(ctx.members)
            total = 0.0
            for i, mid in enumerate(ctx.members):
                p = predict(m, preparation, Event(mid, 0), ctx.id)
                table[tuple(0 if k == i else 1 for k in range(n))] = p
                total += p
            table[(1,) * n] = 1.0 - total
        tables[ctx.id] = table
    return EmpiricalModel(s, tables)
