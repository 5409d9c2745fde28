"""
Causal-model checks: information measures, no-disturbance phenomena,
factorisability of latent-variable models, and the determinism argument
for looped measurement boxes

All entropies are in bits.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .errors import ContractError, InputError, LookupFailure, StructuralError, Violation
from .file_ops import join_path, parse_array, parse_int, require
from .lp import solve_lp, max_residual
from .ontmodel import OntologicalModel

logger = logging.getLogger(__name__)

Vars = Union[str, Sequence[str]]


def _names(v: Vars) -> List[str]:
    return [v] if isinstance(v, str) else list(v)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    variables: Tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        object.__setattr__(self, "variables", tuple(self.variables))
        if table.ndim != len(self.variables):
            raise StructuralError(f"table has {table.ndim} axes for {len(self.variables)} variables")
        if len(set(self.variables)) != len(self.variables):
            raise StructuralError("variable names must be distinct")
        if np.any(table < -config.EPS_SUM):
            raise ContractError("joint distribution has negative entries")
        if abs(float(table.sum()) - 1.0) > config.EPS_SUM:
            raise ContractError(f"joint distribution sums to {float(table.sum()):.12g}")
        object.__setattr__(self, "table", table)

    @property
    def arities(self) -> Tuple[int, ...]:
        return tuple(self.table.shape)

    def marginal(self, names: Vars) -> np.ndarray:
        names = _names(names)
        for n in names:
            if n not in self.variables:
                raise LookupFailure(f"unknown variable '{n}'")
        keep = [self.variables.index(n) for n in names]
        drop = tuple(i for i in range(len(self.variables)) if i not in keep)
        m = self.table.sum(axis=drop) if drop else self.table
        # summed axes keep their relative order; reorder to the requested one
        remaining = [i for i in range(len(self.variables)) if i in keep]
        return np.transpose(m, [remaining.index(i) for i in keep]) if keep else m

    def entropy(self, names: Vars) -> float:
        names = _names(names)
        if not names:
            return 0.0
        p = self.marginal(names).ravel()
        p = p[p > 0]
        return float(-np.sum(p * np.log2(p)))

    def mutual_information(self, a: Vars, b: Vars) -> float:
        a, b = _names(a), _names(b)
        both = list(dict.fromkeys(a + b))
        return self.entropy(a) + self.entropy(b) - self.entropy(both)

    def conditional_entropy(self, names: Vars, given: Vars) -> float:
        names, given = _names(names), _names(given)
        return self.entropy(list(dict.fromkeys(names + given))) - self.entropy(given)


def entropy(d: JointDistribution, names: Vars) -> float:
    return d.entropy(names)


def mutual_information(d: JointDistribution, a: Vars, b: Vars) -> float:
    return d.mutual_information(a, b)


def conditional_entropy(d: JointDistribution, names: Vars, given: Vars) -> float:
    return d.conditional_entropy(names, given)


# --- phenomena ---

def _arity_pair(doc: Dict[str, Any], key: str) -> Tuple[int, int]:
    pair = require(doc, key, kind=list)
    if len(pair) != 2:
        raise InputError("expected two arities", field_path=key)
    return tuple(parse_int(v, f"{key}[{k}]", minimum=1) for k, v in enumerate(pair))


@dataclass(frozen=True, eq=False)
class Phenomenon:
    """
    P(A, B | X, Y) with table axes (a, b, x, y). Input pairs outside the
    `defined` mask carry no conditional.
    """

    table: np.ndarray
    defined: Optional[np.ndarray] = None

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 4:
            raise StructuralError("phenomenon table needs axes (a, b, x, y)")
        defined = (np.ones(table.shape[2:], dtype=bool) if self.defined is None
                   else np.asarray(self.defined, dtype=bool))
        if defined.shape != table.shape[2:]:
            raise StructuralError("defined mask must have shape (|X|, |Y|)")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "defined", defined)

    def validate(self, tol: Optional[float] = None) -> List[Violation]:
        tol = config.EPS_SUM if tol is None else tol
        out = []
        for x, y in zip(*np.nonzero(self.defined)):
            s = self.table[:, :, x, y]
            if np.any(s < -tol):
                out.append(Violation("negative-probability", f"slice (x={x}, y={y}) has negative entries",
                                     {"x": int(x), "y": int(y)}))
            if abs(float(s.sum()) - 1.0) > tol:
                out.append(Violation("normalization", f"slice (x={x}, y={y}) sums to {float(s.sum()):.12g}",
                                     {"x": int(x), "y": int(y)}))
        return out

    def to_dict(self) -> Dict[str, Any]:
        nA, nB, nX, nY = self.table.shape
        return {
            "kind": "phenomenon",
            "outputs": [nA, nB],
            "inputs": [nX, nY],
            "conditionals": [{"x": int(x), "y": int(y), "table": self.table[:, :, x, y].tolist()}
                             for x, y in zip(*np.nonzero(self.defined))],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "Phenomenon":
        nA, nB = _arity_pair(doc, "outputs")
        nX, nY = _arity_pair(doc, "inputs")
        table = np.zeros((nA, nB, nX, nY))
        defined = np.zeros((nX, nY), dtype=bool)
        for i, raw in enumerate(require(doc, "conditionals", kind=list)):
            where = f"conditionals[{i}]"
            x = parse_int(require(raw, "x", where), join_path(where, "x"))
            y = parse_int(require(raw, "y", where), join_path(where, "y"))
            if not (0 <= x < nX and 0 <= y < nY):
                raise InputError("input pair out of range", field_path=where)
            block = parse_array(require(raw, "table", where, list), join_path(where, "table"))
            if block.shape != (nA, nB):
                raise InputError(f"expected a {nA}x{nB} table", field_path=f"{where}.table")
            table[:, :, x, y] = block
            defined[x, y] = True
        return cls(table, defined)


def is_no_disturbance(p: Phenomenon, tol: Optional[float] = None) -> Tuple[bool, List[Violation]]:
    """P(A|XY) = P(A|X) and P(B|XY) = P(B|Y) wherever the conditionals are defined."""
    tol = config.EPS_CONTEXT if tol is None else tol
    out: List[Violation] = []
    pa = p.table.sum(axis=1)  # (a, x, y)
    pb = p.table.sum(axis=0)  # (b, x, y)
    nX, nY = p.defined.shape
    for x in range(nX):
        ys = [y for y in range(nY) if p.defined[x, y]]
        for y in ys[1:]:
            for a in np.flatnonzero(np.abs(pa[:, x, y] - pa[:, x, ys[0]]) > tol):
                out.append(Violation("signalling-to-A", f"P(A={a}|X={x},Y) differs between Y={ys[0]} and Y={y}",
                                     {"a": int(a), "x": x, "y": int(y)}))
    for y in range(nY):
        xs = [x for x in range(nX) if p.defined[x, y]]
        for x in xs[1:]:
            for b in np.flatnonzero(np.abs(pb[:, x, y] - pb[:, xs[0], y]) > tol):
                out.append(Violation("signalling-to-B", f"P(B={b}|X,Y={y}) differs between X={xs[0]} and X={x}",
                                     {"b": int(b), "x": int(x), "y": y}))
    return not out, out


def prepare_measure_phenomenon(conditionals: np.ndarray) -> Phenomenon:
    """
    P(O I | M P) from P(O | M, P) with axes (o, m, p); the trivial event I is
    a one-valued output on the preparation side.
    """
    cond = np.asarray(conditionals, dtype=float)
    if cond.ndim != 3:
        raise StructuralError("prepare-measure conditionals need axes (o, m, p)")
    return Phenomenon(cond[:, None, :, :])


@dataclass
class LatentModel:
    """Per-preparation priors mu[p, lam] and responses xi[o, m, lam]."""

    priors: np.ndarray
    responses: np.ndarray
    preparations: Tuple[str, ...] = ()
    settings: Tuple[str, ...] = ()

    def conditionals(self) -> np.ndarray:
        return np.einsum("oml,pl->omp", self.responses, self.priors)


def phenomenon_from_model(m: OntologicalModel, preparations: Sequence[str],
                          contexts: Optional[Sequence[str]] = None) -> Tuple[Phenomenon, LatentModel]:
    """
    The prepare-measure phenomenon of an ontological model: settings are
    contexts, outputs index each context's outcome events.
    """
    s = m.scenario
    contexts = list(s.context_ids if contexts is None else contexts)
    outcome_sets = [s.context_outcomes(cid) for cid in contexts]
    n_out = max(len(o) for o in outcome_sets)
    xi = np.zeros((n_out, len(contexts), m.num_ontic_states))
    for k, (cid, events) in enumerate(zip(contexts, outcome_sets)):
        for o, e in enumerate(events):
            xi[o, k] = m.xi(e, cid)
    mu = np.vstack([m.mu(p) for p in preparations])
    latent = LatentModel(mu, xi, tuple(preparations), tuple(contexts))
    return prepare_measure_phenomenon(latent.conditionals()), latent


@dataclass
class FactorisationResult:
    factorisable: bool
    fine_tuned: bool
    prior: Optional[np.ndarray] = None
    statistical_prior: Optional[np.ndarray] = None
    residual: Optional[float] = None

    @property
    def verdict(self) -> str:
        if self.factorisable:
            return "factorisable"
        return "fine-tuned" if self.fine_tuned else "not factorisable"


def factorisable_check(p: Phenomenon, latent: LatentModel, tol: Optional[float] = None) -> FactorisationResult:
    """
    Look for one prior P(lam) that reproduces P(O|M,P) through the latent
    responses and is the latent state of every preparation. The weaker
    statistics-only prior is reported alongside.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    target = p.table.sum(axis=1)  # (o, m, p)
    if p.table.shape[1] != 1:
        raise StructuralError("factorisable_check expects a prepare-measure phenomenon")
    predicted = latent.conditionals()
    if predicted.shape != target.shape:
        raise StructuralError(f"latent model predicts shape {predicted.shape}, phenomenon has {target.shape}")
    mask = np.broadcast_to(p.defined[None, :, :], target.shape)
    gap = float(np.max(np.abs(predicted - target)[mask], initial=0.0))
    if gap > tol:
        raise ContractError(f"latent model does not reproduce the phenomenon (gap {gap:.3g})")

    n_lam = latent.priors.shape[1]
    stat_rows, stat_rhs = [[1.0] * n_lam], [1.0]
    for o, x, y in zip(*np.nonzero(mask)):
        stat_rows.append(latent.responses[o, x].tolist())
        stat_rhs.append(float(target[o, x, y]))
    stat = solve_lp([0] * n_lam, A_eq=stat_rows, b_eq=stat_rhs, exact=False, tol=tol)
    stat_prior = np.array([float(v) for v in stat.x]) if stat.feasible else None

    rows, rhs = list(stat_rows), list(stat_rhs)
    for k in range(latent.priors.shape[0]):
        for lam in range(n_lam):
            unit = [0.0] * n_lam
            unit[lam] = 1.0
            rows.append(unit)
            rhs.append(float(latent.priors[k, lam]))
    full = solve_lp([0] * n_lam, A_eq=rows, b_eq=rhs, exact=False, tol=tol)
    distinct = bool(np.max(np.ptp(latent.priors, axis=0), initial=0.0) > tol)
    if not full.feasible:
        logger.info("no single prior serves every preparation; latent states differ: %s", distinct)
        return FactorisationResult(False, distinct, None, stat_prior)
    prior = np.array([float(v) for v in full.x])
    residual = max_residual(rows, rhs, None, None, prior)
    return FactorisationResult(True, False, prior, stat_prior, residual)


# --- boxes and loops ---

@dataclass(frozen=True, eq=False)
class BoxBehavior:
    """
    P(O | I, Q) with axes (o, i, q), independent input and ontic
    distributions. A deterministic box has 0/1 conditionals.
    """

    conditional: np.ndarray
    p_input: np.ndarray
    p_ontic: np.ndarray
    deterministic: bool = True

    def __post_init__(self):
        cond = np.asarray(self.conditional, dtype=float)
        pi = np.asarray(self.p_input, dtype=float)
        pq = np.asarray(self.p_ontic, dtype=float)
        if cond.ndim != 3 or cond.shape[1:] != (pi.size, pq.size):
            raise StructuralError("conditional must have axes (o, i, q) matching the input and ontic arities")
        for name, v in (("p_input", pi), ("p_ontic", pq)):
            if np.any(v < 0) or abs(float(v.sum()) - 1.0) > config.EPS_SUM:
                raise ContractError(f"{name} is not a probability vector")
        if np.any(np.abs(cond.sum(axis=0) - 1.0) > config.EPS_SUM):
            raise ContractError("each conditional P(O|i,q) must sum to 1")
        if self.deterministic and np.any((cond != 0) & (cond != 1)):
            raise ContractError("box flagged deterministic has non-0/1 conditionals")
        object.__setattr__(self, "conditional", cond)
        object.__setattr__(self, "p_input", pi)
        object.__setattr__(self, "p_ontic", pq)

    @classmethod
    def from_function(cls, output: Sequence[Sequence[int]], n_out: Optional[int] = None,
                      p_input: Optional[Sequence[float]] = None,
                      p_ontic: Optional[Sequence[float]] = None) -> "BoxBehavior":
        """Deterministic box from an output table f[i][q]; uniform distributions by default."""
        f = np.asarray(output, dtype=int)
        if f.ndim != 2:
            raise StructuralError("output table must be indexed [input][ontic]")
        n_in, n_q = f.shape
        n_out = int(f.max()) + 1 if n_out is None else n_out
        if f.min() < 0 or f.max() >= n_out:
            raise StructuralError("output values out of range")
        cond = np.zeros((n_out, n_in, n_q))
        for i, q in itertools.product(range(n_in), range(n_q)):
            cond[f[i, q], i, q] = 1.0
        pi = np.full(n_in, 1.0 / n_in) if p_input is None else p_input
        pq = np.full(n_q, 1.0 / n_q) if p_ontic is None else p_ontic
        return cls(cond, pi, pq, True)

    @property
    def n_out(self) -> int:
        return self.conditional.shape[0]

    @property
    def n_in(self) -> int:
        return self.conditional.shape[1]

    @property
    def n_ontic(self) -> int:
        return self.conditional.shape[2]

    def output(self, i: int, q: int) -> int:
        if not self.deterministic:
            raise ContractError("output() needs a deterministic box")
        return int(np.argmax(self.conditional[:, i, q]))

    def joint(self) -> JointDistribution:
        t = self.conditional * self.p_input[None, :, None] * self.p_ontic[None, None, :]
        return JointDistribution(("O", "I", "Q"), t)

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"kind": "box", "p_input": self.p_input.tolist(), "p_ontic": self.p_ontic.tolist()}
        if self.deterministic:
            doc["output"] = [[self.output(i, q) for q in range(self.n_ontic)] for i in range(self.n_in)]
            doc["output_arity"] = self.n_out
        else:
            doc["output"] = None
            doc["conditional"] = self.conditional.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "BoxBehavior":
        p_input = None if doc.get("p_input") is None else parse_array(doc["p_input"], "p_input", ndim=1)
        p_ontic = None if doc.get("p_ontic") is None else parse_array(doc["p_ontic"], "p_ontic", ndim=1)
        if doc.get("output") is not None:
            out = require(doc, "output", kind=list)
            for i, row in enumerate(out):
                if not isinstance(row, list) or len(row) != len(out[0]):
                    raise InputError("output rows must be lists of equal length", field_path=f"output[{i}]")
                for q, v in enumerate(row):
                    parse_int(v, f"output[{i}][{q}]", minimum=0)
            arity = doc.get("output_arity")
            if arity is not None:
                parse_int(arity, "output_arity", minimum=1)
            return cls.from_function(out, arity, p_input, p_ontic)
        cond = parse_array(require(doc, "conditional", kind=list), "conditional", ndim=3)
        pi = p_input if p_input is not None else [1.0 / cond.shape[1]] * cond.shape[1]
        pq = p_ontic if p_ontic is not None else [1.0 / cond.shape[2]] * cond.shape[2]
        deterministic = bool(np.all((cond == 0) | (cond == 1))) and doc.get("deterministic", True)
        return cls(cond, pi, pq, deterministic)


def information_identity_residual(b: BoxBehavior) -> float:
    """|H(O) - I(O:I) - I(OI:Q)| for a deterministic box with I independent of Q."""
    if not b.deterministic:
        raise ContractError("information_identity_residual needs a deterministic box")
    d = b.joint()
    return abs(d.entropy("O") - d.mutual_information("O", "I") - d.mutual_information(["O", "I"], "Q"))


@dataclass(frozen=True, eq=False)
class LoopComposition:
    """Box X's output is box Y's input and vice versa."""

    box_x: BoxBehavior
    box_y: BoxBehavior

    def __post_init__(self):
        if self.box_x.n_out != self.box_y.n_in or self.box_y.n_out != self.box_x.n_in:
            raise StructuralError("loop wiring needs each box's output arity to match the other's input arity")
        if not (self.box_x.deterministic and self.box_y.deterministic):
            raise ContractError("loop composition needs deterministic boxes")


UNIQUE, NONE, MULTIPLE = "unique", "none", "multiple"


@dataclass
class LoopResult:
    classification: Dict[Tuple[int, int], str]
    fixed_points: Dict[Tuple[int, int], List[Tuple[int, int]]]
    joint: Optional[JointDistribution] = None
    conditional_entropy: Optional[float] = None

    @property
    def unique_everywhere(self) -> bool:
        return all(c == UNIQUE for c in self.classification.values())

    def counts(self) -> Dict[str, int]:
        out = {UNIQUE: 0, NONE: 0, MULTIPLE: 0}
        for c in self.classification.values():
            out[c] += 1
        return out


def loop_fixed_points(loop: LoopComposition) -> LoopResult:
    """
    Solve O^X = f_X(O^Y, q^X), O^Y = f_Y(O^X, q^Y) for every ontic pair.
    Only when every pair has one solution is a joint distribution emitted.
    """
    bx, by = loop.box_x, loop.box_y
    classes, points = {}, {}
    for qx, qy in itertools.product(range(bx.n_ontic), range(by.n_ontic)):
        sols = []
        for ox in range(bx.n_out):
            oy = by.output(ox, qy)
            if bx.output(oy, qx) == ox:
                sols.append((ox, oy))
        points[(qx, qy)] = sols
        classes[(qx, qy)] = UNIQUE if len(sols) == 1 else (NONE if not sols else MULTIPLE)
    result = LoopResult(classes, points)
    if result.unique_everywhere:
        t = np.zeros((bx.n_out, by.n_out, bx.n_ontic, by.n_ontic))
        for (qx, qy), sols in points.items():
            ox, oy = sols[0]
            t[ox, oy, qx, qy] = bx.p_ontic[qx] * by.p_ontic[qy]
        result.joint = JointDistribution(("OX", "OY", "QX", "QY"), t)
        result.conditional_entropy = result.joint.conditional_entropy(["OX", "OY"], ["QX", "QY"])
    logger.debug("loop fixed points: %s", result.counts())
    return result


@dataclass
class AuditStep:
    name: str
    relation: str
    lhs: Optional[float]
    rhs: Optional[float]
    holds: bool

    @property
    def slack(self) -> Optional[float]:
        if self.lhs is None or self.rhs is None:
            return None
        return self.rhs - self.lhs if self.relation == "<=" else abs(self.rhs - self.lhs)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "relation": self.relation, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "holds": self.holds}


@dataclass
class AuditReport:
    mutual_information: float
    loop: LoopResult
    steps: List[AuditStep] = field(default_factory=list)

    @property
    def determinism_fails(self) -> bool:
        return not self.loop.unique_everywhere or (self.loop.conditional_entropy or 0.0) > 1e-10

    @property
    def verdict(self) -> str:
        if self.mutual_information <= 1e-10:
            return "gleason-respecting"
        if self.determinism_fails:
            return "determinism-failure"
        return "unresolved"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "mutual_information_O_I": self.mutual_information,
            "determinism_fails": self.determinism_fails,
            "loop": {"counts": self.loop.counts(),
                     "conditional_entropy": self.loop.conditional_entropy},
            "steps": [s.to_dict() for s in self.steps],
        }


def gleason_constraint_audit(b: BoxBehavior, tol: float = 1e-10) -> AuditReport:
    """
    Evaluate each step of the argument that a globally deterministic loop of
    two copies of b forces I(O:I) = 0. Steps that need the loop's joint
    distribution are reported as failing when the loop is not deterministic.
    """
    if not b.deterministic:
        raise ContractError("the audit only covers deterministic boxes")
    d = b.joint()
    h_o = d.entropy("O")
    i_oi = d.mutual_information("O", "I")
    i_oiq = d.mutual_information(["O", "I"], "Q")
    loop = loop_fixed_points(LoopComposition(b, b))
    report = AuditReport(i_oi, loop)
    steps = report.steps

    if loop.joint is not None:
        j = loop.joint
        h_cond = loop.conditional_entropy
        h_pair = j.entropy(["OX", "OY"])
        h_marg = max(j.entropy("OX"), j.entropy("OY"), key=lambda h: abs(h - h_o))
        i_loop = j.mutual_information("OX", "OY")
        i_pair_q = j.mutual_information(["OX", "OY"], ["QX", "QY"])
        steps.append(AuditStep("global-determinism", "=", h_cond, 0.0, h_cond <= tol))
        steps.append(AuditStep("marginal-entropy", "=", h_marg, h_o, abs(h_marg - h_o) <= tol))
        split = 2 * h_o - i_oi
        steps.append(AuditStep("pair-entropy-split", "=", h_pair, split, abs(h_pair - split) <= tol))
        steps.append(AuditStep("loop-correlation", "=", i_loop, i_oi, abs(i_loop - i_oi) <= tol))
        steps.append(AuditStep("ontic-information-bound", "<=", i_pair_q, 2 * i_oiq, i_pair_q <= 2 * i_oiq + tol))
    else:
        h_pair = None
        steps.append(AuditStep("global-determinism", "=", None, 0.0, False))
    steps.append(AuditStep("chain-rule", "=", h_o, i_oi + i_oiq, abs(h_o - i_oi - i_oiq) <= tol))
    # H(OX OY) = I(OX OY : QX QY) <= 2 I(OI:Q) = 2H(O) - 2I(O:I)
    rhs = 2 * h_o - 2 * i_oi
    steps.append(AuditStep("combined-inequality", "<=", h_pair, rhs, h_pair is not None and h_pair <= rhs + tol))
    logger.info("audit: I(O:I)=%.6g, verdict %s", i_oi, report.verdict)
    return report
