"""
Exclusivity graphs and their contextuality bounds

Vertices are events with weights p_v, hyperedges are contexts, and two
vertices are adjacent when some context contains both. The three bounds on
the witness value sum(p_v) are computed here:

    alpha(G)  weighted independence number     (non-contextual models)
    theta(G)  weighted Lovasz number           (quantum models)
    v_F(G)    fractional packing number        (Exclusivity only)
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np
from cvxopt import matrix, solvers, spmatrix

from . import config
from .errors import IncidentError, InputError, InstanceTooLarge, SolverError, StructuralError, Violation
from .file_ops import join_path, parse_number, require
from .lp import OPTIMAL, solve_lp

logger = logging.getLogger(__name__)

Number = Union[Fraction, float, int]


@dataclass(frozen=True)
class ExclusivityGraph:
    vertices: Tuple[str, ...]
    weights: Tuple[Number, ...]
    hyperedges: Tuple[Tuple[str, ...], ...]
    maximal_scenario: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "hyperedges", tuple(tuple(e) for e in self.hyperedges))
        if len(self.weights) != len(self.vertices):
            raise StructuralError(f"{len(self.vertices)} vertices but {len(self.weights)} weights")
        if len(set(self.vertices)) != len(self.vertices):
            raise StructuralError("duplicate vertex id")
        known = set(self.vertices)
        for e in self.hyperedges:
            missing = [v for v in e if v not in known]
            if missing:
                raise StructuralError(f"hyperedge references unknown vertices {missing}")
        if any(w < 0 for w in self.weights):
            raise StructuralError("vertex weights must be nonnegative")

    @cached_property
    def index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def adjacency(self) -> Tuple[frozenset, ...]:
        """Neighbour index sets; co-membership in a hyperedge, never reflexive."""
        nbrs: List[Set[int]] = [set() for _ in self.vertices]
        for e in self.hyperedges:
            idx = [self.index[v] for v in e]
            for a in idx:
                for b in idx:
                    if a != b:
                        nbrs[a].add(b)
        return tuple(frozenset(s) for s in nbrs)

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((i, j) for i, nb in enumerate(self.adjacency) for j in nb if i < j)

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(len(self.vertices)))
        G.add_edges_from(self.edges())
        return G

    def with_weights(self, weights: Sequence[Number]) -> "ExclusivityGraph":
        return ExclusivityGraph(self.vertices, tuple(weights), self.hyperedges, self.maximal_scenario)

    def unit_weighted(self) -> "ExclusivityGraph":
        return self.with_weights([1] * len(self.vertices))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vertices": [{"id": v, "weight": w} for v, w in zip(self.vertices, self.weights)],
            "hyperedges": [list(e) for e in self.hyperedges],
            "maximal": self.maximal_scenario,
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], path: str = "") -> "ExclusivityGraph":
        ids, weights = [], []
        for i, raw in enumerate(require(doc, "vertices", path, list)):
            where = join_path(path, f"vertices[{i}]")
            ids.append(str(require(raw, "id", where)))
            weights.append(parse_number(raw.get("weight", 1), join_path(where, "weight")))
        edges = require(doc, "hyperedges", path, list)
        for i, e in enumerate(edges):
            if not isinstance(e, list):
                raise InputError("hyperedge must be a list of vertex ids", field_path=join_path(path, f"hyperedges[{i}]"))
        return cls(tuple(ids), tuple(weights), tuple(tuple(str(v) for v in e) for e in edges),
                   bool(doc.get("maximal", False)))

    def to_dot(self, name: str = "exclusivity") -> str:
        lines = [f"graph {name} {{"]
        for k, e in enumerate(self.hyperedges):
            lines.append(f"  // hyperedge {k}: {' '.join(e)}")
        for v, w in zip(self.vertices, self.weights):
            lines.append(f'  "{v}" [label="{v}\\n{_fmt(w)}"];')
        for i, j in self.edges():
            lines.append(f'  "{self.vertices[i]}" -- "{self.vertices[j]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fmt(w: Number) -> str:
    if isinstance(w, Fraction):
        return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"
    return f"{float(w):.6g}"


@dataclass
class NCHVResult:
    exists: bool
    assignment: Optional[Dict[str, int]]
    nodes_explored: int


@dataclass
class IndependentSetResult:
    value: Number
    vertices: Tuple[str, ...]


@dataclass
class PackingResult:
    value: Number
    q: Dict[str, Number]
    cliques: List[Tuple[str, ...]]
    exact: bool


@dataclass
class ThetaCertificate:
    """Orthonormal labelling: adjacent vertices get orthogonal unit vectors."""

    handle: np.ndarray
    vectors: np.ndarray  # one row per vertex; zero rows for dropped vertices
    x: Dict[str, float]
    value: float


@dataclass
class ThetaResult:
    value: float
    lower: float
    upper: float
    gap: float
    certificate: Optional[ThetaCertificate] = None


@dataclass
class InvariantResult:
    alpha: IndependentSetResult
    theta: ThetaResult
    vf: PackingResult
    sigma: Number = 0
    tolerance: float = field(default=0.0)


def witness_sigma(g: ExclusivityGraph) -> Number:
    return sum(g.weights, Fraction(0) if all(isinstance(w, (int, Fraction)) for w in g.weights) else 0.0)


def is_probabilistic_model(g: ExclusivityGraph, tol: Optional[float] = None) -> Tuple[bool, List[Violation]]:
    """Weights at most 1 (the graph already forbids negatives); each hyperedge sums to <= 1, or == 1 when maximal."""
    tol = config.EPS_CONTEXT if tol is None else tol
    out: List[Violation] = []
    for v, w in zip(g.vertices, g.weights):
        if w > 1:
            out.append(Violation("weight-range", f"weight of '{v}' is {_fmt(w)}", {"vertex": v}))
    for k, e in enumerate(g.hyperedges):
        s = sum(g.weights[g.index[v]] for v in e)
        if g.maximal_scenario and abs(s - 1) > tol:
            out.append(Violation("edge-not-normalized", f"hyperedge {k} sums to {_fmt(s)}, expected 1",
                                 {"hyperedge": k, "sum": float(s)}))
        elif s > 1 + tol:
            out.append(Violation("edge-overflow", f"hyperedge {k} sums to {_fmt(s)} > 1",
                                 {"hyperedge": k, "sum": float(s)}))
    return not out, out


def nchv_exists(g: ExclusivityGraph, cap: Optional[int] = None) -> NCHVResult:
    """
    Search for a 0/1 assignment respecting every hyperedge.
    Maximal scenarios need exactly one 1 per hyperedge; otherwise at most one.
    A negative result carries the number of search nodes as exhaustion evidence.
    """
    cap = config.NCHV_VERTEX_CAP if cap is None else cap
    n = len(g.vertices)
    if n > cap:
        raise InstanceTooLarge("NCHV search vertices", n, cap)
    if not g.maximal_scenario:
        return NCHVResult(True, {v: 0 for v in g.vertices}, 0)
    if any(len(e) == 0 for e in g.hyperedges):
        return NCHVResult(False, None, 0)

    member_of: List[List[int]] = [[] for _ in range(n)]
    for k, e in enumerate(g.hyperedges):
        for v in set(e):
            member_of[g.index[v]].append(k)
    ones = [0] * len(g.hyperedges)
    open_ = [len(set(e)) for e in g.hyperedges]
    values = [0] * n
    nodes = 0

    def assign(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if i == n:
            return True
        for val in (1, 0):
            ok = True
            for k in member_of[i]:
                if val == 1 and ones[k] == 1:
                    ok = False
                if val == 0 and ones[k] == 0 and open_[k] == 1:
                    ok = False
            if not ok:
                continue
            for k in member_of[i]:
                ones[k] += val
                open_[k] -= 1
            values[i] = val
            if assign(i + 1):
                return True
            for k in member_of[i]:
                ones[k] -= val
                open_[k] += 1
        return False

    found = assign(0)
    logger.debug("NCHV search explored %d nodes", nodes)
    if found:
        return NCHVResult(True, dict(zip(g.vertices, values)), nodes)
    return NCHVResult(False, None, nodes)


def independence_number(g: ExclusivityGraph, cap: Optional[int] = None) -> IndependentSetResult:
    """
    Exact weighted maximum independent set by branch-and-bound.
    Branching follows declaration order (include before exclude), so ties
    resolve to the lexicographically first optimal set.
    """
    cap = config.MWIS_VERTEX_CAP if cap is None else cap
    n = len(g.vertices)
    if n > cap:
        raise InstanceTooLarge("independence number vertices", n, cap)
    adj = g.adjacency
    w = list(g.weights)
    zero = w[0] * 0 if w else 0
    best_value = zero
    best_set: List[int] = []
    nodes = 0

    def clique_cover_bound(cands: List[int]) -> Number:
        classes: List[List[int]] = []
        tops: List[Number] = []
        for c in cands:
            for k, cls in enumerate(classes):
                if all(o in adj[c] for o in cls):
                    cls.append(c)
                    if w[c] > tops[k]:
                        tops[k] = w[c]
                    break
            else:
                classes.append([c])
                tops.append(w[c])
        return sum(tops, zero)

    def branch(cands: List[int], current: List[int], value: Number):
        nonlocal best_value, best_set, nodes
        nodes += 1
        if value > best_value:
            best_value, best_set = value, list(current)
        if not cands or value + clique_cover_bound(cands) <= best_value:
            return
        v, rest = cands[0], cands[1:]
        branch([c for c in rest if c not in adj[v]], current + [v], value + w[v])
        branch(rest, current, value)

    branch([i for i in range(n) if w[i] > 0], [], zero)
    logger.debug("branch-and-bound explored %d nodes", nodes)
    chosen = tuple(g.vertices[i] for i in sorted(best_set))
    for a, b in itertools.combinations(best_set, 2):
        if b in adj[a]:
            raise IncidentError(f"independent set certificate contains adjacent pair {g.vertices[a]}, {g.vertices[b]}")
    return IndependentSetResult(best_value, chosen)


def maximal_cliques(g: ExclusivityGraph, cap: Optional[int] = None) -> List[Tuple[str, ...]]:
    """Maximal cliques of the adjacency graph (pivoting Bron-Kerbosch), sorted."""
    cap = config.CLIQUE_CAP if cap is None else cap
    found = list(itertools.islice(nx.find_cliques(g.to_networkx()), cap + 1))
    if len(found) > cap:
        raise InstanceTooLarge("maximal cliques", len(found), cap)
    ordered = sorted(tuple(sorted(c)) for c in found)
    return [tuple(g.vertices[i] for i in c) for c in ordered]


def fractional_packing_number(g: ExclusivityGraph, cap: Optional[int] = None) -> PackingResult:
    """max sum p_i q_i  s.t.  sum_{i in C} q_i <= 1 per maximal clique C, q >= 0."""
    cliques = maximal_cliques(g, cap)
    if not g.vertices:
        return PackingResult(Fraction(0), {}, [], True)
    rows = []
    for c in cliques:
        members = {g.index[v] for v in c}
        rows.append([1 if i in members else 0 for i in range(len(g.vertices))])
    res = solve_lp(list(g.weights), A_ub=rows, b_ub=[1] * len(rows), maximize=True)
    if res.status != OPTIMAL:
        raise IncidentError(f"fractional packing LP returned {res.status}")
    q = dict(zip(g.vertices, res.x))
    return PackingResult(res.objective, q, cliques, res.exact)


def exclusivity_check(g: ExclusivityGraph, tol: Optional[float] = None, cap: Optional[int] = None) -> bool:
    """True iff every clique's weight sum is <= 1 + tol."""
    tol = config.EPS_CONTEXT if tol is None else tol
    for c in maximal_cliques(g, cap):
        if sum(g.weights[g.index[v]] for v in c) > 1 + tol:
            return False
    return True


def lovasz_number(g: ExclusivityGraph, tol: Optional[float] = None, cap: Optional[int] = None,
                  max_iters: Optional[int] = None) -> ThetaResult:
    """
    Weighted Lovasz number via its SDP:

        min t  s.t.  t*I - A >= 0,  A_ij = sqrt(w_i w_j) off the edges, free on edges.

    The dual optimum B (trace 1, zero on edges) factors as Gram vectors that
    give the orthonormal-labelling certificate.
    """
    tol = config.THETA_TOL if tol is None else tol
    cap = config.THETA_VERTEX_CAP if cap is None else cap
    max_iters = config.SDP_MAX_ITERS if max_iters is None else max_iters
    n = len(g.vertices)
    if n > cap:
        raise InstanceTooLarge("Lovasz number vertices", n, cap)
    w = np.array([float(x) for x in g.weights], dtype=float)
    if n == 0 or not w.any():
        return ThetaResult(0.0, 0.0, 0.0, 0.0, None)
    if n == 1:
        value = float(w[0])
        cert = ThetaCertificate(np.ones(1), np.ones((1, 1)), {g.vertices[0]: 1.0}, value)
        return ThetaResult(value, value, value, 0.0, cert)

    edges = g.edges()
    m = len(edges)
    vals, rows, cols = [], [], []
    for k, (i, j) in enumerate(edges):
        vals += [-1.0, -1.0]
        rows += [i * n + j, j * n + i]
        cols += [k, k]
    for i in range(n):
        vals.append(-1.0)
        rows.append(i * n + i)
        cols.append(m)
    G = spmatrix(vals, rows, cols, (n * n, m + 1))
    sw = np.sqrt(w)
    h = matrix(-np.outer(sw, sw))
    c = matrix([0.0] * m + [1.0])
    options = {"show_progress": False, "maxiters": max_iters,
               "abstol": tol * 1e-3, "reltol": tol * 1e-3, "feastol": 1e-8}
    sol = solvers.sdp(c, Gs=[G], hs=[h], options=options)
    upper = float(sol["primal objective"])
    lower = float(sol["dual objective"])
    gap = abs(upper - lower)
    logger.debug("theta SDP status %s after %s iterations, gap %.3g", sol["status"], sol.get("iterations"), gap)
    if sol["status"] != "optimal" and gap > tol:
        raise SolverError("Lovasz SDP did not converge", lower=min(lower, upper), upper=max(lower, upper))
    value = 0.5 * (upper + lower)
    cert = _theta_certificate(g, np.array(sol["zs"][0]), sw, value, tol)
    return ThetaResult(value, min(lower, upper), max(lower, upper), gap, cert)


def _theta_certificate(g: ExclusivityGraph, B: np.ndarray, sw: np.ndarray, value: float,
                       tol: float) -> Optional[ThetaCertificate]:
    B = 0.5 * (B + B.T)
    evals, evecs = np.linalg.eigh(B)
    evals = np.clip(evals, 0.0, None)
    V = evecs * np.sqrt(evals)  # row i is the Gram vector of vertex i
    norms = np.linalg.norm(V, axis=1)
    keep = norms > 1e-6
    U = np.zeros_like(V)
    U[keep] = V[keep] / norms[keep, None]
    s = sw @ V
    if np.linalg.norm(s) == 0:
        logger.warning("theta certificate: degenerate handle vector")
        return None
    psi = s / np.linalg.norm(s)
    x = (U @ psi) ** 2
    total = float(sw ** 2 @ x)
    worst = max((abs(float(U[i] @ U[j])) for i, j in g.edges() if keep[i] and keep[j]), default=0.0)
    if worst > math.sqrt(tol) or abs(total - value) > tol:
        logger.warning("theta certificate rejected (orthogonality %.2g, value %.6g vs %.6g)", worst, total, value)
        return None
    return ThetaCertificate(psi, U, dict(zip(g.vertices, x.tolist())), total)


def invariants(g: ExclusivityGraph, tol: Optional[float] = None, cap: Optional[int] = None) -> InvariantResult:
    """All three bounds at the graph's weights, with the squeeze re-checked. cap bounds the vertex count."""
    tol = config.THETA_TOL if tol is None else tol
    alpha = independence_number(g, cap)
    theta = lovasz_number(g, tol=tol, cap=cap)
    vf = fractional_packing_number(g)
    if float(alpha.value) > theta.value + tol or theta.value > float(vf.value) + tol:
        raise IncidentError(f"bound squeeze violated: alpha={float(alpha.value):.6g}, "
                            f"theta={theta.value:.6g}, v_F={float(vf.value):.6g}")
    return InvariantResult(alpha, theta, vf, witness_sigma(g), tol)
