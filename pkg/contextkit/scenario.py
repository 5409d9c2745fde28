"""
Contextuality scenarios: measurements, contexts and their exclusivity structure
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InputError, LookupFailure, StructuralError, Violation
from .file_ops import join_path, parse_number, require
from .graphinv import ExclusivityGraph

logger = logging.getLogger(__name__)

DEFAULT_ARITY = 2


@dataclass(frozen=True)
class Event:
    """Outcome `outcome` of `measurement`. Graph vertices are the outcome-0 events."""

    measurement: str
    outcome: int = 0

    def label(self) -> str:
        return f"{self.measurement}={self.outcome}"


@dataclass(frozen=True)
class Context:
    id: str
    members: Tuple[str, ...]
    declared_maximal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))


@dataclass(frozen=True)
class Scenario:
    measurements: Tuple[str, ...]
    contexts: Tuple[Context, ...]
    arity: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "arity", dict(self.arity))

    __hash__ = None  # arity is a dict

    def arity_of(self, measurement: str) -> int:
        return self.arity.get(measurement, DEFAULT_ARITY)

    @property
    def context_ids(self) -> List[str]:
        return [c.id for c in self.contexts]

    def context(self, cid: str) -> Context:
        for c in self.contexts:
            if c.id == cid:
                return c
        raise LookupFailure(f"unknown context '{cid}'")

    def contexts_containing(self, measurement: str) -> List[str]:
        return [c.id for c in self.contexts if measurement in c.members]

    def outcome_tuples(self, cid: str) -> List[Tuple[int, ...]]:
        """Joint outcome tuples of a context, in member order, lexicographic."""
        ctx = self.context(cid)
        return list(itertools.product(*(range(self.arity_of(m)) for m in ctx.members)))

    def context_outcomes(self, cid: str) -> List[Event]:
        """
        The mutually exclusive, exhaustive events of one run of a context.
        A single-member context has that measurement's outcomes; a larger
        context has the positive event of each member.
        """
        ctx = self.context(cid)
        if len(ctx.members) == 1:
            m = ctx.members[0]
            return [Event(m, k) for k in range(self.arity_of(m))]
        return [Event(m, 0) for m in ctx.members]

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "measurements": list(self.measurements),
            "contexts": [{"id": c.id, "members": list(c.members), "maximal": c.declared_maximal}
                         for c in self.contexts],
        }
        extra = {m: a for m, a in self.arity.items() if a != DEFAULT_ARITY}
        if extra:
            doc["arity"] = extra
        return doc

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], path: str = "") -> "Scenario":
        measurements = require(doc, "measurements", path, list)
        for i, m in enumerate(measurements):
            if not isinstance(m, str):
                raise InputError("measurement ids must be strings", field_path=join_path(path, f"measurements[{i}]"))
        contexts = []
        for i, raw in enumerate(require(doc, "contexts", path, list)):
            where = join_path(path, f"contexts[{i}]")
            members = require(raw, "members", where, list)
            cid = raw.get("id", f"c{i + 1}")
            contexts.append(Context(str(cid), tuple(str(m) for m in members), bool(raw.get("maximal", False))))
        arity = {}
        for m, a in (doc.get("arity") or {}).items():
            value = parse_number(a, join_path(path, f"arity.{m}"))
            if value != int(value):
                raise InputError("arity must be an integer", field_path=join_path(path, f"arity.{m}"))
            arity[m] = int(value)
        return cls(tuple(measurements), tuple(contexts), arity)


def scenario_from_contexts(contexts: Mapping[str, Sequence[str]], maximal: bool = False,
                           arity: Optional[Mapping[str, int]] = None) -> Scenario:
    """Build a scenario whose measurements are declared in first-appearance order."""
    seen: Dict[str, None] = {}
    for members in contexts.values():
        for m in members:
            seen.setdefault(m, None)
    ctxs = tuple(Context(cid, tuple(members), maximal) for cid, members in contexts.items())
    return Scenario(tuple(seen), ctxs, dict(arity or {}))


def validate_scenario(s: Scenario) -> List[Violation]:
    """Empty list iff every scenario invariant holds."""
    out: List[Violation] = []
    known = set()
    for m in s.measurements:
        if m in known:
            out.append(Violation("duplicate-measurement", f"measurement '{m}' declared twice", {"measurement": m}))
        known.add(m)
    for m, a in s.arity.items():
        if m not in known:
            out.append(Violation("unknown-measurement", f"arity given for undeclared measurement '{m}'",
                                 {"measurement": m}))
        if a < 1:
            out.append(Violation("bad-arity", f"measurement '{m}' has arity {a}", {"measurement": m}))
    if not s.contexts:
        out.append(Violation("no-contexts", "scenario declares no contexts"))
    ids = set()
    for c in s.contexts:
        if c.id in ids:
            out.append(Violation("duplicate-context", f"context id '{c.id}' used twice", {"context": c.id}))
        ids.add(c.id)
        if not c.members:
            out.append(Violation("empty-context", f"context '{c.id}' has no members", {"context": c.id}))
        if len(set(c.members)) != len(c.members):
            out.append(Violation("duplicate-member", f"context '{c.id}' repeats a member", {"context": c.id}))
        for m in c.members:
            if m not in known:
                out.append(Violation("unknown-member", f"context '{c.id}' references unknown measurement '{m}'",
                                     {"context": c.id, "measurement": m}))
    for small in s.contexts:
        for big in s.contexts:
            if big is small or not big.declared_maximal:
                continue
            if set(small.members) < set(big.members):
                out.append(Violation("maximal-subset",
                                     f"context '{small.id}' is a strict subset of maximal context '{big.id}'",
                                     {"context": small.id, "maximal_context": big.id}))
    return out


def shared_measurements(s: Scenario) -> Dict[str, List[str]]:
    """Measurements occurring in at least two contexts, in declaration order."""
    out = {}
    for m in s.measurements:
        cids = s.contexts_containing(m)
        if len(cids) >= 2:
            out[m] = cids
    return out


def expand_two_outcome(s: Scenario) -> Scenario:
    """
    Replace every k-outcome measurement (k > 2) by k two-outcome tests m#0..m#(k-1).
    A context containing m contains all of its tests.
    """
    mapping: Dict[str, List[str]] = {}
    for m in s.measurements:
        k = s.arity_of(m)
        mapping[m] = [f"{m}#{i}" for i in range(k)] if k > 2 else [m]
    measurements = tuple(t for m in s.measurements for t in mapping[m])
    contexts = tuple(Context(c.id, tuple(t for m in c.members for t in mapping[m]), c.declared_maximal)
                     for c in s.contexts)
    arity = {t: 2 for m in s.measurements for t in mapping[m] if len(mapping[m]) > 1}
    arity.update({m: a for m, a in s.arity.items() if a <= 2})
    if any(len(v) > 1 for v in mapping.values()):
        logger.info("expanded %d multi-outcome measurement(s) to two-outcome form",
                    sum(1 for v in mapping.values() if len(v) > 1))
    return Scenario(measurements, contexts, arity)


def derive_exclusivity_graph(s: Scenario, weights: Optional[Mapping[str, Any]] = None) -> ExclusivityGraph:
    """
    One vertex per measurement (its positive outcome), one hyperedge per context.
    Vertices without a supplied weight get weight 1.
    """
    bad = [m for m in s.measurements if s.arity_of(m) > 2]
    if bad:
        raise StructuralError(f"unsupported arity for {', '.join(bad)}; expand to two-outcome form first")
    weights = weights or {}
    w = tuple(parse_number(weights[m], f"weights.{m}") if m in weights else 1 for m in s.measurements)
    maximal = bool(s.contexts) and all(c.declared_maximal for c in s.contexts)
    return ExclusivityGraph(s.measurements, w, tuple(c.members for c in s.contexts), maximal)


def all_events(s: Scenario) -> Iterable[Event]:
    for m in s.measurements:
        for k in range(s.arity_of(m)):
            yield Event(m, k)
