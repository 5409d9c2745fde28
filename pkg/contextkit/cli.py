"""
Command-line interface for contextkit
"""

import argparse
import logging
import os
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

from . import config
from .causal import (BoxBehavior, Phenomenon, factorisable_check, gleason_constraint_audit, is_no_disturbance,
                     information_identity_residual, phenomenon_from_model)
from .compress import build_quasi_model, quasi_normalization_gaps
from .counterfactual import (COMPOSITES, FeasibilityInstance, six_state_fixture, six_state_ontological_model,
                             compare_biases, enumeration_oracle, feasibility_search, outcome_weight_bounds)
from .empirical import (EmpiricalModel, classify_hierarchy, signed_global_section, validate_no_disturbance,
                        validate_tables)
from .errors import ContextkitError, InputError, InternalError, Violation, violations_to_dicts
from .file_ops import content_digest, detect_kind, dumps_json, load_json, write_file_atomic
from .fixtures import FIXTURES, fixture_document, resolve_fixtures
from .graphinv import ExclusivityGraph, exclusivity_check, invariants, is_probabilistic_model, nchv_exists
from .marbleworld import (DiscretePrior, export_ontological_model, find_ks_witness, gleason_violation_test,
                          load_marble_setup, marble_box, sample_statistics)
from .ontmodel import (OntologicalModel, detect_measurement_contextuality, detect_preparation_contextuality,
                       predict, validate_model)
from .report import AnalysisReport, tolerances
from .scenario import Scenario, derive_exclusivity_graph, validate_scenario

logger = logging.getLogger(__name__)


def _common_args() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help=f"contextuality tolerance (default {config.EPS_CONTEXT:g}, env CONTEXTKIT_EPS)")
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default {config.DEFAULT_SEED})")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default json)")
    common.add_argument("--dot", help="also write the exclusivity graph to this path in DOT format")
    common.add_argument("--cap", type=int, default=None, help="override the resource cap of the command")
    common.add_argument("--jobs", type=int, default=config.DEFAULT_JOBS, help="worker threads (default 1)")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--timing", action="store_true", help="add wall time to the report")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_args()
    ap = argparse.ArgumentParser(prog=config.APP_NAME,
                                 description=f"{config.APP_NAME}: contextuality analysis of scenarios and models")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a scenario, model, table or graph file")
    p.add_argument("path")
    p = sub.add_parser("classify", parents=[common], help="place an empirical model in the contextuality hierarchy")
    p.add_argument("path")
    p = sub.add_parser("compress", parents=[common], help="compress a Gleason-respecting ontological model")
    p.add_argument("path")
    p = sub.add_parser("graph", parents=[common], help="independence, Lovasz and fractional packing bounds")
    p.add_argument("path")
    p = sub.add_parser("marble", parents=[common], help="sample a marble-world configuration")
    p.add_argument("path")
    p = sub.add_parser("counterfactual", parents=[common],
                       help="counterfactual feasibility (built-in six-state construction without a path)")
    p.add_argument("path", nargs="?")
    p = sub.add_parser("loop", parents=[common], help="audit the loop composition of a deterministic box")
    p.add_argument("path")

    p_fix = sub.add_parser("fixtures", help="list or extract bundled fixture files")
    p_fix_sub = p_fix.add_subparsers(dest="fixtures_cmd", required=True)
    p_fix_sub.add_parser("list", parents=[common], help="list bundled fixtures")
    p_extract = p_fix_sub.add_parser("extract", parents=[common], help="write fixture files to a directory")
    p_extract.add_argument("names", nargs="*",
                           help=f"fixture names or 'all'. Known: {', '.join(FIXTURES.keys())}")
    p_extract.add_argument("--dir", default=".", help="target directory (default .)")
    return ap


def _setup_logging(verbose: int):
    level = config.LOG_LEVEL
    if verbose == 1:
        level = "INFO"
    elif verbose >= 2:
        level = "DEBUG"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _seed(args, fallback: Optional[int] = None) -> int:
    if args.seed is not None:
        return args.seed
    return config.DEFAULT_SEED if fallback is None else int(fallback)


def _write_dot(args, g: ExclusivityGraph):
    if args.dot:
        write_file_atomic(args.dot, g.to_dot())
        logger.info("wrote DOT graph to %s", args.dot)


def _validity(report: AnalysisReport, violations: List[Violation]) -> int:
    report.verdicts["valid"] = not violations
    report.certificates["violations"] = violations_to_dicts(violations)
    return 0 if not violations else 1


# --- commands ---

def cmd_validate(args) -> Tuple[AnalysisReport, int]:
    doc, digest = load_json(args.path)
    kind = detect_kind(doc)
    report = AnalysisReport("validate", digest, {"kind": kind}, tolerances=tolerances(eps_context=args.tol))
    violations: List[Violation] = []

    if kind == "scenario":
        s = Scenario.from_dict(doc)
        violations = validate_scenario(s)
        if not violations and all(s.arity_of(m) <= 2 for m in s.measurements):
            _write_dot(args, derive_exclusivity_graph(s))
    elif kind == "model":
        m = OntologicalModel.from_dict(doc)
        violations = validate_scenario(m.scenario) + validate_model(m, args.tol)
        if not violations:
            report.verdicts["measurement_contextual"] = bool(detect_measurement_contextuality(m, args.tol))
            report.verdicts["preparation_contextual"] = bool(detect_preparation_contextuality(m, tol=args.tol))
    elif kind == "empirical":
        em = EmpiricalModel.from_dict(doc)
        violations = validate_scenario(em.scenario) + validate_tables(em, args.tol)
        disturbance = validate_no_disturbance(em, args.tol)
        report.verdicts["no_disturbance"] = not disturbance
        report.certificates["disturbance"] = violations_to_dicts(disturbance)
    elif kind == "graph":
        g = ExclusivityGraph.from_dict(doc)
        _, violations = is_probabilistic_model(g, args.tol)
        _write_dot(args, g)
    elif kind == "counterfactual":
        inst = FeasibilityInstance.from_dict(doc)
        report.verdicts["outcome_space"] = inst.space_size()
        for t in inst.targets:
            total = sum(t.marginal)
            if any(v < 0 for v in t.marginal) or abs(float(total) - 1.0) > config.EPS_SUM:
                violations.append(Violation("target-marginal", f"target of '{t.preparation}' on "
                                            f"{', '.join(t.contexts)} is not a distribution",
                                            {"preparation": t.preparation, "contexts": list(t.contexts)}))
    elif kind == "phenomenon":
        p = Phenomenon.from_dict(doc)
        violations = p.validate(args.tol)
        ok, disturbance = is_no_disturbance(p, args.tol)
        report.verdicts["no_disturbance"] = ok
        report.certificates["disturbance"] = violations_to_dicts(disturbance)
    elif kind == "box":
        b = BoxBehavior.from_dict(doc)
        report.verdicts["deterministic"] = b.deterministic
    elif kind == "marble":
        setup = load_marble_setup(doc)
        report.verdicts["contexts"] = sorted(setup.contexts)
    else:
        raise InputError(f"unknown file kind {kind!r}", source=args.path)
    return report, _validity(report, violations)


def cmd_classify(args) -> Tuple[AnalysisReport, int]:
    doc, digest = load_json(args.path)
    em = EmpiricalModel.from_dict(doc)
    report = AnalysisReport("classify", digest, tolerances=tolerances(eps_context=args.tol))
    bad = validate_scenario(em.scenario) + validate_tables(em, args.tol)
    if bad:
        return report, _validity(report, bad)
    disturbance = validate_no_disturbance(em, args.tol)
    hv = classify_hierarchy(em, args.tol, args.cap, args.jobs)
    report.verdicts.update({
        "level": hv.level.value,
        "probabilistic": not hv.probabilistic.feasible,
        "possibilistic": hv.possibilistic.contextual,
        "strong": hv.strong.strong,
        "no_disturbance": not disturbance,
        "exact": hv.probabilistic.exact,
    })
    report.certificates.update(hv.certificates())
    if disturbance:
        report.certificates["disturbance"] = violations_to_dicts(disturbance)
    else:
        signed = signed_global_section(em, args.tol, args.cap)
        report.verdicts["signed_min_weight"] = signed.min_weight
        report.certificates["signed_section"] = {
            "residual": signed.residual,
            "negative": {",".join(map(str, g)): w for g, w in signed.negative},
        }
    return report, 0


def cmd_compress(args) -> Tuple[AnalysisReport, int]:
    doc, digest = load_json(args.path)
    m = OntologicalModel.from_dict(doc)
    q = build_quasi_model(m, args.tol)
    worst = 0.0
    for (e, cid) in m.responses:
        for p in m.preparations:
            worst = max(worst, abs(predict(m, p, e, cid) - q.predict(p, e)))
    state_gap, resp_gap = quasi_normalization_gaps(q)
    report = AnalysisReport("compress", digest, tolerances=tolerances(eps_context=args.tol))
    report.verdicts.update({
        "ontic_dimension": m.num_ontic_states,
        "quasi_dimension": q.num_quasi_states,
        "measurement_contextual": bool(detect_measurement_contextuality(m, args.tol)),
        "negative": bool(q.negativity),
        "negative_entries": len(q.negativity),
        "prediction_error": worst,
        "state_normalization_gap": state_gap,
        "response_normalization_gap": resp_gap,
    })
    report.certificates["quasi_model"] = q.to_dict()
    report.table = (("vector", "index", "value"), [(n.vector, n.index, n.value) for n in q.negativity])
    return report, 0


def cmd_graph(args) -> Tuple[AnalysisReport, int]:
    doc, digest = load_json(args.path)
    kind = detect_kind(doc)
    if kind == "graph":
        g = ExclusivityGraph.from_dict(doc)
    elif kind == "scenario":
        g = derive_exclusivity_graph(Scenario.from_dict(doc), doc.get("weights"))
    else:
        raise InputError(f"graph expects a graph or scenario file, got {kind!r}", source=args.path)
    _write_dot(args, g)
    inv = invariants(g, cap=args.cap)
    ok, violations = is_probabilistic_model(g, args.tol)
    nchv = nchv_exists(g, args.cap)
    report = AnalysisReport("graph", digest, tolerances=tolerances(eps_context=args.tol, theta_tol=inv.tolerance))
    report.verdicts.update({
        "alpha": inv.alpha.value,
        "theta": inv.theta.value,
        "theta_gap": inv.theta.gap,
        "fractional_packing": inv.vf.value,
        "witness": inv.sigma,
        "probabilistic_model": ok,
        "exclusivity": exclusivity_check(g, args.tol),
        "nchv_exists": nchv.exists,
        "exceeds_noncontextual_bound": float(inv.sigma) > float(inv.alpha.value) + (args.tol or config.EPS_CONTEXT),
    })
    certs: Dict[str, Any] = {
        "independent_set": list(inv.alpha.vertices),
        "packing": inv.vf.q,
        "cliques": [list(c) for c in inv.vf.cliques],
        "violations": violations_to_dicts(violations),
        "nchv_nodes": nchv.nodes_explored,
    }
    if inv.theta.certificate is not None:
        certs["theta_labelling"] = inv.theta.certificate.x
    if nchv.assignment is not None:
        certs["nchv_assignment"] = nchv.assignment
    report.certificates.update(certs)
    report.table = (("vertex", "weight", "in_independent_set", "packing"),
                    [(v, w, v in inv.alpha.vertices, inv.vf.q[v]) for v, w in zip(g.vertices, g.weights)])
    return report, 0


def cmd_marble(args) -> Tuple[AnalysisReport, int]:
    doc, digest = load_json(args.path)
    setup = load_marble_setup(doc)
    seed = _seed(args, setup.seed)
    report = AnalysisReport("marble", digest, tolerances=tolerances())
    report.certificates["seed"] = seed
    rows = []
    stats = {}
    for cid, c in setup.contexts.items():
        st = sample_statistics(setup.prior, c, setup.n, seed, args.jobs)
        stats[cid] = st.to_dict(c.labels)
        rows += [(cid, label, f, se) for label, f, se in zip(c.labels, st.frequencies, st.stderr)]
    report.certificates["statistics"] = stats
    report.table = (("context", "label", "frequency", "stderr"), rows)

    if len(setup.pair) == 2 and setup.shared:
        c1, c2 = (setup.contexts[cid] for cid in setup.pair)
        gv = gleason_violation_test(setup.prior, c1, c2, setup.shared, setup.n, seed, args.jobs)
        report.verdicts["gleason_violated"] = gv.violated
        report.certificates["gleason"] = gv.to_dict()

        witness = find_ks_witness(c1, c2, setup.shared, seed=seed)
        report.verdicts["ks_witness_found"] = witness is not None
        if witness is not None:
            report.certificates["ks_witness"] = witness.amplitudes

        size = args.cap or config.MARBLE_DISCRETE_STATES
        discrete = DiscretePrior.from_prior(setup.prior, size, seed)
        pair = {cid: setup.contexts[cid] for cid in setup.pair}
        exported = export_ontological_model(discrete, pair)
        report.verdicts["exported_measurement_contextual"] = bool(detect_measurement_contextuality(exported, args.tol))
        audit = gleason_constraint_audit(marble_box(c1, c2, setup.shared, discrete))
        report.verdicts["box_audit"] = audit.verdict
        report.certificates["box_audit"] = audit.to_dict()
    return report, 0


def _run_instance(inst: FeasibilityInstance, args) -> Dict[str, Any]:
    res = feasibility_search(inst, args.tol, args.cap)
    out: Dict[str, Any] = {"verdict": res.verdict, "exact": res.exact, "variables": res.variables,
                           "excluded": res.excluded}
    if res.certificate is not None:
        out["farkas"] = res.certificate.multipliers
        out["farkas_verified"] = res.certificate.verified
    if res.shared is not None:
        out["shared_distribution"] = res.shared.to_dict()
    leave_one_out = {}
    if len(inst.identified) > 2:
        for mid in inst.identified:
            sub = inst.without(mid)
            verdict = feasibility_search(sub, args.tol, args.cap).feasible
            oracle = enumeration_oracle(sub, args.tol, args.cap)
            if verdict != oracle:
                raise InternalError(f"solver and enumeration oracle disagree without '{mid}'")
            leave_one_out[mid] = "FEASIBLE" if verdict else "INFEASIBLE"
    out["leave_one_out"] = leave_one_out
    return out


def cmd_counterfactual(args) -> Tuple[AnalysisReport, int]:
    if args.path:
        doc, digest = load_json(args.path)
        inst = FeasibilityInstance.from_dict(doc)
        report = AnalysisReport("counterfactual", digest, tolerances=tolerances(eps_context=args.tol))
        result = _run_instance(inst, args)
        report.verdicts["verdict"] = result.pop("verdict")
        report.verdicts["leave_one_out"] = result.pop("leave_one_out")
        report.certificates.update(result)
        return report, 0

    fx = six_state_fixture()
    inst = fx.instance()
    report = AnalysisReport("counterfactual", content_digest(dumps_json(inst.to_dict())),
                            tolerances=tolerances(eps_context=args.tol))
    result = _run_instance(inst, args)
    report.verdicts["verdict"] = result.pop("verdict")
    report.verdicts["leave_one_out"] = result.pop("leave_one_out")
    report.certificates.update(result)

    # P135 mixes three states that each exclude one outcome of (1,1,1)
    open_inst = FeasibilityInstance(inst.contexts, inst.targets, {}, {"P135": COMPOSITES["P135"]})
    lo, hi = outcome_weight_bounds(open_inst, "P135", (1, 1, 1), args.cap)
    report.verdicts["p135_weight_111"] = [lo, hi]
    bias = compare_biases(fx.product_distribution("P135"), fx.product_distribution("P12"), 0, args.tol)
    report.verdicts["p135_p12_bias_differs"] = bias.different_biases
    model = six_state_ontological_model()
    report.verdicts["preparation_contextual"] = bool(detect_preparation_contextuality(model, tol=args.tol))
    phenomenon, latent = phenomenon_from_model(model, list(fx.composites))
    fact = factorisable_check(phenomenon, latent, args.tol)
    report.verdicts["factorisation"] = fact.verdict
    if fact.statistical_prior is not None:
        report.certificates["statistical_prior"] = fact.statistical_prior
    return report, 0


def cmd_loop(args) -> Tuple[AnalysisReport, int]:
    doc, digest = load_json(args.path)
    b = BoxBehavior.from_dict(doc)
    audit = gleason_constraint_audit(b)
    report = AnalysisReport("loop", digest, tolerances=tolerances(audit=1e-10))
    report.verdicts.update({
        "identity_residual": information_identity_residual(b),
        "mutual_information": audit.mutual_information,
        "unique_everywhere": audit.loop.unique_everywhere,
        "verdict": audit.verdict,
    })
    report.certificates.update(audit.to_dict())
    report.table = (("step", "relation", "lhs", "rhs", "holds"),
                    [(s.name, s.relation, s.lhs, s.rhs, s.holds) for s in audit.steps])
    return report, 0


def cmd_fixtures(args) -> Tuple[AnalysisReport, int]:
    if args.fixtures_cmd == "list":
        report = AnalysisReport("fixtures")
        report.verdicts["fixtures"] = {name: {"kind": f["kind"], "title": f["title"]} for name, f in FIXTURES.items()}
        report.table = (("name", "kind", "title"), [(n, f["kind"], f["title"]) for n, f in FIXTURES.items()])
        return report, 0
    written = {}
    for name in resolve_fixtures(args.names):
        path = os.path.join(args.dir, f"{name}.json")
        text = dumps_json(fixture_document(name))
        write_file_atomic(path, text)
        written[name] = content_digest(text)
    report = AnalysisReport("fixtures", verdicts={"written": sorted(written)}, certificates={"digests": written})
    return report, 0


def _dispatch(args) -> Tuple[AnalysisReport, int]:
    if args.cmd == "validate":
        return cmd_validate(args)
    elif args.cmd == "classify":
        return cmd_classify(args)
    elif args.cmd == "compress":
        return cmd_compress(args)
    elif args.cmd == "graph":
        return cmd_graph(args)
    elif args.cmd == "marble":
        return cmd_marble(args)
    elif args.cmd == "counterfactual":
        return cmd_counterfactual(args)
    elif args.cmd == "loop":
        return cmd_loop(args)
    elif args.cmd == "fixtures":
        return cmd_fixtures(args)
    raise InputError(f"unknown command {args.cmd!r}")


def run(argv: Optional[List[str]] = None) -> int:
    """Parse, run one command and emit its report. Returns the exit code."""
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    start = time.perf_counter()
    try:
        report, code = _dispatch(args)
    except ContextkitError as e:
        print(f"{config.APP_NAME}: error: {e}", file=sys.stderr)
        return e.exit_code
    if args.timing:
        report.wall_time = time.perf_counter() - start
    text = report.render(args.format)
    if args.out:
        write_file_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


def main():
    """Main CLI entry point."""
    sys.exit(run())
