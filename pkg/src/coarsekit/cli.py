"""``coarsekit`` command line.

Every command prints a JSON verification report on stdout. Exit status:
0 when every record passes, 1 on a validation or bound failure, 2 when the
input cannot be read, a decomposition is ambiguous or a size cap is hit.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .actions import (
    QuasiAction,
    coboundedness,
    conjugacy_defect,
    isometry_defect,
    qa_constants,
)
from .config import get_epsilon
from .errors import (
    AmbiguousDecompositionError,
    CapExceededError,
    CoarseKitError,
    InputError,
    StructureError,
)
from .fibrations import fiber_space, fibration_constants, orbit_fibration
from .groups import FiniteGroup, validate_group
from .induction import commutation_failures, induce, induced_product_form, isometrize
from .metric import validate_metric
from .quasimaps import QuasiMap, qi_report, split_product_map
from .report import VerificationReport
from .suites import certificate_trial


def _probe_L(args, path: str | None = None) -> float:
    if args.L is not None:
        return args.L
    if path is not None:
        data = io.read_json(path)
        if isinstance(data, dict) and "L" in data:
            return float(data["L"])
    return 1.0


def _base(path: str) -> Path:
    return Path(path).parent


def cmd_validate(args, eps) -> VerificationReport:
    rep = VerificationReport("validate")
    data = io.read_json(args.file)
    kind = args.kind or io.detect_kind(data)
    base = _base(args.file)
    rep.data["kind"] = kind
    if kind == "space":
        space = io.load_space(data, base)
        bad = validate_metric(space, eps)
        rep.data["violations"] = [str(v) for v in bad]
        rep.data["points"] = len(space)
        rep.data["components"] = len(space.components)
        rep.equal("metric axioms", "generalized metric", len(bad), 0)
    elif kind == "group":
        G = io.load_group(data, base)
        bad = validate_group(G)
        rep.data["violations"] = [str(v) for v in bad]
        rep.data["order"] = len(G)
        rep.equal("group axioms", "finite group", len(bad), 0)
    elif kind == "action":
        rho = io.load_action(data, base)
        bad = validate_group(rho.group) + validate_metric(rho.space, eps)
        rep.data["violations"] = [str(v) for v in bad]
        rep.equal("action inputs", "group and generalized metric", len(bad), 0)
    elif kind == "map":
        phi = io.load_map(data, base)
        bad = validate_metric(phi.domain, eps) + validate_metric(phi.codomain, eps)
        rep.data["violations"] = [str(v) for v in bad]
        rep.equal("map spaces", "generalized metric", len(bad), 0)
    elif kind == "fibration":
        fib = io.load_fibration(data, base)
        bad = validate_metric(fib.total, eps)
        rep.data["violations"] = [str(v) for v in bad]
        rep.data["fibers"] = len(fib)
        rep.equal("fibration space", "generalized metric", len(bad), 0)
    else:
        raise InputError(f"cannot validate a {kind} file on its own")
    return rep


def _qi_dict(r) -> dict:
    return {"L": r.L, "A": r.A, "density": r.density, "embedding_ok": r.embedding_ok}


def cmd_qi(args, eps) -> VerificationReport:
    rep = VerificationReport("qi")
    phi = io.load_map(args.map, ".")
    r = qi_report(phi, _probe_L(args))
    rep.data["report"] = _qi_dict(r)
    rep.at_most("additive constant finite", "quasi-isometric embedding", r.A, np.inf)
    rep.equal("embedding", "finite constants", float(r.embedding_ok), 1.0)
    rep.at_most("coarse density finite", "coarse surjectivity", r.density, float("inf"))
    rep.records[-1].passed = bool(np.isfinite(r.density))
    return rep


def _qa_dict(r) -> dict:
    return {"L": r.L, "A": r.A, "action_defect": r.action_defect,
            "identity_defect": r.identity_defect, "A_qa": r.A_qa, "density": r.density,
            "embedding_ok": r.embedding_ok}


def cmd_qa(args, eps) -> VerificationReport:
    rep = VerificationReport("qa")
    rho = io.load_action(args.action, ".")
    r = qa_constants(rho, _probe_L(args, args.action))
    rep.data["report"] = _qa_dict(r)
    rep.data["isometry_defect"] = isometry_defect(rho)
    cob = coboundedness(rho)
    rep.data["coboundedness"] = {"C": cob.C, "base": io._plain(cob.base)}
    rep.equal("quasi-action constants finite", "quasi-action", float(np.isfinite(r.A_qa)), 1.0)
    return rep


def cmd_fibration(args, eps) -> VerificationReport:
    rep = VerificationReport("fibration")
    data = io.read_json(args.file)
    kind = io.detect_kind(data)
    L = _probe_L(args, args.file)
    if kind == "action":
        rho = io.load_action(data, _base(args.file))
        orb = orbit_fibration(rho, L, eps, check=False)
        rep.data["fibers"] = [[io._plain(p) for p in F.ids] for F in orb.fibration.fibers]
        rep.data["action"] = _qa_dict(orb.action_report)
        r = orb.report
        rep.at_most("quasi-orbit fibration", "orbit-fibration 3A", r.A, 3 * orb.action_report.A_qa, eps)
        fib = orb.fibration
    else:
        fib = io.load_fibration(data, _base(args.file))
        r = fibration_constants(fib.total, fib.fibers, L)
        rep.equal("fibration constants finite", "coarse fibration", float(np.isfinite(r.A)), 1.0)
    rep.data["report"] = {"L": r.L, "A1": r.A1, "A2": r.A2, "A": r.A}
    fs = fiber_space(fib, eps)
    rep.data["base_points"] = len(fs.base)
    rep.data["base_components"] = len(fs.base.components)
    return rep


def _bundle_records(rep: VerificationReport, bundle, eps: float, tau: float | None) -> None:
    A = bundle.alpha_report.A_qa
    orb = bundle.orbits
    rep.data["alpha"] = _qa_dict(bundle.alpha_report)
    rep.at_most("quasi-orbit fibration", "orbit-fibration 3A", orb.report.A,
                3 * orb.action_report.A_qa, eps)
    rep.equal("left translation isometric", "isometric action", isometry_defect(bundle.leftG), 0.0)
    rep.equal("exact commutation", "commutes with rho_H", commutation_failures(bundle), 0)
    rep.equal("induced action isometric", "isometry_defect = 0",
              isometry_defect(bundle.beta_hat), 0.0)
    margin = max(e.report.A - e.bound for e in bundle.beta.element_maps)
    rep.at_most("descent of left translation", "descent A+2C", margin, 0.0, eps)
    comps = bundle.base.base.components
    rep.equal("components = index", "components = [G:H]", len(comps), len(bundle.cosets))
    w = bundle.restriction_witness
    rep.at_most("restriction conjugacy defect", "restriction 3A", w.defect, 3 * A, eps)
    rep.at_most("restriction carrier constant", "restriction carrier 3A",
                w.carrier_report.A, 3 * A, eps)
    table = []
    for c, i in enumerate(bundle.coset_map.component_to_coset):
        table.append({"component": c, "coset": [io._plain(g) for g in bundle.cosets.ids(i)],
                      "base_points": len(comps.blocks[c])})
    rep.data["component_coset_table"] = table
    rep.data["witness"] = {"defect": w.defect, "carrier": _qi_dict(w.carrier_report)}
    try:
        pf = induced_product_form(bundle, tau)
    except CapExceededError as exc:
        rep.data["product_form"] = f"skipped: {exc}"
        return
    mismatches = int((pf.permutation.sigma != bundle.coset_perm).sum())
    rep.equal("factor permutation = coset action", "left multiplication on G/H", mismatches, 0)
    worst = max(r.A for r in pf.carrier_reports)
    rep.at_most("factor carriers", "factor carrier 3A", worst, 3 * A, eps)
    rep.data["product_form"] = {"points": len(pf.space), "factors": len(pf.space.factors),
                                "tau": pf.tau}


def _write_outputs(out: str, bundle, action) -> None:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    io.write_json(d / "base_space.json", io.space_to_json(action.space))
    io.write_json(d / "group.json", io.group_to_json(action.group))
    io.write_json(d / "induced_action.json",
                  io.action_to_json(action, "group.json", "base_space.json"))


def cmd_induce(args, eps) -> VerificationReport:
    rep = VerificationReport("induce")
    G = io.load_group(args.group, ".")
    H = io.load_subgroup(args.subgroup, G, ".")
    alpha = io.load_action(args.action, ".")
    # the action file may carry its own copy of H; re-key it onto G's element ids
    find = io._key_lookup(G.elements, "element")
    relabeled = FiniteGroup([G.elements[find(g)] for g in alpha.group.elements],
                            alpha.group.table, G.elements[find(alpha.group.identity)])
    alpha = QuasiAction(relabeled, alpha.space, alpha.images)
    bundle = induce(G, H, alpha, _probe_L(args, args.action), eps, args.cap)
    rep.data["bundle_points"] = len(bundle.Y)
    rep.data["base_points"] = len(bundle.base.base)
    _bundle_records(rep, bundle, eps, args.tau)
    if args.out:
        _write_outputs(args.out, bundle, bundle.beta_hat)
    return rep


def cmd_isometrize(args, eps) -> VerificationReport:
    rep = VerificationReport("isometrize")
    rho = io.load_action(args.action, ".")
    res = isometrize(rho, _probe_L(args, args.action), eps, args.cap)
    A = res.input_report.A_qa
    w = res.witness
    rep.data["input"] = _qa_dict(res.input_report)
    rep.data["base_points"] = len(res.space)
    rep.data["carrier"] = _qi_dict(w.carrier_report)
    rep.data["witness_defect"] = w.defect
    rep.equal("output action isometric", "isometry_defect = 0", isometry_defect(res.action), 0.0)
    rep.at_most("carrier additive constant", "carrier A ≤ 3A", w.carrier_report.A, 3 * A, eps)
    rep.at_most("conjugacy defect", "isometrize 3A", w.defect, 3 * A, eps)
    rep.at_most("carrier density", "orbit carrier density A", w.carrier_report.density, A, eps)
    if args.out:
        _write_outputs(args.out, res.bundle, res.action)
    return rep


def cmd_split(args, eps) -> VerificationReport:
    rep = VerificationReport("split")
    phi = io.load_map(args.map, ".")
    if phi.domain.factors is None or phi.codomain.factors is None:
        raise InputError("split needs a map between product spaces")
    base = None
    if args.basepoints:
        base = []
        for f, b in zip(phi.domain.factors, args.basepoints):
            base.append(f.points[io._key_lookup(f.points, "point")(b)])
    tau = args.tau
    if tau is None:
        tau = min(float(f.dist.max()) for f in phi.domain.factors) / 10 or 1.0
    d = split_product_map(phi, base, tau)
    rep.data["sigma"] = list(d.sigma)
    rep.data["tau"] = tau
    rep.data["factor_maps"] = [
        {io._plain(k): io._plain(v) for k, v in m.as_dict().items()} for m in d.factor_maps
    ]
    rep.data["defect"] = d.defect
    rep.equal("defect finite", "product form up to bounded error",
              float(np.isfinite(d.defect)), 1.0)
    return rep


def cmd_conjugacy(args, eps) -> VerificationReport:
    rep = VerificationReport("conjugacy")
    rho = io.load_action(args.source, ".")
    other = io.load_action(args.target, ".")
    f = io.load_map(args.carrier, ".")
    # reuse the action spaces so the carrier's spaces compare equal
    f = QuasiMap(rho.space, other.space, [
        other.space.index(f.codomain.points[q]) for q in
        f.assignment[[f.domain.index(p) for p in rho.space.points]]
    ])
    w = conjugacy_defect(rho, other, f, _probe_L(args))
    rep.data["defect"] = w.defect
    rep.data["carrier"] = _qi_dict(w.carrier_report)
    rep.equal("defect finite", "quasi-conjugacy", float(np.isfinite(w.defect)), 1.0)
    rep.equal("carrier is a quasi-isometry", "quasi-conjugacy",
              float(w.carrier_report.is_quasi_isometry), 1.0)
    return rep


def cmd_random_suite(args, eps) -> VerificationReport:
    rep = VerificationReport("random-suite")
    fib_worst, desc_worst = -np.inf, -np.inf
    failures = []
    for t in range(args.trials):
        r = certificate_trial(args.seed, t, args.max_size, eps)
        fm = r.fibration_A - r.fibration_bound
        dm = r.descent_A - r.descent_bound
        fib_worst, desc_worst = max(fib_worst, fm), max(desc_worst, dm)
        if fm > eps or dm > eps:
            failures.append({"seed": args.seed, "trial": t, "group": r.group, "size": r.size,
                             "radius": r.radius, "L": r.L, "fibration_margin": fm,
                             "descent_margin": dm})
        if args.emit:
            io.write_action_files(r.action, Path(args.emit) / f"trial_{t:04d}", r.L)
    rep.at_most("quasi-orbit fibrations", "orbit-fibration 3A", fib_worst, 0.0, eps)
    rep.at_most("descended element maps", "descent A+2C", desc_worst, 0.0, eps)
    rep.data.update({"seed": args.seed, "trials": args.trials, "failures": failures})
    return rep


COMMANDS = {
    "validate": cmd_validate,
    "qi": cmd_qi,
    "qa": cmd_qa,
    "fibration": cmd_fibration,
    "induce": cmd_induce,
    "isometrize": cmd_isometrize,
    "split": cmd_split,
    "conjugacy": cmd_conjugacy,
    "random-suite": cmd_random_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--L", type=float, default=None, help="multiplicative constant (>= 1)")
    common.add_argument("--epsilon", type=float, default=None,
                        help="tolerance (default $COARSEKIT_EPSILON or 1e-9)")
    common.add_argument("--cap", type=int, default=None,
                        help="point cap (default $COARSEKIT_MAX_POINTS or 20000)")

    parser = argparse.ArgumentParser(prog="coarsekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a space/group/action file")
    p.add_argument("file")
    p.add_argument("--kind", choices=["space", "group", "action", "map", "fibration"])

    p = sub.add_parser("qi", parents=[common], help="quasi-isometry constants of a map")
    p.add_argument("map")

    p = sub.add_parser("qa", parents=[common], help="quasi-action constants")
    p.add_argument("action")

    p = sub.add_parser("fibration", parents=[common],
                       help="coarse fibration constants (fibration file, or an action's orbits)")
    p.add_argument("file")

    p = sub.add_parser("induce", parents=[common], help="induce a quasi-action from H to G")
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--out", default=None, help="directory for the induced action files")

    p = sub.add_parser("isometrize", parents=[common], help="canonical isometric action")
    p.add_argument("action")
    p.add_argument("--out", default=None)

    p = sub.add_parser("split", parents=[common], help="factor permutation of a product map")
    p.add_argument("map")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--basepoints", nargs="*", default=None)

    p = sub.add_parser("conjugacy", parents=[common], help="conjugacy defect of a carrier map")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--carrier", required=True)

    p = sub.add_parser("random-suite", parents=[common], help="randomized certificate checks")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-size", type=int, default=30)
    p.add_argument("--emit", default=None, help="directory to write every trial's action files")
    return parser


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    if args.L is not None and args.L < 1:
        return {"status": "error", "error": "L must be >= 1"}, 2
    if args.epsilon is not None and args.epsilon <= 0:
        return {"status": "error", "error": "epsilon must be positive"}, 2
    if getattr(args, "tau", None) is not None and args.tau <= 0:
        return {"status": "error", "error": "tau must be positive"}, 2
    eps = get_epsilon(args.epsilon)
    saved = os.environ.get("COARSEKIT_MAX_POINTS")
    if args.cap is not None:
        os.environ["COARSEKIT_MAX_POINTS"] = str(args.cap)
    try:
        rep = COMMANDS[args.command](args, eps)
    except (InputError, StructureError, AmbiguousDecompositionError, CapExceededError) as exc:
        return {"command": args.command, "status": "error",
                "error": f"{type(exc).__name__}: {exc}"}, 2
    except CoarseKitError as exc:
        return {"command": args.command, "status": "fail",
                "error": f"{type(exc).__name__}: {exc}"}, 1
    finally:
        # the cap is per invocation; callers of run() keep their own setting
        if saved is None:
            os.environ.pop("COARSEKIT_MAX_POINTS", None)
        else:
            os.environ["COARSEKIT_MAX_POINTS"] = saved
    return rep.to_dict(), 0 if rep.passed else 1


def main(argv: list[str] | None = None) -> int:
    doc, code = run(argv)
    sys.stdout.write(io.dumps(doc) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
