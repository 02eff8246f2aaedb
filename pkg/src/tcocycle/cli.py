"""Command-line entry point.

Exit status: 0 when every requested check passes, 1 for input or validation
failures, 2 when an identity that always holds is found violated.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .catalog import CATALOG, cp1_degree, example_from_string
from .cech import cochain_from_json, cochain_to_json, cup
from .errors import InvalidBundle, InvalidParameters, TCocycleError
from .field import QQ, Field
from .forms import format_form
from .geometry import (
    BundlePresentation,
    bundle_to_json,
    gauge_from_json,
    load_bundle,
    validate_cocycle,
)
from .invariants import (
    chern_character_formal,
    flag_decompose,
    flag_refined,
    gauge_witness,
    line_fast_component,
    refined_first,
    t_component,
    t_invariant,
)
from .matform import determinant


@dataclass
class RunReport:
    command: str
    checks: list = dc_field(default_factory=list)
    outputs: list = dc_field(default_factory=list)
    data: dict = dc_field(default_factory=dict)
    lines: list = dc_field(default_factory=list)
    error: dict | None = None
    status: int = 0

    def check(self, name: str, ok: bool, detail: str = "", failure_status: int = 1):
        self.checks.append({"name": name, "ok": ok, "detail": detail})
        if not ok:
            self.status = max(self.status, failure_status)

    def fail(self, exc: TCocycleError):
        self.error = {"code": exc.code, "message": str(exc)}
        self.status = max(self.status, exc.exit_status)

    def to_json(self) -> dict:
        out = {"command": self.command, "status": self.status, "checks": self.checks, "outputs": self.outputs}
        if self.data:
            out["result"] = self.data
        if self.error:
            out["error"] = self.error
        return out

    def render(self) -> str:
        out = [f"$ {self.command}"]
        out.extend(self.lines)
        for c in self.checks:
            mark = "PASS" if c["ok"] else "FAIL"
            out.append(f"{mark} {c['name']}" + (f": {c['detail']}" if c["detail"] else ""))
        for p in self.outputs:
            out.append(f"wrote {p}")
        if self.error:
            out.append(f"error {self.error['message']}")
        return "\n".join(out)


def _field(text: str | None) -> Field:
    return QQ if text is None else Field.parse(text)


def _read_json(path: str):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidBundle(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidBundle(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def resolve_bundle(arg: str, field: Field = QQ):
    """A bundle file path, or a catalog expression such as ``o_d_cp1(3)``."""
    if Path(arg).is_file():
        return load_bundle(arg)
    head = arg.split("(", 1)[0].strip()
    if head in CATALOG:
        return example_from_string(arg, field), None
    raise InvalidBundle(f"{arg!r} is neither a readable file nor a catalog example")


def _write(report: RunReport, path: str | None, obj: dict):
    if path is None:
        return
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
    report.outputs.append(path)


def _cochain_lines(c) -> list[str]:
    if not c.components:
        return ["(empty cochain)"]
    return [f"{list(t)}: {format_form(w)}" for t, w in sorted(c.components.items())]


# -- commands -----------------------------------------------------------------------------


def cmd_check(args, report: RunReport):
    bundle, gauge = resolve_bundle(args.bundle, _field(args.field))
    report.check("parse", True)
    ok = all(not determinant(m).is_zero() for m in bundle.transitions.values())
    report.check("determinants", ok)
    if bundle.flag:
        report.check("flag", all(m.is_upper_triangular() for m in bundle.transitions.values()))
    cr = validate_cocycle(bundle)
    detail = f"{len(cr.checked)} triples" if cr.valid else "failing " + ", ".join(
        f"{list(f.triple)}" for f in cr.failures
    )
    report.check("cocycle", cr.valid, detail)
    report.data["cocycle"] = cr.to_json()
    if gauge is not None:
        report.check("gauge", True, f"{len(gauge.matrices)} charts")


def cmd_invariant(args, report: RunReport):
    bundle, _ = resolve_bundle(args.bundle, _field(args.field))
    k = args.k
    if args.refined and k == 1 and not args.flag:
        res = refined_first(bundle)
    elif args.refined or args.flag:
        res = flag_refined(bundle, k)
    else:
        res = t_invariant(bundle, k)
    for c in res.checks:
        report.check(c.name, c.ok, c.detail, failure_status=2)
    if not res.refined and k >= 2 and res.dclosed_report:
        closed = sum(res.dclosed_report.values())
        report.lines.append(f"diagnostic: {closed}/{len(res.dclosed_report)} components d-closed (no claim made)")
    if args.fast_path_crosscheck:
        _crosscheck(bundle, k, report)
    report.lines.extend(_cochain_lines(res.cochain))
    report.lines.append(f"normalization {res.normalization_tag}")
    report.data["invariant"] = res.to_json()
    _write(report, args.out, res.to_json())


def _crosscheck(bundle: BundlePresentation, k: int, report: RunReport):
    tuples = bundle.tuples(k + 1)
    if bundle.rank == 1:
        ok = all(line_fast_component(bundle, t) == t_component(bundle, t) for t in tuples)
        report.check("fast_path_line", ok, f"{len(tuples)} tuples", failure_status=2)
    if bundle.flag:
        quotients = flag_decompose(bundle)
        ok = True
        for t in tuples:
            total = None
            for q in quotients:
                c = t_component(q, t)
                total = c if total is None else total + c
            ok = ok and total == t_component(bundle, t)
        report.check("fast_path_flag", ok, f"{len(tuples)} tuples", failure_status=2)
    if bundle.rank != 1 and not bundle.flag:
        report.lines.append("fast-path crosscheck: no fast path applies (rank > 1, no flag)")


def cmd_witness(args, report: RunReport):
    bundle, gauge = resolve_bundle(args.bundle, _field(args.field))
    if args.gauge is not None:
        gauge = gauge_from_json(_read_json(args.gauge), bundle.cover)
    if gauge is None:
        raise InvalidParameters("no gauge given: pass a gauge file or include a gauge block in the bundle file")
    res = gauge_witness(bundle, gauge, args.k)
    report.check("witness_verified", res.verified, "coboundary equals the invariant difference", failure_status=2)
    report.lines.extend(_cochain_lines(res.witness))
    report.data["witness"] = res.to_json()
    _write(report, args.out, res.to_json())


def cmd_cup(args, report: RunReport):
    a = cochain_from_json(_read_json(args.a))
    raw_b = _read_json(args.b)
    if "cover" in raw_b and not a.space.same_as(cochain_from_json(raw_b).space):
        raise InvalidBundle("the two cochains live on different covers")
    b = cochain_from_json(raw_b, a.space)
    c = cup(a, b)
    report.lines.extend(_cochain_lines(c))
    if args.compare:
        other = cochain_from_json(_read_json(args.compare), a.space)
        report.check("equals_compare", c == other, args.compare)
    report.data["cup"] = cochain_to_json(c)
    _write(report, args.out, cochain_to_json(c))


def cmd_degree(args, report: RunReport):
    bundle, _ = resolve_bundle(args.bundle, _field(args.field))
    res = t_invariant(bundle, 1)
    deg = cp1_degree(res)
    report.lines.append(f"degree {deg.value}")
    report.data["degree"] = str(deg.value)


def cmd_chern(args, report: RunReport):
    bundle, _ = resolve_bundle(args.bundle, _field(args.field))
    terms = chern_character_formal(bundle, args.k_max, args.rank_degree_zero)
    for t in terms:
        body = "; ".join(_cochain_lines(t.cochain))
        report.lines.append(f"degree {t.k} [{t.tag}] {body}")
    report.data["terms"] = [t.to_json() for t in terms]


def cmd_suite(args, report: RunReport):
    from .suite import SuiteConfig, run_suite

    cfg = SuiteConfig(
        field=_field(args.field),
        max_k=args.max_k,
        max_rank=args.max_rank,
        seed=args.seed,
        counterexample_dir=args.counterexample_dir,
    )
    rep = run_suite(cfg)
    for prop, s in rep.summary().items():
        detail = f"{s['pass']} pass, {s['fail']} fail, {s['skip']} skip"
        if s["skip"]:
            codes = sorted({o.detail for o in rep.outcomes if o.prop == prop and o.ok is None})
            detail += f" ({', '.join(codes)})"
        report.check(prop, s["fail"] == 0, detail, failure_status=2)
    report.outputs.extend(rep.counterexamples)
    report.data["suite"] = rep.to_json()
    for part, secs in rep.timings.items():
        print(f"{part} {secs:.1f}s", file=sys.stderr)


def cmd_emit(args, report: RunReport):
    bundle = example_from_string(args.example, _field(args.field))
    obj = bundle_to_json(bundle)
    if args.out:
        _write(report, args.out, obj)
    else:
        report.lines.append(json.dumps(obj, indent=2))
    report.data["bundle"] = obj


def cmd_experiment(args, report: RunReport):
    from .experiments import flag_dependence_examples, nonflag_closedness, whitney_examples

    fld = _field(args.field)
    if args.name == "whitney":
        res = whitney_examples(args.k_max, fld)
    elif args.name == "nonflag-closedness":
        res = nonflag_closedness(max(args.k_max, 2), field=fld)
    else:
        res = flag_dependence_examples(fld)
    report.lines.append(json.dumps(res, indent=2))
    report.data["experiment"] = res
    _write(report, args.out, res)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tcocycle", description="T-invariant Cech cocycles of vector bundles.")
    p.add_argument("--json", action="store_true", help="print a machine-readable report")
    sub = p.add_subparsers(dest="command", required=True)

    def bundle_cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("bundle", help="bundle file or catalog expression, e.g. 'o_d_cpn(2,1)'")
        s.add_argument("--field", help="field for catalog expressions: Q or prime:<p>")
        return s

    bundle_cmd("check", "validate a bundle description")

    s = bundle_cmd("invariant", "compute the k-th T-invariant cocycle")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--refined", action="store_true")
    s.add_argument("--flag", action="store_true", help="use the flag-refined route")
    s.add_argument("--fast-path-crosscheck", action="store_true")
    s.add_argument("--out")

    s = bundle_cmd("witness", "build and verify the gauge-change witness")
    s.add_argument("gauge", nargs="?", help="gauge file (defaults to the bundle file's gauge block)")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out")

    s = sub.add_parser("cup", help="cup product of two cochain files")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--compare", help="cochain file the product must equal")
    s.add_argument("--out")

    bundle_cmd("degree", "degree of a line bundle on the projective line")

    s = bundle_cmd("chern", "formal cohomological Chern character")
    s.add_argument("--k-max", type=int, default=2)
    s.add_argument("--rank-degree-zero", action="store_true", help="put the rank, not 1, in degree 0")

    s = sub.add_parser("suite", help="randomised property battery")
    s.add_argument("--field", default="Q")
    s.add_argument("--max-k", type=int, default=3)
    s.add_argument("--max-rank", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--counterexample-dir", default="counterexamples")

    for name in ("emit", "examples"):
        s = sub.add_parser(name, help="write a catalog example as a bundle file")
        s.add_argument("example", help="e.g. 'o_d_cp1(3)' or 'direct_sum([o_d_cp1(2), o_d_cp1(3)])'")
        s.add_argument("--field")
        s.add_argument("--out")

    s = sub.add_parser("experiment", help="exploratory runs on open questions")
    s.add_argument("name", choices=("whitney", "flag-dependence", "nonflag-closedness"))
    s.add_argument("--k-max", type=int, default=2)
    s.add_argument("--field")
    s.add_argument("--out")
    return p


COMMANDS = {
    "check": cmd_check,
    "invariant": cmd_invariant,
    "witness": cmd_witness,
    "cup": cmd_cup,
    "degree": cmd_degree,
    "chern": cmd_chern,
    "suite": cmd_suite,
    "emit": cmd_emit,
    "examples": cmd_emit,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(" ".join(["tcocycle"] + list(sys.argv[1:] if argv is None else argv)))
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, report)
    except TCocycleError as exc:
        report.fail(exc)
    # timing goes to stderr so stdout stays byte-identical across reruns
    print(f"elapsed {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.render())
    return report.status


if __name__ == "__main__":
    sys.exit(main())
