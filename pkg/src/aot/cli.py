"""Command line front end: ``aot <subcommand> ...``.

Exit codes: 0 success / valid / found, 1 invalid / not found / check failed,
2 usage or budget errors.  Errors are reported as one line
``error: <kind>: <message>`` (or a json object with ``--format json``).
"""

from __future__ import annotations

import argparse
import json
import sys

from aot import kernel as kn
from aot import model as md
from aot import paradox as px
from aot import semantics as se
from aot import syntax as sx

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return v


def _budgets(args) -> dict:
    return {"budget_properties": args.budget_properties, "budget_objects": args.budget_objects}


def load_model(args, default: str | None = "m0") -> md.AczelModel:
    spec = args.model or default
    if args.size is not None:
        if args.model:
            raise UsageError("give either --model or --size, not both")
        try:
            o, s, st, w = (int(v) for v in args.size.split(","))
        except ValueError:
            raise UsageError("--size wants ordinary,special,states,worlds") from None
        return md.build_model(o, s, st, w, **_budgets(args))
    if spec is None:
        raise UsageError("a model is required (--model PATH|m0|m1 or --size o,s,st,w)")
    if spec in ("m0", "M0"):
        return md.m0(**_budgets(args))
    if spec in ("m1", "M1"):
        return md.m1(**_budgets(args))
    try:
        return md.load_model_spec(spec, **_budgets(args))
    except OSError as e:
        raise UsageError(f"cannot read model spec {spec}: {e.strerror}") from None


def read_input(args) -> str:
    if args.text is not None and args.file is not None:
        raise UsageError("give the formula either inline or with --file, not both")
    if args.file is not None:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as e:
            raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    if args.text is None:
        raise UsageError("no formula given")
    return args.text


def parse_lets(m, lets) -> dict:
    asg = {}
    for item in lets or ():
        if "=" not in item:
            raise UsageError(f"--let wants name=value, got {item!r}")
        name, value = (s.strip() for s in item.split("=", 1))
        var = kn.as_term(name)
        if isinstance(var, sx.RelVar) and value[:1] == "p":
            var = sx.RelVar(name, 0)
        elif isinstance(var, sx.RelVar) and value[:1] == "R":
            var = sx.RelVar(name, 2)
        asg[var] = se.parse_value(value)
    return asg


def _bind_lets(f, asg: dict) -> dict:
    """Match --let names to the sorts they have in the formula."""
    free = {v.name: v for v in sx.free_vars(f)}
    out = {}
    for var, val in asg.items():
        out[free.get(var.name, var)] = val
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, payload dict, text)
# ---------------------------------------------------------------------------


def cmd_parse(args):
    node = sx.parse(read_input(args))
    kind = "formula" if sx.is_formula(node) else "term"
    fv = sorted(v.name for v in sx.free_vars(node))
    printed = sx.print_ast(node)
    return EXIT_OK, {"kind": kind, "printed": printed, "free": fv}, f"{kind}: {printed}\nfree: {' '.join(fv) or '-'}"


def cmd_classify(args):
    node = sx.parse(read_input(args))
    matrix = node.body if isinstance(node, sx.Lambda) else node
    if not sx.is_formula(matrix):
        raise UsageError("classify wants a formula or a lambda term")
    ok = sx.classify_propositional(matrix, args.mode)
    verdict = "propositional" if ok else "not propositional"
    return (EXIT_OK if ok else EXIT_FAIL), {"mode": args.mode, "propositional": ok}, f"{verdict} ({args.mode})"


def cmd_eval(args):
    m = load_model(args)
    node = sx.parse(read_input(args))
    asg = _bind_lets(node, parse_lets(m, args.let))
    if sx.is_formula(node):
        rep = se.evaluation_report(m, node, asg)
        text = "\n".join(f"{k}: {v}" for k, v in rep.items())
        return EXIT_OK, rep, text
    ev = se.Evaluator(m)
    ev.bind(asg)
    if sx.is_ind_term(node):
        d = ev.den_ind(node)
        value = "improper" if d is None else str(m.ind_of_code(d))
    else:
        value = f"P{ev.den_rel(node)}"
    return EXIT_OK, {"term": sx.print_ast(node), "denotation": value}, f"denotation: {value}"


def cmd_valid(args):
    m = load_model(args)
    f = sx.parse_formula(read_input(args))
    asg = _bind_lets(f, parse_lets(m, args.let))
    if asg:
        ok = se.valid(m, f, asg)
        cm = None
    else:
        cm = se.falsifying_assignment(m, f)
        ok = cm is None
    payload = {"model": m.describe(), "formula": sx.print_ast(f), "valid": ok}
    text = f"{'valid' if ok else 'not valid'} in {m.config}"
    if cm is not None:
        payload["countermodel"] = cm.describe()
        text += "\n" + _cm_text(cm)
    return (EXIT_OK if ok else EXIT_FAIL), payload, text


def cmd_countermodel(args):
    f = sx.parse_formula(read_input(args))
    cm = se.countermodel_search(
        f, max_ordinary=args.max_ordinary, max_special=args.max_special, max_states=args.max_states,
        max_worlds=args.max_worlds, vary_state_interp=args.vary_state_interp,
        budget_objects=args.budget_objects)
    if cm is None:
        return EXIT_FAIL, {"formula": sx.print_ast(f), "found": False}, "no countermodel within bounds"
    return EXIT_OK, {"formula": sx.print_ast(f), "found": True, "countermodel": cm.describe()}, _cm_text(cm)


def _cm_text(cm) -> str:
    d = cm.describe()
    model = ", ".join(f"{k}={v}" for k, v in d["model"].items())
    asg = " ".join(f"{k}={v}" for k, v in d["assignment"].items()) or "-"
    return f"countermodel: {model}\nassignment: {asg}\nfalse at: s0, w{d['world']}"


def cmd_comprehend(args):
    m = load_model(args)
    f = sx.parse_formula(read_input(args))
    asg = _bind_lets(f, parse_lets(m, args.let))
    F = next((v for v in sx.free_vars(f) if isinstance(v, sx.RelVar) and v.name == args.var), sx.RelVar(args.var, 1))
    ev = se.Evaluator(m)
    ev.bind(asg)

    def cond(p):
        ev.env[F] = p.bits
        return bool(ev.eval(f) & 1)

    a = m.comprehension_witness(cond)
    props = [f"P{p.bits}" for p in a.properties()]
    text = f"witness: {a}\nencodes: {' '.join(props) or '-'}"
    return EXIT_OK, {"model": m.describe(), "witness": str(a), "encodes": props}, text


def cmd_axioms(args):
    if args.model or args.size:
        models = [load_model(args)]
    else:
        models = [md.m0(**_budgets(args)), md.m1(**_budgets(args))]
    rows, ok = [], True
    for label, t, heavy in kn.catalog_samples():
        for m in models:
            if heavy and m.n_special and m.n_abstract > args.heavy_limit:
                rows.append({"axiom": label, "model": list(m.config), "valid": None})
                continue
            v = se.valid(m, t.formula)
            ok &= v
            rows.append({"axiom": label, "model": list(m.config), "valid": v})
    lines = [f"{'skip' if r['valid'] is None else ('ok  ' if r['valid'] else 'FAIL')} {tuple(r['model'])} {r['axiom']}"
             for r in rows]
    return (EXIT_OK if ok else EXIT_FAIL), {"results": rows, "all_valid": ok}, "\n".join(lines)


def cmd_barcan(args):
    t = kn.derive_barcan_diamond()
    models = [load_model(args)] if (args.model or args.size) else [md.m1(**_budgets(args))]
    audit = kn.soundness_audit(t, models)
    payload = {"theorem": sx.print_ast(t.formula), "trace": t.trace.serialize().splitlines(),
               "audit": {"passed": [list(c) for c in audit.passed], "failed": [list(c) for c in audit.failures]}}
    text = t.trace.serialize() + f"audit: {len(audit.passed)} passed, {len(audit.failures)} failed"
    return (EXIT_OK if audit.ok else EXIT_FAIL), payload, text


def cmd_paradox(args):
    if args.route == "syntactic":
        rep = px.run_clark_boolos_syntactic(enable_unsound_beta=args.enable_unsound_beta)
    else:
        if args.enable_unsound_beta:
            raise UsageError("--enable-unsound-beta only applies to --route syntactic")
        rep = px.run_clark_boolos_semantic(load_model(args))
    return EXIT_OK, rep.to_dict(), rep.to_text().rstrip("\n")


def cmd_prove_taut(args):
    f = sx.parse_formula(read_input(args))
    try:
        t = kn.taut_prove(f)
    except kn.NotATautology as e:
        return EXIT_FAIL, {"formula": sx.print_ast(f), "tautology": False, "valuation": e.valuation}, str(e)
    return EXIT_OK, {"formula": sx.print_ast(f), "tautology": True, "trace": t.trace.serialize().splitlines()}, \
        t.trace.serialize().rstrip("\n")


def cmd_check_trace(args):
    path = args.text if args.file is None else args.file
    if path is None:
        raise UsageError("check-trace wants a trace file")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    ext = px.naive_beta_extension(True) if args.enable_unsound_beta else None
    try:
        trace = kn.ProofTrace.parse(text)
        out = kn.replay(trace, ext)
    except kn.KernelError as e:
        return EXIT_FAIL, {"ok": False, "reason": str(e)}, f"trace rejected: {e}"
    last = out[-1] if isinstance(out, list) else out.formula
    payload = {"ok": True, "steps": len(trace), "conclusion": sx.print_ast(last), "theorem": ext is None}
    return EXIT_OK, payload, f"trace ok: {len(trace)} steps, concludes {sx.print_ast(last)}"


COMMANDS = {
    "parse": cmd_parse, "classify": cmd_classify, "eval": cmd_eval, "valid": cmd_valid,
    "countermodel": cmd_countermodel, "comprehend": cmd_comprehend, "axioms": cmd_axioms, "barcan": cmd_barcan,
    "paradox": cmd_paradox, "prove-taut": cmd_prove_taut, "check-trace": cmd_check_trace,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget-properties", type=_positive, default=2**16)
    common.add_argument("--budget-objects", type=_positive, default=2**20)

    model = _Parser(add_help=False)
    model.add_argument("--model", help="model spec file, or m0 / m1")
    model.add_argument("--size", help="inline model size: ordinary,special,states,worlds")

    text = _Parser(add_help=False)
    text.add_argument("text", nargs="?", help="formula or term")
    text.add_argument("--file", help="read the input from a file")

    lets = _Parser(add_help=False)
    lets.add_argument("--let", action="append", metavar="NAME=VALUE",
                      help="assign a free variable (values like o0, a5, P2, p1, R9)")

    p = _Parser(prog="aot", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub.add_parser("parse", parents=[common, text])
    c = sub.add_parser("classify", parents=[common, text])
    c.add_argument("--mode", choices=("legacy", "strict"), default="strict")
    sub.add_parser("eval", parents=[common, model, text, lets])
    sub.add_parser("valid", parents=[common, model, text, lets])
    c = sub.add_parser("countermodel", parents=[common, text])
    for k in ("ordinary", "special", "states", "worlds"):
        c.add_argument(f"--max-{k}", type=int, default=1)
    c.add_argument("--vary-state-interp", action="store_true")
    c = sub.add_parser("comprehend", parents=[common, model, text, lets])
    c.add_argument("--var", default="F", help="the property variable of the condition")
    c = sub.add_parser("axioms", parents=[common, model])
    c.add_argument("--heavy-limit", type=int, default=256,
                   help="skip heavy instances in models with more abstract objects")
    sub.add_parser("barcan", parents=[common, model])
    c = sub.add_parser("paradox", parents=[common, model])
    c.add_argument("--route", choices=("syntactic", "semantic"), default="syntactic")
    c.add_argument("--enable-unsound-beta", action="store_true")
    sub.add_parser("prove-taut", parents=[common, text])
    c = sub.add_parser("check-trace", parents=[common, text])
    c.add_argument("--enable-unsound-beta", action="store_true")
    return p


def _error_kind(e) -> tuple[str, int]:
    if isinstance(e, UsageError):
        return "usage", EXIT_USAGE
    if isinstance(e, md.BudgetExceeded):
        return "budget", EXIT_USAGE
    if isinstance(e, sx.SyntaxErr):
        return "syntax", EXIT_USAGE
    if isinstance(e, kn.GateError):
        return "gate", EXIT_USAGE
    if isinstance(e, (md.ModelError, se.EvalError)):
        return "model", EXIT_USAGE
    if isinstance(e, (kn.KernelError, px.ParadoxError)):
        return "check", EXIT_FAIL
    return "error", EXIT_USAGE


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    fmt = "json" if "--format=json" in argv or ("--format" in argv and "json" in argv) else "text"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        code, payload, text = COMMANDS[args.cmd](args)
    except (UsageError, md.ModelError, se.EvalError, sx.SyntaxErr, kn.KernelError, px.ParadoxError,
            sx.UnsupportedArity) as e:
        kind, code = _error_kind(e)
        reason = " ".join(str(e).split())
        if fmt == "json":
            print(json.dumps({"ok": False, "error": {"kind": kind, "message": reason}}, sort_keys=True))
        else:
            print(f"error: {kind}: {reason}", file=sys.stderr)
        return code
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, indent=2, default=str))
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
