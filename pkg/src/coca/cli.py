"""Command-line front end: one query per process, machine-readable output.

Exit codes: 0 for a completed computation (``unreachable`` is a successful
answer), 2 for usage errors, 3 for model errors (bad file, unknown state,
wrong automaton type), 4 for solver errors and undecided solver runs,
5 for internal invariant violations.

With ``--json`` every command prints a single JSON object with the fixed
keys ``query``, ``result``, ``representation``, ``witness``; the content
of ``representation`` is command-specific.  Without it, output is plain
text, one answer per line.  ``--trace`` (guarded commands only) prefixes
the answer with line-oriented engine events; those lines are for humans
and not part of the stability contract.
"""

import argparse
import json
import sys

from .analysis import eq_reach, post_repr
from .encoding import (
    SolveResult,
    build_sentence,
    emit_smtlib,
    encode_acyclic,
    solve,
)
from .errors import (
    CocaError,
    EncodingError,
    EngineError,
    ModelError,
    SolverError,
)
from .gadgets import gen_sat_gadget, parse_dimacs
from .guarded import ReachMap, compute_reach, succ_pow
from .intervals import format_interval, format_interval_set, iv_intersect, point
from .model import (
    Coca,
    EqCoca,
    GuardedCoca,
    ParamInterval,
    ParametricCoca,
    load_model,
    serialize_model,
)
from .oracle import enum_post_bounded, random_guarded, random_plain, sample_runs
from .rational import rat


def _rat_arg(text):
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r} ({exc})")


def _load(path):
    try:
        return load_model(path)
    except OSError as exc:
        raise ModelError(f"cannot read model file: {exc}") from None


def _want_plain(m) -> Coca:
    if isinstance(m, Coca):
        return m
    raise ModelError(
        f"this command takes a global-guard model (type 'coca'), got {type(m).__name__}"
    )


def _want_guarded(m) -> GuardedCoca:
    if isinstance(m, GuardedCoca):
        return m
    if isinstance(m, Coca):
        return m.as_guarded()
    raise ModelError(
        f"this command takes a guarded model, got {type(m).__name__}"
    )


def _want_eq(m) -> EqCoca:
    if isinstance(m, EqCoca):
        return m
    if isinstance(m, Coca):
        return EqCoca(m.states, m.transitions, m.global_guard, ())
    raise ModelError(
        f"this command takes an equality-test model (type 'eq'), got {type(m).__name__}"
    )


def _want_parametric(m) -> ParametricCoca:
    if isinstance(m, ParametricCoca):
        return m
    if isinstance(m, Coca):
        m = m.as_guarded()
    if isinstance(m, GuardedCoca):
        guards = tuple(
            ParamInterval(g.lo, g.hi, g.lo_closed, g.hi_closed) for g in m.guards
        )
        return ParametricCoca(m.states, m.transitions, guards, ())
    raise ModelError(
        f"this command takes a parametric model, got {type(m).__name__}"
    )


def _answer(args, query, result, representation=None, witness=None):
    if args.json:
        doc = {
            "query": query,
            "result": result,
            "representation": representation,
            "witness": witness,
        }
        print(json.dumps(doc))
    elif isinstance(result, dict):
        for k, v in result.items():
            print(f"{k}: {v}")
    else:
        print(result)


def _trace_printer():
    def emit(ev):
        kind = ev.get("event")
        if kind == "succ":
            changed = ",".join(
                f"{q}:{n}" for q, n in sorted(ev["changed"].items())
            )
            print(f"trace succ iter={ev['iteration']} changed={changed or '-'}")
        elif kind == "stabilized":
            print(f"trace stabilized iter={ev['iteration']}")
        elif kind == "found":
            c = ev["cycle"]
            sign = "+" if c.sign > 0 else "-"
            print(
                f"trace cycle iter={ev['iteration']} anchor={ev['anchor']}"
                f" state={c.configs[0][0]} sign={sign} len={len(c)}"
            )
        elif kind == "acc":
            states = ",".join(sorted(ev["map"].states()))
            print(f"trace acc count={ev['count']} states={states}")

    return emit


# -- command handlers ---------------------------------------------------------


def _cmd_reach(args):
    m = _want_plain(_load(args.file))
    rp = post_repr(m, args.value, args.frm, args.to)
    ok = rp.contains(args.target)
    query = {
        "command": "reach",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
        "target": str(args.target),
    }
    rep = {
        "closure": format_interval(rp.closure),
        "excluded": [str(x) for x in sorted(rp.excluded)],
        "reachable": ok,
    }
    _answer(args, query, "reachable" if ok else "unreachable", rep)
    return 0


def _cmd_post(args):
    m = _want_plain(_load(args.file))
    rp = post_repr(m, args.value, args.frm, args.to)
    query = {
        "command": "post",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
    }
    rep = {
        "closure": format_interval(rp.closure),
        "excluded": [str(x) for x in sorted(rp.excluded)],
    }
    if args.json:
        _answer(args, query, format_interval_set(rp.to_interval_set()), rep)
    else:
        print(format_interval_set(rp.to_interval_set()))
        print(f"closure: {rep['closure']}")
        print(f"excluded: {{{', '.join(rep['excluded'])}}}")
    return 0


def _cmd_greach(args):
    w = _want_guarded(_load(args.file))
    w.tau(args.to)
    trace = _trace_printer() if args.trace else None
    rm = compute_reach(w, args.frm, args.value, trace=trace)
    ok = rm.get(args.to).contains(args.target)
    query = {
        "command": "greach",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
        "target": str(args.target),
    }
    rep = format_interval_set(rm.get(args.to))
    _answer(args, query, "reachable" if ok else "unreachable", rep)
    return 0


def _cmd_gpost(args):
    w = _want_guarded(_load(args.file))
    if args.to is not None:
        w.tau(args.to)
    trace = _trace_printer() if args.trace else None
    rm = compute_reach(w, args.frm, args.value, trace=trace)
    query = {
        "command": "gpost",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
    }
    if args.to is not None:
        _answer(args, query, format_interval_set(rm.get(args.to)))
    else:
        table = {
            q: format_interval_set(rm.get(q))
            for q in w.states
            if not rm.get(q).is_empty()
        }
        _answer(args, query, table)
    return 0


def _cmd_eqreach(args):
    m = _want_eq(_load(args.file))
    ok = eq_reach(m, args.frm, args.value, args.to, args.target)
    query = {
        "command": "eqreach",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
        "target": str(args.target),
    }
    _answer(args, query, "reachable" if ok else "unreachable")
    return 0


def _encode_sentence(args):
    pc = _want_parametric(_load(args.file))
    frm = (args.frm, args.value)
    to = (args.to, args.target)
    if args.acyclic:
        return encode_acyclic(pc, frm, to)
    return build_sentence(pc, frm, to)


def _cmd_encode(args):
    sent = _encode_sentence(args)
    script = emit_smtlib(sent)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(script)
    query = {
        "command": "encode",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
        "target": str(args.target),
        "acyclic": bool(args.acyclic),
    }
    rep = {
        "exist_vars": len(sent.exist_vars),
        "forall_vars": len(sent.forall_vars),
        "output": args.output,
    }
    if args.json:
        if not args.output:
            rep["smtlib"] = script
        _answer(args, query, "encoded", rep)
    elif args.output:
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(script)
    return 0


def _cmd_solve(args):
    sent = _encode_sentence(args)
    res = solve(sent, args.solver, timeout_s=args.timeout)
    query = {
        "command": "solve",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "to": args.to,
        "target": str(args.target),
        "acyclic": bool(args.acyclic),
    }
    rep = {"solver": args.solver, "timeout": args.timeout}
    _answer(args, query, res.value, rep)
    return 0 if res is not SolveResult.UNKNOWN else 4


def _cmd_gen_sat(args):
    try:
        with open(args.cnf) as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read CNF file: {exc}") from None
    num_vars, clauses = parse_dimacs(text)
    if args.num_vars is not None:
        num_vars = args.num_vars
    pc, (fp, fa), (tq, tb) = gen_sat_gadget(clauses, args.variant, num_vars)
    doc = serialize_model(pc)
    doc["query"] = {
        "from": fp,
        "value": str(fa),
        "to": tq,
        "target": str(tb),
    }
    blob = json.dumps(doc, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(blob)
    query = {
        "command": "gen-sat",
        "cnf": args.cnf,
        "variant": args.variant,
    }
    rep = {
        "num_vars": len(pc.params),
        "clauses": len(clauses),
        "states": len(pc.states),
        "transitions": len(pc.transitions),
        "params": list(pc.params),
        "from": fp,
        "to": tq,
        "output": args.output,
    }
    if args.json:
        if not args.output:
            rep["model"] = doc
        _answer(args, query, "ok", rep)
    elif args.output:
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(blob)
    return 0


def _oracle_check_model(args):
    if args.frm is None or args.value is None:
        print("error: --from and --value are required with --file", file=sys.stderr)
        return 2
    w = _want_guarded(_load(args.file))
    r0 = ReachMap({args.frm: iv_intersect(point(args.value), w.tau(args.frm))})
    bad = None
    depths = 0
    for k in range(1, args.depth + 1):
        if succ_pow(w, r0, k) != enum_post_bounded(w, args.frm, args.value, k):
            bad = {"kind": "succ_pow", "depth": k}
            break
        depths += 1
    configs = []
    if bad is None:
        full = compute_reach(w, args.frm, args.value)
        configs = sample_runs(
            w, args.frm, args.value, args.depth, args.trials, args.seed
        )
        for s, v in configs:
            if not full.get(s).contains(v):
                bad = {"kind": "sample", "state": s, "value": str(v)}
                break
    query = {
        "command": "oracle-check",
        "file": args.file,
        "from": args.frm,
        "value": str(args.value),
        "depth": args.depth,
        "trials": args.trials,
        "seed": args.seed,
    }
    rep = {"depths_checked": depths, "sampled_configs": len(configs)}
    if bad is not None:
        _answer(args, query, "mismatch", rep, bad)
        return 5
    _answer(
        args,
        query,
        f"ok: depths 1..{args.depth} agree, {len(configs)} sampled configs contained",
        rep,
    )
    return 0


def _cmd_oracle_check(args):
    if args.file is not None:
        return _oracle_check_model(args)
    instances = 0
    queries = 0
    bad = None
    for s in range(args.seed, args.seed + args.trials):
        w = random_guarded(s)
        p = w.states[0]
        a = rat(s % 7 - 3)
        r0 = ReachMap({p: iv_intersect(point(a), w.tau(p))})
        for k in {1, args.depth}:
            queries += 1
            if succ_pow(w, r0, k) != enum_post_bounded(w, p, a, k):
                bad = {"seed": s, "kind": "succ_pow", "depth": k}
                break
        if bad is None:
            v = random_plain(s)
            rm = compute_reach(v.as_guarded(), v.states[0], a)
            q = v.states[-1]
            for b in (rat(-2), rat(0), rat(3)):
                queries += 1
                if post_repr(v, a, v.states[0], q).contains(b) != rm.get(
                    q
                ).contains(b):
                    bad = {"seed": s, "kind": "reach", "target": str(b)}
                    break
        instances += 1
        if bad is not None:
            break
    query = {
        "command": "oracle-check",
        "seed": args.seed,
        "trials": args.trials,
        "depth": args.depth,
    }
    rep = {"instances": instances, "queries": queries}
    if bad is not None:
        _answer(args, query, "mismatch", rep, bad)
        return 5
    _answer(args, query, f"ok: {instances} instances, {queries} queries", rep)
    return 0


# -- parser -------------------------------------------------------------------


def _add_model(sub):
    sub.add_argument("--file", required=True, help="model JSON file")


def _add_source(sub):
    sub.add_argument("--from", dest="frm", required=True, metavar="STATE")
    sub.add_argument("--value", required=True, type=_rat_arg)


def _add_target(sub):
    sub.add_argument("--to", required=True, metavar="STATE")
    sub.add_argument("--target", required=True, type=_rat_arg)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="coca",
        description="Exact reachability for continuous one-counter automata.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def cmd(name, handler, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = cmd("reach", _cmd_reach, "is (to, target) reachable from (from, value)?")
    _add_model(p), _add_source(p), _add_target(p)

    p = cmd("post", _cmd_post, "exact reachable-value set between two states")
    _add_model(p), _add_source(p)
    p.add_argument("--to", required=True, metavar="STATE")

    p = cmd("greach", _cmd_greach, "reachability with per-state guards")
    _add_model(p), _add_source(p), _add_target(p)
    p.add_argument("--trace", action="store_true", help="print engine events")

    p = cmd("gpost", _cmd_gpost, "full reachability map with per-state guards")
    _add_model(p), _add_source(p)
    p.add_argument("--to", metavar="STATE", help="restrict output to one state")
    p.add_argument("--trace", action="store_true", help="print engine events")

    p = cmd("eqreach", _cmd_eqreach, "reachability with equality tests")
    _add_model(p), _add_source(p), _add_target(p)

    for name, handler, help in (
        ("encode", _cmd_encode, "emit the reachability query as SMT-LIB"),
        ("solve", _cmd_solve, "encode and run an external SMT solver"),
    ):
        p = cmd(name, handler, help)
        _add_model(p), _add_source(p), _add_target(p)
        p.add_argument(
            "--acyclic",
            action="store_true",
            help="use the purely existential acyclic-graph encoding",
        )
        if name == "encode":
            p.add_argument("-o", "--output", help="write the script here")
        else:
            p.add_argument(
                "--solver",
                required=True,
                help="solver command; reads SMT-LIB on stdin, or use {file}",
            )
            p.add_argument("--timeout", type=float, default=60.0, metavar="S")

    p = cmd("gen-sat", _cmd_gen_sat, "build a reachability instance from a 3-CNF")
    p.add_argument("--cnf", required=True, help="DIMACS CNF file")
    p.add_argument(
        "--variant",
        choices=("guards", "updates"),
        default="guards",
        help="where the parameters appear",
    )
    p.add_argument("--num-vars", type=int, help="override the variable count")
    p.add_argument("-o", "--output", help="write the model JSON here")

    p = cmd("oracle-check", _cmd_oracle_check, "check engines against oracles")
    p.add_argument(
        "--file", help="model to check; omit to self-check on random instances"
    )
    p.add_argument("--from", dest="frm", metavar="STATE")
    p.add_argument("--value", type=_rat_arg)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--depth", type=int, default=4)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (EngineError, EncodingError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 5
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CocaError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
