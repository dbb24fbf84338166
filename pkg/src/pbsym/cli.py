"""Command line entry points.

    pbsym check   <formula> <proof> [--trace] [--json]
    pbsym break   <formula> <symmetries> -o PREFIX [--method new|old]
                  [--cp-variant] [--selfcheck] [--json]
    pbsym gen     <family> <params...> -o PREFIX
    pbsym compare <family> <start..stop> [--step K] [-o CSV]

Exit codes: 0 success, 1 semantic rejection (bad proof / bad symmetry),
2 I/O or parse failure.
"""

import argparse
import csv
import io
import json
import sys
import time

from . import bench
from . import breaker
from . import checker
from . import constraints as pb
from . import orders
from . import parsing

REPORT_SCHEMA = 1


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise _IOFailure(str(e))


class _IOFailure(Exception):
    pass


def _load_formula(path):
    text = _read(path)
    if path.endswith(".cnf"):
        cons = parsing.parse_cnf(text)
        variables = ["x%d" % i for i in range(1, 1 + max(
            (int(v[1:]) for c in cons for v in c.variables()), default=0))]
        return cons, variables
    cons, variables = parsing.parse_opb(text)
    return cons, variables


def _report(args, payload):
    payload["schema"] = REPORT_SCHEMA
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key, val in payload.items():
            if isinstance(val, dict):
                for k2, v2 in val.items():
                    print("%s.%s: %s" % (key, k2, v2))
            else:
                print("%s: %s" % (key, val))


# ------------------------------------------------------------------- check

def cmd_check(args):
    t0 = time.perf_counter()
    formula, _ = _load_formula(args.formula)
    proof_text = _read(args.proof)
    doc = parsing.parse_proof(proof_text)
    t1 = time.perf_counter()
    trace = [] if args.trace else None
    try:
        verdict, counters = checker.check_document(
            formula, doc, proof_bytes=len(proof_text.encode()), trace=trace)
    except checker.CheckError as e:
        t2 = time.perf_counter()
        _report(args, {"verdict": "REJECTED", "error": str(e),
                       "timings": {"parse_s": round(t1 - t0, 6),
                                   "check_s": round(t2 - t1, 6)}})
        return 1
    t2 = time.perf_counter()
    if trace:
        for line in trace:
            print("trace: %s" % line, file=sys.stderr)
    _report(args, {"verdict": verdict, "counters": counters,
                   "timings": {"parse_s": round(t1 - t0, 6),
                               "check_s": round(t2 - t1, 6)}})
    return 0


# ------------------------------------------------------------------- break

def _write_streamed(path, chunks):
    """Write an iterable of text chunks with a buffered writer."""
    with open(path, "w", buffering=1 << 16) as fh:
        for chunk in chunks:
            fh.write(chunk)
        fh.flush()


def cmd_break(args):
    t0 = time.perf_counter()
    formula, variables = _load_formula(args.formula)
    syms = breaker.parse_symmetries(_read(args.symmetries))
    try:
        for i, sym in enumerate(syms, start=1):
            try:
                breaker.verify_symmetry(formula, sym)
            except breaker.BreakError as e:
                raise breaker.BreakError("generator %d (%s): %s"
                                         % (i, sym.witness_text(), e))
        builder = breaker.break_symmetries(
            formula, variables, syms,
            method=args.method, cp_variant=args.cp_variant)
    except breaker.BreakError as e:
        _report(args, {"verdict": "INVALID-SYMMETRY", "error": str(e)})
        return 1
    t1 = time.perf_counter()

    proof_path = args.output + ".pbp"
    _write_streamed(proof_path, (line + "\n" for line in builder.lines))
    # chain variables (s<i>) are not x-indexed, so the augmented formula is
    # written as OPB regardless of the input format
    augmented = list(formula) + list(builder.kept)
    out_path = args.output + ".opb"
    _write_streamed(out_path, ("%s ;\n" % pb.render(c) for c in augmented))
    t2 = time.perf_counter()

    payload = {"verdict": "BROKEN",
               "clauses": len(builder.kept),
               "proof": proof_path, "formula": out_path,
               "binding": " ".join(builder.binding or []),
               "timings": {"emit_s": round(t1 - t0, 6),
                           "write_s": round(t2 - t1, 6)}}
    if args.selfcheck:
        doc = parsing.parse_proof(builder.text())
        try:
            verdict, counters = checker.check_document(formula, doc)
        except checker.CheckError as e:
            payload["verdict"] = "SELFCHECK-FAILED"
            payload["error"] = str(e)
            _report(args, payload)
            return 1
        payload["selfcheck"] = verdict
        payload["counters"] = counters
        payload["timings"]["check_s"] = round(time.perf_counter() - t2, 6)
    _report(args, payload)
    return 0


# --------------------------------------------------------------------- gen

def cmd_gen(args):
    inst = bench.generate(args.family, tuple(args.params))
    gens = bench.known_generators(inst)
    _write_streamed(args.output + ".cnf",
                    [parsing.render_cnf(inst.constraints, inst.nvars())])
    sidecar = {"family": inst.family,
               "params": list(inst.params),
               "variables": inst.names,
               "symmetries": [g.witness_text() for g in gens]}
    _write_streamed(args.output + ".json",
                    [json.dumps(sidecar, indent=2, sort_keys=True) + "\n"])
    _report(args, {"verdict": "GENERATED",
                   "variables": inst.nvars(),
                   "constraints": len(inst.constraints),
                   "generators": len(gens)})
    return 0


# ----------------------------------------------------------------- compare

def _compare_cell(inst, method):
    sym = bench.known_generators(inst)[0]
    t0 = time.perf_counter()
    builder = breaker.break_symmetries(inst.constraints, inst.variables,
                                       [sym], method=method)
    text = builder.text()
    t1 = time.perf_counter()
    checker.check_document(inst.constraints, parsing.parse_proof(text))
    t2 = time.perf_counter()
    return {"proof_bytes": len(text.encode()),
            "emit_s": round(t1 - t0, 6),
            "check_s": round(t2 - t1, 6)}


def cmd_compare(args):
    try:
        start, stop = (int(x) for x in args.range.split(".."))
    except ValueError:
        raise _IOFailure("size range must look like 5..30")
    sizes = list(range(start, stop + 1, args.step))
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["n", "method", "proof_bytes", "emit_s", "check_s"])
    for n in sizes:
        inst = bench.generate(args.family, (n,))
        for method in ("new", "old"):
            cell = _compare_cell(inst, method)
            writer.writerow([n, method, cell["proof_bytes"],
                             cell["emit_s"], cell["check_s"]])
    text = out.getvalue()
    if args.output:
        _write_streamed(args.output, [text])
    else:
        sys.stdout.write(text)
    return 0


# -------------------------------------------------------------------- main

def build_parser():
    p = argparse.ArgumentParser(prog="pbsym",
                                description="certified symmetry breaking "
                                            "for pseudo-Boolean formulas")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="verify a proof against a formula")
    c.add_argument("formula")
    c.add_argument("proof")
    c.add_argument("--trace", action="store_true",
                   help="dump goal discharge decisions to stderr")
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_check)

    b = sub.add_parser("break", help="emit breaking clauses plus proof")
    b.add_argument("formula")
    b.add_argument("symmetries")
    b.add_argument("-o", "--output", required=True,
                   help="output prefix for .pbp and .opb files")
    b.add_argument("--method", choices=("new", "old"), default="new")
    b.add_argument("--cp-variant", action="store_true", dest="cp_variant")
    b.add_argument("--selfcheck", action="store_true")
    b.add_argument("--json", action="store_true")
    b.set_defaults(fn=cmd_break)

    g = sub.add_parser("gen", help="generate a crafted benchmark instance")
    g.add_argument("family", choices=sorted(bench._FAMILIES))
    g.add_argument("params", nargs="+", type=int)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--json", action="store_true")
    g.set_defaults(fn=cmd_gen)

    m = sub.add_parser("compare", help="method comparison CSV over a size range")
    m.add_argument("family", choices=sorted(bench._FAMILIES))
    m.add_argument("range", help="inclusive size range, e.g. 5..30")
    m.add_argument("--step", type=int, default=5)
    m.add_argument("-o", "--output")
    m.set_defaults(fn=cmd_compare)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (_IOFailure, OSError, parsing.ParseError, bench.BenchError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
