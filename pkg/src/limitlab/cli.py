"""Command-line interface. Every command prints JSON unless ``--summary``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import PAUSE, check_datum, parse_text
from .harness import (
    TRANSFORM_OPS, ConfigError, ExperimentConfig, OracleTooLarge, brute_force_oracle,
    load_catalog, load_learner, run_experiment,
)
from .hypspace import EvalContext, expr_to_json, value_to_json
from .learners import learner_to_json, trace
from .restrictions import RESTRICTIONS, Pred, check
from .transforms import materialize


def _context(args) -> EvalContext:
    return EvalContext(load_catalog(args.catalog))


def _alphabet(spec: str) -> list:
    return [check_datum(PAUSE if s.strip() == PAUSE else int(s)) for s in spec.split(",") if s.strip()]


def _emit(doc, out=None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _table(rows, header):
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    for row in [header, *rows]:
        print("  ".join(str(x).ljust(w) for x, w in zip(row, widths)))


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.budget:
        cfg.budget = args.budget
    report, code = run_experiment(cfg)
    if args.summary:
        rows = [(p, c["HOLDS"], c["VIOLATED"], c["UNDETERMINED"]) for p, c in report["summary"].items()]
        _table(rows, ("pred", "holds", "violated", "undetermined"))
        audit = report["implication_audit"]
        print(f"implication audit: {len(audit['violations'])} violations over {audit['traces']} traces")
        for f in report["failures"]:
            print(f"FAIL {f['learner']} {f['text']} {f['pred']} {f['outcome']} {f['witness']}")
    else:
        _emit(report, args.out)
    return code


def cmd_trace(args) -> int:
    ctx = _context(args)
    M = load_learner(args.learner, ctx)
    tr = trace(M, parse_text(args.text), args.budget)
    if args.summary:
        for r in tr.records:
            state = "" if r.before is None else f"{r.before!r} -> {r.after!r}"
            print(f"{r.time:4d}  {r.datum!s:>3}  {state}  {r.hyp!r}")
        print(f"cycle={tr.cycle} exhausted={tr.exhausted} diverged_at={tr.diverged_at}")
    else:
        _emit(tr.to_json(), args.out)
    return 0


def cmd_check(args) -> int:
    ctx = _context(args)
    M = load_learner(args.learner, ctx)
    tr = trace(M, parse_text(args.text), args.budget)
    preds = [Pred.parse(p) for p in args.pred] if args.pred else list(RESTRICTIONS) + [Pred.EX]
    verdicts = [check(p, tr, ctx) for p in preds if not (p is Pred.BMS_STAR and M.kind != "bms")]
    if args.summary:
        _table([(v.pred.value, v.outcome, v.witness or "") for v in verdicts], ("pred", "outcome", "witness"))
    else:
        _emit({"learner": M.id, "text": str(tr.text), "verdicts": [v.to_json() for v in verdicts]}, args.out)
    return 0


def cmd_transform(args) -> int:
    ctx = _context(args)
    M = load_learner(args.learner, ctx)
    derived = TRANSFORM_OPS[args.op](M)
    derived = getattr(derived, "bms", derived)
    alphabet = _alphabet(args.alphabet) if args.alphabet else list(range(ctx.catalog.universe_max + 1)) + [PAUSE]
    table = materialize(derived, alphabet, args.max_states)
    doc = learner_to_json(table)
    if args.op in ("sconv", "wb"):
        doc["requires"] = [learner_to_json(materialize(M, alphabet, args.max_states))]
    _emit(doc, args.out)
    return 0


def cmd_oracle(args) -> int:
    ctx = _context(args)
    M = load_learner(args.learner, ctx)
    table = brute_force_oracle(M, _alphabet(args.alphabet), args.max_len, ctx)
    if args.summary:
        rows = [
            ("".join(map(str, e["sequence"])) or "ε", *(e["verdicts"][p] for p in RESTRICTIONS))
            for e in table
        ]
        _table(rows, ("sequence", *(p.value for p in RESTRICTIONS)))
    else:
        _emit([
            {
                "sequence": list(e["sequence"]),
                "states": None if e["states"] is None else [value_to_json(s) for s in e["states"]],
                "hypotheses": [expr_to_json(h) for h in e["hypotheses"]],
                "diverged_at": e["diverged_at"],
                "verdicts": {p.value: v for p, v in e["verdicts"].items()},
            }
            for e in table
        ], args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="limitlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, learner=True):
        p.add_argument("--catalog", default="fixtures", help="catalog JSON file (default: built-in fixtures)")
        p.add_argument("--summary", action="store_true", help="human-readable output")
        p.add_argument("--out", help="write JSON here instead of stdout")
        if learner:
            p.add_argument("--learner", required=True, help="learner file or fixture:A|B|C|U")

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--budget", type=int)
    common(p, learner=False)
    p.set_defaults(fn=cmd_run)

    for name, fn in (("trace", cmd_trace), ("check", cmd_check)):
        p = sub.add_parser(name, help=f"{name} one learner on one text")
        common(p)
        p.add_argument("--text", required=True, help='text literal, e.g. "4,2|#"')
        p.add_argument("--budget", type=int, default=256)
        if name == "check":
            p.add_argument("--pred", action="append", help="predicate (repeatable); default all")
        p.set_defaults(fn=fn)

    p = sub.add_parser("transform", help="derive a learner and write its table")
    common(p)
    p.add_argument("--op", required=True, choices=sorted(TRANSFORM_OPS))
    p.add_argument("--alphabet", help="data to materialize over (default: universe and #)")
    p.add_argument("--max-states", type=int, default=10_000)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("oracle", help="exhaustive verdicts on short pause-padded texts")
    common(p)
    p.add_argument("--alphabet", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, OracleTooLarge, ValueError, KeyError, TypeError) as exc:
        print(f"limitlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
