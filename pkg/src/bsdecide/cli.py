"""Command-line entry point.

Exit codes:
    0  success / SAT / formula is in the BS class
    1  UNSAT / formula is outside the BS class (``check``)
    2  input error: unreadable file, syntax error, malformed padding,
       formula outside the fragment where one is required
    3  the oracle and the grounding pipeline disagree
    4  a size guard tripped (instance cap, enumeration guard, padding limit)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from pathlib import Path

from . import __version__
from .errors import (
    BSDecideError,
    EnumerationGuard,
    ExplosionGuard,
    NotInFragment,
    PaddingOverflow,
    StageError,
)
from .generate import random_segment
from .grounder import DEFAULT_INSTANCE_CAP, WitnessPolicy
from .logic import Fragment, classify
from .oracle import DEFAULT_GUARD, decide_by_bound, find_model
from .padding import DEFAULT_MAX_BYTES, pad, unpad
from .pipeline import decide, run_pipeline
from .syntax import emit_dimacs, format_ground_set, pretty_print, read_formula_file

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_DISAGREE, EXIT_GUARD = 0, 1, 2, 3, 4
GUARDS = (ExplosionGuard, EnumerationGuard, PaddingOverflow)


def _root_cause(exc: Exception) -> Exception:
    return exc.cause if isinstance(exc, StageError) else exc


def _emit(args, payload: dict, text: str):
    out = json.dumps(payload, indent=2, sort_keys=True) if args.json else text
    print(out)


def _load_fragment(path: str):
    formula, symbols = read_formula_file(path)
    cls = classify(formula, symbols)
    if not cls.ok:
        raise NotInFragment(v.value for v in cls.violations)
    return cls


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args) -> int:
    formula, symbols = read_formula_file(args.file)
    cls = classify(formula, symbols)
    if cls.fragment is Fragment.GENERAL:
        names = [v.value for v in cls.violations]
        _emit(args, {"class": "general", "violations": names},
              f"class=general violations=[{', '.join(names)}]")
        return EXIT_NO
    bs = cls.bs
    fields = {"class": cls.fragment.value, "s": bs.s, "t": bs.t, "m": bs.m}
    parts = [f"class={cls.fragment.value}"]
    if cls.fragment is Fragment.BS:
        parts.append(f"s={bs.s}")
    parts += [f"t={bs.t}", f"m={bs.m}"]
    _emit(args, fields, " ".join(parts))
    return EXIT_OK


def cmd_ground(args) -> int:
    cls = _load_fragment(args.file)
    decision = decide(cls.expression, args.policy, args.cap)
    prefix = Path(args.out) if args.out else Path(args.file)
    ground_path = prefix.with_name(prefix.name + ".ground")
    cnf_path = prefix.with_name(prefix.name + ".cnf")
    ground_path.write_text(format_ground_set(decision.ground_set), encoding="utf-8")
    cnf_path.write_text(emit_dimacs(decision.cnf, decision.atoms), encoding="utf-8")
    info = {
        "ground_count": decision.ground_count,
        "universe": list(decision.universe.members),
        "prop_var_count": len(decision.atoms),
        "ground_file": str(ground_path),
        "dimacs_file": str(cnf_path),
    }
    _emit(args, info, f"ground_count={decision.ground_count} wrote {ground_path} {cnf_path}")
    return EXIT_OK


def cmd_solve(args) -> int:
    cls = _load_fragment(args.file)
    decision = decide(cls.expression, args.policy, args.cap)
    verdict = "SAT" if decision.sat else "UNSAT"
    payload = {"verdict": verdict, "policy": WitnessPolicy(args.policy).value,
               "ground_count": decision.ground_count}
    lines = [verdict]
    if args.witness and decision.sat:
        values = decision.atom_values()
        payload["witness"] = values
        lines += [f"  {atom} = {'T' if v else 'F'}" for atom, v in values.items()]
    code = EXIT_OK if decision.sat else EXIT_NO
    if args.oracle_check:
        result = decide_by_bound(cls.expression, args.guard)
        agree = result.sat == decision.sat
        payload.update(oracle="SAT" if result.sat else "UNSAT", agreement=agree)
        lines.append(f"oracle={'SAT' if result.sat else 'UNSAT'} agreement={'yes' if agree else 'NO (divergent)'}")
        if not agree:
            code = EXIT_DISAGREE
    _emit(args, payload, "\n".join(lines))
    return code


def cmd_oracle(args) -> int:
    cls = _load_fragment(args.file)
    if args.max_size:
        result = find_model(cls.expression.to_formula(), args.max_size, args.guard, cls.bs.symbols)
    else:
        result = decide_by_bound(cls.expression, args.guard)
    payload = {"verdict": "SAT" if result.sat else "UNSAT", "max_size": result.max_size}
    text = str(result)
    if result.structure is not None:
        payload["model"] = result.structure.to_json()
        text += " " + json.dumps(payload["model"], sort_keys=True)
    _emit(args, payload, text)
    return EXIT_OK if result.sat else EXIT_NO


def cmd_pad(args) -> int:
    payload = Path(args.file).read_bytes()
    blob = pad(payload, args.k, args.max_bytes)
    out = Path(args.out) if args.out else Path(args.file + ".pad")
    out.write_bytes(blob.to_bytes())
    _emit(args, {"n": blob.n, "k": blob.k, "total_length": blob.total_length, "out": str(out)},
          f"n={blob.n} k={blob.k} total_length={blob.total_length} wrote {out}")
    return EXIT_OK


def cmd_unpad(args) -> int:
    blob = Path(args.file).read_bytes()
    payload = unpad(blob, args.k)
    if args.out:
        Path(args.out).write_bytes(payload)
        _emit(args, {"n": len(payload), "out": args.out}, f"n={len(payload)} wrote {args.out}")
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    report = run_pipeline(
        args.file, args.policy, padded=args.padded, k=args.k, cap=args.cap,
        oracle_check=args.oracle_check, guard=args.guard, ground_out=args.out,
    )
    data = report.to_json()
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        stages = " ".join(f"{k}={v:.3f}ms" for k, v in report.timings_ms.items())
        print(f"class={report.input_class} s={report.s} t={report.t} m={report.m} "
              f"ground_count={report.ground_count} verdict={report.verdict}")
        if report.padded_length:
            print(f"padded_length={report.padded_length} ns_per_padded_byte={report.ns_per_padded_byte:.3f}")
        if report.agreement is not None:
            print(f"oracle={report.oracle_verdict} agreement={report.agreement}")
        print(stages)
    if report.agreement is False:
        return EXIT_DISAGREE
    return EXIT_OK if report.verdict == "SAT" else EXIT_NO


def parse_range(text: str) -> list[int]:
    """``"3"`` -> [3], ``"1..4"`` -> [1, 2, 3, 4], ``"1,3"`` -> [1, 3]."""
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_relations(text: str) -> dict[str, int]:
    rels = {}
    for item in text.split(","):
        name, arity = item.split(":")
        rels[name.strip()] = int(arity)
    return rels


def bench_rows(ms, ts, seed, relations, depth, count, policy, cap, timings=True, emit_dir=None):
    rng = random.Random(seed)
    rows = []
    for m in ms:
        for t in ts:
            for i in range(count):
                seg = random_segment(rng, m, t, relations, depth)
                if emit_dir is not None:
                    path = Path(emit_dir) / f"m{m}_t{t}_{i}.fo"
                    path.write_text(pretty_print(seg.to_formula()) + "\n", encoding="utf-8")
                start = time.perf_counter()
                decision = decide(seg, policy, cap)
                total = (time.perf_counter() - start) * 1e3
                row = {
                    "m": m, "t": t, "instance": i,
                    "ground_count": decision.ground_count,
                    "prop_var_count": len(decision.atoms),
                    "clause_count": len(decision.cnf.clauses),
                    "verdict": "SAT" if decision.sat else "UNSAT",
                }
                if timings:
                    for stage in ("ground", "translate", "solve"):
                        row[f"{stage}_ms"] = round(decision.timings_ms.get(stage, 0.0), 4)
                    row["total_ms"] = round(total, 4)
                rows.append(row)
    return rows


def cmd_bench(args) -> int:
    if args.emit:
        Path(args.emit).mkdir(parents=True, exist_ok=True)
    rows = bench_rows(
        parse_range(args.m), parse_range(args.t), args.seed, parse_relations(args.relations),
        args.depth, args.count, args.policy, args.cap, not args.no_timings, args.emit,
    )
    if args.json:
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["m"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsdecide",
        description="Satisfiability for the Bernays-Schoenfinkel class by Herbrand grounding.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help_text, file=True):
        p = sub.add_parser(name, help=help_text)
        if file:
            p.add_argument("file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=fn)
        return p

    def policy(p):
        p.add_argument("--policy", choices=[w.value for w in WitnessPolicy], default="skolem")

    def cap(p):
        p.add_argument("--cap", type=int, default=DEFAULT_INSTANCE_CAP, help="max ground instances")

    def guard(p):
        p.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="max interpretations searched")

    command("check", cmd_check, "classify a formula file")

    p = command("ground", cmd_ground, "write the ground-set file and DIMACS")
    policy(p), cap(p)
    p.add_argument("--out", help="output prefix (default: the input path)")

    p = command("solve", cmd_solve, "decide satisfiability by grounding")
    policy(p), cap(p), guard(p)
    p.add_argument("--witness", action="store_true", help="print the model over ground atoms")
    p.add_argument("--oracle-check", action="store_true", help="cross-check with the model oracle")

    p = command("oracle", cmd_oracle, "decide by brute-force finite-model search")
    guard(p)
    p.add_argument("--max-size", type=int, help="override the domain-size bound")

    p = command("pad", cmd_pad, "pad a file to 2**(n**k) bytes")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-bytes", type=int, default=DEFAULT_MAX_BYTES)
    p.add_argument("--out")

    p = command("unpad", cmd_unpad, "strip and verify padding")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")

    p = command("pipeline", cmd_pipeline, "run every stage and report timings")
    policy(p), cap(p), guard(p)
    p.add_argument("--padded", action="store_true", help="input is a padded blob")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--oracle-check", action="store_true")
    p.add_argument("--out", help="write the ground-set file here")

    p = command("bench", cmd_bench, "generate a seeded family and tabulate costs", file=False)
    policy(p), cap(p)
    p.add_argument("--m", default="2", help="constant counts, e.g. 2 or 1..3")
    p.add_argument("--t", default="1..4", help="universal variable counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--relations", default="P:1,R:2", help="signature, e.g. P:1,R:2")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--count", type=int, default=1, help="instances per (m, t)")
    p.add_argument("--no-timings", action="store_true", help="omit timing columns")
    p.add_argument("--emit", help="directory to write the generated formula files")
    p.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BSDecideError, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD if isinstance(_root_cause(exc), GUARDS) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
