"""Command-line entry point.

    lnc check <file.sos> [--json]
    lnc run <program.lnc> <file.sos> [--json]
    lnc corpus <dir> [--json]

Exit status: 0 success, 1 violation or program error, 2 parse error,
3 I/O or corpus-layout error. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import CorpusError, CorpusParseError, load_corpus
from .dsl import parse_program
from .evaluator import EvalError, render, run_program
from .gsos import reference_check, validate_gsos
from .sos import ParseError, parse_language

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_IO = 0, 1, 2, 3


def _emit(obj: dict) -> None:
    print(json.dumps(obj))


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_check(lang_path: str, json_output: bool = False) -> int:
    try:
        lang = parse_language(_read(lang_path))
    except OSError as err:
        print(f"lnc: cannot read {lang_path}: {err.strerror or err}", file=sys.stderr)
        return EXIT_IO
    except ParseError as err:
        print(f"{lang_path}: parse error: {err}", file=sys.stderr)
        if json_output:
            _emit({"file": lang_path, "outcome": "parse_error", "part": None,
                   "rule_index": None, "message": str(err)})
        return EXIT_PARSE

    report = validate_gsos(lang)
    if json_output:
        print(report.to_json(lang_path))
    elif report.passed:
        print(f"OK: {lang_path} conforms to GSOS")
    else:
        print(f"GSOS violation (Part {report.part}) in rule {report.rule_index}: {report.message}")
        if report.rule_text:
            print(f"  {report.rule_text}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_run(program_path: str, lang_path: str, json_output: bool = False) -> int:
    base = {"program": program_path, "file": lang_path}
    try:
        program_text = _read(program_path)
        lang_text = _read(lang_path)
    except OSError as err:
        print(f"lnc: cannot read {err.filename}: {err.strerror or err}", file=sys.stderr)
        return EXIT_IO
    try:
        program = parse_program(program_text)
    except ParseError as err:
        print(f"{program_path}: parse error: {err}", file=sys.stderr)
        if json_output:
            _emit({**base, "outcome": "parse_error", "message": str(err)})
        return EXIT_PARSE
    try:
        lang = parse_language(lang_text)
    except ParseError as err:
        print(f"{lang_path}: parse error: {err}", file=sys.stderr)
        if json_output:
            _emit({**base, "outcome": "parse_error", "message": str(err)})
        return EXIT_PARSE

    try:
        value = run_program(program, lang)
    except EvalError as err:
        if json_output:
            _emit({**base, "outcome": "error", "kind": err.kind, "message": err.message})
        else:
            print(err.message)
            if err.kind == "fault":
                print("lnc: runtime fault (not raised by 'error')", file=sys.stderr)
        return EXIT_FAIL
    rendered = render(value, lang.roots)
    if json_output:
        _emit({**base, "outcome": "value", "value": rendered})
    else:
        print(rendered)
    return EXIT_OK


def _verdict(report) -> str:
    return "pass" if report.passed else f"fail:{report.part}"


def cmd_corpus(directory: str, json_output: bool = False) -> int:
    try:
        entries = load_corpus(directory)
    except CorpusParseError as err:
        print(f"lnc: corpus defect: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (CorpusError, OSError) as err:
        print(f"lnc: {err}", file=sys.stderr)
        return EXIT_IO

    rows = []
    for entry in entries:
        dsl = _verdict(validate_gsos(entry.language))
        oracle = _verdict(reference_check(entry.language))
        agree = dsl == oracle
        rows.append({"name": entry.name, "expected": entry.expected, "dsl": dsl,
                     "oracle": oracle, "agree": agree,
                     "ok": agree and dsl == entry.expected})

    if json_output:
        for row in rows:
            _emit(row)
    else:
        width = max([len(r["name"]) for r in rows] + [4])
        print(f"{'name':<{width}}  {'expected':<8}  {'dsl':<8}  {'oracle':<8}  agree")
        for r in rows:
            flag = "" if r["ok"] else "  <-- MISMATCH"
            print(f"{r['name']:<{width}}  {r['expected']:<8}  {r['dsl']:<8}  {r['oracle']:<8}  "
                  f"{'yes' if r['agree'] else 'NO'}{flag}")
        bad = sum(not r["ok"] for r in rows)
        print(f"{len(rows)} entries, {bad} mismatches", file=sys.stderr)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lnc", description="Lang-n-Change GSOS validator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a language against the GSOS format")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("run", help="run a Lang-n-Change program over a language")
    p.add_argument("program")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("corpus", help="validate every language of a corpus directory")
    p.add_argument("dir")
    p.add_argument("--json", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args.file, args.json)
    if args.command == "run":
        return cmd_run(args.program, args.file, args.json)
    return cmd_corpus(args.dir, args.json)


if __name__ == "__main__":
    sys.exit(main())
