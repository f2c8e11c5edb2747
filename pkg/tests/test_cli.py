import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from lnc.cli import main
from lnc.gsos import MSG_PREMISE_SOURCES

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
EXAMPLE = ROOT / "tests" / "data" / "example.sos"
REPLICATION = CORPUS / "negative" / "07-neg-replication.sos"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_pass(capsys):
    code, out, _ = run(capsys, "check", EXAMPLE)
    assert code == 0
    assert out == f"OK: {EXAMPLE} conforms to GSOS\n"


def test_check_violation(capsys):
    code, out, err = run(capsys, "check", REPLICATION)
    assert code == 1
    assert out == f"GSOS violation (Part 3) in rule 5: {MSG_PREMISE_SOURCES}\n"
    assert "(bang P)" in err


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", REPLICATION, "--json")
    assert code == 1
    assert json.loads(out) == {"file": str(REPLICATION), "outcome": "fail", "part": 3,
                               "rule_index": 5, "message": MSG_PREMISE_SOURCES}


def test_check_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.sos"
    bad.write_text("Label L ::= (a)\n(a P --(a)--> P.")
    code, out, err = run(capsys, "check", bad)
    assert code == 2 and out == "" and "parse error" in err
    code, out, _ = run(capsys, "check", bad, "--json")
    assert code == 2 and json.loads(out)["outcome"] == "parse_error"


def test_check_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", tmp_path / "none.sos")
    assert code == 3 and "cannot read" in err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_run_skip_prints_unit(capsys, tmp_path):
    code, out, _ = run(capsys, "run", write(tmp_path, "p.lnc", "skip"), EXAMPLE)
    assert (code, out) == (0, "unit\n")


def test_run_value(capsys, tmp_path):
    prog = write(tmp_path, "p.lnc", "rules[(par P1 P2) --(a [])--> P']: P'")
    code, out, _ = run(capsys, "run", prog, EXAMPLE)
    assert (code, out) == (0, "[(par P1' P2), (par P1 P2')]\n")


def test_run_error(capsys, tmp_path):
    code, out, err = run(capsys, "run", write(tmp_path, "p.lnc", 'error "boom"'), EXAMPLE)
    assert (code, out, err) == (1, "boom\n", "")


def test_run_fault(capsys, tmp_path):
    code, out, err = run(capsys, "run", write(tmp_path, "p.lnc", "head []"), EXAMPLE)
    assert code == 1 and "empty" in out and "runtime fault" in err


def test_run_json(capsys, tmp_path):
    prog = write(tmp_path, "p.lnc", 'error "boom"')
    code, out, _ = run(capsys, "run", prog, EXAMPLE, "--json")
    assert code == 1
    assert json.loads(out) == {"program": str(prog), "file": str(EXAMPLE), "outcome": "error",
                               "kind": "user", "message": "boom"}
    prog = write(tmp_path, "q.lnc", "skip")
    code, out, _ = run(capsys, "run", prog, EXAMPLE, "--json")
    assert code == 0 and json.loads(out)["value"] == "unit"


def test_run_program_parse_error(capsys, tmp_path):
    code, _, err = run(capsys, "run", write(tmp_path, "p.lnc", "premises"), EXAMPLE)
    assert code == 2 and "parse error" in err


def test_run_missing_program(capsys, tmp_path):
    code, _, _ = run(capsys, "run", tmp_path / "none.lnc", EXAMPLE)
    assert code == 3


def test_corpus_ok(capsys):
    code, out, err = run(capsys, "corpus", CORPUS)
    assert code == 0
    assert "MISMATCH" not in out
    assert "0 mismatches" in err


def test_corpus_json_rows(capsys):
    code, out, _ = run(capsys, "corpus", CORPUS, "--json")
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and len(rows) >= 26
    assert set(rows[0]) == {"name", "expected", "dsl", "oracle", "agree", "ok"}
    assert all(r["ok"] for r in rows)


def test_corpus_flipped_expectation_fails(capsys, tmp_path):
    root = tmp_path / "c"
    shutil.copytree(CORPUS, root)
    manifest = root / "manifest.tsv"
    text = manifest.read_text()
    manifest.write_text(text.replace("\tpass\t", "\tfail:2\t", 1))
    code, out, _ = run(capsys, "corpus", root)
    assert code == 1 and "MISMATCH" in out


def test_corpus_empty_dir(capsys, tmp_path):
    code, _, err = run(capsys, "corpus", tmp_path)
    assert code == 0 and "0 entries" in err


def test_corpus_layout_error(capsys, tmp_path):
    (tmp_path / "stray.sos").write_text("Label L ::= (a)\n")
    code, _, _ = run(capsys, "corpus", tmp_path)
    assert code == 3


def test_corpus_parse_defect(capsys, tmp_path):
    (tmp_path / "bad.sos").write_text("junk")
    (tmp_path / "manifest.tsv").write_text("bad\tbad.sos\tpass\tbroken\n")
    code, _, err = run(capsys, "corpus", tmp_path)
    assert code == 2 and "corpus defect" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lnc", "check", str(EXAMPLE)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("OK:")
