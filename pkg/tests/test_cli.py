import json
import subprocess
import sys

import pytest

from bsdecide.cli import main, parse_range, parse_relations
from bsdecide.prop import read_dimacs


@pytest.fixture
def write(tmp_path):
    def _write(text, name="f.fo"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheck:
    def test_segment(self, capsys, write):
        code, out, _ = run(capsys, "check", write("forall y1 y2 . R(y1,y2) | P(a)"))
        assert code == 0 and out.strip() == "class=SBS t=2 m=1"

    def test_bs(self, capsys, write):
        code, out, _ = run(capsys, "check", write("exists x . forall y . R(x,y) | P(a)"))
        assert code == 0 and out.strip() == "class=BS s=1 t=1 m=1"

    def test_equality(self, capsys, write):
        code, out, _ = run(capsys, "check", write("forall y . y = a"))
        assert code == 1 and out.strip() == "class=general violations=[ContainsEquality]"

    def test_unreadable(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", str(tmp_path / "missing.fo"))
        assert code == 2 and err.startswith("error:")

    def test_syntax_error_reports_position(self, capsys, write):
        code, _, err = run(capsys, "check", write("forall y . P(y) &"))
        assert code == 2 and "17" in err

    def test_json(self, capsys, write):
        code, out, _ = run(capsys, "check", "--json", write("forall y . P(y) | P(a)"))
        assert json.loads(out) == {"class": "SBS", "s": 0, "t": 1, "m": 1}


class TestSolve:
    def test_sat_with_witness(self, capsys, write):
        code, out, _ = run(capsys, "solve", "--witness", "--oracle-check", write("forall y . P(y) | Q(a)"))
        lines = out.splitlines()
        assert code == 0 and lines[0] == "SAT"
        values = dict(line.strip().split(" = ") for line in lines[1:-1])
        assert values["P(a)"] == "T" or values["Q(a)"] == "T"
        assert lines[-1] == "oracle=SAT agreement=yes"

    def test_unsat(self, capsys, write):
        code, out, _ = run(capsys, "solve", write("forall y . P(y) & ~P(a)"))
        assert code == 1 and out.strip() == "UNSAT"

    def test_policy_divergence(self, capsys, write):
        path = write("exists x . P(x) & ~P(a)")
        code, out, _ = run(capsys, "solve", path)
        assert code == 0 and out.strip() == "SAT"
        code, out, _ = run(capsys, "solve", "--policy", "paper-literal", path)
        assert code == 1 and out.strip() == "UNSAT"
        code, out, _ = run(capsys, "solve", "--policy", "paper-literal", "--oracle-check", path)
        assert code == 3 and "divergent" in out

    def test_instance_cap(self, capsys, write):
        code, _, err = run(capsys, "solve", "--cap", "3", write("forall y z . R(y,z) | P(a) | P(b)"))
        assert code == 4 and "error" in err

    def test_enumeration_guard(self, capsys, write):
        code, _, _ = run(capsys, "solve", "--oracle-check", "--guard", "10", write("forall y z . R(y,z) | P(a) | P(b)"))
        assert code == 4

    def test_general_formula_is_input_error(self, capsys, write):
        code, _, _ = run(capsys, "solve", write("forall y . y = a"))
        assert code == 2


class TestGround:
    def test_four_instances(self, capsys, write, tmp_path):
        path = write("forall y1 y2 . R(y1,y2) | P(a) | P(b)")
        code, out, _ = run(capsys, "ground", path)
        assert code == 0 and out.startswith("ground_count=4")
        lines = (tmp_path / "f.fo.ground").read_text().splitlines()
        assert lines == [
            "R(a,a) | P(a) | P(b)",
            "R(a,b) | P(a) | P(b)",
            "R(b,a) | P(a) | P(b)",
            "R(b,b) | P(a) | P(b)",
        ]
        cnf = read_dimacs((tmp_path / "f.fo.cnf").read_text())
        assert len(cnf.clauses) == 4 and cnf.num_vars == 6

    def test_out_prefix(self, capsys, write, tmp_path):
        code, _, _ = run(capsys, "ground", "--out", str(tmp_path / "x"), write("forall y . P(y)"))
        assert code == 0
        assert (tmp_path / "x.ground").read_text() == "P(a0)\n"


class TestOracle:
    def test_model(self, capsys, write):
        code, out, _ = run(capsys, "oracle", "--json", write("exists x . P(x) & ~P(a)"))
        data = json.loads(out)
        assert code == 0 and data["verdict"] == "SAT"
        assert data["model"]["domain_size"] == 2

    def test_unsat_bound(self, capsys, write):
        code, out, _ = run(capsys, "oracle", write("forall y . P(y) & ~P(a)"))
        assert code == 1 and out.strip() == "UNSAT_UP_TO(1)"


class TestPadding:
    def test_pad_three_bytes_k2(self, capsys, write, tmp_path):
        code, out, _ = run(capsys, "pad", "--k", "2", write("abc", "p.txt"))
        assert code == 0
        assert (tmp_path / "p.txt.pad").read_bytes() == b"abc" + b"#" * 509

    def test_overflow_exit(self, capsys, write):
        code, _, err = run(capsys, "pad", "--k", "1", "--max-bytes", "1024", write("abcdefghijk", "p.txt"))
        assert code == 4 and "2048" in err

    def test_unpad(self, capsys, write):
        code, out, _ = run(capsys, "unpad", "--k", "1", write("P(a)" + "#" * 12, "b.pad"))
        assert code == 0 and out == "P(a)"

    def test_unpad_malformed(self, capsys, write):
        code, _, _ = run(capsys, "unpad", "--k", "1", write("P(a)" + "#" * 11, "b.pad"))
        assert code == 2

    def test_padded_pipeline(self, capsys, write, tmp_path):
        blob = write("forall y.P(y)|Q(a)" + "#" * (2**18 - 18), "seg.pad")
        code, out, _ = run(capsys, "pipeline", "--padded", "--k", "1", "--json", blob)
        data = json.loads(out)
        assert code == 0
        assert data["padded_length"] == 2**18 and data["n"] == 18
        assert data["ground_count"] == 1 and data["verdict"] == "SAT"


class TestBench:
    def test_ground_counts(self, capsys):
        code, out, _ = run(capsys, "bench", "--m", "2", "--t", "1..4", "--seed", "7", "--no-timings")
        rows = out.splitlines()
        assert code == 0
        header = rows[0].split(",")
        counts = [int(r.split(",")[header.index("ground_count")]) for r in rows[1:]]
        assert counts == [2, 4, 8, 16]

    def test_byte_identical_reruns(self, capsys, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            run(capsys, "bench", "--m", "1..2", "--t", "1..3", "--seed", "9", "--count", "2",
                "--no-timings", "--out", str(tmp_path / name))
            outs.append((tmp_path / name).read_bytes())
        assert outs[0] == outs[1]

    def test_emit_files(self, capsys, tmp_path):
        run(capsys, "bench", "--t", "2", "--seed", "1", "--emit", str(tmp_path / "gen"), "--no-timings")
        files = list((tmp_path / "gen").iterdir())
        assert len(files) == 1
        code, out, _ = run(capsys, "check", str(files[0]))
        assert code == 0 and out.strip() == "class=SBS t=2 m=2"


def test_parse_helpers():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("2,5") == [2, 5]
    assert parse_relations("P:1,R:2") == {"P": 1, "R": 2}


def test_module_entry_point(tmp_path):
    path = tmp_path / "f.fo"
    path.write_text("forall y . P(y) & ~P(a)\n")
    proc = subprocess.run([sys.executable, "-m", "bsdecide", "solve", str(path)], capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout.strip() == "UNSAT"
