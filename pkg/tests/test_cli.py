import io
import json
from pathlib import Path


from hopfpath.cli import run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_gl_product_golden():
    code, out, _ = call("algebra", "product", "--algebra", "gl", "(0)", "(0)")
    assert code == 0
    assert out.strip() == "(0 (0)) + 2*{(0) (0)}"


def test_half_cherries_leave_distinct_labels():
    code, out, _ = call("translate", "--dual", "--v", str(CONFIGS / "half-cherries.json"), "(1 (2) (3))")
    assert code == 0
    assert out.strip() == "(1 (2) (3))"


def test_word_translation_golden():
    code, out, _ = call("translate", "--v", str(CONFIGS / "lie-bracket.json"), "e[0,1,2]")
    assert code == 0
    assert out.strip() == "e[0,1,2] + e[1,2,1,2] - e[2,1,1,2]"


def test_ito_strat_cli():
    code, out, _ = call("ito-strat", "--dim", "2", "(2 (2) (1))")
    assert code == 0
    assert out.strip() == "1/2*(0 (1)) + (2 (1) (2))"


def test_ck_coproduct_cli():
    code, out, _ = call("algebra", "coproduct", "--algebra", "ck", "(1 (2))")
    assert code == 0
    assert out.strip() == "1 ⊗ (1 (2)) + (2) ⊗ (1) + (1 (2)) ⊗ 1"


def test_json_output():
    code, out, _ = call("algebra", "product", "--algebra", "shuffle", "--json", "e[1]", "e[2]")
    assert code == 0
    assert json.loads(out) == {"terms": [{"key": "e[1,2]", "coef": "1"}, {"key": "e[2,1]", "coef": "1"}]}


def test_bhz_commands():
    code, out, _ = call("bhz", "degree", "--alpha", "3/10", "I(Xi1)I(Xi2)Xi3")
    assert code == 0
    assert out.strip() == "I(Xi1)I(Xi2)Xi3: 3alpha-1 = -1/10 (negative)"
    assert call("bhz", "delta-minus", "--alpha", "2/5", "(0)")[1].strip() == "1 ⊗ (0)"
    assert call("bhz", "delta-plus", "--alpha", "2/5", "Xi1")[1].strip() == "Xi1 ⊗ 1"


def test_verify_hopf_passes():
    code, out, _ = call("verify", "--suite", "hopf", "--max-nodes", "3", "--d", "1")
    assert code == 0
    assert "0 failed" in out


def test_deterministic_output():
    a = call("algebra", "product", "--algebra", "gl", "(1)", "(2 (1))")
    b = call("algebra", "product", "--algebra", "gl", "(1)", "(2 (1))")
    assert a == b


def test_parse_error_exit_code():
    code, _, err = call("algebra", "antipode", "--algebra", "ck", "(1 (2)")
    assert code == 2
    assert "^" in err


def test_usage_error_exit_code():
    assert call("algebra", "frobnicate", "--algebra", "ck", "(1)")[0] == 1
    assert call("bhz", "degree", "--alpha", "3/2", "Xi1")[0] == 1
    assert call("translate", "--v", "/nonexistent.json", "(1)")[0] == 1


def test_lift_cli(tmp_path):
    target = tmp_path / "trace.json"
    code, _, _ = call("lift", "--path", str(CONFIGS / "path.csv"), "--levels", "2", "--pairs", "steps", "--out", str(target))
    assert code == 0
    data = json.loads(target.read_text())
    assert len(data) == 64


def test_rde_run_cli():
    code, out, _ = call("rde", "run", "--config", str(CONFIGS / "rde_equivalence.json"))
    assert code == 0
    last = out.strip().splitlines()[-1]
    assert last.startswith("discrepancy")
    assert float(last.split()[1]) < 1e-3


def test_threads_env(monkeypatch):
    monkeypatch.setenv("HOPFPATH_THREADS", "1")
    assert call("verify", "--suite", "prelie", "--max-nodes", "3", "--d", "1")[0] == 0
