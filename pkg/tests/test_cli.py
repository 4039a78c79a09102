import io
import json
import subprocess
import sys

import pytest

from siegelcert.cli import RunConfig, UsageError, run
from siegelcert.series import CoeffTable, delta_table, write_table
from siegelcert.symmat import SymMat


def call(*argv, env=None):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def as_json(text):
    return json.loads(text)


def test_sturm_golden():
    code, text = call("sturm", "--n", "1", "--ell", "12", "--M", "1")
    assert code == 0
    d = as_json(text)
    assert d["R"] == 3.0152812134786475
    assert d["residual"] < 1e-10
    assert d["pass"] is True


def test_unknown_subcommand(capsys):
    code, text = call("frobnicate")
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_missing_argument_is_usage_error():
    assert call("sturm", "--n", "1")[0] == 1
    assert call("bounds", "--which", "T", "--ell", "0", "--n", "1", "--mu", "1/2")[0] == 1


def test_verify_lemmas_small():
    code, text = call("verify-lemmas", "--grid", "small")
    assert code == 0
    recs = as_json(text)["records"]
    assert recs and all(r["pass"] and r["margin"] > 0 for r in recs)


def test_verify_lemmas_deterministic():
    assert call("verify-lemmas")[1] == call("verify-lemmas")[1]


def test_human_margin_table():
    code, text = call("--human", "verify-lemmas")
    assert code == 0 and text.splitlines()[0].split()[:4] == ["check", "lhs", "rhs", "margin"]


def test_reduce_minkowski():
    code, text = call("reduce", "--kind", "minkowski", '[["5","2"],["2","1"]]')
    d = as_json(text)
    assert code == 0 and d["reduced"][0][0] == "1"
    assert {c["check"] for c in d["checks"]} == {"unimodular", "reproduces", "det_preserved", "hermite_bound"}


def test_reduce_siegel_from_file(tmp_path):
    p = tmp_path / "z.json"
    p.write_text(json.dumps({"re": [["1/2"]], "im": [["1/10"]]}))
    code, text = call("reduce", "--kind", "siegel", str(p))
    d = as_json(text)
    assert code == 0 and d["min_eigenvalue"] >= 3**0.5 / 2 - 1e-8


def test_bad_input_exit_1():
    assert call("reduce", "--kind", "minkowski", "[[1, 2], [3")[0] == 1
    assert call("reduce", "--kind", "minkowski", '[["1","2"],["2","1"]]')[0] == 1
    assert call("reduce", "--kind", "minkowski", '[["1","0"],["0","1/2"],["0"]]')[0] == 1


def test_enumerate_trace():
    code, text = call("enumerate", "--n", "2", "--M", "1", "--trace", "2")
    lines = text.strip().splitlines()
    assert code == 0
    assert [json.loads(s) for s in lines[:-1]] == [[["1", "-1/2"], ["-1/2", "1"]], [["1", "0"], ["0", "1"]],
                                                   [["1", "1/2"], ["1/2", "1"]]]
    assert json.loads(lines[-1]) == {"bound": "16", "count": 3, "cutoff": {"trace": "2"}, "pass": True}


def test_enumerate_det_reduced():
    code, text = call("enumerate", "--n", "2", "--det", "1", "--reduced")
    assert code == 0 and json.loads(text.strip().splitlines()[-1])["count"] == 2
    assert call("enumerate", "--n", "2", "--det", "1")[0] == 1


def test_enumerate_cap(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"caps": {"enumerate": 5}}))
    assert call("--config", str(cfg), "enumerate", "--n", "2", "--trace", "3")[0] == 1


@pytest.mark.parametrize("which", ["S", "T", "sturm", "sup"])
def test_bounds_verify(which):
    code, text = call("bounds", "--which", which, "--ell", "12", "--n", "1", "--mu", "1/2", "--R", "5",
                      "--eps", "0.01", "--verify")
    d = as_json(text)
    assert code == 0 and d["checks"] and all(c["pass"] for c in d["checks"])
    assert d["report"]["value"] > 0


def test_bounds_T_margin_positive_genus2():
    code, text = call("bounds", "--which", "T", "--ell", "6", "--n", "2", "--mu", "1/4", "--M", "2", "--R", "2",
                      "--verify")
    d = as_json(text)
    assert code == 0 and d["checks"][0]["margin"] > 0


def test_failed_check_exits_2(tmp_path):
    t = CoeffTable(2, 11, 1, {SymMat.identity(2): 1.0})
    p = tmp_path / "odd.jsonl"
    write_table(t, p)
    code, text = call("check", "--table", str(p), "--which", "psym")
    d = as_json(text)
    assert code == 2 and d["pass"] is False and d["violations"]


def test_check_commands(tmp_path):
    t = CoeffTable(2, 10, 1, {SymMat.identity(2): 1.0, SymMat([[1, 0], [0, 2]]): 0.5})
    p = tmp_path / "g2.jsonl"
    write_table(t, p)
    code, text = call("check", "--table", str(p), "--which", "psym")
    assert code == 0 and as_json(text)["violations"] == []
    code, text = call("check", "--table", str(p), "--which", "fj", "--t", "1", "--trace-cutoff", "4")
    d = as_json(text)
    assert code == 0 and d["slice"]
    code, text = call("check", "--table", str(p), "--which", "growth", "--Q", "1", "--E", "1")
    assert code == 0 and as_json(text)["certificate"]["passed"]
    code, text = call("check", "--table", str(p), "--which", "growth", "--Q", "0.1", "--E", "1")
    assert code == 2


def test_check_raw_table(tmp_path):
    p = tmp_path / "raw.jsonl"
    p.write_text('{"M": 1, "convention": 1, "ell": "10", "n": 2}\n'
                 '{"T": [["1","0"],["0","2"]], "a_re": "1", "a_im": "0"}\n'
                 '{"T": [["2","0"],["0","1"]], "a_re": "1.5", "a_im": "0"}\n')
    code, text = call("check", "--table", str(p), "--which", "psym")
    d = as_json(text)
    assert code == 2 and d["canonical"] is False


def test_evaluate(tmp_path):
    p = tmp_path / "delta.jsonl"
    write_table(delta_table(30), p)
    z = json.dumps({"re": [["0"]], "im": [["1"]]})
    code, text = call("evaluate", "--table", str(p), "--z", z)
    d = as_json(text)
    assert code == 0 and abs(d["value"][0] - 0.0017853698506421524) < 1e-14 and d["error"] is None
    code, text = call("evaluate", "--table", str(p), "--z", z, "--R", "30", "--supbeta", "1.1")
    d = as_json(text)
    assert code == 0 and 0 < d["error"] < 1e-10


def test_run_config():
    with pytest.raises(UsageError):
        RunConfig(precision=40)
    with pytest.raises(UsageError):
        RunConfig(tolerance=0)
    c = RunConfig(epsilonN={"3": 0.3})
    assert c.eps(3) == 0.3 and c.eps(2) == 0.5
    with pytest.raises(UsageError):
        RunConfig().eps(4)


def test_config_from_env(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epsilonN": {"1": 0.8}}))
    monkeypatch.setenv("SIEGELCERT_CONFIG", str(cfg))
    code, text = call("sturm", "--n", "1", "--ell", "12")
    assert code == 0 and as_json(text)["R"] != 3.0152812134786475
    cfg.write_text(json.dumps({"bogus": 1}))
    assert call("sturm", "--n", "1", "--ell", "12")[0] == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "siegelcert.cli", "sturm", "--n", "1", "--ell", "12"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["R"] == 3.0152812134786475
