import json
import subprocess
import sys

import pytest

from posetalg.cli import main

FIG2_DSL = "elems p a b; covers a<p b<p; labels p:[a,b]\n"
SINGLETON_DSL = "elems x\n"
E1_DSL = "vertices v0 v1; arrows a1:v1->v1 b1:v1->v0\n"


@pytest.fixture
def fig2_file(tmp_path):
    f = tmp_path / "fig2.poset"
    f.write_text(FIG2_DSL)
    return f


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_info_fig2(fig2_file, capsys):
    code, rep = run_json(capsys, ["info", str(fig2_file)])
    assert code == 0
    assert rep["schema"] == 1 and rep["tool"] == "posetalg"
    assert rep["lower_set_count"] == 5
    assert rep["forest"] is False
    assert rep["apw_graph_shape"] is False
    assert rep["maximal_chains"] == {"p": 2}
    assert set(rep["inputs"]) == {str(fig2_file)}


def test_info_singleton(tmp_path, capsys):
    f = tmp_path / "one.poset"
    f.write_text(SINGLETON_DSL)
    code, rep = run_json(capsys, ["info", str(f)])
    assert code == 0
    assert rep["monoid"]["primes"] == ["x"]
    assert rep["monoid"]["free"] == {"x": True}
    assert rep["forest"] is True


def test_pipeline_fig2(fig2_file, capsys):
    code, rep = run_json(capsys, ["pipeline", str(fig2_file)])
    assert code == 0
    assert rep["verdict"] == "iso"
    assert rep["witness"]
    assert "p" in rep["per_maximal"]
    stages = rep["per_maximal"]["p"]["stages"]
    assert stages[0]["primes"] == ["a", "b", "p"]


def test_verify_algebra_fig2(fig2_file, capsys):
    code, rep = run_json(
        capsys, ["verify-algebra", str(fig2_file), "--samples", "15", "--seed", "3"]
    )
    assert code == 0
    assert rep["relations_ok"] and rep["oracle_mismatches"] == 0 and rep["lemma26_ok"]
    assert rep["relation_count"] > 40


def test_graphmon_e1(tmp_path, capsys):
    f = tmp_path / "e1.quiver"
    f.write_text(E1_DSL)
    code, rep = run_json(capsys, ["graphmon", str(f)])
    assert code == 0
    assert rep["hereditary_saturated"] == [[], ["v0"], ["v0", "v1"]]
    assert rep["loop_chain_r"] == 1 and rep["loop_chain_check"] is True


def test_export(fig2_file, tmp_path, capsys):
    outdir = tmp_path / "dots"
    assert main(["export", str(fig2_file), "--what", "hasse", "--out", str(outdir)]) == 0
    capsys.readouterr()
    assert (outdir / "hasse.dot").read_text().startswith("digraph")
    assert main(["export", str(fig2_file), "--what", "quiver", "--out", str(outdir)]) == 0
    capsys.readouterr()
    assert '"p" -> "a"' in (outdir / "quiver.dot").read_text()
    assert main(["export", str(fig2_file), "--what", "stages", "--out", str(outdir)]) == 0
    capsys.readouterr()
    assert (outdir / "stage_p_0.dot").exists()


def test_determinism_byte_identical(fig2_file, capsys):
    argv = ["verify-algebra", str(fig2_file), "--samples", "10", "--seed", "7"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second


def test_out_dir_writes_report(fig2_file, tmp_path, capsys):
    outdir = tmp_path / "reports"
    code = main(["info", str(fig2_file), "--out", str(outdir)])
    capsys.readouterr()
    assert code == 0
    rep = json.loads((outdir / "report.json").read_text())
    assert rep["command"] == "info"


def test_config_file_defaults_and_flag_precedence(fig2_file, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": 5, "seed": 11}))
    code, rep = run_json(capsys, ["--config", str(cfg), "verify-algebra", str(fig2_file)])
    assert code == 0 and rep["oracle_samples"] == 5 and rep["seed"] == 11
    code, rep = run_json(
        capsys,
        ["--config", str(cfg), "verify-algebra", str(fig2_file), "--samples", "3"],
    )
    assert rep["oracle_samples"] == 3  # flags win


def test_exit_code_nonzero_on_failed_verification(fig2_file, capsys, monkeypatch):
    import posetalg.cli as cli_mod

    def failing_suite(poset, maxdeg=3):
        return [{"relation": "A.13c[p,a]", "ok": False}]

    monkeypatch.setattr(cli_mod.tp, "run_relation_suite", failing_suite)
    code = main(["verify-algebra", str(fig2_file), "--samples", "2"])
    out = json.loads(capsys.readouterr().out)
    assert code == 1 and out["ok"] is False


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "posetalg.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "pipeline" in proc.stdout
