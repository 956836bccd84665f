import json
import os
import subprocess
import sys

FAST_ENV = dict(os.environ, TRIVIEWCAL_NO_NUMBA="1")


def run_cli(*args, env=FAST_ENV):
    return subprocess.run(
        [sys.executable, "-m", "triviewcal", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def export(path, *extra):
    out = run_cli(
        "export-sample", "--out", str(path), "--points", "120", "--seed", "9", *extra
    )
    assert out.returncode == 0, out.stderr
    return str(path)


def test_no_arguments_is_a_usage_error():
    out = run_cli()
    assert out.returncode == 2


def test_unknown_method_is_a_usage_error(tmp_path):
    f = export(tmp_path / "c.json")
    out = run_cli("calibrate", f, "--method", "ransac")
    assert out.returncode == 2
    assert "invalid choice" in out.stderr


def test_export_then_calibrate_roundtrip(tmp_path):
    f = export(tmp_path / "c.json")
    out = run_cli("calibrate", f)
    assert out.returncode == 0, out.stderr
    line = [l for l in out.stdout.splitlines() if l.startswith("mean_error_percent:")]
    assert len(line) == 1
    assert float(line[0].split(":")[1]) < 0.1


def test_roundtrip_on_default_backend(tmp_path):
    f = export(tmp_path / "c.json")
    out = run_cli("calibrate", f, env=dict(os.environ))
    assert out.returncode == 0, out.stderr


def test_json_report_shape(tmp_path):
    f = export(tmp_path / "c.json")
    out = run_cli("calibrate", f, "--json")
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert set(rep["K_est"]) == {"fx", "fy", "cx", "cy"}
    assert rep["method"] == "direct"
    assert rep["backend"] == "numpy"
    assert rep["converged"] is True
    assert rep["blocks_used"] == 1
    assert rep["mean_error_percent"] < 0.1


def test_report_out_file_matches_stdout(tmp_path):
    f = export(tmp_path / "c.json")
    rp = tmp_path / "report.txt"
    out = run_cli("calibrate", f, "--out", str(rp))
    assert out.returncode == 0
    assert rp.read_text() == out.stdout


def test_missing_init_names_the_field(tmp_path):
    f = export(tmp_path / "c.json")
    doc = json.loads(open(f).read())
    del doc["init_intrinsics"]
    open(f, "w").write(json.dumps(doc))
    out = run_cli("calibrate", f)
    assert out.returncode == 2
    assert "$.init_intrinsics" in out.stderr


def test_init_flag_substitutes_for_the_field(tmp_path):
    f = export(tmp_path / "c.json")
    doc = json.loads(open(f).read())
    del doc["init_intrinsics"]
    open(f, "w").write(json.dumps(doc))
    out = run_cli("calibrate", f, "--init", "1050,950,660,350")
    assert out.returncode == 0, out.stderr


def test_malformed_init_flag(tmp_path):
    f = export(tmp_path / "c.json")
    out = run_cli("calibrate", f, "--init", "1050,950")
    assert out.returncode == 2
    assert "--init" in out.stderr


def test_corrupt_json_is_a_schema_error(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    out = run_cli("calibrate", str(f))
    assert out.returncode == 2
    assert "error:" in out.stderr


def test_missing_file_is_a_schema_error(tmp_path):
    out = run_cli("calibrate", str(tmp_path / "absent.json"))
    assert out.returncode == 2


def test_msac_needs_two_blocks(tmp_path):
    f = export(tmp_path / "one.json")
    out = run_cli("calibrate", f, "--method", "msac")
    assert out.returncode == 2
    assert "at least 2 triplet blocks" in out.stderr


def test_msac_on_two_blocks(tmp_path):
    f = export(tmp_path / "two.json", "--triplets", "2", "--noise", "0.2")
    out = run_cli("calibrate", f, "--method", "msac", "--json")
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert rep["selected_block"] in (0, 1)
    assert len(rep["candidate_scores"]) == 2
    assert rep["mean_error_percent"] < 1.0


def test_fundamental_method(tmp_path):
    f = export(tmp_path / "two.json", "--triplets", "2")
    out = run_cli("calibrate", f, "--method", "fundamental", "--json")
    assert out.returncode == 0, out.stderr
    rep = json.loads(out.stdout)
    assert rep["method"] == "fundamental"
    assert rep["blocks_used"] == 6  # 3 view pairs per triplet block
    assert rep["mean_error_percent"] < 1.0


def test_degenerate_points_give_no_model(tmp_path):
    f = export(tmp_path / "c.json")
    doc = json.loads(open(f).read())
    block = doc["triplets"][0]
    block["points"] = [[float(i)] * 6 for i in range(30)]  # collinear everywhere
    open(f, "w").write(json.dumps(doc))
    out = run_cli("calibrate", f)
    assert out.returncode == 3
    assert "not enough usable" in out.stderr


def test_export_no_gt_omits_error_metrics(tmp_path):
    f = export(tmp_path / "nogt.json", "--no-gt")
    doc = json.loads(open(f).read())
    assert doc["gt_intrinsics"] is None
    out = run_cli("calibrate", f)
    assert out.returncode == 0
    assert "mean_error_percent" not in out.stdout


def test_export_is_deterministic(tmp_path):
    a = export(tmp_path / "a.json")
    b = export(tmp_path / "b.json")
    assert open(a).read() == open(b).read()


def test_synth_bench_smoke_and_determinism(tmp_path):
    args = [
        "synth-bench",
        "--runs", "2",
        "--noise", "0.5",
        "--methods", "direct",
        "--points", "120",
        "--seed", "5",
        "--json",
    ]
    out1 = run_cli(*args, "--out", str(tmp_path / "r1"))
    assert out1.returncode == 0, out1.stderr
    assert "noise=0.5 method=direct" in out1.stdout
    out2 = run_cli(*args, "--out", str(tmp_path / "r2"))
    assert out2.returncode == 0
    csv1 = (tmp_path / "r1" / "runs.csv").read_text()
    csv2 = (tmp_path / "r2" / "runs.csv").read_text()
    assert csv1 == csv2
    doc = json.loads((tmp_path / "r1" / "results.json").read_text())
    assert doc["summaries"][0]["method"] == "direct"
    assert doc["summaries"][0]["n"] == 2


def test_synth_bench_rejects_unknown_method(tmp_path):
    out = run_cli("synth-bench", "--methods", "magic", "--out", str(tmp_path / "r"))
    assert out.returncode == 2
    assert "unknown methods" in out.stderr
