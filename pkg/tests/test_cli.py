import csv
import io
import json
import math
import subprocess
import sys

import pytest

from mixvol.cli import (
    EXIT_INCONCLUSIVE,
    EXIT_INVALID,
    EXIT_OK,
    RunConfig,
    UsageError,
    main,
    parse_bodies,
    run_config,
)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_mixed_volume_cubes(capsys):
    code, out, _ = run(["mixed-volume", "--bodies", "cube3,cube3,cube3", "--format", "json"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["result"]["value"] == pytest.approx(1.0)


def test_mixed_volume_segments(capsys):
    code, out, _ = run(["mixed-volume", "--bodies", "seg:e1,seg:e2", "--n", "2", "--format", "json"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["result"]["value"] == pytest.approx(0.5)


def test_mixed_volume_table_and_csv(capsys):
    code, out, _ = run(["mixed-volume", "--bodies", "cube2,cube2"], capsys)
    assert code == EXIT_OK and out.startswith("mixed volume  1")
    code, out, _ = run(["mixed-volume", "--bodies", "cube2,cube2", "--format", "csv"], capsys)
    assert next(csv.DictReader(io.StringIO(out)))["value"] == "1.0"


def test_ball_shortcut_parameters_stay_together(capsys):
    code, out, _ = run(["mixed-volume", "--bodies", "ball:k=2,m=16,cube2", "--format", "json"], capsys)
    assert code == EXIT_OK
    cfg = json.loads(out)["config"]
    assert cfg["bodies"][0]["m"] == 16 and cfg["bodies"][1]["kind"] == "cube"


@pytest.mark.parametrize(
    "argv,field",
    [
        (["mixed-volume", "--bodies", "[{\"kind\": \"cube\", \"dim\": 3"], "malformed JSON"),
        (["mixed-volume", "--bodies", "[{\"kind\": \"cube\", \"dim\": \"x\"}]"], "dim"),
        (["mixed-volume", "--bodies", "cube3,cube2"], "dimensions"),
        (["mixed-volume", "--bodies", "cube3,cube3"], "exactly 3"),
        (["mixed-volume", "--bodies", "blob3"], "blob3"),
        (["mixed-volume", "--bodies", "cube3,,cube3"], "empty"),
        (["verify", "theorem", "--bodies", "cube2", "--samples", "1"], "--samples"),
        (["verify", "theorem", "--bodies", "cube2,cube2"], "d < n"),
        (["verify", "lemma"], "--k"),
        (["verify", "lemma", "--k", "9"], "--k"),
        (["verify", "theorem", "--bodies", "cube2", "--n", "3"], "--n"),
        (["verify", "theorem", "--bodies", "cube3", "--d", "2"], "--d"),
        (["mixed-volume", "--bodies", "@/nonexistent/x.json"], "cannot read"),
        (["verify", "bogus"], None),
        (["mixed-volume", "--seed", "-1", "--bodies", "cube2,cube2"], "seed"),
    ],
)
def test_invalid_input_exit_2_no_output(argv, field, capsys):
    code, out, err = run(argv, capsys)
    assert code == EXIT_INVALID
    assert out == ""
    if field:
        assert field in err


def test_bodies_from_file(tmp_path, capsys):
    p = tmp_path / "bodies.json"
    p.write_text(json.dumps([{"kind": "vertices", "points": [[0, 0], [1, 0], [0, 1]]}, {"kind": "cube", "dim": 2}]))
    code, out, _ = run(["mixed-volume", "--bodies", f"@{p}", "--format", "json"], capsys)
    # V(T, C) = 1/2 (h_T(e1) + h_T(e2) + h_T(-e1) + h_T(-e2)) = 1
    assert code == EXIT_OK
    assert json.loads(out)["result"]["value"] == pytest.approx(1.0)


def test_verify_theorem_square(capsys):
    argv = ["verify", "theorem", "--bodies", "cube2", "--d", "1", "--n", "2", "--samples", "10000", "--seed", "7",
            "--format", "json"]
    code, out, _ = run(argv, capsys)
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["verdict"] == "BOUND_HOLDS"
    assert abs(rep["margin"]) < 0.01
    assert rep["config"]["seed"] == 7 and rep["config"]["samples"] == 10000
    assert set(rep) >= {"schema_version", "config", "claim", "lhs", "rhs", "verdict", "margin", "timing"}


def test_verify_constants(capsys):
    code, out, _ = run(["verify", "constants", "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == EXIT_OK
    assert max(r["relative_gap"] for r in rep["rows"]) <= 1e-10
    code, out, _ = run(["constants"], capsys)
    assert code == EXIT_OK and "all gaps <= 1e-10: True" in out


def test_verify_identity(capsys):
    argv = ["verify", "identity", "--n", "3", "--d", "2", "--bodies", "cube3,cube3", "--samples", "100", "--seed", "1",
            "--format", "json"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    assert json.loads(out)["checks"]["max_residual"] <= 1e-7


def test_verify_lemma(capsys):
    code, out, _ = run(["verify", "lemma", "--k", "3", "--samples", "20000", "--needles", "300", "--format", "json"],
                       capsys)
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["constant_used"] == pytest.approx(0.25)


def test_inconclusive_exit_code(capsys):
    # a coarse ball bracket around a non-equality case cannot decide
    argv = ["verify", "theorem", "--bodies", "simplex3,simplex3", "--samples", "2000", "--m-ball", "16"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_INCONCLUSIVE
    assert "INCONCLUSIVE" in out


def test_probe_exit_code(capsys):
    code, out, _ = run(["verify", "probe", "--bodies", "cube3,cube3", "--samples", "500", "--format", "json"], capsys)
    rep = json.loads(out)
    assert rep["claim"] == "probe"
    assert code == (EXIT_OK if rep["verdict"] == "BOUND_HOLDS" else EXIT_INCONCLUSIVE)


def test_csv_per_sample(capsys):
    code, out, _ = run(["verify", "theorem", "--bodies", "cube2", "--samples", "40", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["sample_index", "value"]
    assert len(rows) == 41
    assert all(1.0 <= float(v) <= math.sqrt(2) + 1e-12 for _, v in rows[1:])


def test_out_file_and_replay(tmp_path, capsys):
    out_path = tmp_path / "rep.json"
    argv = ["verify", "theorem", "--bodies", "cube3,cube3", "--samples", "600", "--seed", "4", "--format", "json",
            "--out", str(out_path)]
    code, out, _ = run(argv, capsys)
    assert out == ""
    first = out_path.read_text()
    code2, replayed, _ = run(["replay", str(out_path), "--workers", "2"], capsys)
    assert code2 == code
    assert replayed == first


def test_timing_is_opt_in(capsys):
    argv = ["verify", "theorem", "--bodies", "cube2", "--samples", "50", "--format", "json"]
    _, out, _ = run(argv, capsys)
    assert json.loads(out)["timing"] is None
    _, out, _ = run(argv + ["--timing"], capsys)
    assert json.loads(out)["timing"]["wall_time"] >= 0


def test_unwritable_out(capsys):
    code, out, err = run(["constants", "--out", "/nonexistent/dir/x.txt"], capsys)
    assert code == EXIT_INVALID and "--out" in err


def test_replay_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(["replay", str(bad)], capsys)[0] == EXIT_INVALID
    bad.write_text("not json")
    assert run(["replay", str(bad)], capsys)[0] == EXIT_INVALID
    bad.write_text(json.dumps({"config": {"command": "verify", "colour": 1}}))
    assert run(["replay", str(bad)], capsys)[0] == EXIT_INVALID


def test_run_config_directly():
    cfg = RunConfig(command="mixed-volume", bodies=[{"kind": "cube", "dim": 2}] * 2, format="json")
    code, out = run_config(cfg)
    assert code == EXIT_OK
    with pytest.raises(UsageError):
        run_config(RunConfig(command="explode"))
    with pytest.raises(UsageError):
        run_config(RunConfig(command="constants", format="xml"))


def test_parse_bodies_forms():
    assert len(parse_bodies("cube3,seg:e1", 3)) == 2
    assert parse_bodies('{"kind": "cube", "dim": 2}')[0].dim == 2
    with pytest.raises(UsageError):
        parse_bodies("[]")


def test_help_lists_shortcuts(capsys):
    assert main(["verify", "--help"]) == EXIT_OK
    assert "ball:k=3,m=256" in capsys.readouterr().out


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "mixvol", "mixed-volume", "--bodies", "seg:e1,seg:e2", "--n", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "0.5" in r.stdout
