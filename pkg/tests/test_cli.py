import json

import numpy as np
import pytest

from eqwalk.cli import geometric_snapshots, parse_angle, run_command


def test_parse_angle_forms():
    assert parse_angle("pi/4") == pytest.approx(np.pi / 4)
    assert parse_angle("pi") == pytest.approx(np.pi)
    assert parse_angle("3pi/4") == pytest.approx(3 * np.pi / 4)
    assert parse_angle("2*pi/3") == pytest.approx(2 * np.pi / 3)
    assert parse_angle("-pi/6") == pytest.approx(-np.pi / 6)
    assert parse_angle("0.7853981633974483") == pytest.approx(np.pi / 4)
    assert parse_angle(0.5) == 0.5
    with pytest.raises(ValueError):
        parse_angle("pie/4")


def test_geometric_snapshots():
    assert geometric_snapshots(8) == [1, 2, 4, 8]
    assert geometric_snapshots(12) == [1, 2, 4, 8, 12]


def test_elephant_command_and_determinism(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    args = ["elephant", "--theta", "pi/4", "--steps", "8", "--trajectories", "50",
            "--seed", "42", "--snapshots", "4,8"]
    assert run_command(args + ["--out", str(out1)]) == 0
    assert run_command(args + ["--out", str(out2)]) == 0
    for name in ("moments.csv", "dist_t4.csv", "dist_t8.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    man = json.loads((out1 / "manifest.json").read_text())
    assert man["command"] == "elephant"
    assert man["seed"] == 42
    assert man["params"]["trajectories"] == 50
    header = (out1 / "moments.csv").read_text().splitlines()[0]
    assert header == "t,mean,var,kurtosis,se_mean,se_var"
    dist_header = (out1 / "dist_t8.csv").read_text().splitlines()[0]
    assert dist_header == "l,p"


def test_manifest_round_trip(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert run_command(["elephant", "--steps", "6", "--trajectories", "20",
                        "--seed", "7", "--out", str(out1)]) == 0
    assert run_command(["elephant", "--config", str(out1 / "manifest.json"),
                        "--out", str(out2)]) == 0
    assert (out1 / "moments.csv").read_bytes() == (out2 / "moments.csv").read_bytes()


def test_standard_command(tmp_path):
    out = tmp_path / "std"
    assert run_command(["standard", "--theta", "pi/4", "--steps", "16",
                        "--seed", "0", "--out", str(out)]) == 0
    rows = (out / "dist_t16.csv").read_text().splitlines()[1:]
    total = sum(float(r.split(",")[1]) for r in rows)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_classical_command(tmp_path):
    out = tmp_path / "cl"
    assert run_command(["classical", "--p", "0.5", "--q", "0.5", "--steps", "64",
                        "--trajectories", "400", "--seed", "3",
                        "--out", str(out)]) == 0
    header = (out / "erw_moments.csv").read_text().splitlines()[0]
    assert header == "t,mean,var,se_mean,se_var"


def test_trace_distance_command(tmp_path):
    out = tmp_path / "td"
    assert run_command(["trace-distance", "--steps", "6", "--trajectories", "10",
                        "--delta", "0.01", "--seed", "1", "--out", str(out)]) == 0
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0] == "t,D,v"
    assert float(lines[1].split(",")[1]) == pytest.approx(1.0, abs=1e-10)


def test_kspace_eigen_command(tmp_path):
    out = tmp_path / "kse"
    assert run_command(["kspace-eigen", "--theta", "pi/4", "--times", "2,5",
                        "--k-points", "4", "--out", str(out)]) == 0
    lines = (out / "eigen.csv").read_text().splitlines()
    assert lines[0].startswith("k,t,re_l1,im_l1")
    assert len(lines) == 1 + 2 * 4


def test_exact_channel_command(tmp_path):
    out = tmp_path / "ch"
    assert run_command(["exact-channel", "--lattice", "128", "--steps", "12",
                        "--snapshots", "12", "--out", str(out)]) == 0
    lines = (out / "channel_moments.csv").read_text().splitlines()
    assert lines[0] == "t,var"
    assert len(lines) == 13
    assert (out / "dist_t12.csv").exists()


def test_fit_command(tmp_path):
    out = tmp_path / "fit"
    out.mkdir()
    t = np.arange(1, 40)
    with open(out / "moments.csv", "w") as fh:
        fh.write("t,mean,var,kurtosis,se_mean,se_var\n")
        for ti in t:
            fh.write(f"{ti},0,{2.0 * ti ** 3},0,0,0\n")
    assert run_command(["fit", "--input", str(out / "moments.csv"),
                        "--column", "var", "--out", str(out)]) == 0
    fit = json.loads((out / "fit.json").read_text())
    assert fit["exponent"] == pytest.approx(3.0, abs=1e-10)
    assert fit["coefficient"] == pytest.approx(2.0, rel=1e-9)


def test_config_error_exit_codes(tmp_path, capsys):
    # bad range -> 2, names the field
    assert run_command(["classical", "--p", "1.5", "--out", str(tmp_path)]) == 2
    assert "p must be" in capsys.readouterr().err
    assert run_command(["elephant", "--theta", "nonsense", "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "angle" in err
    # runtime error (aliasing guard) -> 1
    code = run_command(["exact-channel", "--lattice", "32", "--steps", "24",
                        "--snapshots", "24", "--out", str(tmp_path)])
    assert code == 1
    assert "support guard" in capsys.readouterr().err


def test_json_format(tmp_path):
    out = tmp_path / "j"
    assert run_command(["classical", "--steps", "16", "--trajectories", "50",
                        "--seed", "2", "--format", "json", "--out", str(out)]) == 0
    rows = json.loads((out / "erw_moments.json").read_text())
    assert rows[0]["t"] == "1"
