"""Command-line interface tests: exit codes, outputs, and reproducibility."""

import math
import os

import pytest

from hemiradon.cli import main


def read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def manifest_dict(path):
    out = {}
    for line in read(path).splitlines():
        key, _, val = line.partition(" = ")
        out[key] = val
    return out


FAST_FORWARD = ["forward", "--kind", "transversal", "--m", "40",
                "--points", "0,0;0.5,-0.3"]


class TestForward:
    def test_writes_csv_and_manifest(self, tmp_path, capsys):
        rc = main(FAST_FORWARD + ["--out", str(tmp_path)])
        assert rc == 0
        assert "points = 2" in capsys.readouterr().out
        csv = read(tmp_path / "result.csv").splitlines()
        assert csv[0] == "x1,x2,value"
        assert len(csv) == 3
        # the unit gaussian default phantom: psi(0, 0) = sqrt(pi)
        val = float(csv[1].split(",")[-1])
        assert val == pytest.approx(math.sqrt(math.pi), rel=1e-6)
        m = manifest_dict(tmp_path / "manifest.txt")
        assert m["command"] == "forward"
        assert m["m"] == "40"
        assert m["phantom"] == "gaussian"

    def test_reruns_are_byte_identical(self, tmp_path):
        # identical full configuration, including the output directory
        assert main(FAST_FORWARD + ["--out", str(tmp_path)]) == 0
        first = (read(tmp_path / "result.csv"), read(tmp_path / "manifest.txt"))
        assert main(FAST_FORWARD + ["--out", str(tmp_path)]) == 0
        assert read(tmp_path / "result.csv") == first[0]
        assert read(tmp_path / "manifest.txt") == first[1]

    def test_classical_points_have_extra_slot(self, tmp_path):
        rc = main(["forward", "--kind", "classical", "--m", "40",
                   "--points", "0,1,0.5", "--out", str(tmp_path)])
        assert rc == 0
        assert read(tmp_path / "result.csv").splitlines()[0] == \
            "theta1,theta2,t,value"

    def test_sonar_uses_half_space_phantom(self, tmp_path):
        rc = main(["forward", "--kind", "sonar", "--m", "40",
                   "--points", "0,1", "--out", str(tmp_path)])
        assert rc == 0
        m = manifest_dict(tmp_path / "manifest.txt")
        assert m["phantom"] == "bump"
        assert m["domain"] == "half"

    def test_rejects_unknown_kind(self, tmp_path, capsys):
        rc = main(["forward", "--kind", "helical", "--out", str(tmp_path)])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_rejects_malformed_points(self, tmp_path, capsys):
        rc = main(FAST_FORWARD[:-1] + ["0,0;0.5", "--out", str(tmp_path)])
        assert rc == 2
        assert "points" in capsys.readouterr().err


class TestConfigFile:
    def test_sections_scope_to_command(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n = 2\n[forward]\nm = 48\n[invert]\nell = 7\n",
                       encoding="utf-8")
        out = tmp_path / "out"
        rc = main(["forward", "--kind", "transversal", "--points", "0,0",
                   "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        m = manifest_dict(out / "manifest.txt")
        assert m["m"] == "48"
        assert "ell" not in m

    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("m = 48\n", encoding="utf-8")
        out = tmp_path / "out"
        rc = main(["forward", "--kind", "transversal", "--points", "0,0",
                   "--m", "52", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        assert manifest_dict(out / "manifest.txt")["m"] == "52"

    def test_unparseable_value_names_the_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("m = forty\n", encoding="utf-8")
        rc = main(["forward", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2
        assert "key 'm'" in capsys.readouterr().err

    def test_missing_file_and_bad_line(self, tmp_path, capsys):
        assert main(["forward", "--config", str(tmp_path / "nope.cfg")]) == 2
        bad = tmp_path / "bad.cfg"
        bad.write_text("just words\n", encoding="utf-8")
        assert main(["forward", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "config error" in err

    def test_comments_and_blanks_ignored(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# header\n\nm = 44  # inline\n", encoding="utf-8")
        out = tmp_path / "out"
        rc = main(["forward", "--kind", "transversal", "--points", "0,0",
                   "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        assert manifest_dict(out / "manifest.txt")["m"] == "44"


class TestVerify:
    def test_identity_report(self, tmp_path, capsys):
        rc = main(["verify", "--identity", "parabolic_via_transversal",
                   "--m", "96", "--points", "0.2,0.5;1,1.4",
                   "--out", str(tmp_path)])
        assert rc == 0
        assert "max_rel_err" in capsys.readouterr().out
        csv = read(tmp_path / "result.csv").splitlines()
        assert csv[0] == "x1,x2,lhs,rhs,abs_err,rel_err"
        worst = max(float(r.split(",")[-1]) for r in csv[1:])
        assert worst < 1e-7

    def test_slope_intercept_pairs(self, tmp_path):
        rc = main(["verify", "--identity", "slope_intercept", "--m", "60",
                   "--points", "0.6,0.8,0.5;0,1,0", "--out", str(tmp_path)])
        assert rc == 0
        csv = read(tmp_path / "result.csv").splitlines()
        assert csv[0] == "theta1,theta2,t,lhs,rhs,abs_err,rel_err"
        worst = max(float(r.split(",")[-1]) for r in csv[1:])
        assert worst < 1e-10

    def test_plane_directions_must_be_unit(self, tmp_path, capsys):
        rc = main(["forward", "--kind", "classical", "--points", "1,1,0.5",
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "unit" in capsys.readouterr().err

    def test_dilation_identity_with_lam(self, tmp_path):
        rc = main(["verify", "--identity", "dilation", "--lam", "2,0.5",
                   "--m", "48", "--points", "0.3,0.4", "--out", str(tmp_path)])
        assert rc == 0
        assert manifest_dict(tmp_path / "manifest.txt")["lam"] == "2,0.5"

    def test_requires_known_identity(self, tmp_path, capsys):
        rc = main(["verify", "--identity", "nonsense", "--out", str(tmp_path)])
        assert rc == 2
        assert "identity" in capsys.readouterr().err


class TestNormScan:
    def test_admissible_triple_is_flat(self, tmp_path, capsys):
        rc = main(["norm-scan", "--p", "1.5", "--q", "3", "--s", "3",
                   "--lambdas", "0.5,1,2", "--out", str(tmp_path)])
        assert rc == 0
        assert "ratio variation" in capsys.readouterr().out
        m = manifest_dict(tmp_path / "manifest.txt")
        assert float(m["variation"]) == pytest.approx(1.0, abs=1e-6)
        csv = read(tmp_path / "result.csv").splitlines()
        assert csv[0] == "lam1,lam2,output_norm,input_norm,ratio"
        assert len(csv) == 4


class TestConstants:
    def test_product_is_one_in_2d(self, tmp_path):
        rc = main(["constants", "--n", "2", "--out", str(tmp_path)])
        assert rc == 0
        rows = {line.split(",")[0]: float(line.split(",")[1])
                for line in read(tmp_path / "result.csv").splitlines()[1:]}
        assert rows["product"] == pytest.approx(1.0, rel=1e-9)

    def test_odd_dimension_order_default(self, tmp_path):
        rc = main(["constants", "--n", "3", "--out", str(tmp_path)])
        assert rc == 0
        rows = {line.split(",")[0]: float(line.split(",")[1])
                for line in read(tmp_path / "result.csv").splitlines()[1:]}
        assert rows["hypersingular_constant"] == pytest.approx(
            -3.2876650489104358, rel=1e-12)


class TestFailurePaths:
    def test_numerical_failure_appends_to_manifest(self, tmp_path, capsys):
        # a sonar reconstruction target on the boundary is a domain error
        # discovered after configuration is already resolved
        rc = main(["invert", "--kind", "sonar", "--m", "40",
                   "--points", "0,-1", "--out", str(tmp_path)])
        assert rc == 1
        assert "numerical failure" in capsys.readouterr().err
        text = read(tmp_path / "manifest.txt")
        assert "error = " in text
        assert not os.path.exists(tmp_path / "result.csv")

    def test_thread_cap_must_be_integer(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("HEMIRADON_MAX_THREADS", "many")
        rc = main(FAST_FORWARD + ["--out", str(tmp_path)])
        assert rc == 2
        assert "HEMIRADON_MAX_THREADS" in capsys.readouterr().err

    def test_thread_cap_of_one_still_works(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HEMIRADON_MAX_THREADS", "1")
        assert main(FAST_FORWARD + ["--out", str(tmp_path)]) == 0


class TestEntryPoint:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["--version"])
        assert ei.value.code == 0
        assert "0.1.0" in capsys.readouterr().out

    def test_command_required(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main([])
        assert ei.value.code == 2
