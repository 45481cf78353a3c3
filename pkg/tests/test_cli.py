import json
import os

import pytest

import main
from tests.test_presets import TINY

SAMPLE_DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "sample_data")
TABLE1_CONFIG = os.path.join(SAMPLE_DATA, "table1_config.yaml")


@pytest.fixture
def presets_file(tmp_path):
    path = tmp_path / "presets.yaml"
    path.write_text(TINY, encoding="utf-8")
    return str(path)


class TestConfigRuns:

    def test_config_run_writes_outputs(self, tmp_path, capsys):
        code = main.main(["--config", TABLE1_CONFIG, "--horizon", "500", "--seeds", "1,2",
                          "--out", str(tmp_path), "--quiet"])
        assert code == 0
        for suffix in ("trace.csv", "summary.csv", "json"):
            assert (tmp_path / f"table1-fbm.{suffix}").exists()
        payload = json.loads((tmp_path / "table1-fbm.json").read_text())
        assert payload["overview"]["horizon"] == 500
        assert payload["overview"]["seeds"] == [1, 2]
        assert "Summary saved" in capsys.readouterr().out

    def test_out_directory_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STACKLAB_OUT", str(tmp_path / "env"))
        code = main.main(["--config", TABLE1_CONFIG, "--horizon", "100", "--seeds", "1", "--quiet"])
        assert code == 0
        assert (tmp_path / "env" / "table1-fbm.summary.csv").exists()

    def test_excel_output(self, tmp_path):
        pytest.importorskip("openpyxl")
        code = main.main(["--config", TABLE1_CONFIG, "--horizon", "100", "--seeds", "1",
                          "--out", str(tmp_path), "--xlsx", "--quiet"])
        assert code == 0
        assert (tmp_path / "table1-fbm.xlsx").exists()

    def test_invalid_config_reports_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("game: table1\nleader: {algorithm: exp3, alpha: -0.1}\n"
                       "follower: ucb\nT: 10\nseeds: [1]\n")
        code = main.main(["--config", str(bad), "--out", str(tmp_path)])
        assert code == 2
        report = json.loads(capsys.readouterr().err)
        assert report["error"] == "config"
        assert report["key"] == "leader.alpha"
        assert report["line"] == 2


class TestPresets:

    def test_list_presets(self, capsys):
        assert main.main(["--list-presets"]) == 0
        out = capsys.readouterr().out
        assert "table1-example" in out and "fig-c-noisy-side" in out

    def test_passing_preset(self, tmp_path, presets_file):
        code = main.main(["--preset", "tiny", "--presets", presets_file, "--horizon", "300",
                          "--seeds", "1", "--out", str(tmp_path), "--quiet"])
        report = json.loads((tmp_path / "tiny" / "report.json").read_text())
        assert (tmp_path / "tiny" / "fbm.trace.csv").exists()
        assert (tmp_path / "tiny" / "ucb.summary.csv").exists()
        assert code == (0 if report["passed"] else 1)

    def test_failing_preset_exit_code(self, tmp_path, presets_file, capsys):
        code = main.main(["--preset", "failing", "--presets", presets_file,
                          "--out", str(tmp_path), "--quiet"])
        assert code == 1
        failure = json.loads(capsys.readouterr().err)
        assert failure["error"] == "expectations"
        assert failure["failed"][0]["kind"] == "metric"

    def test_unknown_preset(self, tmp_path, presets_file, capsys):
        code = main.main(["--preset", "nope", "--presets", presets_file, "--out", str(tmp_path)])
        assert code == 2
        assert "unknown preset" in json.loads(capsys.readouterr().err)["message"]


class TestProbe:

    def test_probe_writes_report(self, tmp_path):
        assert main.main(["--probe", "50", "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "probe.json").read_text())
        assert set(report) == {"ucb", "ucbe"}
        assert 0.0 <= report["ucb"]["fraction_a2"] <= 1.0


class TestArguments:

    def test_nothing_to_do(self):
        with pytest.raises(SystemExit) as exc:
            main.main([])
        assert exc.value.code == 2

    def test_config_and_preset_conflict(self):
        with pytest.raises(SystemExit):
            main.main(["--config", TABLE1_CONFIG, "--preset", "table1-example"])

    def test_bad_seed_list(self):
        with pytest.raises(SystemExit):
            main.main(["--config", TABLE1_CONFIG, "--seeds", "1,x"])
