import json
from fractions import Fraction as F

import pytest

from thoma_lab.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_RESOURCE, cmd_character, cmd_report, main
from thoma_lab.config import DEFAULT_SEED, SUITES, ExperimentConfig
from thoma_lab.errors import ConfigError, ResourceLimitError
from thoma_lab.suites import CheckRecord, VerificationReport
from thoma_lab.thoma import ThomaParams


def write_config(tmp_path, **data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.seed == DEFAULT_SEED and cfg.suites == SUITES
        assert ExperimentConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg

    def test_rejections(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"colour": 1})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"params": {"a": ["3/4", "1/2"]}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"suites": ["nonsense"]})
        with pytest.raises(ConfigError):
            ExperimentConfig(slot_count=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(seed=-1)
        with pytest.raises(ResourceLimitError):
            ExperimentConfig(enumeration_bound=9)

    def test_float_parameters_refused(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"params": {"a": [0.5]}})


class TestCharacter:
    def test_table_covers_every_class(self):
        table = cmd_character(ExperimentConfig())
        assert table["n"] == 6 and len(table["rows"]) == 11 and table["status"] == "pass"
        assert sum(r["class_size"] for r in table["rows"]) == 720
        identity = [r for r in table["rows"] if r["cycle_type"] == "1"][0]
        assert identity["formula"] == identity["model"] == "1"

    @pytest.mark.parametrize("M", [2, 3])
    def test_uniform_column(self, M):
        cfg = ExperimentConfig(params=ThomaParams.parse([F(1, M)] * M))
        for row in cmd_character(cfg)["rows"]:
            parts = [int(x) for x in row["partition"].split()]
            assert F(row["formula"]) == F(1, M) ** sum(k - 1 for k in parts)

    def test_regular_column(self):
        rows = cmd_character(ExperimentConfig(params=ThomaParams()))["rows"]
        assert {r["formula"] for r in rows if r["cycle_type"] != "1"} == {"0"}

    def test_csv(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        code, _, _ = run(capsys, "character", "--csv", str(out))
        raw = out.read_bytes()
        assert code == EXIT_OK and b"\r" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == "cycle_type,partition,class_size,formula,model,agree"
        assert len(lines) == 12
        assert lines[-1] == "1,1 1 1 1 1 1,1,1,1,true"


class TestVerify:
    def test_multiplicativity(self, tmp_path, capsys):
        cfg = write_config(tmp_path, params={"a": ["1/2", "1/4"], "b": ["1/8"]})
        code, out, _ = run(capsys, "verify", "--config", cfg, "--suite", "multiplicativity")
        report = json.loads(out)
        assert code == EXIT_OK and report["status"] == "pass"
        assert all(set(r) == {"identity", "anchor", "status", "lhs", "rhs", "detail"} for r in report["records"])

    def test_stirling(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "stirling")
        assert code == EXIT_OK and json.loads(out)["record_count"] == 7

    def test_markov_failure_is_expected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, params={"a": ["2/3", "1/3"]})
        code, out, _ = run(capsys, "verify", "--config", cfg, "--suite", "markov")
        first = json.loads(out)["records"][0]
        assert code == EXIT_OK
        assert (first["lhs"], first["rhs"], first["status"]) == ("False", "False", "pass")
        assert first["detail"].startswith("witness n=2")

    def test_seed_override(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "transition", "--seed", "42")
        assert code == EXIT_OK and json.loads(out)["seed"] == 42

    def test_timing_flag(self, capsys):
        _, out, _ = run(capsys, "verify", "--suite", "stirling", "--timing")
        assert "wall_time_s" in json.loads(out)
        _, out, _ = run(capsys, "verify", "--suite", "stirling")
        assert "wall_time_s" not in json.loads(out)


class TestReport:
    def test_empty(self, capsys):
        code, out, _ = run(capsys, "report", "--no-suites")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["suites"] == [] and doc["record_count"] == 0

    def test_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert main(["report", "--suite", "stirling", "--suite", "commuting-squares", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_pool_matches_serial(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["report", "--suite", "transition", "--suite", "stirling", "--suite", "markov"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--jobs", "2", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_merge_inputs(self, tmp_path, capsys):
        part = tmp_path / "part.json"
        assert main(["verify", "--suite", "stirling", "--out", str(part)]) == 0
        code, out, _ = run(capsys, "report", "--suite", "transition", "--input", str(part))
        doc = json.loads(out)
        assert code == EXIT_OK and [s["suite"] for s in doc["suites"]] == ["stirling", "transition"]

    def test_failure_exit(self, tmp_path, capsys, monkeypatch):
        bad = VerificationReport("stirling", (CheckRecord("x", "y", False, "1", "2"),), 0)
        monkeypatch.setattr("thoma_lab.cli.run_suite", lambda name, cfg: bad)
        code, out, _ = run(capsys, "verify", "--suite", "stirling")
        assert code == EXIT_FAIL and json.loads(out)["records"][0]["lhs"] == "1"

    def test_report_function(self):
        doc = cmd_report(ExperimentConfig(), ["stirling"])
        assert doc["status"] == "pass" and doc["record_count"] == 7


class TestExitCodes:
    def test_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, params={"a": ["2"]})
        code, _, err = run(capsys, "verify", "--config", cfg, "--suite", "stirling")
        assert code == EXIT_CONFIG and "configuration error" in err

    def test_unreadable_config(self, tmp_path, capsys):
        code, _, _ = run(capsys, "verify", "--config", str(tmp_path / "missing.json"), "--suite", "stirling")
        assert code == EXIT_CONFIG
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert run(capsys, "verify", "--config", str(bad), "--suite", "stirling")[0] == EXIT_CONFIG

    def test_resource_cap(self, tmp_path, capsys):
        cfg = write_config(tmp_path, enumeration_bound=12)
        code, _, err = run(capsys, "verify", "--config", cfg, "--suite", "stirling")
        assert code == EXIT_RESOURCE and "cap" in err

    def test_io_error(self, tmp_path, capsys):
        code, _, _ = run(capsys, "verify", "--suite", "stirling", "--out", str(tmp_path / "no" / "x.json"))
        assert code == EXIT_IO
        code, _, _ = run(capsys, "report", "--no-suites", "--input", str(tmp_path / "absent.json"))
        assert code == EXIT_IO

    def test_unknown_suite_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "bogus"])
        assert exc.value.code == 2
