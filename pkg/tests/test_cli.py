"""
명령행 도구 종료 코드와 출력 파일
"""
import pandas as pd
import pytest

from foldnorm_sdk import cli
from foldnorm_sdk.errors import FoldnormError, SamplerInitError
from foldnorm_sdk.inference import namespace as inference_namespace
from foldnorm_sdk.simulation import study as study_module

FIT_FLAGS = ["--chains", "2", "--burnin", "60", "--samples", "60", "--seed", "1"]

STUDY_TOML = """
master_seed = 7
n_runs = 2
models = ["L", "F"]

[base]
n_subjects = 12
K = 3

[grid]
sigmas = [0.06]
d0s = [0.08]
omegas = [0.5]

[mcmc]
n_chains = 2
burn_in = 30
n_samples = 30
"""


@pytest.fixture(autouse=True)
def _single_process(monkeypatch):
    monkeypatch.delenv("FOLDNORM_WORKERS", raising=False)
    monkeypatch.delenv("FOLDNORM_SEED", raising=False)


@pytest.fixture
def simulated(tmp_path):
    out = tmp_path / "sim"
    assert cli.main(["simulate", "--seed", "5", "--dropout", "--out", str(out)]) == cli.EXIT_OK
    return out


class TestSimulate:

    def test_outputs(self, simulated):
        assert (simulated / "data.csv").exists()
        assert (simulated / "truth.json").exists()
        table = pd.read_csv(simulated / "dropout_table.csv")
        assert table["total"].sum() == 100
        moments = pd.read_csv(simulated / "moments.csv")
        assert len(moments) == 2 * 7
        assert list(moments.columns[:4]) == ["group", "time", "expected_mean", "expected_var"]
        assert moments.loc[0, "n"] > 0

    def test_application_like(self, tmp_path):
        out = tmp_path / "app"
        assert cli.main(["simulate", "--application-like", "--out", str(out)]) == cli.EXIT_OK
        frame = pd.read_csv(out / "data.csv")
        assert frame["subject_id"].nunique() == 203
        assert frame["time"].max() == 8
        assert not (out / "moments.csv").exists()


class TestFit:
    """fit 명령"""

    def test_simulate_then_fit(self, simulated, tmp_path, capsys):
        out = tmp_path / "fit"
        code = cli.main(
            ["fit", str(simulated / "data.csv"), "--model", "D", "--temporal", "grouped:2", "--out", str(out)]
            + FIT_FLAGS
        )
        assert code == cli.EXIT_OK
        summary = pd.read_csv(out / "summary.csv")
        assert list(summary.columns) == ["Parameter", "Mean", "Median", "S.D.", "2.5%Qt.", "97.5%Qt."]
        assert "AD" in set(summary["Parameter"])
        assert "q0_0" in set(summary["Parameter"])
        assert {"Rhat", "ESS"} <= set(pd.read_csv(out / "diagnostics.csv").columns)
        assert len(pd.read_csv(out / "draws.csv")) == 120
        assert "AD" in capsys.readouterr().out

    def test_same_seed_same_bytes(self, simulated, tmp_path):
        outputs = []
        for name in ("one", "two"):
            out = tmp_path / name
            assert cli.main(["fit", str(simulated / "data.csv"), "--out", str(out)] + FIT_FLAGS) == cli.EXIT_OK
            outputs.append((out / "summary.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_config_file(self, simulated, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(
            '{"data_path": "%s", "model": "C", "out_dir": "%s", '
            '"mcmc": {"n_chains": 2, "burn_in": 30, "n_samples": 30, "seed": 3}}'
            % ((simulated / "data.csv").as_posix(), (tmp_path / "cfg-out").as_posix()),
            encoding="utf-8",
        )
        assert cli.main(["fit", "--config", str(config)]) == cli.EXIT_OK
        assert (tmp_path / "cfg-out" / "summary.csv").exists()

    def test_gap_is_input_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("subject_id,exposure,time,z\na,0,0,0.1\na,0,2,0.2\n", encoding="utf-8")
        assert cli.main(["fit", str(path), "--out", str(tmp_path / "o")] + FIT_FLAGS) == cli.EXIT_INPUT

    def test_missing_file(self, tmp_path):
        assert cli.main(["fit", str(tmp_path / "nope.csv")] + FIT_FLAGS) == cli.EXIT_INPUT

    def test_no_data_path(self, tmp_path):
        assert cli.main(["fit", "--out", str(tmp_path / "o")]) == cli.EXIT_INPUT

    def test_bad_flag_value(self, simulated, tmp_path):
        code = cli.main(["fit", str(simulated / "data.csv"), "--chains", "0", "--out", str(tmp_path / "o")])
        assert code == cli.EXIT_INPUT

    def test_sampler_failure(self, simulated, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise SamplerInitError("초기값 없음")

        monkeypatch.setattr(inference_namespace, "run_chains", broken)
        code = cli.main(["fit", str(simulated / "data.csv"), "--out", str(tmp_path / "o")] + FIT_FLAGS)
        assert code == cli.EXIT_RUNTIME


class TestStudy:
    """study 명령"""

    def test_sharded_then_aggregate(self, tmp_path, capsys):
        config = tmp_path / "study.toml"
        config.write_text(STUDY_TOML, encoding="utf-8")
        out = str(tmp_path / "study")
        for shard in ("0/2", "1/2"):
            assert cli.main(["study", "--config", str(config), "--shard", shard, "--quiet", "--out", out]) == 0
        assert cli.main(["study", "--config", str(config), "--aggregate-only", "--out", out]) == 0
        study = pd.read_csv(tmp_path / "study" / "study.csv")
        assert list(study["Model"]) == ["L", "F"]
        assert list(study["n_runs"]) == [2, 2]
        assert "Bias" in capsys.readouterr().out

    def test_invalid_study_exit_code(self, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise FoldnormError("실패")

        monkeypatch.setattr(study_module, "run_chains", broken)
        config = tmp_path / "study.toml"
        config.write_text(STUDY_TOML, encoding="utf-8")
        code = cli.main(["study", "--config", str(config), "--quiet", "--out", str(tmp_path / "s")])
        assert code == cli.EXIT_RUNTIME

    def test_bad_shard(self, tmp_path):
        code = cli.main(["study", "--preset", "dropout", "--shard", "3/2", "--out", str(tmp_path / "s")])
        assert code == cli.EXIT_INPUT
