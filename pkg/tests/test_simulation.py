"""
모의자료 생성과 시뮬레이션 연구 (샤드, 재개, 집계)
"""
import logging
import math

import numpy as np
import pandas as pd
import pytest

from foldnorm_sdk import FoldnormClient
from foldnorm_sdk.dataset.io import dropout_table
from foldnorm_sdk.distributions import derive_rng
from foldnorm_sdk.errors import FoldnormError, StructureError, StudyInvalidError
from foldnorm_sdk.schema import (
    DropoutCause,
    McmcConfig,
    RunRecord,
    ScenarioConfig,
    StudyConfig,
    StudyGrid,
)
from foldnorm_sdk.simulation import study as study_module
from foldnorm_sdk.simulation.dgp import (
    APPLICATION_TALLIES,
    draw_dropout_times,
    marginal_moments,
    moments_report,
    simulate_application_like,
    simulate_complete,
    simulate_scenario,
    subject_risk,
)
from foldnorm_sdk.simulation.study import (
    STUDY_PRESETS,
    aggregate_records,
    load_records,
    mcmc_for,
    model_spec_for,
    parse_shard,
    plan_tasks,
    run_study,
    runs_path,
    study_fingerprint,
)


def _small_study(**update) -> StudyConfig:
    cfg = StudyConfig(
        master_seed=99,
        n_runs=3,
        models=["L", "F"],
        grid=StudyGrid(sigmas=[0.06], d0s=[0.08], omegas=[0.5]),
        base=ScenarioConfig(n_subjects=16, K=3),
        mcmc=McmcConfig(n_chains=2, burn_in=40, n_samples=40),
    )
    return cfg.model_copy(update=update)


def _record(run, mean, ok=True, model="F"):
    return RunRecord(
        scenario_id="s", model=model, run=run, sigma=0.06, tad=0.10, omega=0.5,
        ok=ok, mean=mean if ok else float("nan"), median=mean, sd=0.01, q025=mean - 0.02, q975=mean + 0.02,
    )


class TestCompleteData:
    """완전자료 생성"""

    def test_no_noise_gives_trajectory(self):
        sc = ScenarioConfig(n_subjects=20, sigma=0.0, omega=0.0)
        data, truth = simulate_complete(sc, derive_rng(1, "complete"))
        for subject in data.subjects:
            c, s = (sc.c0, sc.c1) if subject.group == 0 else (sc.d0, sc.d1)
            np.testing.assert_allclose(subject.values, [c + s * t for t in range(sc.K)], atol=1e-15)
        assert truth.tad == pytest.approx(0.10)

    def test_shape(self):
        data, truth = simulate_complete(ScenarioConfig(), derive_rng(2, "complete"))
        assert data.n_subjects == 100
        assert data.n_observations == 700
        assert all(s.dropout.delta == DropoutCause.COMPLETER for s in data.subjects)
        assert len(truth.random_effects) == 100
        assert set(truth.signs) <= {-1, 1}

    def test_group_fraction(self):
        data, _ = simulate_complete(ScenarioConfig(n_subjects=4000, K=2), derive_rng(3, "complete"))
        fraction = data.group_counts()[1] / data.n_subjects
        assert abs(fraction - 0.5) < 3 * math.sqrt(0.25 / 4000)

    def test_reproducible(self):
        a, _ = simulate_scenario(ScenarioConfig(dropout_enabled=True), derive_rng(5, "x"))
        b, _ = simulate_scenario(ScenarioConfig(dropout_enabled=True), derive_rng(5, "x"))
        assert a == b

    def test_marginal_moments_match_large_sample(self):
        sc = ScenarioConfig(n_subjects=20000, K=3, d0=0.04)
        data, _ = simulate_complete(sc, derive_rng(6, "moments"))
        report = moments_report(data, sc)
        assert len(report) == 2 * sc.K
        np.testing.assert_allclose(report["observed_mean"], report["expected_mean"], atol=0.004)
        np.testing.assert_allclose(report["observed_var"], report["expected_var"], rtol=0.06)
        # 접힘이 큰 노출 그룹의 평균은 궤적 m_t 보다 크다
        exposed = report[report["group"] == 1]
        assert (exposed["expected_mean"].to_numpy() > sc.d0 + sc.d1 * exposed["time"].to_numpy()).all()

    def test_marginal_moments_without_spread(self):
        sc = ScenarioConfig(K=2, sigma=0.0, omega=0.0)
        report = marginal_moments(sc)
        assert report["expected_mean"].tolist() == pytest.approx([sc.c0, sc.c0 + sc.c1, sc.d0, sc.d0 + sc.d1])
        assert report["expected_var"].tolist() == [0.0] * 4

    @pytest.mark.parametrize("omega", [0.5, 1 / 2.4])
    def test_trajectories_mostly_nonnegative(self, omega):
        sc = ScenarioConfig(n_subjects=20000, omega=omega)
        _, truth = simulate_complete(sc, derive_rng(7, "two-sigma"))
        fe = truth.fixed
        times = np.arange(sc.K)
        nonnegative = []
        for re in truth.random_effects:
            intercept, slope = fe.intercept_slope(re.group)
            nonnegative.append(np.all(intercept + re.b0 + (slope + re.b1) * times >= 0))
        assert np.mean(nonnegative) >= 0.95


class TestDropoutMechanism:
    """Gamma 경쟁위험 중도탈락"""

    @pytest.mark.parametrize(
        "d0,recovery,death",
        [
            (0.08, 0.2780, 0.3574),
            (0.06, 0.3496, 0.3171),
            (0.05, 0.3933, 0.3095),
            (0.04, 0.4390, 0.3028),
        ],
    )
    def test_calibrated_proportions(self, d0, recovery, death):
        sc = ScenarioConfig(n_subjects=10_000, d0=d0, dropout_enabled=True)
        data, _ = simulate_scenario(sc, derive_rng(2024, "calibration", d0))
        causes = np.array([int(s.dropout.delta) for s in data.subjects])
        assert np.mean(causes == 1) == pytest.approx(recovery, abs=0.02)
        assert np.mean(causes == 2) == pytest.approx(death, abs=0.02)

    def test_fractions_sum_to_one(self):
        data, _ = simulate_scenario(ScenarioConfig(dropout_enabled=True), derive_rng(8, "sum"))
        table = dropout_table(data)
        assert table["total"].sum() == data.n_subjects

    def test_observations_truncated_at_dropout(self):
        data, truth = simulate_scenario(ScenarioConfig(dropout_enabled=True), derive_rng(9, "trunc"))
        for i, subject in enumerate(data.subjects):
            assert len(subject.observations) == subject.dropout.D + 1
            if subject.dropout.delta != DropoutCause.COMPLETER:
                first = min(truth.recovery_times[i], truth.death_times[i])
                assert subject.dropout.D == max(math.ceil(first) - 1, 0)

    def test_common_random_numbers_are_monotone(self):
        sc = ScenarioConfig(dropout_enabled=True)
        rng = derive_rng(10, "crn")
        uniforms = (rng.random(500), rng.random(500))
        low = rng.uniform(0.02, 0.2, size=500)
        high = low + 0.03
        _, _, rec_low, death_low, _ = draw_dropout_times(low, sc, rng, uniforms)
        _, _, rec_high, death_high, _ = draw_dropout_times(high, sc, rng, uniforms)
        assert np.all(rec_high >= rec_low)
        assert np.all(death_high <= death_low)

    def test_nonpositive_risk_is_clamped(self, caplog):
        sc = ScenarioConfig(dropout_enabled=True)
        with caplog.at_level(logging.WARNING, logger="foldnorm_sdk.simulation.dgp"):
            D, delta, _, _, n_clamped = draw_dropout_times(np.array([-0.1, 0.0, 0.1]), sc, derive_rng(1, "r"))
        assert n_clamped == 2
        assert D.shape == delta.shape == (3,)
        assert caplog.records

    def test_risk_uses_subject_trajectory(self):
        sc = ScenarioConfig(n_subjects=10)
        _, truth = simulate_complete(sc, derive_rng(4, "risk"))
        risk = subject_risk(truth, sc.K)
        re = truth.random_effects[0]
        c, s = (sc.c0, sc.c1) if re.group == 0 else (sc.d0, sc.d1)
        assert risk[0] == pytest.approx(c + re.b0 + (s + re.b1) * 3.0)


class TestApplicationLike:

    def test_tallies_reproduced(self):
        data, _ = simulate_application_like(derive_rng(1, "app"))
        assert data.K == 9
        assert data.group_counts()[0] == 75
        assert data.group_counts()[1] == 128
        table = dropout_table(data).set_index(["group", "cause"])
        for group, tally in APPLICATION_TALLIES.items():
            recovery = table.loc[(int(group), "recovery"), [f"D={d}" for d in range(8)]].tolist()
            assert recovery == tally["recovery"]
            assert table.loc[(int(group), "completer"), "total"] == tally["completers"]


class TestStudyHelpers:
    """연구 보조 함수"""

    def test_parse_shard(self):
        assert parse_shard("1/4") == (1, 4)
        for bad in ["4/4", "x", "1/0", "-1/2"]:
            with pytest.raises(FoldnormError):
                parse_shard(bad)

    def test_plan_respects_shard(self):
        cfg = _small_study(n_runs=5)
        runs = [run for _, run, _ in plan_tasks(cfg, (1, 2))]
        assert runs == [1, 3]

    def test_plan_skips_done(self):
        cfg = _small_study(n_runs=2)
        sc = cfg.grid.scenarios(cfg.base)[0]
        tasks = plan_tasks(cfg, done={(sc.scenario_id, "L", 0)})
        assert tasks[0][2] == ["F"]
        assert tasks[1][2] == ["L", "F"]

    def test_model_spec_follows_scenario_omega(self):
        cfg = STUDY_PRESETS["dropout"]
        sc = ScenarioConfig(omega=1 / 2.4)
        spec = model_spec_for("III", sc, cfg)
        assert spec.outcome_prior.omega == pytest.approx(1 / 2.4)
        assert spec.temporal.label == "flexible"
        assert model_spec_for("II", sc, cfg).temporal.label == "linear"

    def test_mcmc_seeds_and_overrides(self):
        cfg = STUDY_PRESETS["complete"]
        a = mcmc_for("L", "s", 0, cfg)
        b = mcmc_for("F", "s", 0, cfg)
        assert a.burn_in == 2000
        assert b.burn_in == cfg.mcmc.burn_in
        assert a.seed != b.seed
        assert mcmc_for("F", "s", 0, cfg).seed == b.seed


class TestAggregation:
    """셀 집계 지표"""

    def test_bias_se_mse(self):
        records = [_record(0, 0.10), _record(1, 0.12), _record(2, 0.14)]
        row = aggregate_records(records).rows[0]
        assert row.bias == pytest.approx(0.02)
        assert row.se == pytest.approx(0.02)
        assert row.mse == pytest.approx(np.mean([0.0, 0.02 ** 2, 0.04 ** 2]))
        # MSE = Bias^2 + (n-1)/n * S.E.^2
        assert row.mse == pytest.approx(row.bias ** 2 + row.se ** 2 * 2 / 3)
        assert row.q025 == pytest.approx(0.10)

    def test_failure_threshold(self):
        ok = [_record(i, 0.1) for i in range(99)]
        one_failed = aggregate_records(ok + [_record(99, 0.0, ok=False)]).rows[0]
        assert one_failed.valid and one_failed.n_failed == 1 and one_failed.n_runs == 99
        two_failed = aggregate_records(ok[:98] + [_record(98, 0.0, ok=False), _record(99, 0.0, ok=False)])
        assert not two_failed.valid

    def test_single_run_has_no_se(self):
        row = aggregate_records([_record(0, 0.11)]).rows[0]
        assert math.isnan(row.se)

    def test_model_order_from_config(self):
        cfg = _small_study()
        sc = cfg.grid.scenarios(cfg.base)[0]
        records = [
            _record(0, 0.1, model="F").model_copy(update={"scenario_id": sc.scenario_id}),
            _record(0, 0.1, model="L").model_copy(update={"scenario_id": sc.scenario_id}),
        ]
        assert [row.model for row in aggregate_records(records, cfg).rows] == ["L", "F"]

    def test_frame_aliases(self):
        frame = aggregate_records([_record(0, 0.11), _record(1, 0.12)]).to_frame()
        for column in ["Model", "σ", "TAD", "ω", "Bias", "S.E.", "MSE"]:
            assert column in frame.columns


class TestStudyRun:
    """연구 실행, 샤드 병합, 재개"""

    def test_shards_match_single_run(self, tmp_path):
        cfg = _small_study()
        whole = run_study(cfg, tmp_path / "whole", progress=False)
        run_study(cfg, tmp_path / "split", shard=(0, 2), progress=False)
        merged = run_study(cfg, tmp_path / "split", shard=(1, 2), progress=False)
        assert len(whole.rows) == 2
        assert whole.rows[0].n_runs == 3
        pd.testing.assert_frame_equal(whole.to_frame(), merged.to_frame())
        assert (tmp_path / "split" / "runs-shard0of2.csv").exists()

    def test_resume_only_runs_missing(self, tmp_path):
        out = tmp_path / "study"
        run_study(_small_study(n_runs=1), out, progress=False)
        before = runs_path(out, (0, 1)).read_text(encoding="utf-8")
        result = run_study(_small_study(n_runs=2), out, resume=True, progress=False)
        after = runs_path(out, (0, 1)).read_text(encoding="utf-8")
        assert after.startswith(before)
        assert len(load_records(out)) == 4
        assert result.rows[0].n_runs == 2

    def test_rerun_without_resume_overwrites(self, tmp_path):
        out = tmp_path / "study"
        run_study(_small_study(n_runs=1), out, progress=False)
        run_study(_small_study(n_runs=1), out, progress=False)
        assert len(pd.read_csv(runs_path(out, (0, 1)))) == 2

    def test_unsharded_rerun_replaces_old_shards(self, tmp_path):
        out = tmp_path / "study"
        old = _small_study(master_seed=1)
        run_study(old, out, shard=(0, 2), progress=False)
        run_study(old, out, shard=(1, 2), progress=False)

        new = _small_study(master_seed=999)
        rerun = run_study(new, out, progress=False)
        clean = run_study(new, tmp_path / "clean", progress=False)
        assert sorted(p.name for p in out.glob("runs-shard*.csv")) == ["runs-shard0of1.csv"]
        pd.testing.assert_frame_equal(rerun.to_frame(), clean.to_frame())

    def test_mixed_configs_are_refused(self, tmp_path):
        out = tmp_path / "study"
        old = _small_study(master_seed=1)
        run_study(old, out, shard=(0, 2), progress=False)
        run_study(old, out, shard=(1, 2), progress=False)
        with pytest.raises(StructureError):
            run_study(_small_study(master_seed=999), out, shard=(0, 2), progress=False)
        with pytest.raises(StructureError):
            load_records(out, _small_study(master_seed=999))

    def test_fingerprint_ignores_run_count(self):
        assert study_fingerprint(_small_study(n_runs=1)) == study_fingerprint(_small_study(n_runs=5))
        assert study_fingerprint(_small_study()) != study_fingerprint(_small_study(master_seed=100))

    def test_failures_are_recorded(self, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise FoldnormError("초기화 실패")

        monkeypatch.setattr(study_module, "run_chains", broken)
        with FoldnormClient(workers=1, seed=1) as client:
            with pytest.raises(StudyInvalidError):
                client.simulation.study(_small_study(n_runs=1), tmp_path, progress=False, strict=True)
        records = load_records(tmp_path)
        assert all(not r.ok for r in records)
        assert records[0].error == "초기화 실패"


class TestSimulationNamespace:

    def test_client_seed(self):
        with FoldnormClient(workers=1, seed=3) as client:
            a, _ = client.simulation.generate(ScenarioConfig(n_subjects=5))
            b, _ = client.simulation.generate(ScenarioConfig(n_subjects=5), seed=3)
            c, _ = client.simulation.generate(ScenarioConfig(n_subjects=5), seed=4)
        assert a == b
        assert a != c


@pytest.mark.slow
class TestStudyGates:
    """축소 규모 연구: sigma=0.06, omega=1/2, TAD=0.10 한 셀"""

    def _one_cell(self, preset: str, **update) -> StudyConfig:
        grid = StudyGrid(sigmas=[0.06], d0s=[0.08], omegas=[0.5])
        return STUDY_PRESETS[preset].model_copy(update={"grid": grid, **update})

    def test_complete_data_cell(self, tmp_path):
        cfg = self._one_cell("complete", master_seed=5, n_runs=8)
        with FoldnormClient(workers=4, seed=5) as client:
            result = client.simulation.study(cfg, tmp_path, progress=False, strict=True)
        folded = result.cell("F", 0.06, 0.10, 0.5)
        linear = result.cell("L", 0.06, 0.10, 0.5)
        assert folded.n_runs == linear.n_runs == 8
        assert folded.bias == pytest.approx(0.00441, abs=0.004)
        assert folded.sd == pytest.approx(0.0116, abs=0.003)
        assert 0.6 <= folded.se / folded.sd <= 1.6
        assert linear.bias < 0

    def test_dropout_cell(self, tmp_path):
        cfg = self._one_cell("dropout", master_seed=5, n_runs=24)
        with FoldnormClient(workers=4, seed=5) as client:
            result = client.simulation.study(cfg, tmp_path, progress=False, strict=True)
        naive = result.cell("I", 0.06, 0.10, 0.5)
        linear = result.cell("II", 0.06, 0.10, 0.5)
        flexible = result.cell("III", 0.06, 0.10, 0.5)
        assert naive.bias == pytest.approx(-0.01667, abs=0.008)
        assert linear.bias == pytest.approx(-0.00848, abs=0.008)
        assert flexible.bias == pytest.approx(-0.00826, abs=0.008)
        assert abs(linear.bias) < abs(naive.bias)
        assert abs(flexible.bias) < abs(naive.bias)
