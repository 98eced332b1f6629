"""
몬테카를로 시뮬레이션 연구

run 단위 작업 = (시나리오, run 번호): 자료 1개를 만들고 모든 모형을 적합해 AD 요약을 남긴다.
각 결과는 (scenario_id, model, run) 행으로 샤드 CSV에 즉시 추가되므로
중단 후 재개(resume)와 샤드 병합이 가능하다. 집계는 항상 저장된 행에서 다시 계산한다.

시드:
    자료   derive_rng(master_seed, scenario_id, run, "data")
    적합   derive_seed_sequence(master_seed, scenario_id, run, label) 의 첫 정수
"""
import hashlib
import logging
from concurrent.futures import Executor, as_completed
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from foldnorm_sdk.distributions.rng import derive_rng, derive_seed_sequence
from foldnorm_sdk.errors import FoldnormError, StructureError
from foldnorm_sdk.inference.sampler import run_chains
from foldnorm_sdk.inference.summary import summarize
from foldnorm_sdk.schema.config_schema import McmcConfig, ScenarioConfig, StudyConfig, StudyGrid
from foldnorm_sdk.schema.model_schema import ModelSpec, ModelVariant
from foldnorm_sdk.schema.result_schema import RunRecord, StudyResult, StudyRow
from foldnorm_sdk.simulation.dgp import simulate_scenario

logger = logging.getLogger(__name__)

RUNS_FILE_PATTERN = "runs-shard*.csv"
STUDY_FILE = "study.csv"
FLOAT_FORMAT = "%.10f"

# 완전자료 비교(L vs F, 16셀)와 중도탈락 비교(I/II/III, 4셀), 축소 반복 설정
STUDY_PRESETS: Dict[str, StudyConfig] = {
    "complete": StudyConfig(
        models=["L", "F"],
        grid=StudyGrid(),
        base=ScenarioConfig(),
        burn_in_overrides={"L": 2000},
    ),
    "dropout": StudyConfig(
        models=["I", "II", "III"],
        grid=StudyGrid(sigmas=[0.06], d0s=[0.08, 0.06, 0.05, 0.04], omegas=[0.5]),
        base=ScenarioConfig(dropout_enabled=True),
        temporal="flexible",
    ),
}


def parse_shard(text: str) -> Tuple[int, int]:
    """'i/n' -> (i, n), 0 <= i < n"""
    try:
        index, count = (int(part) for part in text.split("/"))
    except ValueError:
        raise StructureError(f"샤드 형식은 i/n 입니다. 입력값={text}") from None
    if not (count >= 1 and 0 <= index < count):
        raise StructureError(f"샤드 번호는 0 <= i < n 이어야 합니다. 입력값={text}")
    return index, count


def study_fingerprint(cfg: StudyConfig) -> str:
    """
    결과 행에 남기는 설정 지문

    run 수, 실패 허용 비율, 기본 MCMC 시드는 결과 값에 영향이 없으므로 제외한다.
    """
    payload = cfg.model_dump_json(exclude={"n_runs": True, "max_failure_fraction": True, "mcmc": {"seed"}})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def model_spec_for(label: str, sc: ScenarioConfig, cfg: StudyConfig) -> ModelSpec:
    """연구 라벨의 모형 명세. folded 모형의 omega는 시나리오 omega를 따른다"""
    variant = ModelVariant.from_label(label)
    prior = cfg.outcome_prior.model_copy(update={"omega": sc.omega})
    temporal = cfg.temporal if variant == ModelVariant.JOINT_FLEXIBLE else None
    return ModelSpec.build(variant, K=sc.K, temporal=temporal, outcome_prior=prior)


def mcmc_for(label: str, scenario_id: str, run: int, cfg: StudyConfig) -> McmcConfig:
    seed = int(derive_seed_sequence(cfg.master_seed, scenario_id, run, label).generate_state(1)[0])
    update = {"seed": seed}
    if label in cfg.burn_in_overrides:
        update["burn_in"] = cfg.burn_in_overrides[label]
    return cfg.mcmc.model_copy(update=update)


def run_single(sc: ScenarioConfig, run: int, labels: Sequence[str], cfg: StudyConfig) -> List[RunRecord]:
    """
    run 하나: 자료 생성 후 labels의 모형을 차례로 적합

    적합 실패(FoldnormError, 수치 오류)는 ok=False 행으로 남긴다.
    """
    data_rng = derive_rng(cfg.master_seed, sc.scenario_id, run, "data")
    dataset, truth = simulate_scenario(sc, data_rng)
    records = []
    for label in labels:
        base = dict(
            scenario_id=sc.scenario_id,
            model=label,
            run=run,
            sigma=sc.sigma,
            tad=truth.tad,
            omega=sc.omega,
            config_hash=study_fingerprint(cfg),
        )
        try:
            spec = model_spec_for(label, sc, cfg)
            chains = run_chains(dataset, spec, mcmc_for(label, sc.scenario_id, run, cfg))
            ad = summarize(chains, "AD")
        except (FoldnormError, FloatingPointError, np.linalg.LinAlgError) as exc:
            logger.warning("run 실패 (%s, 모형 %s, run %d): %s", sc.scenario_id, label, run, exc)
            records.append(RunRecord(**base, ok=False, error=str(exc)))
            continue
        records.append(
            RunRecord(
                **base,
                ok=True,
                mean=ad.mean,
                median=ad.median,
                sd=ad.sd,
                q025=ad.q025,
                q975=ad.q975,
            )
        )
    return records


def _run_task(args) -> List[RunRecord]:
    sc, run, labels, cfg = args
    return run_single(sc, run, labels, cfg)


# ---------- 저장 / 재개 ----------


def runs_path(out_dir: Path, shard: Tuple[int, int]) -> Path:
    return out_dir / f"runs-shard{shard[0]}of{shard[1]}.csv"


def append_records(path: Path, records: Iterable[RunRecord]) -> None:
    frame = pd.DataFrame([r.model_dump() for r in records])
    if frame.empty:
        return
    frame.to_csv(
        path,
        mode="a",
        header=not path.exists(),
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )


def load_records(out_dir: Path, cfg: Optional[StudyConfig] = None) -> List[RunRecord]:
    """
    out_dir의 모든 샤드 파일 행. 같은 (scenario_id, model, run)은 마지막 행을 쓴다

    cfg를 주면 다른 설정 지문의 행이 섞여 있을 때 StructureError.
    """
    dtype = {"scenario_id": str, "model": str, "error": str, "config_hash": str}
    frames = [
        pd.read_csv(path, dtype=dtype, keep_default_na=False, na_values=[""])
        for path in sorted(Path(out_dir).glob(RUNS_FILE_PATTERN))
    ]
    if not frames:
        return []
    frame = pd.concat(frames, ignore_index=True)
    frame["error"] = frame["error"].fillna("")
    frame["config_hash"] = frame.get("config_hash", pd.Series("", index=frame.index)).fillna("")
    if cfg is not None:
        expected = study_fingerprint(cfg)
        foreign = sorted(set(frame["config_hash"]) - {expected})
        if foreign:
            raise StructureError(
                f"{out_dir} 에 다른 연구 설정으로 만든 결과가 섞여 있습니다. "
                f"새 디렉터리를 쓰거나 --resume 없이 전체 샤드를 다시 실행하세요. 입력값={foreign}"
            )
    frame = frame.drop_duplicates(subset=["scenario_id", "model", "run"], keep="last")
    return [RunRecord.model_validate(rec) for rec in frame.to_dict(orient="records")]


def _done_keys(records: Iterable[RunRecord]) -> Set[Tuple[str, str, int]]:
    return {(r.scenario_id, r.model, r.run) for r in records}


# ---------- 집계 ----------


def aggregate_records(
        records: Sequence[RunRecord],
        cfg: Optional[StudyConfig] = None,
) -> StudyResult:
    """
    (시나리오, 모형) 셀별 성능 지표

    - Bias = 평균(사후평균) - TAD, MSE = 평균((사후평균 - TAD)^2)
    - S.E. = 사후평균들의 표본 표준편차 (run 1개면 nan)
    - 실패 비율이 max_failure_fraction을 넘으면 valid=False
    """
    max_fail = cfg.max_failure_fraction if cfg is not None else 0.01
    frame = pd.DataFrame([r.model_dump() for r in records])
    if frame.empty:
        return StudyResult()
    scenario_order = (
        [sc.scenario_id for sc in cfg.grid.scenarios(cfg.base)] if cfg is not None else []
    )
    model_order = list(cfg.models) if cfg is not None else []

    def sort_key(key):
        scenario_id, model = key
        s_rank = scenario_order.index(scenario_id) if scenario_id in scenario_order else len(scenario_order)
        m_rank = model_order.index(model) if model in model_order else len(model_order)
        return s_rank, scenario_id, m_rank, model

    rows = []
    groups = dict(tuple(frame.groupby(["scenario_id", "model"], sort=False)))
    for key in sorted(groups, key=sort_key):
        cell = groups[key].sort_values("run")
        ok = cell[cell["ok"].astype(bool)]
        n_ok, n_failed = len(ok), len(cell) - len(ok)
        tad = float(cell["tad"].iloc[0])
        means = ok["mean"].to_numpy(dtype=float)
        nan = float("nan")
        rows.append(
            StudyRow(
                model=key[1],
                sigma=float(cell["sigma"].iloc[0]),
                tad=tad,
                omega=float(cell["omega"].iloc[0]),
                bias=float(means.mean() - tad) if n_ok else nan,
                mean=float(means.mean()) if n_ok else nan,
                median=float(ok["median"].mean()) if n_ok else nan,
                sd=float(ok["sd"].mean()) if n_ok else nan,
                se=float(np.std(means, ddof=1)) if n_ok > 1 else nan,
                q025=float(ok["q025"].mean()) if n_ok else nan,
                q975=float(ok["q975"].mean()) if n_ok else nan,
                mse=float(np.mean((means - tad) ** 2)) if n_ok else nan,
                n_runs=n_ok,
                n_failed=n_failed,
                valid=n_ok > 0 and n_failed <= max_fail * len(cell),
            )
        )
    return StudyResult(rows=rows)


def write_study(result: StudyResult, out_dir: Path) -> Path:
    path = Path(out_dir) / STUDY_FILE
    result.to_frame().to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8"
    )
    return path


def aggregate_study(out_dir, cfg: Optional[StudyConfig] = None) -> StudyResult:
    """out_dir의 샤드 파일을 모두 읽어 집계하고 study.csv로 저장"""
    out_dir = Path(out_dir)
    result = aggregate_records(load_records(out_dir, cfg), cfg)
    write_study(result, out_dir)
    return result


# ---------- 실행 ----------


def plan_tasks(
        cfg: StudyConfig,
        shard: Tuple[int, int] = (0, 1),
        done: Optional[Set[Tuple[str, str, int]]] = None,
) -> List[Tuple[ScenarioConfig, int, List[str]]]:
    """샤드(run % n == i)에 속하고 아직 끝나지 않은 (시나리오, run, 모형 라벨들)"""
    index, count = shard
    done = done or set()
    tasks = []
    for sc in cfg.grid.scenarios(cfg.base):
        for run in range(cfg.n_runs):
            if run % count != index:
                continue
            labels = [m for m in cfg.models if (sc.scenario_id, m, run) not in done]
            if labels:
                tasks.append((sc, run, labels))
    return tasks


def run_study(
        cfg: StudyConfig,
        out_dir,
        *,
        shard: Tuple[int, int] = (0, 1),
        resume: bool = False,
        executor: Optional[Executor] = None,
        progress: bool = True,
) -> StudyResult:
    """
    시뮬레이션 연구 실행

    Args:
        shard: (i, n) 이 프로세스가 맡을 run 집합 (run % n == i)
        resume: out_dir에 이미 기록된 (시나리오, 모형, run)은 건너뜀.
            False면 이 샤드 파일과 샤드 수가 다른 샤드 파일을 지우고 시작
        executor: 있으면 run 단위로 병렬 실행
        progress: tqdm 진행 표시

    Returns:
        StudyResult: out_dir에 있는 모든 행(다른 샤드 포함)의 집계
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = runs_path(out_dir, shard)
    done: Set[Tuple[str, str, int]] = set()
    if resume:
        done = _done_keys(load_records(out_dir, cfg))
        logger.info("재개: 이미 기록된 %d건을 건너뜁니다.", len(done))
    else:
        # 이 샤드 파일과 샤드 수가 다른 파일(이전 배치)은 지운다
        for stale in Path(out_dir).glob(RUNS_FILE_PATTERN):
            if stale == path or not stale.name.endswith(f"of{shard[1]}.csv"):
                stale.unlink()

    tasks = plan_tasks(cfg, shard, done)
    logger.info("샤드 %d/%d: run 작업 %d건", shard[0], shard[1], len(tasks))
    with tqdm(total=len(tasks), disable=not progress, desc="study") as bar:
        if executor is None:
            for task in tasks:
                append_records(path, _run_task((*task, cfg)))
                bar.update(1)
        else:
            futures = [executor.submit(_run_task, (*task, cfg)) for task in tasks]
            for future in as_completed(futures):
                append_records(path, future.result())
                bar.update(1)

    result = aggregate_study(out_dir, cfg)
    for row in result.rows:
        if not row.valid:
            logger.error(
                "셀 (모형 %s, sigma=%.3f, TAD=%.3f, omega=%.4f) 실패 %d건으로 무효",
                row.model, row.sigma, row.tad, row.omega, row.n_failed,
            )
    return result


__all__ = [
    "STUDY_PRESETS",
    "parse_shard",
    "study_fingerprint",
    "model_spec_for",
    "mcmc_for",
    "run_single",
    "runs_path",
    "append_records",
    "load_records",
    "aggregate_records",
    "write_study",
    "aggregate_study",
    "plan_tasks",
    "run_study",
]
