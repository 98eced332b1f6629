"""
foldnorm 명령행 도구

    foldnorm fit data.csv --model D --temporal grouped:2 --chains 4 --out fit-out
    foldnorm simulate --dropout --seed 7 --out sim-out
    foldnorm study --preset dropout --runs 5 --shard 0/2 --out study-out

종료 코드: 0 성공 (R-hat 경고 포함), 2 자료/설정 오류, 3 샘플러 초기화 실패 또는 무효 연구
"""
import argparse
import logging
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from foldnorm_sdk.client import FoldnormClient
from foldnorm_sdk.dataset.io import (
    dropout_table,
    load_config,
    read_dataset_csv,
    write_dataset_csv,
    write_frame,
    write_truth_json,
)
from foldnorm_sdk.errors import (
    DomainError,
    FoldnormError,
    ParameterError,
    SamplerInitError,
    StructureError,
    StudyInvalidError,
)
from foldnorm_sdk.schema.config_schema import RunConfig, SimulateConfig, StudyConfig
from foldnorm_sdk.schema.model_schema import ModelSpec
from foldnorm_sdk.simulation.dgp import moments_report
from foldnorm_sdk.simulation.study import STUDY_PRESETS, aggregate_study, parse_shard

logger = logging.getLogger("foldnorm_sdk.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


# ---------- 공통 ----------


def _merged(cfg, update: dict):
    """CLI 플래그를 덮어쓴 뒤 다시 검증 (플래그 > 설정 파일)"""
    return type(cfg).model_validate({**cfg.model_dump(), **update})


def _mcmc_overrides(args: argparse.Namespace) -> dict:
    update = {}
    if getattr(args, "chains", None) is not None:
        update["n_chains"] = args.chains
    if getattr(args, "burnin", None) is not None:
        update["burn_in"] = args.burnin
    if getattr(args, "samples", None) is not None:
        update["n_samples"] = args.samples
    return update


def _add_mcmc_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--chains", type=int, help="체인 수")
    parser.add_argument("--burnin", type=int, help="burn-in 반복 수")
    parser.add_argument("--samples", type=int, help="체인별 보존 표본 수")
    parser.add_argument("--seed", type=int, help="마스터 시드")
    parser.add_argument("--workers", type=int, help="병렬 프로세스 수")


# ---------- fit ----------


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, RunConfig) if args.config else RunConfig()
    update = {}
    for flag, field in (("model", "model"), ("temporal", "temporal"), ("K", "K"), ("out", "out_dir"),
                        ("workers", "workers")):
        if getattr(args, flag) is not None:
            update[field] = getattr(args, flag)
    if args.drop_baseline:
        update["drop_baseline"] = True
    mcmc_update = _mcmc_overrides(args)
    if args.seed is not None:
        mcmc_update["seed"] = args.seed
    update["mcmc"] = {**cfg.mcmc.model_dump(), **mcmc_update}
    cfg = _merged(cfg, update)

    data_path = args.data or cfg.data_path
    if not data_path:
        raise StructureError("자료 CSV 경로가 필요합니다. (인자 또는 설정 파일 data_path)")
    data = read_dataset_csv(data_path, K=cfg.K, drop_baseline=cfg.drop_baseline)
    spec = ModelSpec.build(
        cfg.model,
        K=data.K,
        temporal=cfg.temporal,
        outcome_prior=cfg.outcome_prior,
        reference_prior=cfg.reference_prior,
        dropout_prior=cfg.dropout_prior,
    )

    with FoldnormClient(workers=cfg.workers, seed=cfg.mcmc.seed) as client:
        report = client.inference.fit(data, spec, cfg.mcmc)

    out = Path(cfg.out_dir)
    write_frame(report.summary_frame(), out / "summary.csv")
    write_frame(report.diagnostics_frame(), out / "diagnostics.csv")
    write_frame(report.acceptance_frame(), out / "acceptance.csv")
    write_frame(report.draws_frame(), out / "draws.csv")

    ad = report.summary("AD")
    print(f"모형 {spec.variant.value} AD: 평균 {ad.mean:.5f}, 중앙값 {ad.median:.5f}, "
          f"S.D. {ad.sd:.5f}, 95% 구간 ({ad.q025:.5f}, {ad.q975:.5f})")
    if report.has_warnings:
        flagged = [row.name for row in report.diagnostics if row.warning]
        print(f"경고: R-hat > 1.05 인 값 {len(flagged)}개: {', '.join(flagged)}", file=sys.stderr)
    print(f"결과 저장: {out}")
    return EXIT_OK


# ---------- simulate ----------


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, SimulateConfig) if args.config else SimulateConfig()
    update = {}
    if args.seed is not None:
        update["seed"] = args.seed
    if args.out is not None:
        update["out_dir"] = args.out
    if args.application_like:
        update["application_like"] = True
    if args.dropout:
        update["scenario"] = {**cfg.scenario.model_dump(), "dropout_enabled": True}
    cfg = _merged(cfg, update)

    with FoldnormClient(workers=1, seed=cfg.seed) as client:
        if cfg.application_like:
            data, truth = client.simulation.application_like()
        else:
            data, truth = client.simulation.generate(cfg.scenario)

    out = Path(cfg.out_dir)
    write_dataset_csv(data, out / "data.csv")
    write_truth_json(truth, out / "truth.json")
    write_frame(dropout_table(data), out / "dropout_table.csv")
    if not cfg.application_like:
        write_frame(moments_report(data, cfg.scenario), out / "moments.csv")
    print(f"모의자료 저장: {out} (대상자 {data.n_subjects}명, 관측 {data.n_observations}개, TAD={truth.tad:.5f})")
    return EXIT_OK


# ---------- study ----------


def cmd_study(args: argparse.Namespace) -> int:
    if args.config:
        cfg = load_config(args.config, StudyConfig)
    else:
        cfg = STUDY_PRESETS[args.preset].model_copy(deep=True)
    update = {}
    if args.runs is not None:
        update["n_runs"] = args.runs
    if args.seed is not None:
        update["master_seed"] = args.seed
    if args.temporal is not None:
        update["temporal"] = args.temporal
    mcmc_update = _mcmc_overrides(args)
    if mcmc_update:
        update["mcmc"] = {**cfg.mcmc.model_dump(), **mcmc_update}
    cfg = _merged(cfg, update)

    out = Path(args.out)
    if args.aggregate_only:
        result = aggregate_study(out, cfg)
    else:
        with FoldnormClient(workers=args.workers) as client:
            result = client.simulation.study(
                cfg,
                out,
                shard=parse_shard(args.shard),
                resume=args.resume,
                progress=not args.quiet,
            )

    frame = result.to_frame()
    if not frame.empty:
        print(frame.drop(columns=["n_runs", "n_failed", "valid"], errors="ignore").to_string(index=False))
    print(f"집계 저장: {out / 'study.csv'}")
    if not result.valid:
        logger.error("실패 run 비율이 한도를 넘은 셀이 있습니다. 부분 결과는 %s 에 남아 있습니다.", out)
        return EXIT_RUNTIME
    return EXIT_OK


# ---------- 파서 / 진입점 ----------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foldnorm",
        description="Folded normal 혼합효과 / 공동모형 베이지안 추론",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG 로그 출력")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="CSV 자료에 모형 A-D 적합")
    fit.add_argument("data", nargs="?", help="자료 CSV (subject_id, exposure, time, z[, dropout_cause])")
    fit.add_argument("--config", help="RunConfig 설정 파일 (.json/.toml)")
    fit.add_argument("--model", help="A|B|C|D (또는 L, F, I, II, III)")
    fit.add_argument("--temporal", help="linear | flexible | grouped:N")
    fit.add_argument("--K", type=int, help="측정 시점 수 (기본: 자료의 최대 시점 + 1)")
    fit.add_argument("--drop-baseline", action="store_true", help="time=0 행을 버리고 시점을 당김")
    fit.add_argument("--out", help="출력 디렉터리")
    _add_mcmc_flags(fit)
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="모의자료 생성")
    sim.add_argument("--config", help="SimulateConfig 설정 파일 (.json/.toml)")
    sim.add_argument("--seed", type=int, help="시드")
    sim.add_argument("--out", help="출력 디렉터리")
    sim.add_argument("--dropout", action="store_true", help="경쟁위험 중도탈락 적용")
    sim.add_argument("--application-like", action="store_true", help="응용연구 모양의 K=9 코호트")
    sim.set_defaults(func=cmd_simulate)

    study = sub.add_parser("study", help="몬테카를로 시뮬레이션 연구")
    study.add_argument("--config", help="StudyConfig 설정 파일 (.json/.toml)")
    study.add_argument("--preset", choices=sorted(STUDY_PRESETS), default="complete", help="미리 정의된 연구")
    study.add_argument("--runs", type=int, help="셀별 run 수")
    study.add_argument("--temporal", help="모형 III 시간 함수 (flexible | grouped:N)")
    study.add_argument("--shard", default="0/1", help="i/n: run %% n == i 인 run만 실행")
    study.add_argument("--resume", action="store_true", help="기록된 run은 건너뜀")
    study.add_argument("--aggregate-only", action="store_true", help="실행 없이 샤드 파일만 집계")
    study.add_argument("--quiet", action="store_true", help="진행 표시 끄기")
    study.add_argument("--out", default="study-out", help="출력 디렉터리")
    _add_mcmc_flags(study)
    study.set_defaults(func=cmd_study)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (StructureError, ParameterError, DomainError, ValidationError) as exc:
        logger.error("입력 오류: %s", exc)
        return EXIT_INPUT
    except (FileNotFoundError, tomllib.TOMLDecodeError) as exc:
        logger.error("파일 오류: %s", exc)
        return EXIT_INPUT
    except (SamplerInitError, StudyInvalidError) as exc:
        logger.error("실행 실패: %s", exc)
        return EXIT_RUNTIME
    except FoldnormError as exc:
        logger.error("오류: %s", exc)
        return EXIT_FAILURE


__all__ = ["build_parser", "main", "cmd_fit", "cmd_simulate", "cmd_study"]
