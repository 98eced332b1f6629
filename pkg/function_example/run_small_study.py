"""
축소한 시뮬레이션 연구를 샤드 두 개로 나눠 돌리고 합쳐서 집계하는 함수
"""

from foldnorm_sdk import FoldnormClient, McmcConfig, StudyConfig
from foldnorm_sdk.schema import ScenarioConfig, StudyGrid


def run_small_study(out_dir="study-out", n_runs=10, workers=2):
    """
    모형 L(선형 참조)과 F(folded) 비교를 4개 셀에서 n_runs번씩 반복합니다.

    실제 배치 환경에서는 샤드마다 다른 프로세스/머신에서
    `foldnorm study --shard i/n` 으로 돌리고 마지막에 `--aggregate-only`로 합칩니다.

    Returns:
        pandas.DataFrame: 셀별 Bias, S.E., MSE 등
    """
    cfg = StudyConfig(
        master_seed=2024,
        n_runs=n_runs,
        models=["L", "F"],
        grid=StudyGrid(sigmas=[0.06], d0s=[0.08, 0.06, 0.05, 0.04], omegas=[0.5]),
        base=ScenarioConfig(n_subjects=100, K=7),
        mcmc=McmcConfig(n_chains=2, burn_in=500, n_samples=500),
        burn_in_overrides={"L": 1000},
    )
    client = FoldnormClient(workers=workers)

    try:
        for shard in ((0, 2), (1, 2)):
            print(f"샤드 {shard[0]}/{shard[1]} 실행 중...")
            client.simulation.study(cfg, out_dir, shard=shard, resume=True)

        result = client.simulation.aggregate(out_dir, cfg)
        frame = result.to_frame()
        print(frame[["Model", "TAD", "Bias", "S.E.", "MSE", "n_failed"]].to_string(index=False))

        if not result.valid:
            print("경고: 실패 비율 한도를 넘은 셀이 있습니다.")
        return frame

    except Exception as e:
        print(f"✗ 에러 발생: {e}")
        import traceback
        traceback.print_exc()
        raise

    finally:
        client.close()


if __name__ == "__main__":
    """
    사용 예제
    """
    run_small_study()
