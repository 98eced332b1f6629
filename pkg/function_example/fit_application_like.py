"""
응용연구 모양의 코호트(K=9)를 만들어 모형 B, C, D의 평균거리(AD)를 비교하는 함수
"""

from foldnorm_sdk import FoldnormClient, McmcConfig, ModelSpec


def fit_application_like(seed=20240101, workers=4):
    """
    응용연구 집계표와 같은 중도탈락 구성을 가진 모의 코호트에
    folded 모형 B(중도탈락 무시), C(linear 결합), D(grouped:2 결합)를 적합합니다.

    Args:
        seed: 자료 생성과 MCMC에 쓰는 시드
        workers: 체인 병렬 프로세스 수

    Returns:
        dict: 모형별 AD 사후 요약 (PosteriorSummary)

    Example:
        result = fit_application_like(seed=7, workers=2)
        print(result["D"].mean)
    """
    client = FoldnormClient(workers=workers, seed=seed)

    try:
        data, truth = client.simulation.application_like()
        print(f"생성된 코호트: 대상자 {data.n_subjects}명, 관측 {data.n_observations}개, 참 AD={truth.tad:.4f}")
        print(client.dataset.dropout_table(data).to_string(index=False))

        mcmc = McmcConfig(n_chains=4, burn_in=2000, n_samples=2000, seed=seed)
        specs = {
            "B": ModelSpec.build("B", K=data.K),
            "C": ModelSpec.build("C", K=data.K),
            "D": ModelSpec.build("D", K=data.K, temporal="grouped:2"),
        }

        results = {}
        for label, spec in specs.items():
            report = client.inference.fit(data, spec, mcmc)
            ad = report.summary("AD")
            results[label] = ad
            flag = " (R-hat 경고)" if report.has_warnings else ""
            print(f"모형 {label}: AD 평균 {ad.mean:.4f}, 95% 구간 ({ad.q025:.4f}, {ad.q975:.4f}){flag}")

        return results

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
    fit_application_like()
