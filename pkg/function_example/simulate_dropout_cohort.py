"""
경쟁위험 중도탈락 시나리오별로 회복형/사망형 중도탈락 비율을 확인하는 함수
"""

from foldnorm_sdk import FoldnormClient, ScenarioConfig


def simulate_dropout_cohort(n_subjects=10000, out_dir=None):
    """
    d0를 바꿔 가며 (TAD 0.10 ~ 0.14) 중도탈락 자료를 만들고 사유별 비율을 출력합니다.

    Args:
        n_subjects: 시나리오별 대상자 수
        out_dir: 주면 시나리오별 data.csv / truth.json을 저장할 디렉터리

    Returns:
        list: 시나리오별 {"tad", "recovery", "death", "completer"} 비율
    """
    from pathlib import Path

    client = FoldnormClient(workers=1)

    try:
        rows = []
        for d0 in (0.08, 0.06, 0.05, 0.04):
            scenario = ScenarioConfig(n_subjects=n_subjects, d0=d0, dropout_enabled=True)
            data, truth = client.simulation.generate(scenario)

            table = client.dataset.dropout_table(data)
            totals = table.groupby("cause")["total"].sum() / data.n_subjects
            row = {
                "tad": round(truth.tad, 4),
                "recovery": float(totals.get("recovery", 0.0)),
                "death": float(totals.get("death", 0.0)),
                "completer": float(totals.get("completer", 0.0)),
            }
            rows.append(row)
            print(
                f"TAD={row['tad']:.2f}: 회복 {row['recovery']:.4f}, 사망 {row['death']:.4f}, "
                f"완료 {row['completer']:.4f} (R 잘라냄 {truth.n_clamped}명)"
            )

            if out_dir:
                target = Path(out_dir) / f"tad-{row['tad']:.2f}"
                client.dataset.write(data, target / "data.csv", truth=truth)

        return rows

    except Exception as e:
        print(f"[simulate_dropout_cohort] 에러 발생: {e}")
        import traceback
        traceback.print_exc()
        raise

    finally:
        client.close()


if __name__ == "__main__":
    """
    사용 예제
    """
    simulate_dropout_cohort()
