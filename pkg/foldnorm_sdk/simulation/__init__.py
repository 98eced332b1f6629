"""
모의자료 생성과 몬테카를로 시뮬레이션 연구
"""
from .dgp import (
    APPLICATION_TALLIES,
    APPLICATION_SCENARIO,
    simulate_complete,
    subject_risk,
    draw_dropout_times,
    simulate_dropout,
    simulate_scenario,
    simulate_application_like,
)
from .study import (
    STUDY_PRESETS,
    parse_shard,
    model_spec_for,
    run_single,
    load_records,
    aggregate_records,
    aggregate_study,
    plan_tasks,
    run_study,
)
from .namespace import SimulationNamespace

__all__ = [
    "APPLICATION_TALLIES",
    "APPLICATION_SCENARIO",
    "simulate_complete",
    "subject_risk",
    "draw_dropout_times",
    "simulate_dropout",
    "simulate_scenario",
    "simulate_application_like",
    "STUDY_PRESETS",
    "parse_shard",
    "model_spec_for",
    "run_single",
    "load_records",
    "aggregate_records",
    "aggregate_study",
    "plan_tasks",
    "run_study",
    "SimulationNamespace",
]
