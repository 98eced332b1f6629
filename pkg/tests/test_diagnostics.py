"""
수렴 진단과 사후 요약
"""
import logging
import math

import numpy as np
import pytest

from foldnorm_sdk.errors import StructureError
from foldnorm_sdk.inference.diagnostics import RHAT_WARNING_THRESHOLD, diagnose, ess, rhat
from foldnorm_sdk.inference.summary import summarize, summarize_all, summarize_draws
from foldnorm_sdk.schema import ChainOutput


def _chains(*columns):
    """각 인자는 한 체인의 'x' 표본"""
    out = []
    for i, column in enumerate(columns):
        column = np.asarray(column, dtype=float)
        out.append(
            ChainOutput(
                chain_index=i,
                seed=0,
                parameter_names=["x"],
                draws=column[:, None],
                log_posterior=np.zeros(column.size),
            )
        )
    return out


class TestRhat:

    def test_iid_chains(self, rng):
        chains = _chains(*rng.standard_normal((4, 2000)))
        assert 0.99 <= rhat(chains, "x") <= 1.02

    def test_shifted_chain(self, rng):
        draws = rng.standard_normal((4, 1000))
        draws[0] += 5.0
        assert rhat(_chains(*draws), "x") > 2.0

    def test_constant_draws(self):
        chains = _chains(np.full(100, 0.3), np.full(100, 0.3))
        assert rhat(chains, "x") == 1.0
        assert ess(chains, "x") == 200.0

    def test_needs_two_chains(self, rng):
        with pytest.raises(StructureError):
            rhat(_chains(rng.standard_normal(100)), "x")

    def test_unequal_lengths(self, rng):
        with pytest.raises(StructureError):
            rhat(_chains(rng.standard_normal(100), rng.standard_normal(90)), "x")


class TestEss:

    def test_iid_close_to_total(self, rng):
        chains = _chains(*rng.standard_normal((4, 1000)))
        assert ess(chains, "x") == pytest.approx(4000, rel=0.15)

    def test_autocorrelated_is_smaller(self, rng):
        rows = []
        for _ in range(4):
            x = np.empty(1000)
            x[0] = rng.standard_normal()
            for t in range(1, 1000):
                x[t] = 0.9 * x[t - 1] + rng.standard_normal()
            rows.append(x)
        assert ess(_chains(*rows), "x") < 800


class TestDiagnose:

    def test_flags_bad_mixing(self, rng, caplog):
        draws = rng.standard_normal((2, 500))
        draws[1] += 3.0
        with caplog.at_level(logging.WARNING, logger="foldnorm_sdk.inference.diagnostics"):
            rows = diagnose(_chains(*draws))
        assert rows[0].rhat > RHAT_WARNING_THRESHOLD
        assert rows[0].warning
        assert caplog.records

    def test_single_chain_has_no_rhat(self, rng):
        rows = diagnose(_chains(rng.standard_normal(200)))
        assert math.isnan(rows[0].rhat)
        assert not rows[0].warning
        assert rows[0].ess > 0

    def test_constant_flag(self):
        rows = diagnose(_chains(np.zeros(50), np.zeros(50)))
        assert rows[0].constant
        assert rows[0].rhat == 1.0


class TestSummary:
    """사후 요약 통계"""

    def test_linear_quantiles(self):
        summary = summarize_draws("x", np.arange(1, 101))
        assert summary.q025 == pytest.approx(3.475)
        assert summary.q975 == pytest.approx(97.525)
        assert summary.median == pytest.approx(50.5)
        assert summary.mean == pytest.approx(50.5)
        assert summary.sd == pytest.approx(np.std(np.arange(1, 101), ddof=1))

    def test_pools_chains(self):
        chains = _chains(np.arange(1, 51), np.arange(51, 101))
        summary = summarize(chains, "x")
        assert summary.q025 == pytest.approx(3.475)
        assert summary.name == "x"

    def test_alias_columns(self):
        row = summarize_all(_chains(np.arange(10.0), np.arange(10.0)))[0]
        dumped = row.model_dump(by_alias=True)
        assert list(dumped) == ["Parameter", "Mean", "Median", "S.D.", "2.5%Qt.", "97.5%Qt."]

    def test_empty(self):
        with pytest.raises(StructureError):
            summarize_draws("x", np.array([]))
