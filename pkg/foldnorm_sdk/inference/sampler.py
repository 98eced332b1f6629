"""
적응형 Metropolis-within-Gibbs 샘플러

한 스윕의 갱신 순서 (고정):
    c0, c1, d0, d1, sigma2, tau_a0, tau_a1, tau_b0, tau_b1, b0, b1, (결합) 중도탈락 계수

- 고정효과: 항등 척도 random walk, 지지집합 밖은 거부
- sigma2: 로그 척도
- tau: 현재 상한 b(짝 고정효과 * omega)에 대한 로짓 척도, 야코비안 log tau + log(1 - tau/b)
- 랜덤효과: 대상자별 독립 채택/거부, 대상자별 제안 척도 (한 번에 벡터화)
- 중도탈락 계수: 계수마다 스칼라 블록

제안 척도는 burn-in 동안에만 adapt_window 단위로 target_accept 쪽으로 조정한다.

사용 예:
    chain = run_chain(data, spec, McmcConfig(seed=1), chain_index=0)
    print(chain.column("AD").mean())
"""
import logging
import math
from concurrent.futures import Executor
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.special import expit, logit

from foldnorm_sdk.distributions.rng import derive_rng
from foldnorm_sdk.errors import SamplerInitError
from foldnorm_sdk.model.posterior import FlatState, PosteriorKernel
from foldnorm_sdk.schema.config_schema import McmcConfig
from foldnorm_sdk.schema.data_schema import LongitudinalDataset
from foldnorm_sdk.schema.model_schema import (
    FIXED_EFFECT_NAMES,
    TAU_NAMES,
    DropoutParams,
    ModelSpec,
    ParameterState,
)
from foldnorm_sdk.schema.result_schema import ChainOutput

logger = logging.getLogger(__name__)

RANDOM_EFFECT_BLOCKS = ("b0", "b1")


def monitored_names(spec: ModelSpec) -> List[str]:
    names = list(FIXED_EFFECT_NAMES) + ["sigma2"] + list(TAU_NAMES) + ["AD"]
    if spec.variant.is_joint:
        names.extend(DropoutParams.parameter_names(spec.n_dropout_coefficients))
    return names


class _Block:
    """제안 척도와 채택 카운터. 랜덤효과 블록은 대상자 수 길이의 배열을 쓴다"""

    def __init__(self, name: str, log_scale):
        self.name = name
        self.log_scale = np.asarray(log_scale, dtype=float)
        self.window_accepts = np.zeros_like(self.log_scale)
        self.total_accepts = np.zeros_like(self.log_scale)

    @property
    def scale(self):
        return np.exp(self.log_scale)

    def record(self, accepted, sampling: bool) -> None:
        self.window_accepts += accepted
        if sampling:
            self.total_accepts += accepted

    def adapt(self, window: int, window_index: int, target: float, max_step: float) -> None:
        rate = self.window_accepts / window
        step = min(max_step, 1.0 / math.sqrt(window_index))
        self.log_scale = self.log_scale + np.where(rate > target, step, -step)
        self.window_accepts = np.zeros_like(self.log_scale)

    def window_rate(self, window: int) -> float:
        return float(np.mean(self.window_accepts) / window)


def initial_flat_state(
        kernel: PosteriorKernel,
        rng: Optional[np.random.Generator] = None,
) -> FlatState:
    """
    그룹별 최소제곱 초기값

    - 고정효과: |z| ~ t 최소제곱 (0.01 이상으로 절삭)
    - sigma2: 잔차분산 (하한 1e-4)
    - tau: min(상한, 고정효과)의 절반, 랜덤효과와 중도탈락 계수는 0
    rng가 주어지면 재초기화용으로 흔든다.
    """
    d = kernel.design
    fixed = np.zeros(4)
    residuals = []
    for g in (0, 1):
        rows = d.group == g
        t = np.broadcast_to(d.times, d.z.shape)[rows][d.mask[rows]]
        z = d.z[rows][d.mask[rows]]
        if z.size == 0:
            intercept, slope = 0.1, 0.01
        elif np.unique(t).size >= 2:
            slope, intercept = np.polyfit(t, z, 1)
            residuals.append(z - (intercept + slope * t))
        else:
            intercept, slope = float(np.mean(z)), 0.0
            residuals.append(z - intercept)
        fixed[2 * g] = intercept
        fixed[2 * g + 1] = slope
    fixed = np.maximum(fixed, 0.01)
    pooled = np.concatenate(residuals) if residuals else np.zeros(0)
    sigma2 = max(float(np.var(pooled)) if pooled.size > 1 else 0.0, 1e-4)

    if rng is not None:
        fixed = fixed * np.exp(0.2 * rng.standard_normal(4))
        sigma2 = sigma2 * math.exp(0.2 * rng.standard_normal())

    flat = FlatState(
        fixed=fixed,
        sigma2=sigma2,
        tau=np.zeros(4),
        b=np.zeros((kernel.n_subjects, 2)),
        dropout=np.zeros(4 * kernel.n_coef + 8 if kernel.spec.variant.is_joint else 0),
    )
    fraction = 0.5 if rng is None else rng.uniform(0.2, 0.8, size=4)
    flat.tau = fraction * np.minimum(kernel.tau_bounds(flat), fixed)
    return flat


class AdaptiveGibbsSampler:
    """체인 하나의 상태와 캐시된 로그 사후밀도 항"""

    def __init__(self, kernel: PosteriorKernel, cfg: McmcConfig, rng: np.random.Generator):
        self.kernel = kernel
        self.cfg = cfg
        self.rng = rng
        self.flat: Optional[FlatState] = None
        self.blocks: Dict[str, _Block] = {}
        self._frozen = set(cfg.freeze)

    # ---------- 초기화 ----------

    def initialize(self, initial: Optional[FlatState] = None) -> None:
        attempts = self.cfg.max_init_attempts
        for attempt in range(attempts):
            if attempt == 0:
                candidate = initial.copy() if initial is not None else initial_flat_state(self.kernel)
            else:
                candidate = initial_flat_state(self.kernel, rng=self.rng)
            self.kernel.check_state(candidate)
            self.flat = candidate
            self._refresh_cache()
            if math.isfinite(self.log_posterior()):
                break
            logger.warning(
                "초기 로그 사후밀도가 유한하지 않아 재초기화합니다. (시도 %d/%d)", attempt + 1, attempts
            )
        else:
            raise SamplerInitError(
                f"{attempts}번 재초기화했지만 초기 로그 사후밀도가 유한하지 않습니다."
            )
        self._build_blocks()

    def _refresh_cache(self) -> None:
        k, flat = self.kernel, self.flat
        self.fe_prior = k.fe_prior(flat)
        self.tau_prior = k.tau_prior(flat) if math.isfinite(self.fe_prior) else -math.inf
        self.dp_prior = k.dropout_prior(flat)
        self.outcome = k.subject_outcome(flat)
        self.re_prior = k.subject_re_prior(flat)
        self.dropout = k.subject_dropout(flat)

    def _build_blocks(self) -> None:
        flat = self.flat
        blocks = {}
        for i, name in enumerate(FIXED_EFFECT_NAMES):
            blocks[name] = _Block(name, math.log(max(0.1 * abs(flat.fixed[i]), 0.005)))
        blocks["sigma2"] = _Block("sigma2", math.log(0.2))
        for name in TAU_NAMES:
            blocks[name] = _Block(name, 0.0)
        subject_tau = flat.tau[self.kernel.group_index]
        for j, name in enumerate(RANDOM_EFFECT_BLOCKS):
            blocks[name] = _Block(name, np.log(0.5 * subject_tau[:, j]))
        if self.kernel.spec.variant.is_joint:
            for name in self.dropout_names:
                blocks[name] = _Block(name, math.log(0.3))
        self.blocks = {name: block for name, block in blocks.items() if not self._is_frozen(name)}

    @property
    def dropout_names(self) -> List[str]:
        return DropoutParams.parameter_names(self.kernel.n_coef)

    def _is_frozen(self, name: str) -> bool:
        if name in self._frozen:
            return True
        return "dropout" in self._frozen and name in self.dropout_names

    def log_posterior(self) -> float:
        scalar = self.fe_prior + self.tau_prior
        if not math.isfinite(scalar):
            return -math.inf
        return float(
            scalar + self.dp_prior + np.sum(self.outcome + self.re_prior + self.dropout)
        )

    # ---------- 블록 갱신 ----------

    def _accept(self, log_ratio: float) -> bool:
        return math.log(self.rng.random()) < log_ratio

    def _update_fixed(self, index: int, block: _Block, sampling: bool) -> None:
        k, flat = self.kernel, self.flat
        old = flat.fixed[index]
        flat.fixed[index] = old + block.scale * self.rng.standard_normal()
        fe_prior = k.fe_prior(flat)
        tau_prior = k.tau_prior(flat) if math.isfinite(fe_prior) else -math.inf
        accepted = False
        if math.isfinite(fe_prior + tau_prior):
            outcome = k.subject_outcome(flat)
            log_ratio = (fe_prior + tau_prior + outcome.sum()) - (
                self.fe_prior + self.tau_prior + self.outcome.sum()
            )
            accepted = self._accept(log_ratio)
        if accepted:
            self.fe_prior, self.tau_prior, self.outcome = fe_prior, tau_prior, outcome
        else:
            flat.fixed[index] = old
        block.record(accepted, sampling)

    def _update_sigma2(self, block: _Block, sampling: bool) -> None:
        k, flat = self.kernel, self.flat
        old = flat.sigma2
        log_old = math.log(old)
        log_new = log_old + block.scale * self.rng.standard_normal()
        flat.sigma2 = math.exp(log_new)
        fe_prior = k.fe_prior(flat)
        accepted = False
        if math.isfinite(fe_prior) and flat.sigma2 > 0:
            outcome = k.subject_outcome(flat)
            log_ratio = (fe_prior + outcome.sum() + log_new) - (
                self.fe_prior + self.outcome.sum() + log_old
            )
            accepted = self._accept(log_ratio)
        if accepted:
            self.fe_prior, self.outcome = fe_prior, outcome
        else:
            flat.sigma2 = old
        block.record(accepted, sampling)

    def _update_tau(self, index: int, block: _Block, sampling: bool) -> None:
        k, flat = self.kernel, self.flat
        bound = float(k.tau_bounds(flat)[index])
        old = flat.tau[index]
        new = bound * expit(logit(old / bound) + block.scale * self.rng.standard_normal())
        accepted = False
        if 0.0 < new < bound:
            flat.tau[index] = new
            re_prior = k.subject_re_prior(flat)
            tau_prior = k.tau_prior(flat)
            log_jac_new = math.log(new) + math.log1p(-new / bound)
            log_jac_old = math.log(old) + math.log1p(-old / bound)
            log_ratio = (re_prior.sum() + tau_prior + log_jac_new) - (
                self.re_prior.sum() + self.tau_prior + log_jac_old
            )
            accepted = self._accept(log_ratio)
            if accepted:
                self.re_prior, self.tau_prior = re_prior, tau_prior
            else:
                flat.tau[index] = old
        block.record(accepted, sampling)

    def _update_random_effects(self, component: int, block: _Block, sampling: bool) -> None:
        k, flat = self.kernel, self.flat
        old = flat.b[:, component].copy()
        flat.b[:, component] = old + block.scale * self.rng.standard_normal(k.n_subjects)
        outcome = k.subject_outcome(flat)
        re_prior = k.subject_re_prior(flat)
        dropout = k.subject_dropout(flat)
        log_ratio = (outcome + re_prior + dropout) - (self.outcome + self.re_prior + self.dropout)
        log_u = np.log(self.rng.random(k.n_subjects))
        accepted = log_u < log_ratio
        flat.b[~accepted, component] = old[~accepted]
        self.outcome = np.where(accepted, outcome, self.outcome)
        self.re_prior = np.where(accepted, re_prior, self.re_prior)
        self.dropout = np.where(accepted, dropout, self.dropout)
        block.record(accepted.astype(float), sampling)

    def _update_dropout(self, index: int, block: _Block, sampling: bool) -> None:
        k, flat = self.kernel, self.flat
        old = flat.dropout[index]
        flat.dropout[index] = old + block.scale * self.rng.standard_normal()
        dropout = k.subject_dropout(flat)
        dp_prior = k.dropout_prior(flat)
        log_ratio = (dropout.sum() + dp_prior) - (self.dropout.sum() + self.dp_prior)
        accepted = self._accept(log_ratio)
        if accepted:
            self.dropout, self.dp_prior = dropout, dp_prior
        else:
            flat.dropout[index] = old
        block.record(accepted, sampling)

    def sweep(self, sampling: bool) -> None:
        blocks = self.blocks
        for i, name in enumerate(FIXED_EFFECT_NAMES):
            if name in blocks:
                self._update_fixed(i, blocks[name], sampling)
        if "sigma2" in blocks:
            self._update_sigma2(blocks["sigma2"], sampling)
        for i, name in enumerate(TAU_NAMES):
            if name in blocks:
                self._update_tau(i, blocks[name], sampling)
        for j, name in enumerate(RANDOM_EFFECT_BLOCKS):
            if name in blocks:
                self._update_random_effects(j, blocks[name], sampling)
        if self.kernel.spec.variant.is_joint:
            for i, name in enumerate(self.dropout_names):
                if name in blocks:
                    self._update_dropout(i, blocks[name], sampling)

    # ---------- 실행 ----------

    def monitored(self) -> np.ndarray:
        flat, K = self.flat, self.kernel.spec.K
        ad = flat.fixed[0] - flat.fixed[2] + (flat.fixed[1] - flat.fixed[3]) * (K - 1) / 2.0
        return np.concatenate([flat.fixed, [flat.sigma2], flat.tau, [ad], flat.dropout])

    def run(self, chain_index: int) -> ChainOutput:
        cfg = self.cfg
        window = cfg.adapt_window
        for it in range(cfg.burn_in):
            self.sweep(sampling=False)
            if (it + 1) % window == 0:
                window_index = (it + 1) // window
                for block in self.blocks.values():
                    block.adapt(window, window_index, cfg.target_accept, cfg.adapt_max_step)
        for block in self.blocks.values():
            block.window_accepts = np.zeros_like(block.log_scale)
        if cfg.burn_in:
            logger.debug(
                "체인 %d burn-in 종료. 최종 제안 척도: %s",
                chain_index,
                {name: float(np.mean(b.scale)) for name, b in self.blocks.items()},
            )

        n = cfg.n_samples
        names = monitored_names(self.kernel.spec)
        draws = np.empty((n, len(names)))
        log_post = np.empty(n)
        re_draws = np.empty((n, self.kernel.n_subjects, 2)) if cfg.keep_random_effects else None
        for it in range(n):
            self.sweep(sampling=True)
            draws[it] = self.monitored()
            log_post[it] = self.log_posterior()
            if re_draws is not None:
                re_draws[it] = self.flat.b
        acceptance = {
            name: float(np.mean(block.total_accepts) / n) for name, block in self.blocks.items()
        }
        logger.debug("체인 %d 채택률: %s", chain_index, acceptance)
        return ChainOutput(
            chain_index=chain_index,
            seed=cfg.seed,
            parameter_names=names,
            draws=draws,
            log_posterior=log_post,
            acceptance=acceptance,
            random_effects=re_draws,
        )


def run_chain(
        data: LongitudinalDataset,
        spec: ModelSpec,
        cfg: McmcConfig,
        chain_index: int,
        *,
        initial_state: Optional[ParameterState] = None,
        prior_only: bool = False,
) -> ChainOutput:
    """
    체인 하나 실행. (cfg.seed, chain_index)가 같으면 결과가 비트 단위로 같다.

    Args:
        initial_state: 첫 초기화 시도에 쓸 상태 (없으면 최소제곱 초기값)
        prior_only: True면 우도를 끄고 사전분포에서 표본 추출
    """
    kernel = PosteriorKernel(data, spec, prior_only=prior_only)
    rng = derive_rng(cfg.seed, "chain", chain_index)
    sampler = AdaptiveGibbsSampler(kernel, cfg, rng)
    initial = FlatState.from_state(initial_state) if initial_state is not None else None
    sampler.initialize(initial)
    return sampler.run(chain_index)


def _chain_task(args) -> ChainOutput:
    data, spec, cfg, chain_index, initial_state, prior_only = args
    return run_chain(
        data, spec, cfg, chain_index, initial_state=initial_state, prior_only=prior_only
    )


def run_chains(
        data: LongitudinalDataset,
        spec: ModelSpec,
        cfg: McmcConfig,
        *,
        executor: Optional[Executor] = None,
        initial_state: Optional[ParameterState] = None,
        prior_only: bool = False,
) -> List[ChainOutput]:
    """
    cfg.n_chains개 체인 실행. executor가 있으면 체인을 병렬로 돌리고
    결과는 항상 chain_index 순서로 돌려준다.
    """
    tasks = [
        (data, spec, cfg, i, initial_state, prior_only) for i in range(cfg.n_chains)
    ]
    if executor is None:
        return [_chain_task(task) for task in tasks]
    return list(executor.map(_chain_task, tasks))


def pooled_draws(chains: Sequence[ChainOutput], quantity: str) -> np.ndarray:
    return np.concatenate([chain.column(quantity) for chain in chains])


__all__ = [
    "monitored_names",
    "initial_flat_state",
    "AdaptiveGibbsSampler",
    "run_chain",
    "run_chains",
    "pooled_draws",
]
