"""実行設定DTO.

RunConfig は設定ファイル/コマンドライン引数のフラットなキー空間をそのまま表し、
各サービスが使う LossConfig / TrainConfig などはそこから組み立てる.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Annotated, Self

from pydantic import BeforeValidator, Field, field_validator, model_validator

from app_conf import (
    ADAM_BETA1,
    ADAM_BETA2,
    ADAM_EPSILON,
    ALPHA_SCALE,
    CHECKPOINT_FILE,
    CODES_FILE,
    DEFAULT_BASE_LR,
    DEFAULT_BATCH_SIZE,
    DEFAULT_BITS,
    DEFAULT_DECAY_EVERY,
    DEFAULT_DECAY_RATE,
    DEFAULT_ENCODE_CHUNK,
    DEFAULT_HIDDEN_WIDTHS,
    DEFAULT_LAMBDA,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_TOP_N,
    DEFAULT_WORK_DIR,
    FEATURES_FILE,
    GAMMA_SCALE,
    LABELS_FILE,
    METRICS_CSV_FILE,
    METRICS_JSON_FILE,
    RANKING_FILE,
    SWEEP_FILE,
    TRAIN_REPORT_FILE,
    LossMode,
    SimilarityGranularity,
)

from .shared.base import BaseDTO

_SCALED = re.compile(r"^\s*([-+0-9.eE]+)\s*/\s*q\s*$")


def _split_list(value: object) -> object:
    """カンマ区切りの文字列をリストにする."""
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


def _check_scaled(value: object) -> object:
    if isinstance(value, str) and _SCALED.match(value) is None:
        try:
            return float(value)
        except ValueError:
            msg = f"Expected a number or '<number>/q', got {value!r}"
            raise ValueError(msg) from None
    return value


ScaledValue = Annotated[float | str, BeforeValidator(_check_scaled)]
IntList = Annotated[tuple[int, ...], BeforeValidator(_split_list)]
ScaledList = Annotated[tuple[ScaledValue, ...], BeforeValidator(_split_list)]


def resolve_scaled(value: float | str, bits: int) -> float:
    """数値または "<number>/q" 形式の値をコード長 q で解決する."""
    if isinstance(value, str):
        m = _SCALED.match(value)
        if m is None:
            return float(value)
        return float(m.group(1)) / bits
    return float(value)


class LossConfig(BaseDTO):
    """損失関数のハイパーパラメータ.

    Attributes:
        bits (int): コード長 q.
        alpha (float | str | None): 内積の帯域 α. None なら 5/q.
        gamma (float | str | None): MSE の重み γ. None なら 0.1/q.
        lambda_ (float): 量子化損失の重み λ (キー名は "lambda").
        mode (LossMode): ペア損失の組み合わせ.
        similarity (SimilarityGranularity): 類似度の粒度.
    """

    bits: int = Field(DEFAULT_BITS, ge=1)
    alpha: ScaledValue | None = None
    gamma: ScaledValue | None = None
    lambda_: float = Field(DEFAULT_LAMBDA, ge=0, alias="lambda")
    mode: LossMode = LossMode.JOINT
    similarity: SimilarityGranularity = SimilarityGranularity.FINE

    @property
    def resolved_alpha(self) -> float:
        if self.alpha is None:
            return ALPHA_SCALE / self.bits
        return resolve_scaled(self.alpha, self.bits)

    @property
    def resolved_gamma(self) -> float:
        if self.gamma is None:
            return GAMMA_SCALE / self.bits
        return resolve_scaled(self.gamma, self.bits)

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        if self.resolved_alpha <= 0:
            msg = f"alpha must be positive, got {self.resolved_alpha}"
            raise ValueError(msg)
        if self.resolved_gamma < 0:
            msg = f"gamma must be non-negative, got {self.resolved_gamma}"
            raise ValueError(msg)
        return self


class TrainConfig(BaseDTO):
    """学習ループとAdamの設定."""

    batch_size: int = Field(DEFAULT_BATCH_SIZE, ge=2)
    base_lr: float = Field(DEFAULT_BASE_LR, gt=0)
    decay_every: int = Field(DEFAULT_DECAY_EVERY, ge=1)
    decay_rate: float = Field(DEFAULT_DECAY_RATE, gt=0, le=1)
    max_iterations: int = Field(DEFAULT_MAX_ITERATIONS, ge=0)
    seed: int = DEFAULT_SEED
    adam_beta1: float = Field(ADAM_BETA1, ge=0, lt=1)
    adam_beta2: float = Field(ADAM_BETA2, ge=0, lt=1)
    adam_epsilon: float = Field(ADAM_EPSILON, gt=0)
    log_every: int = Field(100, ge=1)


class ArchitectureConfig(BaseDTO):
    """ハッシュヘッドの隠れ層構成. 空なら線形1層."""

    hidden_widths: IntList = DEFAULT_HIDDEN_WIDTHS

    @field_validator("hidden_widths")
    @classmethod
    def _positive(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(w < 1 for w in value):
            msg = f"hidden widths must be positive, got {value}"
            raise ValueError(msg)
        return value


class SyntheticConfig(BaseDTO):
    """合成多ラベルデータの生成設定."""

    num_items: int = Field(2000, ge=2)
    num_classes: int = Field(8, ge=2)
    feature_dim: int = Field(32, ge=1)
    label_density: float = Field(0.25, gt=0, lt=1)
    noise: float = Field(0.5, ge=0)
    seed: int = DEFAULT_SEED


class SplitConfig(BaseDTO):
    """クエリ/学習/データベースへの分割設定.

    サイズ指定がなければ割合から決める. データベースはクエリ以外の全項目
    (学習項目を含む) で、exclude_train_from_database で学習項目を除ける.
    """

    query_size: int | None = Field(None, ge=1)
    train_size: int | None = Field(None, ge=1)
    query_fraction: float = Field(0.1, gt=0, lt=1)
    train_fraction: float = Field(0.4, gt=0, lt=1)
    exclude_train_from_database: bool = False
    include_queries_in_database: bool = False
    seed: int = DEFAULT_SEED


class RunConfig(BaseDTO):
    """全コマンド共通のフラットな実行設定.

    設定ファイルのキーとフィールド名が1対1で対応する (lambda のみ lambda_).
    """

    # paths
    work_dir: Path = DEFAULT_WORK_DIR
    features_path: Path | None = None
    labels_path: Path | None = None
    checkpoint_path: Path | None = None
    codes_path: Path | None = None
    train_report_path: Path | None = None
    metrics_json_path: Path | None = None
    metrics_csv_path: Path | None = None
    ranking_path: Path | None = None
    sweep_path: Path | None = None

    # loss
    bits: int = Field(DEFAULT_BITS, ge=1)
    alpha: ScaledValue | None = None
    gamma: ScaledValue | None = None
    lambda_: float = Field(DEFAULT_LAMBDA, ge=0, alias="lambda")
    loss_mode: LossMode = LossMode.JOINT
    similarity: SimilarityGranularity = SimilarityGranularity.FINE

    # model / training
    hidden_widths: IntList = DEFAULT_HIDDEN_WIDTHS
    batch_size: int = Field(DEFAULT_BATCH_SIZE, ge=2)
    lr: float = Field(DEFAULT_BASE_LR, gt=0)
    decay_every: int = Field(DEFAULT_DECAY_EVERY, ge=1)
    decay_rate: float = Field(DEFAULT_DECAY_RATE, gt=0, le=1)
    max_iterations: int = Field(DEFAULT_MAX_ITERATIONS, ge=0)
    adam_beta1: float = Field(ADAM_BETA1, ge=0, lt=1)
    adam_beta2: float = Field(ADAM_BETA2, ge=0, lt=1)
    adam_epsilon: float = Field(ADAM_EPSILON, gt=0)
    log_every: int = Field(100, ge=1)
    seed: int = DEFAULT_SEED

    # synthetic data
    num_items: int = Field(2000, ge=2)
    num_classes: int = Field(8, ge=2)
    feature_dim: int = Field(32, ge=1)
    label_density: float = Field(0.25, gt=0, lt=1)
    noise: float = Field(0.5, ge=0)

    # splits
    query_size: int | None = Field(None, ge=1)
    train_size: int | None = Field(None, ge=1)
    query_fraction: float = Field(0.1, gt=0, lt=1)
    train_fraction: float = Field(0.4, gt=0, lt=1)
    exclude_train_from_database: bool = False
    include_queries_in_database: bool = False

    # retrieval / evaluation
    top_n: IntList = DEFAULT_TOP_N
    query_ids: IntList = ()
    exclude_self_match: bool = True
    correlation_pairs: int = Field(5000, ge=0)
    encode_chunk: int = Field(DEFAULT_ENCODE_CHUNK, ge=1)
    threads: int = Field(1, ge=1)

    # sweep (空リストは基準値1点)
    sweep_alpha: ScaledList = ()
    sweep_gamma: ScaledList = ()
    sweep_lambda: ScaledList = ()
    sweep_bits: IntList = ()

    @field_validator("top_n", "sweep_bits")
    @classmethod
    def _positive_list(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(v < 1 for v in value):
            msg = f"values must be positive, got {value}"
            raise ValueError(msg)
        return value

    @field_validator("correlation_pairs")
    @classmethod
    def _enough_pairs(cls, value: int) -> int:
        # 0 は相関の計算を省略する
        if value == 1:
            msg = "correlation_pairs must be 0 (disabled) or at least 2"
            raise ValueError(msg)
        return value

    @model_validator(mode="after")
    def _check_derived(self) -> Self:
        # 派生設定の検証を先に済ませ、副作用の前に不正値を弾く
        self.loss_config()
        self.architecture_config()
        for bits in self.sweep_bits or (self.bits,):
            for alpha in self.sweep_alpha or (self.alpha,):
                for gamma in self.sweep_gamma or (self.gamma,):
                    self.loss_config(bits=bits, alpha=alpha, gamma=gamma)
        if any(resolve_scaled(v, self.bits) < 0 for v in self.sweep_lambda):
            msg = "sweep_lambda values must be non-negative"
            raise ValueError(msg)
        return self

    def resolve_path(self, value: Path | None, default_name: str) -> Path:
        return value if value is not None else self.work_dir / default_name

    @property
    def features_file(self) -> Path:
        return self.resolve_path(self.features_path, FEATURES_FILE)

    @property
    def labels_file(self) -> Path:
        return self.resolve_path(self.labels_path, LABELS_FILE)

    @property
    def checkpoint_file(self) -> Path:
        return self.resolve_path(self.checkpoint_path, CHECKPOINT_FILE)

    @property
    def codes_file(self) -> Path:
        return self.resolve_path(self.codes_path, CODES_FILE)

    @property
    def train_report_file(self) -> Path:
        return self.resolve_path(self.train_report_path, TRAIN_REPORT_FILE)

    @property
    def metrics_json_file(self) -> Path:
        return self.resolve_path(self.metrics_json_path, METRICS_JSON_FILE)

    @property
    def metrics_csv_file(self) -> Path:
        return self.resolve_path(self.metrics_csv_path, METRICS_CSV_FILE)

    @property
    def ranking_file(self) -> Path:
        return self.resolve_path(self.ranking_path, RANKING_FILE)

    @property
    def sweep_file(self) -> Path:
        return self.resolve_path(self.sweep_path, SWEEP_FILE)

    def loss_config(
        self,
        *,
        bits: int | None = None,
        alpha: float | str | None = None,
        gamma: float | str | None = None,
        lambda_: float | str | None = None,
    ) -> LossConfig:
        """LossConfig を組み立てる. 引数を与えた項目だけ上書きする."""
        q = self.bits if bits is None else bits
        lam = self.lambda_ if lambda_ is None else resolve_scaled(lambda_, q)
        return LossConfig(
            bits=q,
            alpha=self.alpha if alpha is None else alpha,
            gamma=self.gamma if gamma is None else gamma,
            lambda_=lam,
            mode=self.loss_mode,
            similarity=self.similarity,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            batch_size=self.batch_size,
            base_lr=self.lr,
            decay_every=self.decay_every,
            decay_rate=self.decay_rate,
            max_iterations=self.max_iterations,
            seed=self.seed,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_epsilon=self.adam_epsilon,
            log_every=self.log_every,
        )

    def architecture_config(self) -> ArchitectureConfig:
        return ArchitectureConfig(hidden_widths=self.hidden_widths)

    def synthetic_config(self) -> SyntheticConfig:
        return SyntheticConfig(
            num_items=self.num_items,
            num_classes=self.num_classes,
            feature_dim=self.feature_dim,
            label_density=self.label_density,
            noise=self.noise,
            seed=self.seed,
        )

    def split_config(self) -> SplitConfig:
        return SplitConfig(
            query_size=self.query_size,
            train_size=self.train_size,
            query_fraction=self.query_fraction,
            train_fraction=self.train_fraction,
            exclude_train_from_database=self.exclude_train_from_database,
            include_queries_in_database=self.include_queries_in_database,
            seed=self.seed,
        )
