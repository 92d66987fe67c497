from enum import Enum, IntEnum
from pathlib import Path
from typing import Self


class _CaseInsensitiveEnum(str, Enum):
    """大小/前後空白無視で name/value を解決できる列挙型の基底."""

    @classmethod
    def from_str(cls, value: str) -> Self:
        """大小/前後空白無視で name/value を解決する."""
        if isinstance(value, cls):
            return value
        s = value.strip()
        for m in cls:
            if m.value.lower() == s.lower() or m.name.lower() == s.lower():
                return m
        msg = f"Unsupported {cls.__name__}: {value}"
        raise ValueError(msg)

    @classmethod
    def _missing_(cls, value: object) -> Self | None:
        """Enum(value) 構築時の大小無視解決を有効化する."""
        if isinstance(value, str):
            s = value.strip()
            for m in cls:
                if m.value.lower() == s.lower() or m.name.lower() == s.lower():
                    return m
        return None


# type
class LossMode(_CaseInsensitiveEnum):
    """ペア損失の組み合わせ方."""

    JOINT = "joint"
    CE = "ce"
    MSE = "mse"


class SimilarityGranularity(_CaseInsensitiveEnum):
    """ラベル類似度の粒度.

    FINE はコサイン類似度をそのまま使い、COARSE は1ラベルでも共有していれば1とする.
    """

    FINE = "fine"
    COARSE = "coarse"


class ExitStatus(IntEnum):
    """CLIの終了ステータス."""

    OK = 0
    VALIDATION_ERROR = 1
    RUNTIME_FAILURE = 2


DEFAULT_WORK_DIR = Path("runs")

# artifact file names (work_dir 直下)
FEATURES_FILE = "features.shft"
LABELS_FILE = "labels.shlb"
CHECKPOINT_FILE = "model.shmd"
CODES_FILE = "codes.shcd"
TRAIN_REPORT_FILE = "train_report.csv"
METRICS_JSON_FILE = "metrics.json"
METRICS_CSV_FILE = "metrics.csv"
RANKING_FILE = "ranking.csv"
SWEEP_FILE = "sweep.csv"

# binary formats
FORMAT_VERSION = 1
FEATURES_MAGIC = b"SHFT"
LABELS_MAGIC = b"SHLB"
CHECKPOINT_MAGIC = b"SHMD"
CODES_MAGIC = b"SHCD"

# training defaults
DEFAULT_BITS = 16
DEFAULT_HIDDEN_WIDTHS = (512,)
DEFAULT_BATCH_SIZE = 128
DEFAULT_BASE_LR = 1e-3
DEFAULT_DECAY_EVERY = 500
DEFAULT_DECAY_RATE = 0.5
DEFAULT_MAX_ITERATIONS = 1000
DEFAULT_SEED = 0
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# loss defaults: alpha = ALPHA_SCALE / q, gamma = GAMMA_SCALE / q
ALPHA_SCALE = 5.0
GAMMA_SCALE = 0.1
DEFAULT_LAMBDA = 0.1

# evaluation defaults
DEFAULT_TOP_N = (10, 50, 100)
DEFAULT_ENCODE_CHUNK = 4096
