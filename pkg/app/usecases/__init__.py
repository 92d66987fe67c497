"""コマンドごとのユースケース層.

データセット/チェックポイント/コードファイルの読み書きとサービスの呼び出しを
束ねる薄い層. 数値計算のルールはここでは持たない.
"""

from .config import load_run_config
from .encode import run_encode
from .evaluate import run_evaluate
from .generate import run_generate
from .query import run_query
from .sweep import run_sweep
from .train import run_train

__all__ = [
    "load_run_config",
    "run_encode",
    "run_evaluate",
    "run_generate",
    "run_query",
    "run_sweep",
    "run_train",
]
