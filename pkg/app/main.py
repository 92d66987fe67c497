"""softhash コマンドラインのエントリーポイント.

softhash generate|train|encode|query|evaluate|sweep [options]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TYPE_CHECKING, NoReturn

from app_conf import ExitStatus
from errors import SoftHashError
from usecases import (
    load_run_config,
    run_encode,
    run_evaluate,
    run_generate,
    run_query,
    run_sweep,
    run_train,
)
from usecases.config import parse_assignment
from usecases.errors import ConfigError, UsecaseError
from utils.logging import get_logger, set_console_level

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from dtos.config import RunConfig

logger = get_logger(__name__)

COMMANDS: dict[str, Callable[[RunConfig], object]] = {
    "generate": run_generate,
    "train": run_train,
    "encode": run_encode,
    "query": run_query,
    "evaluate": run_evaluate,
    "sweep": run_sweep,
}

# CLI引数名 -> 設定キー
FLAG_KEYS = {
    "seed": "seed",
    "threads": "threads",
    "bits": "bits",
    "alpha": "alpha",
    "gamma": "gamma",
    "lambda_": "lambda",
    "batch_size": "batch_size",
    "lr": "lr",
    "decay_every": "decay_every",
    "decay_rate": "decay_rate",
    "top_n": "top_n",
    "max_iterations": "max_iterations",
    "work_dir": "work_dir",
    "query_ids": "query_ids",
}


class _ArgumentParser(argparse.ArgumentParser):
    """使い方の誤りを ConfigError として扱うパーサー."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(message)


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value 形式の設定ファイル")
    common.add_argument("--seed", help="乱数シード")
    common.add_argument("--threads", help="クエリ評価の並列数 (1 で逐次)")
    common.add_argument("--bits", help="コード長 q")
    common.add_argument("--alpha", help="内積の帯域 α (例: 0.3, 5/q)")
    common.add_argument("--gamma", help="MSE 損失の重み γ (例: 0.1/q)")
    common.add_argument("--lambda", dest="lambda_", help="量子化損失の重み λ")
    common.add_argument("--batch-size", help="ミニバッチの件数")
    common.add_argument("--lr", help="初期学習率")
    common.add_argument("--decay-every", help="学習率を減衰させる間隔")
    common.add_argument("--decay-rate", help="学習率の減衰率")
    common.add_argument("--max-iterations", help="学習イテレーション数")
    common.add_argument("--top-n", help="評価カットオフ (カンマ区切り)")
    common.add_argument("--work-dir", help="成果物の出力先")
    common.add_argument("--query-ids", help="query コマンドのクエリID (カンマ区切り)")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="任意の設定キーを上書きする (複数指定可)",
    )
    common.add_argument("--log-level", default="INFO", help="コンソールのログレベル")
    return common


def setup_parser() -> argparse.ArgumentParser:
    """サブコマンドと共通オプションを持つパーサーを作る."""
    parser = _ArgumentParser(prog="softhash", description="Soft-similarity deep hashing toolkit")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_options()
    for name, func in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=(func.__doc__ or "").strip().splitlines()[0])
    return parser


def collect_overrides(args: argparse.Namespace) -> dict[str, object]:
    """個別フラグ、続いて --set の順に重ねる (後勝ち)."""
    overrides: dict[str, object] = {}
    for attr, key in FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    for item in args.set:
        key, value = parse_assignment(item)
        overrides[key] = value
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    """コマンドを実行し、終了ステータスを返す.

    設定の誤りは 1、実行時の失敗は 2. どちらも標準エラーに1行の診断を出す.
    """
    try:
        args = setup_parser().parse_args(argv)
        set_console_level(args.log_level)
        config = load_run_config(args.config, collect_overrides(args))
    except (ConfigError, ValueError) as exc:
        logger.debug("Configuration rejected", exc_info=True)
        print(f"softhash: error: {exc}", file=sys.stderr)  # noqa: T201
        return ExitStatus.VALIDATION_ERROR

    logger.info("Starting %s (work_dir=%s)", args.command, config.work_dir)
    try:
        COMMANDS[args.command](config)
    except (SoftHashError, UsecaseError, OSError) as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"softhash: {args.command} failed: {exc}", file=sys.stderr)  # noqa: T201
        return ExitStatus.RUNTIME_FAILURE
    logger.info("Finished %s", args.command)
    return ExitStatus.OK


if __name__ == "__main__":
    sys.exit(main())
