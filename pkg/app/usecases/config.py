"""設定ファイルとコマンドライン上書きから RunConfig を組み立てる.

設定ファイルは1行1つの key=value. '#' 以降はコメント、空行は無視する.
キーは大小文字を区別せず、'-' は '_' とみなす.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from pydantic import ValidationError

from dtos.config import RunConfig
from usecases.errors import ConfigError
from utils.logging import get_logger

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

logger = get_logger(__name__)


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_assignment(text: str, *, source: str = "--set") -> tuple[str, str]:
    """'KEY=VALUE' を (正規化したキー, 値) に分ける."""
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        msg = f"{source}: expected KEY=VALUE, got {text!r}"
        raise ConfigError(msg)
    return normalize_key(key), value.strip()


def parse_config_text(lines: Iterable[str], source: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = parse_assignment(line, source=f"{source}:{lineno}")
        values[key] = value
    return values


def read_config_file(path: Path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        msg = f"Config file not found: {path}"
        raise ConfigError(msg)
    return parse_config_text(path.read_text(encoding="utf-8").splitlines(), str(path))


def load_run_config(
    config_path: Path | None = None,
    overrides: Mapping[str, object] | None = None,
) -> RunConfig:
    """設定ファイルの値に overrides を後勝ちで重ね、検証済みの RunConfig を返す.

    Raises:
        ConfigError: 未知のキー、不正な値、読めない設定ファイル.
    """
    values: dict[str, object] = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        values[normalize_key(key)] = value

    try:
        config = RunConfig.model_validate(values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        msg = f"Invalid configuration: {problems}"
        raise ConfigError(msg) from exc
    logger.debug("Resolved config: %s", config.model_dump(by_alias=True))
    return config
