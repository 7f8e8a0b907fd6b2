# analysis/export.py
"""
결과 파일 입출력 (JSON / CSV).

- 모든 출력 파일은 설정 스냅샷과 config hash 를 포함합니다.
- CSV 수치: 유효숫자 9자리 과학적 표기.
- 같은 입력 → 바이트 단위로 같은 파일 (타임스탬프 등 비결정적 값 없음).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from core.config import RunConfig, canonical_json, config_hash
from core.errors import ConfigError

CSV_FLOAT_FORMAT = "%.8e"
CSV_HASH_PREFIX = "# config_hash: "
CSV_CONFIG_PREFIX = "# config: "


def to_jsonable(obj: Any) -> Any:
    """numpy / dataclass 값을 JSON 기본형으로"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "model_dump"):
        return obj.model_dump(mode="json")
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    return obj


def build_record(command: str, result: Any, config: RunConfig, extra: dict | None = None) -> dict:
    snapshot = config.model_dump(mode="json")
    record = {
        "command": command,
        "result": to_jsonable(result),
        "config": snapshot,
        "config_hash": config_hash(snapshot),
        "engine": config.protocol.evolve.model_dump(mode="json"),
    }
    if extra:
        record.update(to_jsonable(extra))
    return record


def dumps_record(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(record: dict, path: str | Path | None) -> str:
    text = dumps_record(record)
    if path is not None:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    return text


def format_csv(df: pd.DataFrame, config: RunConfig) -> str:
    snapshot = config.model_dump(mode="json")
    header = (
        f"{CSV_HASH_PREFIX}{config_hash(snapshot)}\n"
        f"{CSV_CONFIG_PREFIX}{canonical_json(snapshot)}\n"
    )
    body = df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return header + body


def write_csv(df: pd.DataFrame, config: RunConfig, path: str | Path | None) -> str:
    text = format_csv(df, config)
    if path is not None:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    return text


def read_result_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def verify_output(path: str | Path) -> tuple[bool, str, str]:
    """파일에 내장된 설정 스냅샷에서 hash 를 다시 계산해 비교. (일치 여부, 기대값, 기록값)"""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"검증할 파일이 없습니다: {p}")
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".csv":
        recorded, snapshot = None, None
        for line in text.splitlines():
            if line.startswith(CSV_HASH_PREFIX):
                recorded = line[len(CSV_HASH_PREFIX):].strip()
            elif line.startswith(CSV_CONFIG_PREFIX):
                snapshot = json.loads(line[len(CSV_CONFIG_PREFIX):])
        if recorded is None or snapshot is None:
            raise ConfigError(f"CSV 에 config hash / 스냅샷 헤더가 없습니다: {p}")
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON 파싱 실패 ({p}): line {e.lineno}: {e.msg}", row=e.lineno) from e
        if "config" not in data or "config_hash" not in data:
            raise ConfigError(f"config / config_hash 필드가 없습니다: {p}")
        recorded, snapshot = data["config_hash"], data["config"]
    expected = config_hash(snapshot)
    return expected == recorded, expected, recorded
