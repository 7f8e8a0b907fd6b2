# core/config.py
"""
실행 설정(RunConfig) 스키마와 JSON 입출력.

- 환경 변수는 .env 에서 읽어 SETTINGS 에 모읍니다.
- 스키마는 pydantic v2 모델 (extra="forbid" → 알 수 없는 키 거부).
- 장치 값은 실험실 단위(Hz, s, K)로 저장하고 각주파수는 property 로 변환합니다.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Literal

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from core.errors import ConfigError
from core.hilbert import HilbertLayout
from core.lindblad import EvolveSettings

# ── .env 로드 (어디서 실행하든 루트 .env를 찾도록)
load_dotenv(find_dotenv(usecwd=True))

ROOT_DIR = Path(__file__).resolve().parent.parent

SETTINGS = {
    "config_dir": Path(os.getenv("HQS_CONFIG_DIR", str(ROOT_DIR / "configs"))),
    "jobs": int(os.getenv("HQS_JOBS", "1")),
    "log_level": os.getenv("HQS_LOG_LEVEL", "INFO").upper(),
}

TWO_PI = 2.0 * math.pi


# ─────────────────────────────────────────────────────────
# 장치 파라미터
# ─────────────────────────────────────────────────────────
class DeviceParams(BaseModel):
    """HBAR + transmon 장치 상수. 모든 필드 필수."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    phonon_freq_hz: float = Field(gt=0)
    qubit_freq_hz: float = Field(gt=0)
    anharmonicity_hz: float
    coupling_hz: float = Field(gt=0)
    fsr_hz: float = Field(gt=0)
    mode_number: int = Field(gt=0)
    T1_phonon: float = Field(gt=0)
    T2_phonon: float = Field(gt=0)
    T1_ge: float = Field(gt=0)
    T1_ef: float = Field(gt=0)
    T_phi: float = Field(gt=0)
    T_qb_init: float = Field(ge=0)
    T_qb_bath: float = Field(ge=0)
    T_env: float = Field(ge=0)
    length: float = Field(gt=0)
    waist: float = Field(gt=0)
    density: float = Field(gt=0)
    c33: float = Field(gt=0)
    e33: float = Field(gt=0)
    eps_r: float = Field(gt=0)

    @property
    def omega_p(self) -> float:
        return TWO_PI * self.phonon_freq_hz

    @property
    def omega_q(self) -> float:
        return TWO_PI * self.qubit_freq_hz

    @property
    def alpha(self) -> float:
        return TWO_PI * self.anharmonicity_hz

    @property
    def g(self) -> float:
        return TWO_PI * self.coupling_hz

    @property
    def omega_fsr(self) -> float:
        return TWO_PI * self.fsr_hz

    @property
    def phonon_decay(self) -> float:
        """Γ = 1/T1_phonon"""
        return 1.0 / self.T1_phonon

    def replace(self, **changes: Any) -> "DeviceParams":
        """변경 후 재검증된 사본"""
        return DeviceParams.model_validate({**self.model_dump(), **changes})


# ─────────────────────────────────────────────────────────
# 프로토콜 설정
# ─────────────────────────────────────────────────────────
class ProtocolSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    iswap_amplitude: float = Field(1.0, ge=0.0, le=1.2)
    readout_fidelity: float = Field(1.0, gt=0.5, le=1.0)
    gate_model: Literal["instantaneous", "finite"] = "instantaneous"
    include_reference: bool = True
    wait_after_swap: float = Field(250e-9, ge=0.0)     # Stark-tone ramp-down / buffer
    swap_duration: float | None = Field(None, gt=0.0)  # None → π/(2g)
    pi_ge_duration: float = Field(40e-9, gt=0.0)
    pi_ef_duration: float = Field(60e-9, gt=0.0)
    evolve: EvolveSettings = EvolveSettings(method="expm")

    def replace(self, **changes: Any) -> "ProtocolSettings":
        return ProtocolSettings.model_validate({**self.model_dump(), **changes})


SweepParameter = Literal["T1_ge", "T_qb_bath", "T1_ef", "A_iSWAP", "T_phi", "F_ro"]


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    parameter: SweepParameter
    values: list[float] = Field(min_length=1)
    population: float = Field(1.9e-5, ge=0.0, lt=0.5)


# ─────────────────────────────────────────────────────────
# 장치 시나리오
# ─────────────────────────────────────────────────────────
class DeviceScenario(BaseModel):
    """기준 장치에 덮어쓸 값 + 모드 번호 규칙 + 가정 기록"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    label: Literal["current", "next_generation", "mhz_device"]
    overrides: dict[str, float] = Field(default_factory=dict)
    integration_time: float = Field(gt=0)
    population: float = Field(gt=0.0, lt=1.0)
    e33_values: list[float] = Field(default_factory=lambda: [0.4, 2.0])
    mode_rule: Literal["nominal", "nearest", "lowest_odd_above"] = "nominal"
    band_floor_hz: float | None = Field(None, gt=0)
    sound_speed: float | None = Field(None, gt=0)
    skip_dp: bool = False
    assumption_dependent: bool = False
    assumptions: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_rule_inputs(self) -> "DeviceScenario":
        if self.mode_rule == "lowest_odd_above" and self.band_floor_hz is None:
            raise ValueError("mode_rule='lowest_odd_above' 에는 band_floor_hz 가 필요합니다")
        return self


# ─────────────────────────────────────────────────────────
# 전체 실행 설정
# ─────────────────────────────────────────────────────────
class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    device: DeviceParams
    protocol: ProtocolSettings = ProtocolSettings()
    layout: HilbertLayout = HilbertLayout()
    population: float | None = Field(None, ge=0.0, lt=0.5)
    bath_range: tuple[float, float] = (0.037, 0.053)
    sweep: SweepSpec | None = None
    scenario: DeviceScenario | None = None
    input_path: str | None = None
    output_path: str | None = None
    seed: int | None = None

    @model_validator(mode="after")
    def _check_bath_range(self) -> "RunConfig":
        lo, hi = self.bath_range
        if lo < 0 or hi < lo:
            raise ValueError(f"bath_range 는 0 <= T_min <= T_max 이어야 합니다: {self.bath_range}")
        return self

    def replace(self, **changes: Any) -> "RunConfig":
        return RunConfig.model_validate({**self.model_dump(), **changes})


# ─────────────────────────────────────────────────────────
# 입출력
# ─────────────────────────────────────────────────────────
def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: RunConfig | dict) -> str:
    """정규화된 JSON 의 SHA-256"""
    data = config.model_dump(mode="json") if isinstance(config, BaseModel) else config
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def resolve_config_path(path: str | Path) -> Path:
    """그대로 존재하면 그 경로, 아니면 HQS_CONFIG_DIR 아래에서 찾습니다."""
    p = Path(path)
    if p.exists():
        return p
    candidates = [SETTINGS["config_dir"] / p]
    if p.suffix == "":
        candidates.append(SETTINGS["config_dir"] / f"{p.name}.json")
    for c in candidates:
        if c.exists():
            return c
    raise ConfigError(f"설정 파일을 찾을 수 없습니다: {path} (검색 경로: {SETTINGS['config_dir']})")


def _format_validation_error(err: ValidationError) -> tuple[str, str | None]:
    lines = []
    first_key = None
    for e in err.errors():
        key = ".".join(str(x) for x in e["loc"])
        first_key = first_key or key
        lines.append(f"  - {key}: {e['msg']}")
    return "\n".join(lines), first_key


def parse_config(data: dict, source: str = "<dict>") -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        detail, key = _format_validation_error(e)
        raise ConfigError(f"설정 검증 실패 ({source}):\n{detail}", key=key) from e


def load_config(path: str | Path) -> RunConfig:
    resolved = resolve_config_path(path)
    text = resolved.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"JSON 파싱 실패 ({resolved}): line {e.lineno}, col {e.colno}: {e.msg}",
            row=e.lineno,
        ) from e
    if not isinstance(data, dict):
        raise ConfigError(f"설정 최상위는 객체여야 합니다: {resolved}")
    return parse_config(data, str(resolved))


def save_config(config: RunConfig, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(
        json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return p


def config_schema() -> dict:
    return RunConfig.model_json_schema()
