# analysis/thermo.py
"""
Bose-Einstein 온도계 + 측정 통계 파이프라인.

    P(T) = (1 - x)·x + offset,   x = exp(-h f / k_B T)

- effective_temperature: 위 식의 정확한 역변환
- fit_bose: offset 만 자유 파라미터로 두는 damped least-squares (LM)
- weighted_mean / block_statistics: 역분산 가중 평균, 누적 SEM
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.optimize import least_squares

from core.constants import H_PLANCK, K_B
from core.errors import ConfigError, FitError, InvalidParameterError, NoSolutionError

logger = logging.getLogger(__name__)


# ─────────────────────────────────────────────────────────
# 타입
# ─────────────────────────────────────────────────────────
@dataclass(frozen=True)
class PopulationRecord:
    mean: float
    variance: float
    n_shots: int = 0
    label: str = ""
    timestamp: str | None = None

    def __post_init__(self):
        if not self.variance >= 0:
            raise InvalidParameterError(f"variance 는 0 이상이어야 합니다: {self.variance} ({self.label})")
        # 음수 평균은 허용 (-5σ 까지)
        if self.mean > 1.0 or self.mean < -5.0 * math.sqrt(self.variance):
            raise InvalidParameterError(f"mean={self.mean} 이 [-5σ, 1] 범위를 벗어났습니다 ({self.label})")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class ThermometryPoint:
    temperature: float
    population: float
    sigma: float

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidParameterError(f"temperature 는 양수여야 합니다: {self.temperature}")
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma 는 양수여야 합니다: {self.sigma}")


@dataclass(frozen=True)
class BoseFit:
    offset: float
    offset_sigma: float
    reduced_chi2: float
    n_points: int
    nfev: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BlockStats:
    mean: float
    sigma_total: float
    n_blocks: np.ndarray        # k = 2..N
    sem_curve: np.ndarray       # 누적 SEM(k)
    reference_curve: np.ndarray # σ_total / √k

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"n_blocks": self.n_blocks, "sem": self.sem_curve, "reference": self.reference_curve}
        )

    def loglog_slope(self, k_min: int = 10) -> float:
        mask = (self.n_blocks >= k_min) & (self.sem_curve > 0)
        if mask.sum() < 2:
            return float("nan")
        slope, _ = np.polyfit(np.log(self.n_blocks[mask]), np.log(self.sem_curve[mask]), 1)
        return float(slope)


# ─────────────────────────────────────────────────────────
# Bose-Einstein
# ─────────────────────────────────────────────────────────
def bose_population(T, freq: float, offset: float = 0.0):
    """T: [K] (스칼라 또는 배열), freq: [Hz]"""
    T_arr = np.asarray(T, dtype=float)
    if np.any(T_arr < 0):
        raise InvalidParameterError("온도는 음수가 될 수 없습니다")
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(T_arr > 0, np.exp(-H_PLANCK * freq / (K_B * np.where(T_arr > 0, T_arr, 1.0))), 0.0)
    out = (1.0 - x) * x + offset
    return float(out) if out.ndim == 0 else out


def effective_temperature(population: float, freq: float) -> float:
    """(1 - x)·x = P 의 작은 근 x = (1 - √(1 - 4P))/2 → T = h f / (k_B ln(1/x))"""
    if population >= 0.25:
        raise NoSolutionError(f"P={population} >= 0.25 에는 해가 없습니다")
    if not population > 0:
        raise InvalidParameterError(f"population 은 양수여야 합니다: {population}")
    # 1 - √(1-4P) 의 소거오차를 피하는 형태
    x = 2.0 * population / (1.0 + math.sqrt(1.0 - 4.0 * population))
    return H_PLANCK * freq / (K_B * math.log(1.0 / x))


def fit_bose(points: Sequence[ThermometryPoint], freq: float, max_nfev: int = 200) -> BoseFit:
    """offset 하나만 맞추는 LM 피팅. 온도축은 측정값 그대로 사용"""
    if len(points) < 4:
        raise InvalidParameterError(f"피팅에는 최소 4개 점이 필요합니다: {len(points)}")
    temps = np.array([p.temperature for p in points])
    if temps.max() / temps.min() < 3.0:
        raise InvalidParameterError("온도 범위가 3배 이상이어야 합니다")
    pops = np.array([p.population for p in points])
    sigmas = np.array([p.sigma for p in points])
    base = bose_population(temps, freq, 0.0)

    def residuals(theta):
        return (base + theta[0] - pops) / sigmas

    x0 = [float(np.median(pops - base))]
    res = least_squares(residuals, x0, method="lm", max_nfev=max_nfev)
    if not res.success or res.status == 0:
        raise FitError(f"Bose 피팅이 {max_nfev}회 안에 수렴하지 않았습니다: {res.message}")

    jtj = float(res.jac[:, 0] @ res.jac[:, 0])
    offset_sigma = math.sqrt(1.0 / jtj) if jtj > 0 else float("inf")
    dof = max(len(points) - 1, 1)
    chi2 = float(np.sum(res.fun**2)) / dof
    logger.debug("--- [Thermo] offset=%.4e ± %.2e, chi2_red=%.3f ---", res.x[0], offset_sigma, chi2)
    return BoseFit(float(res.x[0]), offset_sigma, chi2, len(points), int(res.nfev))


# ─────────────────────────────────────────────────────────
# 통계
# ─────────────────────────────────────────────────────────
def weighted_mean(records: Sequence[PopulationRecord]) -> PopulationRecord:
    """역분산 가중 평균. 음수 평균도 그대로 사용"""
    if not records:
        raise InvalidParameterError("record 가 비어 있습니다")
    v = np.array([r.variance for r in records], dtype=float)
    if np.any(v <= 0):
        bad = [r.label for r in records if r.variance <= 0]
        raise InvalidParameterError(f"variance 가 0 인 record: {bad}")
    m = np.array([r.mean for r in records], dtype=float)
    w = 1.0 / v
    mean = float(np.sum(m * w) / np.sum(w))
    variance = float(1.0 / np.sum(w))
    return PopulationRecord(
        mean=mean,
        variance=variance,
        n_shots=int(sum(r.n_shots for r in records)),
        label="weighted_mean",
    )


def block_statistics(series: Sequence[float]) -> BlockStats:
    """블록 평균 시계열의 누적 SEM 곡선. σ 는 표본 표준편차(ddof=1)"""
    s = pd.Series(np.asarray(series, dtype=float))
    if len(s) < 2:
        raise InvalidParameterError(f"블록이 2개 이상 필요합니다: {len(s)}")
    k = np.arange(1, len(s) + 1, dtype=float)
    running_std = s.expanding(min_periods=2).std(ddof=1).to_numpy()
    sem = (running_std / np.sqrt(k))[1:]
    sigma_total = float(s.std(ddof=1))
    n_blocks = k[1:]
    return BlockStats(
        mean=float(s.mean()),
        sigma_total=sigma_total,
        n_blocks=n_blocks,
        sem_curve=np.clip(sem, 0.0, None),
        reference_curve=sigma_total / np.sqrt(n_blocks),
    )


# ─────────────────────────────────────────────────────────
# 합성 데이터
# ─────────────────────────────────────────────────────────
def synthetic_block_series(n_blocks: int, mean: float, sigma: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(mean, sigma, size=n_blocks)


def synthetic_thermometry(
    temps: Sequence[float],
    freq: float,
    offset: float,
    noise: float,
    seed: int,
    n_shots: int | None = None,
) -> list[ThermometryPoint]:
    """
    bose_population 형태 그대로의 합성 온도계 데이터.
    noise: 상대 gaussian 잡음 (0 이면 잡음 없음), n_shots 지정 시 binomial shot noise
    """
    rng = np.random.default_rng(seed)
    truth = np.asarray(bose_population(np.asarray(temps, dtype=float), freq, offset))
    if n_shots:
        p = np.clip(truth, 0.0, 1.0)
        pops = rng.binomial(n_shots, p) / n_shots
        sigmas = np.sqrt(np.maximum(p * (1.0 - p), 1.0 / n_shots) / n_shots)
    elif noise > 0:
        sigmas = noise * np.abs(truth)
        pops = truth + rng.normal(0.0, 1.0, size=truth.shape) * sigmas
    else:
        sigmas = np.maximum(1e-3 * np.abs(truth), 1e-12)
        pops = truth
    return [ThermometryPoint(float(t), float(p), float(s)) for t, p, s in zip(temps, pops, sigmas)]


# ─────────────────────────────────────────────────────────
# CSV 입력
# ─────────────────────────────────────────────────────────
def _read_csv(path: str | Path, required: Sequence[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise ConfigError(f"CSV 파일을 찾을 수 없습니다: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"CSV 파싱 실패 ({path}): {e}") from e
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ConfigError(f"CSV 에 필수 컬럼이 없습니다 ({path}): {missing}", key=missing[0])
    return df


def _row_float(row: pd.Series, col: str, line: int, path) -> float:
    try:
        val = float(row[col])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: row {line} 의 '{col}' 값이 숫자가 아닙니다: {row[col]!r}", row=line) from e
    if not math.isfinite(val):
        raise ConfigError(f"{path}: row {line} 의 '{col}' 값이 유한하지 않습니다", row=line)
    return val


def read_records_csv(path: str | Path) -> list[PopulationRecord]:
    """columns: label, mean, variance, n_shots, timestamp(선택)"""
    df = _read_csv(path, ["label", "mean", "variance", "n_shots"])
    records = []
    for i, row in df.iterrows():
        line = int(i) + 2  # header 가 1행
        mean = _row_float(row, "mean", line, path)
        variance = _row_float(row, "variance", line, path)
        n_shots = _row_float(row, "n_shots", line, path)
        if n_shots < 0 or n_shots != int(n_shots):
            raise ConfigError(f"{path}: row {line} 의 'n_shots' 는 0 이상의 정수여야 합니다", row=line)
        try:
            records.append(
                PopulationRecord(
                    mean=mean,
                    variance=variance,
                    n_shots=int(n_shots),
                    label=str(row["label"]),
                    timestamp=(row.get("timestamp") or None),
                )
            )
        except InvalidParameterError as e:
            raise ConfigError(f"{path}: row {line}: {e}", row=line) from e
    return records


def read_thermometry_csv(path: str | Path) -> list[ThermometryPoint]:
    """columns: temperature, population, sigma"""
    df = _read_csv(path, ["temperature", "population", "sigma"])
    points = []
    for i, row in df.iterrows():
        line = int(i) + 2
        vals = {c: _row_float(row, c, line, path) for c in ("temperature", "population", "sigma")}
        try:
            points.append(ThermometryPoint(**vals))
        except InvalidParameterError as e:
            raise ConfigError(f"{path}: row {line}: {e}", row=line) from e
    return points


def read_block_series_csv(path: str | Path) -> np.ndarray:
    """column: mean (블록 평균)"""
    df = _read_csv(path, ["mean"])
    return np.array([_row_float(row, "mean", int(i) + 2, path) for i, row in df.iterrows()])
