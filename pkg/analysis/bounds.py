# analysis/bounds.py
"""
측정 population → 새로운 물리 상한.

- 중력파(GW): 정상 상태 ⟨n⟩ = 4Ω²/Γ² 를 Ω_GW(h0) 에 대해 역으로 풀어 h0 상한
- 암흑 광자(DP): 압전 결합 Ω_DP(κ) 로 κ 상한
- CSL: 확산-이완 균형으로 τ_e, λ_CSL
- 장치 시나리오(current / next_generation / mhz_device) projection
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import pandas as pd
from scipy.integrate import dblquad, quad

from core.config import DeviceParams, DeviceScenario
from core.constants import (
    CSL_DIFFUSION_FACTOR,
    CM3_PER_M3,
    EPS0,
    EPS33_PROJECTION,
    GEV_TO_J,
    HBAR,
    R_CSL,
    RHO_DM_GEV_PER_CM3,
    amu_over_me_squared,
)
from core.errors import InvalidParameterError

logger = logging.getLogger(__name__)

E33_LITERATURE_RANGE = (0.4, 2.0)  # C/m², AlN
MODE_NUMBER_UNCERTAINTY = 13


# ─────────────────────────────────────────────────────────
# 결과 타입
# ─────────────────────────────────────────────────────────
@dataclass(frozen=True)
class GWResult:
    h0: float
    drive: float            # Ω_GW [rad/s]
    xi33: float             # m^(5/2)
    population: float
    decay_rate: float       # Γ [1/s]
    assumptions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DPResult:
    kappa: float
    drive: float            # Ω_DP [rad/s]
    e33_used: float         # C/m²
    rho_V: float            # J/m³
    population: float
    decay_rate: float
    assumptions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CSLResult:
    tau_e: float            # s
    lambda_csl: float       # 1/s
    r_csl: float            # m
    population: float
    T1_phonon: float
    assumptions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ProjectionResult:
    label: str
    device: DeviceParams
    gw: GWResult
    dp: list[DPResult] | None
    csl: CSLResult
    skipped: list[str]
    assumptions: dict

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "device": self.device.model_dump(mode="json"),
            "gw": self.gw.to_dict(),
            "dp": None if self.dp is None else [d.to_dict() for d in self.dp],
            "csl": self.csl.to_dict(),
            "skipped": list(self.skipped),
            "assumptions": self.assumptions,
        }


# ─────────────────────────────────────────────────────────
# 모드 결합 적분
# ─────────────────────────────────────────────────────────
def xi_33(L: float, waist: float, n: int) -> float:
    """ξ = 4 L^(3/2) µ / (π^(3/2) n²), 짝수 n 은 0"""
    if n <= 0:
        raise InvalidParameterError(f"mode number 는 양수여야 합니다: n={n}")
    if n % 2 == 0:
        return 0.0
    return 4.0 * L**1.5 * waist / (math.pi**1.5 * n**2)


def xi_33_numeric(L: float, waist: float, n: int) -> float:
    """
    규격화된 모드 f = √(2/(Lµ²))·LG00(r)·{sin (홀수 n) | cos (짝수 n)}(nπz/L) 에
    z 를 곱한 부피 적분. z ∈ [-L/2, L/2], 무차원 변수로 적분 후 복원합니다.
    """
    if n <= 0:
        raise InvalidParameterError(f"mode number 는 양수여야 합니다: n={n}")
    lg00 = math.sqrt(2.0 / math.pi)
    # 횡방향: r = µ·ρ
    transverse, _ = dblquad(
        lambda rho, phi: lg00 * math.exp(-rho * rho) * rho,
        0.0, 2.0 * math.pi,
        0.0, 12.0,
        epsabs=0.0, epsrel=1e-10,
    )
    # 종방향: z = L·ζ, 진동 가중치
    weight = "sin" if n % 2 == 1 else "cos"
    longitudinal, _ = quad(
        lambda zeta: zeta, -0.5, 0.5,
        weight=weight, wvar=n * math.pi,
        epsabs=0.0, epsrel=1e-10,
    )
    norm = math.sqrt(2.0 / (L * waist**2))
    return abs(norm * waist**2 * transverse * L**2 * longitudinal)


# ─────────────────────────────────────────────────────────
# 중력파
# ─────────────────────────────────────────────────────────
def _gw_coupling(device: DeviceParams) -> float:
    """Ω_GW / h0 (ε₃₃ = 1)"""
    w = device.omega_p
    L = device.length
    return (device.waist / device.mode_number**2) * math.sqrt(
        device.density * w**3 * L**3 / (2.0 * HBAR * math.pi**3)
    )


def gw_drive(h0: float, device: DeviceParams, eps33: float = EPS33_PROJECTION) -> float:
    """Ω_GW = ε₃₃·h0·(µ/n²)·√(ρω³L³/(2ħπ³)), 크기만 반환"""
    if h0 < 0:
        raise InvalidParameterError(f"h0 는 음수가 될 수 없습니다: {h0}")
    return abs(eps33) * h0 * _gw_coupling(device)


def _mode_number_note(device: DeviceParams) -> dict:
    n = device.mode_number
    spread = ((n + MODE_NUMBER_UNCERTAINTY) / n) ** 2 - 1.0
    return {
        "mode_number": n,
        "mode_number_parity": "even" if n % 2 == 0 else "odd",
        "mode_number_note": "n 은 크기 파라미터로 사용 (짝수 n 에서 ξ33=0 이지만 n 불확도 ±13 포함)",
        "relative_spread_n_pm_13": spread,
    }


def h0_bound(population: float, device: DeviceParams, eps33: float = EPS33_PROJECTION) -> GWResult:
    """h0 = √P·√(ħπ³/(2ρω³L³))·Γn²/µ"""
    if not 0.0 < population < 1.0:
        raise InvalidParameterError(f"population 은 (0, 1) 범위여야 합니다: {population}")
    if eps33 <= 0:
        raise InvalidParameterError(f"ε₃₃ 투영은 양수여야 합니다: {eps33}")
    gamma = device.phonon_decay
    w = device.omega_p
    L = device.length
    h0 = (
        math.sqrt(population)
        * math.sqrt(HBAR * math.pi**3 / (2.0 * device.density * w**3 * L**3))
        * gamma * device.mode_number**2 / device.waist
        / eps33
    )
    assumptions = {"eps33_projection": eps33, "resonance": True, **_mode_number_note(device)}
    return GWResult(
        h0=h0,
        drive=gw_drive(h0, device, eps33),
        xi33=xi_33(device.length, device.waist, device.mode_number),
        population=population,
        decay_rate=gamma,
        assumptions=assumptions,
    )


# ─────────────────────────────────────────────────────────
# 암흑 광자
# ─────────────────────────────────────────────────────────
def convert_energy_density(value: float) -> float:
    """GeV/cm³ → J/m³"""
    if value < 0:
        raise InvalidParameterError(f"에너지 밀도는 음수가 될 수 없습니다: {value}")
    return value * GEV_TO_J * CM3_PER_M3


RHO_V = convert_energy_density(RHO_DM_GEV_PER_CM3)


def _check_e33(e33: float) -> dict:
    lo, hi = E33_LITERATURE_RANGE
    if not lo <= e33 <= hi:
        warnings.warn(f"e33={e33} C/m² 가 문헌 범위 [{lo}, {hi}] 를 벗어났습니다", UserWarning, stacklevel=3)
        return {"e33_outside_literature_range": True}
    return {}


def _dp_coupling(device: DeviceParams, e33: float, rho_V: float) -> float:
    """Ω_DP / κ"""
    return 4.0 * e33 * (device.waist / (device.eps_r * device.mode_number)) * math.sqrt(
        rho_V * device.omega_p * device.length / (EPS0 * HBAR * math.pi * device.c33)
    )


def dp_drive(kappa: float, device: DeviceParams, e33: float | None = None, rho_V: float = RHO_V) -> float:
    """Ω_DP = 4κe₃₃·(µ/(ε_r n))·√(ρ_V ω L/(ε₀ħπc₃₃)), 크기만 반환"""
    if kappa < 0:
        raise InvalidParameterError(f"kappa 는 음수가 될 수 없습니다: {kappa}")
    e33 = device.e33 if e33 is None else e33
    return kappa * _dp_coupling(device, e33, rho_V)


def kappa_bound(
    population: float,
    device: DeviceParams,
    e33: float | None = None,
    rho_V: float = RHO_V,
) -> DPResult:
    """κ = √P·√(ε₀ħπc₃₃/(ρ_V ω L))·Γ ε_r n/(8µe₃₃)"""
    if not 0.0 < population < 1.0:
        raise InvalidParameterError(f"population 은 (0, 1) 범위여야 합니다: {population}")
    e33 = device.e33 if e33 is None else e33
    if e33 <= 0:
        raise InvalidParameterError(f"e33 는 양수여야 합니다: {e33}")
    notes = _check_e33(e33)
    gamma = device.phonon_decay
    kappa = (
        math.sqrt(population)
        * math.sqrt(EPS0 * HBAR * math.pi * device.c33 / (rho_V * device.omega_p * device.length))
        * gamma * device.eps_r * device.mode_number
        / (8.0 * device.waist * e33)
    )
    return DPResult(
        kappa=kappa,
        drive=dp_drive(kappa, device, e33, rho_V),
        e33_used=e33,
        rho_V=rho_V,
        population=population,
        decay_rate=gamma,
        assumptions={"rho_V_GeV_per_cm3": rho_V / (GEV_TO_J * CM3_PER_M3), **notes, **_mode_number_note(device)},
    )


# ─────────────────────────────────────────────────────────
# CSL
# ─────────────────────────────────────────────────────────
def csl_bound(population: float, T1_phonon: float) -> CSLResult:
    """τ_e = 3.5e13·T1/n̄, λ_CSL = (amu/m_e)²/τ_e"""
    if not population > 0:
        raise InvalidParameterError(f"population 은 양수여야 합니다: {population}")
    if not T1_phonon > 0:
        raise InvalidParameterError(f"T1_phonon 은 양수여야 합니다: {T1_phonon}")
    tau_e = CSL_DIFFUSION_FACTOR * T1_phonon / population
    return CSLResult(
        tau_e=tau_e,
        lambda_csl=amu_over_me_squared() / tau_e,
        r_csl=R_CSL,
        population=population,
        T1_phonon=T1_phonon,
        assumptions={
            "diffusion_factor": CSL_DIFFUSION_FACTOR,
            "diffusion_factor_note": "현 HBAR 장치(질량, 모드 형상) 기준 상수",
            "r_csl_note": "고정값으로 운반 (계산하지 않음)",
        },
    )


# ─────────────────────────────────────────────────────────
# 시나리오 projection
# ─────────────────────────────────────────────────────────
def resolve_scenario_device(scenario: DeviceScenario, base: DeviceParams) -> tuple[DeviceParams, dict]:
    """override 적용 + 모드 번호 규칙. (device, 기록된 가정)"""
    device = base.replace(**scenario.overrides)
    notes: dict = {"mode_rule": scenario.mode_rule}

    if scenario.mode_rule == "nearest":
        n = max(1, round(device.phonon_freq_hz / device.fsr_hz))
        device = device.replace(mode_number=n)
        notes["mode_number_from"] = "round(frequency / FSR)"
    elif scenario.mode_rule == "lowest_odd_above":
        fsr = scenario.sound_speed / (2.0 * device.length) if scenario.sound_speed else device.fsr_hz
        n = math.ceil(scenario.band_floor_hz / fsr - 1e-12)
        if n % 2 == 0:
            n += 1
        device = device.replace(mode_number=n, fsr_hz=fsr, phonon_freq_hz=n * fsr)
        notes.update(
            {
                "mode_number_from": "가장 낮은 홀수 n with n·FSR >= band floor",
                "band_floor_hz": scenario.band_floor_hz,
                "sound_speed": scenario.sound_speed,
                "fsr_hz": fsr,
            }
        )
    notes["frequency_hz"] = device.phonon_freq_hz
    notes["mode_number"] = device.mode_number
    return device, notes


def project(scenario: DeviceScenario, base: DeviceParams) -> ProjectionResult:
    device, notes = resolve_scenario_device(scenario, base)
    P = scenario.population

    gw = h0_bound(P, device)
    skipped: list[str] = []
    dp = None
    if scenario.skip_dp:
        skipped.append("dp")
        logger.info("--- [Project] %s: DP 채널 생략 (전자기 차폐로 kinetic mixing 억제) ---", scenario.label)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            dp = [kappa_bound(P, device, e33) for e33 in scenario.e33_values]
    csl = csl_bound(P, device.T1_phonon)

    assumptions = {
        **notes,
        "population": P,
        "integration_time": scenario.integration_time,
        "assumption_dependent": scenario.assumption_dependent,
        "notes": list(scenario.assumptions),
    }
    logger.info(
        "--- [Project] %s: h0=%.3e, n=%d, f=%.4e Hz ---",
        scenario.label, gw.h0, device.mode_number, device.phonon_freq_hz,
    )
    return ProjectionResult(scenario.label, device, gw, dp, csl, skipped, assumptions)


def strain_sensitivity_rows(projections: Sequence[ProjectionResult]) -> pd.DataFrame:
    """(label, frequency_hz, h0): 외부 플로팅용"""
    return pd.DataFrame(
        {
            "label": [p.label for p in projections],
            "frequency_hz": [p.device.phonon_freq_hz for p in projections],
            "h0": [p.gw.h0 for p in projections],
        }
    )
