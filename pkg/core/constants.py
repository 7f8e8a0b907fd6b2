# core/constants.py
"""
물리 상수 테이블.

모든 공식은 SI 단위를 내부적으로 사용합니다. 값은 scipy.constants (CODATA)에서 읽어오며,
장치/모델에 종속된 상수(CSL 확산 계수, 암흑물질 밀도 등)도 여기에 모아 둡니다.
"""
from __future__ import annotations

from scipy import constants as _sc

# ── 기본 상수 (SI)
HBAR: float = _sc.hbar                      # J·s
H_PLANCK: float = _sc.h                     # J·s
K_B: float = _sc.k                          # J/K
EPS0: float = _sc.epsilon_0                 # F/m
C_LIGHT: float = _sc.c                      # m/s
AMU: float = _sc.physical_constants["atomic mass constant"][0]   # kg
M_E: float = _sc.m_e                        # kg

# ── 단위 변환
GEV_TO_J: float = 1e9 * _sc.electron_volt   # 1.602176634e-10 J/GeV
CM3_PER_M3: float = 1e6

# ── 모델 상수
RHO_DM_GEV_PER_CM3: float = 0.4             # 국소 암흑물질 에너지 밀도
CSL_DIFFUSION_FACTOR: float = 3.5e13        # tau_e = factor * T1 / n̄ (현 HBAR 장치 기준)
R_CSL: float = 3.0e-7                       # m, 고정값으로 운반
EPS33_PROJECTION: float = 1.0               # 편광 텐서 투영 최대값

# ── 수치 허용오차
TRACE_TOL: float = 1e-10
HERMITIAN_TOL: float = 1e-10
POSITIVITY_TOL: float = 1e-10
IMAG_TOL: float = 1e-8
FOCK_TOP_TOL: float = 1e-8


def amu_over_me_squared() -> float:
    """(1 amu / m_e)^2: CSL 관계식 lambda * tau_e 의 값."""
    return (AMU / M_E) ** 2
