# core/lindblad.py
"""
Lindblad 마스터 방정식 엔진.

    dρ/dt = -i[H, ρ] + Σ_k rate_k (L_k ρ L_k† - ½{L_k†L_k, ρ})

H 는 rad/s 단위(ħ = 1 로 나눈 값)입니다. 밀도행렬은 column-stacking 으로 벡터화하며,
- 기본 적분기: scipy.integrate.solve_ivp(RK45)
- 시간 독립 구간: scipy.linalg.expm 정확해 경로(method="expm")
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from core.errors import (
    ConvergenceError,
    IntegrationError,
    InvalidDimensionError,
    InvalidParameterError,
    NumericalConsistencyError,
)
from core.hilbert import (
    HilbertLayout,
    QuantumState,
    annihilation,
    basis_state,
    check_fock_cutoff,
    expectation,
    number_op,
    validate_state,
)

logger = logging.getLogger(__name__)

EVOLVE_TRACE_TOL = 1e-8
EVOLVE_POSITIVITY_TOL = 1e-8
EVOLVE_HERMITIAN_TOL = 1e-9


# ─────────────────────────────────────────────────────────
# 타입
# ─────────────────────────────────────────────────────────
class EvolveSettings(BaseModel):
    """적분기 설정. method='expm' 은 시간 독립 구간에만 적용되고 나머지는 RK45 로 돕니다."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    max_step: float | None = Field(None, gt=0)
    method: Literal["rk45", "expm"] = "rk45"

    def tightened(self, factor: float = 0.5) -> "EvolveSettings":
        return self.model_copy(update={"rel_tol": self.rel_tol * factor, "abs_tol": self.abs_tol * factor})


@dataclass(frozen=True)
class CollapseOp:
    op: np.ndarray
    rate: float  # 1/s

    def __post_init__(self):
        if not np.isfinite(self.rate) or self.rate < 0:
            raise InvalidParameterError(f"collapse rate 는 0 이상이어야 합니다: {self.rate}")
        object.__setattr__(self, "op", np.asarray(self.op, dtype=complex))


@dataclass(frozen=True)
class Drive:
    """
    구동항. operator 는 하강 연산자 L.
    - lab frame:      2Ω cos(ωt + φ) (L + L†)
    - rotating frame: Ω (e^{iφ} L + e^{-iφ} L†)   (RWA, carrier 흡수)
    """

    operator: np.ndarray
    amplitude: float          # Ω [rad/s]
    carrier: float = 0.0      # ω [rad/s]
    phase: float = 0.0        # φ [rad]

    def rotating_term(self) -> np.ndarray:
        L = np.asarray(self.operator, dtype=complex)
        return self.amplitude * (np.exp(1j * self.phase) * L + np.exp(-1j * self.phase) * L.conj().T)

    def lab_coupling(self) -> np.ndarray:
        L = np.asarray(self.operator, dtype=complex)
        return L + L.conj().T

    def lab_envelope(self, t: float) -> float:
        return 2.0 * self.amplitude * np.cos(self.carrier * t + self.phase)


@dataclass(frozen=True)
class TimeSegment:
    duration: float                 # s
    hamiltonian: np.ndarray         # 정적 부분 [rad/s]
    drive: Drive | None = None
    frame: Literal["lab", "rotating"] = "rotating"
    label: str = ""

    def __post_init__(self):
        if not self.duration > 0:
            raise InvalidParameterError(f"segment duration 은 양수여야 합니다: {self.duration} ({self.label})")
        if self.frame not in ("lab", "rotating"):
            raise InvalidParameterError(f"알 수 없는 frame: {self.frame!r}")
        object.__setattr__(self, "hamiltonian", np.asarray(self.hamiltonian, dtype=complex))

    def is_time_independent(self) -> bool:
        return self.drive is None or self.frame == "rotating"

    def static_hamiltonian(self) -> np.ndarray:
        if self.drive is not None and self.frame == "rotating":
            return self.hamiltonian + self.drive.rotating_term()
        return self.hamiltonian


# ─────────────────────────────────────────────────────────
# Liouvillian (column-stacking: vec(AρB) = (Bᵀ ⊗ A) vec(ρ))
# ─────────────────────────────────────────────────────────
def _vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def _unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return v.reshape(dim, dim, order="F")


def commutator_superop(H: np.ndarray) -> np.ndarray:
    I = np.eye(H.shape[0], dtype=complex)
    return -1j * (np.kron(I, H) - np.kron(H.T, I))


def dissipator_superop(L: np.ndarray) -> np.ndarray:
    I = np.eye(L.shape[0], dtype=complex)
    LdL = L.conj().T @ L
    return np.kron(L.conj(), L) - 0.5 * np.kron(I, LdL) - 0.5 * np.kron(LdL.T, I)


def _dissipator_total(collapses: Sequence[CollapseOp], dim: int) -> np.ndarray:
    total = np.zeros((dim * dim, dim * dim), dtype=complex)
    for c in collapses:
        if c.op.shape != (dim, dim):
            raise InvalidDimensionError(f"collapse 연산자 차원 {c.op.shape} != ({dim}, {dim})")
        if c.rate == 0.0:
            continue
        total += c.rate * dissipator_superop(c.op)
    return total


def liouvillian(H: np.ndarray, collapses: Sequence[CollapseOp]) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    return commutator_superop(H) + _dissipator_total(collapses, H.shape[0])


# ─────────────────────────────────────────────────────────
# 시간 발전
# ─────────────────────────────────────────────────────────
def _integrate_rk45(
    L0: np.ndarray,
    Ld: np.ndarray | None,
    drive: Drive | None,
    v0: np.ndarray,
    t_start: float,
    duration: float,
    settings: EvolveSettings,
) -> np.ndarray:
    if Ld is None:
        def rhs(t, v):
            return L0 @ v
    else:
        def rhs(t, v):
            return L0 @ v + drive.lab_envelope(t) * (Ld @ v)

    kwargs = {}
    if settings.max_step is not None:
        kwargs["max_step"] = settings.max_step
    sol = solve_ivp(
        rhs,
        (t_start, t_start + duration),
        v0,
        method="RK45",
        rtol=settings.rel_tol,
        atol=settings.abs_tol,
        **kwargs,
    )
    if not sol.success:
        t_fail = float(sol.t[-1]) if sol.t.size else t_start
        raise IntegrationError(f"RK45 적분 실패: {sol.message}", t_fail)
    return sol.y[:, -1]


def evolve(
    state: QuantumState,
    segments: Sequence[TimeSegment],
    collapses: Sequence[CollapseOp],
    settings: EvolveSettings | None = None,
) -> QuantumState:
    """segment 들을 순서대로 적분한 최종 ρ(T)"""
    settings = settings or EvolveSettings()
    dim = state.dim
    dissip = _dissipator_total(collapses, dim)
    v = _vec(state.density)
    t = 0.0
    for seg in segments:
        if seg.hamiltonian.shape != (dim, dim):
            raise InvalidDimensionError(
                f"segment '{seg.label}' Hamiltonian 차원 {seg.hamiltonian.shape} != ({dim}, {dim})"
            )
        L0 = commutator_superop(seg.static_hamiltonian()) + dissip
        if seg.is_time_independent() and settings.method == "expm":
            v = expm(L0 * seg.duration) @ v
        else:
            Ld = None
            if not seg.is_time_independent():
                Ld = commutator_superop(seg.drive.lab_coupling())
            v = _integrate_rk45(L0, Ld, seg.drive, v, t, seg.duration, settings)
        t += seg.duration
        logger.debug("--- [Lindblad] segment '%s' 완료 (t=%.3e s) ---", seg.label, t)

    rho = _unvec(v, dim)
    norm = np.linalg.norm(rho)
    if norm > 0 and np.linalg.norm(rho - rho.conj().T) / norm > EVOLVE_HERMITIAN_TOL:
        raise NumericalConsistencyError("발전 후 밀도행렬이 Hermitian 을 벗어났습니다")
    out = QuantumState(0.5 * (rho + rho.conj().T), state.dims, check=False)
    validate_state(
        out,
        trace_tol=EVOLVE_TRACE_TOL,
        herm_tol=EVOLVE_HERMITIAN_TOL,
        pos_tol=EVOLVE_POSITIVITY_TOL,
    )
    return out


def steady_state(H: np.ndarray, collapses: Sequence[CollapseOp]) -> QuantumState:
    """Liouvillian null space 의 정상 상태. trace 조건으로 한 행을 대체해 선형계를 풉니다."""
    H = np.asarray(H, dtype=complex)
    dim = H.shape[0]
    L = liouvillian(H, collapses)
    trace_row = _vec(np.eye(dim)).conj()
    A = L.copy()
    A[0, :] = trace_row
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    try:
        v = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"정상 상태가 유일하지 않습니다: {e}") from e
    rho = _unvec(v, dim)
    return QuantumState(0.5 * (rho + rho.conj().T), (dim,))


# ─────────────────────────────────────────────────────────
# 구동-감쇠 조화진동자 (정상 상태 오라클)
# ─────────────────────────────────────────────────────────
def steady_occupation_analytic(drive: float, decay: float) -> float:
    """⟨n⟩ = 4Ω²/Γ²"""
    if not decay > 0:
        raise InvalidParameterError(f"decay 는 양수여야 합니다: Γ={decay}")
    return 4.0 * drive**2 / decay**2


def driven_oscillator(drive: float, decay: float, dim: int) -> tuple[np.ndarray, list[CollapseOp]]:
    """공명 rotating frame: H = Ω(a + a†), L = √Γ a"""
    a = annihilation(dim)
    H = drive * (a + a.conj().T)
    return H, [CollapseOp(a, decay)]


def evolve_to_steady(
    drive: float,
    decay: float,
    layout: HilbertLayout | None = None,
    settings: EvolveSettings | None = None,
    max_decay_times: int = 50,
    rel_change_tol: float = 1e-6,
) -> float:
    """진공에서 시작해 1/Γ 단위로 적분, 한 감쇠시간 동안 ⟨n⟩ 상대변화가 1e-6 미만이면 반환"""
    if not decay > 0:
        raise InvalidParameterError(f"decay 는 양수여야 합니다: Γ={decay}")
    if abs(drive) / decay > 0.1:
        raise InvalidParameterError(
            f"weak-drive 영역을 벗어났습니다: Ω/Γ={abs(drive) / decay:.3g} > 0.1"
        )
    layout = layout or HilbertLayout(fock_cutoff=8)
    settings = settings or EvolveSettings()
    dim = layout.fock_cutoff
    H, collapses = driven_oscillator(drive, decay, dim)
    n_op = number_op(dim)
    chunk = [TimeSegment(1.0 / decay, H, label="steady-chunk")]

    state = basis_state(0, dim)
    n_prev = 0.0
    for k in range(1, max_decay_times + 1):
        state = evolve(state, chunk, collapses, settings)
        n_now = expectation(n_op, state)
        if abs(n_now) < settings.abs_tol and abs(n_prev) < settings.abs_tol:
            return max(n_now, 0.0)
        if n_now > 0 and abs(n_now - n_prev) / n_now < rel_change_tol:
            check_fock_cutoff(state)
            logger.debug("--- [Lindblad] 정상 상태 수렴: %d 감쇠시간, <n>=%.6e ---", k, n_now)
            return n_now
        n_prev = n_now
    raise ConvergenceError(f"{max_decay_times} 감쇠시간 안에 정상 상태에 수렴하지 못했습니다")
