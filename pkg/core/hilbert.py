# core/hilbert.py
"""
qutrit(g, e, f) ⊗ 잘린 Fock 공간 위의 연산자/상태 생성기.

- 밀집 행렬(numpy complex128)만 사용합니다. 전체 공간은 최대 3 x 10 차원입니다.
- 부분계 순서는 항상 qubit ⊗ phonon 으로 고정합니다.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.constants import (
    FOCK_TOP_TOL,
    HBAR,
    HERMITIAN_TOL,
    IMAG_TOL,
    K_B,
    POSITIVITY_TOL,
    TRACE_TOL,
)
from core.errors import InvalidDimensionError, InvalidParameterError, NumericalConsistencyError

Slot = Literal["qubit", "phonon"]


# ─────────────────────────────────────────────────────────
# 타입
# ─────────────────────────────────────────────────────────
class HilbertLayout(BaseModel):
    """qubit 레벨 수와 phonon Fock cutoff"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    qubit_levels: int = Field(3, ge=2)
    fock_cutoff: int = Field(5, ge=3, le=10)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.qubit_levels, self.fock_cutoff)

    @property
    def full_dim(self) -> int:
        return self.qubit_levels * self.fock_cutoff

    def slot_dim(self, slot: Slot) -> int:
        return self.qubit_levels if slot == "qubit" else self.fock_cutoff


@dataclass(frozen=True)
class QuantumState:
    """밀도행렬 + 부분계 차원. 생성 후 읽기 전용입니다.

    check=True 이면 생성 시 trace / Hermitian / positivity 를 검사합니다.
    check=False 는 자체 허용오차로 다시 검사하는 수치 엔진 출력에만 씁니다.
    """

    density: np.ndarray
    dims: tuple[int, ...] = field(default=())
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        rho = np.array(self.density, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDimensionError(f"밀도행렬은 정사각 행렬이어야 합니다: shape={rho.shape}")
        dims = tuple(int(d) for d in self.dims) or (rho.shape[0],)
        if int(np.prod(dims)) != rho.shape[0]:
            raise InvalidDimensionError(f"dims={dims} 의 곱이 행렬 차원 {rho.shape[0]} 과 다릅니다")
        rho.setflags(write=False)
        object.__setattr__(self, "density", rho)
        object.__setattr__(self, "dims", dims)
        if self.check:
            validate_state(self)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.density)).copy()


class QutritOps(NamedTuple):
    sigma_ge: np.ndarray   # |g><e|
    sigma_ef: np.ndarray   # |e><f|
    proj_g: np.ndarray
    proj_e: np.ndarray
    proj_f: np.ndarray


# ─────────────────────────────────────────────────────────
# 연산자
# ─────────────────────────────────────────────────────────
def annihilation(dim: int) -> np.ndarray:
    """잘린 Fock 공간의 소멸 연산자 a (entries √k at (k-1, k))"""
    if dim < 2:
        raise InvalidDimensionError(f"소멸 연산자 차원은 2 이상이어야 합니다: dim={dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def number_op(dim: int) -> np.ndarray:
    a = annihilation(dim)
    return a.conj().T @ a


def qutrit_ops() -> QutritOps:
    basis = np.eye(3, dtype=complex)
    g, e, f = basis[:, [0]], basis[:, [1]], basis[:, [2]]
    return QutritOps(
        sigma_ge=g @ e.conj().T,
        sigma_ef=e @ f.conj().T,
        proj_g=g @ g.conj().T,
        proj_e=e @ e.conj().T,
        proj_f=f @ f.conj().T,
    )


def embed(op: np.ndarray, slot: Slot, layout: HilbertLayout) -> np.ndarray:
    """부분계 연산자를 전체 공간(qubit ⊗ phonon)으로 확장"""
    op = np.asarray(op, dtype=complex)
    if slot not in ("qubit", "phonon"):
        raise InvalidDimensionError(f"알 수 없는 slot: {slot!r}")
    want = layout.slot_dim(slot)
    if op.shape != (want, want):
        raise InvalidDimensionError(
            f"{slot} slot 연산자 차원 불일치: op={op.shape}, layout={want}"
        )
    if slot == "qubit":
        return np.kron(op, np.eye(layout.fock_cutoff, dtype=complex))
    return np.kron(np.eye(layout.qubit_levels, dtype=complex), op)


def is_hermitian(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    """상대 Frobenius 노름 기준 Hermitian 여부"""
    m = np.asarray(matrix)
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return True
    return bool(np.linalg.norm(m - m.conj().T) / norm <= tol)


# ─────────────────────────────────────────────────────────
# 상태
# ─────────────────────────────────────────────────────────
def basis_state(level: int, dim: int) -> QuantumState:
    if not 0 <= level < dim:
        raise InvalidDimensionError(f"level={level} 이 dim={dim} 범위를 벗어났습니다")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[level, level] = 1.0
    return QuantumState(rho, (dim,))


def fock_diagonal_state(populations: Sequence[float], dim: int) -> QuantumState:
    """대각 상태 {p0, p1, ...} (나머지 레벨은 0)"""
    pops = np.zeros(dim)
    vals = np.asarray(populations, dtype=float)
    if vals.size > dim:
        raise InvalidDimensionError(f"population 개수 {vals.size} > dim={dim}")
    if np.any(vals < 0):
        raise InvalidParameterError("population 은 음수가 될 수 없습니다")
    if abs(vals.sum() - 1.0) > TRACE_TOL:
        raise InvalidParameterError(f"population 합이 1 이 아닙니다: {vals.sum():.12f}")
    pops[: vals.size] = vals
    return QuantumState(np.diag(pops).astype(complex), (dim,))


def product_state(*states: QuantumState) -> QuantumState:
    rho = np.array([[1.0 + 0j]])
    dims: tuple[int, ...] = ()
    for s in states:
        rho = np.kron(rho, s.density)
        dims = dims + s.dims
    return QuantumState(rho, dims)


def thermal_populations(freq: float, temp: float, dim: int) -> np.ndarray:
    """Boltzmann 분포 p_k ∝ exp(-k ħω / k_B T), dim 레벨로 재정규화"""
    if temp < 0:
        raise InvalidParameterError(f"온도는 음수가 될 수 없습니다: T={temp}")
    if freq <= 0:
        raise InvalidParameterError(f"주파수는 양수여야 합니다: ω={freq}")
    if dim < 1:
        raise InvalidDimensionError(f"dim={dim}")
    pops = np.zeros(dim)
    if temp == 0:
        pops[0] = 1.0
        return pops
    x = HBAR * freq / (K_B * temp)
    pops = np.exp(-x * np.arange(dim))
    return pops / pops.sum()


def thermal_state(freq: float, temp: float, dim: int) -> QuantumState:
    """freq: 각주파수 [rad/s], temp: [K]"""
    return QuantumState(np.diag(thermal_populations(freq, temp, dim)).astype(complex), (dim,))


def bose_occupation(freq: float, temp: float) -> float:
    """무한 차원 열평형 평균 점유수 1/(exp(ħω/k_BT) - 1)"""
    if temp <= 0:
        return 0.0
    return float(1.0 / np.expm1(HBAR * freq / (K_B * temp)))


# ─────────────────────────────────────────────────────────
# 측정/검증
# ─────────────────────────────────────────────────────────
def expectation(op: np.ndarray, state: QuantumState) -> float:
    """Tr(op·ρ). 허수부가 1e-8 을 넘으면 수치 일관성 오류"""
    op = np.asarray(op, dtype=complex)
    if op.shape != state.density.shape:
        raise InvalidDimensionError(f"연산자 {op.shape} 와 상태 {state.density.shape} 차원 불일치")
    val = np.trace(op @ state.density)
    if abs(val.imag) > IMAG_TOL:
        raise NumericalConsistencyError(f"기댓값 허수부가 너무 큽니다: {val.imag:.3e}")
    return float(val.real)


def partial_trace(state: QuantumState, keep: int) -> np.ndarray:
    """이분계 상태에서 keep 번째 부분계만 남긴 축약 밀도행렬"""
    if len(state.dims) != 2:
        raise InvalidDimensionError(f"이분계 상태만 지원합니다: dims={state.dims}")
    d1, d2 = state.dims
    rho = state.density.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ijkj->ik", rho)
    return np.einsum("ijil->jl", rho)


def top_level_population(state: QuantumState, slot: Slot = "phonon") -> float:
    """Fock cutoff 가드: 지정 부분계 최상위 레벨의 population"""
    if len(state.dims) == 1:
        return float(np.real(state.density[-1, -1]))
    keep = 0 if slot == "qubit" else 1
    reduced = partial_trace(state, keep)
    return float(np.real(reduced[-1, -1]))


def check_fock_cutoff(state: QuantumState, tol: float = FOCK_TOP_TOL) -> None:
    top = top_level_population(state, "phonon")
    if top > tol:
        raise NumericalConsistencyError(
            f"Fock cutoff 최상위 레벨 population {top:.3e} > {tol:.0e}; fock_cutoff 를 늘리세요"
        )


def validate_state(
    state: QuantumState,
    trace_tol: float = TRACE_TOL,
    herm_tol: float = HERMITIAN_TOL,
    pos_tol: float = POSITIVITY_TOL,
) -> None:
    """trace / Hermitian / positivity 검사. 위반 시 NumericalConsistencyError"""
    rho = state.density
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise NumericalConsistencyError(f"trace={tr.real:.12f} (허용 {trace_tol:.0e})")
    if np.linalg.norm(rho - rho.conj().T) > herm_tol * max(np.linalg.norm(rho), 1.0):
        raise NumericalConsistencyError("밀도행렬이 Hermitian 이 아닙니다")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if min_eig < -pos_tol:
        raise NumericalConsistencyError(f"음의 고유값 {min_eig:.3e} (허용 -{pos_tol:.0e})")


def purity(state: QuantumState) -> float:
    return float(np.real(np.trace(state.density @ state.density)))
