# analysis/protocol.py
"""
phonon 들뜬상태 population 측정 프로토콜 시뮬레이터.

시퀀스 (qubit ⊗ phonon, qubit-phonon 공명 rotating frame):
    C(열상태 준비) → M(iSWAP) → [R: π_ge] → 대기 → F(π_ef on/off) → π_ge → readout

A_sig / A_ref 대비(contrast)에서 P = A_sig / (A_sig + A_ref) 로 population 을 추출하고,
측정값 ↔ 실제값 곡선을 뒤집어 실제 population 상한을 추정합니다.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from multiprocessing import Pool
from typing import Literal, NamedTuple, Sequence

import numpy as np
import pandas as pd

from core.config import DeviceParams, ProtocolSettings, SweepSpec
from core.errors import (
    DegenerateContrastError,
    FloorDominatedError,
    InvalidDimensionError,
    InvalidParameterError,
    InversionError,
)
from core.hilbert import (
    HilbertLayout,
    QuantumState,
    annihilation,
    bose_occupation,
    check_fock_cutoff,
    embed,
    fock_diagonal_state,
    partial_trace,
    product_state,
    qutrit_ops,
    thermal_state,
    validate_state,
)
from core.lindblad import (
    EVOLVE_HERMITIAN_TOL,
    EVOLVE_POSITIVITY_TOL,
    EVOLVE_TRACE_TOL,
    CollapseOp,
    TimeSegment,
    evolve,
)

logger = logging.getLogger(__name__)

Transition = Literal["ge", "ef"]


# ─────────────────────────────────────────────────────────
# 시스템 구성
# ─────────────────────────────────────────────────────────
class SystemModel(NamedTuple):
    layout: HilbertLayout
    h_swap: np.ndarray              # 공명 JC + e-f 매니폴드 + 비조화성 [rad/s]
    collapses: list[CollapseOp]
    rates: dict[str, float]         # 1/s
    swap_duration: float            # π/(2g) [s]


@dataclass(frozen=True)
class ContrastResult:
    a_sig: float
    a_ref: float | None
    population: float
    true_population: float | None = None
    readout_pg: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def build_system(device: DeviceParams, layout: HilbertLayout | None = None) -> SystemModel:
    """JC Hamiltonian(g, √2g) 과 qubit/phonon 소산 채널"""
    layout = layout or HilbertLayout()
    if layout.qubit_levels != 3:
        raise InvalidDimensionError(f"프로토콜은 qutrit(g, e, f)이 필요합니다: qubit_levels={layout.qubit_levels}")
    if device.T2_phonon > 2.0 * device.T1_phonon:
        raise InvalidParameterError(
            f"T2_phonon({device.T2_phonon:.3e}) > 2·T1_phonon({2 * device.T1_phonon:.3e})"
        )

    q = qutrit_ops()
    a = embed(annihilation(layout.fock_cutoff), "phonon", layout)
    s_ge = embed(q.sigma_ge, "qubit", layout)
    s_ef = embed(q.sigma_ef, "qubit", layout)
    pi_f = embed(q.proj_f, "qubit", layout)
    n_qubit = embed(q.proj_e + 2.0 * q.proj_f, "qubit", layout)
    n_phonon = a.conj().T @ a

    g = device.g
    h_swap = (
        g * (a.conj().T @ s_ge + s_ge.conj().T @ a)
        + math.sqrt(2.0) * g * (a.conj().T @ s_ef + s_ef.conj().T @ a)
        + device.alpha * pi_f
    )

    n_q = bose_occupation(device.omega_q, device.T_qb_bath)
    n_p = bose_occupation(device.omega_p, device.T_env)
    phonon_pure_dephasing = 1.0 / device.T2_phonon - 1.0 / (2.0 * device.T1_phonon)
    rates = {
        "qubit_down": (1.0 + n_q) / device.T1_ge,
        "qubit_up": n_q / device.T1_ge,
        "ef_decay": 1.0 / device.T1_ef,
        "qubit_dephasing": 1.0 / device.T_phi,
        "phonon_down": (1.0 + n_p) / device.T1_phonon,
        "phonon_up": n_p / device.T1_phonon,
        "phonon_dephasing": max(phonon_pure_dephasing, 0.0),
    }
    # 순수 dephasing: 번호 연산자 N 에 rate 2γ → 인접 레벨 coherence 가 γ 로 감쇠
    collapses = [
        CollapseOp(s_ge, rates["qubit_down"]),
        CollapseOp(s_ge.conj().T, rates["qubit_up"]),
        CollapseOp(s_ef, rates["ef_decay"]),
        CollapseOp(n_qubit, 2.0 * rates["qubit_dephasing"]),
        CollapseOp(a, rates["phonon_down"]),
        CollapseOp(a.conj().T, rates["phonon_up"]),
        CollapseOp(n_phonon, 2.0 * rates["phonon_dephasing"]),
    ]
    return SystemModel(layout, h_swap, collapses, rates, math.pi / (2.0 * g))


def initial_state(device: DeviceParams, true_population: float, layout: HilbertLayout) -> QuantumState:
    """gate C 대체: qubit 열상태(T_qb_init) ⊗ phonon diag(1-p, p, 0, ...)"""
    qubit = thermal_state(device.omega_q, device.T_qb_init, layout.qubit_levels)
    phonon = fock_diagonal_state([1.0 - true_population, true_population], layout.fock_cutoff)
    return product_state(qubit, phonon)


# ─────────────────────────────────────────────────────────
# 게이트
# ─────────────────────────────────────────────────────────
def _wait(state: QuantumState, duration: float, system: SystemModel, settings: ProtocolSettings, label: str) -> QuantumState:
    if duration <= 0:
        return state
    zero = np.zeros_like(system.h_swap)
    return evolve(state, [TimeSegment(duration, zero, label=label)], system.collapses, settings.evolve)


def gate_iswap(
    state: QuantumState,
    device: DeviceParams,
    settings: ProtocolSettings,
    system: SystemModel | None = None,
) -> QuantumState:
    """gate M: 공명 JC 상호작용을 A_iSWAP·π/(2g) 동안 (소산 포함)"""
    system = system or build_system(device, HilbertLayout(fock_cutoff=state.dims[-1]))
    full = settings.swap_duration if settings.swap_duration is not None else system.swap_duration
    duration = settings.iswap_amplitude * full
    if duration <= 0:
        return state
    seg = TimeSegment(duration, system.h_swap, label="gate-M")
    return evolve(state, [seg], system.collapses, settings.evolve)


def _pi_generator(transition: Transition) -> np.ndarray:
    q = qutrit_ops()
    low = q.sigma_ge if transition == "ge" else q.sigma_ef
    return low + low.conj().T


def apply_pi(
    state: QuantumState,
    transition: Transition,
    settings: ProtocolSettings | None = None,
    system: SystemModel | None = None,
) -> QuantumState:
    """
    π 펄스. instantaneous: U = exp(-i π/2 · (σ + σ†)) 를 바로 적용.
    finite: 공명 Rabi 구동(H = Ω(σ + σ†), Ω = π/(2·duration))을 소산과 함께 적분.
    """
    if transition not in ("ge", "ef"):
        raise InvalidParameterError(f"알 수 없는 전이: {transition!r}")
    settings = settings or ProtocolSettings()
    layout = HilbertLayout(qubit_levels=state.dims[0], fock_cutoff=state.dims[-1]) if len(state.dims) == 2 else None
    gen = _pi_generator(transition)

    if settings.gate_model == "finite":
        if system is None:
            raise InvalidParameterError("finite gate model 에는 SystemModel 이 필요합니다")
        duration = settings.pi_ge_duration if transition == "ge" else settings.pi_ef_duration
        omega = math.pi / (2.0 * duration)
        h = omega * embed(gen, "qubit", system.layout)
        seg = TimeSegment(duration, h, label=f"pi-{transition}")
        return evolve(state, [seg], system.collapses, settings.evolve)

    # exp(-iθX) on the 2-level subspace, θ = π/2 → -iX
    support = np.abs(gen).sum(axis=0) > 0
    u_q = np.diag(np.where(support, 0.0, 1.0)).astype(complex) - 1j * gen
    u = embed(u_q, "qubit", layout) if layout is not None else u_q
    rho = u @ state.density @ u.conj().T
    out = QuantumState(rho, state.dims, check=False)
    # 입력이 evolve 출력일 수 있으므로 evolve 와 같은 허용오차
    validate_state(
        out,
        trace_tol=EVOLVE_TRACE_TOL,
        herm_tol=EVOLVE_HERMITIAN_TOL,
        pos_tol=EVOLVE_POSITIVITY_TOL,
    )
    return out


def ground_probability(state: QuantumState) -> float:
    reduced = partial_trace(state, 0) if len(state.dims) == 2 else state.density
    return float(np.real(reduced[0, 0]))


def readout_contrast(state_drive_on: QuantumState, state_drive_off: QuantumState, F_ro: float) -> float:
    """대칭 confusion matrix [F, 1-F; 1-F, F] 를 거친 ground 결과 확률의 차이"""
    if not 0.5 < F_ro <= 1.0:
        raise InvalidParameterError(f"readout fidelity 는 (0.5, 1] 범위여야 합니다: {F_ro}")
    outcomes = []
    for st in (state_drive_on, state_drive_off):
        pg = ground_probability(st)
        outcomes.append(F_ro * pg + (1.0 - F_ro) * (1.0 - pg))
    return abs(outcomes[0] - outcomes[1])


def extract_population(a_sig: float, a_ref: float) -> float:
    total = a_sig + a_ref
    if not total > 0:
        raise DegenerateContrastError(f"두 contrast 가 모두 0 입니다: a_sig={a_sig}, a_ref={a_ref}")
    return a_sig / total


# ─────────────────────────────────────────────────────────
# 전체 프로토콜
# ─────────────────────────────────────────────────────────
def _branch_contrast(
    state: QuantumState,
    system: SystemModel,
    settings: ProtocolSettings,
) -> tuple[float, float, float]:
    """대기 → F(off/on) → π_ge → readout. (contrast, pg_on, pg_off)"""
    waited = _wait(state, settings.wait_after_swap, system, settings, "wait")
    if settings.gate_model == "finite":
        off = _wait(waited, settings.pi_ef_duration, system, settings, "F-off")
    else:
        off = waited
    on = apply_pi(waited, "ef", settings, system)
    off = apply_pi(off, "ge", settings, system)
    on = apply_pi(on, "ge", settings, system)
    return readout_contrast(on, off, settings.readout_fidelity), ground_probability(on), ground_probability(off)


def _finish(
    a_sig: float,
    a_ref: float | None,
    settings: ProtocolSettings,
    true_population: float | None,
    pg: dict[str, float],
) -> ContrastResult:
    if a_ref is None:
        # reference 없이: readout 보정한 단측 추정
        population = a_sig / (2.0 * settings.readout_fidelity - 1.0)
    else:
        population = extract_population(a_sig, a_ref)
    return ContrastResult(a_sig, a_ref, population, true_population, pg)


def run_protocol(
    device: DeviceParams,
    true_phonon_population: float,
    settings: ProtocolSettings | None = None,
    layout: HilbertLayout | None = None,
) -> ContrastResult:
    if not 0.0 <= true_phonon_population < 0.5:
        raise InvalidParameterError(
            f"true phonon population 은 [0, 0.5) 범위여야 합니다: {true_phonon_population}"
        )
    settings = settings or ProtocolSettings()
    system = build_system(device, layout)
    state = initial_state(device, true_phonon_population, system.layout)

    swapped = gate_iswap(state, device, settings, system)
    check_fock_cutoff(swapped)

    a_sig, pg_sig_on, pg_sig_off = _branch_contrast(swapped, system, settings)
    pg = {"sig_on": pg_sig_on, "sig_off": pg_sig_off}
    a_ref = None
    if settings.include_reference:
        flipped = apply_pi(swapped, "ge", settings, system)
        a_ref, pg_ref_on, pg_ref_off = _branch_contrast(flipped, system, settings)
        pg.update({"ref_on": pg_ref_on, "ref_off": pg_ref_off})

    result = _finish(a_sig, a_ref, settings, true_phonon_population, pg)
    logger.debug(
        "--- [Protocol] input=%.3e → extracted=%.6e (a_sig=%.3e, a_ref=%s) ---",
        true_phonon_population, result.population, a_sig, a_ref,
    )
    return result


def measure_qubit_population(
    device: DeviceParams,
    settings: ProtocolSettings | None = None,
    layout: HilbertLayout | None = None,
) -> ContrastResult:
    """swap 없이 같은 방식으로 qubit 자체 population(P_q)을 측정. qubit 은 bath 열상태에서 시작"""
    settings = settings or ProtocolSettings()
    system = build_system(device, layout)
    qubit = thermal_state(device.omega_q, device.T_qb_bath, system.layout.qubit_levels)
    phonon = fock_diagonal_state([1.0], system.layout.fock_cutoff)
    state = product_state(qubit, phonon)

    a_sig, pg_sig_on, pg_sig_off = _branch_contrast(state, system, settings)
    pg = {"sig_on": pg_sig_on, "sig_off": pg_sig_off}
    a_ref = None
    if settings.include_reference:
        a_ref, pg_ref_on, pg_ref_off = _branch_contrast(apply_pi(state, "ge", settings, system), system, settings)
        pg.update({"ref_on": pg_ref_on, "ref_off": pg_ref_off})
    return _finish(a_sig, a_ref, settings, None, pg)


def bath_range_from_qubit_populations(p_low: float, p_high: float, freq_hz: float) -> tuple[float, float]:
    """측정된 P_q 범위 → qubit bath 온도 범위 (Boltzmann 역변환)"""
    from analysis.thermo import effective_temperature

    if not 0 < p_low <= p_high:
        raise InvalidParameterError(f"0 < p_low <= p_high 이어야 합니다: ({p_low}, {p_high})")
    return effective_temperature(p_low, freq_hz), effective_temperature(p_high, freq_hz)


# ─────────────────────────────────────────────────────────
# 스윕
# ─────────────────────────────────────────────────────────
_DEVICE_SWEEPS = {"T1_ge", "T_qb_bath", "T1_ef", "T_phi"}


def apply_sweep_value(
    device: DeviceParams,
    settings: ProtocolSettings,
    parameter: str,
    value: float,
) -> tuple[DeviceParams, ProtocolSettings]:
    """스윕 값 하나를 반영한 (device, settings). 범위 검증은 pydantic 이 수행"""
    if parameter in _DEVICE_SWEEPS:
        return device.replace(**{parameter: value}), settings
    if parameter == "A_iSWAP":
        return device, settings.replace(iswap_amplitude=value)
    if parameter == "F_ro":
        return device, settings.replace(readout_fidelity=value)
    raise InvalidParameterError(f"알 수 없는 스윕 파라미터: {parameter!r}")


def _sweep_point(args: tuple) -> ContrastResult:
    device, settings, layout, parameter, value, population = args
    dev, st = apply_sweep_value(device, settings, parameter, value)
    return run_protocol(dev, population, st, layout)


def sweep(
    device: DeviceParams,
    spec: SweepSpec,
    settings: ProtocolSettings | None = None,
    layout: HilbertLayout | None = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """값마다 run_protocol 한 번. 결과 순서는 입력 순서 그대로 (jobs 수와 무관)"""
    settings = settings or ProtocolSettings()
    layout = layout or HilbertLayout()
    # 값 검증을 먼저 (워커에서 터지기 전에)
    for v in spec.values:
        apply_sweep_value(device, settings, spec.parameter, v)

    tasks = [(device, settings, layout, spec.parameter, v, spec.population) for v in spec.values]
    logger.info("--- [Sweep] %s: %d 포인트 (jobs=%d) ---", spec.parameter, len(tasks), jobs)
    if jobs > 1 and len(tasks) > 1:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            results = pool.map(_sweep_point, tasks)
    else:
        results = [_sweep_point(t) for t in tasks]

    return pd.DataFrame(
        {
            "parameter": [spec.parameter] * len(results),
            "value": list(spec.values),
            "a_sig": [r.a_sig for r in results],
            "a_ref": [np.nan if r.a_ref is None else r.a_ref for r in results],
            "population": [r.population for r in results],
        }
    )


# ─────────────────────────────────────────────────────────
# 측정값 → 실제값 역변환
# ─────────────────────────────────────────────────────────
def inversion_grid(points_per_decade: int = 25, lo: float = 1e-7, hi: float = 1e-2) -> np.ndarray:
    """0 과 [lo, hi] 로그 격자"""
    decades = math.log10(hi / lo)
    n = int(round(decades * points_per_decade)) + 1
    return np.concatenate([[0.0], np.logspace(math.log10(lo), math.log10(hi), n)])


def population_curve(
    device: DeviceParams,
    trues: Sequence[float],
    bath: float,
    settings: ProtocolSettings | None = None,
    layout: HilbertLayout | None = None,
) -> np.ndarray:
    """qubit bath 온도 하나에서의 measured-vs-true 곡선"""
    dev = device.replace(T_qb_bath=bath)
    return np.array([run_protocol(dev, float(p), settings, layout).population for p in trues])


def _invert_curve(measured: float, trues: np.ndarray, curve: np.ndarray) -> float:
    if not np.all(np.diff(curve) > 0):
        raise InversionError("measured-vs-true 곡선이 단조 증가하지 않습니다")
    if measured <= curve[0]:
        return 0.0
    if measured > curve[-1]:
        raise InversionError(
            f"측정값 {measured:.3e} 가 시뮬레이션 범위 상한 {curve[-1]:.3e} 를 넘습니다"
        )
    if measured <= curve[1]:
        # 0 과 첫 로그 격자점 사이는 선형
        frac = (measured - curve[0]) / (curve[1] - curve[0])
        return float(frac * trues[1])
    return float(np.exp(np.interp(np.log(measured), np.log(curve[1:]), np.log(trues[1:]))))


def infer_population(
    measured: float,
    device: DeviceParams,
    bath_range: tuple[float, float],
    settings: ProtocolSettings | None = None,
    layout: HilbertLayout | None = None,
    points_per_decade: int = 25,
) -> float:
    """
    bath 양 끝 온도에서 곡선을 만들고 측정값에서 역변환.
    상한 경계(같은 측정값에 대해 가장 큰 실제값)를 반환합니다.
    """
    trues = inversion_grid(points_per_decade)
    baths = sorted(set(float(b) for b in bath_range))
    curves = [population_curve(device, trues, b, settings, layout) for b in baths]

    floor = min(float(c[0]) for c in curves)
    if measured < floor:
        raise FloorDominatedError(measured, floor)

    inferred = max(_invert_curve(measured, trues, c) for c in curves)
    logger.info(
        "--- [Inference] measured=%.3e, bath=%s → inferred=%.3e (floor=%.3e) ---",
        measured, baths, inferred, floor,
    )
    return inferred
