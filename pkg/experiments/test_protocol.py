# python -m pytest experiments/test_protocol.py
# 느린 테스트(스윕/역변환)는 -m "not slow" 로 건너뛸 수 있습니다.
import numpy as np
import pytest

from analysis.protocol import (
    apply_pi,
    bath_range_from_qubit_populations,
    build_system,
    extract_population,
    gate_iswap,
    ground_probability,
    infer_population,
    initial_state,
    measure_qubit_population,
    population_curve,
    readout_contrast,
    run_protocol,
    sweep,
)
from core.config import TWO_PI, ProtocolSettings, SweepSpec
from core.errors import (
    DegenerateContrastError,
    FloorDominatedError,
    InvalidDimensionError,
    InvalidParameterError,
)
from core.hilbert import (
    HilbertLayout,
    QuantumState,
    basis_state,
    embed,
    expectation,
    number_op,
    partial_trace,
    product_state,
    qutrit_ops,
    thermal_state,
)


def _qutrit(pg: float, pe: float, pf: float = 0.0) -> QuantumState:
    return QuantumState(np.diag([pg, pe, pf]).astype(complex))


def _qubit_excited(state: QuantumState) -> float:
    return float(np.real(partial_trace(state, 0)[1, 1]))


# ─────────────────────────────────────────────────────────
# 시스템 구성
# ─────────────────────────────────────────────────────────
class TestBuildSystem:
    def test_phonon_pure_dephasing(self, device):
        system = build_system(device)
        assert system.rates["phonon_dephasing"] == pytest.approx(536.0, rel=1e-3)

    def test_swap_duration(self, device):
        system = build_system(device)
        assert system.swap_duration == pytest.approx(893e-9, rel=1e-3)
        assert system.swap_duration == pytest.approx(850e-9, rel=0.1)

    def test_zero_temperature_has_no_upward_rates(self, ideal_device):
        rates = build_system(ideal_device).rates
        assert rates["qubit_up"] == 0.0
        assert rates["phonon_up"] == 0.0

    def test_qubit_upward_rate_at_forty_millikelvin(self, device):
        assert build_system(device).rates["qubit_up"] == pytest.approx(81.8, rel=0.01)

    def test_t2_longer_than_twice_t1(self, device):
        with pytest.raises(InvalidParameterError):
            build_system(device.replace(T2_phonon=300e-6))

    def test_qubit_needs_three_levels(self, device):
        with pytest.raises(InvalidDimensionError):
            build_system(device, HilbertLayout(qubit_levels=2))


# ─────────────────────────────────────────────────────────
# 게이트
# ─────────────────────────────────────────────────────────
class TestGates:
    def test_lossless_swap_transfers_population(self, ideal_device):
        layout = HilbertLayout()
        state = initial_state(ideal_device, 1e-4, layout)
        out = gate_iswap(state, ideal_device, ProtocolSettings())
        assert _qubit_excited(out) == pytest.approx(1e-4, abs=1e-9)

    def test_zero_amplitude_is_identity(self, device):
        state = initial_state(device, 1e-4, HilbertLayout())
        out = gate_iswap(state, device, ProtocolSettings(iswap_amplitude=0.0))
        np.testing.assert_allclose(out.density, state.density)

    def test_heating_during_swap(self, device):
        layout = HilbertLayout()
        q = qutrit_ops()
        start = product_state(basis_state(0, 3), basis_state(0, 5))
        out = gate_iswap(start, device, ProtocolSettings())
        qubit = expectation(embed(q.proj_e + 2.0 * q.proj_f, "qubit", layout), out)
        phonon = expectation(embed(number_op(5), "phonon", layout), out)
        total = qubit + phonon
        assert total == pytest.approx(7.3e-5, rel=0.2)
        assert 0.3 < qubit / total < 0.7

    def test_qubit_share_of_swap_heating(self, device):
        # 스왑 중 생긴 들뜸은 평균적으로 절반이 qubit 에 남음: p_e ≈ (Γ↑q + Γ↑p)·t_swap / 2
        layout = HilbertLayout()
        system = build_system(device, layout)
        start = product_state(basis_state(0, 3), basis_state(0, 5))
        out = gate_iswap(start, device, ProtocolSettings(), system)
        p_e = expectation(embed(qutrit_ops().proj_e, "qubit", layout), out)
        estimate = 0.5 * (system.rates["qubit_up"] + system.rates["phonon_up"]) * system.swap_duration
        assert p_e == pytest.approx(estimate, rel=0.15)
        assert p_e == pytest.approx(3.65e-5, rel=0.2)

    def test_pi_ge_flips_ground(self):
        out = apply_pi(basis_state(0, 3), "ge")
        np.testing.assert_allclose(out.populations(), [0.0, 1.0, 0.0], atol=1e-15)

    def test_pi_ge_twice_restores_populations(self):
        start = _qutrit(0.7, 0.2, 0.1)
        out = apply_pi(apply_pi(start, "ge"), "ge")
        np.testing.assert_allclose(out.populations(), start.populations(), atol=1e-15)

    def test_pi_ef_moves_thermal_excitation(self):
        start = thermal_state(TWO_PI * 5.06881e9, 0.04, 3)
        out = apply_pi(start, "ef")
        assert out.populations()[2] == pytest.approx(start.populations()[1], rel=1e-12)

    def test_unknown_transition(self):
        with pytest.raises(InvalidParameterError):
            apply_pi(basis_state(0, 3), "gf")

    def test_finite_pulse_needs_system(self):
        with pytest.raises(InvalidParameterError):
            apply_pi(basis_state(0, 3), "ge", ProtocolSettings(gate_model="finite"))


# ─────────────────────────────────────────────────────────
# 판독 / 추출
# ─────────────────────────────────────────────────────────
class TestReadout:
    def test_identical_states_give_zero(self):
        s = _qutrit(0.6, 0.4)
        assert readout_contrast(s, s, 0.9) == 0.0

    def test_perfect_readout(self):
        assert readout_contrast(_qutrit(0.8, 0.2), _qutrit(0.5, 0.5), 1.0) == pytest.approx(0.3)

    def test_imperfect_readout_scales_contrast(self):
        assert readout_contrast(_qutrit(0.8, 0.2), _qutrit(0.5, 0.5), 0.9) == pytest.approx(0.24)

    def test_fidelity_range(self):
        s = _qutrit(1.0, 0.0)
        with pytest.raises(InvalidParameterError):
            readout_contrast(s, s, 0.5)

    def test_ground_probability_of_product(self):
        state = product_state(_qutrit(0.7, 0.3), basis_state(1, 5))
        assert ground_probability(state) == pytest.approx(0.7)

    def test_extract(self):
        assert extract_population(0.0, 0.8) == 0.0
        assert extract_population(0.4, 0.4) == 0.5
        assert extract_population(0.2, 0.6) == pytest.approx(extract_population(0.1, 0.3))

    def test_extract_degenerate(self):
        with pytest.raises(DegenerateContrastError):
            extract_population(0.0, 0.0)


# ─────────────────────────────────────────────────────────
# 전체 프로토콜
# ─────────────────────────────────────────────────────────
class TestRunProtocol:
    @pytest.mark.parametrize("population", [1e-5, 1e-4, 1e-3])
    def test_ideal_device_is_identity(self, ideal_device, population):
        result = run_protocol(ideal_device, population)
        assert result.population == pytest.approx(population, abs=1e-7)
        assert result.true_population == population

    def test_ideal_device_finite_pulses(self, ideal_device):
        result = run_protocol(ideal_device, 1e-4, ProtocolSettings(gate_model="finite"))
        assert result.population == pytest.approx(1e-4, abs=1e-7)

    def test_without_reference(self, ideal_device):
        result = run_protocol(ideal_device, 1e-4, ProtocolSettings(include_reference=False, readout_fidelity=0.9))
        assert result.a_ref is None
        assert result.population == pytest.approx(1e-4, abs=1e-7)

    def test_measured_device(self, baseline):
        result = run_protocol(baseline.device, 1.9e-5, baseline.protocol, baseline.layout)
        assert 3.35e-5 <= result.population <= 1.34e-4
        assert result.a_ref > result.a_sig
        assert result.population == pytest.approx(extract_population(result.a_sig, result.a_ref))

    def test_measured_device_at_bath_edges(self, baseline):
        cold, hot = baseline.bath_range
        p_cold = run_protocol(baseline.device.replace(T_qb_bath=cold), 1.9e-5, baseline.protocol, baseline.layout)
        p_hot = run_protocol(baseline.device.replace(T_qb_bath=hot), 1.9e-5, baseline.protocol, baseline.layout)
        # 차가운 쪽 곡선(추정 상한 경계)이 측정값 창 안에 들어옵니다
        assert 3.35e-5 <= p_cold.population <= 1.34e-4
        # 뜨거운 쪽은 qubit 열 floor 가 지배
        assert p_hot.population > 1.34e-4
        assert p_hot.population > p_cold.population

    def test_floor_is_positive(self, device):
        assert run_protocol(device, 0.0).population > 0.0

    def test_population_range(self, device):
        with pytest.raises(InvalidParameterError):
            run_protocol(device, 0.6)

    def test_to_dict(self, ideal_device):
        d = run_protocol(ideal_device, 1e-4).to_dict()
        assert set(d) == {"a_sig", "a_ref", "population", "true_population", "readout_pg"}
        assert set(d["readout_pg"]) == {"sig_on", "sig_off", "ref_on", "ref_off"}


class TestQubitThermometry:
    def test_qubit_population_at_bath(self, device):
        result = measure_qubit_population(device)
        assert result.population == pytest.approx(2.28e-3, rel=0.02)

    def test_bath_range_from_populations(self):
        lo, hi = bath_range_from_qubit_populations(1.5e-3, 1e-2, 5.06881e9)
        assert lo == pytest.approx(0.037, rel=0.03)
        assert hi == pytest.approx(0.053, rel=0.03)

    def test_bath_range_order(self):
        with pytest.raises(InvalidParameterError):
            bath_range_from_qubit_populations(1e-2, 1.5e-3, 5.06881e9)


# ─────────────────────────────────────────────────────────
# 스윕
# ─────────────────────────────────────────────────────────
def _populations(device, parameter, values, population=1.9e-5):
    table = sweep(device, SweepSpec(parameter=parameter, values=values, population=population))
    assert list(table["value"]) == list(values)
    return table["population"].to_numpy()


@pytest.mark.slow
class TestErrorBudget:
    def test_readout_fidelity_cancels(self, device):
        pops = _populations(device, "F_ro", [0.7, 0.8, 0.9, 1.0])
        assert np.ptp(pops) < 1e-6

    def test_longer_t1_lowers_floor(self, device):
        pops = _populations(device, "T1_ge", [10e-6, 20e-6, 40e-6, 80e-6])
        assert np.all(np.diff(pops) <= 0)

    def test_longer_t_phi_lowers_floor(self, device):
        pops = _populations(device, "T_phi", [5e-6, 10e-6, 20e-6, 40e-6])
        assert np.all(np.diff(pops) <= 0)

    def test_hotter_bath_raises_floor(self, device):
        pops = _populations(device, "T_qb_bath", [0.03, 0.04, 0.05, 0.06])
        assert np.all(np.diff(pops) >= 0)

    def test_full_swap_is_optimal(self, device):
        values = [0.8, 0.9, 1.0, 1.1, 1.2]
        pops = _populations(device, "A_iSWAP", values)
        assert values[int(np.argmin(pops))] == 1.0

    def test_ef_lifetime_is_minor(self, device):
        pops = _populations(device, "T1_ef", [10e-6, 20e-6, 40e-6])
        assert np.ptp(pops) < 1e-6

    def test_parallel_matches_serial(self, ideal_device):
        spec = SweepSpec(parameter="F_ro", values=[0.9, 0.95, 1.0], population=1e-4)
        serial = sweep(ideal_device, spec, jobs=1)
        parallel = sweep(ideal_device, spec, jobs=2)
        assert serial.equals(parallel)

    def test_invalid_value_rejected_up_front(self, device):
        with pytest.raises(ValueError):
            sweep(device, SweepSpec(parameter="T1_ge", values=[20e-6, -1.0]))


# ─────────────────────────────────────────────────────────
# 역변환
# ─────────────────────────────────────────────────────────
@pytest.mark.slow
class TestInference:
    def test_ideal_device_round_trip(self, ideal_device):
        assert infer_population(1e-4, ideal_device, (0.0, 0.0)) == pytest.approx(1e-4, rel=1e-6)

    def test_measured_upper_bound(self, baseline):
        inferred = infer_population(6.7e-5, baseline.device, baseline.bath_range)
        assert 1.9e-5 / 2 <= inferred <= 1.9e-5 * 2

    def test_floor_maps_to_zero(self, device):
        floor = population_curve(device, [0.0], 0.037)[0]
        assert infer_population(floor, device, (0.037, 0.053)) == 0.0

    def test_below_floor(self, device):
        with pytest.raises(FloorDominatedError) as exc:
            infer_population(1e-6, device, (0.037, 0.053))
        assert exc.value.floor > 1e-6
