# core/errors.py
"""
패키지 공통 예외 계층.

- 입력/설정 오류 → ValueError 계열 (CLI exit 2, API 400)
- 수치/수렴 오류 → ArithmeticError 계열 (CLI exit 3, API 422)
"""
from __future__ import annotations


class HQSError(Exception):
    """모든 도메인 예외의 베이스"""


# ── 사용자/설정 오류
class InvalidDimensionError(HQSError, ValueError):
    pass


class InvalidParameterError(HQSError, ValueError):
    pass


class ConfigError(HQSError, ValueError):
    """설정 파일 파싱/검증 오류. key 또는 row 위치를 메시지에 포함합니다."""

    def __init__(self, message: str, *, key: str | None = None, row: int | None = None):
        super().__init__(message)
        self.key = key
        self.row = row


# ── 수치 오류
class NumericalError(HQSError, ArithmeticError):
    pass


class NumericalConsistencyError(NumericalError):
    pass


class IntegrationError(NumericalError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.6e} s)")
        self.t = t


class ConvergenceError(NumericalError):
    pass


class DegenerateContrastError(NumericalError):
    pass


class FloorDominatedError(NumericalError):
    def __init__(self, measured: float, floor: float):
        super().__init__(
            f"측정값 {measured:.3e} 가 시뮬레이션 floor {floor:.3e} 보다 작습니다 (floor-dominated)"
        )
        self.measured = measured
        self.floor = floor


class InversionError(NumericalError):
    pass


class NoSolutionError(NumericalError):
    pass


class FitError(NumericalError):
    pass
