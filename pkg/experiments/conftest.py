# experiments/conftest.py
# pytest 공용 fixture. 루트(pyproject 의 pythonpath=["."]) 기준으로 core / analysis 를 임포트합니다.
import pytest

from core.config import load_config


@pytest.fixture(scope="session")
def baseline():
    """실측 장치 설정 (configs/table1.json)"""
    return load_config("table1.json")


@pytest.fixture(scope="session")
def ideal():
    """소산/열잡음이 없는 장치 설정 (configs/ideal.json)"""
    return load_config("ideal.json")


@pytest.fixture(scope="session")
def device(baseline):
    return baseline.device


@pytest.fixture(scope="session")
def ideal_device(ideal):
    return ideal.device
