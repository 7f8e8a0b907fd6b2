import logging
from contextlib import asynccontextmanager
from enum import Enum

from fastapi import FastAPI, HTTPException, Query, Request
from pydantic import BaseModel, ConfigDict, Field

# --- [Main] 핵심 모듈 임포트 ---
# core.config 가 임포트되면서 .env 를 먼저 로드합니다.
from analysis import bounds, protocol
from analysis.export import to_jsonable
from core.config import SETTINGS, ProtocolSettings, RunConfig, config_hash, load_config, resolve_config_path
from core.errors import HQSError

logger = logging.getLogger("service")

DEFAULT_CONFIG = "table1.json"
SCENARIO_LABELS = ["current", "next_generation", "mhz_device"]


class Channel(str, Enum):
    gw = "gw"
    dp = "dp"
    csl = "csl"


# --- [FastAPI] Lifespan (시작/종료 이벤트) ---
@asynccontextmanager
async def lifespan(app: FastAPI):
    # 서버가 시작될 때 실행
    logging.basicConfig(level=SETTINGS["log_level"], format="%(message)s")
    logger.info("--- [FastAPI Startup] 서버 시작... ---")

    # 기본 장치 설정을 앱 상태에 저장
    app.state.CONFIG = load_config(DEFAULT_CONFIG)
    app.state.CONFIG_HASH = config_hash(app.state.CONFIG)
    logger.info("--- [FastAPI Startup] 기본 설정 로드: %s (%s) ---", DEFAULT_CONFIG, app.state.CONFIG_HASH[:12])

    yield

    # 서버가 종료될 때 실행
    logger.info("--- [FastAPI Shutdown] 서버 종료... ---")


# --- [FastAPI] 앱 생성 ---
app = FastAPI(
    title="HBAR Quantum Sensing API",
    description="phonon population 프로토콜 시뮬레이션과 GW / DP / CSL 상한 계산",
    version="0.1.0",
    lifespan=lifespan,
)


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    population: float = Field(..., ge=0.0, lt=0.5, description="실제 phonon 들뜬상태 population")
    protocol: ProtocolSettings | None = None
    device_overrides: dict[str, float] = Field(default_factory=dict)


def _raise_http(e: Exception):
    # 입력 오류 → 400, 수치 오류 → 422
    if isinstance(e, ValueError):
        raise HTTPException(status_code=400, detail=str(e))
    raise HTTPException(status_code=422, detail=str(e))


# --- [FastAPI] API 엔드포인트 ---
@app.get("/health", summary="Health check")
async def health(request: Request):
    return {"status": "ok", "config_hash": request.app.state.CONFIG_HASH}


@app.get(
    "/bound/{channel}",
    summary="GW / DP / CSL bound",
    description="측정 population 에서 h0, κ, λ_CSL 상한을 계산합니다.",
)
async def bound(
    request: Request,
    channel: Channel,
    population: float = Query(..., gt=0.0, lt=1.0, description="측정 population", examples=[6.7e-5]),
    e33: float | None = Query(None, gt=0.0, description="압전 계수 [C/m²] (dp)"),
):
    config: RunConfig = request.app.state.CONFIG
    logger.info("--- [FastAPI Request] '/bound/%s' 호출됨 (P=%.3e) ---", channel.value, population)
    try:
        if channel is Channel.gw:
            result = bounds.h0_bound(population, config.device)
        elif channel is Channel.dp:
            result = bounds.kappa_bound(population, config.device, e33)
        else:
            result = bounds.csl_bound(population, config.device.T1_phonon)
    except (HQSError, ValueError, ArithmeticError) as e:
        _raise_http(e)
    return {"channel": channel.value, "result": to_jsonable(result), "config_hash": request.app.state.CONFIG_HASH}


@app.post("/simulate", summary="Run the population-measurement protocol")
async def simulate(request: Request, body: SimulateRequest):
    config: RunConfig = request.app.state.CONFIG
    logger.info("--- [FastAPI Request] '/simulate' 호출됨 (P=%.3e) ---", body.population)
    try:
        device = config.device.replace(**body.device_overrides) if body.device_overrides else config.device
        settings = body.protocol or config.protocol
        result = protocol.run_protocol(device, body.population, settings, config.layout)
    except (HQSError, ValueError, ArithmeticError) as e:
        _raise_http(e)
    return {"result": to_jsonable(result), "device": device.model_dump(mode="json")}


@app.get("/project/{label}", summary="Device scenario projection")
async def project(label: str):
    if label not in SCENARIO_LABELS:
        raise HTTPException(status_code=404, detail=f"알 수 없는 시나리오: {label} (가능: {SCENARIO_LABELS})")
    try:
        cfg = load_config(resolve_config_path(f"table2_{label}.json"))
        proj = bounds.project(cfg.scenario, cfg.device)
    except (HQSError, ValueError, ArithmeticError) as e:
        _raise_http(e)
    return to_jsonable(proj)


# (Uvicorn으로 실행하기 위한 엔트리 포인트)
if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="127.0.0.1", port=8000)
