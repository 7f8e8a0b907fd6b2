# cli.py
"""
커맨드라인 진입점.

    python cli.py simulate --config baseline --population 1.9e-5 --out out/sim.json
    python cli.py sweep    --config baseline --parameter T1_ge --values 10e-6 20e-6 40e-6 --jobs 4
    python cli.py bound    --channel gw --population 6.7e-5
    python cli.py project  --config table2_next_generation
    python cli.py stats    --mode blocks --input data/block_series.csv
    python cli.py schema

종료 코드: 0 성공, 2 사용자/설정 오류, 3 수치/수렴 오류
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from analysis import bounds, protocol, thermo
from analysis.export import build_record, verify_output, write_csv, write_json
from core.config import SETTINGS, RunConfig, SweepSpec, config_hash, config_schema, load_config
from core.errors import ConfigError

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_USER = 2
EXIT_NUMERIC = 3

DEFAULT_CONFIG = "table1.json"


# ─────────────────────────────────────────────────────────
# 커맨드
# ─────────────────────────────────────────────────────────
def cmd_simulate(config: RunConfig, measured: float | None = None) -> dict:
    """프로토콜 1회 + (선택) 측정값 역변환"""
    if config.population is None:
        raise ConfigError("simulate 에는 population 이 필요합니다 (--population 또는 설정의 population)", key="population")
    logger.info("--- [Simulate] input population=%.3e ---", config.population)
    result = protocol.run_protocol(config.device, config.population, config.protocol, config.layout)
    extra = {}
    if measured is not None:
        extra["inference"] = {
            "measured": measured,
            "bath_range": list(config.bath_range),
            "inferred": protocol.infer_population(
                measured, config.device, config.bath_range, config.protocol, config.layout
            ),
        }
    logger.info("  > extracted population: %.6e", result.population)
    return build_record("simulate", result, config, extra)


def cmd_sweep(config: RunConfig, jobs: int = 1):
    if config.sweep is None:
        raise ConfigError("sweep 블록이 없습니다 (--parameter / --values 로 지정 가능)", key="sweep")
    table = protocol.sweep(config.device, config.sweep, config.protocol, config.layout, jobs=jobs)
    return table


def cmd_bound(config: RunConfig, channel: str, population: float, e33: float | None = None) -> dict:
    if not population > 0:
        raise ConfigError(f"population 은 양수여야 합니다: {population}", key="population")
    logger.info("--- [Bound] channel=%s, P=%.3e ---", channel, population)
    if channel == "gw":
        result = bounds.h0_bound(population, config.device)
    elif channel == "dp":
        with warnings.catch_warnings(record=True):
            warnings.simplefilter("always")
            result = bounds.kappa_bound(population, config.device, e33)
    elif channel == "csl":
        result = bounds.csl_bound(population, config.device.T1_phonon)
    else:
        raise ConfigError(f"알 수 없는 channel: {channel!r}", key="channel")
    return build_record("bound", result, config, {"channel": channel})


def cmd_project(config: RunConfig, channel: str | None = None) -> tuple[dict, object]:
    if config.scenario is None:
        raise ConfigError("scenario 블록이 없습니다 (table2_*.json 설정을 사용하세요)", key="scenario")
    proj = bounds.project(config.scenario, config.device)
    extra = {}
    if channel == "dp" and "dp" in proj.skipped:
        notice = f"'{proj.label}' 시나리오에서는 dp 채널을 계산하지 않습니다 (skipped)"
        logger.warning("  > !!! %s", notice)
        extra["notice"] = notice
    record = build_record("project", proj, config, extra)
    return record, bounds.strain_sensitivity_rows([proj])


def cmd_stats(config: RunConfig, mode: str, input_path: str | None, freq: float | None = None) -> dict:
    seed = config.seed if config.seed is not None else 0
    freq = freq if freq is not None else config.device.phonon_freq_hz

    if mode == "weighted-mean":
        if input_path is None:
            raise ConfigError("weighted-mean 에는 --input CSV 가 필요합니다", key="input_path")
        records = thermo.read_records_csv(input_path)
        result = {"weighted_mean": thermo.weighted_mean(records), "n_records": len(records)}
    elif mode == "blocks":
        series = (
            thermo.read_block_series_csv(input_path)
            if input_path is not None
            else thermo.synthetic_block_series(10_000, 0.0, 1e-4, seed)
        )
        stats = thermo.block_statistics(series)
        result = {
            "mean": stats.mean,
            "sigma_total": stats.sigma_total,
            "n_blocks": len(series),
            "sem_final": float(stats.sem_curve[-1]),
            "sem_loglog_slope": stats.loglog_slope(),
            "curve": stats.to_frame().to_dict(orient="list"),
        }
    elif mode == "fit-bose":
        points = (
            thermo.read_thermometry_csv(input_path)
            if input_path is not None
            else thermo.synthetic_thermometry(np.linspace(0.02, 0.1, 9), freq, 3e-5, 0.05, seed)
        )
        fit = thermo.fit_bose(points, freq)
        result = {"fit": fit, "freq_hz": freq, "n_points": len(points)}
    else:
        raise ConfigError(f"알 수 없는 stats mode: {mode!r}", key="mode")
    return build_record("stats", result, config, {"mode": mode, "input": input_path})


def cmd_schema() -> dict:
    return config_schema()


# ─────────────────────────────────────────────────────────
# argparse
# ─────────────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqs", description="HBAR population protocol / bound calculator")
    parser.add_argument("command", choices=["simulate", "sweep", "bound", "project", "stats", "schema"])
    parser.add_argument("--config", default=None, help="설정 JSON (HQS_CONFIG_DIR 에서도 검색)")
    parser.add_argument("--out", default=None, help="출력 파일 (없으면 stdout)")
    parser.add_argument("--channel", choices=["gw", "dp", "csl"], default=None)
    parser.add_argument("--population", type=float, default=None)
    parser.add_argument("--measured", type=float, default=None, help="simulate: 측정 population 역변환")
    parser.add_argument("--e33", type=float, default=None)
    parser.add_argument("--parameter", default=None, help="sweep 파라미터")
    parser.add_argument("--values", type=float, nargs="*", default=None, help="sweep 값 목록")
    parser.add_argument("--mode", choices=["weighted-mean", "blocks", "fit-bose"], default=None)
    parser.add_argument("--input", default=None, help="stats 입력 CSV")
    parser.add_argument("--freq", type=float, default=None, help="stats fit-bose 주파수 [Hz]")
    parser.add_argument("--csv-out", default=None, help="project: strain sensitivity CSV")
    parser.add_argument("--jobs", type=int, default=SETTINGS["jobs"])
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--verify", action="store_true", help="--out 파일의 config hash 를 다시 계산해 비교")
    return parser


def _prepare_config(args: argparse.Namespace) -> RunConfig:
    default = DEFAULT_CONFIG
    if args.command == "project" and args.config is None:
        raise ConfigError("project 에는 --config table2_<label>.json 이 필요합니다", key="config")
    config = load_config(args.config or default)
    updates: dict = {}
    if args.population is not None and args.command == "simulate":
        updates["population"] = args.population
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.input is not None:
        updates["input_path"] = args.input
    if args.command == "sweep" and (args.parameter is not None or args.values is not None):
        base = config.sweep.model_dump() if config.sweep else {}
        if args.parameter is not None:
            base["parameter"] = args.parameter
        if args.values is not None:
            base["values"] = args.values
        updates["sweep"] = SweepSpec.model_validate(base).model_dump()
    return config.replace(**updates) if updates else config


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)


def _run(args: argparse.Namespace) -> int:
    if args.command == "schema":
        _emit(json.dumps(cmd_schema(), indent=2, sort_keys=True, ensure_ascii=False) + "\n", None)
        return EXIT_OK

    config = _prepare_config(args)

    if args.verify:
        if args.out is None:
            raise ConfigError("--verify 에는 --out 이 필요합니다", key="out")
        ok, expected, recorded = verify_output(args.out)
        current = config_hash(config)
        logger.info("--- [Verify] %s ---", args.out)
        logger.info("  > 재계산: %s", expected)
        logger.info("  > 기록값: %s", recorded)
        logger.info("  > 현재 설정: %s", current)
        if not ok:
            logger.error("  > !!! 파일 내부 hash 불일치")
            return EXIT_USER
        if recorded != current:
            logger.error("  > !!! 현재 설정과 다른 설정으로 만든 파일입니다")
            return EXIT_USER
        return EXIT_OK

    if args.command == "simulate":
        _emit(write_json(cmd_simulate(config, args.measured), args.out), args.out)
    elif args.command == "sweep":
        table = cmd_sweep(config, jobs=max(1, args.jobs))
        _emit(write_csv(table, config, args.out), args.out)
    elif args.command == "bound":
        if args.channel is None:
            raise ConfigError("bound 에는 --channel 이 필요합니다", key="channel")
        population = args.population if args.population is not None else config.population
        if population is None:
            raise ConfigError("bound 에는 --population 이 필요합니다", key="population")
        _emit(write_json(cmd_bound(config, args.channel, population, args.e33), args.out), args.out)
    elif args.command == "project":
        record, rows = cmd_project(config, args.channel)
        _emit(write_json(record, args.out), args.out)
        csv_out = args.csv_out
        if csv_out is None and args.out is not None:
            csv_out = str(Path(args.out).with_suffix(".csv"))
        if csv_out is not None:
            write_csv(rows, config, csv_out)
    elif args.command == "stats":
        if args.mode is None:
            raise ConfigError("stats 에는 --mode 가 필요합니다", key="mode")
        record = cmd_stats(config, args.mode, config.input_path, args.freq)
        _emit(write_json(record, args.out), args.out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=SETTINGS["log_level"], format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ValueError as e:
        # ConfigError, InvalidParameterError, pydantic ValidationError, CSV 오류
        logger.error("!!! 입력/설정 오류: %s", e)
        return EXIT_USER
    except ArithmeticError as e:
        logger.error("!!! 수치 오류: %s", e)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
