# jobs/run_error_budget.py
"""
오차 예산 배치 작업.

- 6개 스윕 패널(T1_ge, T_qb_bath, T1_ef, A_iSWAP, T_phi, F_ro) x 5 포인트
- bath 온도 양 끝에서의 measured-vs-true 영역 곡선
- 측정 상한 6.7e-5 의 역변환

    python -m jobs.run_error_budget --config table1 --out-dir out/error_budget --jobs 4
"""
import argparse
import logging
from pathlib import Path

import pandas as pd

from analysis.export import write_csv, write_json, build_record
from analysis.protocol import infer_population, inversion_grid, population_curve, sweep
from core.config import SETTINGS, SweepSpec, load_config
from core.errors import FloorDominatedError

logger = logging.getLogger(__name__)

# 패널별 스윕 값 (기본 장치 값을 가운데 포함)
ERROR_BUDGET_PANELS: dict[str, list[float]] = {
    "T1_ge": [10e-6, 20e-6, 28e-6, 40e-6, 80e-6],
    "T_qb_bath": [0.030, 0.037, 0.045, 0.053, 0.060],
    "T1_ef": [10e-6, 15e-6, 20e-6, 30e-6, 50e-6],
    "A_iSWAP": [0.8, 0.9, 1.0, 1.1, 1.2],
    "T_phi": [5e-6, 10e-6, 20e-6, 40e-6, 80e-6],
    "F_ro": [0.7, 0.8, 0.85, 0.9, 1.0],
}

MEASURED_UPPER_BOUND = 6.7e-5
INPUT_POPULATION = 1.9e-5


def run_panels(config, jobs: int = 1, population: float = INPUT_POPULATION) -> dict[str, pd.DataFrame]:
    tables = {}
    for name, values in ERROR_BUDGET_PANELS.items():
        spec = SweepSpec(parameter=name, values=values, population=population)
        tables[name] = sweep(config.device, spec, config.protocol, config.layout, jobs=jobs)
        print(f"  > [{name}] " + ", ".join(f"{p:.3e}" for p in tables[name]["population"]))
    return tables


def region_curves(config, points_per_decade: int = 5) -> pd.DataFrame:
    """bath 양 끝 온도에서의 measured-vs-true 곡선"""
    trues = inversion_grid(points_per_decade)
    frame = {"true_population": trues}
    for bath in config.bath_range:
        curve = population_curve(config.device, trues, bath, config.protocol, config.layout)
        frame[f"measured_{bath * 1e3:.0f}mK"] = curve
    return pd.DataFrame(frame)


def main():
    parser = argparse.ArgumentParser(description="protocol error budget sweeps")
    parser.add_argument("--config", default="table1.json")
    parser.add_argument("--out-dir", default="out/error_budget")
    parser.add_argument("--jobs", type=int, default=SETTINGS["jobs"])
    args = parser.parse_args()
    logging.basicConfig(level=SETTINGS["log_level"], format="%(message)s")

    config = load_config(args.config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    print("📊 error budget 계산 시작")
    tables = run_panels(config, jobs=args.jobs)
    for name, df in tables.items():
        write_csv(df, config, out / f"sweep_{name}.csv")

    print("📈 bath 영역 곡선 계산")
    write_csv(region_curves(config), config, out / "region_curves.csv")

    try:
        inferred = infer_population(MEASURED_UPPER_BOUND, config.device, config.bath_range, config.protocol, config.layout)
        summary = {"measured": MEASURED_UPPER_BOUND, "inferred": inferred, "bath_range": list(config.bath_range)}
    except FloorDominatedError as e:
        summary = {"measured": MEASURED_UPPER_BOUND, "inferred": None, "floor": e.floor}
    write_json(build_record("error_budget", summary, config), out / "inference.json")
    print(f"✅ 완료: {out} (inferred={summary.get('inferred')})")


if __name__ == "__main__":
    main()
