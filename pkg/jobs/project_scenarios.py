# jobs/project_scenarios.py
"""
장치 시나리오 전체 projection.

    python -m jobs.project_scenarios --out-dir out/projections
"""
import argparse
import logging
from pathlib import Path

from analysis.bounds import project, strain_sensitivity_rows
from analysis.export import build_record, write_csv, write_json
from core.config import SETTINGS, load_config

logger = logging.getLogger(__name__)

SCENARIO_CONFIGS = [
    "table2_current.json",
    "table2_next_generation.json",
    "table2_mhz_device.json",
]


def run_all(config_names=SCENARIO_CONFIGS):
    """[(config, ProjectionResult)]"""
    results = []
    for name in config_names:
        config = load_config(name)
        results.append((config, project(config.scenario, config.device)))
    return results


def main():
    parser = argparse.ArgumentParser(description="device scenario projections")
    parser.add_argument("--out-dir", default="out/projections")
    args = parser.parse_args()
    logging.basicConfig(level=SETTINGS["log_level"], format="%(message)s")

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    print("🔭 시나리오 projection 시작")
    results = run_all()
    for config, proj in results:
        write_json(build_record("project", proj, config), out / f"{proj.label}.json")
        flag = " (assumption-dependent)" if proj.assumptions.get("assumption_dependent") else ""
        print(f"  > {proj.label}: h0={proj.gw.h0:.3e}, λ_CSL={proj.csl.lambda_csl:.3e}{flag}")

    # 기준 설정 = 첫 시나리오
    write_csv(strain_sensitivity_rows([p for _, p in results]), results[0][0], out / "strain_sensitivity.csv")
    print(f"✅ 완료: {out}")


if __name__ == "__main__":
    main()
