# jobs/make_synthetic.py
"""
stats 커맨드용 합성 데이터 (seed 고정).

    python -m jobs.make_synthetic --seed 7 --out-dir data/synthetic
"""
import argparse
from pathlib import Path

import numpy as np
import pandas as pd

from analysis.thermo import synthetic_block_series, synthetic_thermometry

THERMO_FREQ_HZ = 5.0486e9
THERMO_OFFSET = 3e-5


def make_block_series(n_blocks: int, seed: int) -> pd.DataFrame:
    series = synthetic_block_series(n_blocks, 1.2e-5, 1e-4, seed)
    return pd.DataFrame({"block": np.arange(1, n_blocks + 1), "mean": series})


def make_thermometry(seed: int, noise: float = 0.05, n_shots: int | None = None) -> pd.DataFrame:
    temps = np.linspace(0.02, 0.1, 9)
    points = synthetic_thermometry(temps, THERMO_FREQ_HZ, THERMO_OFFSET, noise, seed, n_shots)
    return pd.DataFrame(
        {
            "temperature": [p.temperature for p in points],
            "population": [p.population for p in points],
            "sigma": [p.sigma for p in points],
        }
    )


def main():
    parser = argparse.ArgumentParser(description="synthetic stats inputs")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--blocks", type=int, default=10_000)
    parser.add_argument("--noise", type=float, default=0.05)
    parser.add_argument("--n-shots", type=int, default=None)
    parser.add_argument("--out-dir", default="data/synthetic")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    make_block_series(args.blocks, args.seed).to_csv(out / "block_series.csv", index=False, float_format="%.8e")
    make_thermometry(args.seed, args.noise, args.n_shots).to_csv(
        out / "thermometry.csv", index=False, float_format="%.8e"
    )
    print(f"✅ 합성 데이터 저장: {out}")


if __name__ == "__main__":
    main()
