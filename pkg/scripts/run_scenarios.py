#!/usr/bin/env python3
"""Runs the probability-of-resolution sweeps for the bundled scenarios.

    python scripts/run_scenarios.py                 # all three, 200 trials each
    python scripts/run_scenarios.py correlated_pair --trials 50 --workers 4

Each scenario writes results/<name>/curves.csv, one example spectrum per
estimator, and a plot script.
"""
import argparse
import time
from pathlib import Path

import numpy as np

from jisodoa import bench
from jisodoa.array_model import config_from_mapping, generate_snapshots, read_mapping
from jisodoa.cli import PLAN_KEYS

HERE = Path(__file__).resolve().parent


def run(name, trials, workers, out_root):
    data = read_mapping(HERE / "configs" / f"{name}.yaml")
    scenario = config_from_mapping(data, extra_keys=PLAN_KEYS)
    plan = bench.ExperimentPlan(
        scenario=scenario,
        estimators=data["estimators"],
        snapshot_sweep=data["snapshot_sweep"],
        trials=trials or data["trials"],
        master_seed=scenario.rng_seed,
        workers=workers,
    )
    t0 = time.perf_counter()
    table = bench.run_sweep(plan)
    print(f"{name}: {plan.trials} trials per point, {time.perf_counter() - t0:.0f} s")
    print("  N:        " + " ".join(f"{n:5d}" for n in plan.snapshot_sweep))
    for est in plan.estimators:
        print(f"  {est:9s} " + " ".join(f"{p:5.2f}" for p in table.curve(est)))

    example = scenario.replace(num_snapshots=plan.snapshot_sweep[-1])
    X = generate_snapshots(example, np.random.default_rng(scenario.rng_seed))
    spectra = bench.estimator_outputs(X, example, plan.estimators)
    bench.emit_outputs(table, spectra, out_root / name)


def main():
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("names", nargs="*", default=["correlated_pair", "ten_sources", "undercount"])
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()
    for name in args.names:
        run(name, args.trials, args.workers, args.out)


if __name__ == "__main__":
    main()
